//! Thermal Wigner function `W̃ = ħ² W` in dimensionless phase-space
//! coordinates `x = q/b`, `y = p b/ħ`, normalized to unit volume.
//!
//! The production path sums the closed-form Laguerre series. Every term of
//! the six-index sum is a product of a mode-1 and a mode-2 factor, and the
//! parity rule `n + m ≡ p` only couples the two modes through the parity
//! classes `s = n mod 2`, `s̄ = n̄ mod 2`. Hence
//!
//! ```text
//! W̃ = P Σ_{s, s̄} G1_{s s̄}(x1, y1) G2_{t(s) t(s̄)}(x2, y2)
//! ```
//!
//! with `t(s) = (p + s) mod 2` and per-mode sums `G_{s s̄}` over
//! `(n ≡ s, n̄ ≡ s̄, n_th)`. Within a mode, terms are grouped by the band
//! `d = n − n̄` and the Laguerre degree `j = n_th + min(n, n̄)`, so each point
//! costs one normalized-Laguerre recurrence per `|d|`.

mod grid;
pub mod oracle;
pub mod reference;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{ln_factorial, normalized_laguerre_functions};
use crate::states::BellCatSpec;
use crate::tfd::{Mode, ThermalParams};
pub use crate::truncation::TruncationConfig;

pub use grid::{wigner_grid, Axis, Coordinate, SliceSpec, WignerGrid};
pub use oracle::{kernel_matrix, oracle_cutoff, wigner_point_oracle, OracleEvaluator};

/// Dimensionless phase-space point `(x1, y1, x2, y2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl PhasePoint {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    /// `(x, y)` of one mode.
    pub fn mode(&self, mode: Mode) -> (f64, f64) {
        match mode {
            Mode::One => (self.x1, self.y1),
            Mode::Two => (self.x2, self.y2),
        }
    }

    /// `(x1, y1, −x2, −y2)`.
    pub fn mode2_reflected(&self) -> Self {
        Self { x2: -self.x2, y2: -self.y2, ..*self }
    }

    pub fn is_finite(&self) -> bool {
        [self.x1, self.y1, self.x2, self.y2].iter().all(|v| v.is_finite())
    }
}

/// How the complex factor `χ^{|n − n̄|}` and the sign of a term are read.
///
/// Only [`ChiConvention::Standard`] reproduces the Wigner transform of the
/// density operator for every amplitude; the others exist for validation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChiConvention {
    /// `χ = x − i y` when the ket index exceeds the bra index, `x + i y`
    /// otherwise; sign `(−1)^{n_th + min(n, n̄)}`.
    #[default]
    Standard,
    /// `χ = x + i y` when the ket index exceeds the bra index, conjugate
    /// otherwise, with sign `(−1)^{n_th + max(n, n̄)}`. Mirrors `x → −x` in
    /// each mode; agrees with `Standard` only for real `α`.
    AsPrinted,
    /// `χ = x + i y` for every band. Breaks Hermiticity: a negative control.
    Unconjugated,
}

impl ChiConvention {
    /// `e^{i φ d}` factor of band `d` at polar angle `theta`, and whether the
    /// band picks up an extra `(−1)^{|d|}`.
    fn angular(self, d: i64, theta: f64) -> (C64, bool) {
        match self {
            ChiConvention::Standard => (C64::from_polar(1.0, -(d as f64) * theta), false),
            ChiConvention::AsPrinted => (C64::from_polar(1.0, d as f64 * theta), true),
            ChiConvention::Unconjugated => (C64::from_polar(1.0, d.unsigned_abs() as f64 * theta), false),
        }
    }
}

/// Largest tolerated `|Im W̃| / (1 + |Re W̃|)`.
pub const RESIDUE_TOLERANCE: f64 = 1e-9;

/// Real part of a complex series value, or an error when the imaginary part
/// is not round-off.
pub fn checked_real(value: C64) -> Result<f64> {
    if !(value.re.is_finite() && value.im.is_finite()) || value.im.abs() > RESIDUE_TOLERANCE * (1.0 + value.re.abs()) {
        return Err(Error::ImaginaryResidue { real: value.re, imag: value.im });
    }
    Ok(value.re)
}

/// Band/degree coefficient table of one mode.
#[derive(Clone, Debug)]
struct ModeSeries {
    max_band: usize,
    max_degree: usize,
    /// `[s][s̄][d + max_band][j]`, magnitude only.
    coef: Vec<f64>,
    /// `e^{i d arg α_mode}` by `d + max_band`.
    band_phase: Vec<C64>,
}

impl ModeSeries {
    fn new(alpha: C64, params: &ThermalParams, mode: Mode, amp_cap: usize, thermal_cap: usize) -> Self {
        let zero_t = params.is_zero_temperature();
        let thermal_cap = if zero_t { 0 } else { thermal_cap };
        let ln_one_minus_q = params.one_minus_boltzmann(mode).ln();
        let ln_q = -params.reduced_energy(mode);
        let ln_amp = alpha.norm().ln() + 0.5 * ln_one_minus_q;

        let max_band = amp_cap;
        let max_degree = thermal_cap + amp_cap;
        let bands = 2 * max_band + 1;
        let mut series = Self {
            max_band,
            max_degree,
            coef: vec![0.0; 4 * bands * (max_degree + 1)],
            band_phase: (0..bands)
                .map(|i| C64::from_polar(1.0, (i as f64 - max_band as f64) * alpha.arg()))
                .collect(),
        };
        let ln_amp_fact: Vec<f64> = (0..=amp_cap).map(|n| n as f64 * ln_amp - ln_factorial(n)).collect();
        for th in 0..=thermal_cap {
            let ln_th = if th == 0 { 0.0 } else { th as f64 * ln_q } + ln_one_minus_q - ln_factorial(th);
            for n in 0..=amp_cap {
                for nb in 0..=amp_cap {
                    let j = th + n.min(nb);
                    // |⟨th+n|A|th+n̄⟩|; the kernel normalization lives in the Laguerre functions
                    let ln_c = ln_th
                        + ln_amp_fact[n]
                        + ln_amp_fact[nb]
                        + 0.5 * (ln_factorial(th + n) + ln_factorial(th + nb));
                    let idx = series.index(n % 2, nb % 2, n as i64 - nb as i64, j);
                    series.coef[idx] += ln_c.exp();
                }
            }
        }
        series
    }

    fn index(&self, s: usize, sb: usize, d: i64, j: usize) -> usize {
        let bands = 2 * self.max_band + 1;
        let band = (d + self.max_band as i64) as usize;
        (((s * 2 + sb) * bands) + band) * (self.max_degree + 1) + j
    }

    /// `G_{s s̄}(x, y)` including the `1/π` of the single-mode kernel.
    fn factors(&self, x: f64, y: f64, convention: ChiConvention, buf: &mut Vec<f64>) -> [[C64; 2]; 2] {
        let arg = 2.0 * (x * x + y * y);
        let theta = y.atan2(x);
        let mut g = [[C64::new(0.0, 0.0); 2]; 2];
        for abs_d in 0..=self.max_band {
            let top = self.max_degree - abs_d;
            normalized_laguerre_functions(abs_d, top, arg, buf);
            if buf.iter().all(|&v| v == 0.0) {
                continue;
            }
            let signs: &[i64] = if abs_d == 0 { &[1] } else { &[1, -1] };
            for d in signs.iter().map(|s| s * abs_d as i64) {
                let (rot, flip) = convention.angular(d, theta);
                let band = self.band_phase[(d + self.max_band as i64) as usize] * rot;
                let band = if flip && abs_d % 2 == 1 { -band } else { band };
                for s in 0..2 {
                    // n − n̄ ≡ s − s̄
                    let sb = (s + abs_d) % 2;
                    let start = self.index(s, sb, d, 0);
                    let row = &self.coef[start..=start + top];
                    let mut sum = 0.0;
                    for (j, (c, l)) in row.iter().zip(buf.iter()).enumerate() {
                        let t = c * l;
                        sum += if j % 2 == 0 { t } else { -t };
                    }
                    g[s][sb] += band * sum;
                }
            }
        }
        for row in g.iter_mut() {
            for v in row.iter_mut() {
                *v /= PI;
            }
        }
        g
    }
}

/// Per-mode factor tables `G_{s s̄}` at one point of that mode.
pub type ModeFactors = [[C64; 2]; 2];

/// Precomputed closed-form series for one state, temperature and truncation.
#[derive(Clone, Debug)]
pub struct WignerEvaluator {
    spec: BellCatSpec,
    trunc: TruncationConfig,
    prefactor: f64,
    partner: [usize; 2],
    modes: [ModeSeries; 2],
    convention: ChiConvention,
    tail_bound: f64,
}

impl WignerEvaluator {
    /// Errors when `trunc` discards more than its own tolerance.
    pub fn new(spec: &BellCatSpec, params: &ThermalParams, trunc: &TruncationConfig) -> Result<Self> {
        let tail_bound = trunc.check(spec, params)?;
        Ok(Self::unchecked(spec, params, trunc, tail_bound))
    }

    /// Caps chosen automatically for the default tolerance.
    pub fn auto(spec: &BellCatSpec, params: &ThermalParams) -> Result<Self> {
        let trunc = TruncationConfig::auto(spec, params)?;
        Self::new(spec, params, &trunc)
    }

    fn unchecked(spec: &BellCatSpec, params: &ThermalParams, trunc: &TruncationConfig, tail_bound: f64) -> Self {
        let modes = [Mode::One, Mode::Two].map(|m| {
            let i = m.index();
            ModeSeries::new(spec.mode_alpha(i), params, m, trunc.amplitude_caps[i], trunc.thermal_caps[i])
        });
        Self {
            spec: *spec,
            trunc: *trunc,
            prefactor: spec.pair_prefactor(),
            partner: [spec.partner_class(0), spec.partner_class(1)],
            modes,
            convention: ChiConvention::Standard,
            tail_bound,
        }
    }

    pub fn with_convention(mut self, convention: ChiConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn convention(&self) -> ChiConvention {
        self.convention
    }

    pub fn spec(&self) -> &BellCatSpec {
        &self.spec
    }

    pub fn truncation(&self) -> &TruncationConfig {
        &self.trunc
    }

    /// Relative tail bound of the caps in use.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `G_{s s̄}` of `mode` at `(x, y)`.
    pub fn mode_factors(&self, mode: Mode, x: f64, y: f64) -> ModeFactors {
        let mut buf = Vec::new();
        self.mode_factors_with(mode, x, y, &mut buf)
    }

    pub(crate) fn mode_factors_with(&self, mode: Mode, x: f64, y: f64, buf: &mut Vec<f64>) -> ModeFactors {
        self.modes[mode.index()].factors(x, y, self.convention, buf)
    }

    /// `P Σ G1_{s s̄} G2_{t(s) t(s̄)}`.
    pub fn combine(&self, g1: &ModeFactors, g2: &ModeFactors) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for s in 0..2 {
            for sb in 0..2 {
                acc += g1[s][sb] * g2[self.partner[s]][self.partner[sb]];
            }
        }
        acc * self.prefactor
    }

    /// Mode-2 factors rearranged so that [`Self::combine_real`] is a plain
    /// four-term dot product.
    pub(crate) fn partnered(&self, g2: &ModeFactors) -> ModeFactors {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for s in 0..2 {
            for sb in 0..2 {
                out[s][sb] = g2[self.partner[s]][self.partner[sb]] * self.prefactor;
            }
        }
        out
    }

    /// Complex series value; the imaginary part is round-off for a consistent
    /// convention.
    pub fn evaluate_complex(&self, pt: &PhasePoint) -> C64 {
        let mut buf = Vec::new();
        let g1 = self.mode_factors_with(Mode::One, pt.x1, pt.y1, &mut buf);
        let g2 = self.mode_factors_with(Mode::Two, pt.x2, pt.y2, &mut buf);
        self.combine(&g1, &g2)
    }

    pub fn evaluate(&self, pt: &PhasePoint) -> Result<f64> {
        if !pt.is_finite() {
            return Err(Error::InvalidConfig(format!("non-finite phase point {pt:?}")));
        }
        checked_real(self.evaluate_complex(pt))
    }
}

/// `W̃` at one point from the closed-form series.
pub fn wigner_point(
    spec: &BellCatSpec,
    params: &ThermalParams,
    pt: PhasePoint,
    trunc: &TruncationConfig,
) -> Result<f64> {
    WignerEvaluator::new(spec, params, trunc)?.evaluate(&pt)
}
