//! Negative volume of the thermal Wigner function.
//!
//! `I± = ∫ max(±W̃, 0)` over the box `[-L, L]^4`; `δ = ∫ (|W̃| − W̃) = 2 I−`
//! and `ν = 1 − (I+ − I−)/(I+ + I−)`. With unit normalization `I+ − I− = 1`
//! the two are tied by `ν = δ/(1 + δ)`.
//!
//! The 4D grid is the product of two per-mode 2D grids, so the mode factors
//! are tabulated once per mode and each of the `n^4` values is a four-term
//! contraction.
//!
//! `W̃` is smooth and Gaussian-decaying, but `max(±W̃, 0)` has a kink on the
//! zero set. The default rule is the uniform (trapezoid) rule, spectrally
//! accurate for the smooth parts, with the cells where the innermost
//! coordinate crosses zero re-integrated through a local cubic; this turns
//! the erratic `O(h^2)` kink error into `O(h^3)`. Plain Gauss–Legendre is
//! kept for comparison.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_scaled, pairwise_sum};
use crate::states::BellCatSpec;
use crate::tfd::{thermal_params, Mode, ThermalParams};
use crate::truncation::{TruncationConfig, DEFAULT_EPSILON};
use crate::wigner::{ModeFactors, WignerEvaluator, RESIDUE_TOLERANCE};

/// Largest accepted `|I+ − I− − 1|`.
pub const NORMALIZATION_LIMIT: f64 = 0.01;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    /// Uniform midpoint grid with zero-crossing cells re-integrated.
    #[default]
    Uniform,
    /// Tensor Gauss–Legendre.
    GaussLegendre,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    /// Nodes per axis.
    pub nodes: usize,
    /// Box half-width `L`.
    pub half_width: f64,
}

impl QuadratureSpec {
    pub const DEFAULT_NODES: usize = 96;
    pub const MIN_NODES: usize = 8;
    /// Envelope widths of padding beyond the coherent lobes.
    pub const PADDING: f64 = 6.0;

    pub fn new(nodes: usize, half_width: f64) -> Self {
        Self { rule: QuadratureRule::Uniform, nodes, half_width }
    }

    pub fn with_rule(self, rule: QuadratureRule) -> Self {
        Self { rule, ..self }
    }

    /// Smallest admissible half-width for `spec`: `sqrt(2)|α| + 4`.
    pub fn minimum_half_width(spec: &BellCatSpec) -> f64 {
        SQRT_2 * spec.alpha().norm() + 4.0
    }

    /// Default box: the coherent lobes sit at `sqrt(2)|α| u` and the thermal
    /// envelope has width `sqrt((1 + q)/(1 − q))`; pad by [`Self::PADDING`]
    /// widths.
    pub fn default_for(spec: &BellCatSpec, params: &ThermalParams) -> Self {
        let mut reach: f64 = 0.0;
        for mode in [Mode::One, Mode::Two] {
            let q = params.boltzmann(mode);
            let width = ((1.0 + q) / params.one_minus_boltzmann(mode)).sqrt();
            reach = reach.max(SQRT_2 * spec.alpha().norm() * params.u(mode) + Self::PADDING * width);
        }
        Self::new(Self::DEFAULT_NODES, reach.max(Self::minimum_half_width(spec)))
    }

    pub fn validate(&self, spec: &BellCatSpec) -> Result<()> {
        if self.nodes < Self::MIN_NODES {
            return Err(Error::InvalidConfig(format!(
                "quadrature needs at least {} nodes per axis, got {}",
                Self::MIN_NODES,
                self.nodes
            )));
        }
        let min = Self::minimum_half_width(spec);
        if !(self.half_width.is_finite() && self.half_width >= min) {
            return Err(Error::InvalidConfig(format!(
                "quadrature half-width {} below sqrt(2)|alpha| + 4 = {min:.4}",
                self.half_width
            )));
        }
        Ok(())
    }

    /// One-dimensional nodes and weights.
    pub fn rule_1d(&self) -> (Vec<f64>, Vec<f64>) {
        match self.rule {
            QuadratureRule::GaussLegendre => gauss_legendre_scaled(self.nodes, self.half_width),
            QuadratureRule::Uniform => {
                let h = 2.0 * self.half_width / self.nodes as f64;
                let x = (0..self.nodes).map(|i| -self.half_width + (i as f64 + 0.5) * h).collect();
                (x, vec![h; self.nodes])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NegativityResult {
    /// `2 I−`.
    pub delta: f64,
    /// `∫ (|W̃| − W̃)` accumulated on its own.
    pub delta_direct: f64,
    pub nu: f64,
    pub i_plus: f64,
    pub i_minus: f64,
    /// `I+ − I−`; 1 for an exact integration.
    pub norm_check: f64,
    pub quad: QuadratureSpec,
    pub trunc: TruncationConfig,
    /// Relative tail bound of the series caps.
    pub tail_bound: f64,
    /// Largest `|Im W̃| / (1 + |Re W̃|)` on the grid.
    pub max_residue: f64,
}

impl NegativityResult {
    /// `|ν − δ/(1+δ)| / (δ/(1+δ))`, zero when both vanish.
    pub fn identity_error(&self) -> f64 {
        let expect = self.delta / (1.0 + self.delta);
        let diff = (self.nu - expect).abs();
        if diff == 0.0 { 0.0 } else { diff / expect.abs().max(f64::MIN_POSITIVE) }
    }
}

/// Flattened factors: `re[s*2+s̄]`, `im[s*2+s̄]`.
#[derive(Clone, Copy)]
struct Flat {
    re: [f64; 4],
    im: [f64; 4],
}

impl From<&ModeFactors> for Flat {
    fn from(g: &ModeFactors) -> Self {
        let mut f = Flat { re: [0.0; 4], im: [0.0; 4] };
        for s in 0..2 {
            for sb in 0..2 {
                f.re[s * 2 + sb] = g[s][sb].re;
                f.im[s * 2 + sb] = g[s][sb].im;
            }
        }
        f
    }
}

/// Mode factors on the `n × n` product grid, `(x, y)` with `y` fastest.
fn mode_table(eval: &WignerEvaluator, mode: Mode, x: &[f64], partner: bool) -> Vec<Flat> {
    let n = x.len();
    (0..n * n)
        .into_par_iter()
        .map_init(Vec::new, |buf, k| {
            let g = eval.mode_factors_with(mode, x[k / n], x[k % n], buf);
            let g = if partner { eval.partnered(&g) } else { g };
            Flat::from(&g)
        })
        .collect()
}

/// Roots in `(0, 1)` of `p(t) = c0 + c1 t + c2 t^2 + c3 t^3`.
fn cubic_roots(c: [f64; 4]) -> Vec<f64> {
    let p = |t: f64| c[0] + t * (c[1] + t * (c[2] + t * c[3]));
    const PROBES: usize = 8;
    let mut roots = Vec::new();
    for k in 0..PROBES {
        let (mut a, mut b) = (k as f64 / PROBES as f64, (k + 1) as f64 / PROBES as f64);
        let (pa, pb) = (p(a), p(b));
        if pa * pb < 0.0 {
            let neg_left = pa < 0.0;
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if (p(m) < 0.0) == neg_left { a = m } else { b = m }
            }
            roots.push(0.5 * (a + b));
        }
    }
    roots
}

/// Kink correction, in units of the spacing, to the plain sums of both
/// `max(p, 0)` and `max(−p, 0)` for a root at `t0` of the cell `[0, 1]`.
///
/// Each side of the root is a half-line sampled at offset `θ = 1 − t0`; the
/// offset Euler–Maclaurin expansion `Σ_{k≥0} g(k + θ) = ∫ g − Σ B_m(θ)/m!
/// g^{(m−1)}(0)` gives the same correction for both parts, so the signed
/// integral is untouched.
fn kink_correction(c: [f64; 4], t0: f64) -> f64 {
    let d1 = c[1] + t0 * (2.0 * c[2] + 3.0 * t0 * c[3]);
    let d2 = 2.0 * c[2] + 6.0 * t0 * c[3];
    let d3 = 6.0 * c[3];
    let th = 1.0 - t0;
    let b2 = th * th - th + 1.0 / 6.0;
    let b3 = th * (th * (th - 1.5) + 0.5);
    let b4 = th * th * (th * (th - 2.0) + 1.0) - 1.0 / 30.0;
    d1.signum() * (b2 / 2.0 * d1 + b3 / 6.0 * d2 + b4 / 24.0 * d3)
}

/// `(Σ max(f, 0), Σ max(−f, 0))` along one uniform line, in units of the
/// spacing, corrected at every zero crossing of the local cubic interpolant
/// (linear at the line ends). The correction is shared by both sums.
fn line_parts(f: &[f64], plus_terms: &mut Vec<f64>, minus_terms: &mut Vec<f64>) -> (f64, f64) {
    plus_terms.clear();
    minus_terms.clear();
    for &v in f {
        plus_terms.push(v.max(0.0));
        minus_terms.push((-v).max(0.0));
    }
    let n = f.len();
    for i in 0..n.saturating_sub(1) {
        let (f0, f1) = (f[i], f[i + 1]);
        let interior = i >= 1 && i + 2 < n;
        if f0 * f1 > 0.0 && !(interior && (f0 - f[i - 1]) * (f[i + 2] - f1) < 0.0) {
            continue;
        }
        let c = if interior {
            let (fm, f2) = (f[i - 1], f[i + 2]);
            [
                f0,
                -fm / 3.0 - f0 / 2.0 + f1 - f2 / 6.0,
                fm / 2.0 - f0 + f1 / 2.0,
                -fm / 6.0 + f0 / 2.0 - f1 / 2.0 + f2 / 6.0,
            ]
        } else {
            [f0, f1 - f0, 0.0, 0.0]
        };
        for t0 in cubic_roots(c) {
            let k = kink_correction(c, t0);
            plus_terms.push(k);
            minus_terms.push(k);
        }
    }
    (pairwise_sum(plus_terms), pairwise_sum(minus_terms))
}

struct RowSums {
    plus: f64,
    minus: f64,
    direct: f64,
    residue: f64,
}

/// Integrates `|W̃|` and `W̃` over the box.
pub fn integrate_negativity(
    spec: &BellCatSpec,
    params: &ThermalParams,
    quad: &QuadratureSpec,
    trunc: &TruncationConfig,
) -> Result<NegativityResult> {
    quad.validate(spec)?;
    let eval = WignerEvaluator::new(spec, params, trunc)?;
    integrate_with(&eval, quad)
}

/// Integration with a prepared evaluator; no half-width rule check.
pub fn integrate_with(eval: &WignerEvaluator, quad: &QuadratureSpec) -> Result<NegativityResult> {
    let (x, w) = quad.rule_1d();
    let n = x.len();
    let g1 = mode_table(eval, Mode::One, &x, false);
    let g2 = mode_table(eval, Mode::Two, &x, true);
    let uniform = quad.rule == QuadratureRule::Uniform;

    let rows: Vec<RowSums> = g1
        .par_iter()
        .enumerate()
        .map_init(
            || (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new()),
            |(vals, lp, lm, ld, tp, tm), (ia, a)| {
                vals.clear();
                let mut residue: f64 = 0.0;
                for b in &g2 {
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for k in 0..4 {
                        re += a.re[k] * b.re[k] - a.im[k] * b.im[k];
                        im += a.re[k] * b.im[k] + a.im[k] * b.re[k];
                    }
                    residue = residue.max(im.abs() / (1.0 + re.abs()));
                    vals.push(re);
                }
                lp.clear();
                lm.clear();
                ld.clear();
                for (ix, line) in vals.chunks(n).enumerate() {
                    if uniform {
                        let (p, m) = line_parts(line, tp, tm);
                        lp.push(w[ix] * w[0] * p);
                        lm.push(w[ix] * w[0] * m);
                        tp.clear();
                        tp.extend(line.iter().map(|v| v.abs() - v));
                        let plain_minus: f64 = line.iter().map(|v| (-v).max(0.0)).sum();
                        tp.push(2.0 * (m - plain_minus));
                        ld.push(w[ix] * w[0] * pairwise_sum(tp));
                    } else {
                        let wl = |f: &dyn Fn(f64) -> f64| -> f64 {
                            let t: Vec<f64> = line.iter().zip(&w).map(|(v, wy)| wy * f(*v)).collect();
                            w[ix] * pairwise_sum(&t)
                        };
                        lp.push(wl(&|v| v.max(0.0)));
                        lm.push(wl(&|v| (-v).max(0.0)));
                        ld.push(wl(&|v| v.abs() - v));
                    }
                }
                let wa = w[ia / n] * w[ia % n];
                RowSums {
                    plus: wa * pairwise_sum(lp),
                    minus: wa * pairwise_sum(lm),
                    direct: wa * pairwise_sum(ld),
                    residue,
                }
            },
        )
        .collect();

    let gather = |f: fn(&RowSums) -> f64| pairwise_sum(&rows.iter().map(f).collect::<Vec<_>>());
    let i_plus = gather(|r| r.plus);
    let i_minus = gather(|r| r.minus);
    let delta_direct = gather(|r| r.direct);
    let max_residue = rows.iter().fold(0.0_f64, |m, r| m.max(r.residue));
    if !(max_residue <= RESIDUE_TOLERANCE) {
        return Err(Error::ImaginaryResidue { real: f64::NAN, imag: max_residue });
    }
    let norm_check = i_plus - i_minus;
    let result = NegativityResult {
        delta: 2.0 * i_minus,
        delta_direct,
        nu: 1.0 - norm_check / (i_plus + i_minus),
        i_plus,
        i_minus,
        norm_check,
        quad: *quad,
        trunc: *eval.truncation(),
        tail_bound: eval.tail_bound(),
        max_residue,
    };
    if !((norm_check - 1.0).abs() <= NORMALIZATION_LIMIT) {
        return Err(Error::NormalizationFailure(Box::new(result)));
    }
    Ok(result)
}

/// Quadrature and truncation choices; `None` picks the temperature-aware default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegativitySettings {
    pub rule: QuadratureRule,
    pub nodes: Option<usize>,
    pub half_width: Option<f64>,
    /// Explicit caps; `epsilon` then only sets their tolerance.
    pub caps: Option<([usize; 2], [usize; 2])>,
    pub epsilon: f64,
}

impl Default for NegativitySettings {
    fn default() -> Self {
        Self { rule: QuadratureRule::Uniform, nodes: None, half_width: None, caps: None, epsilon: DEFAULT_EPSILON }
    }
}

impl NegativitySettings {
    pub fn resolve(&self, spec: &BellCatSpec, params: &ThermalParams) -> Result<(QuadratureSpec, TruncationConfig)> {
        let mut quad = QuadratureSpec::default_for(spec, params).with_rule(self.rule);
        if let Some(n) = self.nodes {
            quad.nodes = n;
        }
        if let Some(l) = self.half_width {
            quad.half_width = l;
        }
        let trunc = match self.caps {
            Some((amp, th)) => TruncationConfig::new(amp, th, self.epsilon)?,
            None => TruncationConfig::auto_with_epsilon(spec, params, self.epsilon)?,
        };
        Ok((quad, trunc))
    }
}

/// [`integrate_negativity`] with settings resolved for `params`.
pub fn negativity(spec: &BellCatSpec, params: &ThermalParams, settings: &NegativitySettings) -> Result<NegativityResult> {
    let (quad, trunc) = settings.resolve(spec, params)?;
    integrate_negativity(spec, params, &quad, &trunc)
}

/// One temperature of a sweep.
#[derive(Debug)]
pub struct SweepEntry {
    pub temperature: f64,
    pub result: Result<NegativityResult>,
}

/// Independent negativity runs over strictly increasing temperatures; a
/// failing temperature is recorded and the sweep continues.
pub fn temperature_sweep(
    spec: &BellCatSpec,
    temperatures: &[f64],
    omega1: f64,
    omega2: f64,
    settings: &NegativitySettings,
) -> Result<Vec<SweepEntry>> {
    if temperatures.is_empty() {
        return Err(Error::InvalidConfig("empty temperature list".into()));
    }
    if let Some(&t) = temperatures.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidTemperature(t));
    }
    if temperatures.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("temperatures must be strictly increasing".into()));
    }
    Ok(temperatures
        .par_iter()
        .map(|&t| SweepEntry {
            temperature: t,
            result: thermal_params(t, omega1, omega2).and_then(|p| negativity(spec, &p, settings)),
        })
        .collect())
}

/// `n` temperatures evenly spaced over `[start, end]`.
pub fn linear_temperatures(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|i| if i + 1 == n { end } else { start + (end - start) * i as f64 / (n - 1) as f64 }).collect(),
    }
}
