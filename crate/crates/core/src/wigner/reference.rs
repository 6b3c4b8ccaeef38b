//! Literal six-index Laguerre series, term by term, without the parity-class
//! factorization used by the evaluator.
//!
//! Slow (quartic in the amplitude caps, quadratic in the thermal caps) and
//! meant for small caps only. It exists to pin the evaluator to the series
//! as written and to exercise alternative readings of it, including the
//! reading whose mode-2 Laguerre argument uses `y1` instead of `y2`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{ChiConvention, PhasePoint};
use crate::special_fn::{laguerre_assoc, ln_factorial};
use crate::states::BellCatSpec;
use crate::tfd::{Mode, ThermalParams};
use crate::truncation::TruncationConfig;

/// Which radius enters the mode-2 Laguerre polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode2Argument {
    /// `2 (x2^2 + y2^2)`.
    ModeConsistent,
    /// `2 (x2^2 + y1^2)`.
    MixedMomentum,
}

/// Options of the literal sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceVariant {
    pub chi: ChiConvention,
    pub mode2_argument: Mode2Argument,
}

impl Default for ReferenceVariant {
    fn default() -> Self {
        Self { chi: ChiConvention::Standard, mode2_argument: Mode2Argument::ModeConsistent }
    }
}

/// One mode's term: `(n, n̄, n_th, value)`.
struct ModeTerm {
    n: usize,
    n_bar: usize,
    value: C64,
}

fn chi(x: f64, y: f64, ket_above: bool, convention: ChiConvention) -> C64 {
    let plus = C64::new(x, y);
    match convention {
        ChiConvention::Standard => if ket_above { plus.conj() } else { plus },
        ChiConvention::AsPrinted => if ket_above { plus } else { plus.conj() },
        ChiConvention::Unconjugated => plus,
    }
}

#[allow(clippy::too_many_arguments)]
fn mode_terms(
    alpha: C64,
    params: &ThermalParams,
    mode: Mode,
    amp_cap: usize,
    thermal_cap: usize,
    (x, y): (f64, f64),
    laguerre_radius_sq: f64,
    convention: ChiConvention,
) -> Vec<ModeTerm> {
    let thermal_cap = if params.is_zero_temperature() { 0 } else { thermal_cap };
    let q = params.boltzmann(mode);
    let one_minus_q = params.one_minus_boltzmann(mode);
    let u = params.u(mode);
    let envelope = (-x * x - y * y).exp();
    let mut out = Vec::new();
    for th in 0..=thermal_cap {
        for n in 0..=amp_cap {
            for n_bar in 0..=amp_cap {
                let abs_d = n.abs_diff(n_bar);
                let lo = th + n.min(n_bar);
                let ket_above = n >= n_bar;
                // α^n ᾱ^n̄ / (n! n̄! u^{n+n̄}) · sqrt((th+n)! (th+n̄)!) / th! · (1−q) q^th
                let ln_mag = 0.5 * (ln_factorial(th + n) + ln_factorial(th + n_bar))
                    - ln_factorial(n)
                    - ln_factorial(n_bar)
                    - ln_factorial(th)
                    - (n + n_bar) as f64 * u.ln();
                let weight = one_minus_q * q.powi(th as i32) * ln_mag.exp();
                let amp = alpha.powu(n as u32) * alpha.conj().powu(n_bar as u32);
                // single-mode kernel of |lo+|d|⟩⟨lo| (or its transpose)
                let norm = (0.5 * (ln_factorial(lo) - ln_factorial(lo + abs_d))).exp();
                let sign = match convention {
                    ChiConvention::AsPrinted => lo + abs_d,
                    _ => lo,
                };
                let sign = if sign % 2 == 0 { 1.0 } else { -1.0 };
                let kernel = (chi(x, y, ket_above, convention) * 2.0_f64.sqrt()).powu(abs_d as u32)
                    * norm
                    * sign
                    * envelope
                    * laguerre_assoc(lo, abs_d, 2.0 * laguerre_radius_sq)
                    / PI;
                out.push(ModeTerm { n, n_bar, value: amp * weight * kernel });
            }
        }
    }
    out
}

/// `W̃` by the literal double sum over both modes' terms with the parity rule
/// `n + m ≡ n̄ + m̄ ≡ p` applied term by term.
pub fn wigner_reference(
    spec: &BellCatSpec,
    params: &ThermalParams,
    pt: PhasePoint,
    trunc: &TruncationConfig,
    variant: ReferenceVariant,
) -> C64 {
    let r2_mode2 = match variant.mode2_argument {
        Mode2Argument::ModeConsistent => pt.x2 * pt.x2 + pt.y2 * pt.y2,
        Mode2Argument::MixedMomentum => pt.x2 * pt.x2 + pt.y1 * pt.y1,
    };
    let t1 = mode_terms(
        spec.alpha(),
        params,
        Mode::One,
        trunc.amplitude_caps[0],
        trunc.thermal_caps[0],
        pt.mode(Mode::One),
        pt.x1 * pt.x1 + pt.y1 * pt.y1,
        variant.chi,
    );
    let t2 = mode_terms(
        spec.mode_alpha(1),
        params,
        Mode::Two,
        trunc.amplitude_caps[1],
        trunc.thermal_caps[1],
        pt.mode(Mode::Two),
        r2_mode2,
        variant.chi,
    );
    let p = spec.parity_bit();
    let mut total = C64::new(0.0, 0.0);
    for a in &t1 {
        for b in &t2 {
            if (a.n + b.n) % 2 == p && (a.n_bar + b.n_bar) % 2 == p {
                total += a.value * b.value;
            }
        }
    }
    total * spec.pair_prefactor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::BellCatLabel;
    use crate::tfd::thermal_params;
    use crate::wigner::WignerEvaluator;

    #[test]
    fn literal_sum_matches_factorized_evaluator() {
        let spec = BellCatSpec::from_label(BellCatLabel::PsiMinus, C64::new(0.8, 0.5)).unwrap();
        let p = thermal_params(0.2, 2.0 * PI * 5.5e9, 2.0 * PI * 5.5e9).unwrap();
        let trunc = TruncationConfig::new([7, 7], [5, 5], 1e-3).unwrap();
        let fast = WignerEvaluator::unchecked(&spec, &p, &trunc, f64::NAN);
        for pt in [PhasePoint::new(0.3, -0.2, 0.9, 0.4), PhasePoint::new(-1.0, 0.5, 0.1, -0.7)] {
            let a = wigner_reference(&spec, &p, pt, &trunc, ReferenceVariant::default());
            let b = fast.evaluate_complex(&pt);
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
            let printed = ReferenceVariant { chi: ChiConvention::AsPrinted, ..Default::default() };
            let a = wigner_reference(&spec, &p, pt, &trunc, printed);
            let b = fast.clone().with_convention(ChiConvention::AsPrinted).evaluate_complex(&pt);
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
        }
    }
}
