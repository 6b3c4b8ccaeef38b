//! The four Bell-Cat states `N± (|α, kα⟩ ± |−α, −kα⟩)` and their number-basis
//! expansion.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::ln_factorial;

/// A `±1` label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Named Bell-Cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellCatLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellCatLabel {
    pub const ALL: [BellCatLabel; 4] =
        [BellCatLabel::PhiPlus, BellCatLabel::PhiMinus, BellCatLabel::PsiPlus, BellCatLabel::PsiMinus];

    /// `(k, sigma)`: Φ has k = +1, Ψ has k = −1.
    pub fn signs(self) -> (Sign, Sign) {
        match self {
            BellCatLabel::PhiPlus => (Sign::Plus, Sign::Plus),
            BellCatLabel::PhiMinus => (Sign::Plus, Sign::Minus),
            BellCatLabel::PsiPlus => (Sign::Minus, Sign::Plus),
            BellCatLabel::PsiMinus => (Sign::Minus, Sign::Minus),
        }
    }

    pub fn from_signs(k: Sign, sigma: Sign) -> Self {
        match (k, sigma) {
            (Sign::Plus, Sign::Plus) => BellCatLabel::PhiPlus,
            (Sign::Plus, Sign::Minus) => BellCatLabel::PhiMinus,
            (Sign::Minus, Sign::Plus) => BellCatLabel::PsiPlus,
            (Sign::Minus, Sign::Minus) => BellCatLabel::PsiMinus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BellCatLabel::PhiPlus => "phi-plus",
            BellCatLabel::PhiMinus => "phi-minus",
            BellCatLabel::PsiPlus => "psi-plus",
            BellCatLabel::PsiMinus => "psi-minus",
        }
    }
}

impl fmt::Display for BellCatLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BellCatLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellCatLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown state label `{s}`")))
    }
}

/// Which Bell-Cat state, and its coherent amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellCatSpec {
    alpha: C64,
    k: Sign,
    sigma: Sign,
}

impl BellCatSpec {
    /// Rejects `alpha = 0`: the odd states are null there.
    pub fn new(alpha: C64, k: Sign, sigma: Sign) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite()) || alpha.norm() == 0.0 {
            return Err(Error::DegenerateState);
        }
        Ok(Self { alpha, k, sigma })
    }

    pub fn from_label(label: BellCatLabel, alpha: C64) -> Result<Self> {
        let (k, sigma) = label.signs();
        Self::new(alpha, k, sigma)
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn k(&self) -> Sign {
        self.k
    }

    pub fn sigma(&self) -> Sign {
        self.sigma
    }

    pub fn label(&self) -> BellCatLabel {
        BellCatLabel::from_signs(self.k, self.sigma)
    }

    /// Same amplitude and parity with the mode-2 sign flipped (Φ ↔ Ψ).
    pub fn mode2_flipped(&self) -> Self {
        Self { k: self.k.flip(), ..*self }
    }

    /// Coherent amplitude carried by `mode` (0 or 1): `α` and `kα`.
    pub fn mode_alpha(&self, mode: usize) -> C64 {
        if mode == 0 { self.alpha } else { self.alpha * self.k.value() }
    }

    /// Parity bit `p` of the retained components: `n + m ≡ p (mod 2)`.
    pub fn parity_bit(&self) -> usize {
        match self.sigma {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    /// Mode-2 parity class paired with mode-1 parity class `s`.
    pub fn partner_class(&self, s: usize) -> usize {
        (self.parity_bit() + s) % 2
    }

    /// `4 N±^2 e^{-2|α|^2}`: the squared overall amplitude of
    /// `f = N± e^{-|α|^2} Σ [1 ± (−1)^{n+m}] ...` with the bracket's factor 2
    /// pulled out on both sides.
    pub fn pair_prefactor(&self) -> f64 {
        let n = bellcat_normalization(self.alpha, self.sigma).expect("validated at construction");
        4.0 * n * n * (-2.0 * self.alpha.norm_sqr()).exp()
    }
}

fn checked_norm(sigma: Sign, overlap: f64) -> Result<f64> {
    let s = 1.0 + sigma.value() * overlap;
    if s <= 0.0 {
        return Err(Error::DegenerateState);
    }
    Ok((2.0 * s).sqrt().recip())
}

/// `N̄± = [2 (1 ± e^{-2|α|^2})]^{-1/2}` for the single-mode cat `N̄± (|α⟩ ± |−α⟩)`.
pub fn cat_normalization(alpha: C64, sigma: Sign) -> Result<f64> {
    checked_norm(sigma, (-2.0 * alpha.norm_sqr()).exp())
}

/// `N± = [2 (1 ± e^{-4|α|^2})]^{-1/2}`.
pub fn bellcat_normalization(alpha: C64, sigma: Sign) -> Result<f64> {
    checked_norm(sigma, coherent_overlap_sq(alpha))
}

/// `|⟨α|−α⟩|^2 = e^{-4|α|^2}`.
pub fn coherent_overlap_sq(alpha: C64) -> f64 {
    (-4.0 * alpha.norm_sqr()).exp()
}

/// Per-mode number cutoff `ceil(|α|^2 + 8|α| + 10)`.
pub fn default_fock_cutoff(alpha: C64) -> usize {
    let a = alpha.norm();
    (a * a + 8.0 * a + 10.0).ceil() as usize
}

/// Number-basis amplitudes `c(n, m)` of the normalized pure state for
/// `n, m <= cutoff`.
#[derive(Clone, Debug)]
pub struct FockCoefficients {
    cutoff: usize,
    coeffs: Vec<C64>,
    norm_deficit: f64,
}

impl FockCoefficients {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        assert!(n <= self.cutoff && m <= self.cutoff, "index out of range");
        self.coeffs[n * (self.cutoff + 1) + m]
    }

    /// Row-major over `(n, m)`, matching the two-mode basis ordering used by
    /// [`crate::density`].
    pub fn as_slice(&self) -> &[C64] {
        &self.coeffs
    }

    /// `1 - Σ |c|^2` over the retained block.
    pub fn norm_deficit(&self) -> f64 {
        self.norm_deficit
    }
}

/// `c(n,m) = N± e^{-|α|^2} α^{n+m} k^m [1 ± (−1)^{n+m}] / sqrt(n! m!)`.
pub fn fock_coefficients(spec: &BellCatSpec, cutoff: usize) -> Result<FockCoefficients> {
    let norm = bellcat_normalization(spec.alpha, spec.sigma)?;
    let a = spec.alpha.norm();
    let arg = spec.alpha.arg();
    let ln_pref = norm.ln() - a * a + 2.0_f64.ln();
    let dim = cutoff + 1;
    let mut coeffs = vec![C64::new(0.0, 0.0); dim * dim];
    let mut total = 0.0;
    for n in 0..dim {
        for m in 0..dim {
            if (n + m) % 2 != spec.parity_bit() {
                continue;
            }
            let ln_mag = ln_pref + (n + m) as f64 * a.ln() - 0.5 * (ln_factorial(n) + ln_factorial(m));
            let mut phase = (n + m) as f64 * arg;
            if spec.k == Sign::Minus && m % 2 == 1 {
                phase += PI;
            }
            let c = C64::from_polar(ln_mag.exp(), phase);
            total += c.norm_sqr();
            coeffs[n * dim + m] = c;
        }
    }
    Ok(FockCoefficients { cutoff, coeffs, norm_deficit: 1.0 - total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalizations() {
        assert_eq!(cat_normalization(c(0.0, 0.0), Sign::Plus).unwrap(), 0.5);
        assert_eq!(bellcat_normalization(c(0.0, 0.0), Sign::Plus).unwrap(), 0.5);
        let expect = (2.0 * (1.0 - (-2.0_f64).exp())).powf(-0.5);
        assert!((cat_normalization(c(1.0, 0.0), Sign::Minus).unwrap() - expect).abs() < 1e-15);
        let expect = (2.0 * (1.0 + (-8.0_f64).exp())).powf(-0.5);
        assert!((cat_normalization(c(2.0, 0.0), Sign::Plus).unwrap() - expect).abs() < 1e-15);
        let expect = (2.0 * (1.0 + (-4.0_f64).exp())).powf(-0.5);
        assert!((bellcat_normalization(c(1.0, 0.0), Sign::Plus).unwrap() - expect).abs() < 1e-15);
        let expect = (2.0 * (1.0 - (-16.0_f64).exp())).powf(-0.5);
        assert!((bellcat_normalization(c(2.0, 0.0), Sign::Minus).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn degenerate_odd_state_is_rejected() {
        assert!(matches!(cat_normalization(c(0.0, 0.0), Sign::Minus), Err(Error::DegenerateState)));
        assert!(matches!(bellcat_normalization(c(0.0, 0.0), Sign::Minus), Err(Error::DegenerateState)));
        assert!(matches!(
            BellCatSpec::new(c(0.0, 0.0), Sign::Plus, Sign::Minus),
            Err(Error::DegenerateState)
        ));
    }

    #[test]
    fn overlap_values() {
        assert_eq!(coherent_overlap_sq(c(0.0, 0.0)), 1.0);
        assert!((coherent_overlap_sq(c(1.0, 1.0)) - (-8.0_f64).exp()).abs() < 1e-18);
        let v = coherent_overlap_sq(c(2.0, 0.0));
        assert!((v / 1e-7 * 100.0).round() == 113.0, "{v}");
    }

    #[test]
    fn vacuum_coefficient() {
        let spec = BellCatSpec::from_label(BellCatLabel::PhiPlus, c(1.0, 0.0)).unwrap();
        let fc = fock_coefficients(&spec, 0).unwrap();
        let n = bellcat_normalization(c(1.0, 0.0), Sign::Plus).unwrap();
        assert!((fc.get(0, 0) - c(2.0 * n * (-1.0_f64).exp(), 0.0)).norm() < 1e-15);
        assert_eq!(fc.as_slice().len(), 1);
    }

    #[test]
    fn odd_state_has_no_even_components() {
        let spec = BellCatSpec::from_label(BellCatLabel::PsiMinus, c(0.7, -0.4)).unwrap();
        let fc = fock_coefficients(&spec, 12).unwrap();
        for n in 0..=12 {
            for m in 0..=12 {
                if (n + m) % 2 == 0 {
                    assert_eq!(fc.get(n, m), c(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn truncated_norm_converges() {
        let spec = BellCatSpec::from_label(BellCatLabel::PhiMinus, c(1.0, 0.0)).unwrap();
        let fc = fock_coefficients(&spec, 20).unwrap();
        assert!(fc.norm_deficit().abs() < 1e-10, "{}", fc.norm_deficit());
    }

    #[test]
    fn labels_round_trip() {
        for l in BellCatLabel::ALL {
            assert_eq!(l.as_str().parse::<BellCatLabel>().unwrap(), l);
            let (k, s) = l.signs();
            assert_eq!(BellCatLabel::from_signs(k, s), l);
        }
        assert!("phi".parse::<BellCatLabel>().is_err());
    }
}
