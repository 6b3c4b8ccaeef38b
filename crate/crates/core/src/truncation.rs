//! Cutoffs for the infinite index sums of the thermal density operator and
//! its Wigner series.
//!
//! Per mode the series runs over an amplitude index pair `(n, n̄)` (weights
//! `|α|^n / n!`) and a thermal index `n_th` (weights `e^{-n_th βħω}`). A
//! magnitude bound for everything a mode contributes is
//!
//! ```text
//! M = Σ_{n_th} S(n_th)^2,
//! S(n_th) = sqrt((1-q) q^n_th / n_th!) Σ_n (|α| sqrt(1-q))^n sqrt((n_th+n)!) / n!
//! ```
//!
//! (`q = e^{-βħω}`): every density element and every Wigner term is bounded by
//! the matching piece of `M`, since Fock-state Wigner kernels are bounded by
//! `1/π`. Caps are chosen so the discarded share of `M` stays below `ε`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special_fn::ln_factorial;
use crate::states::{default_fock_cutoff, BellCatSpec};
use crate::tfd::{Mode, ThermalParams};

/// Hard ceiling for the thermal index.
pub const MAX_THERMAL_CAP: usize = 5000;
/// Default relative tail tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TruncationConfig {
    /// Largest `n`, `n̄` (mode 1) and `m`, `m̄` (mode 2).
    pub amplitude_caps: [usize; 2],
    /// Largest thermal index `n_th` per mode.
    pub thermal_caps: [usize; 2],
    pub epsilon: f64,
}

impl TruncationConfig {
    pub fn new(amplitude_caps: [usize; 2], thermal_caps: [usize; 2], epsilon: f64) -> Result<Self> {
        let cfg = Self { amplitude_caps, thermal_caps, epsilon };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "tail tolerance {} outside (0, 1e-3]",
                self.epsilon
            )));
        }
        if self.amplitude_caps.contains(&0) {
            return Err(Error::InvalidConfig("amplitude caps must be >= 1".into()));
        }
        Ok(())
    }

    /// Caps for `spec` at `params` with the default tolerance.
    pub fn auto(spec: &BellCatSpec, params: &ThermalParams) -> Result<Self> {
        Self::auto_with_epsilon(spec, params, DEFAULT_EPSILON)
    }

    /// Smallest caps (never below `ceil(|α|^2 + 8|α| + 10)` for the amplitude
    /// indices) whose discarded share of the magnitude bound is below
    /// `epsilon / 4` per mode.
    pub fn auto_with_epsilon(spec: &BellCatSpec, params: &ThermalParams, epsilon: f64) -> Result<Self> {
        let floor = default_fock_cutoff(spec.alpha());
        let mut amplitude_caps = [floor; 2];
        let mut thermal_caps = [0; 2];
        for (i, mode) in [Mode::One, Mode::Two].into_iter().enumerate() {
            let (amp, th) = ModeBound::new(spec.mode_alpha(i), params, mode).caps_for(epsilon / 4.0)?;
            amplitude_caps[i] = amplitude_caps[i].max(amp);
            thermal_caps[i] = th;
        }
        Self::new(amplitude_caps, thermal_caps, epsilon)
    }

    /// Upper bound on the relative size of the discarded terms for these caps.
    pub fn tail_bound(&self, spec: &BellCatSpec, params: &ThermalParams) -> f64 {
        let mut kept = 1.0;
        for (i, mode) in [Mode::One, Mode::Two].into_iter().enumerate() {
            let share = ModeBound::new(spec.mode_alpha(i), params, mode)
                .discarded_share(self.amplitude_caps[i], self.thermal_caps[i]);
            kept *= 1.0 - share;
        }
        // two independent relative errors combine through the product
        (1.0 - kept).max(0.0)
    }

    /// Errors when the caps discard more than `epsilon`.
    pub fn check(&self, spec: &BellCatSpec, params: &ThermalParams) -> Result<f64> {
        self.validate()?;
        let tail = self.tail_bound(spec, params);
        if tail > self.epsilon {
            return Err(Error::TruncationFailure(format!(
                "caps {:?}/{:?} leave a relative tail of {tail:.3e} > epsilon {:.1e}",
                self.amplitude_caps, self.thermal_caps, self.epsilon
            )));
        }
        Ok(tail)
    }
}

/// Log-space evaluation of the per-mode magnitude bound.
struct ModeBound {
    ln_amp: f64,
    ln_one_minus_q: f64,
    ln_q: f64,
    zero_temperature: bool,
}

/// How far past the cap the "total" is extended when measuring a tail.
const EXTENSION_LIMIT: usize = 12_000;

impl ModeBound {
    fn new(alpha: C64, params: &ThermalParams, mode: Mode) -> Self {
        let one_minus_q = params.one_minus_boltzmann(mode);
        Self {
            ln_amp: alpha.norm().ln() + 0.5 * one_minus_q.ln(),
            ln_one_minus_q: one_minus_q.ln(),
            ln_q: params.ln_boltzmann(mode),
            zero_temperature: params.is_zero_temperature(),
        }
    }

    /// `ln` of the `n`-th summand of `S(th)` (without the thermal prefactor).
    fn ln_amp_term(&self, th: usize, n: usize) -> f64 {
        n as f64 * self.ln_amp + 0.5 * ln_factorial(th + n) - ln_factorial(n)
    }

    fn ln_thermal_prefactor(&self, th: usize) -> f64 {
        if th == 0 {
            return 0.5 * self.ln_one_minus_q;
        }
        0.5 * (self.ln_one_minus_q + th as f64 * self.ln_q - ln_factorial(th))
    }

    /// `(ln Σ_{n <= cap} a_n, ln Σ_{n > cap} a_n)` for the amplitude series at
    /// thermal index `th`, the second summed until it converges.
    fn ln_amp_sums(&self, th: usize, cap: usize) -> (f64, f64) {
        let mut kept = LogSum::default();
        let mut dropped = LogSum::default();
        let mut prev = f64::INFINITY;
        for n in 0..EXTENSION_LIMIT {
            let t = self.ln_amp_term(th, n);
            if n <= cap {
                kept.add(t);
            } else {
                dropped.add(t);
            }
            // terms are eventually decreasing: stop once negligible and falling
            if n > 2 && t < prev && t < log_add(kept.ln(), dropped.ln()) - 60.0 {
                break;
            }
            prev = t;
        }
        (kept.ln(), dropped.ln())
    }

    /// Smallest `N` with `Σ_{n > N} a_n <= tol Σ a_n` at thermal index `th`.
    fn amp_cap(&self, th: usize, tol: f64) -> usize {
        let mut terms = Vec::new();
        let mut n = 0;
        loop {
            let t = self.ln_amp_term(th, n);
            terms.push(t);
            if n > 2 && t < terms[n - 1] && t < log_sum(&terms) + tol.ln() - 40.0 {
                break;
            }
            n += 1;
        }
        let total = log_sum(&terms);
        let mut tail = LogSum::default();
        for cap in (0..terms.len()).rev() {
            if tail.ln() > total + tol.ln() {
                return cap + 1;
            }
            tail.add(terms[cap]);
        }
        0
    }

    /// `(amplitude cap, thermal cap)` discarding at most a `tol` share.
    fn caps_for(&self, tol: f64) -> Result<(usize, usize)> {
        if self.zero_temperature {
            return Ok((self.amp_cap(0, tol), 0));
        }
        // S(th)^2 in log space, extended until the geometric tail is negligible
        let mut ln_s2 = Vec::new();
        let mut th = 0;
        loop {
            let (kept, _) = self.ln_amp_sums(th, usize::MAX);
            ln_s2.push(2.0 * (self.ln_thermal_prefactor(th) + kept));
            if th > 4 {
                let last = ln_s2[th];
                let ratio = last - ln_s2[th - 1];
                let total = log_sum(&ln_s2);
                if ratio < 0.0 {
                    // remaining tail <= last * r / (1 - r) for ratio r
                    let r = ratio.exp();
                    let tail = last + (r / (1.0 - r)).ln();
                    if tail < total + tol.ln() - 4.0 {
                        break;
                    }
                }
            }
            th += 1;
            if th > MAX_THERMAL_CAP + EXTENSION_LIMIT {
                break;
            }
        }
        let total = log_sum(&ln_s2);
        let mut tail = LogSum::default();
        let mut thermal_cap = ln_s2.len() - 1;
        for k in (0..ln_s2.len()).rev() {
            tail.add(ln_s2[k]);
            if tail.ln() > total + tol.ln() - 2.0_f64.ln() {
                thermal_cap = k;
                break;
            }
        }
        if thermal_cap > MAX_THERMAL_CAP {
            return Err(Error::TruncationFailure(format!(
                "thermal index would need {thermal_cap} > {MAX_THERMAL_CAP} terms for tolerance {tol:.1e}"
            )));
        }
        let amp = (0..=thermal_cap)
            .step_by(1.max(thermal_cap / 64))
            .chain(std::iter::once(thermal_cap))
            .map(|k| self.amp_cap(k, tol / 2.0))
            .max()
            .unwrap_or(0);
        Ok((amp, thermal_cap))
    }

    /// Share of `M` outside `n, n̄ <= amp_cap`, `th <= thermal_cap`.
    fn discarded_share(&self, amp_cap: usize, thermal_cap: usize) -> f64 {
        let mut kept = LogSum::default();
        let mut all = LogSum::default();
        let last = if self.zero_temperature { 0 } else { thermal_cap + EXTENSION_LIMIT };
        let mut prev = f64::INFINITY;
        for th in 0..=last {
            let (k, d) = self.ln_amp_sums(th, amp_cap);
            let pre = self.ln_thermal_prefactor(th);
            let full = 2.0 * (pre + log_add(k, d));
            all.add(full);
            if th <= thermal_cap {
                kept.add(2.0 * (pre + k));
            } else if full < prev && full < all.ln() - 50.0 {
                break;
            }
            prev = full;
        }
        if all.ln() == f64::NEG_INFINITY {
            return 0.0;
        }
        -((kept.ln() - all.ln()).exp_m1())
    }
}

#[derive(Default)]
struct LogSum {
    max: Option<f64>,
    acc: f64,
}

impl LogSum {
    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        match self.max {
            None => {
                self.max = Some(x);
                self.acc = 1.0;
            }
            Some(m) if x <= m => self.acc += (x - m).exp(),
            Some(m) => {
                self.acc = self.acc * (m - x).exp() + 1.0;
                self.max = Some(x);
            }
        }
    }

    fn ln(&self) -> f64 {
        match self.max {
            None => f64::NEG_INFINITY,
            Some(m) => m + self.acc.ln(),
        }
    }
}

fn log_sum(xs: &[f64]) -> f64 {
    let mut s = LogSum::default();
    xs.iter().for_each(|&x| s.add(x));
    s.ln()
}

fn log_add(a: f64, b: f64) -> f64 {
    let mut s = LogSum::default();
    s.add(a);
    s.add(b);
    s.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::BellCatLabel;
    use crate::tfd::thermal_params;
    use std::f64::consts::PI;

    const OMEGA: f64 = 2.0 * PI * 5.5e9;

    #[test]
    fn zero_temperature_caps_follow_default_policy() {
        let spec = BellCatSpec::from_label(BellCatLabel::PhiMinus, C64::new(1.0, 0.0)).unwrap();
        let p = thermal_params(0.0, OMEGA, OMEGA).unwrap();
        let t = TruncationConfig::auto(&spec, &p).unwrap();
        // the default policy is a floor; the magnitude bound asks for a few more
        assert!(t.amplitude_caps.iter().all(|&c| (19..=30).contains(&c)), "{:?}", t.amplitude_caps);
        assert_eq!(t.thermal_caps, [0, 0]);
        assert!(t.tail_bound(&spec, &p) < 1e-12);
    }

    #[test]
    fn auto_caps_meet_their_own_tolerance() {
        for temp in [0.05, 0.3, 1.0, 2.0] {
            let spec = BellCatSpec::from_label(BellCatLabel::PsiPlus, C64::new(1.0, 1.0)).unwrap();
            let p = thermal_params(temp, OMEGA, OMEGA).unwrap();
            let t = TruncationConfig::auto(&spec, &p).unwrap();
            let tail = t.check(&spec, &p).unwrap();
            assert!(tail <= 1e-12, "T = {temp}: {tail:e}");
        }
    }

    #[test]
    fn tight_caps_are_rejected() {
        let spec = BellCatSpec::from_label(BellCatLabel::PhiMinus, C64::new(1.0, 0.0)).unwrap();
        let p = thermal_params(1.0, OMEGA, OMEGA).unwrap();
        let t = TruncationConfig::new([19, 19], [10, 10], 1e-10).unwrap();
        assert!(matches!(t.check(&spec, &p), Err(Error::TruncationFailure(_))));
    }

    #[test]
    fn epsilon_range_is_enforced() {
        assert!(TruncationConfig::new([5, 5], [0, 0], 0.0).is_err());
        assert!(TruncationConfig::new([5, 5], [0, 0], 1e-2).is_err());
        assert!(TruncationConfig::new([0, 5], [0, 0], 1e-6).is_err());
    }

    #[test]
    fn thermal_cap_grows_with_temperature() {
        let spec = BellCatSpec::from_label(BellCatLabel::PhiMinus, C64::new(1.0, 0.0)).unwrap();
        let caps: Vec<usize> = [0.1, 0.5, 1.0, 2.0]
            .iter()
            .map(|&t| {
                let p = thermal_params(t, OMEGA, OMEGA).unwrap();
                TruncationConfig::auto(&spec, &p).unwrap().thermal_caps[0]
            })
            .collect();
        assert!(caps.windows(2).all(|w| w[0] < w[1]), "{caps:?}");
    }
}
