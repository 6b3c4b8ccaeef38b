//! Consistency battery behind `bellcat validate`.
//!
//! Each check compares two independent constructions of the same quantity.
//! The two `rejected` rows evaluate the alternative readings of the series
//! against the Fock-kernel oracle; they pass when the oracle tells the
//! reading apart from the implemented one.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::{assemble_density_matrix, assemble_density_operator};
use crate::error::Result;
use crate::negativity::{negativity, NegativitySettings};
use crate::states::{BellCatLabel, BellCatSpec};
use crate::tfd::{thermal_params, ThermalParams};
use crate::truncation::TruncationConfig;
use crate::wigner::reference::{wigner_reference, Mode2Argument, ReferenceVariant};
use crate::wigner::{ChiConvention, OracleEvaluator, PhasePoint, WignerEvaluator};

const OMEGA: f64 = 2.0 * PI * 5.5e9;
const SEED: u64 = 0x5eed_b311;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    /// Measured deviation; `NaN` when the check errored.
    pub measured: f64,
    pub bound: Bound,
    pub note: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost(t) => self.measured <= t,
            Bound::AtLeast(t) => self.measured >= t,
        }
    }
}

fn check(name: &'static str, bound: Bound, run: impl FnOnce() -> Result<(f64, String)>) -> Check {
    match run() {
        Ok((measured, note)) => Check { name, measured, bound, note },
        Err(e) => Check { name, measured: f64::NAN, bound, note: format!("error: {e}") },
    }
}

fn params(t: f64) -> Result<ThermalParams> {
    thermal_params(t, OMEGA, OMEGA)
}

pub fn random_points(n: usize, half_width: f64, seed: u64) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut c = || rng.gen_range(-half_width..=half_width);
            PhasePoint::new(c(), c(), c(), c())
        })
        .collect()
}

/// Largest `|W_series − W_oracle|` over `points`.
fn oracle_gap(spec: &BellCatSpec, p: &ThermalParams, convention: ChiConvention, points: &[PhasePoint]) -> Result<f64> {
    let fast = WignerEvaluator::auto(spec, p)?.with_convention(convention);
    let oracle = OracleEvaluator::new(spec, p)?;
    let mut gap: f64 = 0.0;
    for pt in points {
        gap = gap.max((fast.evaluate(pt)? - oracle.evaluate(pt)?).abs());
    }
    Ok(gap)
}

/// Runs every check with the series read under `convention`.
pub fn run_checks(convention: ChiConvention) -> Vec<Check> {
    let mut out = Vec::new();

    out.push(check("density: element formula vs operator build", Bound::AtMost(1e-10), || {
        let spec = BellCatSpec::from_label(BellCatLabel::PsiPlus, C64::new(1.0, 1.0))?;
        let p = params(0.3)?;
        let trunc = TruncationConfig::auto(&spec, &p)?;
        let direct = assemble_density_matrix(&spec, &p, 25, &trunc)?;
        let op = assemble_density_operator(&spec, &p, 25)?;
        Ok((direct.max_abs_diff(&op), "psi-plus, alpha=1+i, 0.3 K, cutoff 25".into()))
    }));

    let points = random_points(20, 3.0, SEED);
    for (t, name) in [(0.0, "wigner: series vs Fock-kernel oracle, 0 K"), (1.0, "wigner: series vs Fock-kernel oracle, 1 K")] {
        out.push(check(name, Bound::AtMost(1e-8), || {
            let mut gap: f64 = 0.0;
            for label in [BellCatLabel::PsiPlus, BellCatLabel::PhiMinus] {
                let spec = BellCatSpec::from_label(label, C64::new(1.0, 1.0))?;
                gap = gap.max(oracle_gap(&spec, &params(t)?, convention, &points)?);
            }
            Ok((gap, "psi-plus and phi-minus, alpha=1+i, 20 points".into()))
        }));
    }

    out.push(check("wigner: origin equals sigma/pi^2 at 0 K", Bound::AtMost(1e-9), || {
        let p = params(0.0)?;
        let mut gap: f64 = 0.0;
        for label in BellCatLabel::ALL {
            let spec = BellCatSpec::from_label(label, C64::new(1.0, 1.0))?;
            let w = WignerEvaluator::auto(&spec, &p)?.with_convention(convention).evaluate(&PhasePoint::origin())?;
            gap = gap.max((w - spec.sigma().value() / (PI * PI)).abs());
        }
        Ok((gap, "all four states, alpha=1+i".into()))
    }));

    out.push(check("wigner: mode-2 flip symmetry", Bound::AtMost(1e-12), || {
        let p = params(0.3)?;
        let spec = BellCatSpec::from_label(BellCatLabel::PhiMinus, C64::new(1.0, 1.0))?;
        let a = WignerEvaluator::auto(&spec, &p)?.with_convention(convention);
        let b = WignerEvaluator::auto(&spec.mode2_flipped(), &p)?.with_convention(convention);
        let mut gap: f64 = 0.0;
        for pt in &points {
            gap = gap.max((a.evaluate(pt)? - b.evaluate(&pt.mode2_reflected())?).abs());
        }
        Ok((gap, "phi-minus vs psi-minus, 0.3 K".into()))
    }));

    out.push(check("negativity: nu = delta/(1+delta)", Bound::AtMost(1e-6), || {
        let spec = BellCatSpec::from_label(BellCatLabel::PhiMinus, C64::new(1.0, 0.0))?;
        let r = negativity(&spec, &params(0.01)?, &NegativitySettings::default())?;
        Ok((r.identity_error(), format!("phi-minus, alpha=1, 0.01 K: nu={:.6}, norm-1={:.1e}", r.nu, r.norm_check - 1.0)))
    }));

    // alternative readings: literal sum at T = 0 against the oracle
    let few = random_points(6, 2.5, SEED + 1);
    let rejected = |variant: ReferenceVariant| -> Result<(f64, String)> {
        let spec = BellCatSpec::from_label(BellCatLabel::PsiPlus, C64::new(0.8, 0.6))?;
        let p = params(0.0)?;
        let trunc = TruncationConfig::new([16, 16], [0, 0], 1e-9)?;
        let oracle = OracleEvaluator::new(&spec, &p)?;
        let mut gap: f64 = 0.0;
        for pt in &few {
            gap = gap.max((wigner_reference(&spec, &p, *pt, &trunc, variant).re - oracle.evaluate(pt)?).abs());
        }
        Ok((gap, "psi-plus, alpha=0.8+0.6i, 0 K".into()))
    };
    out.push(check("rejected: chi ordering as printed", Bound::AtLeast(1e-4), || {
        rejected(ReferenceVariant { chi: ChiConvention::AsPrinted, mode2_argument: Mode2Argument::ModeConsistent })
    }));
    out.push(check("rejected: mode-2 radius with y1", Bound::AtLeast(1e-4), || {
        rejected(ReferenceVariant { chi: ChiConvention::Standard, mode2_argument: Mode2Argument::MixedMomentum })
    }));
    out
}

pub fn render(checks: &[Check], convention: ChiConvention) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "series conventions:");
    let _ = writeln!(
        s,
        "  chi factor   {}",
        match convention {
            ChiConvention::Standard => "(x - iy) for ket above bra, (x + iy) otherwise; sign (-1)^(n_th + min)",
            ChiConvention::AsPrinted => "(x + iy) for ket above bra, (x - iy) otherwise; sign (-1)^(n_th + max)",
            ChiConvention::Unconjugated => "(x + iy) for every band",
        }
    );
    let _ = writeln!(s, "  mode-2 radius  2 (x2^2 + y2^2)");
    let _ = writeln!(s);
    let _ = writeln!(s, "{:<6} {:<48} {:>12}  {:<14} note", "status", "check", "measured", "bound");
    for c in checks {
        let bound = match c.bound {
            Bound::AtMost(t) => format!("<= {t:.0e}"),
            Bound::AtLeast(t) => format!(">= {t:.0e}"),
        };
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{status:<6} {:<48} {:>12.3e}  {bound:<14} {}", c.name, c.measured, c.note);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(s);
    let _ = writeln!(s, "{} of {} checks passed", checks.len() - failed, checks.len());
    s
}
