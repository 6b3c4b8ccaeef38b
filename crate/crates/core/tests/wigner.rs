use std::f64::consts::PI;

use bellcat::cli::validate::random_points;
use bellcat::error::Error;
use bellcat::states::*;
use bellcat::tfd::*;
use bellcat::wigner::reference::{wigner_reference, Mode2Argument, ReferenceVariant};
use bellcat::wigner::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

const OMEGA: f64 = 2.0 * PI * 5.5e9;

fn spec(label: BellCatLabel, re: f64, im: f64) -> BellCatSpec {
    BellCatSpec::from_label(label, C64::new(re, im)).unwrap()
}

fn params(t: f64) -> ThermalParams {
    thermal_params(t, OMEGA, OMEGA).unwrap()
}

#[test]
fn series_matches_fock_kernel_oracle() {
    let points = random_points(50, 3.0, 7);
    for (label, re, im, t) in [
        (BellCatLabel::PhiMinus, 1.0, 1.0, 0.0),
        (BellCatLabel::PsiPlus, 1.0, 0.0, 1.0),
        (BellCatLabel::PsiMinus, 1.0, 1.0, 1.0),
    ] {
        let s = spec(label, re, im);
        let p = params(t);
        let fast = WignerEvaluator::auto(&s, &p).unwrap();
        let oracle = OracleEvaluator::new(&s, &p).unwrap();
        assert!(oracle.trace_deficit() < 1e-10);
        for pt in &points {
            let (a, b) = (fast.evaluate(pt).unwrap(), oracle.evaluate(pt).unwrap());
            assert!((a - b).abs() <= 1e-8, "{label} T={t} at {pt:?}: {a} vs {b}");
        }
    }
}

#[test]
fn origin_carries_the_parity() {
    let p = params(0.0);
    for label in BellCatLabel::ALL {
        let s = spec(label, 2.0, 0.0);
        let w = wigner_point(&s, &p, PhasePoint::origin(), &TruncationConfig::auto(&s, &p).unwrap()).unwrap();
        assert!((w - s.sigma().value() / (PI * PI)).abs() <= 1e-9, "{label}");
        let o = wigner_point_oracle(&s, &p, PhasePoint::origin(), 40).unwrap();
        assert!((o - w).abs() <= 1e-9);
    }
}

#[test]
fn alternative_readings_disagree_with_the_oracle() {
    let s = spec(BellCatLabel::PhiMinus, 0.6, 0.7);
    let p = params(0.0);
    let trunc = TruncationConfig::new([18, 18], [0, 0], 1e-9).unwrap();
    let oracle = OracleEvaluator::new(&s, &p).unwrap();
    let mut gaps = [0.0_f64; 3];
    for pt in random_points(8, 2.0, 11) {
        let want = oracle.evaluate(&pt).unwrap();
        let variants = [
            ReferenceVariant::default(),
            ReferenceVariant { chi: ChiConvention::AsPrinted, ..Default::default() },
            ReferenceVariant { mode2_argument: Mode2Argument::MixedMomentum, ..Default::default() },
        ];
        for (g, v) in gaps.iter_mut().zip(variants) {
            *g = g.max((wigner_reference(&s, &p, pt, &trunc, v).re - want).abs());
        }
    }
    assert!(gaps[0] < 1e-10, "{gaps:?}");
    assert!(gaps[1] > 1e-4 && gaps[2] > 1e-4, "{gaps:?}");
}

#[test]
fn printed_ordering_is_an_x_mirror() {
    let s = spec(BellCatLabel::PsiPlus, 1.0, 1.0);
    let p = params(0.5);
    let std = WignerEvaluator::auto(&s, &p).unwrap();
    let printed = std.clone().with_convention(ChiConvention::AsPrinted);
    for pt in random_points(10, 2.5, 3) {
        let mirror = PhasePoint::new(-pt.x1, pt.y1, -pt.x2, pt.y2);
        let (a, b) = (printed.evaluate(&pt).unwrap(), std.evaluate(&mirror).unwrap());
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn unconjugated_reading_leaves_a_residue() {
    let s = spec(BellCatLabel::PhiPlus, 1.0, 0.0);
    let e = WignerEvaluator::auto(&s, &params(0.01)).unwrap().with_convention(ChiConvention::Unconjugated);
    let r = e.evaluate(&PhasePoint::new(0.4, 0.8, -0.3, 0.5));
    assert!(matches!(r, Err(Error::ImaginaryResidue { .. })), "{r:?}");
}

#[test]
fn heat_flattens_the_slice() {
    let s = spec(BellCatLabel::PhiMinus, 1.0, 0.0);
    let slice = SliceSpec::default_slice(6.0, 41).unwrap();
    let cold = wigner_grid(&WignerEvaluator::auto(&s, &params(0.01)).unwrap(), &slice).unwrap();
    let hot = wigner_grid(&WignerEvaluator::auto(&s, &params(10.0)).unwrap(), &slice).unwrap();
    assert!(cold.min() < 0.0);
    assert!(hot.max_abs() < cold.max_abs());
    assert!(hot.max() - hot.min() < cold.max() - cold.min());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mode2_flip_is_a_reflection(
        sigma_plus in any::<bool>(),
        re in 0.3_f64..2.0,
        im in -1.0_f64..1.0,
        t in prop::sample::select(vec![0.0, 0.2, 1.0]),
        c in prop::array::uniform4(-3.0_f64..3.0),
    ) {
        let sigma = if sigma_plus { Sign::Plus } else { Sign::Minus };
        let a = BellCatSpec::new(C64::new(re, im), Sign::Plus, sigma).unwrap();
        let p = params(t);
        let pt = PhasePoint::new(c[0], c[1], c[2], c[3]);
        let wa = WignerEvaluator::auto(&a, &p).unwrap().evaluate(&pt).unwrap();
        let wb = WignerEvaluator::auto(&a.mode2_flipped(), &p).unwrap().evaluate(&pt.mode2_reflected()).unwrap();
        prop_assert!((wa - wb).abs() <= 1e-12);
    }

    #[test]
    fn thermal_values_are_bounded(re in 0.3_f64..2.0, t in 0.0_f64..3.0, c in prop::array::uniform4(-4.0_f64..4.0)) {
        // |W| ≤ 1/π² for any normalized two-mode state
        let s = spec(BellCatLabel::PhiMinus, re, 0.0);
        let p = params(t);
        let w = WignerEvaluator::auto(&s, &p).unwrap().evaluate(&PhasePoint::new(c[0], c[1], c[2], c[3])).unwrap();
        prop_assert!(w.abs() <= 1.0 / (PI * PI) + 1e-12);
    }
}
