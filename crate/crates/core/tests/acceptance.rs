//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use bellcat::cli::validate::random_points;
use bellcat::density::{assemble_density_matrix, assemble_density_operator};
use bellcat::negativity::*;
use bellcat::states::*;
use bellcat::tfd::*;
use bellcat::truncation::TruncationConfig;
use bellcat::wigner::*;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OMEGA: f64 = 2.0 * PI * 5.5e9;
const FIGURE_STATES: [BellCatLabel; 2] = [BellCatLabel::PsiPlus, BellCatLabel::PhiMinus];
const FIGURE_ALPHAS: [(f64, f64); 3] = [(1.0, 0.0), (1.0, 1.0), (2.0, 0.0)];
const FIGURE_TEMPERATURES: [f64; 3] = [0.01, 1.0, 10.0];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn spec(label: BellCatLabel, (re, im): (f64, f64)) -> BellCatSpec {
    BellCatSpec::from_label(label, C64::new(re, im)).unwrap()
}

fn params(t: f64) -> ThermalParams {
    thermal_params(t, OMEGA, OMEGA).unwrap()
}

fn alpha_str((re, im): (f64, f64)) -> String {
    format!("{re}{im:+}i")
}

fn overlap() -> Outcome {
    let v = coherent_overlap_sq(C64::new(2.0, 0.0));
    let shown = format!("{v:.2e}");
    outcome(shown == "1.13e-7", format!("|<2|-2>|^2 = {v:.6e}, 3 s.f. {shown}"))
}

fn bogoliubov() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..200 {
        let t = 10f64.powf(rng.gen_range(-3.0..2.0));
        let (f1, f2) = (rng.gen_range(0.1e9..50e9), rng.gen_range(0.1e9..50e9));
        let p = thermal_params(t, 2.0 * PI * f1, 2.0 * PI * f2).unwrap();
        for mode in [Mode::One, Mode::Two] {
            worst = worst.max((p.u(mode).powi(2) - p.v(mode).powi(2) - 1.0).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |u^2 - v^2 - 1| = {worst:.2e} over 200 samples"))
}

fn density_routes() -> Outcome {
    let mut worst = 0.0_f64;
    for label in BellCatLabel::ALL {
        for a in FIGURE_ALPHAS {
            for t in [0.0, 0.3, 1.0] {
                let (s, p) = (spec(label, a), params(t));
                let trunc = TruncationConfig::auto(&s, &p).unwrap();
                let direct = assemble_density_matrix(&s, &p, 25, &trunc).unwrap();
                let op = assemble_density_operator(&s, &p, 25).unwrap();
                worst = worst.max(direct.max_abs_diff(&op));
            }
        }
    }
    outcome(worst <= 1e-10, format!("max entrywise gap {worst:.2e} over 36 configurations at cutoff 25"))
}

fn wigner_oracle() -> Outcome {
    let points = random_points(50, 3.0, 4);
    let mut worst = 0.0_f64;
    for label in BellCatLabel::ALL {
        for a in [(1.0, 0.0), (1.0, 1.0)] {
            for t in [0.0, 1.0] {
                let (s, p) = (spec(label, a), params(t));
                let fast = WignerEvaluator::auto(&s, &p).unwrap();
                let oracle = OracleEvaluator::new(&s, &p).unwrap();
                for pt in &points {
                    worst = worst.max((fast.evaluate(pt).unwrap() - oracle.evaluate(pt).unwrap()).abs());
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("max |series - Fock kernel| = {worst:.2e} over 16 configurations x 50 points"))
}

fn origin_parity() -> Outcome {
    let p = params(0.0);
    let mut worst = 0.0_f64;
    for label in BellCatLabel::ALL {
        for a in FIGURE_ALPHAS {
            let s = spec(label, a);
            let want = s.sigma().value() / (PI * PI);
            let w = WignerEvaluator::auto(&s, &p).unwrap().evaluate(&PhasePoint::origin()).unwrap();
            let o = wigner_point_oracle(&s, &p, PhasePoint::origin(), 40).unwrap();
            worst = worst.max((w - want).abs()).max((o - want).abs());
        }
    }
    outcome(worst <= 1e-9, format!("max |W(0) - sigma/pi^2| = {worst:.2e} (series and oracle)"))
}

fn flip_symmetry() -> Outcome {
    let points = random_points(100, 3.0, 6);
    let mut worst = 0.0_f64;
    for (a_label, b_label) in [(BellCatLabel::PhiPlus, BellCatLabel::PsiPlus), (BellCatLabel::PhiMinus, BellCatLabel::PsiMinus)] {
        for a in FIGURE_ALPHAS {
            for t in [0.0, 0.3, 1.0] {
                let p = params(t);
                let wa = WignerEvaluator::auto(&spec(a_label, a), &p).unwrap();
                let wb = WignerEvaluator::auto(&spec(b_label, a), &p).unwrap();
                for pt in &points {
                    let gap = wa.evaluate(pt).unwrap() - wb.evaluate(&pt.mode2_reflected()).unwrap();
                    worst = worst.max(gap.abs());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max flip gap {worst:.2e} over 100 points x 18 configurations"))
}

struct Run {
    label: BellCatLabel,
    alpha: (f64, f64),
    temperature: f64,
    result: Result<NegativityResult, String>,
}

fn figure_runs() -> Vec<Run> {
    let mut runs = Vec::new();
    for label in FIGURE_STATES {
        for alpha in FIGURE_ALPHAS {
            for temperature in FIGURE_TEMPERATURES {
                let result = negativity(&spec(label, alpha), &params(temperature), &NegativitySettings::default())
                    .map_err(|e| e.to_string());
                runs.push(Run { label, alpha, temperature, result });
            }
        }
    }
    runs
}

fn sweep_runs() -> Vec<Run> {
    let alpha = (1.0, 0.0);
    let mut temps = linear_temperatures(0.01, 2.0, 40);
    temps.push(0.3);
    temps.sort_by(f64::total_cmp);
    let entries =
        temperature_sweep(&spec(BellCatLabel::PhiMinus, alpha), &temps, OMEGA, OMEGA, &NegativitySettings::default())
            .unwrap();
    entries
        .into_iter()
        .map(|e| Run {
            label: BellCatLabel::PhiMinus,
            alpha,
            temperature: e.temperature,
            result: e.result.map_err(|e| e.to_string()),
        })
        .collect()
}

fn describe(run: &Run) -> String {
    format!("{} alpha={} T={}", run.label, alpha_str(run.alpha), run.temperature)
}

fn normalization(runs: &[Run]) -> Outcome {
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for run in runs {
        match &run.result {
            Ok(r) => {
                worst = worst.max((r.norm_check - 1.0).abs());
                if !(0.999..=1.001).contains(&r.norm_check) {
                    failures.push(describe(run));
                }
            }
            Err(e) => failures.push(format!("{}: {e}", describe(run))),
        }
    }
    let detail = format!("max |I+ - I- - 1| = {worst:.2e} over {} runs", runs.len());
    if failures.is_empty() {
        outcome(true, detail)
    } else {
        outcome(false, format!("{detail}; failing: {}", failures.join("; ")))
    }
}

fn identity(runs: &[Run]) -> Outcome {
    let ok: Vec<&NegativityResult> = runs.iter().filter_map(|r| r.result.as_ref().ok()).collect();
    let worst = ok.iter().map(|r| r.identity_error()).fold(0.0, f64::max);
    let all = ok.len() == runs.len();
    outcome(all && worst <= 1e-6, format!("max relative |nu - delta/(1+delta)| = {worst:.2e} over {} results", ok.len()))
}

fn nu_at(runs: &[Run], t: f64) -> Option<f64> {
    runs.iter().find(|r| r.temperature == t).and_then(|r| r.result.as_ref().ok()).map(|r| r.nu)
}

fn figure4_plateau(sweep: &[Run]) -> Outcome {
    let nus: Option<Vec<f64>> =
        sweep.iter().filter(|r| r.temperature <= 0.3).map(|r| r.result.as_ref().ok().map(|r| r.nu)).collect();
    let Some(nus) = nus else { return outcome(false, "sweep failed below 0.3 K".into()) };
    let cold = nus[0];
    let spread = nus.iter().map(|v| (v - cold).abs() / cold).fold(0.0, f64::max);
    outcome(
        spread <= 0.05,
        format!("max |nu(T) - nu(0.01 K)|/nu(0.01 K) on [0.01, 0.3] K = {spread:.4} (nu: {cold:.4} -> {:.4})", nus[nus.len() - 1]),
    )
}

fn figure4_decay(sweep: &[Run]) -> Outcome {
    // node-doubling changes of delta stay below 1e-3 relative
    const TOL: f64 = 1e-3;
    let nus: Option<Vec<(f64, f64)>> = sweep
        .iter()
        .filter(|r| r.temperature >= 0.3)
        .map(|r| r.result.as_ref().ok().map(|x| (r.temperature, x.nu)))
        .collect();
    let Some(nus) = nus else { return outcome(false, "sweep failed above 0.3 K".into()) };
    let rises: Vec<String> = nus
        .windows(2)
        .filter(|w| w[1].1 > w[0].1 * (1.0 + TOL))
        .map(|w| format!("{} K -> {} K", w[0].0, w[1].0))
        .collect();
    outcome(rises.is_empty(), format!("{} points on [0.3, 2] K, rises beyond {TOL:e}: {rises:?}", nus.len()))
}

fn figure4_vanishing(sweep: &[Run]) -> Outcome {
    match (nu_at(sweep, 0.01), nu_at(sweep, 2.0)) {
        (Some(cold), Some(hot)) => outcome(hot < 0.1 * cold, format!("nu(2 K)/nu(0.01 K) = {:.4}", hot / cold)),
        _ => outcome(false, "sweep endpoints failed".into()),
    }
}

fn ordering(runs: &[Run]) -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for (label, top) in [(BellCatLabel::PsiPlus, (1.0, 1.0)), (BellCatLabel::PhiMinus, (1.0, 0.0))] {
        let nus: Vec<((f64, f64), Option<f64>)> = FIGURE_ALPHAS
            .iter()
            .map(|&a| {
                let run = runs.iter().find(|r| r.label == label && r.alpha == a && r.temperature == 0.01);
                (a, run.and_then(|r| r.result.as_ref().ok()).map(|r| r.nu))
            })
            .collect();
        let best = nus.iter().filter_map(|(a, v)| v.map(|v| (*a, v))).max_by(|x, y| x.1.total_cmp(&y.1));
        passed &= nus.iter().all(|(_, v)| v.is_some()) && best.map(|b| b.0) == Some(top);
        let shown: Vec<String> =
            nus.iter().map(|(a, v)| format!("{}: {}", alpha_str(*a), v.map_or("failed".into(), |v| format!("{v:.4}")))).collect();
        lines.push(format!("{label} expects {} highest [{}]", alpha_str(top), shown.join(", ")));
    }
    outcome(passed, lines.join("; "))
}

fn slices() -> Outcome {
    let slice = SliceSpec::default_slice(6.0, 61).unwrap();
    let mut passed = true;
    let mut lines = Vec::new();
    for label in FIGURE_STATES {
        for a in FIGURE_ALPHAS {
            let s = spec(label, a);
            let cold = wigner_grid(&WignerEvaluator::auto(&s, &params(0.01)).unwrap(), &slice).unwrap();
            let hot = wigner_grid(&WignerEvaluator::auto(&s, &params(10.0)).unwrap(), &slice).unwrap();
            // rounding-level negatives do not count as fringes
            let ok = cold.min() < -1e-3 * cold.max_abs() && hot.max() < cold.max() && hot.min() > cold.min();
            passed &= ok;
            lines.push(format!(
                "{}{label} {}: [{:.3e}, {:.3e}] -> [{:.3e}, {:.3e}]",
                if ok { "" } else { "NOT MET " },
                alpha_str(a),
                cold.min(),
                cold.max(),
                hot.min(),
                hot.max()
            ));
        }
    }
    outcome(passed, format!("min/max at 0.01 K -> 10 K: {}", lines.join("; ")))
}

fn determinism() -> Outcome {
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_bellcat")).args(args).output().unwrap();
    let commands: [&[&str]; 4] = [
        &["validate"],
        &["wigner", "--state", "psi-plus", "--alpha-im", "1", "--temp", "0.3", "--grid-count", "41"],
        &["negativity", "--temp", "0.3", "--quad-nodes", "48"],
        &["sweep", "--temp-range", "0:0.4:3", "--quad-nodes", "32"],
    ];
    let mut differing = Vec::new();
    for args in commands {
        let (a, b) = (run(args), run(args));
        if a.stdout != b.stdout || a.status.code() != b.status.code() || a.stdout.is_empty() {
            differing.push(args[0]);
        }
    }
    outcome(differing.is_empty(), format!("validate, wigner, negativity, sweep run twice; differing: {differing:?}"))
}

fn report(n: &str, name: &str, start: Instant, o: Outcome, failed: &mut usize) {
    let tag = if o.passed { "PASS" } else { "FAIL" };
    if !o.passed {
        *failed += 1;
    }
    println!("{tag} criterion {n} {name}: {} [{:.1}s]", o.detail, start.elapsed().as_secs_f64());
}

fn main() -> ExitCode {
    let mut failed = 0;
    let t = Instant::now();
    report("1", "coherent overlap", t, overlap(), &mut failed);
    let t = Instant::now();
    report("2", "Bogoliubov identity", t, bogoliubov(), &mut failed);
    let t = Instant::now();
    report("3", "density element vs operator", t, density_routes(), &mut failed);
    let t = Instant::now();
    report("4", "Wigner series vs Fock-kernel oracle", t, wigner_oracle(), &mut failed);
    let t = Instant::now();
    report("5", "origin parity values", t, origin_parity(), &mut failed);
    let t = Instant::now();
    report("6", "mode-2 flip symmetry", t, flip_symmetry(), &mut failed);

    let t = Instant::now();
    let mut runs = figure_runs();
    let figure_count = runs.len();
    let sweep = sweep_runs();
    let elapsed = Instant::now();
    runs.extend(sweep);
    let (figures, sweep) = runs.split_at(figure_count);
    report("7", "normalization", t, normalization(&runs), &mut failed);
    report("8", "nu = delta/(1+delta)", elapsed, identity(&runs), &mut failed);
    report("9a", "plateau up to 0.3 K", elapsed, figure4_plateau(sweep), &mut failed);
    report("9b", "decrease on [0.3, 2] K", elapsed, figure4_decay(sweep), &mut failed);
    report("9c", "nearly absent at 2 K", elapsed, figure4_vanishing(sweep), &mut failed);
    report("10", "state/amplitude ordering at 0.01 K", elapsed, ordering(figures), &mut failed);

    let t = Instant::now();
    report("11", "slices lose range when heated", t, slices(), &mut failed);
    let t = Instant::now();
    report("12", "byte-identical reruns", t, determinism(), &mut failed);

    println!("acceptance: {failed} failing");
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
