//! CSV and JSON emitters. Every number is written with 17 significant
//! digits so the files round-trip exactly and are byte-stable.

use std::fmt::Write as _;

use serde::Serialize;

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::negativity::{NegativityResult, QuadratureRule, SweepEntry};
use crate::truncation::TruncationConfig;
use crate::wigner::WignerGrid;

pub const WIGNER_MAGIC: &str = "# bellcat-wigner v1";
pub const WIGNER_COLUMNS: &str = "x1,y1,x2,y2,w";
pub const SWEEP_COLUMNS: &str = "temperature_k,delta,nu,i_plus,i_minus,norm_check";

/// `{:.16e}`, with `nan` for missing values.
pub fn number(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn wigner_csv(cfg: &RunConfig, grid: &WignerGrid, trunc: &TruncationConfig) -> String {
    let slice = &grid.slice;
    let [(c0, a0), (c1, a1)] = slice.axes;
    let mut s = String::new();
    let _ = writeln!(s, "{WIGNER_MAGIC}");
    let _ = writeln!(s, "# state={}", cfg.label);
    let _ = writeln!(s, "# alpha_re={}", number(cfg.alpha.re));
    let _ = writeln!(s, "# alpha_im={}", number(cfg.alpha.im));
    let _ = writeln!(s, "# temperature_k={}", number(cfg.temperature()));
    let _ = writeln!(s, "# freq1_hz={}", number(cfg.frequencies_hz[0]));
    let _ = writeln!(s, "# freq2_hz={}", number(cfg.frequencies_hz[1]));
    let _ = writeln!(s, "# slice={c0},{c1}");
    let _ = writeln!(s, "# {c0}_range={},{},{}", number(a0.min), number(a0.max), a0.count);
    let _ = writeln!(s, "# {c1}_range={},{},{}", number(a1.min), number(a1.max), a1.count);
    let f = slice.fixed;
    let _ = writeln!(
        s,
        "# fixed=x1:{},y1:{},x2:{},y2:{}",
        number(f.x1),
        number(f.y1),
        number(f.x2),
        number(f.y2)
    );
    let _ = writeln!(
        s,
        "# caps={},{},{},{}",
        trunc.amplitude_caps[0], trunc.amplitude_caps[1], trunc.thermal_caps[0], trunc.thermal_caps[1]
    );
    let _ = writeln!(s, "# epsilon={}", number(trunc.epsilon));
    let _ = writeln!(s, "# tail_bound={}", number(grid.stats.tail_bound));
    let _ = writeln!(s, "# max_residue={}", number(grid.stats.max_residue));
    let _ = writeln!(s, "{WIGNER_COLUMNS}");
    for (pt, w) in grid.iter() {
        let _ = writeln!(s, "{},{},{},{},{}", number(pt.x1), number(pt.y1), number(pt.x2), number(pt.y2), number(w));
    }
    s
}

#[derive(Serialize)]
struct QuadReport {
    nodes: usize,
    half_width: f64,
    rule: QuadratureRule,
}

#[derive(Serialize)]
struct CapsReport {
    amplitude: [usize; 2],
    thermal: [usize; 2],
}

#[derive(Serialize)]
struct TruncReport {
    caps: CapsReport,
    epsilon: f64,
}

#[derive(Serialize)]
struct NegativityReport {
    state: String,
    alpha_re: f64,
    alpha_im: f64,
    temperature_k: f64,
    freq1_hz: f64,
    freq2_hz: f64,
    delta: f64,
    nu: f64,
    i_plus: f64,
    i_minus: f64,
    norm_check: f64,
    quad: QuadReport,
    trunc: TruncReport,
    runtime_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// JSON report of a finished integration; `error` carries the diagnostics
/// of a normalization failure.
pub fn negativity_json(
    cfg: &RunConfig,
    result: &NegativityResult,
    runtime_s: Option<f64>,
    error: Option<&Error>,
) -> Result<String> {
    let report = NegativityReport {
        state: cfg.label.to_string(),
        alpha_re: cfg.alpha.re,
        alpha_im: cfg.alpha.im,
        temperature_k: cfg.temperature(),
        freq1_hz: cfg.frequencies_hz[0],
        freq2_hz: cfg.frequencies_hz[1],
        delta: result.delta,
        nu: result.nu,
        i_plus: result.i_plus,
        i_minus: result.i_minus,
        norm_check: result.norm_check,
        quad: QuadReport { nodes: result.quad.nodes, half_width: result.quad.half_width, rule: result.quad.rule },
        trunc: TruncReport {
            caps: CapsReport { amplitude: result.trunc.amplitude_caps, thermal: result.trunc.thermal_caps },
            epsilon: result.trunc.epsilon,
        },
        runtime_s,
        error: error.map(ToString::to_string),
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

/// One row per entry; failed temperatures get `nan` values.
pub fn sweep_csv(entries: &[SweepEntry]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{SWEEP_COLUMNS}");
    for e in entries {
        let row = match &e.result {
            Ok(r) => [r.delta, r.nu, r.i_plus, r.i_minus, r.norm_check],
            Err(_) => [f64::NAN; 5],
        };
        let _ = write!(s, "{}", number(e.temperature));
        for v in row {
            let _ = write!(s, ",{}", number(v));
        }
        s.push('\n');
    }
    s
}
