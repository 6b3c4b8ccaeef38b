//! `bellcat` command-line front end.
//!
//! Exit codes: 0 success, 1 computation or validation failure, 2 usage error.

mod config;
mod output;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

pub use config::{
    parse_caps, parse_slice, parse_temperature_range, Cli, Command, Preset, RunConfig, DEFAULT_FREQUENCY_HZ,
    DEFAULT_GRID_COUNT, DEFAULT_GRID_HALF_WIDTH, DEFAULT_TEMPERATURE_K,
};
pub use output::{negativity_json, number, sweep_csv, wigner_csv, SWEEP_COLUMNS, WIGNER_COLUMNS, WIGNER_MAGIC};

use crate::error::{Error, Result};
use crate::negativity::{integrate_negativity, temperature_sweep};
use crate::truncation::TruncationConfig;
use crate::wigner::{wigner_grid, ChiConvention, WignerEvaluator};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

enum Failure {
    Usage(Error),
    Compute(Error),
    Message(String),
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `--out` or `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Validate(args) => cmd_validate(args.chi_convention.into(), stdout),
        Command::Wigner(args) => {
            RunConfig::for_wigner(args).map_err(Failure::Usage).and_then(|cfg| cmd_wigner(&cfg, stdout))
        }
        Command::Negativity(args) => {
            RunConfig::for_negativity(args).map_err(Failure::Usage).and_then(|cfg| cmd_negativity(&cfg, stdout))
        }
        Command::Sweep(args) => {
            RunConfig::for_sweep(args).map_err(Failure::Usage).and_then(|cfg| cmd_sweep(&cfg, stdout))
        }
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_FAILURE
        }
        Err(Failure::Message(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_FAILURE
        }
    }
}

fn emit(cfg: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_validate(convention: ChiConvention, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let checks = validate::run_checks(convention);
    let text = validate::render(&checks, convention);
    stdout.write_all(text.as_bytes()).map_err(|e| Failure::Compute(e.into()))?;
    Ok(if checks.iter().all(validate::Check::passed) { EXIT_OK } else { EXIT_FAILURE })
}

fn resolved_truncation(cfg: &RunConfig) -> Result<(crate::states::BellCatSpec, crate::tfd::ThermalParams, TruncationConfig)> {
    let spec = cfg.spec()?;
    let params = cfg.params(cfg.temperature())?;
    let trunc = match cfg.settings.caps {
        Some((amp, th)) => TruncationConfig::new(amp, th, cfg.settings.epsilon)?,
        None => TruncationConfig::auto_with_epsilon(&spec, &params, cfg.settings.epsilon)?,
    };
    Ok((spec, params, trunc))
}

fn cmd_wigner(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let slice = cfg.slice.as_ref().expect("wigner config carries a slice");
    let (spec, params, trunc) = resolved_truncation(cfg).map_err(Failure::Compute)?;
    let eval = WignerEvaluator::new(&spec, &params, &trunc).map_err(Failure::Compute)?.with_convention(cfg.convention);
    let grid = wigner_grid(&eval, slice).map_err(Failure::Compute)?;
    emit(cfg, &wigner_csv(cfg, &grid, &trunc), stdout).map_err(Failure::Compute)?;
    Ok(EXIT_OK)
}

fn cmd_negativity(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let start = Instant::now();
    let spec = cfg.spec().map_err(Failure::Usage)?;
    let params = cfg.params(cfg.temperature()).map_err(Failure::Usage)?;
    let (quad, trunc) = cfg.settings.resolve(&spec, &params).map_err(Failure::Compute)?;
    let outcome = integrate_negativity(&spec, &params, &quad, &trunc);
    let runtime = cfg.timing.then(|| start.elapsed().as_secs_f64());
    match outcome {
        Ok(r) => {
            let text = negativity_json(cfg, &r, runtime, None).map_err(Failure::Compute)?;
            emit(cfg, &text, stdout).map_err(Failure::Compute)?;
            Ok(EXIT_OK)
        }
        Err(Error::NormalizationFailure(r)) => {
            let err = Error::NormalizationFailure(r.clone());
            let text = negativity_json(cfg, &r, runtime, Some(&err)).map_err(Failure::Compute)?;
            emit(cfg, &text, stdout).map_err(Failure::Compute)?;
            Err(Failure::Compute(err))
        }
        Err(e) => Err(Failure::Compute(e)),
    }
}

fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let spec = cfg.spec().map_err(Failure::Usage)?;
    let (w1, w2) = cfg.omegas();
    let entries = temperature_sweep(&spec, &cfg.temperatures, w1, w2, &cfg.settings).map_err(Failure::Usage)?;
    emit(cfg, &sweep_csv(&entries), stdout).map_err(Failure::Compute)?;
    let failed: Vec<_> = entries.iter().filter_map(|e| e.result.as_ref().err().map(|err| (e.temperature, err))).collect();
    if failed.is_empty() {
        return Ok(EXIT_OK);
    }
    let detail = failed.iter().map(|(t, e)| format!("{t} K: {e}")).collect::<Vec<_>>().join("; ");
    Err(Failure::Message(format!("{} of {} temperatures failed: {detail}", failed.len(), entries.len())))
}
