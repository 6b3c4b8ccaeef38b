//! Command-line arguments and their resolution into a [`RunConfig`].
//!
//! Units are converted here and nowhere else: frequencies arrive in Hz and
//! leave as angular frequencies, temperatures stay in kelvin.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::negativity::{linear_temperatures, NegativitySettings, QuadratureRule, QuadratureSpec};
use crate::states::{BellCatLabel, BellCatSpec};
use crate::tfd::{thermal_params, ThermalParams};
use crate::truncation::{TruncationConfig, DEFAULT_EPSILON};
use crate::wigner::{Axis, ChiConvention, Coordinate, PhasePoint, SliceSpec};

pub const DEFAULT_FREQUENCY_HZ: f64 = 5.5e9;
pub const DEFAULT_TEMPERATURE_K: f64 = 0.01;
pub const DEFAULT_GRID_COUNT: usize = 61;
pub const DEFAULT_GRID_HALF_WIDTH: f64 = 6.0;

#[derive(Debug, Parser)]
#[command(name = "bellcat", version, about = "Thermal Wigner functions and negativity of two-mode Bell-Cat states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cross-check the series against independent constructions.
    Validate(ValidateArgs),
    /// Write a two-dimensional slice of the Wigner function as CSV.
    Wigner(WignerArgs),
    /// Negative volume at one temperature, as JSON.
    Negativity(NegativityArgs),
    /// Negative volume over a temperature range, as CSV.
    Sweep(SweepArgs),
}

/// Named parameter sets. `fig1`–`fig3` fix the amplitude (1, 1+i, 2) at
/// 0.01 K; `fig4` is `α = 1` over 0–2 K in 41 steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Preset {
    pub fn alpha(self) -> C64 {
        match self {
            Preset::Fig1 | Preset::Fig4 => C64::new(1.0, 0.0),
            Preset::Fig2 => C64::new(1.0, 1.0),
            Preset::Fig3 => C64::new(2.0, 0.0),
        }
    }

    pub fn temperatures(self) -> Vec<f64> {
        match self {
            Preset::Fig4 => linear_temperatures(0.0, 2.0, 41),
            _ => vec![DEFAULT_TEMPERATURE_K],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Uniform,
    GaussLegendre,
}

impl From<RuleArg> for QuadratureRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Uniform => QuadratureRule::Uniform,
            RuleArg::GaussLegendre => QuadratureRule::GaussLegendre,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChiArg {
    Standard,
    AsPrinted,
    Unconjugated,
}

impl From<ChiArg> for ChiConvention {
    fn from(c: ChiArg) -> Self {
        match c {
            ChiArg::Standard => ChiConvention::Standard,
            ChiArg::AsPrinted => ChiConvention::AsPrinted,
            ChiArg::Unconjugated => ChiConvention::Unconjugated,
        }
    }
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Parameter preset; explicit flags take precedence.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// phi-plus, phi-minus, psi-plus or psi-minus.
    #[arg(long, default_value = "phi-minus")]
    pub state: BellCatLabel,
    /// Real part of the coherent amplitude [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_re: Option<f64>,
    /// Imaginary part of the coherent amplitude [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_im: Option<f64>,
    /// Mode-1 frequency in Hz.
    #[arg(long, default_value_t = DEFAULT_FREQUENCY_HZ)]
    pub freq1: f64,
    /// Mode-2 frequency in Hz.
    #[arg(long, default_value_t = DEFAULT_FREQUENCY_HZ)]
    pub freq2: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruncArgs {
    /// Series caps `AMP1,AMP2,THERMAL1,THERMAL2`; chosen from --epsilon when absent.
    #[arg(long)]
    pub caps: Option<String>,
    /// Relative tail tolerance of the series.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct QuadArgs {
    /// Quadrature nodes per axis.
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    /// Half-width of the integration box.
    #[arg(long)]
    pub quad_half_width: Option<f64>,
    #[arg(long, value_enum, default_value = "uniform")]
    pub quad_rule: RuleArg,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value = "standard", hide = true)]
    pub chi_convention: ChiArg,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Temperature in kelvin.
    #[arg(long)]
    pub temp: Option<f64>,
    /// The two varying coordinates, e.g. `x1,x2`.
    #[arg(long, default_value = "x1,x2")]
    pub slice: String,
    /// Samples per slice axis.
    #[arg(long, default_value_t = DEFAULT_GRID_COUNT)]
    pub grid_count: usize,
    /// Slice axes span `[-w, w]`.
    #[arg(long, default_value_t = DEFAULT_GRID_HALF_WIDTH)]
    pub half_width: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y1: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub y2: f64,
    #[command(flatten)]
    pub trunc: TruncArgs,
    #[arg(long, value_enum, default_value = "standard", hide = true)]
    pub chi_convention: ChiArg,
}

#[derive(Debug, Args)]
pub struct NegativityArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Temperature in kelvin.
    #[arg(long)]
    pub temp: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub trunc: TruncArgs,
    /// Record the wall-clock runtime (makes the output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Single temperature in kelvin.
    #[arg(long, conflicts_with = "temp_range")]
    pub temp: Option<f64>,
    /// `START:END:COUNT` in kelvin, evenly spaced.
    #[arg(long)]
    pub temp_range: Option<String>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub trunc: TruncArgs,
}

/// Fully resolved run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub label: BellCatLabel,
    pub alpha: C64,
    /// Kelvin, strictly increasing.
    pub temperatures: Vec<f64>,
    pub frequencies_hz: [f64; 2],
    pub slice: Option<SliceSpec>,
    pub settings: NegativitySettings,
    pub convention: ChiConvention,
    pub timing: bool,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn base(state: &StateArgs) -> Result<Self> {
        let preset_alpha = state.preset.map(Preset::alpha).unwrap_or(C64::new(1.0, 0.0));
        let alpha = C64::new(state.alpha_re.unwrap_or(preset_alpha.re), state.alpha_im.unwrap_or(preset_alpha.im));
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite amplitude {alpha}")));
        }
        for f in [state.freq1, state.freq2] {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::InvalidConfig(format!("frequency {f} Hz must be finite and positive")));
            }
        }
        BellCatSpec::from_label(state.state, alpha)?;
        Ok(Self {
            label: state.state,
            alpha,
            temperatures: state.preset.map(Preset::temperatures).unwrap_or_else(|| vec![DEFAULT_TEMPERATURE_K]),
            frequencies_hz: [state.freq1, state.freq2],
            slice: None,
            settings: NegativitySettings::default(),
            convention: ChiConvention::Standard,
            timing: false,
            out: state.out.clone(),
        })
    }

    pub fn for_wigner(args: &WignerArgs) -> Result<Self> {
        let mut cfg = Self::base(&args.state)?;
        cfg.set_single_temperature(args.temp)?;
        let (c0, c1) = parse_slice(&args.slice)?;
        if !(args.half_width.is_finite() && args.half_width > 0.0) {
            return Err(Error::InvalidConfig(format!("grid half-width {} must be positive", args.half_width)));
        }
        let axis = Axis::new(-args.half_width, args.half_width, args.grid_count)?;
        let fixed = PhasePoint::new(args.x1, args.y1, args.x2, args.y2);
        cfg.slice = Some(SliceSpec::new((c0, axis), (c1, axis), fixed)?);
        cfg.settings = trunc_settings(&args.trunc, NegativitySettings::default())?;
        cfg.convention = args.chi_convention.into();
        Ok(cfg)
    }

    pub fn for_negativity(args: &NegativityArgs) -> Result<Self> {
        let mut cfg = Self::base(&args.state)?;
        cfg.set_single_temperature(args.temp)?;
        cfg.settings = quad_settings(&args.quad, trunc_settings(&args.trunc, NegativitySettings::default())?)?;
        cfg.timing = args.timing;
        cfg.check_quadrature()?;
        Ok(cfg)
    }

    pub fn for_sweep(args: &SweepArgs) -> Result<Self> {
        let mut cfg = Self::base(&args.state)?;
        if let Some(t) = args.temp {
            cfg.set_single_temperature(Some(t))?;
        } else if let Some(range) = &args.temp_range {
            cfg.temperatures = parse_temperature_range(range)?;
        } else if args.state.preset.is_none() {
            return Err(Error::InvalidConfig("sweep needs --temp-range, --temp or --preset".into()));
        }
        check_temperatures(&cfg.temperatures)?;
        cfg.settings = quad_settings(&args.quad, trunc_settings(&args.trunc, NegativitySettings::default())?)?;
        cfg.check_quadrature()?;
        Ok(cfg)
    }

    fn set_single_temperature(&mut self, t: Option<f64>) -> Result<()> {
        if let Some(t) = t {
            self.temperatures = vec![t];
        } else if self.temperatures.len() != 1 {
            // a range preset outside a sweep falls back to its coldest point
            self.temperatures = vec![DEFAULT_TEMPERATURE_K];
        }
        check_temperatures(&self.temperatures)
    }

    fn check_quadrature(&self) -> Result<()> {
        let spec = self.spec()?;
        let min = QuadratureSpec::minimum_half_width(&spec);
        if let Some(l) = self.settings.half_width {
            if !(l.is_finite() && l >= min) {
                return Err(Error::InvalidConfig(format!(
                    "quadrature half-width {l} below sqrt(2)|alpha| + 4 = {min:.4}"
                )));
            }
        }
        if let Some(n) = self.settings.nodes {
            if n < QuadratureSpec::MIN_NODES {
                return Err(Error::InvalidConfig(format!(
                    "quadrature needs at least {} nodes per axis, got {n}",
                    QuadratureSpec::MIN_NODES
                )));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<BellCatSpec> {
        BellCatSpec::from_label(self.label, self.alpha)
    }

    /// Angular frequencies `2πf`.
    pub fn omegas(&self) -> (f64, f64) {
        (2.0 * PI * self.frequencies_hz[0], 2.0 * PI * self.frequencies_hz[1])
    }

    pub fn params(&self, temperature: f64) -> Result<ThermalParams> {
        let (w1, w2) = self.omegas();
        thermal_params(temperature, w1, w2)
    }

    /// The single temperature of a wigner or negativity run.
    pub fn temperature(&self) -> f64 {
        self.temperatures[0]
    }
}

fn check_temperatures(ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidConfig("empty temperature list".into()));
    }
    if let Some(&t) = ts.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidTemperature(t));
    }
    if ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("temperatures must be strictly increasing".into()));
    }
    Ok(())
}

fn trunc_settings(args: &TruncArgs, mut settings: NegativitySettings) -> Result<NegativitySettings> {
    settings.epsilon = args.epsilon;
    settings.caps = args.caps.as_deref().map(parse_caps).transpose()?;
    let (amp, th) = settings.caps.unwrap_or(([1, 1], [0, 0]));
    TruncationConfig::new(amp, th, args.epsilon)?;
    Ok(settings)
}

fn quad_settings(args: &QuadArgs, mut settings: NegativitySettings) -> Result<NegativitySettings> {
    settings.rule = args.quad_rule.into();
    settings.nodes = args.quad_nodes;
    settings.half_width = args.quad_half_width;
    Ok(settings)
}

pub fn parse_slice(s: &str) -> Result<(Coordinate, Coordinate)> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(Error::InvalidConfig(format!("slice '{s}' must name two coordinates, e.g. x1,x2")));
    };
    let (a, b) = (a.parse::<Coordinate>()?, b.parse::<Coordinate>()?);
    if a == b {
        return Err(Error::InvalidConfig(format!("slice '{s}' repeats a coordinate")));
    }
    Ok((a, b))
}

pub fn parse_caps(s: &str) -> Result<([usize; 2], [usize; 2])> {
    let bad = || Error::InvalidConfig(format!("caps '{s}' must be four integers AMP1,AMP2,THERMAL1,THERMAL2"));
    let v: Vec<usize> = s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    match v.as_slice() {
        &[a1, a2, t1, t2] => Ok(([a1, a2], [t1, t2])),
        _ => Err(bad()),
    }
}

pub fn parse_temperature_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("temperature range '{s}' must be START:END:COUNT"));
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, count] = parts.as_slice() else { return Err(bad()) };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let end: f64 = end.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 || (count > 1 && !(end > start)) {
        return Err(bad());
    }
    let ts = linear_temperatures(start, end, count);
    check_temperatures(&ts)?;
    Ok(ts)
}
