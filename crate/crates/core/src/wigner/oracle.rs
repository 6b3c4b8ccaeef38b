//! Independent evaluation of `W̃` straight from the Wigner transform
//!
//! ```text
//! W̃(x, y) = (1/2π) ∫ du e^{i u y} ⟨x − u/2| ρ |x + u/2⟩
//! ```
//!
//! applied to the operator-route density in the number basis. Each basis
//! projector `|a⟩⟨b|` contributes a kernel `K(a, b; x, y)` integrated
//! numerically with Hermite-function wavefunctions; no Laguerre closed form
//! is involved.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{checked_real, PhasePoint};
use crate::density::{factorized_density_with_deficit, FactorizedDensity};
use crate::error::{Error, Result};
use crate::states::{default_fock_cutoff, BellCatSpec};
use crate::tfd::{Mode, ThermalParams};

/// Refinement stops once no kernel entry moves by more than this.
pub const KERNEL_TOLERANCE: f64 = 1e-10;
const MAX_LEVELS: usize = 14;
const START_INTERVALS: usize = 64;
/// Trace deficit targeted by [`oracle_cutoff`].
pub const ORACLE_TRACE_DEFICIT: f64 = 1e-11;

/// Normalized oscillator eigenfunctions `ψ_0(x) … ψ_max(x)` by the two-term
/// recurrence `ψ_{n+1} = sqrt(2/(n+1)) x ψ_n − sqrt(n/(n+1)) ψ_{n−1}`.
pub fn hermite_functions(max: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() > max);
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if max == 0 {
        return;
    }
    out[1] = 2.0_f64.sqrt() * x * out[0];
    for n in 1..max {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Real and imaginary partial sums over a set of nodes `u`:
/// `Σ_u w_u e^{i u y} ψ_a(x − u/2) ψ_b(x + u/2)`.
fn kernel_sums(max: usize, x: f64, y: f64, nodes: &[f64], weight: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = max + 1;
    let cols = nodes.len();
    let mut minus = DMatrix::<f64>::zeros(dim, cols);
    let mut plus_c = DMatrix::<f64>::zeros(dim, cols);
    let mut plus_s = DMatrix::<f64>::zeros(dim, cols);
    let mut buf = vec![0.0; dim];
    for (c, &u) in nodes.iter().enumerate() {
        hermite_functions(max, x - 0.5 * u, &mut buf);
        minus.column_mut(c).copy_from_slice(&buf);
        hermite_functions(max, x + 0.5 * u, &mut buf);
        let (sin, cos) = (u * y).sin_cos();
        for (a, &v) in buf.iter().enumerate() {
            plus_c[(a, c)] = weight * cos * v;
            plus_s[(a, c)] = weight * sin * v;
        }
    }
    (&minus * plus_c.transpose(), &minus * plus_s.transpose())
}

/// Single-mode kernel matrix `K(a, b; x, y)` for `a, b <= max`, by nested
/// trapezoid refinement on `u ∈ [−V, V]`, `V = 2 (sqrt(2 max + 1) + |x|) + 10`.
pub fn kernel_matrix(max: usize, x: f64, y: f64) -> Result<DMatrix<C64>> {
    let half = 2.0 * ((2.0 * max as f64 + 1.0).sqrt() + x.abs()) + 10.0;
    let mut intervals = START_INTERVALS;
    let mut h = 2.0 * half / intervals as f64;
    let nodes: Vec<f64> = (0..=intervals).map(|i| -half + i as f64 * h).collect();
    // endpoints carry half weight but the integrand vanishes there anyway
    let (mut re, mut im) = kernel_sums(max, x, y, &nodes, 1.0);
    let mut change = f64::INFINITY;
    for _ in 0..MAX_LEVELS {
        let mid: Vec<f64> = (0..intervals).map(|i| -half + (i as f64 + 0.5) * h).collect();
        let (mre, mim) = kernel_sums(max, x, y, &mid, 1.0);
        let old = (re.clone() * h, im.clone() * h);
        re += mre;
        im += mim;
        intervals *= 2;
        h *= 0.5;
        let new = (&re * h, &im * h);
        change = (&new.0 - &old.0).amax().max((&new.1 - &old.1).amax()) / (2.0 * PI);
        if change < KERNEL_TOLERANCE {
            let scale = h / (2.0 * PI);
            return Ok(DMatrix::from_fn(max + 1, max + 1, |a, b| C64::new(re[(a, b)], im[(a, b)]) * scale));
        }
    }
    Err(Error::QuadratureNonConvergence { levels: MAX_LEVELS, change })
}

/// Cutoff used by the oracle: grown from the default coherent cutoff until
/// the truncated density misses less than [`ORACLE_TRACE_DEFICIT`].
pub fn oracle_cutoff(spec: &BellCatSpec, params: &ThermalParams) -> Result<usize> {
    Ok(OracleEvaluator::new(spec, params)?.cutoff())
}

/// Operator-route density held for repeated oracle evaluations.
#[derive(Clone, Debug)]
pub struct OracleEvaluator {
    density: FactorizedDensity,
}

impl OracleEvaluator {
    /// Density with the adaptive cutoff of [`oracle_cutoff`].
    pub fn new(spec: &BellCatSpec, params: &ThermalParams) -> Result<Self> {
        let start = default_fock_cutoff(spec.alpha());
        Ok(Self { density: factorized_density_with_deficit(spec, params, start, ORACLE_TRACE_DEFICIT)? })
    }

    /// Density at a fixed cutoff; no trace requirement.
    pub fn with_cutoff(spec: &BellCatSpec, params: &ThermalParams, cutoff: usize) -> Result<Self> {
        Ok(Self { density: crate::density::factorized_density_operator(spec, params, cutoff)? })
    }

    pub fn cutoff(&self) -> usize {
        self.density.cutoff()
    }

    pub fn trace_deficit(&self) -> f64 {
        self.density.trace_deficit()
    }

    pub fn evaluate(&self, pt: &PhasePoint) -> Result<f64> {
        let max = self.density.cutoff();
        let (x1, y1) = pt.mode(Mode::One);
        let (x2, y2) = pt.mode(Mode::Two);
        let k1 = kernel_matrix(max, x1, y1)?;
        let k2 = kernel_matrix(max, x2, y2)?;
        let mut total = C64::new(0.0, 0.0);
        for (p, a, b) in self.density.blocks() {
            let g1: C64 = a.iter().zip(k1.iter()).map(|(r, k)| r * k).sum();
            let g2: C64 = b.iter().zip(k2.iter()).map(|(r, k)| r * k).sum();
            total += g1 * g2 * p;
        }
        checked_real(total)
    }
}

/// `W̃` at one point from the Wigner transform of the density operator
/// truncated at `cutoff`.
pub fn wigner_point_oracle(
    spec: &BellCatSpec,
    params: &ThermalParams,
    pt: PhasePoint,
    cutoff: usize,
) -> Result<f64> {
    OracleEvaluator::with_cutoff(spec, params, cutoff)?.evaluate(&pt)
}
