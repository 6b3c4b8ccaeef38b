//! Thermal density operator of the Bell-Cat states in a truncated two-mode
//! number basis.
//!
//! Two independent constructions are provided:
//!
//! * [`density_element`] / [`assemble_density_matrix`] sum the explicit
//!   six-index element formula
//!   `Σ c_{nm} c*_{n̄m̄} (…) q1^{n_th1} q2^{n_th2} |n_th1+n, n_th2+m⟩⟨n_th1+n̄, n_th2+m̄|`;
//! * [`assemble_density_operator`] builds `f` as a matrix from powers of the
//!   creation (shift) matrices and forms `f ρ_β f†` with the diagonal Gibbs
//!   matrix `ρ_β`.
//!
//! Entries with both indices inside the cutoff are exact in both routes, since
//! creation operators only raise the number; the trace deficit measures what
//! lies outside the block.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::special_fn::ln_factorial;
use crate::states::{bellcat_normalization, BellCatSpec, Sign};
use crate::tfd::{gibbs_weight, Mode, ThermalParams};
use crate::truncation::TruncationConfig;

/// Largest trace deficit accepted by the checked builders.
pub const MAX_TRACE_DEFICIT: f64 = 0.01;

/// Two-mode number state `|first, second⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockIndex {
    pub first: usize,
    pub second: usize,
}

impl FockIndex {
    pub fn new(first: usize, second: usize) -> Self {
        Self { first, second }
    }

    fn total(self) -> usize {
        self.first + self.second
    }
}

/// Summation indices of the element formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TermIndex {
    pub n: usize,
    pub m: usize,
    pub n_bar: usize,
    pub m_bar: usize,
    pub thermal1: usize,
    pub thermal2: usize,
}

impl TermIndex {
    /// Ket `|thermal1 + n, thermal2 + m⟩`.
    pub fn ket(&self) -> FockIndex {
        FockIndex::new(self.thermal1 + self.n, self.thermal2 + self.m)
    }

    /// Bra `⟨thermal1 + n̄, thermal2 + m̄|`.
    pub fn bra(&self) -> FockIndex {
        FockIndex::new(self.thermal1 + self.n_bar, self.thermal2 + self.m_bar)
    }

    pub fn within(&self, trunc: &TruncationConfig) -> bool {
        let [a1, a2] = trunc.amplitude_caps;
        let [t1, t2] = trunc.thermal_caps;
        self.n.max(self.n_bar) <= a1
            && self.m.max(self.m_bar) <= a2
            && self.thermal1 <= t1
            && self.thermal2 <= t2
    }
}

/// One density element together with the summed magnitude of the terms the
/// truncation caps dropped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityElement {
    pub value: C64,
    pub tail: f64,
}

/// Hermitian block of the density operator on `{|N1, N2⟩ : N1, N2 <= cutoff}`.
#[derive(Clone, Debug)]
pub struct TruncatedDensity {
    cutoff: usize,
    matrix: DMatrix<C64>,
    trace_deficit: f64,
}

impl TruncatedDensity {
    fn from_matrix(cutoff: usize, matrix: DMatrix<C64>) -> Self {
        let trace: f64 = matrix.diagonal().iter().map(|c| c.re).sum();
        Self { cutoff, matrix, trace_deficit: 1.0 - trace }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    /// Basis position of `|N1, N2⟩`.
    pub fn index(&self, a: FockIndex) -> usize {
        a.first * (self.cutoff + 1) + a.second
    }

    pub fn entry(&self, a: FockIndex, b: FockIndex) -> C64 {
        self.matrix[(self.index(a), self.index(b))]
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        1.0 - self.trace_deficit
    }

    pub fn trace_deficit(&self) -> f64 {
        self.trace_deficit
    }

    /// Largest `|ρ_AB - conj(ρ_BA)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let eig = self.matrix.clone().symmetric_eigen();
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &TruncatedDensity) -> f64 {
        assert_eq!(self.cutoff, other.cutoff, "cutoff mismatch");
        self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn check_trace(self) -> Result<Self> {
        if self.trace_deficit > MAX_TRACE_DEFICIT {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                deficit: self.trace_deficit,
                limit: MAX_TRACE_DEFICIT,
            });
        }
        Ok(self)
    }
}

/// Per-mode logarithmic pieces of the element formula.
struct ElementTerms {
    ln_prefactor: f64,
    ln_amp: [f64; 2],
    ln_one_minus_q: [f64; 2],
    ln_q: [f64; 2],
    arg: f64,
    k: Sign,
    parity: usize,
}

impl ElementTerms {
    fn new(spec: &BellCatSpec, params: &ThermalParams) -> Self {
        let one_minus = [Mode::One, Mode::Two].map(|m| params.one_minus_boltzmann(m));
        let ln_q = [Mode::One, Mode::Two].map(|m| -params.reduced_energy(m));
        let a = spec.alpha().norm();
        // e^{-2|α|^2} (1-q1)(1-q2) / (2 (1 ± e^{-4|α|^2})) times the two brackets' 2·2
        let n = bellcat_normalization(spec.alpha(), spec.sigma()).expect("validated spec");
        let ln_prefactor = 2.0 * n.ln() - 2.0 * a * a + one_minus[0].ln() + one_minus[1].ln() + 4.0_f64.ln();
        Self {
            ln_prefactor,
            ln_amp: [a.ln(); 2],
            ln_one_minus_q: one_minus.map(f64::ln),
            ln_q,
            arg: spec.alpha().arg(),
            k: spec.k(),
            parity: spec.parity_bit(),
        }
    }

    /// Mode part of `ln |term|` for ket/bra amplitude indices and thermal index.
    fn ln_mode(&self, mode: usize, n: usize, n_bar: usize, th: usize) -> f64 {
        let thermal = if th == 0 { 0.0 } else { th as f64 * self.ln_q[mode] };
        (n + n_bar) as f64 * (self.ln_amp[mode] + 0.5 * self.ln_one_minus_q[mode])
            - ln_factorial(n)
            - ln_factorial(n_bar)
            - ln_factorial(th)
            + thermal
            + 0.5 * (ln_factorial(th + n) + ln_factorial(th + n_bar))
    }

    /// Common phase of all terms of the `(a, b)` element: `α^{Δ}` with
    /// `Δ = (n+m) - (n̄+m̄)` and `k^{m+m̄}`, both fixed by the indices.
    fn phase(&self, a: FockIndex, b: FockIndex) -> C64 {
        let delta = a.total() as f64 - b.total() as f64;
        let mut phi = delta * self.arg;
        if self.k == Sign::Minus && (a.second + b.second) % 2 == 1 {
            phi += PI;
        }
        C64::from_polar(1.0, phi)
    }

    fn compatible(&self, a: FockIndex, b: FockIndex) -> bool {
        (a.total() + b.total()) % 2 == 0
    }
}

/// Element `⟨a| ρ |b⟩` by direct summation of all term indices.
pub fn density_element(
    spec: &BellCatSpec,
    params: &ThermalParams,
    a: FockIndex,
    b: FockIndex,
    trunc: &TruncationConfig,
) -> Result<DensityElement> {
    trunc.validate()?;
    let terms = ElementTerms::new(spec, params);
    if !terms.compatible(a, b) {
        return Ok(DensityElement { value: C64::new(0.0, 0.0), tail: 0.0 });
    }
    let mut kept = 0.0;
    let mut dropped = 0.0;
    for thermal1 in 0..=a.first.min(b.first) {
        for thermal2 in 0..=a.second.min(b.second) {
            let t = TermIndex {
                n: a.first - thermal1,
                m: a.second - thermal2,
                n_bar: b.first - thermal1,
                m_bar: b.second - thermal2,
                thermal1,
                thermal2,
            };
            if (t.n + t.m) % 2 != terms.parity {
                continue;
            }
            let ln_mag = terms.ln_prefactor
                + terms.ln_mode(0, t.n, t.n_bar, thermal1)
                + terms.ln_mode(1, t.m, t.m_bar, thermal2);
            if t.within(trunc) {
                kept += ln_mag.exp();
            } else {
                dropped += ln_mag.exp();
            }
        }
    }
    Ok(DensityElement { value: terms.phase(a, b) * kept, tail: dropped })
}

/// Per-mode partial sums `Σ_{th ≡ r} exp(ln_mode)` for all `(A, B) <= cutoff`,
/// split into kept and dropped parts.
struct ModeTable {
    dim: usize,
    kept: Vec<[f64; 2]>,
    dropped: Vec<[f64; 2]>,
}

impl ModeTable {
    fn new(terms: &ElementTerms, mode: usize, cutoff: usize, trunc: &TruncationConfig) -> Self {
        let dim = cutoff + 1;
        let amp_cap = trunc.amplitude_caps[mode];
        let th_cap = trunc.thermal_caps[mode];
        let mut kept = vec![[0.0; 2]; dim * dim];
        let mut dropped = vec![[0.0; 2]; dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let slot = a * dim + b;
                for th in 0..=a.min(b) {
                    let (n, n_bar) = (a - th, b - th);
                    let v = terms.ln_mode(mode, n, n_bar, th).exp();
                    if n.max(n_bar) <= amp_cap && th <= th_cap {
                        kept[slot][th % 2] += v;
                    } else {
                        dropped[slot][th % 2] += v;
                    }
                }
            }
        }
        Self { dim, kept, dropped }
    }
}

/// Element-formula matrix without the trace check.
pub fn assemble_density_matrix(
    spec: &BellCatSpec,
    params: &ThermalParams,
    cutoff: usize,
    trunc: &TruncationConfig,
) -> Result<TruncatedDensity> {
    trunc.validate()?;
    let terms = ElementTerms::new(spec, params);
    let t1 = ModeTable::new(&terms, 0, cutoff, trunc);
    let t2 = ModeTable::new(&terms, 1, cutoff, trunc);
    let dim = t1.dim;
    let pref = terms.ln_prefactor.exp();
    let total = dim * dim;
    let mut matrix = DMatrix::<C64>::zeros(total, total);
    for a1 in 0..dim {
        for a2 in 0..dim {
            let a = FockIndex::new(a1, a2);
            for b1 in 0..dim {
                for b2 in 0..dim {
                    let b = FockIndex::new(b1, b2);
                    if !terms.compatible(a, b) {
                        continue;
                    }
                    let m1 = &t1.kept[a1 * dim + b1];
                    let m2 = &t2.kept[a2 * dim + b2];
                    // thermal2 parity is fixed by n + m ≡ p
                    let sum: f64 = (0..2)
                        .map(|r| m1[r] * m2[(a1 + a2 + terms.parity + r) % 2])
                        .sum();
                    matrix[(a1 * dim + a2, b1 * dim + b2)] = terms.phase(a, b) * (pref * sum);
                }
            }
        }
    }
    debug_assert!(t1.dropped.len() == t2.dropped.len());
    Ok(TruncatedDensity::from_matrix(cutoff, matrix))
}

/// Element-formula matrix; errors when the block misses more than 1% of the trace.
pub fn build_density_matrix(
    spec: &BellCatSpec,
    params: &ThermalParams,
    cutoff: usize,
    trunc: &TruncationConfig,
) -> Result<TruncatedDensity> {
    assemble_density_matrix(spec, params, cutoff, trunc)?.check_trace()
}

/// Largest dropped-term magnitude over the block, relative to the prefactor.
pub fn matrix_truncation_tail(
    spec: &BellCatSpec,
    params: &ThermalParams,
    cutoff: usize,
    trunc: &TruncationConfig,
) -> f64 {
    let terms = ElementTerms::new(spec, params);
    let t1 = ModeTable::new(&terms, 0, cutoff, trunc);
    let t2 = ModeTable::new(&terms, 1, cutoff, trunc);
    let dim = t1.dim;
    let pref = terms.ln_prefactor.exp();
    let mut worst: f64 = 0.0;
    for ab1 in 0..dim * dim {
        for ab2 in 0..dim * dim {
            let full: f64 = (0..2)
                .flat_map(|r| (0..2).map(move |s| (r, s)))
                .map(|(r, s)| {
                    (t1.kept[ab1][r] + t1.dropped[ab1][r]) * (t2.kept[ab2][s] + t2.dropped[ab2][s])
                        - t1.kept[ab1][r] * t2.kept[ab2][s]
                })
                .sum();
            worst = worst.max(pref * full);
        }
    }
    worst
}

/// Creation operator on `{|0⟩ … |cutoff⟩}`: `a†|n⟩ = sqrt(n+1) |n+1⟩`.
pub fn creation_matrix(cutoff: usize) -> DMatrix<f64> {
    let dim = cutoff + 1;
    DMatrix::from_fn(dim, dim, |i, j| if i == j + 1 { (i as f64).sqrt() } else { 0.0 })
}

/// `(a†)^n |start⟩` for `n = 0..=cutoff - start`, by repeated shift-matrix
/// application.
fn raised_states(shift: &DMatrix<f64>, start: usize) -> Vec<DVector<f64>> {
    let dim = shift.nrows();
    let mut v = DVector::<f64>::zeros(dim);
    v[start] = 1.0;
    let mut out = Vec::with_capacity(dim - start);
    for _ in start..dim {
        let next = shift * &v;
        out.push(std::mem::replace(&mut v, next));
    }
    out
}

/// `Σ_n coef_n (a†)^n / u^n` applied to `|start⟩`, split by the parity of `n`.
/// `coef_n = a^n / n!`.
fn parity_split_column(shift: &DMatrix<f64>, start: usize, amp: C64, u: f64) -> [DVector<C64>; 2] {
    let dim = shift.nrows();
    let mut out = [DVector::<C64>::zeros(dim), DVector::<C64>::zeros(dim)];
    let step = amp / u;
    let mut coef = C64::new(1.0, 0.0);
    for (n, v) in raised_states(shift, start).into_iter().enumerate() {
        if n > 0 {
            coef *= step / n as f64;
        }
        out[n % 2] += v.map(|x| coef * x);
    }
    out
}

/// `F W F†` for diagonal real `W`, via four real products.
fn hermitian_sandwich(f: &DMatrix<C64>, w: &[f64], g: &DMatrix<C64>) -> DMatrix<C64> {
    let scale = |m: DMatrix<f64>| {
        let mut m = m;
        for (j, mut col) in m.column_iter_mut().enumerate() {
            col *= w[j];
        }
        m
    };
    let fr = f.map(|c| c.re);
    let fi = f.map(|c| c.im);
    let gr = g.map(|c| c.re);
    let gi = g.map(|c| c.im);
    let frw = scale(fr);
    let fiw = scale(fi);
    let re = &frw * gr.transpose() + &fiw * gi.transpose();
    let im = &fiw * gr.transpose() - &frw * gi.transpose();
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

/// Operator-route matrix `f ρ_β f†` without the trace check.
pub fn assemble_density_operator(
    spec: &BellCatSpec,
    params: &ThermalParams,
    cutoff: usize,
) -> Result<TruncatedDensity> {
    let norm = bellcat_normalization(spec.alpha(), spec.sigma())?;
    let dim = cutoff + 1;
    let total = dim * dim;
    let shift = creation_matrix(cutoff);
    let u = [params.u(Mode::One), params.u(Mode::Two)];
    // overall N± e^{-|α|^2} times the bracket value 2
    let c0 = 2.0 * norm * (-spec.alpha().norm_sqr()).exp();

    // columns of the single-mode pieces, indexed by start level
    let cols1: Vec<[DVector<C64>; 2]> =
        (0..dim).map(|s| parity_split_column(&shift, s, spec.mode_alpha(0), u[0])).collect();
    let cols2: Vec<[DVector<C64>; 2]> =
        (0..dim).map(|s| parity_split_column(&shift, s, spec.mode_alpha(1), u[1])).collect();

    // f as a dense two-mode matrix: f|N1,N2⟩ = c0 Σ_s F1_s|N1⟩ ⊗ F2_{p-s}|N2⟩
    let mut f = DMatrix::<C64>::zeros(total, total);
    for start1 in 0..dim {
        for start2 in 0..dim {
            let col = start1 * dim + start2;
            for s in 0..2 {
                let v1 = &cols1[start1][s];
                let v2 = &cols2[start2][spec.partner_class(s)];
                for i in start1..dim {
                    if v1[i] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for j in start2..dim {
                        f[(i * dim + j, col)] += c0 * v1[i] * v2[j];
                    }
                }
            }
        }
    }

    let weights: Vec<f64> = (0..total)
        .map(|idx| {
            gibbs_weight(params, Mode::One, idx / dim) * gibbs_weight(params, Mode::Two, idx % dim)
        })
        .collect();
    let rho = hermitian_sandwich(&f, &weights, &f);
    Ok(TruncatedDensity::from_matrix(cutoff, rho))
}

/// Operator-route matrix; errors when the block misses more than 1% of the trace.
pub fn build_density_operator(
    spec: &BellCatSpec,
    params: &ThermalParams,
    cutoff: usize,
) -> Result<TruncatedDensity> {
    assemble_density_operator(spec, params, cutoff)?.check_trace()
}

/// The operator-route density written as `Σ_{s,s̄} A_{s s̄} ⊗ B_{t(s) t(s̄)}`.
///
/// `f` splits by the parity class `s` of the mode-1 creation power into
/// `c0 Σ_s F1_s ⊗ F2_{t(s)}`, and `ρ_β` is a product state, so
/// `f ρ_β f†` is a sum of four Kronecker products of single-mode matrices
/// `F_s ρ_β,i F_s̄†`. This keeps large cutoffs affordable.
#[derive(Clone, Debug)]
pub struct FactorizedDensity {
    cutoff: usize,
    prefactor: f64,
    partner: [usize; 2],
    mode1: [[DMatrix<C64>; 2]; 2],
    mode2: [[DMatrix<C64>; 2]; 2],
}

impl FactorizedDensity {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `(prefactor, A_{s s̄}, B_{t(s) t(s̄)})` for the four parity pairs.
    pub fn blocks(&self) -> impl Iterator<Item = (f64, &DMatrix<C64>, &DMatrix<C64>)> {
        (0..2).flat_map(move |s| {
            (0..2).map(move |sb| {
                (self.prefactor, &self.mode1[s][sb], &self.mode2[self.partner[s]][self.partner[sb]])
            })
        })
    }

    pub fn trace(&self) -> f64 {
        self.blocks().map(|(p, a, b)| p * (a.trace() * b.trace()).re).sum()
    }

    pub fn trace_deficit(&self) -> f64 {
        1.0 - self.trace()
    }

    /// Dense two-mode matrix in the ordering of [`TruncatedDensity`].
    pub fn to_dense(&self) -> TruncatedDensity {
        let dim = self.cutoff + 1;
        let total = dim * dim;
        let mut m = DMatrix::<C64>::zeros(total, total);
        for (p, a, b) in self.blocks() {
            m += a.kronecker(b) * C64::new(p, 0.0);
        }
        TruncatedDensity::from_matrix(self.cutoff, m)
    }
}

pub fn factorized_density_operator(
    spec: &BellCatSpec,
    params: &ThermalParams,
    cutoff: usize,
) -> Result<FactorizedDensity> {
    let norm = bellcat_normalization(spec.alpha(), spec.sigma())?;
    let dim = cutoff + 1;
    let shift = creation_matrix(cutoff);
    let mode_blocks = |mode: Mode| -> [[DMatrix<C64>; 2]; 2] {
        let i = mode.index();
        let mut f = [DMatrix::<C64>::zeros(dim, dim), DMatrix::<C64>::zeros(dim, dim)];
        for start in 0..dim {
            let [even, odd] = parity_split_column(&shift, start, spec.mode_alpha(i), params.u(mode));
            f[0].set_column(start, &even);
            f[1].set_column(start, &odd);
        }
        let w: Vec<f64> = (0..dim).map(|n| gibbs_weight(params, mode, n)).collect();
        [0, 1].map(|s| [0, 1].map(|sb| hermitian_sandwich(&f[s], &w, &f[sb])))
    };
    let c0 = 2.0 * norm * (-spec.alpha().norm_sqr()).exp();
    Ok(FactorizedDensity {
        cutoff,
        prefactor: c0 * c0,
        partner: [spec.partner_class(0), spec.partner_class(1)],
        mode1: mode_blocks(Mode::One),
        mode2: mode_blocks(Mode::Two),
    })
}

/// Smallest cutoff (growing geometrically from `start`) whose factorized
/// trace deficit is below `tol`.
pub fn factorized_density_with_deficit(
    spec: &BellCatSpec,
    params: &ThermalParams,
    start: usize,
    tol: f64,
) -> Result<FactorizedDensity> {
    let mut cutoff = start.max(4);
    loop {
        let rho = factorized_density_operator(spec, params, cutoff)?;
        if rho.trace_deficit() < tol {
            return Ok(rho);
        }
        if cutoff > 600 {
            return Err(Error::CutoffTooSmall { cutoff, deficit: rho.trace_deficit(), limit: tol });
        }
        cutoff = cutoff * 5 / 4 + 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{fock_coefficients, BellCatLabel};
    use crate::tfd::thermal_params;

    const OMEGA: f64 = 2.0 * PI * 5.5e9;

    fn spec(label: BellCatLabel, re: f64, im: f64) -> BellCatSpec {
        BellCatSpec::from_label(label, C64::new(re, im)).unwrap()
    }

    #[test]
    fn vacuum_element_at_zero_temperature() {
        let s = spec(BellCatLabel::PhiPlus, 1.0, 0.0);
        let p = thermal_params(0.0, OMEGA, OMEGA).unwrap();
        let t = TruncationConfig::auto(&s, &p).unwrap();
        let e = density_element(&s, &p, FockIndex::new(0, 0), FockIndex::new(0, 0), &t).unwrap();
        let n = bellcat_normalization(C64::new(1.0, 0.0), Sign::Plus).unwrap();
        let expect = 4.0 * n * n * (-2.0_f64).exp();
        assert!((e.value - C64::new(expect, 0.0)).norm() < 1e-15);
        assert_eq!(e.tail, 0.0);
    }

    #[test]
    fn odd_total_difference_is_exactly_zero() {
        let s = spec(BellCatLabel::PsiMinus, 1.0, 1.0);
        let p = thermal_params(0.7, OMEGA, OMEGA).unwrap();
        let t = TruncationConfig::auto(&s, &p).unwrap();
        let e = density_element(&s, &p, FockIndex::new(0, 0), FockIndex::new(1, 0), &t).unwrap();
        assert_eq!(e.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn zero_temperature_is_the_pure_state() {
        let s = spec(BellCatLabel::PhiMinus, 1.0, 0.0);
        let p = thermal_params(0.0, OMEGA, OMEGA).unwrap();
        let t = TruncationConfig::auto(&s, &p).unwrap();
        let rho = build_density_matrix(&s, &p, 20, &t).unwrap();
        assert!(rho.trace_deficit().abs() < 1e-10);
        let c = fock_coefficients(&s, 20).unwrap();
        let c = c.as_slice();
        let mut worst: f64 = 0.0;
        for i in 0..c.len() {
            for j in 0..c.len() {
                worst = worst.max((rho.matrix()[(i, j)] - c[i] * c[j].conj()).norm());
            }
        }
        assert!(worst < 1e-14, "{worst}");
    }

    #[test]
    fn operator_route_at_zero_temperature_is_the_pure_state() {
        let s = spec(BellCatLabel::PsiPlus, 0.6, -0.8);
        let p = thermal_params(0.0, OMEGA, OMEGA).unwrap();
        let rho = build_density_operator(&s, &p, 14).unwrap();
        let c = fock_coefficients(&s, 14).unwrap();
        let c = c.as_slice();
        for i in 0..c.len() {
            for j in 0..c.len() {
                assert!((rho.matrix()[(i, j)] - c[i] * c[j].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn element_and_matrix_agree() {
        let s = spec(BellCatLabel::PsiMinus, 1.0, 0.0);
        let p = thermal_params(0.5, OMEGA, OMEGA).unwrap();
        let t = TruncationConfig::auto(&s, &p).unwrap();
        let rho = assemble_density_matrix(&s, &p, 8, &t).unwrap();
        for (a, b) in [((1, 0), (1, 0)), ((3, 2), (1, 2)), ((5, 4), (8, 7)), ((0, 1), (2, 1))] {
            let a = FockIndex::new(a.0, a.1);
            let b = FockIndex::new(b.0, b.1);
            let e = density_element(&s, &p, a, b, &t).unwrap();
            assert!((e.value - rho.entry(a, b)).norm() < 1e-15);
        }
    }

    #[test]
    fn both_routes_agree_at_ln2() {
        let s = spec(BellCatLabel::PhiPlus, 1.0, 0.0);
        let t = crate::tfd::HBAR * OMEGA / (crate::tfd::K_B * std::f64::consts::LN_2);
        let p = thermal_params(t, OMEGA, OMEGA).unwrap();
        let trunc = TruncationConfig::auto(&s, &p).unwrap();
        let direct = assemble_density_matrix(&s, &p, 16, &trunc).unwrap();
        let op = assemble_density_operator(&s, &p, 16).unwrap();
        assert!(direct.max_abs_diff(&op) < 1e-12);
        assert!(op.hermiticity_error() < 1e-14);
        assert!(op.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn factorized_form_matches_dense_operator() {
        let s = spec(BellCatLabel::PsiMinus, 1.0, 1.0);
        let p = thermal_params(0.4, OMEGA, OMEGA).unwrap();
        let dense = assemble_density_operator(&s, &p, 10).unwrap();
        let fact = factorized_density_operator(&s, &p, 10).unwrap();
        assert!(fact.to_dense().max_abs_diff(&dense) < 1e-14);
        assert!((fact.trace() - dense.trace()).abs() < 1e-13);
    }

    #[test]
    fn small_cutoff_is_rejected() {
        let s = spec(BellCatLabel::PhiMinus, 2.0, 0.0);
        let p = thermal_params(1.0, OMEGA, OMEGA).unwrap();
        assert!(matches!(build_density_operator(&s, &p, 8), Err(Error::CutoffTooSmall { .. })));
    }

    #[test]
    fn caps_below_block_report_a_tail() {
        let s = spec(BellCatLabel::PhiMinus, 1.0, 0.0);
        let p = thermal_params(1.0, OMEGA, OMEGA).unwrap();
        let t = TruncationConfig::new([3, 3], [2, 2], 1e-3).unwrap();
        let e = density_element(&s, &p, FockIndex::new(5, 4), FockIndex::new(5, 4), &t).unwrap();
        assert!(e.tail > 0.0);
        assert!(matrix_truncation_tail(&s, &p, 6, &t) > 0.0);
    }
}
