//! Log-factorials and associated Laguerre polynomials.
//!
//! Everything here is pure and allocation-light. The Wigner series evaluates
//! Laguerre polynomials at `x = 2 (x_i^2 + y_i^2) >= 0` only, so negative
//! arguments are allowed but never exercised by the crate itself.

use std::f64::consts::PI;
use std::sync::OnceLock;

const TABLE_LEN: usize = 1024;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // compensated running sum keeps the seam with the Stirling branch tight
        let mut t = [0.0; TABLE_LEN];
        let (mut sum, mut carry) = (0.0_f64, 0.0_f64);
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            let y = (k as f64).ln() - carry;
            let next = sum + y;
            carry = (next - sum) - y;
            sum = next;
            *slot = sum;
        }
        t
    })
}

/// `ln(n!)`.
///
/// Tabulated below 1024, Stirling series with four correction terms above
/// (truncation error below 1e-20 relative there).
pub fn ln_factorial(n: usize) -> f64 {
    if n < TABLE_LEN {
        return ln_factorial_table()[n];
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series
}

/// Associated Laguerre polynomial `L_n^m(x)` by upward recurrence in the degree.
pub fn laguerre_assoc(n: usize, m: usize, x: f64) -> f64 {
    let m = m as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + m - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + m - x) * cur - (k + m) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

const RESCALE_ABOVE: f64 = 1e150;

/// Normalized Laguerre functions
///
/// ```text
/// l_j(x) = sqrt(j! / (j + d)!) x^(d/2) e^(-x/2) L_j^d(x),   j = 0..=max_degree
/// ```
///
/// written into `out` (resized). These are the radial parts of the Fock-state
/// Wigner kernels and satisfy `|l_j| <= 1` for `x >= 0`, so they never overflow
/// where the bare polynomial would. The recurrence is run on a rescaled
/// mantissa so that a start value underflowing `f64` (very large `x`) does not
/// zero out the whole sequence.
pub fn normalized_laguerre_functions(order: usize, max_degree: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.resize(max_degree + 1, 0.0);
    let d = order as f64;
    if x == 0.0 && order > 0 {
        return;
    }
    let ln_start = if order == 0 {
        -0.5 * x
    } else {
        -0.5 * x + 0.5 * d * x.ln() - 0.5 * ln_factorial(order)
    };
    // value_j = mantissa_j * exp(log_scale)
    let mut log_scale = ln_start;
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = ln_start.exp();
    for j in 0..max_degree {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + d - x) * cur - (jf * (jf + d)).sqrt() * prev)
            / ((jf + 1.0) * (jf + 1.0 + d)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE || (cur != 0.0 && cur.abs() < 1.0 / RESCALE_ABOVE) {
            let s = cur.abs();
            prev /= s;
            cur /= s;
            log_scale += s.ln();
        }
        out[j + 1] = cur * log_scale.exp();
    }
}
