//! Two-dimensional slices of `W̃` through the factorized contraction.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use super::{checked_real, ModeFactors, PhasePoint, WignerEvaluator, RESIDUE_TOLERANCE};
use crate::error::{Error, Result};
use crate::tfd::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Coordinate {
    X1,
    Y1,
    X2,
    Y2,
}

impl Coordinate {
    pub const ALL: [Coordinate; 4] = [Coordinate::X1, Coordinate::Y1, Coordinate::X2, Coordinate::Y2];

    pub fn mode(self) -> Mode {
        match self {
            Coordinate::X1 | Coordinate::Y1 => Mode::One,
            Coordinate::X2 | Coordinate::Y2 => Mode::Two,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Coordinate::X1 => "x1",
            Coordinate::Y1 => "y1",
            Coordinate::X2 => "x2",
            Coordinate::Y2 => "y2",
        }
    }

    pub fn get(self, pt: &PhasePoint) -> f64 {
        match self {
            Coordinate::X1 => pt.x1,
            Coordinate::Y1 => pt.y1,
            Coordinate::X2 => pt.x2,
            Coordinate::Y2 => pt.y2,
        }
    }

    pub fn set(self, pt: &mut PhasePoint, v: f64) {
        match self {
            Coordinate::X1 => pt.x1 = v,
            Coordinate::Y1 => pt.y1 = v,
            Coordinate::X2 => pt.x2 = v,
            Coordinate::Y2 => pt.y2 = v,
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Coordinate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Coordinate::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown coordinate '{s}'")))
    }
}

/// Uniform axis `min, …, max` with `count` samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        let axis = Self { min, max, count };
        axis.validate()?;
        Ok(axis)
    }

    /// `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, count: usize) -> Result<Self> {
        Self::new(-half_width, half_width, count)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidConfig(format!("axis needs at least 2 samples, got {}", self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::InvalidConfig(format!("axis range [{}, {}] is empty", self.min, self.max)));
        }
        Ok(())
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

/// Two varying coordinates and the fixed values of the other two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceSpec {
    pub axes: [(Coordinate, Axis); 2],
    /// Values of the coordinates that do not vary; the varying ones are ignored.
    pub fixed: PhasePoint,
}

impl SliceSpec {
    pub fn new(first: (Coordinate, Axis), second: (Coordinate, Axis), fixed: PhasePoint) -> Result<Self> {
        let slice = Self { axes: [first, second], fixed };
        slice.validate()?;
        Ok(slice)
    }

    /// `(x1, x2)` over `[-half_width, half_width]^2` at `y1 = y2 = 0`.
    pub fn default_slice(half_width: f64, count: usize) -> Result<Self> {
        let axis = Axis::symmetric(half_width, count)?;
        Self::new((Coordinate::X1, axis), (Coordinate::X2, axis), PhasePoint::origin())
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes[0].0 == self.axes[1].0 {
            return Err(Error::InvalidConfig("slice axes must be two different coordinates".into()));
        }
        self.axes[0].1.validate()?;
        self.axes[1].1.validate()?;
        if !self.fixed.is_finite() {
            return Err(Error::InvalidConfig("fixed coordinates must be finite".into()));
        }
        Ok(())
    }

    /// Phase point of grid cell `(i, j)`.
    pub fn point(&self, i: usize, j: usize) -> PhasePoint {
        let mut pt = self.fixed;
        self.axes[0].0.set(&mut pt, self.axes[0].1.value(i));
        self.axes[1].0.set(&mut pt, self.axes[1].1.value(j));
        pt
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axes[0].1.count, self.axes[1].1.count)
    }
}

/// Evaluation statistics of a grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GridStats {
    pub points: usize,
    /// Largest `|Im| / (1 + |Re|)` over the grid.
    pub max_residue: f64,
    pub tail_bound: f64,
}

/// Values of `W̃` on a slice, row-major with the first axis slowest.
#[derive(Clone, Debug, Serialize)]
pub struct WignerGrid {
    pub slice: SliceSpec,
    pub values: Vec<f64>,
    pub stats: GridStats,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.slice.axes[1].1.count + j]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(point, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (PhasePoint, f64)> + '_ {
        let (_, cols) = self.slice.shape();
        self.values.iter().enumerate().map(move |(k, &v)| (self.slice.point(k / cols, k % cols), v))
    }
}

/// Evaluates the slice. Mode factors are tabulated once per distinct mode
/// point; each cell is then a four-term contraction.
pub fn wigner_grid(eval: &WignerEvaluator, slice: &SliceSpec) -> Result<WignerGrid> {
    slice.validate()?;
    let (rows, cols) = slice.shape();
    let [(c0, _), (c1, _)] = slice.axes;

    // factor tables indexed by the grid row / column (or both)
    let table = |mode: Mode, along: &(dyn Fn(usize) -> PhasePoint + Sync), n: usize| -> Vec<ModeFactors> {
        (0..n)
            .into_par_iter()
            .map_init(Vec::new, |buf, i| {
                let (x, y) = along(i).mode(mode);
                eval.mode_factors_with(mode, x, y, buf)
            })
            .collect()
    };

    let cells: Vec<C64> = if c0.mode() != c1.mode() {
        let g0 = table(c0.mode(), &|i| slice.point(i, 0), rows);
        let g1 = table(c1.mode(), &|j| slice.point(0, j), cols);
        let (g1_tab, g2_tab, swap) = if c0.mode() == Mode::One { (g0, g1, false) } else { (g1, g0, true) };
        (0..rows * cols)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / cols, k % cols);
                let (a, b) = if swap { (j, i) } else { (i, j) };
                eval.combine(&g1_tab[a], &g2_tab[b])
            })
            .collect()
    } else {
        let varying = c0.mode();
        let other = if varying == Mode::One { Mode::Two } else { Mode::One };
        let (x, y) = slice.fixed.mode(other);
        let g_fixed = eval.mode_factors(other, x, y);
        let g_var = table(varying, &|k| slice.point(k / cols, k % cols), rows * cols);
        g_var
            .into_par_iter()
            .map(|g| if varying == Mode::One { eval.combine(&g, &g_fixed) } else { eval.combine(&g_fixed, &g) })
            .collect()
    };

    let mut values = Vec::with_capacity(cells.len());
    let mut max_residue: f64 = 0.0;
    for c in cells {
        values.push(checked_real(c)?);
        max_residue = max_residue.max(c.im.abs() / (1.0 + c.re.abs()));
    }
    debug_assert!(max_residue <= RESIDUE_TOLERANCE);
    Ok(WignerGrid {
        slice: *slice,
        values,
        stats: GridStats { points: rows * cols, max_residue, tail_bound: eval.tail_bound() },
    })
}
