//! Thermofield-dynamics thermal parameters for two bosonic modes.
//!
//! The Bogoliubov angle enters only through `u = cosh θ = (1 - e^{-βħω})^{-1/2}`
//! and `v = sinh θ = e^{-βħω/2} u`. The Boltzmann ratio `e^{-βħω}` is computed
//! once here and reused everywhere downstream.

use serde::Serialize;

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;

/// One of the two oscillator modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermalParams {
    temperature: f64,
    omega: [f64; 2],
    /// `1/(k_B T)`; `None` is the exact zero-temperature state.
    beta: Option<f64>,
    reduced_energy: [f64; 2],
    boltzmann: [f64; 2],
    u: [f64; 2],
    v: [f64; 2],
    z: f64,
}

/// Builds the thermal parameters at temperature `t` (kelvin) for mode angular
/// frequencies `omega1`, `omega2` (rad/s). `t == 0` is handled exactly.
pub fn thermal_params(t: f64, omega1: f64, omega2: f64) -> Result<ThermalParams> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidTemperature(t));
    }
    for w in [omega1, omega2] {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::InvalidFrequency(w));
        }
    }
    let omega = [omega1, omega2];
    if t == 0.0 {
        return Ok(ThermalParams {
            temperature: 0.0,
            omega,
            beta: None,
            reduced_energy: [f64::INFINITY; 2],
            boltzmann: [0.0; 2],
            u: [1.0; 2],
            v: [0.0; 2],
            z: 1.0,
        });
    }
    let beta = 1.0 / (K_B * t);
    let reduced_energy = omega.map(|w| HBAR * w * beta);
    let boltzmann = reduced_energy.map(|x| (-x).exp());
    // 1 - e^{-x} without cancellation for small x
    let one_minus = reduced_energy.map(|x| -(-x).exp_m1());
    let u = one_minus.map(|s| s.sqrt().recip());
    let v = [0, 1].map(|i| (-0.5 * reduced_energy[i]).exp() * u[i]);
    Ok(ThermalParams {
        temperature: t,
        omega,
        beta: Some(beta),
        reduced_energy,
        boltzmann,
        u,
        v,
        z: 1.0 / (one_minus[0] * one_minus[1]),
    })
}

impl ThermalParams {
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_none()
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn omega(&self, mode: Mode) -> f64 {
        self.omega[mode.index()]
    }

    /// `βħω`; infinite at zero temperature.
    pub fn reduced_energy(&self, mode: Mode) -> f64 {
        self.reduced_energy[mode.index()]
    }

    /// `e^{-βħω}`, exactly 0 at zero temperature.
    pub fn boltzmann(&self, mode: Mode) -> f64 {
        self.boltzmann[mode.index()]
    }

    /// `1 - e^{-βħω}`, computed without cancellation.
    pub fn one_minus_boltzmann(&self, mode: Mode) -> f64 {
        match self.beta {
            None => 1.0,
            Some(_) => -(-self.reduced_energy(mode)).exp_m1(),
        }
    }

    pub fn u(&self, mode: Mode) -> f64 {
        self.u[mode.index()]
    }

    pub fn v(&self, mode: Mode) -> f64 {
        self.v[mode.index()]
    }

    /// Partition function `Π_i (1 - e^{-βħω_i})^{-1}`.
    pub fn partition_function(&self) -> f64 {
        self.z
    }

    /// Mean thermal occupation `v^2` of a mode.
    pub fn mean_occupation(&self, mode: Mode) -> f64 {
        let v = self.v(mode);
        v * v
    }

    /// `ln e^{-βħω}`, i.e. `-βħω`; `-inf` at zero temperature.
    pub(crate) fn ln_boltzmann(&self, mode: Mode) -> f64 {
        -self.reduced_energy(mode)
    }
}

/// Diagonal thermal-vacuum occupation `(1 - e^{-βħω}) e^{-n βħω}` of level `n`.
pub fn gibbs_weight(params: &ThermalParams, mode: Mode, n: usize) -> f64 {
    if params.is_zero_temperature() {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    params.one_minus_boltzmann(mode) * (-(n as f64) * params.reduced_energy(mode)).exp()
}
