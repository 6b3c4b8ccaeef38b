use thiserror::Error;

use crate::negativity::NegativityResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `sigma = -1` with a vanishing amplitude is the null vector.
    #[error("degenerate state: odd superposition with |alpha| = 0 has zero norm")]
    DegenerateState,

    #[error("invalid temperature {0} K (must be finite and >= 0)")]
    InvalidTemperature(f64),

    #[error("invalid angular frequency {0} rad/s (must be finite and > 0)")]
    InvalidFrequency(f64),

    #[error("Fock cutoff {cutoff} too small: trace deficit {deficit:.3e} exceeds {limit:.1e}")]
    CutoffTooSmall { cutoff: usize, deficit: f64, limit: f64 },

    #[error("series truncation failed: {0}")]
    TruncationFailure(String),

    #[error(
        "imaginary residue {imag:.3e} at real part {real:.3e} exceeds 1e-9 (1 + |re|): \
         inconsistent series convention"
    )]
    ImaginaryResidue { real: f64, imag: f64 },

    #[error("kernel quadrature did not converge after {levels} refinements (last change {change:.3e})")]
    QuadratureNonConvergence { levels: usize, change: f64 },

    #[error("normalization check failed: I+ - I- = {:.6} (|x - 1| > 0.01)", .0.norm_check)]
    NormalizationFailure(Box<NegativityResult>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
