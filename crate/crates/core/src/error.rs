use thiserror::Error;

pub type Result<T, E = StaError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StaError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid too narrow: boundary amplitude {amplitude:.3e} for n = {n} exceeds {threshold:.0e}")]
    GridTooNarrow { n: usize, amplitude: f64, threshold: f64 },

    #[error("grid too coarse: n = {n} at omega = {omega} is not resolved below the Nyquist wavenumber")]
    GridTooCoarse { n: usize, omega: f64 },

    #[error("Fock index {n} exceeds the supported maximum {n_max}")]
    FockOutOfRange { n: usize, n_max: usize },

    #[error("wavefunctions live on different grids")]
    GridMismatch,

    #[error("wavefunction is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("scaling function vanishes or turns negative near t = {t}")]
    ScalingNotPositive { t: f64 },

    #[error("frequency is not positive at t = {t} (omega^2 = {omega_sq:.6e})")]
    NonPositiveFrequency { t: f64, omega_sq: f64 },

    #[error("Ermakov integration broke down at t = {t}: {reason}")]
    SolverFailure { t: f64, reason: String },

    #[error("quadrature did not converge (estimated error {error:.3e})")]
    QuadratureFailure { error: f64 },

    #[error("rescaled state leaves the grid: {lost:.3e} of the probability falls outside")]
    SupportLeavesGrid { lost: f64 },

    #[error("norm drift {drift:.3e} at step {step} (t = {t})")]
    NormDrift { step: usize, t: f64, drift: f64 },

    #[error("zero detuning: the Raman chain needs a far-detuned intermediate level")]
    ZeroDetuning,
}

impl StaError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        StaError::InvalidParameter { name, reason: reason.into() }
    }
}
