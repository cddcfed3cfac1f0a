use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures of the numeric core. Values are reported as `f64` regardless of the
/// scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid crystal: {0}")]
    InvalidCrystal(String),
    #[error("negative wavenumber k = {0}")]
    NegativeWavenumber(f64),
    #[error("resonance pole: |omega_a - omega_k| = {gap:e} is below the guard {guard:e} (atomic frequency outside the gap?)")]
    ResonancePole { gap: f64, guard: f64 },
    #[error("invalid emitter pair: {0}")]
    InvalidPair(String),
    #[error("invalid integration interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(String),
    #[error("quadrature budget exhausted after {panels} panels (estimate {abs_error:e} for value {value:e})")]
    BudgetExhausted { value: f64, abs_error: f64, panels: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("abscissae must be strictly increasing (index {0})")]
    NonMonotonicAbscissa(usize),
    #[error("zero separation")]
    ZeroSeparation,
    #[error("atomic frequency resonant with the band edge (1 - alpha = {0:e})")]
    EdgeResonance(f64),
    #[error("alpha = {0} outside (0, 1)")]
    AlphaOutOfRange(f64),
    #[error("insufficient coverage: {0}")]
    InsufficientCoverage(String),
    #[error("no crossover: {0}")]
    NoCrossover(String),
}
