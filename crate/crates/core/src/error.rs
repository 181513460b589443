//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong while evaluating a closed form or an oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("time must be nonnegative and finite, got {0}")]
    NegativeTime(f64),
    #[error("initial state is not normalizable: |E|^2 + |C|^2 = {0}")]
    NotNormalizable(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("closed form holds at resonance only, got detuning {0} rad/s")]
    RequiresResonance(f64),
    #[error("total decay rate K is zero, the long-time limit is undefined")]
    NoDecay,
    #[error("denominator K - gamma_p * epsilon = {0} is not positive")]
    DegenerateDenominator(f64),
    #[error("negative radicand {value} in {name}")]
    NegativeRadicand { name: &'static str, value: f64 },
    #[error("{name} = {value} is not real (strong coupling required)")]
    NotReal { name: &'static str, value: num_complex::Complex64 },
    #[error("adaptive step size underflow at t = {t} s")]
    StepSizeUnderflow { t: f64 },
    #[error("step {dt:.3e} s is too coarse: {reason}")]
    StepTooCoarse { dt: f64, reason: &'static str },
    #[error("spectrum tails beyond the grid carry {fraction:.3e} of the integral (limit {limit:.1e})")]
    TailTooLarge { fraction: f64, limit: f64 },
    #[error("kernel grid reaches {reached} s, at least {required} s required")]
    KernelTooShort { reached: f64, required: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spectrum is already normalized")]
    AlreadyNormalized,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("matrix is singular")]
    Singular,
}
