//! Independent numerical ground truth for the closed forms.
//!
//! Nothing in here reuses a closed-form expression from the rest of the
//! crate. The amplitude equations are integrated with an adaptive
//! Runge-Kutta scheme, dephasing is sampled directly as Wiener phase paths,
//! the averaged linear systems are solved with a dense matrix exponential,
//! secular roots come from companion matrices, and spectra are obtained by
//! brute-force quadrature of the correlation kernels.

mod averaged;
mod ode;
mod roots;
mod spectrum;
mod stochastic;

pub use averaged::{exact_moments_linear_system, exact_one_time_moments};
pub use ode::{integrate, integrate_coherent_ode, OdeOptions, ODE_TOLERANCE};
pub use roots::{secular_polynomial, secular_roots_exact};
pub use spectrum::{spectrum_from_kernel, KernelSpectrum, MIN_KERNEL_SPAN_OVER_K};
pub use stochastic::{
    check_monte_carlo_step, monte_carlo_moments, sample_phase_path, sample_phase_path_stream,
    simulate_chunk, trajectory_rng, MonteCarloAccumulator, MonteCarloEstimate, PhasePath,
    MC_CHUNK,
};
