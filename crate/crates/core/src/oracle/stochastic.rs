//! Monte Carlo over Wiener phase paths.
//!
//! The emitter frequency fluctuates with white noise of strength `2γp`,
//! so its accumulated phase `φ(t)` is a Wiener process with
//! `Var φ(t) = 2γp t`. Each trajectory solves
//!
//! ```text
//! dE/dt = -i g0 e^{iφ(t)} C - γE
//! dC/dt = -i g0 e^{-iφ(t)} E - κC
//! ```
//!
//! with `φ` held at its left-endpoint value on every step, using the exact
//! resonant propagator for the frozen phase.
//!
//! Trajectory `n` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
//! `n`, so every trajectory is fixed by `(seed, n)` alone. Trajectories are
//! summed in chunks of [`MC_CHUNK`] and the chunk sums are merged in chunk
//! order, which makes serial and parallel runs bit-identical.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::coherent::propagator;
use crate::grid::{check_time_grid, uniform_step};
use crate::params::SystemParams;
use crate::{Error, Result, C64};

/// Number of trajectories summed together before merging.
pub const MC_CHUNK: usize = 256;

/// Largest allowed rms phase increment per step, in radians.
const MAX_PHASE_STEP: f64 = 0.05;
/// Largest allowed `g0 Δt`.
const MAX_COUPLING_STEP: f64 = 0.02;

/// A sampled phase path on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePath {
    pub times: Vec<f64>,
    /// `φ(t)` in radians, `φ(0) = 0`.
    pub phi: Vec<f64>,
    pub seed: u64,
}

/// Random generator for trajectory `stream` of the run seeded by `seed`.
pub fn trajectory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_gamma_p(gamma_p: f64) -> Result<()> {
    if gamma_p >= 0.0 && gamma_p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "gamma_p",
            value: gamma_p,
            reason: "must be finite and nonnegative",
        })
    }
}

/// Phase path drawn from stream 0 of `seed`.
pub fn sample_phase_path(gamma_p: f64, grid: &[f64], seed: u64) -> Result<PhasePath> {
    sample_phase_path_stream(gamma_p, grid, seed, 0)
}

/// Phase path drawn from the given stream. Trajectory `n` of
/// [`monte_carlo_moments`] sees exactly the path of stream `n`.
pub fn sample_phase_path_stream(
    gamma_p: f64,
    grid: &[f64],
    seed: u64,
    stream: u64,
) -> Result<PhasePath> {
    check_gamma_p(gamma_p)?;
    let dt = if grid.len() == 1 { 0.0 } else { uniform_step(grid)? };
    let sigma = (2.0 * gamma_p * dt).sqrt();
    let mut rng = trajectory_rng(seed, stream);
    let mut phi = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    phi.push(acc);
    for _ in 1..grid.len() {
        let xi: f64 = rng.sample(StandardNormal);
        acc += sigma * xi;
        phi.push(acc);
    }
    Ok(PhasePath { times: grid.to_vec(), phi, seed })
}

/// Checks the step-resolution preconditions of [`monte_carlo_moments`].
pub fn check_monte_carlo_step(params: &SystemParams, dt: f64) -> Result<()> {
    if (2.0 * params.gamma_p() * dt).sqrt() > MAX_PHASE_STEP {
        return Err(Error::StepTooCoarse { dt, reason: "sqrt(2 gamma_p dt) exceeds 0.05 rad" });
    }
    if params.g0() * dt > MAX_COUPLING_STEP {
        return Err(Error::StepTooCoarse { dt, reason: "g0 dt exceeds 0.02" });
    }
    Ok(())
}

// Indices into the per-time statistics.
const RE_E: usize = 0;
const IM_E: usize = 1;
const RE_C: usize = 2;
const IM_C: usize = 3;
const ABS2_E: usize = 4;
const ABS2_C: usize = 5;
const RE_H: usize = 6;
const IM_H: usize = 7;
const NQ: usize = 8;

/// Running sums over trajectories, one row of [`NQ`] quantities per time.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloAccumulator {
    n: usize,
    sum: Vec<[f64; NQ]>,
    sum_sq: Vec<[f64; NQ]>,
}

impl MonteCarloAccumulator {
    pub fn new(n_times: usize) -> Self {
        Self { n: 0, sum: alloc::vec![[0.0; NQ]; n_times], sum_sq: alloc::vec![[0.0; NQ]; n_times] }
    }

    pub fn n_traj(&self) -> usize {
        self.n
    }

    fn record(&mut self, i: usize, e: C64, c: C64) {
        let h = e * c.conj();
        let q = [e.re, e.im, c.re, c.im, e.norm_sqr(), c.norm_sqr(), h.re, h.im];
        for ((s, s2), x) in self.sum[i].iter_mut().zip(self.sum_sq[i].iter_mut()).zip(q) {
            *s += x;
            *s2 += x * x;
        }
    }

    /// Adds another accumulator's sums to this one.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.sum.len() != self.sum.len() {
            return Err(Error::DimensionMismatch { expected: self.sum.len(), got: other.sum.len() });
        }
        self.n += other.n;
        for i in 0..self.sum.len() {
            for k in 0..NQ {
                self.sum[i][k] += other.sum[i][k];
                self.sum_sq[i][k] += other.sum_sq[i][k];
            }
        }
        Ok(())
    }

    /// Means and standard errors of the mean.
    pub fn finish(&self, times: &[f64], seed: u64) -> Result<MonteCarloEstimate> {
        if times.len() != self.sum.len() {
            return Err(Error::DimensionMismatch { expected: self.sum.len(), got: times.len() });
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter {
                name: "n_traj",
                value: 0.0,
                reason: "at least one trajectory is required",
            });
        }
        let n = self.n as f64;
        let mut mean = alloc::vec![[0.0; NQ]; times.len()];
        let mut se = alloc::vec![[0.0; NQ]; times.len()];
        for i in 0..times.len() {
            for k in 0..NQ {
                let m = self.sum[i][k] / n;
                mean[i][k] = m;
                se[i][k] = if self.n > 1 {
                    let var = ((self.sum_sq[i][k] - n * m * m) / (n - 1.0)).max(0.0);
                    (var / n).sqrt()
                } else {
                    0.0
                };
            }
        }
        let cplx = |v: &[[f64; NQ]], re: usize, im: usize| -> Vec<C64> {
            v.iter().map(|r| C64::new(r[re], r[im])).collect()
        };
        let real = |v: &[[f64; NQ]], k: usize| -> Vec<f64> { v.iter().map(|r| r[k]).collect() };
        Ok(MonteCarloEstimate {
            times: times.to_vec(),
            mean_e: cplx(&mean, RE_E, IM_E),
            mean_c: cplx(&mean, RE_C, IM_C),
            mean_abs2_e: real(&mean, ABS2_E),
            mean_abs2_c: real(&mean, ABS2_C),
            mean_h: cplx(&mean, RE_H, IM_H),
            stderr_e: cplx(&se, RE_E, IM_E),
            stderr_c: cplx(&se, RE_C, IM_C),
            stderr_abs2_e: real(&se, ABS2_E),
            stderr_abs2_c: real(&se, ABS2_C),
            stderr_h: cplx(&se, RE_H, IM_H),
            n_traj: self.n,
            seed,
        })
    }
}

/// Trajectory averages with standard errors.
///
/// `h` is the coherence `E C*`. It is the one bilinear that the phase noise
/// does not drive directly, since `φ` enters the equations only through
/// `e^{±iφ}`. Standard errors of complex
/// quantities are stored component-wise (real part of the error in `re`,
/// imaginary part in `im`).
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub times: Vec<f64>,
    pub mean_e: Vec<C64>,
    pub mean_c: Vec<C64>,
    pub mean_abs2_e: Vec<f64>,
    pub mean_abs2_c: Vec<f64>,
    pub mean_h: Vec<C64>,
    pub stderr_e: Vec<C64>,
    pub stderr_c: Vec<C64>,
    pub stderr_abs2_e: Vec<f64>,
    pub stderr_abs2_c: Vec<f64>,
    pub stderr_h: Vec<C64>,
    pub n_traj: usize,
    pub seed: u64,
}

/// Validates the run and returns the grid step.
fn prepare(params: &SystemParams, grid: &[f64]) -> Result<f64> {
    params.require_resonance()?;
    check_time_grid(grid)?;
    let dt = uniform_step(grid)?;
    check_monte_carlo_step(params, dt)?;
    Ok(dt)
}

/// Simulates trajectories `chunk · MC_CHUNK .. min((chunk + 1) · MC_CHUNK, n_traj)`
/// in order and returns their sums. Merging the chunks `0, 1, 2, ...` in
/// order reproduces [`monte_carlo_moments`] bit for bit.
pub fn simulate_chunk(
    params: &SystemParams,
    grid: &[f64],
    n_traj: usize,
    seed: u64,
    chunk: usize,
) -> Result<MonteCarloAccumulator> {
    let dt = prepare(params, grid)?;
    let p = propagator(params, dt)?;
    let sigma = (2.0 * params.gamma_p() * dt).sqrt();
    let mut acc = MonteCarloAccumulator::new(grid.len());
    let first = chunk.saturating_mul(MC_CHUNK).min(n_traj);
    let last = (first + MC_CHUNK).min(n_traj);
    for traj in first..last {
        let mut rng = trajectory_rng(seed, traj as u64);
        let mut e = C64::new(1.0, 0.0);
        let mut c = C64::new(0.0, 0.0);
        let mut phi = 0.0;
        acc.record(0, e, c);
        for i in 1..grid.len() {
            let ph = C64::from_polar(1.0, phi);
            let (e0, c0) = (e, c);
            e = p[0][0] * e0 + p[0][1] * ph * c0;
            c = p[1][0] * ph.conj() * e0 + p[1][1] * c0;
            let xi: f64 = rng.sample(StandardNormal);
            phi += sigma * xi;
            acc.record(i, e, c);
        }
        acc.n += 1;
    }
    Ok(acc)
}

/// Monte Carlo averages over `n_traj` trajectories, emitter initially
/// excited, on a uniform grid starting at 0 that doubles as the step grid.
///
/// Requires `Δ = 0`, `sqrt(2γp Δt) ≤ 0.05` and `g0 Δt ≤ 0.02`.
pub fn monte_carlo_moments(
    params: &SystemParams,
    grid: &[f64],
    n_traj: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    prepare(params, grid)?;
    let mut total = MonteCarloAccumulator::new(grid.len());
    for chunk in 0..n_traj.div_ceil(MC_CHUNK) {
        total.merge(&simulate_chunk(params, grid, n_traj, seed, chunk)?)?;
    }
    total.finish(grid, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::uniform;

    #[test]
    fn trajectory_phase_matches_path_stream() {
        let grid = uniform(0.0, 0.5, 501);
        let path = sample_phase_path_stream(2.0, &grid, 11, 3).unwrap();
        let mut rng = trajectory_rng(11, 3);
        let sigma = (2.0 * 2.0 * 1e-3f64).sqrt();
        let mut phi = 0.0;
        for i in 1..grid.len() {
            let xi: f64 = rng.sample(StandardNormal);
            phi += sigma * xi;
            assert_eq!(phi, path.phi[i]);
        }
    }

    #[test]
    fn rejects_coarse_steps() {
        let params = SystemParams::from_ghz(8.0, 1.6, 0.32, 1.0, 0.0).unwrap();
        let grid = uniform(0.0, 1e-9, 11);
        assert!(matches!(
            monte_carlo_moments(&params, &grid, 4, 1),
            Err(Error::StepTooCoarse { .. })
        ));
    }
}
