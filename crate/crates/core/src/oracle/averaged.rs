//! Exact solutions of the averaged linear systems by matrix exponential.

use alloc::vec::Vec;

use crate::dephasing::{OneTimeMoments, SecularProblem, SecularSystem};
use crate::grid::check_ascending;
use crate::params::SystemParams;
use crate::{Error, Result, C64};

/// Solves `d⟨v⟩/dt = (M0 - γp M1²) ⟨v⟩` with `⟨v(0)⟩ = init` and returns
/// `⟨v(t)⟩` at every grid time.
///
/// Each time point uses its own dense exponential `exp(M t)`, so errors do
/// not accumulate along the grid and no eigenbasis is ever formed.
pub fn exact_moments_linear_system(
    problem: &SecularProblem,
    init: &[C64],
    grid: &[f64],
) -> Result<Vec<Vec<C64>>> {
    let m = problem.generator();
    if init.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: init.len() });
    }
    check_ascending(grid)?;
    if grid[0] < 0.0 {
        return Err(Error::NegativeTime(grid[0]));
    }
    grid.iter()
        .map(|&t| Ok(m.scale(C64::new(t, 0.0)).expm()?.mul_vec(init)))
        .collect()
}

/// `⟨I⟩`, `⟨J⟩` and `⟨H⟩` from the exact I-, J- and H-systems, emitter
/// initially excited.
pub fn exact_one_time_moments(
    params: &SystemParams,
    grid: &[f64],
) -> Result<Vec<OneTimeMoments>> {
    let solve = |label| -> Result<Vec<C64>> {
        let problem = SecularProblem::new(params, label)?;
        let idx = problem.observable_index();
        let v = exact_moments_linear_system(&problem, &problem.initial_vector(), grid)?;
        Ok(v.into_iter().map(|row| row[idx]).collect())
    };
    let i = solve(SecularSystem::I)?;
    let j = solve(SecularSystem::J)?;
    let h = solve(SecularSystem::H)?;
    Ok((0..grid.len())
        .map(|k| OneTimeMoments { t: grid[k], i: i[k].re, j: j[k].re, h: h[k] })
        .collect())
}
