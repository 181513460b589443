//! Sampling grids and trapezoidal quadrature.

use alloc::vec::Vec;

use crate::{Error, Result};

/// `n` equally spaced points from `start` to `end` inclusive.
///
/// The last point is set to `end` exactly so that grids built from the
/// same endpoints compare equal.
pub fn uniform(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            let mut v: Vec<f64> = (0..n).map(|i| start + step * i as f64).collect();
            v[n - 1] = end;
            v
        }
    }
}

/// Checks that a grid is non-empty, finite and strictly ascending.
pub fn check_ascending(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite values"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid must be strictly ascending"));
    }
    Ok(())
}

/// Checks a time grid: strictly ascending and starting at `t = 0`.
pub fn check_time_grid(grid: &[f64]) -> Result<()> {
    check_ascending(grid)?;
    if grid[0] != 0.0 {
        return Err(Error::InvalidGrid("time grid must start at 0"));
    }
    Ok(())
}

/// Returns the common spacing of a uniform grid (relative tolerance 1e-9).
pub fn uniform_step(grid: &[f64]) -> Result<f64> {
    check_ascending(grid)?;
    if grid.len() < 2 {
        return Err(Error::InvalidGrid("a uniform grid needs at least two points"));
    }
    let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if grid.windows(2).any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step) {
        return Err(Error::InvalidGrid("grid is not uniform"));
    }
    Ok(step)
}

/// Trapezoidal rule for samples `y` on abscissae `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Running trapezoidal integral, starting from zero at `x[0]`.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    if !x.is_empty() {
        out.push(0.0);
    }
    for (xw, yw) in x.windows(2).zip(y.windows(2)) {
        acc += 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]);
        out.push(acc);
    }
    out
}
