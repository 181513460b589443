//! Adaptive Dormand-Prince 5(4) integration of complex ODE systems.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::coherent::AmplitudePair;
use crate::grid::check_ascending;
use crate::params::SystemParams;
use crate::{Error, Result, C64};

/// Local error tolerance used by [`integrate_coherent_ode`].
pub const ODE_TOLERANCE: f64 = 1e-10;

/// Error control settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Upper bound on the number of accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { atol: ODE_TOLERANCE, rtol: ODE_TOLERANCE, max_steps: 10_000_000 }
    }
}

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[C64; N], terms: &[(f64, &[C64; N])], h: f64) -> [C64; N] {
    let mut out = *y;
    for (w, k) in terms {
        for i in 0..N {
            out[i] += k[i] * (w * h);
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` from `grid[0]` with `y(grid[0]) = y0` and
/// returns the solution at every grid point.
///
/// Steps are shortened so that every grid point is hit exactly; no dense
/// output interpolation is involved. The step is rejected when the scaled
/// maximum error exceeds one, with scale `atol + rtol · max(|y|, |y_new|)`.
pub fn integrate<const N: usize, F>(
    f: F,
    grid: &[f64],
    y0: [C64; N],
    opts: OdeOptions,
) -> Result<Vec<[C64; N]>>
where
    F: Fn(f64, &[C64; N]) -> [C64; N],
{
    check_ascending(grid)?;
    if !(opts.atol > 0.0 && opts.rtol >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "atol",
            value: opts.atol,
            reason: "absolute tolerance must be positive",
        });
    }
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    let span = grid[grid.len() - 1] - grid[0];
    if span == 0.0 {
        return Ok(out);
    }
    let mut t = grid[0];
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = 1e-3 * span;
    let mut steps = 0usize;
    for &target in &grid[1..] {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepSizeUnderflow { t });
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            if step <= 16.0 * f64::EPSILON * t.abs().max(span) {
                return Err(Error::StepSizeUnderflow { t });
            }
            let k2 = f(t + C2 * step, &axpy(&y, &[(A21, &k1)], step));
            let k3 = f(t + C3 * step, &axpy(&y, &[(A31, &k1), (A32, &k2)], step));
            let k4 = f(t + C4 * step, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step));
            let k5 = f(
                t + C5 * step,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step),
            );
            let k6 = f(
                t + step,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], step),
            );
            let y_new =
                axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], step);
            let t_new = if last { target } else { t + step };
            let k7 = f(t_new, &y_new);
            let mut err = 0.0f64;
            for i in 0..N {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                    + k7[i] * E7)
                    * step;
                let scale = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::StepSizeUnderflow { t });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                // A step clipped to a grid point says nothing about how large
                // the next one may be.
                if !last || step >= h {
                    h = step * factor;
                }
            } else {
                h = step * factor;
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// Integrates the coherent amplitude equations
/// `dE/dt = -i g0 e^{iΔt} C - γE`, `dC/dt = -i g0 e^{-iΔt} E - κC`
/// from `init` (given at `grid[0]`) with local tolerance [`ODE_TOLERANCE`].
pub fn integrate_coherent_ode(
    params: &SystemParams,
    init: &AmplitudePair,
    grid: &[f64],
) -> Result<Vec<AmplitudePair>> {
    check_ascending(grid)?;
    if init.t != grid[0] {
        return Err(Error::InvalidGrid("initial amplitudes must be given at the first grid point"));
    }
    let (g0, kappa, gamma, delta) = (params.g0(), params.kappa(), params.gamma(), params.delta());
    let mig0 = C64::new(0.0, -g0);
    let rhs = |t: f64, y: &[C64; 2]| {
        let ph = C64::from_polar(1.0, delta * t);
        [mig0 * ph * y[1] - y[0] * gamma, mig0 * ph.conj() * y[0] - y[1] * kappa]
    };
    let ys = integrate(rhs, grid, [init.e, init.c], OdeOptions::default())?;
    Ok(grid.iter().zip(ys).map(|(&t, [e, c])| AmplitudePair::new(t, e, c)).collect())
}
