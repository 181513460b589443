//! Dynamics without pure dephasing: the 2×2 propagator for the emitter and
//! cavity amplitudes `(E, C)`, occupation probabilities, the cumulative
//! forward emission probability and the quantum efficiency.
//!
//! The amplitudes obey
//!
//! ```text
//! dE/dt = -i g0 exp(+iΔt) C - γ E
//! dC/dt = -i g0 exp(-iΔt) E - κ C
//! ```
//!
//! In the frame `E = exp(iΔt/2) a`, `C = exp(-iΔt/2) b` the generator is
//! constant, `-K/2 + N` with `N = [[c, -i g0], [-i g0, -c]]` and
//! `c = (Γ - iΔ)/2`. Because `N² = -λ² I` the propagator is
//! `exp(-Kt/2) [cos(λt) I + N sin(λt)/λ]`, which is exact in every regime.
//! Replacing `λ` by the real `g` gives the strong-coupling form.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{check_time_grid, cumulative_trapezoid};
use crate::linalg::{apply2, Matrix2};
use crate::params::{derive_rates, require_real, SystemParams};
use crate::{Error, Result, C64};

/// Which closed form of the propagator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagatorForm {
    /// Complex frequency `λ`; exact for any detuning.
    #[default]
    Exact,
    /// `λ → g`, valid deep in the strong-coupling regime.
    StrongCoupling,
}

/// Emitter and cavity amplitudes at time `t` (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub t: f64,
    pub e: C64,
    pub c: C64,
}

impl AmplitudePair {
    pub fn new(t: f64, e: C64, c: C64) -> Self {
        Self { t, e, c }
    }

    /// Emitter excited, cavity empty, at `t = 0`.
    pub fn excited() -> Self {
        Self::new(0.0, C64::new(1.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Total single-excitation probability `|E|² + |C|²`.
    pub fn norm_sq(&self) -> f64 {
        self.e.norm_sqr() + self.c.norm_sqr()
    }
}

/// Occupation and cumulative emission probabilities on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTrace {
    pub times: Vec<f64>,
    /// Emitter excited.
    pub p_e: Vec<f64>,
    /// One photon in the cavity mode.
    pub p_c: Vec<f64>,
    /// Photon emitted into the forward output beam.
    pub p_out: Vec<f64>,
    /// Photon emitted into the side modes.
    pub p_side: Vec<f64>,
}

impl ProbabilityTrace {
    /// `p_e + p_c + p_out + p_side` at every grid point.
    pub fn total(&self) -> Vec<f64> {
        (0..self.times.len())
            .map(|i| self.p_e[i] + self.p_c[i] + self.p_out[i] + self.p_side[i])
            .collect()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// `sin(z t) / z`, continuous through `z = 0`.
pub(crate) fn sinc_t(z: C64, t: f64) -> C64 {
    let x = z * t;
    if x.norm() < 1e-4 {
        let x2 = x * x;
        (C64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0) * t
    } else {
        x.sin() / z
    }
}

/// Propagator in the exact form with complex `λ`.
pub fn propagator(params: &SystemParams, t: f64) -> Result<Matrix2> {
    propagator_with(params, t, PropagatorForm::Exact)
}

/// Propagator mapping `(E(0), C(0))` to `(E(t), C(t))`.
pub fn propagator_with(params: &SystemParams, t: f64, form: PropagatorForm) -> Result<Matrix2> {
    check_time(t)?;
    let r = derive_rates(params);
    let freq = match form {
        PropagatorForm::Exact => r.lambda,
        PropagatorForm::StrongCoupling => C64::new(require_real("g", r.g)?, 0.0),
    };
    let c = C64::new(r.big_gamma, -params.delta()) * 0.5;
    let mig0 = C64::new(0.0, -params.g0());
    let cos = (freq * t).cos();
    let s = sinc_t(freq, t);
    let env = (-0.5 * r.k * t).exp();
    let ph = C64::from_polar(1.0, 0.5 * params.delta() * t);
    let ph_conj = ph.conj();
    Ok([
        [(cos + c * s) * env * ph, mig0 * s * env * ph],
        [mig0 * s * env * ph_conj, (cos - c * s) * env * ph_conj],
    ])
}

fn check_init(init: &AmplitudePair) -> Result<()> {
    let n = init.norm_sq();
    if n.is_finite() && n <= 1.0 + 1e-12 {
        Ok(())
    } else {
        Err(Error::NotNormalizable(n))
    }
}

/// Amplitudes at time `t` (exact propagator) from an initial pair given at
/// `t = 0`.
pub fn amplitudes(params: &SystemParams, t: f64, init: &AmplitudePair) -> Result<AmplitudePair> {
    amplitudes_with(params, t, init, PropagatorForm::Exact)
}

/// Amplitudes at time `t` using the chosen propagator form.
pub fn amplitudes_with(
    params: &SystemParams,
    t: f64,
    init: &AmplitudePair,
    form: PropagatorForm,
) -> Result<AmplitudePair> {
    check_init(init)?;
    if init.t != 0.0 {
        return Err(Error::InvalidGrid("initial amplitudes must be given at t = 0"));
    }
    let m = propagator_with(params, t, form)?;
    let [e, c] = apply2(&m, [init.e, init.c]);
    Ok(AmplitudePair::new(t, e, c))
}

/// Cumulative forward emission probability `2κ ∫₀ᵗ |C|² dt'` for the
/// emitter initially excited, using the exact complex-`λ` solution.
pub fn emission_probability(params: &SystemParams, t: f64) -> Result<f64> {
    emission_probability_with(params, t, PropagatorForm::Exact)
}

/// Cumulative forward emission probability for the chosen propagator form.
pub fn emission_probability_with(
    params: &SystemParams,
    t: f64,
    form: PropagatorForm,
) -> Result<f64> {
    check_time(t)?;
    let r = derive_rates(params);
    let (g0, kappa, k) = (params.g0(), params.kappa(), r.k);
    if kappa == 0.0 {
        // No cavity leakage, no forward emission.
        return Ok(0.0);
    }
    match form {
        PropagatorForm::StrongCoupling => {
            let g = require_real("g", r.g)?;
            let eta = quantum_efficiency_strong_coupling(params)?;
            let (s, s2) = ((g * t).sin(), (2.0 * g * t).sin());
            let bracket = 1.0 + k * k / (2.0 * g * g) * s * s + k / (2.0 * g) * s2;
            Ok(eta * (1.0 - (-k * t).exp() * bracket))
        }
        PropagatorForm::Exact => {
            // |C|² = g0² e^{-Kt} (cosh 2bt - cos 2at) / (2|λ|²), λ = a + ib.
            let (a, b) = (r.lambda.re, r.lambda.im);
            let lam_sq = r.lambda.norm_sqr();
            if lam_sq <= 1e-20 * g0 * g0 {
                // λ → 0: |sin(λt)/λ|² → t².
                let kt = k * t;
                let poly = 2.0 - (-kt).exp() * (kt * kt + 2.0 * kt + 2.0);
                return Ok(2.0 * kappa * g0 * g0 * poly / (k * k * k));
            }
            // ∫₀ᵗ e^{-xs} ds, stable as x → 0.
            let decay_int = |x: f64| if x == 0.0 { t } else { -(-x * t).exp_m1() / x };
            let cosh_int = 0.5 * (decay_int(k - 2.0 * b) + decay_int(k + 2.0 * b));
            let w = 2.0 * a;
            let cos_int =
                (k - (-k * t).exp() * (k * (w * t).cos() - w * (w * t).sin())) / (k * k + w * w);
            Ok(kappa * g0 * g0 / lam_sq * (cosh_int - cos_int))
        }
    }
}

/// Occupation and emission probabilities on a time grid starting at 0,
/// for the emitter initially excited (exact propagator).
pub fn probabilities(params: &SystemParams, grid: &[f64]) -> Result<ProbabilityTrace> {
    probabilities_with(params, grid, PropagatorForm::Exact)
}

/// Occupation and emission probabilities using the chosen propagator form.
///
/// `p_side` is the cumulative trapezoidal integral of `2γ p_e`.
pub fn probabilities_with(
    params: &SystemParams,
    grid: &[f64],
    form: PropagatorForm,
) -> Result<ProbabilityTrace> {
    check_time_grid(grid)?;
    let init = AmplitudePair::excited();
    let mut p_e = Vec::with_capacity(grid.len());
    let mut p_c = Vec::with_capacity(grid.len());
    let mut p_out = Vec::with_capacity(grid.len());
    for &t in grid {
        let a = amplitudes_with(params, t, &init, form)?;
        p_e.push(a.e.norm_sqr());
        p_c.push(a.c.norm_sqr());
        p_out.push(emission_probability_with(params, t, form)?);
    }
    let rate: Vec<f64> = p_e.iter().map(|p| 2.0 * params.gamma() * p).collect();
    let p_side = cumulative_trapezoid(grid, &rate);
    Ok(ProbabilityTrace { times: grid.to_vec(), p_e, p_c, p_out, p_side })
}

/// Long-time forward emission probability of the exact dynamics,
/// `4κ g0² K / (K⁴ + 4K²g² - Γ²Δ²)`.
///
/// At resonance this is `[g0² / (g0² + κγ)] [κ / (κ + γ)]`.
pub fn quantum_efficiency(params: &SystemParams) -> Result<f64> {
    let r = derive_rates(params);
    let k = r.k;
    if k == 0.0 {
        return Err(Error::NoDecay);
    }
    let g0 = params.g0();
    if params.delta() == 0.0 {
        return Ok(g0 * g0 / (g0 * g0 + params.kappa() * params.gamma()) * params.kappa() / k);
    }
    let den = k.powi(4) + 4.0 * k * k * r.g_sq
        - (r.big_gamma * params.delta()) * (r.big_gamma * params.delta());
    if den <= 0.0 {
        return Err(Error::NoDecay);
    }
    Ok(4.0 * params.kappa() * g0 * g0 * k / den)
}

/// Long-time limit of the strong-coupling emission probability,
/// `4κ g0² / (K (K² + 4g²))`.
///
/// Equal to [`quantum_efficiency`] at resonance. Off resonance it is the
/// total weight of the closed-form forward spectrum.
pub fn quantum_efficiency_strong_coupling(params: &SystemParams) -> Result<f64> {
    let r = derive_rates(params);
    if r.k == 0.0 {
        return Err(Error::NoDecay);
    }
    let g0 = params.g0();
    Ok(4.0 * params.kappa() * g0 * g0 / (r.k * (r.k * r.k + 4.0 * r.g_sq)))
}
