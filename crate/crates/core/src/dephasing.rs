//! Pure dephasing modeled as a Wiener phase diffusion of the emitter
//! frequency, `⟨f(t) f(t')⟩ = 2γp δ(t - t')`.
//!
//! Averaging the multiplicative stochastic equations gives linear systems
//! `d⟨v⟩/dt = (M0 - γp M1²) ⟨v⟩`. This module holds those systems
//! ([`SecularProblem`]), their closed-form approximate solutions at first
//! order in `γp / g`, and the approximate secular roots. Everything here is
//! for the resonant case `Δ = 0`.
//!
//! Moments are expressed in the envelope-free variables
//! `Ẽ = E e^{γt}` and `C̃ = C e^{κt}`: `I = |C̃|²`, `J = |Ẽ|²`, `H = Ẽ C̃*`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::coherent::{sinc_t, AmplitudePair, ProbabilityTrace};
use crate::grid::{check_time_grid, cumulative_trapezoid};
use crate::linalg::CMatrix;
use crate::params::{derive_rates, require_real, validate_regime, RegimeReport, SystemParams};
use crate::{Error, Result, C64};

/// Which of the averaged linear systems a [`SecularProblem`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecularSystem {
    /// `(Ẽ, Y = e^{-Γt + iφ} C̃)`, 2×2.
    MeanAmplitude,
    /// `(U_I, U_I*, I, Z_I)`, yields `⟨I⟩`.
    I,
    /// `(U_J, U_J*, W_J, J)`, yields `⟨J⟩`.
    J,
    /// `(H, U_H, W_H, Z_H)`, yields `⟨H⟩`.
    H,
}

/// An averaged linear system `d⟨v⟩/dt = (M0 - γp M1²) ⟨v⟩` together with
/// the parameters it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularProblem {
    pub label: SecularSystem,
    pub m0: CMatrix,
    pub m1: CMatrix,
    pub gamma_p: f64,
    params: SystemParams,
}

impl SecularProblem {
    /// Assembles `M0` and `M1` for the requested system. Requires `Δ = 0`.
    pub fn new(params: &SystemParams, label: SecularSystem) -> Result<Self> {
        params.require_resonance()?;
        let z = C64::new(0.0, 0.0);
        let r = |x: f64| C64::new(x, 0.0);
        let gd = derive_rates(params).big_gamma;
        let mi = C64::new(0.0, -params.g0());
        let pi = C64::new(0.0, params.g0());
        let (m0, m1) = match label {
            SecularSystem::MeanAmplitude => (
                CMatrix::from_rows(&[&[z, mi], &[mi, r(-gd)]])?,
                CMatrix::diag_real(&[0.0, 1.0]),
            ),
            SecularSystem::I => (
                CMatrix::from_rows(&[
                    &[r(gd), z, mi, pi],
                    &[z, r(gd), pi, mi],
                    &[mi, pi, z, z],
                    &[pi, mi, z, r(2.0 * gd)],
                ])?,
                CMatrix::diag_real(&[-1.0, 1.0, 0.0, 0.0]),
            ),
            SecularSystem::J => (
                CMatrix::from_rows(&[
                    &[r(-gd), z, mi, pi],
                    &[z, r(-gd), pi, mi],
                    &[mi, pi, r(-2.0 * gd), z],
                    &[pi, mi, z, z],
                ])?,
                CMatrix::diag_real(&[-1.0, 1.0, 0.0, 0.0]),
            ),
            SecularSystem::H => (
                CMatrix::from_rows(&[
                    &[z, z, mi, pi],
                    &[z, z, pi, mi],
                    &[mi, pi, r(-gd), z],
                    &[pi, mi, z, r(gd)],
                ])?,
                CMatrix::diag_real(&[0.0, 2.0, 1.0, 1.0]),
            ),
        };
        Ok(Self { label, m0, m1, gamma_p: params.gamma_p(), params: *params })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// `M = M0 - γp M1²`.
    pub fn generator(&self) -> CMatrix {
        self.m0.sub(&self.m1.mul(&self.m1).scale(C64::new(self.gamma_p, 0.0)))
    }

    /// `N(z) = z I - M`, whose determinant is the secular polynomial.
    pub fn resolvent_matrix(&self, z: C64) -> CMatrix {
        CMatrix::identity(self.m0.dim()).scale(z).sub(&self.generator())
    }

    /// Initial vector for the emitter initially excited.
    pub fn initial_vector(&self) -> Vec<C64> {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        match self.label {
            SecularSystem::MeanAmplitude => alloc::vec![one, zero],
            _ => alloc::vec![zero, zero, zero, one],
        }
    }

    /// Index of the component holding the system's namesake moment.
    pub fn observable_index(&self) -> usize {
        match self.label {
            SecularSystem::MeanAmplitude => 0,
            SecularSystem::I => 2,
            SecularSystem::J => 3,
            SecularSystem::H => 0,
        }
    }
}

/// How the `⟨J⟩` closed form is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MomentForm {
    /// Sine coefficient `+[γp/4g + gΓ/g0²]`, which is the correct first-order
    /// expansion of the exact J-system solution.
    #[default]
    FirstOrder,
    /// Sine coefficient `-[γp/4g - g(Γ - γp/2)/g0²]`. Its `γp` term has the
    /// wrong sign, so the error grows linearly in `γp / g`. Kept because the
    /// closed-form side spectrum is built on it.
    AsPrinted,
}

/// Averaged one-time moments in envelope-free variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneTimeMoments {
    pub t: f64,
    /// `⟨I⟩ = ⟨|C̃|²⟩`.
    pub i: f64,
    /// `⟨J⟩ = ⟨|Ẽ|²⟩`.
    pub j: f64,
    /// `⟨H⟩ = ⟨Ẽ C̃*⟩`.
    pub h: C64,
}

impl OneTimeMoments {
    /// `⟨|C|²⟩ = e^{-2κt} ⟨I⟩`.
    pub fn p_c(&self, params: &SystemParams) -> f64 {
        (-2.0 * params.kappa() * self.t).exp() * self.i
    }

    /// `⟨|E|²⟩ = e^{-2γt} ⟨J⟩`.
    pub fn p_e(&self, params: &SystemParams) -> f64 {
        (-2.0 * params.gamma() * self.t).exp() * self.j
    }

    /// `⟨E C*⟩ = e^{-Kt} ⟨H⟩`.
    pub fn coherence(&self, params: &SystemParams) -> C64 {
        self.h * (-(params.kappa() + params.gamma()) * self.t).exp()
    }
}

/// Rates used by every first-order closed form.
struct Resonant {
    g0: f64,
    k: f64,
    gd: f64,
    g: f64,
    eps: f64,
    gp: f64,
}

fn resonant(params: &SystemParams) -> Result<Resonant> {
    params.require_resonance()?;
    let r = derive_rates(params);
    Ok(Resonant {
        g0: params.g0(),
        k: r.k,
        gd: r.big_gamma,
        g: require_real("g", r.g)?,
        eps: r.epsilon,
        gp: params.gamma_p(),
    })
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// Averaged amplitudes `(⟨E(t)⟩, ⟨C(t)⟩)` from an initial pair at `t = 0`.
///
/// The emitter amplitude oscillates at `g1`, the cavity amplitude at `g2`,
/// both under the envelope `e^{-(K + γp)t/2}`.
pub fn mean_amplitudes_dephased(
    params: &SystemParams,
    t: f64,
    init: &AmplitudePair,
) -> Result<AmplitudePair> {
    params.require_resonance()?;
    check_time(t)?;
    let n = init.norm_sq();
    if !(n.is_finite() && n <= 1.0 + 1e-12) {
        return Err(Error::NotNormalizable(n));
    }
    if init.t != 0.0 {
        return Err(Error::InvalidGrid("initial amplitudes must be given at t = 0"));
    }
    let r = derive_rates(params);
    let gp = params.gamma_p();
    let mig0 = C64::new(0.0, -params.g0());
    let env = (-0.5 * (r.k + gp) * t).exp();
    let (s1, s2) = (sinc_t(r.g1, t), sinc_t(r.g2, t));
    let (c1, c2) = ((r.g1 * t).cos(), (r.g2 * t).cos());
    let e = (c1 + s1 * (0.5 * (r.big_gamma + gp))) * init.e + mig0 * s1 * init.c;
    let c = mig0 * s2 * init.e + (c2 - s2 * (0.5 * (r.big_gamma - gp))) * init.c;
    Ok(AmplitudePair::new(t, e * env, c * env))
}

/// Approximate secular roots split by kind, plus the regime check that
/// conditions their validity.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxRoots {
    /// Roots close to the real axis (slow decay or growth).
    pub first_kind: Vec<C64>,
    /// The complex-conjugate pair oscillating near `±2g` (`±g1` for the
    /// mean-amplitude system).
    pub oscillatory: Vec<C64>,
    /// Advisory strong-coupling check; roots are returned either way.
    pub regime: RegimeReport,
}

impl ApproxRoots {
    /// All roots sorted by real part, then imaginary part.
    pub fn all(&self) -> Vec<C64> {
        let mut v: Vec<C64> = self.first_kind.iter().chain(&self.oscillatory).copied().collect();
        crate::poly::sort_roots(&mut v);
        v
    }
}

/// Strong-coupling approximations to the secular roots of each system.
pub fn secular_roots_approx(params: &SystemParams, which: SecularSystem) -> Result<ApproxRoots> {
    params.require_resonance()?;
    let regime = validate_regime(params, crate::params::DEFAULT_REGIME_THRESHOLD)?;
    let r = derive_rates(params);
    let (gd, gp, eps) = (r.big_gamma, params.gamma_p(), r.epsilon);
    let re = |x: f64| C64::new(x, 0.0);
    let pair = |center: f64, freq: C64| {
        let i_freq = C64::new(0.0, 1.0) * freq;
        alloc::vec![re(center) - i_freq, re(center) + i_freq]
    };
    let two_g = r.g * 2.0;
    let (first_kind, oscillatory) = match which {
        SecularSystem::MeanAmplitude => (Vec::new(), pair(-0.5 * (gd + gp), r.g1)),
        SecularSystem::I => (
            alloc::vec![re(gd - gp), re(gd + gp * eps)],
            pair(gd - 0.5 * gp * (1.0 + eps), two_g),
        ),
        SecularSystem::J => (
            alloc::vec![re(-gd - gp), re(-gd + gp * eps)],
            pair(-gd - 0.5 * gp * (1.0 + eps), two_g),
        ),
        SecularSystem::H => (
            alloc::vec![re(-gp * (1.0 + 4.0 * eps)), re(-2.0 * gp * (1.0 - 2.0 * eps))],
            pair(-0.5 * gp * (3.0 + eps), two_g),
        ),
    };
    Ok(ApproxRoots { first_kind, oscillatory, regime })
}

/// First-order closed forms for `⟨I⟩`, `⟨J⟩`, `⟨H⟩` (default `⟨J⟩` form).
pub fn moments_closed_form(params: &SystemParams, t: f64) -> Result<OneTimeMoments> {
    moments_closed_form_with(params, t, MomentForm::FirstOrder)
}

/// First-order closed forms for the one-time moments, emitter initially
/// excited. Coefficients are accurate to first order in `γp / g`, decay
/// exponents to order `γp ε`.
pub fn moments_closed_form_with(
    params: &SystemParams,
    t: f64,
    form: MomentForm,
) -> Result<OneTimeMoments> {
    check_time(t)?;
    let Resonant { g0, gd, g, eps, gp, .. } = resonant(params)?;
    let amp = g0 * g0 / (2.0 * g * g);
    let (s, c) = ((2.0 * g * t).sin(), (2.0 * g * t).cos());
    let slow = (0.5 * gp * (1.0 + 3.0 * eps) * t).exp();
    let i = amp
        * ((gd - 0.5 * gp * (1.0 + eps)) * t).exp()
        * (slow - gp / (4.0 * g) * s - c);
    let sin_coeff = match form {
        MomentForm::FirstOrder => gp / (4.0 * g) + g * gd / (g0 * g0),
        MomentForm::AsPrinted => -(gp / (4.0 * g) - g * (gd - 0.5 * gp) / (g0 * g0)),
    };
    let j = amp
        * (-(gd + 0.5 * gp * (1.0 + eps)) * t).exp()
        * (slow + sin_coeff * s - (1.0 - 2.0 * g * g / (g0 * g0)) * c);
    let h_real = 1.5 * gd / g * (0.5 * gp * (1.0 - 7.0 * eps) * t).exp()
        - (gd - gp) / g * (-0.5 * gp * (1.0 - 9.0 * eps) * t).exp()
        - (gd + 2.0 * gp) / (2.0 * g) * c
        + s;
    let h = C64::new(0.0, g0 / (2.0 * g)) * (-0.5 * gp * (3.0 + eps) * t).exp() * h_real;
    Ok(OneTimeMoments { t, i, j, h })
}

/// Cumulative forward emission probability `2κ ∫₀ᵗ ⟨|C|²⟩ dt'` in closed
/// form, integrating the first-order `⟨I⟩` exactly.
pub fn emission_probability_dephased(params: &SystemParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let Resonant { g0, k, g, eps, gp, .. } = resonant(params)?;
    let kappa = params.kappa();
    let pre = kappa * g0 * g0 / (g * g);
    let slow_rate = k - gp * eps;
    if slow_rate <= 0.0 {
        return Err(Error::DegenerateDenominator(slow_rate));
    }
    let a = k + 0.5 * gp * (1.0 + eps);
    let den = a * a + 4.0 * g * g;
    let (s, c) = ((2.0 * g * t).sin(), (2.0 * g * t).cos());
    let head = -(-slow_rate * t).exp_m1() / slow_rate - (k + gp * (1.0 + 0.5 * eps)) / den;
    let tail = (-a * t).exp() / den
        * (a * (gp / (4.0 * g) * s + c) + 2.0 * g * (gp / (4.0 * g) * c - s));
    Ok(pre * (head + tail))
}

/// Long-time limit of [`emission_probability_dephased`].
pub fn qe_dephased(params: &SystemParams) -> Result<f64> {
    let Resonant { g0, k, g, eps, gp, .. } = resonant(params)?;
    let slow_rate = k - gp * eps;
    if slow_rate <= 0.0 {
        return Err(Error::DegenerateDenominator(slow_rate));
    }
    let a = k + 0.5 * gp * (1.0 + eps);
    let frac = slow_rate * (k + gp * (1.0 + 0.5 * eps)) / (a * a + 4.0 * g * g);
    Ok(g0 * g0 / (g * g) * params.kappa() / slow_rate * (1.0 - frac))
}

/// `2γ ∫₀^∞ ⟨|E|²⟩ dt` for the chosen `⟨J⟩` form, in closed form.
pub fn side_emission_total(params: &SystemParams, form: MomentForm) -> Result<f64> {
    let Resonant { g0, k, gd, g, eps, gp } = resonant(params)?;
    let a = k + 0.5 * gp * (1.0 + eps);
    let b = 0.5 * gp * (1.0 + 3.0 * eps);
    if a - b <= 0.0 {
        return Err(Error::DegenerateDenominator(a - b));
    }
    let sin_coeff = match form {
        MomentForm::FirstOrder => gp / (4.0 * g) + g * gd / (g0 * g0),
        MomentForm::AsPrinted => -(gp / (4.0 * g) - g * (gd - 0.5 * gp) / (g0 * g0)),
    };
    let cos_coeff = 1.0 - 2.0 * g * g / (g0 * g0);
    let den = a * a + 4.0 * g * g;
    let integral = g0 * g0 / (2.0 * g * g)
        * (1.0 / (a - b) + sin_coeff * 2.0 * g / den - cos_coeff * a / den);
    Ok(2.0 * params.gamma() * integral)
}

/// Dephased occupation and emission probabilities on a time grid starting
/// at 0 (default `⟨J⟩` form).
pub fn dephased_probabilities(params: &SystemParams, grid: &[f64]) -> Result<ProbabilityTrace> {
    dephased_probabilities_with(params, grid, MomentForm::FirstOrder)
}

/// Dephased probabilities: `⟨P_e⟩ = e^{-2γt}⟨J⟩`, `⟨P_c⟩ = e^{-2κt}⟨I⟩`,
/// `⟨P_o⟩` in closed form and the side emission by cumulative quadrature.
pub fn dephased_probabilities_with(
    params: &SystemParams,
    grid: &[f64],
    form: MomentForm,
) -> Result<ProbabilityTrace> {
    check_time_grid(grid)?;
    let mut p_e = Vec::with_capacity(grid.len());
    let mut p_c = Vec::with_capacity(grid.len());
    let mut p_out = Vec::with_capacity(grid.len());
    for &t in grid {
        let m = moments_closed_form_with(params, t, form)?;
        p_e.push(m.p_e(params));
        p_c.push(m.p_c(params));
        p_out.push(emission_probability_dephased(params, t)?);
    }
    let rate: Vec<f64> = p_e.iter().map(|p| 2.0 * params.gamma() * p).collect();
    let p_side = cumulative_trapezoid(grid, &rate);
    Ok(ProbabilityTrace { times: grid.to_vec(), p_e, p_c, p_out, p_side })
}

/// Depth `(max - min) / (max + min)` of the first oscillation of a trace:
/// the first interior local maximum and the local minimum that follows it.
/// Returns `None` if the trace has no such pair.
pub fn modulation_depth(values: &[f64]) -> Option<f64> {
    let n = values.len();
    let max_idx = (1..n.saturating_sub(1))
        .find(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])?;
    let min_idx = ((max_idx + 1)..n.saturating_sub(1))
        .find(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])?;
    let (hi, lo) = (values[max_idx], values[min_idx]);
    Some((hi - lo) / (hi + lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::{amplitudes, probabilities, quantum_efficiency};
    use crate::grid::uniform;

    fn p(gp_ghz: f64) -> SystemParams {
        SystemParams::from_ghz(8.0, 1.6, 0.32, gp_ghz, 0.0).unwrap()
    }

    #[test]
    fn initial_values() {
        for form in [MomentForm::FirstOrder, MomentForm::AsPrinted] {
            let m = moments_closed_form_with(&p(2.5), 0.0, form).unwrap();
            assert!(m.i.abs() < 1e-15);
            assert!((m.j - 1.0).abs() < 1e-14);
            assert!(m.h.norm() < 1e-14);
        }
    }

    #[test]
    fn coherent_limit_of_moments() {
        let params = p(0.0);
        let r = derive_rates(&params);
        let g = r.real_g().unwrap();
        for k in 0..50 {
            let t = k as f64 * 1e-11;
            let m = moments_closed_form(&params, t).unwrap();
            let a = amplitudes(&params, t, &AmplitudePair::excited()).unwrap();
            let i_direct = params.g0().powi(2) / (g * g) * (r.big_gamma * t).exp() * (g * t).sin().powi(2);
            assert!((m.i - i_direct).abs() <= 1e-10 * i_direct.abs().max(1.0));
            assert!((m.p_e(&params) - a.e.norm_sqr()).abs() < 1e-12);
            assert!((m.p_c(&params) - a.c.norm_sqr()).abs() < 1e-12);
            assert!((m.coherence(&params) - a.e * a.c.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn mean_amplitudes_reduce_to_coherent() {
        let params = p(0.0);
        let init = AmplitudePair::new(0.0, C64::new(0.6, 0.0), C64::new(0.0, 0.8));
        for k in 0..20 {
            let t = k as f64 * 2e-11;
            let a = mean_amplitudes_dephased(&params, t, &init).unwrap();
            let b = amplitudes(&params, t, &init).unwrap();
            assert!((a.e - b.e).norm() < 1e-14 && (a.c - b.c).norm() < 1e-14);
        }
        assert_eq!(mean_amplitudes_dephased(&p(1.0), 0.0, &init).unwrap(), init);
        let detuned = p(1.0).with_delta(1e9).unwrap();
        assert!(mean_amplitudes_dephased(&detuned, 0.0, &init).is_err());
    }

    #[test]
    fn efficiency_reduction_and_drop() {
        let eta0 = qe_dephased(&p(0.0)).unwrap();
        assert!((eta0 - quantum_efficiency(&p(0.0)).unwrap()).abs() < 1e-12);
        let drop = eta0 - qe_dephased(&p(4.0)).unwrap();
        assert!((drop - 0.012_017_446_8).abs() < 1e-8, "{drop}");
        let k = derive_rates(&p(4.0)).k;
        let late = emission_probability_dephased(&p(4.0), 40.0 / k).unwrap();
        assert!((late - qe_dephased(&p(4.0)).unwrap()).abs() < 1e-12);
        assert!(emission_probability_dephased(&p(4.0), 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn dephased_probabilities_reduce() {
        let params = p(0.0);
        let grid = uniform(0.0, 1.25e-9, 501);
        let a = dephased_probabilities(&params, &grid).unwrap();
        let b = probabilities(&params, &grid).unwrap();
        for i in 0..grid.len() {
            assert!((a.p_e[i] - b.p_e[i]).abs() < 1e-10);
            assert!((a.p_c[i] - b.p_c[i]).abs() < 1e-10);
            assert!((a.p_out[i] - b.p_out[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn side_total_complements_efficiency() {
        let params = p(0.0);
        for form in [MomentForm::FirstOrder, MomentForm::AsPrinted] {
            let side = side_emission_total(&params, form).unwrap();
            assert!((side + quantum_efficiency(&params).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn modulation_depth_of_damped_cosine() {
        let x = uniform(0.0, 10.0, 2001);
        let v: Vec<f64> = x.iter().map(|t| 2.0 + (3.0 * t).sin()).collect();
        let d = modulation_depth(&v).unwrap();
        assert!((d - 0.5).abs() < 1e-4);
        assert!(modulation_depth(&[1.0, 2.0, 3.0]).is_none());
    }

    #[test]
    fn approximate_roots_at_zero_dephasing() {
        let params = p(0.0);
        let g = derive_rates(&params).real_g().unwrap();
        let gd = derive_rates(&params).big_gamma;
        let roots = secular_roots_approx(&params, SecularSystem::I).unwrap();
        assert_eq!(roots.first_kind, alloc::vec![C64::new(gd, 0.0); 2]);
        assert!((roots.oscillatory[1] - C64::new(gd, 2.0 * g)).norm() < 1e-3);
        let h = secular_roots_approx(&params, SecularSystem::H).unwrap().all();
        assert_eq!(h.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }
}
