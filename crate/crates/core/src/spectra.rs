//! Side and forward emission spectra, two-time correlation kernels,
//! normalization and normal-mode splittings.
//!
//! Spectra are densities per unit angular frequency. The side channel is
//! naturally centered on the emitter frequency `ω0` (offset `Ω'`), the
//! forward channel on the cavity frequency `ωc` (offset `Ω = Ω' + Δ`).
//! A [`FrequencyGrid`] records which center its offsets refer to, and the
//! evaluators convert as needed.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::coherent::{amplitudes, quantum_efficiency_strong_coupling, sinc_t, AmplitudePair};
use crate::dephasing::{
    moments_closed_form_with, qe_dephased, side_emission_total, MomentForm,
};
use crate::grid::{check_ascending, check_time_grid, trapezoid};
use crate::params::{derive_rates, SystemParams};
use crate::{Error, Result, C64};

/// Emission channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Emission into the non-cavity (side) modes, rate `2γ`.
    Side,
    /// Emission through the cavity mirror into the output beam, rate `2κ`.
    Forward,
}

impl Channel {
    /// Frequency reference the closed forms are written in.
    pub fn natural_reference(self) -> FrequencyReference {
        match self {
            Channel::Side => FrequencyReference::Emitter,
            Channel::Forward => FrequencyReference::Cavity,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Side => "side",
            Channel::Forward => "forward",
        }
    }
}

/// Which resonance a frequency offset is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyReference {
    /// Offsets `Ω' = ω - ω0`.
    Emitter,
    /// Offsets `Ω = ω - ωc`.
    Cavity,
}

/// Strictly ascending frequency offsets in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    values: Vec<f64>,
    reference: FrequencyReference,
}

impl FrequencyGrid {
    pub fn new(values: Vec<f64>, reference: FrequencyReference) -> Result<Self> {
        check_ascending(&values)?;
        Ok(Self { values, reference })
    }

    /// `n` uniform points on `[min, max]`.
    pub fn uniform(min: f64, max: f64, n: usize, reference: FrequencyReference) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid("a frequency grid needs at least two points"));
        }
        Self::new(crate::grid::uniform(min, max, n), reference)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn reference(&self) -> FrequencyReference {
        self.reference
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Offsets re-expressed in the channel's natural reference.
    pub(crate) fn offsets_for(&self, channel: Channel, delta: f64) -> Vec<f64> {
        let shift = match (channel.natural_reference(), self.reference) {
            (FrequencyReference::Emitter, FrequencyReference::Cavity) => -delta,
            (FrequencyReference::Cavity, FrequencyReference::Emitter) => delta,
            _ => 0.0,
        };
        self.values.iter().map(|w| w + shift).collect()
    }
}

/// A sampled spectrum with its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: FrequencyGrid,
    pub values: Vec<f64>,
    pub channel: Channel,
    /// Built with pure dephasing.
    pub dephased: bool,
    /// Divided by the total emitted probability in this channel.
    pub normalized: bool,
    /// Produced numerically from a correlation kernel rather than a closed form.
    pub from_kernel: bool,
}

impl Spectrum {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(self.grid.values(), &self.values)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Local maxima, tallest first.
    pub fn peaks(&self) -> Vec<Peak> {
        let v = &self.values;
        let x = self.grid.values();
        let n = v.len();
        let mut peaks: Vec<Peak> = (1..n.saturating_sub(1))
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
            .map(|i| Peak { index: i, position: x[i], height: v[i], fwhm: fwhm_at(x, v, i) })
            .collect();
        peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
        peaks
    }

    /// The two tallest peaks ordered by position, if there are two.
    pub fn doublet(&self) -> Option<(Peak, Peak)> {
        let p = self.peaks();
        if p.len() < 2 {
            return None;
        }
        let (a, b) = (p[0], p[1]);
        Some(if a.position <= b.position { (a, b) } else { (b, a) })
    }

    /// Separation of the two tallest peaks (rad/s).
    pub fn peak_separation(&self) -> Option<f64> {
        self.doublet().map(|(a, b)| b.position - a.position)
    }
}

/// A local maximum of a sampled spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub position: f64,
    pub height: f64,
    /// Full width at half maximum from linearly interpolated crossings, or
    /// `None` if the spectrum does not drop below half height on both sides
    /// within the grid.
    pub fwhm: Option<f64>,
}

fn fwhm_at(x: &[f64], v: &[f64], i: usize) -> Option<f64> {
    let half = 0.5 * v[i];
    let cross = |j: usize, k: usize| x[j] + (half - v[j]) * (x[k] - x[j]) / (v[k] - v[j]);
    let left = (0..i).rev().find(|&j| v[j] < half).map(|j| cross(j, j + 1))?;
    let right = ((i + 1)..v.len()).find(|&j| v[j] < half).map(|j| cross(j - 1, j))?;
    Some(right - left)
}

/// Closed-form coherent spectrum of the given channel, any detuning.
///
/// Side: `(γ/π) |κ - i(Ω' + Δ)|² / |(K/2 - iΔ/2 - iΩ')² + g²|²`.
/// Forward: `(κ/π) g0² / |(K/2 + iΔ/2 - iΩ)² + g²|²`.
/// These are the strong-coupling forms (real `g`), so the forward doublet
/// has equal peak heights at any detuning.
pub fn coherent_spectrum(params: &SystemParams, grid: &FrequencyGrid, channel: Channel) -> Spectrum {
    let r = derive_rates(params);
    let (k, delta) = (r.k, params.delta());
    let offsets = grid.offsets_for(channel, delta);
    let values = offsets
        .iter()
        .map(|&w| match channel {
            Channel::Side => {
                let den = C64::new(0.5 * k, -0.5 * delta - w).powi(2) + r.g_sq;
                let num = C64::new(params.kappa(), -(w + delta));
                params.gamma() / PI * num.norm_sqr() / den.norm_sqr()
            }
            Channel::Forward => {
                let den = C64::new(0.5 * k, 0.5 * delta - w).powi(2) + r.g_sq;
                params.kappa() / PI * params.g0() * params.g0() / den.norm_sqr()
            }
        })
        .collect();
    Spectrum {
        grid: grid.clone(),
        values,
        channel,
        dephased: false,
        normalized: false,
        from_kernel: false,
    }
}

/// Closed-form dephased spectrum of the given channel at resonance.
///
/// The side channel mixes Lorentzian-like terms at `g1`, the forward
/// channel at `g2`, both with half-width `(K + γp)/2`. The side weights
/// follow the first-order `⟨J⟩` in its [`MomentForm::AsPrinted`] variant.
pub fn dephased_spectrum(
    params: &SystemParams,
    grid: &FrequencyGrid,
    channel: Channel,
) -> Result<Spectrum> {
    params.require_resonance()?;
    let r = derive_rates(params);
    let (g0, k, gd, gp, eps) = (params.g0(), r.k, r.big_gamma, params.gamma_p(), r.epsilon);
    let (kappa, gamma) = (params.kappa(), params.gamma());
    let g_sq = r.g_sq;
    let a = k + 0.5 * gp * (3.0 + eps);
    let b = k + 0.5 * gp * (1.0 + eps);
    let slow = k - gp * eps;
    if slow <= 0.0 {
        return Err(Error::DegenerateDenominator(slow));
    }
    // Weight of the terms sharing the `(K + γp)/2` width, common to both
    // channels up to sign.
    let w1 = 1.5 * gd / (k + gp + 4.0 * gp * eps)
        + (2.0 * g_sq - a * (0.5 * gd + gp)) / (a * a + 4.0 * g_sq)
        - (gd - gp) / (k + 2.0 * gp - 4.0 * gp * eps);
    let pre = g0 * g0 / g_sq;
    let half_width = 0.5 * (k + gp);
    let (rate, freq_sq, lead, w1, w2) = match channel {
        Channel::Side => {
            let num = k - 4.0 * g_sq * kappa / (g0 * g0)
                + gp * (1.0 + (1.0 - 2.0 * g_sq / (g0 * g0)) * 0.5 * eps);
            let w2 = 1.0 / slow - num / (b * b + 4.0 * g_sq);
            (gamma, g0 * g0 - 0.25 * (gd + gp).powi(2), kappa + gp, -w1, w2)
        }
        Channel::Forward => {
            let w2 = 1.0 / slow - (k + gp * (1.0 + 0.5 * eps)) / (b * b + 4.0 * g_sq);
            (kappa, g0 * g0 - 0.25 * (gd - gp).powi(2), gamma + gp, w1, w2)
        }
    };
    let values = grid
        .offsets_for(channel, 0.0)
        .iter()
        .map(|&w| {
            let den = C64::new(half_width, -w).powi(2) + freq_sq;
            let t1 = (C64::new(rate / PI, 0.0) / den).re;
            let t2 = (C64::new(lead, -w) * (rate / PI) / den).re;
            pre * (t1 * w1 + t2 * w2)
        })
        .collect();
    Ok(Spectrum {
        grid: grid.clone(),
        values,
        channel,
        dephased: true,
        normalized: false,
        from_kernel: false,
    })
}

/// Two-time correlation kernels sampled on a `(t', τ)` grid, row-major in
/// `t'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationKernel {
    pub params: SystemParams,
    pub t_grid: Vec<f64>,
    pub tau_grid: Vec<f64>,
    /// `⟨E(t' + τ) E*(t')⟩`.
    pub e_kernel: Vec<C64>,
    /// `⟨C(t' + τ) C*(t')⟩`.
    pub c_kernel: Vec<C64>,
}

impl CorrelationKernel {
    pub fn e_at(&self, i_t: usize, j_tau: usize) -> C64 {
        self.e_kernel[i_t * self.tau_grid.len() + j_tau]
    }

    pub fn c_at(&self, i_t: usize, j_tau: usize) -> C64 {
        self.c_kernel[i_t * self.tau_grid.len() + j_tau]
    }

    /// Samples of the requested channel's kernel.
    pub fn channel(&self, channel: Channel) -> &[C64] {
        match channel {
            Channel::Side => &self.e_kernel,
            Channel::Forward => &self.c_kernel,
        }
    }

    /// Kernel multiplied by a constant.
    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            params: self.params,
            t_grid: self.t_grid.clone(),
            tau_grid: self.tau_grid.clone(),
            e_kernel: self.e_kernel.iter().map(|x| x * factor).collect(),
            c_kernel: self.c_kernel.iter().map(|x| x * factor).collect(),
        }
    }
}

/// Correlation kernels with the default `⟨J⟩` form.
pub fn correlation_kernel(
    params: &SystemParams,
    t_grid: &[f64],
    tau_grid: &[f64],
) -> Result<CorrelationKernel> {
    correlation_kernel_with(params, t_grid, tau_grid, MomentForm::FirstOrder)
}

/// Correlation kernels on a `(t', τ)` grid.
///
/// Without dephasing these are the direct products of the exact
/// amplitudes. With dephasing (resonance only) the regression theorem
/// propagates the averaged amplitudes in `τ` from the one-time moments at
/// `t'`:
///
/// ```text
/// ⟨C(t'+τ)C*(t')⟩ = e^{-(K+γp)τ/2} {[cos g2τ - (Γ-γp)/(2g2) sin g2τ] ⟨|C|²⟩
///                                   - i(g0/g2) sin g2τ ⟨E C*⟩}
/// ⟨E(t'+τ)E*(t')⟩ = e^{-(K+γp)τ/2} {[cos g1τ + (Γ+γp)/(2g1) sin g1τ] ⟨|E|²⟩
///                                   - i(g0/g1) sin g1τ ⟨C E*⟩}
/// ```
pub fn correlation_kernel_with(
    params: &SystemParams,
    t_grid: &[f64],
    tau_grid: &[f64],
    form: MomentForm,
) -> Result<CorrelationKernel> {
    check_time_grid(t_grid)?;
    check_time_grid(tau_grid)?;
    let (nt, ntau) = (t_grid.len(), tau_grid.len());
    let mut e_kernel = Vec::with_capacity(nt * ntau);
    let mut c_kernel = Vec::with_capacity(nt * ntau);
    if params.gamma_p() == 0.0 {
        let init = AmplitudePair::excited();
        for &t in t_grid {
            let now = amplitudes(params, t, &init)?;
            for &tau in tau_grid {
                let later = amplitudes(params, t + tau, &init)?;
                e_kernel.push(later.e * now.e.conj());
                c_kernel.push(later.c * now.c.conj());
            }
        }
    } else {
        params.require_resonance()?;
        let r = derive_rates(params);
        let gp = params.gamma_p();
        let mig0 = C64::new(0.0, -params.g0());
        let mut fc = Vec::with_capacity(ntau);
        let mut fe = Vec::with_capacity(ntau);
        for &tau in tau_grid {
            let env = (-0.5 * (r.k + gp) * tau).exp();
            let (s1, s2) = (sinc_t(r.g1, tau), sinc_t(r.g2, tau));
            fc.push((
                ((r.g2 * tau).cos() - s2 * (0.5 * (r.big_gamma - gp))) * env,
                mig0 * s2 * env,
            ));
            fe.push((
                ((r.g1 * tau).cos() + s1 * (0.5 * (r.big_gamma + gp))) * env,
                mig0 * s1 * env,
            ));
        }
        for &t in t_grid {
            let m = moments_closed_form_with(params, t, form)?;
            let pc = m.p_c(params);
            let pe = m.p_e(params);
            let coh = m.coherence(params);
            for j in 0..ntau {
                c_kernel.push(fc[j].0 * pc + fc[j].1 * coh);
                e_kernel.push(fe[j].0 * pe + fe[j].1 * coh.conj());
            }
        }
    }
    Ok(CorrelationKernel {
        params: *params,
        t_grid: t_grid.to_vec(),
        tau_grid: tau_grid.to_vec(),
        e_kernel,
        c_kernel,
    })
}

/// Default tail tolerance for [`normalize_spectrum`].
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-3;

/// Estimated fraction of the spectral weight lying outside the grid.
///
/// Each edge is extrapolated with the local power law `S ∝ |Ω|^{-p}`
/// fitted to its last two samples; the tail integral is then
/// `S_edge |Ω_edge| / (p - 1)`. Grids that do not straddle zero or whose
/// tails do not decay faster than `1/Ω` report an infinite fraction.
pub fn tail_fraction(spectrum: &Spectrum) -> f64 {
    let x = spectrum.grid.values();
    let v = &spectrum.values;
    let n = x.len();
    if n < 4 || x[0] >= 0.0 || x[n - 1] <= 0.0 {
        return f64::INFINITY;
    }
    let edge = |i_edge: usize, i_in: usize| -> f64 {
        let (s_e, s_i) = (v[i_edge], v[i_in]);
        if s_e <= 0.0 {
            return 0.0;
        }
        if s_i <= 0.0 {
            return f64::INFINITY;
        }
        let p = -(s_e / s_i).ln() / (x[i_edge].abs() / x[i_in].abs()).ln();
        if p <= 1.0 || !p.is_finite() {
            f64::INFINITY
        } else {
            s_e * x[i_edge].abs() / (p - 1.0)
        }
    };
    let tails = edge(0, 1) + edge(n - 1, n - 2);
    tails / spectrum.integral()
}

/// Total emitted probability in the spectrum's channel, in closed form.
pub fn channel_weight(params: &SystemParams, channel: Channel, dephased: bool) -> Result<f64> {
    let r = derive_rates(params);
    match (channel, dephased) {
        (Channel::Forward, false) => quantum_efficiency_strong_coupling(params),
        (Channel::Forward, true) => qe_dephased(params),
        (Channel::Side, false) => {
            if r.k == 0.0 {
                return Err(Error::NoDecay);
            }
            let d = params.delta();
            let kappa = params.kappa();
            Ok(params.gamma() / r.k
                * (4.0 * (kappa * kappa + 0.25 * d * d) / (r.k * r.k + 4.0 * r.g_sq) + 1.0))
        }
        (Channel::Side, true) => side_emission_total(params, MomentForm::AsPrinted),
    }
}

/// Normalizes with the default tail tolerance.
pub fn normalize_spectrum(spectrum: &Spectrum, params: &SystemParams) -> Result<Spectrum> {
    normalize_spectrum_with_tolerance(spectrum, params, DEFAULT_TAIL_TOLERANCE)
}

/// Divides a spectrum by the total probability emitted in its channel.
///
/// Closed-form spectra use the closed-form channel weight; kernel spectra
/// use their own trapezoidal integral. Fails if the estimated weight
/// outside the grid exceeds `tail_tolerance`.
pub fn normalize_spectrum_with_tolerance(
    spectrum: &Spectrum,
    params: &SystemParams,
    tail_tolerance: f64,
) -> Result<Spectrum> {
    if spectrum.normalized {
        return Err(Error::AlreadyNormalized);
    }
    let fraction = tail_fraction(spectrum);
    // A NaN fraction compares as None and is rejected too.
    if fraction.partial_cmp(&tail_tolerance).is_none_or(|o| o.is_gt()) {
        return Err(Error::TailTooLarge { fraction, limit: tail_tolerance });
    }
    let weight = if spectrum.from_kernel {
        spectrum.integral()
    } else {
        channel_weight(params, spectrum.channel, spectrum.dephased)?
    };
    let mut out = spectrum.clone();
    out.values.iter_mut().for_each(|v| *v /= weight);
    out.normalized = true;
    Ok(out)
}

/// Normal-mode splittings in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplittingReport {
    /// Side-channel peak separation `2 sqrt(sqrt(g0⁴ + 2g0²κ(κ+γ)) - κ²)`.
    pub delta_omega_s: f64,
    /// Forward-channel peak separation `2 sqrt(g0² - (κ² + γ²)/2)`.
    pub delta_omega_f: f64,
    /// Generalized vacuum Rabi splitting `2g`.
    pub two_g: f64,
}

/// Closed-form peak separations of the two channels together with `2g`.
pub fn normal_mode_splittings(params: &SystemParams) -> Result<SplittingReport> {
    let (g0, kappa, gamma) = (params.g0(), params.kappa(), params.gamma());
    let r = derive_rates(params);
    let g0_sq = g0 * g0;
    let rad_s = (g0_sq * g0_sq + 2.0 * g0_sq * kappa * (kappa + gamma)).sqrt() - kappa * kappa;
    let rad_f = g0_sq - 0.5 * (kappa * kappa + gamma * gamma);
    for (name, value) in [("side splitting", rad_s), ("forward splitting", rad_f), ("g squared", r.g_sq)] {
        if value < 0.0 {
            return Err(Error::NegativeRadicand { name, value });
        }
    }
    Ok(SplittingReport {
        delta_omega_s: 2.0 * rad_s.sqrt(),
        delta_omega_f: 2.0 * rad_f.sqrt(),
        two_g: 2.0 * r.g_sq.sqrt(),
    })
}
