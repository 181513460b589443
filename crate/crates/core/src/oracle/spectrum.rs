//! Spectra by direct double quadrature of a correlation kernel.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::trapezoid;
use crate::params::derive_rates;
use crate::spectra::{Channel, CorrelationKernel, FrequencyGrid, Spectrum, DEFAULT_TAIL_TOLERANCE};
use crate::{Error, Result, C64};

/// Both kernel axes must reach at least this many `1/K`.
pub const MIN_KERNEL_SPAN_OVER_K: f64 = 12.0;

/// A kernel spectrum with its numerical diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpectrum {
    pub spectrum: Spectrum,
    /// Estimated relative weight lost by truncating the `t'` and `τ` axes,
    /// from the analytic decay envelopes.
    pub tail_estimate: f64,
    /// Largest imaginary part of the two-sided `τ` integral before taking
    /// the real part, relative to the spectral peak.
    pub imag_residue: f64,
}

impl KernelSpectrum {
    /// True when the truncation tails exceed [`DEFAULT_TAIL_TOLERANCE`].
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN tail must warn
    pub fn tail_warning(&self) -> bool {
        !(self.tail_estimate <= DEFAULT_TAIL_TOLERANCE)
    }
}

/// Trapezoid weights for an arbitrary ascending grid.
fn trapezoid_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut w = alloc::vec![0.0; n];
    for i in 1..n {
        let h = 0.5 * (x[i] - x[i - 1]);
        w[i - 1] += h;
        w[i] += h;
    }
    w
}

/// `S(Ω) = (rate/π) Re ∫₀^∞ dτ e^{iΩτ} ∫₀^∞ dt' k(t', τ)` with `rate = 2γ`
/// for the side channel and `2κ` for the forward channel.
///
/// The `t'` integral is done once per `τ`. The `τ` integral is evaluated
/// two-sided, pairing `τ` with `-τ` through `k(t', -τ) = k(t', τ)*`, so the
/// result should be real up to rounding; the largest imaginary residue is
/// reported. Frequencies are interpreted in the channel's natural frame
/// after shifting by the detuning if the grid uses the other reference.
pub fn spectrum_from_kernel(
    kernel: &CorrelationKernel,
    channel: Channel,
    grid: &FrequencyGrid,
) -> Result<KernelSpectrum> {
    let params = &kernel.params;
    let r = derive_rates(params);
    if r.k == 0.0 {
        return Err(Error::NoDecay);
    }
    let required = MIN_KERNEL_SPAN_OVER_K / r.k;
    let (nt, ntau) = (kernel.t_grid.len(), kernel.tau_grid.len());
    if nt < 2 || ntau < 2 {
        return Err(Error::InvalidGrid("kernel needs at least two points on each axis"));
    }
    let reached = kernel.t_grid[nt - 1].min(kernel.tau_grid[ntau - 1]);
    if reached < required {
        return Err(Error::KernelTooShort { reached, required });
    }
    let samples = kernel.channel(channel);
    if samples.len() != nt * ntau {
        return Err(Error::DimensionMismatch { expected: nt * ntau, got: samples.len() });
    }
    let rate = match channel {
        Channel::Side => 2.0 * params.gamma(),
        Channel::Forward => 2.0 * params.kappa(),
    };

    // Inner integral over t' for every τ.
    let wt = trapezoid_weights(&kernel.t_grid);
    let mut inner = alloc::vec![C64::new(0.0, 0.0); ntau];
    for (i, w) in wt.iter().enumerate() {
        let row = &samples[i * ntau..(i + 1) * ntau];
        for (acc, &k) in inner.iter_mut().zip(row) {
            *acc += k * *w;
        }
    }

    let wtau = trapezoid_weights(&kernel.tau_grid);
    let offsets = grid.offsets_for(channel, params.delta());
    let mut values = Vec::with_capacity(offsets.len());
    let mut max_imag = 0.0f64;
    for &w in &offsets {
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..ntau {
            let ph = C64::from_polar(1.0, w * kernel.tau_grid[j]);
            sum += (ph * inner[j] + ph.conj() * inner[j].conj()) * wtau[j];
        }
        let sum = sum * (rate / (2.0 * PI));
        max_imag = max_imag.max(sum.im.abs());
        values.push(sum.re);
    }
    let peak = values.iter().copied().fold(0.0f64, |a, v| a.max(v.abs()));
    let imag_residue = if peak > 0.0 { max_imag / peak } else { 0.0 };

    // Truncation tails. Along τ every kernel carries the coherence
    // envelope e^{-(K + γp)τ/2}; along t' the populations decay no slower
    // than the slowest one-time rate.
    let gp = params.gamma_p();
    let tau_rate = 0.5 * (r.k + gp);
    let abs_inner: Vec<f64> = inner.iter().map(|z| z.norm()).collect();
    let tau_total = trapezoid(&kernel.tau_grid, &abs_inner);
    let tau_tail = abs_inner[ntau - 1] / tau_rate;
    let t_rate = if gp == 0.0 { r.k - 2.0 * r.lambda.im.abs() } else { r.k - gp * r.epsilon };
    let last_row: Vec<f64> = samples[(nt - 1) * ntau..].iter().map(|z| z.norm()).collect();
    let t_tail = trapezoid(&kernel.tau_grid, &last_row) / t_rate.max(f64::MIN_POSITIVE);
    let tail_estimate = if tau_total > 0.0 { (tau_tail + t_tail) / tau_total } else { 0.0 };

    Ok(KernelSpectrum {
        spectrum: Spectrum {
            grid: grid.clone(),
            values,
            channel,
            dephased: gp > 0.0,
            normalized: false,
            from_kernel: true,
        },
        tail_estimate,
        imag_residue,
    })
}
