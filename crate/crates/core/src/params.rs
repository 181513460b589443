//! Physical parameters, derived rates and the strong-coupling regime check.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Converts a `rate / 2π` value in GHz into an angular frequency in rad/s.
pub fn ghz_to_rad_s(ghz: f64) -> f64 {
    ghz * 2.0 * PI * 1e9
}

/// Converts an angular frequency in rad/s into `rate / 2π` in GHz.
pub fn rad_s_to_ghz(rate: f64) -> f64 {
    rate / (2.0 * PI * 1e9)
}

/// The five rates defining an emitter-cavity system, all in rad/s.
///
/// Fields are private so that the invariants (`g0 > 0`, decay rates
/// nonnegative, everything finite) hold for every value in circulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    g0: f64,
    kappa: f64,
    gamma: f64,
    gamma_p: f64,
    delta: f64,
}

impl SystemParams {
    /// Builds a parameter set from angular frequencies (rad/s).
    ///
    /// `kappa` and `gamma` are half the cavity-field and side-mode
    /// population decay rates, `2 * gamma_p` is the pure dephasing rate and
    /// `delta` is the emitter-cavity detuning.
    pub fn new(g0: f64, kappa: f64, gamma: f64, gamma_p: f64, delta: f64) -> Result<Self> {
        let check = |name: &'static str, value: f64, ok: bool, reason: &'static str| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value, reason })
            }
        };
        check("g0", g0, g0 > 0.0, "must be positive and finite")?;
        check("kappa", kappa, kappa >= 0.0, "must be nonnegative and finite")?;
        check("gamma", gamma, gamma >= 0.0, "must be nonnegative and finite")?;
        check("gamma_p", gamma_p, gamma_p >= 0.0, "must be nonnegative and finite")?;
        check("delta", delta, true, "must be finite")?;
        Ok(Self { g0, kappa, gamma, gamma_p, delta })
    }

    /// Builds a parameter set from `rate / 2π` values in GHz, with the
    /// detuning given as the ratio `Δ / g0`.
    pub fn from_ghz(
        g0_ghz: f64,
        kappa_ghz: f64,
        gamma_ghz: f64,
        gamma_p_ghz: f64,
        delta_over_g0: f64,
    ) -> Result<Self> {
        let g0 = ghz_to_rad_s(g0_ghz);
        Self::new(
            g0,
            ghz_to_rad_s(kappa_ghz),
            ghz_to_rad_s(gamma_ghz),
            ghz_to_rad_s(gamma_p_ghz),
            delta_over_g0 * g0,
        )
    }

    /// The reference device: `(g0, κ, γ) / 2π = (8.0, 1.6, 0.32)` GHz,
    /// resonant and without pure dephasing.
    pub fn reference() -> Self {
        Self::from_ghz(8.0, 1.6, 0.32, 0.0, 0.0).expect("reference parameters are valid")
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn gamma_p(&self) -> f64 {
        self.gamma_p
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same system with a different phase-diffusion coefficient (rad/s).
    pub fn with_gamma_p(self, gamma_p: f64) -> Result<Self> {
        Self::new(self.g0, self.kappa, self.gamma, gamma_p, self.delta)
    }

    /// Same system with a different detuning (rad/s).
    pub fn with_delta(self, delta: f64) -> Result<Self> {
        Self::new(self.g0, self.kappa, self.gamma, self.gamma_p, delta)
    }

    /// Same system with a different coupling rate (rad/s).
    pub fn with_g0(self, g0: f64) -> Result<Self> {
        Self::new(g0, self.kappa, self.gamma, self.gamma_p, self.delta)
    }

    /// Same system with a different cavity decay rate (rad/s).
    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(self.g0, kappa, self.gamma, self.gamma_p, self.delta)
    }

    /// Same system with a different side-mode decay rate (rad/s).
    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(self.g0, self.kappa, gamma, self.gamma_p, self.delta)
    }

    /// Fails with [`Error::RequiresResonance`] unless `Δ = 0`.
    pub(crate) fn require_resonance(&self) -> Result<()> {
        if self.delta == 0.0 {
            Ok(())
        } else {
            Err(Error::RequiresResonance(self.delta))
        }
    }
}

/// Rates derived from [`SystemParams`].
///
/// `lambda`, `g`, `g1` and `g2` are principal complex square roots so that
/// every parameter regime is representable; use [`require_real`] where a
/// real frequency is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Total decay rate `κ + γ`.
    pub k: f64,
    /// Decay-rate difference `κ - γ`.
    pub big_gamma: f64,
    /// Exact complex frequency `sqrt(g0² - ((Γ - iΔ)/2)²)`.
    pub lambda: C64,
    /// Generalized vacuum Rabi frequency `sqrt(g0² + Δ²/4 - Γ²/4)`.
    pub g: C64,
    /// `g²`, always real.
    pub g_sq: f64,
    /// Dephasing-shifted frequency `sqrt(g0² - (Γ + γp)²/4)`.
    pub g1: C64,
    /// Dephasing-shifted frequency `sqrt(g0² - (Γ - γp)²/4)`.
    pub g2: C64,
    /// `(Γ / 2g)²`.
    pub epsilon: f64,
}

impl DerivedRates {
    /// `g` as a real number, failing outside the underdamped regime.
    pub fn real_g(&self) -> Result<f64> {
        require_real("g", self.g)
    }
}

/// Principal complex square root of a real number.
pub(crate) fn csqrt_real(x: f64) -> C64 {
    if x >= 0.0 {
        C64::new(x.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-x).sqrt())
    }
}

/// Returns the real part of `value` if its imaginary part is negligible
/// (at most `1e-12 |value|`).
pub fn require_real(name: &'static str, value: C64) -> Result<f64> {
    if value.im.abs() <= 1e-12 * value.norm() {
        Ok(value.re)
    } else {
        Err(Error::NotReal { name, value })
    }
}

/// Computes every derived rate from its defining expression.
pub fn derive_rates(params: &SystemParams) -> DerivedRates {
    let (g0, kappa, gamma, gp, delta) =
        (params.g0, params.kappa, params.gamma, params.gamma_p, params.delta);
    let k = kappa + gamma;
    let big_gamma = kappa - gamma;
    let half = C64::new(big_gamma, -delta) * 0.5;
    let lambda = (C64::new(g0 * g0, 0.0) - half * half).sqrt();
    let g_sq = g0 * g0 + 0.25 * delta * delta - 0.25 * big_gamma * big_gamma;
    let g = csqrt_real(g_sq);
    let g1 = csqrt_real(g0 * g0 - 0.25 * (big_gamma + gp) * (big_gamma + gp));
    let g2 = csqrt_real(g0 * g0 - 0.25 * (big_gamma - gp) * (big_gamma - gp));
    let epsilon = if big_gamma == 0.0 { 0.0 } else { big_gamma * big_gamma / (4.0 * g_sq) };
    DerivedRates { k, big_gamma, lambda, g, g_sq, g1, g2, epsilon }
}

/// One line of a [`RegimeReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCheck {
    pub name: &'static str,
    /// Ratio compared against the threshold (`+inf` when the reference
    /// quantity vanishes).
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Advisory report on how deep into the strong-coupling regime a
/// parameter set sits. Closed forms still evaluate when checks fail.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub checks: Vec<RegimeCheck>,
}

impl RegimeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Default ratio used to interpret "much greater than".
pub const DEFAULT_REGIME_THRESHOLD: f64 = 10.0;

/// Compares `4g0² - Γ²` with `Γ²` and `γp²`, and `g0²` with `max(κ, γ)²`.
///
/// All three checks are ratios of squared rates, so the same threshold
/// means the same thing in each.
pub fn validate_regime(params: &SystemParams, ratio_threshold: f64) -> Result<RegimeReport> {
    if !(ratio_threshold > 1.0 && ratio_threshold.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "ratio_threshold",
            value: ratio_threshold,
            reason: "must exceed 1",
        });
    }
    let r = derive_rates(params);
    let gap = 4.0 * params.g0 * params.g0 - r.big_gamma * r.big_gamma;
    let max_decay = params.kappa.max(params.gamma);
    let ratio = |num: f64, den: f64| if den == 0.0 { f64::INFINITY } else { num / den };
    let mk = |name, ratio: f64| RegimeCheck {
        name,
        ratio,
        threshold: ratio_threshold,
        pass: ratio >= ratio_threshold,
    };
    Ok(RegimeReport {
        checks: alloc::vec![
            mk("gap_over_gamma_diff_sq", ratio(gap, r.big_gamma * r.big_gamma)),
            mk("gap_over_gamma_p_sq", ratio(gap, params.gamma_p * params.gamma_p)),
            mk("g0_sq_over_max_decay_sq", ratio(params.g0 * params.g0, max_decay * max_decay)),
        ],
    })
}
