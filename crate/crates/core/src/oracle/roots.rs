//! Exact secular roots from the expanded characteristic polynomials.

use alloc::vec::Vec;

use crate::dephasing::{SecularProblem, SecularSystem};
use crate::params::derive_rates;
use crate::poly::{sort_roots, Poly};
use crate::{Result, C64};

/// `q(z - a)` for a polynomial `q` given low to high, by Horner's scheme
/// on polynomials.
fn shifted(q: &[f64], a: f64) -> Vec<f64> {
    let mut r: Vec<f64> = Vec::new();
    for &c in q.iter().rev() {
        // r <- r (z - a) + c
        let mut next = alloc::vec![0.0; r.len() + 1];
        for (k, &rk) in r.iter().enumerate() {
            next[k + 1] += rk;
            next[k] -= a * rk;
        }
        next[0] += c;
        r = next;
    }
    r
}

fn times_linear(p: &[f64], root: f64) -> Vec<f64> {
    let mut out = alloc::vec![0.0; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        out[k + 1] += c;
        out[k] -= root * c;
    }
    out
}

/// Expanded characteristic polynomial `det(z I - M)` of the problem, with
/// real coefficients from lowest to highest degree.
///
/// The I- and J-systems factor into a linear term with root `±Γ - γp` and
/// a shifted cubic `w³ + γp w² + (4g0² - Γ²) w - γp Γ²`, with `w = z ∓ Γ`.
pub fn secular_polynomial(problem: &SecularProblem) -> Poly {
    let p = problem.params();
    let gd = derive_rates(p).big_gamma;
    let (g0s, gp) = (p.g0() * p.g0(), problem.gamma_p);
    let cubic = [-gp * gd * gd, 4.0 * g0s - gd * gd, gp, 1.0];
    match problem.label {
        SecularSystem::MeanAmplitude => Poly::from_real(&[g0s, gd + gp, 1.0]),
        SecularSystem::I => Poly::from_real(&times_linear(&shifted(&cubic, gd), gd - gp)),
        SecularSystem::J => Poly::from_real(&times_linear(&shifted(&cubic, -gd), -gd - gp)),
        SecularSystem::H => Poly::from_real(&[
            8.0 * g0s * gp * gp,
            4.0 * gp * (gp * gp - gd * gd) + 12.0 * g0s * gp,
            9.0 * gp * gp - gd * gd + 4.0 * g0s,
            6.0 * gp,
            1.0,
        ]),
    }
}

/// Roots of `det(z I - M) = 0`, sorted by real part then imaginary part.
///
/// The factored root of the I- and J-systems is returned exactly; every
/// other root comes from companion-matrix eigenvalues.
pub fn secular_roots_exact(problem: &SecularProblem) -> Result<Vec<C64>> {
    let p = problem.params();
    let gd = derive_rates(p).big_gamma;
    let gp = problem.gamma_p;
    let g0s = p.g0() * p.g0();
    let cubic = [-gp * gd * gd, 4.0 * g0s - gd * gd, gp, 1.0];
    let mut roots = match problem.label {
        SecularSystem::I | SecularSystem::J => {
            let (shift, factored) = if problem.label == SecularSystem::I {
                (gd, gd - gp)
            } else {
                (-gd, -gd - gp)
            };
            let mut r: Vec<C64> = Poly::from_real(&cubic)
                .roots()?
                .into_iter()
                .map(|w| w + shift)
                .collect();
            r.push(C64::new(factored, 0.0));
            r
        }
        _ => secular_polynomial(problem).roots()?,
    };
    sort_roots(&mut roots);
    Ok(roots)
}
