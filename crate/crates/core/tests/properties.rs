//! Randomized invariants over the strong-coupling parameter region.

use proptest::prelude::*;
use sps_core::coherent::*;
use sps_core::dephasing::*;
use sps_core::grid::uniform;
use sps_core::linalg::CMatrix;
use sps_core::oracle::{monte_carlo_moments, secular_polynomial, simulate_chunk, MonteCarloAccumulator, MC_CHUNK};
use sps_core::params::derive_rates;
use sps_core::poly::Poly;
use sps_core::spectra::*;
use sps_core::{SystemParams, C64};

/// Strong-coupling parameter sets in GHz: g0 in [4, 12], κ and γ small
/// enough that g stays real and well separated from the decay rates.
fn strong() -> impl Strategy<Value = (f64, f64, f64)> {
    (4.0..12.0f64, 0.2..2.0f64, 0.0..0.8f64)
}

fn coherent_params() -> impl Strategy<Value = SystemParams> {
    (strong(), -3.0..3.0f64)
        .prop_map(|((g0, k, g), d)| SystemParams::from_ghz(g0, k, g, 0.0, d).unwrap())
}

fn dephased_params() -> impl Strategy<Value = SystemParams> {
    (strong(), 0.0..4.0f64)
        .prop_map(|((g0, k, g), gp)| SystemParams::from_ghz(g0, k, g, gp, 0.0).unwrap())
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn propagator_composes(p in coherent_params(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let k = derive_rates(&p).k;
        let (s, t) = (a * 3.0 / k, b * 3.0 / k);
        let ps = propagator(&p, s).unwrap();
        let pt = propagator(&p, t).unwrap();
        let pst = propagator(&p, s + t).unwrap();
        // The interaction frame rotates at the detuning, so propagators of
        // consecutive intervals compose with the phase picked up over `s`.
        let init = AmplitudePair::new(0.0, C64::new(0.6, 0.1), C64::new(-0.2, 0.7));
        let direct = amplitudes(&p, s + t, &init).unwrap();
        let mid = amplitudes(&p, s, &init).unwrap();
        let ph = C64::from_polar(1.0, p.delta() * s);
        let step = AmplitudePair::new(0.0, mid.e, mid.c * ph);
        let later = amplitudes(&p, t, &step).unwrap();
        prop_assert!(close(later.e, direct.e, 1e-10));
        prop_assert!(close(later.c * ph.conj(), direct.c, 1e-10));
        if p.delta() == 0.0 {
            for i in 0..2 {
                for j in 0..2 {
                    let prod = pt[i][0] * ps[0][j] + pt[i][1] * ps[1][j];
                    prop_assert!(close(prod, pst[i][j], 1e-10));
                }
            }
        }
    }

    #[test]
    fn probability_is_conserved(p in coherent_params()) {
        let k = derive_rates(&p).k;
        let grid = uniform(0.0, 6.0 / k, 3001);
        let tr = probabilities(&p, &grid).unwrap();
        for total in tr.total() {
            prop_assert!((total - 1.0).abs() < 1e-4, "total {total}");
        }
        for w in tr.p_out.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-15);
        }
    }

    #[test]
    fn efficiency_is_a_probability(p in coherent_params()) {
        let eta = quantum_efficiency(&p).unwrap();
        prop_assert!((0.0..=1.0).contains(&eta));
        let sc = quantum_efficiency_strong_coupling(&p).unwrap();
        prop_assert!((0.0..=1.0).contains(&sc));
    }

    #[test]
    fn emission_probability_grows_towards_efficiency(p in coherent_params()) {
        let k = derive_rates(&p).k;
        let eta = quantum_efficiency(&p).unwrap();
        let mut last = 0.0;
        for t in uniform(0.0, 10.0 / k, 201) {
            let now = emission_probability(&p, t).unwrap();
            prop_assert!(now >= last - 1e-14);
            prop_assert!(now <= eta + 1e-12);
            last = now;
        }
    }

    #[test]
    fn dephasing_never_raises_efficiency(
        g0 in 4.0..12.0f64,
        k in 0.2..2.0f64,
        side_fraction in 0.1..0.5f64,
        a in 0.0..0.3f64,
        b in 0.0..0.3f64,
    ) {
        // The first-order efficiency is only monotone while γp ≪ g0 and the
        // side channel is not negligible: at γ = 0 it exceeds one.
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let g = side_fraction * k;
        let at = |x: f64| qe_dephased(&SystemParams::from_ghz(g0, k, g, x * g0, 0.0).unwrap()).unwrap();
        prop_assert!(at(hi) <= at(lo) + 1e-15);
    }

    #[test]
    fn spectra_are_nonnegative(p in dephased_params(), d in -3.0..3.0f64) {
        let grid = FrequencyGrid::uniform(-5.0 * p.g0(), 5.0 * p.g0(), 801, FrequencyReference::Cavity).unwrap();
        let detuned = p.with_gamma_p(0.0).unwrap().with_delta(d * p.g0()).unwrap();
        for channel in [Channel::Side, Channel::Forward] {
            prop_assert!(coherent_spectrum(&detuned, &grid, channel).min_value() >= 0.0);
        }
        let side = dephased_spectrum(&p, &grid, Channel::Side).unwrap();
        prop_assert!(side.min_value() >= -1e-9 * side.max_value());
    }

    #[test]
    fn dephased_forward_wings_dip_at_second_order(p in dephased_params()) {
        // The first-order forward spectrum carries a spurious negative
        // 1/Ω² wing; the exact one falls off as 1/Ω⁴.
        let grid = FrequencyGrid::uniform(-5.0 * p.g0(), 5.0 * p.g0(), 801, FrequencyReference::Cavity).unwrap();
        let s = dephased_spectrum(&p, &grid, Channel::Forward).unwrap();
        let second_order = (p.gamma_p() / p.g0()).powi(2);
        prop_assert!(s.min_value() >= -0.25 * second_order * s.max_value());
    }

    #[test]
    fn secular_polynomial_is_the_determinant(p in dephased_params(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let z = C64::new(re, im) * p.g0();
        for which in [SecularSystem::MeanAmplitude, SecularSystem::I, SecularSystem::J, SecularSystem::H] {
            let problem = SecularProblem::new(&p, which).unwrap();
            let n = problem.resolvent_matrix(z).det();
            let poly = secular_polynomial(&problem).eval(z);
            let scale = (z.norm() + 4.0 * p.g0()).powi(problem.m0.dim() as i32);
            prop_assert!((n - poly).norm() <= 1e-11 * scale, "{which:?}");
        }
    }

    #[test]
    fn polynomial_roots_recovered(roots in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..6)) {
        let roots: Vec<C64> = roots.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for r in &roots {
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i] -= c * r;
                next[i + 1] += c;
            }
            coeffs = next;
        }
        let poly = Poly::new(coeffs);
        let found = poly.roots().unwrap();
        prop_assert_eq!(found.len(), roots.len());
        // Clustered roots are only determined to about sqrt(eps); judge
        // each found root by its residual relative to the coefficient size.
        let size: f64 = poly.coeffs().iter().map(|c| c.norm()).sum();
        for z in &found {
            let scale = size * (1.0 + z.norm()).powi(roots.len() as i32);
            prop_assert!(poly.eval(*z).norm() <= 1e-11 * scale);
        }
        let sum_found: C64 = found.iter().sum();
        let sum_true: C64 = roots.iter().sum();
        prop_assert!(close(sum_found, sum_true, 1e-8 * (1.0 + sum_true.norm())));
    }

    #[test]
    fn matrix_exponential_inverts(entries in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 16)) {
        let rows: Vec<Vec<C64>> = entries.chunks(4).map(|r| r.iter().map(|&(a, b)| C64::new(a, b)).collect()).collect();
        let refs: Vec<&[C64]> = rows.iter().map(|r| r.as_slice()).collect();
        let a = CMatrix::from_rows(&refs).unwrap();
        let forward = a.expm().unwrap();
        let back = a.scale(C64::new(-1.0, 0.0)).expm().unwrap();
        let err = forward.mul(&back).sub(&CMatrix::identity(4)).max_abs();
        prop_assert!(err < 1e-9 * forward.max_abs().max(1.0) * back.max_abs().max(1.0), "{err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monte_carlo_chunks_are_deterministic(seed in any::<u64>(), n in 1usize..600, gp in 0.5..3.0f64) {
        let p = SystemParams::from_ghz(8.0, 1.6, 0.32, gp, 0.0).unwrap();
        let grid = uniform(0.0, 1.0 / derive_rates(&p).k, 1601);
        let whole = monte_carlo_moments(&p, &grid, n, seed).unwrap();
        let chunks = n.div_ceil(MC_CHUNK);
        let mut merged = MonteCarloAccumulator::new(grid.len());
        for c in 0..chunks {
            merged.merge(&simulate_chunk(&p, &grid, n, seed, c).unwrap()).unwrap();
        }
        prop_assert_eq!(merged.n_traj(), n);
        prop_assert_eq!(merged.finish(&grid, seed).unwrap(), whole);
    }
}
