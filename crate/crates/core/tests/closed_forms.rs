//! Reference values and documented behaviour of the closed forms, frozen
//! from independent evaluations (ODE quadrature, exact averaged systems,
//! direct arithmetic).

use sps_core::coherent::*;
use sps_core::dephasing::*;
use sps_core::grid::{trapezoid, uniform};
use sps_core::oracle::exact_one_time_moments;
use sps_core::params::*;
use sps_core::spectra::*;

fn params(gp_ghz: f64, delta_over_g0: f64) -> SystemParams {
    SystemParams::from_ghz(8.0, 1.6, 0.32, gp_ghz, delta_over_g0).unwrap()
}

#[test]
fn derived_rates_identities() {
    for (k, g) in [(1.6, 0.32), (0.4, 2.0), (3.0, 3.0)] {
        let p = SystemParams::from_ghz(8.0, k, g, 0.0, 0.0).unwrap();
        let r = derive_rates(&p);
        assert_eq!(r, derive_rates(&p));
        let g0 = p.g0();
        assert!((r.g_sq + 0.25 * r.big_gamma.powi(2) - g0 * g0).abs() <= 4.0 * f64::EPSILON * g0 * g0);
        assert!((r.epsilon * 4.0 * r.g_sq - r.big_gamma.powi(2)).abs() <= 1e-15 * g0 * g0);
        assert_eq!(r.g1, r.g2);
        assert!((r.g1 - r.g).norm() <= 1e-15 * g0);
    }
}

#[test]
fn regime_examples() {
    assert!(validate_regime(&params(1.0, 0.0), 10.0).unwrap().all_pass());
    let equal = SystemParams::new(2.0, 2.0, 0.5, 0.0, 0.0).unwrap();
    let rep = validate_regime(&equal, 10.0).unwrap();
    let coupling = rep.checks.iter().find(|c| c.name.starts_with("g0")).unwrap();
    assert_eq!(coupling.ratio, 1.0);
    assert!(!coupling.pass);
}

#[test]
fn quantum_efficiency_frozen_and_quadrature() {
    let p = params(0.0, 0.0);
    let eta = quantum_efficiency(&p).unwrap();
    assert!((eta - 0.826_719_576_7).abs() < 1e-10);
    let k = derive_rates(&p).k;
    let grid = uniform(0.0, 20.0 / k, 40_001);
    let pc: Vec<f64> = grid
        .iter()
        .map(|&t| 2.0 * p.kappa() * amplitudes(&p, t, &AmplitudePair::excited()).unwrap().c.norm_sqr())
        .collect();
    assert!((trapezoid(&grid, &pc) - eta).abs() < 1e-5);
    let no_side = SystemParams::from_ghz(8.0, 1.6, 0.0, 0.0, 0.0).unwrap();
    assert!((quantum_efficiency(&no_side).unwrap() - 1.0).abs() < 1e-14);
    let weak = SystemParams::from_ghz(1e-9, 1.6, 0.32, 0.0, 0.0).unwrap();
    assert!(quantum_efficiency(&weak).unwrap() < 1e-12);
}

#[test]
fn detuned_efficiency_exact_versus_strong_coupling() {
    // Values confirmed by ODE quadrature of 2κ|C|².
    let p = params(0.0, 2.4);
    assert!((quantum_efficiency(&p).unwrap() - 0.4609).abs() < 1e-4);
    assert!((quantum_efficiency_strong_coupling(&p).unwrap() - 0.3404).abs() < 1e-4);
}

#[test]
fn strong_coupling_propagator_close_to_exact() {
    let p = params(0.0, 0.0);
    let k = derive_rates(&p).k;
    for t in uniform(0.0, 5.0 / k, 101) {
        let a = propagator(&p, t).unwrap();
        let b = propagator_with(&p, t, PropagatorForm::StrongCoupling).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).norm() < 1e-3);
            }
        }
    }
}

#[test]
fn cavity_population_oscillates_at_two_g() {
    let p = params(0.0, 0.0);
    let r = derive_rates(&p);
    let grid = uniform(0.0, 2.0 / r.k, 20_001);
    let tr = probabilities(&p, &grid).unwrap();
    let maxima: Vec<f64> = (1..grid.len() - 1)
        .filter(|&i| tr.p_c[i] > tr.p_c[i - 1] && tr.p_c[i] >= tr.p_c[i + 1])
        .map(|i| grid[i])
        .collect();
    let period = (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64;
    let freq = 2.0 * core::f64::consts::PI / period;
    assert!((freq / (2.0 * r.g.re) - 1.0).abs() < 1e-3, "{freq} vs {}", 2.0 * r.g.re);
}

#[test]
fn emitter_and_cavity_oscillate_in_antiphase() {
    // Each cavity maximum is followed by an emitter zero after the fixed
    // lag (atan(K/2g) + atan(Γ/2g))/g, a small fraction of the π/g period.
    let p = params(0.0, 0.0);
    let r = derive_rates(&p);
    let g = r.g.re;
    let grid = uniform(0.0, 4.0 / r.k, 40_001);
    let step = grid[1];
    let tr = probabilities(&p, &grid).unwrap();
    let extrema = |v: &[f64], max: bool| -> Vec<f64> {
        (1..v.len() - 1)
            .filter(|&i| if max { v[i] > v[i - 1] && v[i] >= v[i + 1] } else { v[i] < v[i - 1] && v[i] <= v[i + 1] })
            .map(|i| grid[i])
            .collect()
    };
    let lag = ((0.5 * r.k / g).atan() + (0.5 * r.big_gamma / g).atan()) / g;
    assert!(lag < 0.1 * core::f64::consts::PI / g);
    let minima = extrema(&tr.p_e, false);
    let maxima = extrema(&tr.p_c, true);
    assert!(maxima.len() >= 4);
    for t in maxima {
        let next = minima.iter().copied().find(|&m| m > t).unwrap();
        assert!((next - t - lag).abs() <= step, "lag {} vs {lag}", next - t);
    }
}

#[test]
fn long_time_forward_emission_is_the_efficiency() {
    for d in [0.0, 0.8, -2.4] {
        let p = params(0.0, d);
        let k = derive_rates(&p).k;
        let grid = uniform(0.0, 20.0 / k, 20_001);
        let tr = probabilities(&p, &grid).unwrap();
        let eta = quantum_efficiency(&p).unwrap();
        if d == 0.0 {
            assert!((tr.p_out.last().unwrap() - eta).abs() < 1e-5);
        }
        for total in tr.total() {
            assert!((total - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn dephased_efficiency_frozen() {
    let eta0 = qe_dephased(&params(0.0, 0.0)).unwrap();
    assert!((eta0 - quantum_efficiency(&params(0.0, 0.0)).unwrap()).abs() < 1e-12);
    let drop = eta0 - qe_dephased(&params(4.0, 0.0)).unwrap();
    assert!((drop - 0.012_017_446_8).abs() < 1e-9, "{drop}");
    let mut last = eta0;
    for i in 1..=40 {
        let eta = qe_dephased(&params(0.1 * i as f64, 0.0)).unwrap();
        assert!(eta <= last);
        last = eta;
    }
}

#[test]
fn dephased_emission_long_time_limit() {
    for gp in [1.0, 2.5, 4.0] {
        let p = params(gp, 0.0);
        let k = derive_rates(&p).k;
        let at = emission_probability_dephased(&p, 20.0 / k).unwrap();
        assert!((at - qe_dephased(&p).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn dephased_reduces_to_coherent() {
    let p = params(0.0, 0.0);
    let k = derive_rates(&p).k;
    let grid = uniform(0.0, 5.0 / k, 501);
    let a = dephased_probabilities(&p, &grid).unwrap();
    let b = probabilities(&p, &grid).unwrap();
    for i in 0..grid.len() {
        assert!((a.p_c[i] - b.p_c[i]).abs() < 1e-10);
        assert!((a.p_e[i] - b.p_e[i]).abs() < 1e-10);
        assert!((a.p_out[i] - b.p_out[i]).abs() < 1e-10);
    }
    for &t in &grid[..50] {
        let x = mean_amplitudes_dephased(&p, t, &AmplitudePair::excited()).unwrap();
        let y = amplitudes(&p, t, &AmplitudePair::excited()).unwrap();
        assert!((x.e - y.e).norm() < 1e-10 && (x.c - y.c).norm() < 1e-10);
    }
}

#[test]
fn modulation_depth_falls_with_dephasing() {
    let k = derive_rates(&params(0.0, 0.0)).k;
    let grid = uniform(0.0, 5.0 / k, 5001);
    let depth = |gp| {
        let tr = dephased_probabilities(&params(gp, 0.0), &grid).unwrap();
        modulation_depth(&tr.p_c).unwrap()
    };
    let (d1, d2) = (depth(1.0), depth(2.5));
    assert!(d2 < d1, "{d1} vs {d2}");
}

#[test]
fn closed_moments_positivity_and_frequency_shift() {
    let p = params(2.5, 0.0);
    let r = derive_rates(&p);
    let grid = uniform(0.0, 5.0 / r.k, 2001);
    for (t, exact) in grid.iter().zip(exact_one_time_moments(&p, &grid).unwrap()) {
        assert!(exact.i >= -1e-12 && exact.j >= -1e-12);
        let c = moments_closed_form(&p, *t).unwrap();
        assert!(c.i >= -1e-3 && c.j >= -1e-3);
    }
    // Oscillation frequency of the exact ⟨I⟩ from the generator spectrum.
    let problem = SecularProblem::new(&p, SecularSystem::I).unwrap();
    let roots = sps_core::oracle::secular_roots_exact(&problem).unwrap();
    let freq = roots.iter().map(|z| z.im).fold(0.0, f64::max);
    let g = r.g.re;
    let shift_pred = 2.0 * g * p.gamma_p().powi(2) / (32.0 * g * g);
    let shift = 2.0 * g - freq;
    assert!((shift - shift_pred).abs() < 0.1 * shift_pred, "{shift} vs {shift_pred}");
}

#[test]
fn splittings_frozen() {
    let rep = normal_mode_splittings(&params(0.0, 0.0)).unwrap();
    let ghz = |x: f64| rad_s_to_ghz(x);
    assert!((ghz(rep.delta_omega_f) - 15.832_725_6).abs() < 1e-6);
    assert!((ghz(rep.delta_omega_s) - 16.055_106_6).abs() < 1e-6);
    assert!((ghz(rep.two_g) - 15.948_717_8).abs() < 1e-6);
    assert!(rep.delta_omega_s > rep.two_g && rep.two_g > rep.delta_omega_f);
    let lossless = SystemParams::from_ghz(8.0, 0.0, 0.0, 0.0, 0.0).unwrap();
    let l = normal_mode_splittings(&lossless).unwrap();
    assert!((l.delta_omega_f - 2.0 * lossless.g0()).abs() < 1e-6);
    assert!((l.delta_omega_s - 2.0 * lossless.g0()).abs() < 1e-6);
}

#[test]
fn numeric_forward_splitting_on_fine_grid() {
    let p = params(0.0, 0.0);
    let grid = FrequencyGrid::uniform(-3.0 * p.g0(), 3.0 * p.g0(), 8001, FrequencyReference::Cavity)
        .unwrap();
    let step = grid.values()[1] - grid.values()[0];
    let s = coherent_spectrum(&p, &grid, Channel::Forward);
    let sep = s.peak_separation().unwrap();
    let want = normal_mode_splittings(&p).unwrap().delta_omega_f;
    assert!((sep - want).abs() <= step);
}

#[test]
fn detuned_peak_heights() {
    let p = params(0.0, 2.4);
    let grid = FrequencyGrid::uniform(-5.0 * p.g0(), 5.0 * p.g0(), 40_001, FrequencyReference::Cavity)
        .unwrap();
    let f = coherent_spectrum(&p, &grid, Channel::Forward);
    let (a, b) = f.doublet().unwrap();
    assert!((a.height - b.height).abs() <= 1e-6 * a.height);
    let grid_e = FrequencyGrid::uniform(-5.0 * p.g0(), 5.0 * p.g0(), 40_001, FrequencyReference::Emitter)
        .unwrap();
    let s = coherent_spectrum(&p, &grid_e, Channel::Side);
    let (a, b) = s.doublet().unwrap();
    assert!((a.height - b.height).abs() > 1e-3 * a.height);
}

#[test]
fn side_spectrum_mirrors_with_detuning() {
    let plus = params(0.0, 1.6);
    let minus = params(0.0, -1.6);
    let grid = FrequencyGrid::uniform(-4.0 * plus.g0(), 4.0 * plus.g0(), 2001, FrequencyReference::Emitter)
        .unwrap();
    let a = coherent_spectrum(&plus, &grid, Channel::Side);
    let b = coherent_spectrum(&minus, &grid, Channel::Side);
    let n = grid.len();
    for i in 0..n {
        let (x, y) = (a.values[i], b.values[n - 1 - i]);
        assert!((x - y).abs() <= 1e-12 * x.max(y));
    }
}

#[test]
fn parseval_integrals() {
    let p = params(0.0, 0.0);
    let r = derive_rates(&p);
    let g = r.g.re;
    let eta = quantum_efficiency(&p).unwrap();
    for ch in [Channel::Forward, Channel::Side] {
        let grid = FrequencyGrid::uniform(-40.0 * g, 40.0 * g, 200_001, ch.natural_reference()).unwrap();
        let s = coherent_spectrum(&p, &grid, ch);
        let want = if ch == Channel::Forward { eta } else { 1.0 - eta };
        assert!((s.integral() - want).abs() < 1e-3, "{ch:?}: {}", s.integral());
        if ch == Channel::Forward {
            let n = normalize_spectrum(&s, &p).unwrap();
            assert!((n.integral() - 1.0).abs() < 1e-3);
        }
    }
}

#[test]
fn dephasing_broadens_and_lowers_peaks() {
    let base = params(0.0, 0.0);
    let grid_for = |ch: Channel| {
        FrequencyGrid::uniform(-40.0 * base.g0(), 40.0 * base.g0(), 160_001, ch.natural_reference())
            .unwrap()
    };
    for ch in [Channel::Side, Channel::Forward] {
        let grid = grid_for(ch);
        let mut last: Option<(f64, f64)> = None;
        for gp in [0.0, 1.0, 2.5] {
            let p = params(gp, 0.0);
            let s = dephased_spectrum(&p, &grid, ch).unwrap();
            // The side channel keeps a 1/Ω² tail, 0.4% of its weight
            // beyond ±40 g0.
            let n = normalize_spectrum_with_tolerance(&s, &p, 5e-2).unwrap();
            let (a, _) = n.doublet().unwrap();
            let fwhm = a.fwhm.unwrap();
            if let Some((h, w)) = last {
                assert!(a.height < h && fwhm > w, "{ch:?} at γp = {gp}");
            }
            last = Some((a.height, fwhm));
        }
    }
}
