use sps_core::coherent::{amplitudes, AmplitudePair};
use sps_core::dephasing::{moments_closed_form, SecularProblem, SecularSystem};
use sps_core::grid::{cumulative_trapezoid, uniform};
use sps_core::oracle::*;
use sps_core::params::{derive_rates, SystemParams};
use sps_core::spectra::{
    coherent_spectrum, correlation_kernel, Channel, FrequencyGrid, FrequencyReference,
};
use sps_core::{Error, C64};

fn params(gp_ghz: f64, delta_over_g0: f64) -> SystemParams {
    SystemParams::from_ghz(8.0, 1.6, 0.32, gp_ghz, delta_over_g0).unwrap()
}

fn k_of(p: &SystemParams) -> f64 {
    derive_rates(p).k
}

#[test]
fn ode_decoupled_decay() {
    // With the coupling switched off the equations are two independent
    // exponential decays.
    let (gamma, kappa) = (0.7, 2.3);
    let grid = uniform(0.0, 4.0, 81);
    let ys = integrate(
        |_, y: &[C64; 2]| [y[0] * -gamma, y[1] * -kappa],
        &grid,
        [C64::new(1.0, 0.0), C64::new(0.0, 0.6)],
        OdeOptions::default(),
    )
    .unwrap();
    for (t, y) in grid.iter().zip(&ys) {
        assert!((y[0] - C64::new((-gamma * t).exp(), 0.0)).norm() < 1e-10);
        assert!((y[1] - C64::new(0.0, 0.6 * (-kappa * t).exp())).norm() < 1e-10);
    }
}

#[test]
fn ode_matches_propagator_on_and_off_resonance() {
    for d in [0.0, 1.6] {
        let p = params(0.0, d);
        let grid = uniform(0.0, 10.0 / k_of(&p), 1001);
        let ode = integrate_coherent_ode(&p, &AmplitudePair::excited(), &grid).unwrap();
        let worst = ode
            .iter()
            .map(|a| {
                let c = amplitudes(&p, a.t, &AmplitudePair::excited()).unwrap();
                (c.e - a.e).norm().max((c.c - a.c).norm())
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "Δ/g0 = {d}: {worst:e}");
    }
}

#[test]
fn ode_rejects_descending_grid() {
    let p = params(0.0, 0.0);
    let r = integrate_coherent_ode(&p, &AmplitudePair::excited(), &[0.0, 2e-10, 1e-10]);
    assert!(matches!(r, Err(Error::InvalidGrid(_))));
}

#[test]
fn phase_path_contract() {
    let grid = uniform(0.0, 1e-9, 201);
    let still = sample_phase_path(0.0, &grid, 3).unwrap();
    assert!(still.phi.iter().all(|&x| x == 0.0));

    let gp = 2.0 * core::f64::consts::PI * 1e9;
    let a = sample_phase_path(gp, &grid, 99).unwrap();
    let b = sample_phase_path(gp, &grid, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.phi[0], 0.0);

    let n = 10_000;
    let finals: Vec<f64> = (0..n)
        .map(|s| *sample_phase_path_stream(gp, &grid, 5, s).unwrap().phi.last().unwrap())
        .collect();
    let mean = finals.iter().sum::<f64>() / n as f64;
    let var = finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let want = 2.0 * gp * 1e-9;
    assert!((var / want - 1.0).abs() < 0.05, "variance ratio {}", var / want);

    let mut bent = grid.clone();
    bent[100] += 1e-12;
    assert!(matches!(sample_phase_path(gp, &bent, 1), Err(Error::InvalidGrid(_))));
}

#[test]
fn monte_carlo_without_dephasing_is_deterministic_dynamics() {
    let p = params(0.0, 0.0);
    let grid = uniform(0.0, 5.0 / k_of(&p), 2001);
    let mc = monte_carlo_moments(&p, &grid, 3, 1).unwrap();
    let ode = integrate_coherent_ode(&p, &AmplitudePair::excited(), &grid).unwrap();
    for (i, a) in ode.iter().enumerate() {
        assert!((mc.mean_e[i] - a.e).norm() < 1e-8);
        assert!((mc.mean_c[i] - a.c).norm() < 1e-8);
        assert!((mc.mean_h[i] - a.e * a.c.conj()).norm() < 1e-8);
    }
}

#[test]
fn monte_carlo_chunks_merge_in_any_schedule() {
    let p = params(1.0, 0.0);
    let grid = uniform(0.0, 2.0 / k_of(&p), 1601);
    let n = 600;
    let serial = monte_carlo_moments(&p, &grid, n, 42).unwrap();
    // Simulate chunks out of order, merge in order.
    let mut parts: Vec<(usize, MonteCarloAccumulator)> = [2usize, 0, 1]
        .iter()
        .map(|&c| (c, simulate_chunk(&p, &grid, n, 42, c).unwrap()))
        .collect();
    parts.sort_by_key(|(c, _)| *c);
    let mut acc = MonteCarloAccumulator::new(grid.len());
    for (_, part) in &parts {
        acc.merge(part).unwrap();
    }
    assert_eq!(acc.n_traj(), n);
    assert_eq!(acc.finish(&grid, 42).unwrap(), serial);
}

#[test]
fn monte_carlo_standard_errors_shrink_as_inverse_root_n() {
    let p = params(1.0, 0.0);
    let grid = uniform(0.0, 3.0 / k_of(&p), 2401);
    let small = monte_carlo_moments(&p, &grid, 500, 11).unwrap();
    let large = monte_carlo_moments(&p, &grid, 2000, 11).unwrap();
    for i in [600, 1200, 1800, 2400] {
        let ratio = small.stderr_abs2_c[i] / large.stderr_abs2_c[i];
        assert!((1.6..=2.5).contains(&ratio), "t index {i}: ratio {ratio}");
    }
}

#[test]
fn monte_carlo_mean_amplitude_envelope() {
    // The envelope-free mean emitter amplitude decays at (Γ + γp)/2.
    let p = params(1.0, 0.0);
    let r = derive_rates(&p);
    let grid = uniform(0.0, 5.0 / r.k, 4001);
    let mc = monte_carlo_moments(&p, &grid, 4000, 7).unwrap();
    let env: Vec<f64> = grid
        .iter()
        .zip(&mc.mean_e)
        .map(|(t, e)| e.norm() * (p.gamma() * t).exp())
        .collect();
    let maxima: Vec<(f64, f64)> = (1..env.len() - 1)
        .filter(|&i| env[i] > env[i - 1] && env[i] >= env[i + 1])
        .map(|i| (grid[i], env[i].ln()))
        .collect();
    assert!(maxima.len() >= 4);
    let n = maxima.len() as f64;
    let (sx, sy) = maxima.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let slope = maxima.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / maxima.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    let want = 0.5 * (r.big_gamma + p.gamma_p());
    assert!((-slope / want - 1.0).abs() < 0.05, "fitted {} vs {want}", -slope);
}

#[test]
fn monte_carlo_rejects_coarse_steps_and_detuning() {
    let p = params(1.0, 0.0);
    let coarse = uniform(0.0, 5.0 / k_of(&p), 101);
    assert!(matches!(monte_carlo_moments(&p, &coarse, 10, 1), Err(Error::StepTooCoarse { .. })));
    let detuned = params(1.0, 0.8);
    let fine = uniform(0.0, 1e-11, 11);
    assert!(matches!(
        monte_carlo_moments(&detuned, &fine, 10, 1),
        Err(Error::RequiresResonance(_))
    ));
}

#[test]
fn exact_i_system_coherent_limit() {
    let p = params(0.0, 0.0);
    let r = derive_rates(&p);
    let g = r.g.re;
    let problem = SecularProblem::new(&p, SecularSystem::I).unwrap();
    let grid = uniform(0.0, 5.0 / r.k, 401);
    let v = exact_moments_linear_system(&problem, &problem.initial_vector(), &grid).unwrap();
    for (t, row) in grid.iter().zip(&v) {
        let want = p.g0().powi(2) / (g * g) * (r.big_gamma * t).exp() * (g * t).sin().powi(2);
        assert!((row[2].re - want).abs() < 1e-10 * want.max(1.0), "t = {t}");
        assert!(row[2].im.abs() < 1e-10);
    }
}

#[test]
fn exact_h_system_starts_at_zero() {
    let p = params(1.0, 0.0);
    let m = exact_one_time_moments(&p, &[0.0]).unwrap();
    assert_eq!(m[0].h, C64::new(0.0, 0.0));
    assert_eq!(m[0].j, 1.0);
    assert_eq!(m[0].i, 0.0);
}

#[test]
fn exact_dephased_population_balance() {
    for gp in [1.0, 2.5, 4.0] {
        let p = params(gp, 0.0);
        let k = k_of(&p);
        let grid = uniform(0.0, 20.0 / k, 20001);
        let m = exact_one_time_moments(&p, &grid).unwrap();
        let flux: Vec<f64> = m
            .iter()
            .map(|x| 2.0 * p.gamma() * x.p_e(&p) + 2.0 * p.kappa() * x.p_c(&p))
            .collect();
        let emitted = cumulative_trapezoid(&grid, &flux);
        for (x, out) in m.iter().zip(&emitted) {
            assert!((x.p_e(&p) + x.p_c(&p) + out - 1.0).abs() < 1e-4);
        }
    }
}

#[test]
fn closed_form_i_moment_stays_near_exact_at_one_ghz() {
    // Bound recorded from the run: 7.0e-4 on ⟨|C|²⟩.
    let p = params(1.0, 0.0);
    let grid = uniform(0.0, 5.0 / k_of(&p), 1001);
    let exact = exact_one_time_moments(&p, &grid).unwrap();
    let worst = exact
        .iter()
        .map(|x| (moments_closed_form(&p, x.t).unwrap().p_c(&p) - x.p_c(&p)).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 0.02, "{worst}");
}

#[test]
fn exact_roots_coherent_limit_and_residuals() {
    let p0 = params(0.0, 0.0);
    let r = derive_rates(&p0);
    let roots = secular_roots_exact(&SecularProblem::new(&p0, SecularSystem::I).unwrap()).unwrap();
    let g = r.g.re;
    assert_eq!(roots.len(), 4);
    for want in [
        C64::new(r.big_gamma, -2.0 * g),
        C64::new(r.big_gamma, 0.0),
        C64::new(r.big_gamma, 2.0 * g),
    ] {
        assert!(roots.iter().any(|z| (z - want).norm() < 1e-10 * g));
    }

    let p = params(2.5, 0.0);
    let scale = p.g0();
    for label in [SecularSystem::MeanAmplitude, SecularSystem::I, SecularSystem::J, SecularSystem::H] {
        let problem = SecularProblem::new(&p, label).unwrap();
        let roots = secular_roots_exact(&problem).unwrap();
        for w in roots.windows(2) {
            assert!(w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im));
        }
        for z in &roots {
            let det = problem.resolvent_matrix(*z).det().norm();
            assert!(det <= 1e-9 * scale.powi(4), "{label:?}: |det N| = {det:e}");
        }
    }
    let h = secular_roots_exact(&SecularProblem::new(&p, SecularSystem::H).unwrap()).unwrap();
    let sum: C64 = h.iter().sum();
    assert!((sum - C64::new(-6.0 * p.gamma_p(), 0.0)).norm() < 1e-9 * scale);
}

fn kernel_grids(p: &SystemParams) -> (Vec<f64>, Vec<f64>) {
    let k = k_of(p);
    (uniform(0.0, 16.0 / k, 401), uniform(0.0, 24.0 / k, 1201))
}

#[test]
fn kernel_spectrum_reproduces_coherent_closed_form() {
    let p = params(0.0, 0.0);
    let (tg, taug) = kernel_grids(&p);
    let kernel = correlation_kernel(&p, &tg, &taug).unwrap();
    for ch in [Channel::Side, Channel::Forward] {
        let grid = FrequencyGrid::uniform(-3.0 * p.g0(), 3.0 * p.g0(), 1201, ch.natural_reference())
            .unwrap();
        let ks = spectrum_from_kernel(&kernel, ch, &grid).unwrap();
        let cf = coherent_spectrum(&p, &grid, ch);
        let (a, b) = (ks.spectrum.integral(), cf.integral());
        let peak = cf.max_value() / b;
        let dev = ks
            .spectrum
            .values
            .iter()
            .zip(&cf.values)
            .map(|(x, y)| (x / a - y / b).abs())
            .fold(0.0, f64::max);
        assert!(dev / peak < 0.01, "{ch:?}: {}", dev / peak);
        assert!(ks.imag_residue <= 1e-6);
        assert!(!ks.tail_warning());
    }
}

#[test]
fn kernel_spectrum_is_linear() {
    let p = params(1.0, 0.0);
    let (tg, taug) = kernel_grids(&p);
    let kernel = correlation_kernel(&p, &tg, &taug).unwrap();
    let grid = FrequencyGrid::uniform(-2.0 * p.g0(), 2.0 * p.g0(), 101, FrequencyReference::Cavity)
        .unwrap();
    let base = spectrum_from_kernel(&kernel, Channel::Forward, &grid).unwrap();
    let scaled =
        spectrum_from_kernel(&kernel.scaled(C64::new(3.5, 0.0)), Channel::Forward, &grid).unwrap();
    for (x, y) in base.spectrum.values.iter().zip(&scaled.spectrum.values) {
        assert!((3.5 * x - y).abs() <= 1e-12 * y.abs().max(1e-30));
    }
}

#[test]
fn kernel_spectrum_requires_long_kernels() {
    let p = params(0.0, 0.0);
    let k = k_of(&p);
    let kernel = correlation_kernel(&p, &uniform(0.0, 8.0 / k, 101), &uniform(0.0, 24.0 / k, 101))
        .unwrap();
    let grid = FrequencyGrid::uniform(-1e11, 1e11, 11, FrequencyReference::Emitter).unwrap();
    assert!(matches!(
        spectrum_from_kernel(&kernel, Channel::Side, &grid),
        Err(Error::KernelTooShort { .. })
    ));
}
