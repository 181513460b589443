//! Validation suites built from [`crate::checks`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::checks::{self, Check, Ctx};
use crate::config::{Budget, GhzParams};
use crate::error::Result;

/// Named groups of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Coherent,
    Dephasing,
    Spectra,
    Roots,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["all", "coherent", "dephasing", "spectra", "roots"];

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "all" => Suite::All,
            "coherent" => Suite::Coherent,
            "dephasing" => Suite::Dephasing,
            "spectra" => Suite::Spectra,
            "roots" => Suite::Roots,
            other => return Err(format!("unknown suite `{other}` (expected one of {:?})", Suite::NAMES)),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(Suite::NAMES[*self as usize])
    }
}

type Task = (&'static str, fn(&Ctx) -> Result<Vec<Check>>);

fn one(r: Result<Check>) -> Result<Vec<Check>> {
    r.map(|c| vec![c])
}

fn tasks(suite: Suite) -> Vec<Task> {
    let coherent: [Task; 9] = [
        ("qe_closed_form_vs_quadrature", |c| one(checks::qe_quadrature(c))),
        ("ode_equivalence_all_detunings", |c| one(checks::ode_equivalence(c))),
        ("ode_decoupled_limit", |c| one(checks::ode_decoupled(c))),
        ("conservation_coherent", |c| one(checks::conservation_coherent(c))),
        ("pc_first_maximum_near_pi_over_2g", |c| one(checks::pc_first_maximum(c))),
        ("antiphase_lag_within_one_step", |c| one(checks::antiphase_lag(c))),
        ("pc_oscillates_at_two_g", |c| one(checks::pc_frequency(c))),
        ("detuned_qe_vs_ode_quadrature", |c| one(checks::detuned_qe(c))),
        ("strong_coupling_regime", |c| one(checks::regime(c))),
    ];
    let dephasing: [Task; 17] = [
        ("conservation_dephased_exact", |c| one(checks::conservation_dephased(c))),
        ("moments_supnorm", checks::moments_supnorm),
        ("cavity_moment_1ghz_supnorm", |c| one(checks::i_moment_1ghz(c))),
        ("i_system_coherent_limit", |c| one(checks::i_system_coherent_limit(c))),
        ("h_system_starts_at_zero", |c| one(checks::h_system_start(c))),
        ("monte_carlo_vs_exact_1ghz", |c| one(checks::monte_carlo_vs_exact(c, c.budget.n_traj()))),
        ("monte_carlo_coherent_equals_ode", |c| one(checks::monte_carlo_coherent(c))),
        ("monte_carlo_stderr_scaling", |c| one(checks::monte_carlo_stderr_scaling(c))),
        ("mean_amplitude_envelope_rate", |c| one(checks::monte_carlo_envelope(c))),
        ("phase_path_variance", |c| one(checks::phase_path_variance(c))),
        ("moments_positivity", checks::moments_positivity),
        ("qe_dephasing_drop", |c| one(checks::qe_drop(c))),
        ("qe_nonincreasing_in_gamma_p", |c| one(checks::qe_monotone(c))),
        ("modulation_depth_falls", |c| one(checks::modulation_trend(c))),
        ("dephased_dynamics_coherent_limit", |c| one(checks::dephased_coherent_limit(c))),
        ("rabi_frequency_shift", |c| one(checks::frequency_shift(c))),
        ("kernel_structure", checks::kernel_structure),
    ];
    let spectra: [Task; 14] = [
        ("splittings", checks::splittings),
        ("parseval", checks::parseval),
        ("forward_spectrum_even", |c| one(checks::forward_even(c))),
        ("detuned_peaks", checks::detuned_peaks),
        ("side_spectrum_mirror_symmetry", |c| one(checks::side_mirror(c))),
        ("splitting_nondecreasing_in_detuning", |c| one(checks::splitting_vs_detuning(c))),
        ("forward_peaks_at_sqrt_g2_minus_k2_over_4", |c| one(checks::forward_peak_positions(c))),
        ("spectra_nonnegative", |c| one(checks::spectra_nonnegative(c))),
        ("forward_dephased_wing_dip_second_order", |c| one(checks::forward_wing_dip(c))),
        ("dephased_spectrum_limits", checks::dephased_spectrum_limit),
        ("dephasing_trends", checks::dephasing_trends),
        ("kernel_vs_closed_dephased", checks::kernel_vs_closed_dephased),
        ("kernel_vs_coherent_closed_form", |c| one(checks::kernel_vs_coherent(c))),
        ("kernel_factorizes_without_dephasing", |c| one(checks::kernel_factorizes(c))),
    ];
    let roots: [Task; 3] = [
        ("roots_identical_without_dephasing", |c| one(checks::roots_coherent_limit(c))),
        ("roots_bounds", checks::roots_bounds),
        ("roots_consistency", checks::roots_consistency),
    ];
    let mut out = Vec::new();
    if suite.includes(Suite::Coherent) {
        out.extend(coherent);
    }
    if suite.includes(Suite::Dephasing) {
        out.extend(dephasing);
    }
    if suite.includes(Suite::Spectra) {
        out.extend(spectra);
    }
    if suite.includes(Suite::Roots) {
        out.extend(roots);
    }
    out
}

/// Runs one task, turning a computation error into a failed check and
/// recording the wall time on every check it produced.
fn run_task(ctx: &Ctx, (name, f): &Task) -> Vec<Check> {
    let start = Instant::now();
    let mut checks = match f(ctx) {
        Ok(c) => c,
        Err(e) => vec![Check::errored(*name, e)],
    };
    let secs = start.elapsed().as_secs_f64() / checks.len().max(1) as f64;
    for c in &mut checks {
        c.seconds = secs;
    }
    checks
}

/// Outcome of a validation run, serialized as the JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub budget: Budget,
    pub seed: u64,
    pub parameters: GhzParams,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// Fixed-width text table, one line per check.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        let mut s = format!("{:<width$}  {:<4}  {:>12}  {:<26}  {:>8}\n", "check", "", "measured", "tolerance", "seconds");
        for c in &self.checks {
            s.push_str(&format!(
                "{:<width$}  {:<4}  {:>12.4e}  {:<26}  {:>8.3}\n",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.measured,
                c.tolerance.describe(),
                c.seconds
            ));
        }
        s.push_str(&format!("{} passed, {} failed\n", self.passed, self.failed));
        s
    }
}

/// Runs every task of `suite` (in parallel, results in declaration order).
pub fn run(suite: Suite, base: GhzParams, budget: Budget, seed: u64) -> Report {
    use rayon::prelude::*;
    let ctx = Ctx::new(base, budget, seed);
    let checks: Vec<Check> =
        tasks(suite).par_iter().map(|t| run_task(&ctx, t)).collect::<Vec<_>>().into_iter().flatten().collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    Report { suite, budget, seed, parameters: base, failed: checks.len() - passed, passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_partition_all() {
        let all = tasks(Suite::All).len();
        let parts: usize =
            [Suite::Coherent, Suite::Dephasing, Suite::Spectra, Suite::Roots].iter().map(|s| tasks(*s).len()).sum();
        assert_eq!(all, parts);
        assert!(all >= 20);
        assert_eq!("roots".parse::<Suite>().unwrap().to_string(), "roots");
        assert!("bogus".parse::<Suite>().is_err());
    }
}
