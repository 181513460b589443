//! The `dynamics` and `spectra` commands.

use std::collections::BTreeMap;

use serde::Serialize;
use sps_core::coherent::{probabilities, ProbabilityTrace};
use sps_core::dephasing::dephased_probabilities;
use sps_core::params::rad_s_to_ghz;
use sps_core::spectra::{
    coherent_spectrum, dephased_spectrum, normal_mode_splittings, normalize_spectrum_with_tolerance, Channel,
    FrequencyGrid, Spectrum,
};
use sps_core::SystemParams;

use crate::checks::SIDE_TAIL_TOLERANCE;
use crate::config::{GridSpec, RunConfig};
use crate::error::{Result, SimError};
use crate::montecarlo::{monte_carlo_parallel, write_estimate};
use crate::output::{ArtifactWriter, Manifest};

/// Default time axis: 2001 points on `[0, 1.25]` ns.
pub const DEFAULT_TIME_GRID: GridSpec = GridSpec { min: 0.0, max: 1.25, points: 2001 };

/// Time grid in seconds from an optional ns override.
pub fn time_grid(spec: Option<GridSpec>) -> Result<Vec<f64>> {
    let spec = spec.unwrap_or(DEFAULT_TIME_GRID);
    if spec.min != 0.0 {
        return Err(SimError::config("time grids must start at t = 0"));
    }
    Ok(spec.scaled(1e-9))
}

/// Frequency offsets (rad/s) from an optional GHz override; the default
/// spans `±5 g0` with 4001 points.
pub fn frequency_values(spec: Option<GridSpec>, params: &SystemParams) -> Vec<f64> {
    match spec {
        Some(s) => s.scaled(2.0 * std::f64::consts::PI * 1e9),
        None => sps_core::grid::uniform(-5.0 * params.g0(), 5.0 * params.g0(), 4001),
    }
}

/// Occupations and cumulative emission, averaged over the phase noise when
/// `γp > 0`. Dephased dynamics exist in closed form at resonance only.
pub fn trace(params: &SystemParams, grid: &[f64]) -> Result<ProbabilityTrace> {
    if params.gamma_p() > 0.0 {
        if params.delta() != 0.0 {
            return Err(SimError::config("dephased dynamics require --delta-over-g0 0"));
        }
        Ok(dephased_probabilities(params, grid)?)
    } else {
        Ok(probabilities(params, grid)?)
    }
}

pub const DYNAMICS_HEADER: [&str; 5] = ["t_ns", "p_e_avg", "p_c_avg", "p_out_avg", "p_side_avg"];

pub fn write_trace(out: &mut ArtifactWriter, name: &str, tr: &ProbabilityTrace) -> Result<()> {
    let t_ns: Vec<f64> = tr.times.iter().map(|t| t * 1e9).collect();
    out.csv(name, &DYNAMICS_HEADER, &[&t_ns, &tr.p_e, &tr.p_c, &tr.p_out, &tr.p_side])?;
    Ok(())
}

/// `dynamics`: populations on the time grid, plus an optional Monte Carlo
/// ensemble on the same grid.
pub fn run_dynamics(cfg: &RunConfig, monte_carlo: Option<usize>) -> Result<Manifest> {
    let params = cfg.system()?;
    let grid = time_grid(cfg.grid)?;
    let tr = trace(&params, &grid)?;
    let mut out = ArtifactWriter::new(&cfg.out)?;
    write_trace(&mut out, "dynamics.csv", &tr)?;
    let mut summary = BTreeMap::new();
    let last = tr.times.len() - 1;
    summary.insert("p_out_final".to_owned(), tr.p_out[last]);
    summary.insert("p_side_final".to_owned(), tr.p_side[last]);
    if let Some(n) = monte_carlo {
        if n == 0 {
            return Err(SimError::config("--monte-carlo needs at least one trajectory"));
        }
        let est = monte_carlo_parallel(&params, &grid, n, cfg.seed)?;
        write_estimate(&mut out, "dynamics_mc", &est)?;
        summary.insert("monte_carlo_trajectories".to_owned(), n as f64);
    }
    out.finish("dynamics_manifest.json", "dynamics", cfg.params, cfg.seed, summary)
}

/// Closed-form spectrum of one channel; the dephased form when `γp > 0`.
pub fn spectrum(params: &SystemParams, values: &[f64], channel: Channel) -> Result<Spectrum> {
    let grid = FrequencyGrid::new(values.to_vec(), channel.natural_reference())?;
    if params.gamma_p() > 0.0 {
        Ok(dephased_spectrum(params, &grid, channel)?)
    } else {
        Ok(coherent_spectrum(params, &grid, channel))
    }
}

/// Splitting report written next to the spectra, in GHz (`Ω / 2π`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplittingsGhz {
    pub delta_omega_s_ghz: f64,
    pub delta_omega_f_ghz: f64,
    pub two_g_ghz: f64,
}

pub fn splittings_ghz(params: &SystemParams) -> Result<SplittingsGhz> {
    let r = normal_mode_splittings(params)?;
    Ok(SplittingsGhz {
        delta_omega_s_ghz: rad_s_to_ghz(r.delta_omega_s),
        delta_omega_f_ghz: rad_s_to_ghz(r.delta_omega_f),
        two_g_ghz: rad_s_to_ghz(r.two_g),
    })
}

/// `spectra`: both channels, each against its natural frequency frame
/// (cavity frequency for the forward channel, emitter frequency for the
/// side channel).
pub fn run_spectra(cfg: &RunConfig, normalized: bool) -> Result<Manifest> {
    let params = cfg.system()?;
    if params.gamma_p() > 0.0 && params.delta() != 0.0 {
        return Err(SimError::config("dephased spectra require --delta-over-g0 0"));
    }
    let values = frequency_values(cfg.grid, &params);
    let mut cols = Vec::new();
    for ch in [Channel::Side, Channel::Forward] {
        let mut s = spectrum(&params, &values, ch)?;
        if normalized {
            s = normalize_spectrum_with_tolerance(&s, &params, SIDE_TAIL_TOLERANCE)?;
        }
        cols.push(s.values);
    }
    let axis: Vec<f64> = values.iter().map(|w| rad_s_to_ghz(*w)).collect();
    let mut out = ArtifactWriter::new(&cfg.out)?;
    out.csv("spectra.csv", &["omega_over_2pi_ghz", "s_side", "s_forward"], &[&axis, &cols[0], &cols[1]])?;
    let split = splittings_ghz(&params)?;
    out.json("splittings.json", &split)?;
    let summary = BTreeMap::from([
        ("delta_omega_s_ghz".to_owned(), split.delta_omega_s_ghz),
        ("delta_omega_f_ghz".to_owned(), split.delta_omega_f_ghz),
        ("two_g_ghz".to_owned(), split.two_g_ghz),
    ]);
    out.finish("spectra_manifest.json", "spectra", cfg.params, cfg.seed, summary)
}
