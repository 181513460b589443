//! Parallel Monte Carlo over phase-diffusion trajectories.
//!
//! Trajectories are simulated in fixed chunks by the core crate and merged
//! strictly in chunk order, so the result does not depend on the number of
//! threads or on scheduling.

use rayon::prelude::*;
use serde::Serialize;
use sps_core::oracle::{simulate_chunk, MonteCarloAccumulator, MonteCarloEstimate, MC_CHUNK};
use sps_core::SystemParams;

use crate::error::Result;
use crate::output::ArtifactWriter;

/// Chunks simulated concurrently before being folded into the total. Bounds
/// memory for large ensembles without affecting the result.
const CHUNKS_PER_BATCH: usize = 64;

/// Same result as [`sps_core::oracle::monte_carlo_moments`], computed on the
/// rayon pool.
pub fn monte_carlo_parallel(
    params: &SystemParams,
    grid: &[f64],
    n_traj: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let chunks = n_traj.div_ceil(MC_CHUNK);
    let mut total = MonteCarloAccumulator::new(grid.len());
    // An empty ensemble still has to pass the step checks.
    if chunks == 0 {
        simulate_chunk(params, grid, 0, seed, 0)?;
    }
    for start in (0..chunks).step_by(CHUNKS_PER_BATCH) {
        let end = (start + CHUNKS_PER_BATCH).min(chunks);
        let parts = (start..end)
            .into_par_iter()
            .map(|c| simulate_chunk(params, grid, n_traj, seed, c))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        for part in &parts {
            total.merge(part)?;
        }
    }
    Ok(total.finish(grid, seed)?)
}

/// Column order of the Monte Carlo CSV.
pub const MC_HEADER: [&str; 13] = [
    "t_ns",
    "mean_re_E",
    "mean_im_E",
    "mean_abs2_E",
    "mean_abs2_C",
    "mean_re_H",
    "mean_im_H",
    "stderr_re_E",
    "stderr_im_E",
    "stderr_abs2_E",
    "stderr_abs2_C",
    "stderr_re_H",
    "stderr_im_H",
];

#[derive(Debug, Serialize)]
struct Sidecar<'a> {
    csv: &'a str,
    n_traj: usize,
    seed: u64,
    chunk_size: usize,
    /// `H` is the emitter-cavity coherence `E C*`.
    h_definition: &'static str,
}

/// Writes `<stem>.csv` and the `<stem>.json` sidecar holding seed and size.
pub fn write_estimate(out: &mut ArtifactWriter, stem: &str, est: &MonteCarloEstimate) -> Result<()> {
    let t_ns: Vec<f64> = est.times.iter().map(|t| t * 1e9).collect();
    let re = |v: &[sps_core::C64]| v.iter().map(|z| z.re).collect::<Vec<_>>();
    let im = |v: &[sps_core::C64]| v.iter().map(|z| z.im).collect::<Vec<_>>();
    let cols = [
        t_ns,
        re(&est.mean_e),
        im(&est.mean_e),
        est.mean_abs2_e.clone(),
        est.mean_abs2_c.clone(),
        re(&est.mean_h),
        im(&est.mean_h),
        re(&est.stderr_e),
        im(&est.stderr_e),
        est.stderr_abs2_e.clone(),
        est.stderr_abs2_c.clone(),
        re(&est.stderr_h),
        im(&est.stderr_h),
    ];
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let csv_name = format!("{stem}.csv");
    out.csv(&csv_name, &MC_HEADER, &refs)?;
    out.json(
        &format!("{stem}.json"),
        &Sidecar { csv: &csv_name, n_traj: est.n_traj, seed: est.seed, chunk_size: MC_CHUNK, h_definition: "E*conj(C)" },
    )?;
    Ok(())
}
