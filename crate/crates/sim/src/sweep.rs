//! One-parameter sweeps.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use sps_core::coherent::quantum_efficiency;
use sps_core::dephasing::qe_dephased;
use sps_core::params::{derive_rates, rad_s_to_ghz};
use sps_core::spectra::Channel;
use sps_core::SystemParams;

use crate::analysis::spectrum;
use crate::config::{GhzParams, RunConfig};
use crate::error::{Result, SimError};
use crate::output::{ArtifactWriter, Manifest};

/// Swept input. Rates are in GHz, the detuning in units of `g0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    GammaP,
    Delta,
    G0,
    Kappa,
    Gamma,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::GammaP => "gamma_p_ghz",
            SweepParam::Delta => "delta_over_g0",
            SweepParam::G0 => "g0_ghz",
            SweepParam::Kappa => "kappa_ghz",
            SweepParam::Gamma => "gamma_ghz",
        }
    }

    fn apply(self, base: GhzParams, v: f64) -> GhzParams {
        let mut p = base;
        match self {
            SweepParam::GammaP => p.gamma_p_ghz = v,
            SweepParam::Delta => p.delta_over_g0 = v,
            SweepParam::G0 => p.g0_ghz = v,
            SweepParam::Kappa => p.kappa_ghz = v,
            SweepParam::Gamma => p.gamma_ghz = v,
        }
        p
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "gamma_p" => SweepParam::GammaP,
            "delta" => SweepParam::Delta,
            "g0" => SweepParam::G0,
            "kappa" => SweepParam::Kappa,
            "gamma" => SweepParam::Gamma,
            other => {
                return Err(format!("unknown sweep parameter `{other}` (expected gamma_p, delta, g0, kappa or gamma)"))
            }
        })
    }
}

/// Quantity tabulated for each sweep value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOutput {
    EtaQ,
    Splittings,
    Fwhm,
}

impl FromStr for SweepOutput {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "eta_q" => SweepOutput::EtaQ,
            "splittings" => SweepOutput::Splittings,
            "fwhm" => SweepOutput::Fwhm,
            other => return Err(format!("unknown sweep output `{other}` (expected eta_q, splittings or fwhm)")),
        })
    }
}

impl fmt::Display for SweepOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepOutput::EtaQ => "eta_q",
            SweepOutput::Splittings => "splittings",
            SweepOutput::Fwhm => "fwhm",
        })
    }
}

/// A parsed `name=v1,v2,...` argument.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, list) = s.split_once('=').ok_or_else(|| format!("sweep `{s}` must look like name=v1,v2,..."))?;
        let param = name.trim().parse()?;
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| v.parse::<f64>().map_err(|e| format!("sweep value `{v}`: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(SweepSpec { param, values })
    }
}

/// Points per spectrum used to locate peaks (`±5 g0`).
const SPECTRUM_POINTS: usize = 40_001;

fn eta_q(p: &SystemParams) -> Result<Vec<f64>> {
    let eta = if p.gamma_p() > 0.0 { qe_dephased(p)? } else { quantum_efficiency(p)? };
    Ok(vec![eta])
}

/// Per channel: lower and upper peak positions, then their widths.
type DoubletRow = (f64, f64, Option<f64>, Option<f64>);

fn doublets(p: &SystemParams) -> Result<Vec<DoubletRow>> {
    let values = sps_core::grid::uniform(-5.0 * p.g0(), 5.0 * p.g0(), SPECTRUM_POINTS);
    [Channel::Side, Channel::Forward]
        .iter()
        .map(|&ch| {
            let s = spectrum(p, &values, ch)?;
            let (a, b) = s.doublet().ok_or_else(|| {
                SimError::config(format!("{} spectrum has no doublet at these parameters", ch.name()))
            })?;
            Ok((a.position, b.position, a.fwhm, b.fwhm))
        })
        .collect()
}

fn splittings(p: &SystemParams) -> Result<Vec<f64>> {
    let d = doublets(p)?;
    let two_g = derive_rates(p).g_sq.max(0.0).sqrt() * 2.0;
    Ok(vec![rad_s_to_ghz(d[0].1 - d[0].0), rad_s_to_ghz(d[1].1 - d[1].0), rad_s_to_ghz(two_g)])
}

fn fwhm(p: &SystemParams) -> Result<Vec<f64>> {
    let w = |x: Option<f64>| x.map_or(f64::NAN, rad_s_to_ghz);
    Ok(doublets(p)?.into_iter().flat_map(|(_, _, a, b)| [w(a), w(b)]).collect())
}

/// Output columns after the swept parameter.
pub fn columns(output: SweepOutput) -> &'static [&'static str] {
    match output {
        SweepOutput::EtaQ => &["eta_q"],
        SweepOutput::Splittings => &["separation_side_ghz", "separation_forward_ghz", "two_g_ghz"],
        SweepOutput::Fwhm => &[
            "fwhm_side_lower_ghz",
            "fwhm_side_upper_ghz",
            "fwhm_forward_lower_ghz",
            "fwhm_forward_upper_ghz",
        ],
    }
}

/// Evaluates every sweep point in parallel; rows keep the input order.
pub fn evaluate(base: GhzParams, spec: &SweepSpec, output: SweepOutput) -> Result<Vec<Vec<f64>>> {
    if spec.values.is_empty() {
        return Err(SimError::config("sweep value list is empty"));
    }
    spec.values
        .par_iter()
        .map(|&v| {
            let p = spec.param.apply(base, v).to_system()?;
            let mut row = vec![v];
            row.extend(match output {
                SweepOutput::EtaQ => eta_q(&p)?,
                SweepOutput::Splittings => splittings(&p)?,
                SweepOutput::Fwhm => fwhm(&p)?,
            });
            Ok(row)
        })
        .collect()
}

/// `sweep`: exactly one parameter, written to `sweep.csv`.
pub fn run_sweep(cfg: &RunConfig, specs: &[SweepSpec], output: SweepOutput) -> Result<Manifest> {
    let [spec] = specs else {
        return Err(SimError::config(format!(
            "sweep needs exactly one --vary argument, got {}; multi-parameter sweeps are not supported",
            specs.len()
        )));
    };
    let rows = evaluate(cfg.params, spec, output)?;
    let mut header = vec![spec.param.column()];
    header.extend_from_slice(columns(output));
    let cols: Vec<Vec<f64>> = (0..header.len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let mut out = ArtifactWriter::new(&cfg.out)?;
    out.csv("sweep.csv", &header, &refs)?;
    let summary = BTreeMap::from([("points".to_owned(), rows.len() as f64)]);
    out.finish("sweep_manifest.json", &format!("sweep {} {output}", spec.param.column()), cfg.params, cfg.seed, summary)
}
