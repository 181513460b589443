//! Figure presets: CSV per curve, SVG per panel, and a manifest.
//!
//! Presets fix the swept quantities (detunings, dephasing rates) and take
//! the device rates `g0`, `κ`, `γ` from the run configuration, which
//! defaults to the reference device. `--grid` replaces the time axis (ns)
//! or the frequency axis (GHz) depending on the figure.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use sps_core::coherent::probabilities;
use sps_core::dephasing::{dephased_probabilities, emission_probability_dephased, qe_dephased};
use sps_core::params::{derive_rates, rad_s_to_ghz};
use sps_core::spectra::{normalize_spectrum_with_tolerance, Channel, Spectrum};
use sps_core::SystemParams;

use crate::analysis::{frequency_values, spectrum, time_grid, write_trace};
use crate::checks::{FIG3_DETUNINGS, SIDE_TAIL_TOLERANCE};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{ArtifactWriter, Manifest};
use crate::svg::{Plot, Series};

/// Dephasing rates (GHz) of the dephased dynamics and spectra figures.
pub const DEPHASING_PRESET: [f64; 3] = [0.0, 1.0, 2.5];

/// Dephasing rate (GHz) of the efficiency figure.
pub const FIG6_GAMMA_P: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::Fig2, FigureId::Fig3, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure `{s}` (expected fig2, fig3, fig5, fig6 or fig7)"))
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Writes every artifact of `id` into the configured directory.
pub fn run_figure(id: FigureId, cfg: &RunConfig) -> Result<Manifest> {
    let device = cfg.params.with_gamma_p(0.0).with_delta(0.0);
    let mut out = ArtifactWriter::new(&cfg.out)?;
    let mut summary = BTreeMap::new();
    match id {
        FigureId::Fig2 => fig2(cfg, &device.to_system()?, &mut out, &mut summary)?,
        FigureId::Fig3 => fig3(cfg, &mut out, &mut summary)?,
        FigureId::Fig5 => fig5(cfg, &mut out, &mut summary)?,
        FigureId::Fig6 => fig6(cfg, &mut out, &mut summary)?,
        FigureId::Fig7 => fig7(cfg, &mut out, &mut summary)?,
    }
    out.finish(&format!("{id}_manifest.json"), &format!("figure {id}"), device, cfg.seed, summary)
}

fn ns(grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|t| t * 1e9).collect()
}

fn fmt_value(x: f64) -> String {
    let s = format!("{x:+.1}");
    if x == 0.0 {
        "0.0".to_owned()
    } else {
        s
    }
}

fn fig2(cfg: &RunConfig, p: &SystemParams, out: &mut ArtifactWriter, summary: &mut BTreeMap<String, f64>) -> Result<()> {
    let grid = time_grid(cfg.grid)?;
    let tr = probabilities(p, &grid)?;
    let t = ns(&grid);
    out.csv("fig2_p_e.csv", &["t_ns", "p_e"], &[&t, &tr.p_e])?;
    out.csv("fig2_p_c.csv", &["t_ns", "p_c"], &[&t, &tr.p_c])?;
    for (log, name) in [(false, "fig2_linear.svg"), (true, "fig2_log.svg")] {
        let mut plot = Plot::new("Emitter and cavity populations", "t (ns)", "probability")
            .with(Series::new("p_e", t.clone(), tr.p_e.clone()))
            .with(Series::new("p_c", t.clone(), tr.p_c.clone()));
        if log {
            plot = plot.log();
        }
        out.text(name, &plot.render())?;
    }
    let first = (1..tr.p_c.len() - 1).find(|&i| tr.p_c[i] > tr.p_c[i - 1] && tr.p_c[i] >= tr.p_c[i + 1]);
    let g = derive_rates(p).real_g()?;
    summary.insert("pc_first_max_ns".to_owned(), first.map_or(f64::NAN, |i| t[i]));
    summary.insert("pi_over_2g_ns".to_owned(), std::f64::consts::PI / (2.0 * g) * 1e9);
    Ok(())
}

/// Normalizes for display. Finite figure grids cut off part of the `1/Ω²`
/// side tail, hence the looser tolerance.
fn normalized(s: &Spectrum, p: &SystemParams) -> Result<Spectrum> {
    Ok(normalize_spectrum_with_tolerance(s, p, SIDE_TAIL_TOLERANCE)?)
}

fn spectra_panels(
    out: &mut ArtifactWriter,
    prefix: &str,
    curves: &[(String, Vec<f64>, Channel, Vec<f64>)],
) -> Result<()> {
    for ch in [Channel::Side, Channel::Forward] {
        let frame = match ch {
            Channel::Side => "(omega - omega_emitter)/2pi (GHz)",
            Channel::Forward => "(omega - omega_cavity)/2pi (GHz)",
        };
        let mut plot = Plot::new(format!("Normalized {} spectra", ch.name()), frame, "S (normalized)");
        for (label, x, c, y) in curves.iter().filter(|c| c.2 == ch) {
            out.csv(
                &format!("{prefix}_{}_{label}.csv", c.name()),
                &["omega_over_2pi_ghz", &format!("s_{}", c.name())],
                &[x, y],
            )?;
            plot = plot.with(Series::new(label.clone(), x.clone(), y.clone()));
        }
        out.text(&format!("{prefix}_{}.svg", ch.name()), &plot.render())?;
    }
    Ok(())
}

fn fig3(cfg: &RunConfig, out: &mut ArtifactWriter, summary: &mut BTreeMap<String, f64>) -> Result<()> {
    let mut curves = Vec::new();
    for ch in [Channel::Side, Channel::Forward] {
        for d in FIG3_DETUNINGS {
            let p = cfg.params.with_gamma_p(0.0).with_delta(d).to_system()?;
            let values = frequency_values(cfg.grid, &p);
            let s = normalized(&spectrum(&p, &values, ch)?, &p)?;
            if let Some(sep) = s.peak_separation() {
                summary.insert(format!("separation_{}_d{}_ghz", ch.name(), fmt_value(d)), rad_s_to_ghz(sep));
            }
            let x = values.iter().map(|w| rad_s_to_ghz(*w)).collect();
            curves.push((format!("d{}", fmt_value(d)), x, ch, s.values));
        }
    }
    spectra_panels(out, "fig3", &curves)
}

fn fig5(cfg: &RunConfig, out: &mut ArtifactWriter, summary: &mut BTreeMap<String, f64>) -> Result<()> {
    let grid = time_grid(cfg.grid)?;
    let t = ns(&grid);
    let mut plot = Plot::new("Dephased populations", "t (ns)", "probability").log();
    for gp in DEPHASING_PRESET {
        let p = cfg.params.with_gamma_p(gp).with_delta(0.0).to_system()?;
        let tr = dephased_probabilities(&p, &grid)?;
        write_trace(out, &format!("fig5_gp{gp:.1}.csv"), &tr)?;
        plot = plot
            .with(Series::new(format!("p_e, gamma_p = {gp} GHz"), t.clone(), tr.p_e.clone()))
            .with(Series::new(format!("p_c, gamma_p = {gp} GHz"), t.clone(), tr.p_c.clone()));
        if let Some(depth) = sps_core::dephasing::modulation_depth(&tr.p_c) {
            summary.insert(format!("pc_modulation_depth_gp{gp:.1}"), depth);
        }
    }
    out.text("fig5_log.svg", &plot.render())?;
    Ok(())
}

fn fig6(cfg: &RunConfig, out: &mut ArtifactWriter, summary: &mut BTreeMap<String, f64>) -> Result<()> {
    let grid = time_grid(cfg.grid)?;
    let t = ns(&grid);
    let p = cfg.params.with_gamma_p(FIG6_GAMMA_P).with_delta(0.0).to_system()?;
    let p0 = p.with_gamma_p(0.0)?;
    let dephased =
        grid.iter().map(|&x| Ok(emission_probability_dephased(&p, x)?)).collect::<Result<Vec<f64>>>()?;
    let coherent = probabilities(&p0, &grid)?.p_out;
    out.csv("fig6_emission_dephased.csv", &["t_ns", "p_out"], &[&t, &dephased])?;
    out.csv("fig6_emission_coherent.csv", &["t_ns", "p_out"], &[&t, &coherent])?;
    let plot = Plot::new("Forward emission probability", "t (ns)", "P_out")
        .with(Series::new(format!("gamma_p = {FIG6_GAMMA_P} GHz"), t.clone(), dephased))
        .with(Series::new("gamma_p = 0", t, coherent));
    out.text("fig6_emission.svg", &plot.render())?;

    let rates: Vec<f64> = (0..=40).map(|i| 0.1 * i as f64).collect();
    let etas = rates
        .iter()
        .map(|&gp| Ok(qe_dephased(&cfg.params.with_gamma_p(gp).with_delta(0.0).to_system()?)?))
        .collect::<Result<Vec<f64>>>()?;
    out.csv("fig6_eta_q.csv", &["gamma_p_ghz", "eta_q"], &[&rates, &etas])?;
    let plot = Plot::new("Quantum efficiency against pure dephasing", "gamma_p/2pi (GHz)", "eta_q")
        .with(Series::new("eta_q", rates, etas.clone()));
    out.text("fig6_eta_q.svg", &plot.render())?;
    summary.insert("eta_q_0".to_owned(), etas[0]);
    summary.insert("eta_q_4ghz".to_owned(), etas[40]);
    summary.insert("eta_q_drop".to_owned(), etas[0] - etas[40]);
    Ok(())
}

fn fig7(cfg: &RunConfig, out: &mut ArtifactWriter, summary: &mut BTreeMap<String, f64>) -> Result<()> {
    let mut curves = Vec::new();
    for ch in [Channel::Side, Channel::Forward] {
        for gp in DEPHASING_PRESET {
            let p = cfg.params.with_gamma_p(gp).with_delta(0.0).to_system()?;
            let values = frequency_values(cfg.grid, &p);
            let grid = sps_core::spectra::FrequencyGrid::new(values.clone(), ch.natural_reference())?;
            let s = normalized(&sps_core::spectra::dephased_spectrum(&p, &grid, ch)?, &p)?;
            if let Some((a, _)) = s.doublet() {
                summary.insert(format!("peak_height_{}_gp{gp:.1}", ch.name()), a.height);
                if let Some(w) = a.fwhm {
                    summary.insert(format!("fwhm_{}_gp{gp:.1}_ghz", ch.name()), rad_s_to_ghz(w));
                }
            }
            let x = values.iter().map(|w| rad_s_to_ghz(*w)).collect();
            curves.push((format!("gp{gp:.1}"), x, ch, s.values));
        }
    }
    spectra_panels(out, "fig7", &curves)
}
