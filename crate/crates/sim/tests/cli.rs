use std::path::Path;
use std::process::{Command, Output};

use sps_sim::output::{verify_manifest, Manifest};

fn sps(args: &[&str], out: &Path) -> Output {
    sps_env(args, out, None)
}

fn sps_env(args: &[&str], out: &Path, threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sps-sim"));
    cmd.args(args).arg("--out").arg(out);
    match threads {
        Some(n) => cmd.env("SPS_SIM_THREADS", n),
        None => cmd.env_remove("SPS_SIM_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn manifest(path: &Path) -> Manifest {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn fig2_writes_two_csvs_two_svgs_and_a_matching_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps(&["figure", "fig2"], dir.path())), 0);
    let m = manifest(&dir.path().join("fig2_manifest.json"));
    let count = |ext: &str| m.files.iter().filter(|f| f.path.ends_with(ext)).count();
    assert_eq!((count(".csv"), count(".svg")), (2, 2));
    assert!(verify_manifest(&dir.path().join("fig2_manifest.json")).unwrap().is_empty());

    // The first cavity maximum lies within 10% of π/2g.
    let (first, quarter) = (m.summary["pc_first_max_ns"], m.summary["pi_over_2g_ns"]);
    assert!((first - quarter).abs() < 0.1 * quarter, "{first} vs {quarter}");

    let (header, rows) = read_csv(&dir.path().join("fig2_p_c.csv"));
    assert_eq!(header, ["t_ns", "p_c"]);
    assert_eq!(rows.len(), 2001);
    let text = std::fs::read_to_string(dir.path().join("fig2_p_c.csv")).unwrap();
    assert!(!text.contains('\r'));
}

#[test]
fn tampering_is_detected_by_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps(&["figure", "fig2"], dir.path())), 0);
    std::fs::write(dir.path().join("fig2_p_e.csv"), "t_ns,p_e\n").unwrap();
    let bad = verify_manifest(&dir.path().join("fig2_manifest.json")).unwrap();
    assert_eq!(bad, ["fig2_p_e.csv"]);
}

#[test]
fn fig3_has_fourteen_spectra() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps(&["figure", "fig3"], dir.path())), 0);
    let m = manifest(&dir.path().join("fig3_manifest.json"));
    let spectra: Vec<_> = m.files.iter().filter(|f| f.path.ends_with(".csv")).collect();
    assert_eq!(spectra.len(), 14);
    assert_eq!(m.files.iter().filter(|f| f.path.ends_with(".svg")).count(), 2);
    // Forward separations grow with |Δ| and are symmetric in its sign.
    let sep = |d: &str| m.summary[&format!("separation_forward_d{d}_ghz")];
    assert!(sep("0.0") < sep("+0.8") && sep("+0.8") < sep("+1.6") && sep("+1.6") < sep("+2.4"));
    assert!((sep("-1.6") - sep("+1.6")).abs() < 1e-9);
}

#[test]
fn fig6_records_the_efficiency_drop() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps(&["figure", "fig6"], dir.path())), 0);
    let m = manifest(&dir.path().join("fig6_manifest.json"));
    assert!((m.summary["eta_q_drop"] - 0.012).abs() < 0.01);
    let (_, rows) = read_csv(&dir.path().join("fig6_eta_q.csv"));
    assert_eq!(rows.len(), 41);
}

#[test]
fn fig5_and_fig7_run() {
    for id in ["fig5", "fig7"] {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(code(&sps(&["figure", id], dir.path())), 0, "{id}");
        assert!(verify_manifest(&dir.path().join(format!("{id}_manifest.json"))).unwrap().is_empty());
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let args = ["dynamics", "--gamma-p", "1", "--grid", "0:0.4:4001", "--monte-carlo", "600", "--seed", "11"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps_env(&args, a.path(), Some("1"))), 0);
    assert_eq!(code(&sps_env(&args, b.path(), Some("4"))), 0);
    for f in ["dynamics.csv", "dynamics_mc.csv", "dynamics_mc.json", "dynamics_manifest.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    let (header, rows) = read_csv(&a.path().join("dynamics_mc.csv"));
    assert_eq!(header.len(), 13);
    assert_eq!(rows.len(), 4001);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("dynamics_mc.json")).unwrap()).unwrap();
    assert_eq!((sidecar["n_traj"].as_u64(), sidecar["seed"].as_u64()), (Some(600), Some(11)));
}

#[test]
fn dynamics_columns_and_conservation() {
    let dir = tempfile::tempdir().unwrap();
    // Balance holds to 1e-6 on grids finer than 0.01/g (about 0.2 ps here).
    assert_eq!(code(&sps(&["dynamics", "--grid", "0:1.25:8001"], dir.path())), 0);
    let (header, rows) = read_csv(&dir.path().join("dynamics.csv"));
    assert_eq!(header, ["t_ns", "p_e_avg", "p_c_avg", "p_out_avg", "p_side_avg"]);
    assert_eq!(rows.len(), 8001);
    for r in &rows {
        assert!((r[1] + r[2] + r[3] + r[4] - 1.0).abs() < 1e-6);
    }
    // The dephased closed forms are first order in gamma_p / g, and so is
    // their probability balance.
    assert_eq!(code(&sps(&["dynamics", "--gamma-p", "2.5"], dir.path())), 0);
    let (_, rows) = read_csv(&dir.path().join("dynamics.csv"));
    assert_eq!(rows.len(), 2001);
    for r in &rows {
        assert!((r[1] + r[2] + r[3] + r[4] - 1.0).abs() < 0.1 * 2.5 / 8.0);
    }
}

#[test]
fn spectra_command_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps(&["spectra"], dir.path())), 0);
    let (header, rows) = read_csv(&dir.path().join("spectra.csv"));
    assert_eq!(header, ["omega_over_2pi_ghz", "s_side", "s_forward"]);
    assert_eq!(rows.len(), 4001);
    let split: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("splittings.json")).unwrap()).unwrap();
    assert!((split["delta_omega_f_ghz"].as_f64().unwrap() - 15.83).abs() < 0.005);
    assert!((split["delta_omega_s_ghz"].as_f64().unwrap() - 16.06).abs() < 0.005);

    let bad = sps(&["spectra", "--gamma-p", "1", "--delta-over-g0", "0.8"], dir.path());
    assert_eq!(code(&bad), 2);
}

#[test]
fn sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let o = sps(&["sweep", "--vary", "gamma_p=0,0.5,1,1.5,2,2.5,3,3.5,4", "--output", "eta_q"], dir.path());
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(header, ["gamma_p_ghz", "eta_q"]);
    assert!(rows.windows(2).all(|w| w[1][1] <= w[0][1]));

    let o = sps(&["sweep", "--vary", "delta=0,0.8,-0.8,1.6,-1.6,2.4,-2.4", "--output", "splittings"], dir.path());
    assert_eq!(code(&o), 0);
    let (_, rows) = read_csv(&dir.path().join("sweep.csv"));
    let at = |d: f64, col: usize| rows.iter().find(|r| r[0] == d).unwrap()[col];
    for col in [1, 2] {
        for pair in [[0.0, 0.8], [0.8, 1.6], [1.6, 2.4], [0.0, -0.8], [-0.8, -1.6], [-1.6, -2.4]] {
            assert!(at(pair[1], col) >= at(pair[0], col), "column {col}, {pair:?}");
        }
    }
}

#[test]
fn sweep_usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps(&["sweep", "--vary", "gamma_p=", "--output", "eta_q"], dir.path())), 2);
    assert_eq!(code(&sps(&["sweep", "--output", "eta_q"], dir.path())), 2);
    let two = ["sweep", "--vary", "gamma_p=1", "--vary", "kappa=1", "--output", "eta_q"];
    assert_eq!(code(&sps(&two, dir.path())), 2);
    assert_eq!(code(&sps(&["sweep", "--vary", "omega=1", "--output", "eta_q"], dir.path())), 2);
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sps(&["figure", "fig4"], dir.path())), 2);
    assert_eq!(code(&sps(&["validate", "everything"], dir.path())), 2);
    assert_eq!(code(&sps(&["figure", "fig2", "--grid", "0:1"], dir.path())), 2);
    assert_eq!(code(&sps_env(&["figure", "fig2"], dir.path(), Some("zero"))), 2);

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"g0": 8.0}"#).unwrap();
    assert_eq!(code(&sps(&["figure", "fig2", "--config", cfg.to_str().unwrap()], dir.path())), 2);
    std::fs::write(&cfg, r#"{"kappa_ghz": -1.0}"#).unwrap();
    assert_eq!(code(&sps(&["figure", "fig2", "--config", cfg.to_str().unwrap()], dir.path())), 2);

    // A dephased Monte Carlo run on a grid too coarse for the phase steps.
    assert_eq!(code(&sps(&["dynamics", "--gamma-p", "1", "--monte-carlo", "10"], dir.path())), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"g0_ghz": 8.0, "kappa_ghz": 1.6, "gamma_ghz": 0.32, "gamma_p_ghz": 4.0, "seed": 3}"#)
        .unwrap();
    let o = sps(&["dynamics", "--config", cfg.to_str().unwrap(), "--gamma-p", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let m = manifest(&dir.path().join("dynamics_manifest.json"));
    assert_eq!((m.parameters.gamma_p_ghz, m.seed), (1.0, 3));
}

#[test]
fn validation_report_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sps(&["validate", "roots"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("validate_roots.json")).unwrap()).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 5);
    for c in checks {
        assert!(c["name"].is_string() && c["measured"].is_number() && c["pass"].as_bool() == Some(true));
        assert!(c["tolerance"]["relation"].is_string());
    }
    assert_eq!(report["failed"], 0);

    // A device far from strong coupling fails the regime check.
    let o = sps(&["validate", "coherent", "--kappa", "6", "--gamma", "6"], dir.path());
    assert_eq!(code(&o), 1);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("validate_coherent.json")).unwrap()).unwrap();
    assert!(report["failed"].as_u64().unwrap() >= 1);
}
