//! End-to-end runs of the `oilsec` binary.

mod support;

use std::path::Path;
use std::process::{Command, Output};

use oilsec_core::attack::SweepRow;
use oilsec_core::isolation::BudgetReport;
use oilsec_core::run::ModulationRow;
use serde::de::DeserializeOwned;

fn oilsec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oilsec")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Vec<T> {
    csv::Reader::from_path(path)
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

const SMALL_MODULATION: &str = r#"
[modulation]
heights = [0.0, 0.25, 0.5]
integration_times_s = [25e-6]
windows = 20000
"#;

#[test]
fn attack_sweep_emits_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = oilsec(&["attack-sweep", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("distance_km,rate_expected,rate_actual_aware,rate_oblivious,eps_opt,mu_opt\n"));
    let rows: Vec<SweepRow> = read_rows(&out);
    assert_eq!(rows.len(), 51);
    assert_eq!(rows[50].distance_km, 500.0);

    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("sweep.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["scenario"], "attack-sweep");
    assert_eq!(meta["seed"], 0);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config"]["protocol"]["enhancement_factor"], 1.51);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_MODULATION);
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = oilsec(&[
            "modulation",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "11");
    assert_eq!(a, run("b.csv", "11"));
    assert_ne!(a, run("c.csv", "12"));
}

#[test]
fn unmodulated_light_raises_no_alarm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[modulation]\nheights = [0.0]\nwindows = 20000\n");
    let out = dir.path().join("m.csv");
    let o = oilsec(&["modulation", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<ModulationRow> = read_rows(&out);
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!(!r.fast_pd_injected_detected && !r.fast_pd_output_detected);
        assert!(!r.sideband_detected);
        assert!(r.pm_z_score.abs() < 3.0);
        assert!(r.snspd_relative_peak < 5.0 * r.snspd_relative_peak_stderr);
    }
}

#[test]
fn empty_cascade_passes_full_damage_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[budget]\nwavelengths_nm = [1550.0]\nmax_photons_per_pulse = 1e-7\n",
    );
    let out = dir.path().join("b.csv");
    let o = oilsec(&["budget", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<BudgetReport> = read_rows(&out);
    assert_eq!(rows[0].worst_case_output_w, 100.0);
    assert!(!rows[0].meets_target);
}

#[test]
fn budget_reads_component_files_relative_to_config() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(support::fixture("isolator.csv"), dir.path().join("iso.csv")).unwrap();
    let cfg = write_config(
        dir.path(),
        "[budget]\nwavelengths_nm = [1550.0]\nmax_photons_per_pulse = 1e-7\ncomponents = [{ path = \"iso.csv\" }, { path = \"iso.csv\" }]\n",
    );
    let o = oilsec(&["budget", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<BudgetReport> = csv::Reader::from_reader(o.stdout.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows[0].total_isolation_db, 84.0);
}

#[test]
fn validate_accepts_shipped_configs() {
    for name in ["attack_sweep.toml", "modulation.toml", "budget.toml"] {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
        let o = oilsec(&["validate", "--config", path.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "ok");
    }
}

#[test]
fn validate_lists_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scenario = \"modulation\"\n[modulation]\nheights = []\n[modulation.pattern]\nwidth_s = 50e-12\nperiod_s = 100e-12\n",
    );
    let o = oilsec(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("ModulationPattern.period_s"), "{err}");

    let cfg = write_config(dir.path(), "[protocol]\nsend_prob = 1.5\nec_efficiency = 0.5\n");
    let o = oilsec(&["validate", "--config", &cfg, "--scenario", "keyrate"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("ProtocolParams.send_prob"), "{err}");
    assert!(err.contains("ProtocolParams.ec_efficiency"), "{err}");
}

#[test]
fn unknown_keys_and_bad_files_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[protocol]\nsignal = 0.4\n");
    let o = oilsec(&["keyrate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("signal"));

    let o = oilsec(&["keyrate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = write_config(
        dir.path(),
        "[budget]\nmax_photons_per_pulse = 1e-7\ncomponents = [{ path = \"missing.csv\" }]\n",
    );
    let o = oilsec(&["validate", "--config", &cfg, "--scenario", "budget"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3_naming_operation() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(support::fixture("bandpass_1550.csv"), dir.path().join("bp.csv")).unwrap();
    let cfg = write_config(
        dir.path(),
        "[budget]\nwavelengths_nm = [3000.0]\nmax_photons_per_pulse = 1e-7\ncomponents = [{ path = \"bp.csv\" }]\n",
    );
    let o = oilsec(&["budget", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bp"), "{err}");
    assert!(err.contains("3000"), "{err}");
}

#[test]
fn table_format_aligns_columns() {
    let o = oilsec(&["keyrate", "--format", "table"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 52);
    assert!(lines[0].trim_start().starts_with("distance_km"));
    assert!(!lines[0].contains(','));
}
