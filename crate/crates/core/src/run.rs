//! Scenario execution shared by the CLI and the integration tests.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::attack::{attack_sweep, optimize_params};
use crate::config::{ModulationConfig, RunConfig, Scenario};
use crate::isolation::{budget_report, SpectralProfile};
use crate::keyrate::{key_rate_terms, yield_set};
use crate::modulation::{
    apply_laser_response, fast_pd_detect, optical_spectrum, power_meter_readout, sideband_monitor, snspd_counts,
    synthesize_waveform, LockedLaserResponse, PowerMeterModel,
};
use crate::validate::Violation;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Table,
}

/// Process exit code for an error: bad input is 2, a failed computation 3.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Invalid(_) | Error::Io { .. } | Error::Csv(_) => EXIT_CONFIG,
        Error::Domain { .. } | Error::NonDistillable(_) | Error::OutOfRange { .. } => EXIT_NUMERICAL,
    }
}

/// Child seed for the `index`-th independent stream of a run.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct KeyrateRow {
    pub distance_km: f64,
    pub s0: f64,
    pub s1: f64,
    pub sz_corr: f64,
    pub sz_err: f64,
    pub sz: f64,
    pub ez: Option<f64>,
    pub sx_corr: f64,
    pub sx_err: f64,
    pub sx: f64,
    pub ex: Option<f64>,
    pub e_ph_bound: f64,
    pub single_photon_term: f64,
    pub correction_term: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct OptimizeRow {
    pub distance_km: f64,
    pub best_eps: f64,
    pub best_mu: f64,
    pub best_rate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ModulationRow {
    pub height: f64,
    pub integration_time_s: f64,
    pub pm_mean_deviation: f64,
    pub pm_mean_deviation_stderr: f64,
    pub pm_z_score: f64,
    pub pm_std_ratio: f64,
    pub fast_pd_injected_p2p_w: f64,
    pub fast_pd_injected_detected: bool,
    pub fast_pd_output_p2p_w: f64,
    pub fast_pd_output_detected: bool,
    pub snspd_relative_peak: f64,
    pub snspd_relative_peak_stderr: f64,
    pub sideband_power_w: f64,
    pub sideband_threshold_w: f64,
    pub sideband_detected: bool,
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

fn ensure_valid(v: Vec<Violation>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(v))
    }
}

pub fn keyrate_rows(cfg: &RunConfig) -> Result<Vec<KeyrateRow>> {
    let p = &cfg.protocol;
    let mu = p.signal_intensity;
    cfg.sweep
        .distances()
        .into_iter()
        .map(|d| {
            let ch = cfg.channel.at_distance(d);
            let y = yield_set(p, &cfg.detector, &ch)?;
            let t = key_rate_terms(p, &cfg.detector, &ch, mu, mu)?;
            Ok(KeyrateRow {
                distance_km: d,
                s0: y.s0,
                s1: y.s1,
                sz_corr: y.sz_corr,
                sz_err: y.sz_err,
                sz: y.sz,
                ez: y.ez,
                sx_corr: y.sx_corr,
                sx_err: y.sx_err,
                sx: y.sx,
                ex: y.ex,
                e_ph_bound: y.e_ph_bound,
                single_photon_term: t.single_photon_term,
                correction_term: t.correction_term,
                rate: t.rate,
            })
        })
        .collect()
}

pub fn optimize_rows(cfg: &RunConfig) -> Result<Vec<OptimizeRow>> {
    cfg.sweep
        .distances()
        .into_par_iter()
        .map(|d| {
            let ch = cfg.channel.at_distance(d);
            let r = optimize_params(&cfg.detector, &ch, &cfg.protocol, &cfg.optimizer)?;
            if !r.converged {
                log::warn!("optimizer did not converge at {d} km");
            }
            Ok(OptimizeRow {
                distance_km: d,
                best_eps: r.best_eps,
                best_mu: r.best_mu,
                best_rate: r.best_rate,
                evaluations: r.evaluations,
                converged: r.converged,
            })
        })
        .collect()
}

/// The configured laser response, calibrated if requested.
pub fn laser_response(mc: &ModulationConfig) -> Result<LockedLaserResponse> {
    if !mc.calibration.enabled {
        return Ok(mc.laser);
    }
    let duration = mc.pattern.period_s * mc.periods as f64;
    let reference = synthesize_waveform(
        &mc.pattern.with_height(mc.calibration.max_height),
        duration,
        mc.sample_rate_hz,
    )?;
    mc.laser
        .calibrate(&reference, mc.snspd.bin_width_s, mc.calibration.target_peak)
}

pub fn modulation_rows(cfg: &RunConfig, seed: u64) -> Result<Vec<ModulationRow>> {
    let mc = &cfg.modulation;
    let resp = laser_response(mc)?;
    let duration = mc.pattern.period_s * mc.periods as f64;
    let heights = mc.heights();
    let per_height: Vec<Vec<ModulationRow>> = heights
        .par_iter()
        .enumerate()
        .map(|(hi, &h)| {
            let injected = synthesize_waveform(&mc.pattern.with_height(h), duration, mc.sample_rate_hz)?;
            let output = apply_laser_response(&injected, &resp)?;
            let fp_in = fast_pd_detect(&injected, &mc.fast_pd)?;
            let fp_out = fast_pd_detect(&output, &mc.fast_pd)?;
            let stream = (hi as u64) << 16;
            let sn = snspd_counts(&output, &mc.snspd, derive_seed(seed, stream))?;
            let spectrum = optical_spectrum(&output, &resp)?;
            mc.integration_times_s
                .iter()
                .enumerate()
                .map(|(ti, &t)| {
                    let pm = PowerMeterModel {
                        integration_time_s: t,
                        ..mc.power_meter
                    };
                    let r = power_meter_readout(&output, &pm, mc.windows, derive_seed(seed, stream + 1 + ti as u64))?;
                    let sb = sideband_monitor(&spectrum, mc.reject_halfwidth_hz, &pm)?;
                    Ok(ModulationRow {
                        height: h,
                        integration_time_s: t,
                        pm_mean_deviation: r.mean_deviation,
                        pm_mean_deviation_stderr: r.mean_deviation_stderr,
                        pm_z_score: r.z_score(),
                        pm_std_ratio: r.std_ratio,
                        fast_pd_injected_p2p_w: fp_in.peak_to_peak_w,
                        fast_pd_injected_detected: fp_in.detected,
                        fast_pd_output_p2p_w: fp_out.peak_to_peak_w,
                        fast_pd_output_detected: fp_out.detected,
                        snspd_relative_peak: sn.relative_peak,
                        snspd_relative_peak_stderr: sn.relative_peak_stderr,
                        sideband_power_w: sb.power_w,
                        sideband_threshold_w: sb.threshold_w,
                        sideband_detected: sb.detected,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_height.into_iter().flatten().collect())
}

pub fn load_components(cfg: &RunConfig) -> Result<Vec<SpectralProfile>> {
    cfg.budget
        .components
        .iter()
        .map(|c| SpectralProfile::load(&c.path, c.kind))
        .collect()
}

/// Runs one scenario and returns its CSV table.
pub fn execute(cfg: &RunConfig, scenario: Scenario, seed: u64) -> Result<Vec<u8>> {
    ensure_valid(cfg.violations_for(Some(scenario)))?;
    match scenario {
        Scenario::Keyrate => csv_bytes(&keyrate_rows(cfg)?),
        Scenario::Optimize => csv_bytes(&optimize_rows(cfg)?),
        Scenario::AttackSweep => csv_bytes(&attack_sweep(
            &cfg.sweep.distances(),
            cfg.protocol.enhancement_factor,
            &cfg.detector,
            &cfg.channel,
            &cfg.protocol,
            &cfg.optimizer,
        )?),
        Scenario::Modulation => csv_bytes(&modulation_rows(cfg, seed)?),
        Scenario::Spectrum => {
            let mc = &cfg.modulation;
            let resp = laser_response(mc)?;
            let injected =
                synthesize_waveform(&mc.pattern, mc.pattern.period_s * mc.periods as f64, mc.sample_rate_hz)?;
            let output = apply_laser_response(&injected, &resp)?;
            let mut buf = Vec::new();
            optical_spectrum(&output, &resp)?.write_csv(&mut buf)?;
            Ok(buf)
        }
        Scenario::Budget => {
            let comps = load_components(cfg)?;
            let max_photons = cfg.budget.max_photons_per_pulse.unwrap_or(f64::NAN);
            let rows = cfg
                .budget
                .wavelengths_nm
                .iter()
                .map(|&nm| budget_report(nm, &comps, cfg.budget.pulse_rate_hz, max_photons))
                .collect::<Result<Vec<_>>>()?;
            csv_bytes(&rows)
        }
    }
}

/// Aligns a CSV table into whitespace-separated columns.
pub fn render_table(csv_data: &[u8]) -> Result<String> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(csv_data);
    let rows: Vec<Vec<String>> = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
        .collect::<std::result::Result<_, _>>()?;
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0; ncol];
    for r in &rows {
        for (i, cell) in r.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:>w$}", w = widths[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct RunMeta<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: Scenario,
    seed: u64,
    config: &'a RunConfig,
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Runs a scenario and writes the table to `out` (or stdout), plus a
/// `<out>.meta.json` sidecar recording the resolved configuration.
pub fn run(
    cfg: &RunConfig,
    scenario: Scenario,
    seed: Option<u64>,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<()> {
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let data = execute(cfg, scenario, seed)?;
    let body = match format {
        OutputFormat::Csv => data,
        OutputFormat::Table => render_table(&data)?.into_bytes(),
    };
    match out {
        Some(path) => {
            write_file(path, &body)?;
            let meta = RunMeta {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                scenario,
                seed,
                config: cfg,
            };
            let json = serde_json::to_vec_pretty(&meta).map_err(|e| Error::Config(e.to_string()))?;
            write_file(&meta_path(path), &json)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&body).map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
    }
}

/// Every problem a run would hit before computing anything.
pub fn dry_run(cfg: &RunConfig, scenario: Option<Scenario>) -> Vec<String> {
    let scenario = scenario.or(cfg.scenario);
    let mut problems: Vec<String> = cfg.violations_for(scenario).iter().map(ToString::to_string).collect();
    if scenario == Some(Scenario::Budget) {
        for c in &cfg.budget.components {
            if let Err(e) = SpectralProfile::load(&c.path, c.kind) {
                problems.push(e.to_string());
            }
        }
    }
    problems
}
