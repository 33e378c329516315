//! Watchdog detector models: slow power meter, fast photodiode, SNSPD.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{photon_energy_j, Waveform};
use crate::validate::{Checker, Validate, Violation};
use crate::{Error, Result};

/// Sums of consecutive `bin_width_s` blocks; a trailing partial bin is dropped.
pub(crate) fn bin_sums(samples: &[f64], sample_rate_hz: f64, bin_width_s: f64) -> Result<Vec<f64>> {
    if !(bin_width_s > 0.0) {
        return Err(Error::domain(
            "bin",
            format!("bin width must be > 0, got {bin_width_s}"),
        ));
    }
    let per_bin = (bin_width_s * sample_rate_hz).round() as usize;
    if per_bin == 0 {
        return Err(Error::domain("bin", "bin width is shorter than one sample"));
    }
    Ok(samples.chunks_exact(per_bin).map(|c| c.iter().sum()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PowerMeterModel {
    pub integration_time_s: f64,
    /// Additive reading noise, relative to the nominal power.
    pub noise_rel_std: f64,
}

impl Default for PowerMeterModel {
    fn default() -> Self {
        Self {
            integration_time_s: 25e-6,
            noise_rel_std: 1e-3,
        }
    }
}

impl Validate for PowerMeterModel {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("PowerMeterModel");
        if c.finite(self.integration_time_s, "integration_time_s") {
            c.check(self.integration_time_s > 0.0, "integration_time_s", || {
                format!("must be > 0, got {}", self.integration_time_s)
            });
        }
        if c.finite(self.noise_rel_std, "noise_rel_std") {
            c.check(self.noise_rel_std > 0.0, "noise_rel_std", || {
                format!("must be > 0, got {}", self.noise_rel_std)
            });
        }
        c.finish()
    }
}

/// Power-meter statistics relative to an unmodulated reference run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerMeterReadout {
    /// `(mean - mean_ref) / mean_ref`
    pub mean_deviation: f64,
    pub mean_deviation_stderr: f64,
    /// `std / std_ref`
    pub std_ratio: f64,
    pub windows: u64,
}

impl PowerMeterReadout {
    /// Mean deviation in units of its standard error.
    pub fn z_score(&self) -> f64 {
        self.mean_deviation / self.mean_deviation_stderr
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Consecutive non-overlapping integration windows over the periodically
/// tiled waveform, each reading perturbed by Gaussian noise. The reference
/// run reads the constant baseline with an independent noise stream.
pub fn power_meter_readout(w: &Waveform, pm: &PowerMeterModel, windows: u64, seed: u64) -> Result<PowerMeterReadout> {
    pm.validate()?;
    if windows < 2 {
        return Err(Error::domain(
            "power_meter_readout",
            format!("need at least 2 windows, got {windows}"),
        ));
    }
    let per_window = (pm.integration_time_s * w.sample_rate_hz).round() as u64;
    if per_window == 0 {
        return Err(Error::domain(
            "power_meter_readout",
            "integration window is shorter than one sample",
        ));
    }
    let n = w.len() as u64;
    let mut prefix = Vec::with_capacity(w.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &s in &w.samples {
        acc += s;
        prefix.push(acc);
    }
    let total = acc;
    let cycles = (per_window / n) as f64;
    let rem = per_window % n;
    // sum of `len` samples starting at `start`, wrapping around
    let partial = |start: u64, len: u64| -> f64 {
        let end = start + len;
        if end <= n {
            prefix[end as usize] - prefix[start as usize]
        } else {
            (total - prefix[start as usize]) + prefix[(end - n) as usize]
        }
    };

    let nominal = w.reference_level();
    let sigma = pm.noise_rel_std * nominal;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let mut start = 0u64;
    let attacked: Vec<f64> = (0..windows)
        .map(|_| {
            let avg = (cycles * total + partial(start, rem)) / per_window as f64;
            start = (start + rem) % n;
            let z: f64 = StandardNormal.sample(&mut rng);
            avg + sigma * z
        })
        .collect();
    rng.set_stream(1);
    let reference: Vec<f64> = (0..windows)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            nominal + sigma * z
        })
        .collect();

    let (ma, va) = mean_var(&attacked);
    let (m0, v0) = mean_var(&reference);
    let nw = windows as f64;
    Ok(PowerMeterReadout {
        mean_deviation: (ma - m0) / m0,
        mean_deviation_stderr: (va / nw + v0 / nw).sqrt() / m0,
        std_ratio: (va / v0).sqrt(),
        windows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FastPdModel {
    pub bandwidth_hz: f64,
    pub sampling_rate_hz: f64,
    /// Alarm level as a multiple of the unmodulated peak-to-peak.
    pub detection_threshold: f64,
    /// Peak-to-peak of an unmodulated trace (electronic noise), relative to
    /// the mean power.
    pub noise_floor_rel: f64,
    pub filter_order: u32,
}

impl Default for FastPdModel {
    fn default() -> Self {
        Self {
            bandwidth_hz: 1e9,
            sampling_rate_hz: 20e9,
            detection_threshold: 3.0,
            noise_floor_rel: 2e-3,
            filter_order: 1,
        }
    }
}

impl Validate for FastPdModel {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("FastPDModel");
        let bw = c.finite(self.bandwidth_hz, "bandwidth_hz");
        let fs = c.finite(self.sampling_rate_hz, "sampling_rate_hz");
        if bw && fs {
            c.check(self.bandwidth_hz > 0.0, "bandwidth_hz", || {
                format!("must be > 0, got {}", self.bandwidth_hz)
            });
            c.check(self.bandwidth_hz <= 0.5 * self.sampling_rate_hz, "bandwidth_hz", || {
                format!(
                    "must not exceed half the sampling rate ({} Hz), got {}",
                    0.5 * self.sampling_rate_hz,
                    self.bandwidth_hz
                )
            });
        }
        if c.finite(self.detection_threshold, "detection_threshold") {
            c.check(self.detection_threshold > 0.0, "detection_threshold", || {
                format!("must be > 0, got {}", self.detection_threshold)
            });
        }
        if c.finite(self.noise_floor_rel, "noise_floor_rel") {
            c.check(self.noise_floor_rel > 0.0, "noise_floor_rel", || {
                format!("must be > 0, got {}", self.noise_floor_rel)
            });
        }
        c.check(self.filter_order >= 1, "filter_order", || "must be >= 1".into());
        c.finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FastPdReading {
    pub trace: Waveform,
    pub detected: bool,
    pub peak_to_peak_w: f64,
    pub threshold_w: f64,
}

/// Periodic steady state of `y[n] = (1 - a) y[n-1] + a x[n]`.
fn one_pole_periodic(x: &[f64], a: f64) -> Vec<f64> {
    let decay = 1.0 - a;
    let mut y = 0.0;
    for &v in x {
        y = decay * y + a * v;
    }
    // y after one period from zero; solve y0 = decay^N y0 + y
    let y0 = y / (1.0 - decay.powi(x.len() as i32));
    let mut out = Vec::with_capacity(x.len());
    let mut y = y0;
    for &v in x {
        y = decay * y + a * v;
        out.push(y);
    }
    out
}

/// Low-pass filters the (periodic) trace at the photodiode bandwidth,
/// resamples it at the digitiser rate and compares the peak-to-peak swing
/// with the alarm level.
pub fn fast_pd_detect(w: &Waveform, pd: &FastPdModel) -> Result<FastPdReading> {
    pd.validate()?;
    if w.sample_rate_hz < pd.sampling_rate_hz {
        return Err(Error::domain(
            "fast_pd_detect",
            format!(
                "waveform sampled at {} Hz cannot feed a {} Hz digitiser",
                w.sample_rate_hz, pd.sampling_rate_hz
            ),
        ));
    }
    let a = 1.0 - (-std::f64::consts::TAU * pd.bandwidth_hz / w.sample_rate_hz).exp();
    let mut filtered = w.samples.clone();
    for _ in 0..pd.filter_order {
        filtered = one_pole_periodic(&filtered, a);
    }
    let step = w.sample_rate_hz / pd.sampling_rate_hz;
    let count = (w.len() as f64 / step).floor().max(1.0) as usize;
    let resampled: Vec<f64> = (0..count)
        .map(|j| filtered[((j as f64 * step).round() as usize).min(w.len() - 1)].max(0.0))
        .collect();
    let trace = Waveform::new(resampled, pd.sampling_rate_hz, w.baseline_w)?;
    let p2p = trace.peak_to_peak();
    let threshold = pd.detection_threshold * pd.noise_floor_rel * trace.mean_power();
    Ok(FastPdReading {
        detected: p2p > threshold,
        peak_to_peak_w: p2p,
        threshold_w: threshold,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnspdModel {
    pub detection_efficiency: f64,
    pub bin_width_s: f64,
    /// Attenuation from the monitored power to the single-photon level.
    pub attenuation_db: f64,
    pub wavelength_nm: f64,
    /// Repetitions of the waveform folded into one histogram.
    pub accumulations: u64,
}

impl Default for SnspdModel {
    fn default() -> Self {
        Self {
            detection_efficiency: 0.8,
            bin_width_s: 10e-12,
            attenuation_db: 40.0,
            wavelength_nm: 1550.0,
            accumulations: 100_000,
        }
    }
}

impl Validate for SnspdModel {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("SNSPDModel");
        if c.finite(self.detection_efficiency, "detection_efficiency") {
            c.check(
                self.detection_efficiency > 0.0 && self.detection_efficiency <= 1.0,
                "detection_efficiency",
                || format!("must lie in (0, 1], got {}", self.detection_efficiency),
            );
        }
        if c.finite(self.bin_width_s, "bin_width_s") {
            c.check(self.bin_width_s > 0.0, "bin_width_s", || {
                format!("must be > 0, got {}", self.bin_width_s)
            });
        }
        c.finite(self.attenuation_db, "attenuation_db");
        if c.finite(self.wavelength_nm, "wavelength_nm") {
            c.check(self.wavelength_nm > 0.0, "wavelength_nm", || {
                format!("must be > 0, got {}", self.wavelength_nm)
            });
        }
        c.check(self.accumulations >= 1, "accumulations", || "must be >= 1".into());
        c.finish()
    }
}

impl SnspdModel {
    /// Detected photons per joule of monitored optical energy.
    pub fn counts_per_joule(&self) -> f64 {
        10f64.powf(-self.attenuation_db / 10.0) / photon_energy_j(self.wavelength_nm)
            * self.detection_efficiency
            * self.accumulations as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnspdTrace {
    pub bin_width_s: f64,
    pub expected: Vec<f64>,
    pub counts: Vec<u64>,
    /// Expected counts per bin at the baseline power.
    pub baseline_counts: f64,
    /// `max(counts) / baseline_counts - 1`
    pub relative_peak: f64,
    /// Poisson standard error of `relative_peak`.
    pub relative_peak_stderr: f64,
}

/// Histogrammed photon counts of the attenuated trace.
///
/// The baseline reference comes from the waveform's recorded baseline; when
/// absent, the median bin is used.
pub fn snspd_counts(w: &Waveform, sn: &SnspdModel, seed: u64) -> Result<SnspdTrace> {
    if !(sn.bin_width_s > 0.0) {
        return Err(Error::domain(
            "snspd_counts",
            format!("bin width must be > 0, got {}", sn.bin_width_s),
        ));
    }
    sn.validate()?;
    let energy = bin_sums(&w.samples, w.sample_rate_hz, sn.bin_width_s)?;
    if energy.is_empty() {
        return Err(Error::domain("snspd_counts", "waveform is shorter than one bin"));
    }
    let scale = sn.counts_per_joule() / w.sample_rate_hz;
    let expected: Vec<f64> = energy.iter().map(|e| e * scale).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = expected
        .iter()
        .map(|&m| {
            if m > 0.0 {
                Poisson::new(m)
                    .map(|d| d.sample(&mut rng) as u64)
                    .map_err(|e| Error::domain("snspd_counts", format!("Poisson mean {m}: {e}")))
            } else {
                Ok(0)
            }
        })
        .collect::<Result<Vec<u64>>>()?;

    let per_bin = (sn.bin_width_s * w.sample_rate_hz).round();
    let baseline_counts = match w.baseline_w {
        Some(b) => b * per_bin * scale,
        None => {
            let mut sorted = counts.clone();
            sorted.sort_unstable();
            sorted[sorted.len() / 2] as f64
        }
    };
    let peak = counts.iter().copied().max().unwrap_or(0) as f64;
    let (relative_peak, relative_peak_stderr) = if baseline_counts > 0.0 {
        (peak / baseline_counts - 1.0, peak.sqrt() / baseline_counts)
    } else {
        (0.0, 0.0)
    };
    Ok(SnspdTrace {
        bin_width_s: sn.bin_width_s,
        expected,
        counts,
        baseline_counts,
        relative_peak,
        relative_peak_stderr,
    })
}
