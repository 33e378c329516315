use std::io::Write;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{LockedLaserResponse, PowerMeterModel, Waveform};
use crate::{Error, Result};

/// Power floor, relative to the baseline, applied before taking logarithms.
const POWER_FLOOR_REL: f64 = 1e-15;

/// Optical power per frequency bin, offsets ascending from `-fs/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freq_offset_hz: Vec<f64>,
    pub power_w: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub freq_offset_hz: f64,
    pub power_w: f64,
}

impl Spectrum {
    pub fn total_power(&self) -> f64 {
        self.power_w.iter().sum()
    }

    /// Frequency spacing between bins.
    pub fn resolution_hz(&self) -> f64 {
        if self.freq_offset_hz.len() < 2 {
            return f64::INFINITY;
        }
        self.freq_offset_hz[1] - self.freq_offset_hz[0]
    }

    pub fn points(&self) -> impl Iterator<Item = SpectrumPoint> + '_ {
        self.freq_offset_hz
            .iter()
            .zip(&self.power_w)
            .map(|(&f, &p)| SpectrumPoint {
                freq_offset_hz: f,
                power_w: p,
            })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in self.points() {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<spectrum>".into(),
            source: e,
        })
    }
}

/// Spectrum of the chirped field `sqrt(P) exp(i phi)`.
///
/// The phase follows `dphi/dt = (chirp/2) d ln P / dt`, which integrates to
/// `phi = (chirp/2) ln(P / P_ref)`. Bins are normalised so that they sum to the
/// mean optical power.
pub fn optical_spectrum(w: &Waveform, resp: &LockedLaserResponse) -> Result<Spectrum> {
    let n = w.len();
    let reference = w.reference_level();
    if !(reference > 0.0) {
        return Err(Error::domain("optical_spectrum", "waveform carries no optical power"));
    }
    let floor = POWER_FLOOR_REL * reference;
    let half_chirp = 0.5 * resp.chirp_coeff;
    let mut field: Vec<Complex64> = w
        .samples
        .iter()
        .map(|&p| {
            let p = p.max(floor);
            Complex64::from_polar(p.sqrt(), half_chirp * (p / reference).ln())
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut field);

    let norm = 1.0 / (n as f64 * n as f64);
    let df = w.sample_rate_hz / n as f64;
    // negative frequencies live in the upper half of the FFT output
    let first_negative = n.div_ceil(2);
    let order = (first_negative..n).chain(0..first_negative);
    let (freq_offset_hz, power_w) = order
        .map(|k| {
            let f = if k >= first_negative {
                (k as f64 - n as f64) * df
            } else {
                k as f64 * df
            };
            (f, field[k].norm_sqr() * norm)
        })
        .unzip();
    Ok(Spectrum {
        freq_offset_hz,
        power_w,
    })
}

/// Slow power meter behind a notch that passes the carrier and reroutes
/// everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandReading {
    pub power_w: f64,
    /// Reading-noise level of the power meter at the carrier power.
    pub threshold_w: f64,
    pub detected: bool,
}

/// Integrates the spectral power more than `passband_reject_halfwidth_hz`
/// away from the carrier.
pub fn sideband_monitor(
    spectrum: &Spectrum,
    passband_reject_halfwidth_hz: f64,
    pm: &PowerMeterModel,
) -> Result<SidebandReading> {
    if !(passband_reject_halfwidth_hz >= 0.0) {
        return Err(Error::domain(
            "sideband_monitor",
            format!("reject half-width must be >= 0, got {passband_reject_halfwidth_hz}"),
        ));
    }
    let power_w = spectrum
        .points()
        .filter(|p| p.freq_offset_hz.abs() > passband_reject_halfwidth_hz)
        .map(|p| p.power_w)
        .sum();
    let threshold_w = pm.noise_rel_std * spectrum.total_power();
    Ok(SidebandReading {
        power_w,
        threshold_w,
        detected: power_w > threshold_w,
    })
}
