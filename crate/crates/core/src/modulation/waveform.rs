use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniformly sampled optical power.
///
/// Traces are treated as one period of a periodic signal wherever a detector
/// needs more time than the trace covers.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    /// Power in watts.
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
    /// Unmodulated power level, when known.
    pub baseline_w: Option<f64>,
}

/// One CSV row of an exported waveform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformPoint {
    pub time_s: f64,
    pub power_w: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64, baseline_w: Option<f64>) -> Result<Self> {
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::domain(
                "Waveform",
                format!("sample rate must be > 0, got {sample_rate_hz}"),
            ));
        }
        if samples.is_empty() {
            return Err(Error::domain("Waveform", "waveform has no samples"));
        }
        if let Some(bad) = samples.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::domain(
                "Waveform",
                format!("optical power must be finite and >= 0, got {bad}"),
            ));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            baseline_w,
        })
    }

    pub fn constant(power_w: f64, samples: usize, sample_rate_hz: f64) -> Result<Self> {
        Self::new(vec![power_w; samples], sample_rate_hz, Some(power_w))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    pub fn mean_power(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// The stated baseline, or the mean power when none is recorded.
    pub fn reference_level(&self) -> f64 {
        self.baseline_w.unwrap_or_else(|| self.mean_power())
    }

    pub fn peak_to_peak(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
                (lo.min(s), hi.max(s))
            });
        hi - lo
    }

    pub fn points(&self) -> impl Iterator<Item = WaveformPoint> + '_ {
        self.samples.iter().enumerate().map(move |(i, &p)| WaveformPoint {
            time_s: i as f64 / self.sample_rate_hz,
            power_w: p,
        })
    }

    /// Writes `time_s,power_w` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in self.points() {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<waveform>".into(),
            source: e,
        })?;
        Ok(())
    }

    /// Reads a trace written by [`Waveform::write_csv`]. The sample rate is
    /// recovered from the time column.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let rows: Vec<WaveformPoint> = r.deserialize().collect::<std::result::Result<_, _>>()?;
        if rows.len() < 2 {
            return Err(Error::domain("Waveform::read_csv", "need at least two samples"));
        }
        let span = rows[rows.len() - 1].time_s - rows[0].time_s;
        let rate = (rows.len() - 1) as f64 / span;
        Self::new(rows.into_iter().map(|p| p.power_w).collect(), rate, None)
    }
}
