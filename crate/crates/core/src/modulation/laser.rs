//! Phenomenological response of an injection-locked laser.
//!
//! The locked laser reacts to the magnitude of the injected power excursion:
//! any transient first pulls photons out of the cavity and then returns them
//! through a damped relaxation oscillation. The kernel is the negative time
//! derivative of `exp(-t/tau) sin(2 pi f t)`, so it has zero net area and the
//! output keeps the injected mean power. Responding to `|deviation|` makes both
//! paired input orderings come out dip-then-peak.

use serde::{Deserialize, Serialize};

use super::{detectors::bin_sums, Waveform};
use crate::validate::{Checker, Validate, Violation};
use crate::{Error, Result};

/// Maps injected modulation amplitude to output modulation amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GainMap {
    Linear {
        slope: f64,
    },
    /// `max * tanh(amplitude / scale)`
    Saturating {
        max: f64,
        scale: f64,
    },
}

impl GainMap {
    pub fn apply(&self, amplitude: f64) -> f64 {
        match *self {
            GainMap::Linear { slope } => slope * amplitude,
            GainMap::Saturating { max, scale } => max * (amplitude / scale).tanh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LockedLaserResponse {
    pub gain: GainMap,
    /// Relaxation-oscillation frequency of the ringing.
    pub ringing_freq_hz: f64,
    pub damping_time_s: f64,
    /// Kernel length in damping times.
    pub kernel_span: f64,
    /// Amplitude-phase coupling (linewidth enhancement) factor.
    pub chirp_coeff: f64,
}

impl Default for LockedLaserResponse {
    fn default() -> Self {
        Self {
            gain: GainMap::Linear { slope: 1.0 },
            ringing_freq_hz: 5e9,
            damping_time_s: 100e-12,
            kernel_span: 8.0,
            chirp_coeff: 3.0,
        }
    }
}

impl Validate for LockedLaserResponse {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("LockedLaserResponse");
        match self.gain {
            GainMap::Linear { slope } => {
                if c.finite(slope, "gain") {
                    c.check(slope >= 0.0, "gain", || {
                        format!("slope must be >= 0 for a monotone map, got {slope}")
                    });
                }
            }
            GainMap::Saturating { max, scale } => {
                c.check(max >= 0.0 && max.is_finite(), "gain", || {
                    format!("max must be finite and >= 0, got {max}")
                });
                c.check(scale > 0.0 && scale.is_finite(), "gain", || {
                    format!("scale must be > 0, got {scale}")
                });
            }
        }
        for (v, name) in [
            (self.ringing_freq_hz, "ringing_freq_hz"),
            (self.damping_time_s, "damping_time_s"),
            (self.kernel_span, "kernel_span"),
        ] {
            if c.finite(v, name) {
                c.check(v > 0.0, name, || format!("must be > 0, got {v}"));
            }
        }
        c.finite(self.chirp_coeff, "chirp_coeff");
        c.finish()
    }
}

impl LockedLaserResponse {
    /// Impulse response sampled at `sample_rate_hz`, with unit L1 norm and
    /// zero sum.
    pub fn kernel(&self, sample_rate_hz: f64) -> Vec<f64> {
        let dt = 1.0 / sample_rate_hz;
        let len = ((self.kernel_span * self.damping_time_s) / dt).ceil().max(2.0) as usize;
        let w = std::f64::consts::TAU * self.ringing_freq_hz;
        let mut g: Vec<f64> = (0..=len)
            .map(|i| {
                let t = i as f64 * dt;
                (-t / self.damping_time_s).exp() * (w * t).sin()
            })
            .collect();
        g[len] = 0.0;
        let mut k: Vec<f64> = g.windows(2).map(|p| p[0] - p[1]).collect();
        let norm: f64 = k.iter().map(|x| x.abs()).sum();
        if norm > 0.0 {
            k.iter_mut().for_each(|x| *x /= norm);
        }
        k
    }

    /// Output deviation (relative to baseline) before the gain map, for a
    /// unit-amplitude version of `inj`. Returns the amplitude too.
    fn shaped_deviation(&self, inj: &Waveform) -> (f64, Vec<f64>) {
        let base = inj.reference_level();
        let dev: Vec<f64> = inj.samples.iter().map(|&p| ((p - base) / base).abs()).collect();
        let amplitude = dev.iter().cloned().fold(0.0, f64::max);
        let n = dev.len();
        let mut out = vec![0.0; n];
        if amplitude == 0.0 {
            return (0.0, out);
        }
        let kernel = self.kernel(inj.sample_rate_hz);
        for (i, &d) in dev.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let d = d / amplitude;
            for (j, &k) in kernel.iter().enumerate() {
                out[(i + j) % n] += d * k;
            }
        }
        (amplitude, out)
    }

    /// Sets a linear gain so that `reference` produces a relative peak of
    /// `target` in the mean power of `bin_width_s` bins.
    pub fn calibrate(self, reference: &Waveform, bin_width_s: f64, target: f64) -> Result<Self> {
        let (amplitude, shape) = self.shaped_deviation(reference);
        if amplitude == 0.0 {
            return Err(Error::domain("calibrate", "reference waveform carries no modulation"));
        }
        let bins = bin_sums(&shape, reference.sample_rate_hz, bin_width_s)?;
        let per_bin = (bin_width_s * reference.sample_rate_hz).round();
        let peak = bins.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / per_bin;
        if !(peak > 0.0) {
            return Err(Error::domain("calibrate", "response has no positive excursion"));
        }
        let slope = target / (amplitude * peak);
        let calibrated = Self {
            gain: GainMap::Linear { slope },
            ..self
        };
        let trough = shape.iter().cloned().fold(f64::INFINITY, f64::min);
        if 1.0 + slope * amplitude * trough < 0.0 {
            return Err(Error::domain(
                "calibrate",
                "calibrated response would clip at zero power",
            ));
        }
        Ok(calibrated)
    }
}

/// Locked-laser output for an injected trace. Power is clipped at zero.
pub fn apply_laser_response(inj: &Waveform, resp: &LockedLaserResponse) -> Result<Waveform> {
    resp.validate()?;
    let base = inj.reference_level();
    let (amplitude, shape) = resp.shaped_deviation(inj);
    let g = resp.gain.apply(amplitude);
    let samples = shape.iter().map(|&y| (base * (1.0 + g * y)).max(0.0)).collect();
    Waveform::new(samples, inj.sample_rate_hz, Some(base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::{synthesize_waveform, ModulationKind, ModulationPattern};
    use approx::assert_relative_eq;

    fn injected(kind: ModulationKind, h: f64) -> Waveform {
        let pat = ModulationPattern {
            kind,
            height: h,
            ..Default::default()
        };
        synthesize_waveform(&pat, 1e-9, 1e12).unwrap()
    }

    #[test]
    fn kernel_is_normalised_and_balanced() {
        let k = LockedLaserResponse::default().kernel(1e12);
        assert_relative_eq!(k.iter().map(|x| x.abs()).sum::<f64>(), 1.0, max_relative = 1e-12);
        assert!(k.iter().sum::<f64>().abs() < 1e-12);
        assert!(k[0] < 0.0);
    }

    #[test]
    fn unmodulated_input_passes_through() {
        let inj = injected(ModulationKind::UpToDown, 0.0);
        let out = apply_laser_response(&inj, &LockedLaserResponse::default()).unwrap();
        assert!(out.samples.iter().all(|&s| s == 1e-3));
    }

    #[test]
    fn paired_inputs_come_out_dip_then_peak() {
        for kind in [ModulationKind::UpToDown, ModulationKind::DownToUp] {
            let out = apply_laser_response(&injected(kind, 0.3), &LockedLaserResponse::default()).unwrap();
            let argmin = (0..out.len())
                .min_by(|&a, &b| out.samples[a].total_cmp(&out.samples[b]))
                .unwrap();
            let argmax = (0..out.len())
                .max_by(|&a, &b| out.samples[a].total_cmp(&out.samples[b]))
                .unwrap();
            assert!(argmin < argmax, "{kind:?}: min at {argmin}, max at {argmax}");
        }
    }

    #[test]
    fn output_keeps_mean_power() {
        let out = apply_laser_response(
            &injected(ModulationKind::UpToDown, 0.5),
            &LockedLaserResponse::default(),
        )
        .unwrap();
        assert_relative_eq!(out.mean_power(), 1e-3, max_relative = 1e-12);
    }

    #[test]
    fn linear_gain_scales_deviation() {
        let inj = injected(ModulationKind::UpToDown, 0.2);
        let one = LockedLaserResponse::default();
        let two = LockedLaserResponse {
            gain: GainMap::Linear { slope: 2.0 },
            ..one
        };
        let a = apply_laser_response(&inj, &one).unwrap();
        let b = apply_laser_response(&inj, &two).unwrap();
        let peak = |w: &Waveform| w.samples.iter().map(|s| (s - 1e-3).abs()).fold(0.0, f64::max);
        assert_relative_eq!(peak(&b), 2.0 * peak(&a), max_relative = 1e-12);
    }

    #[test]
    fn calibration_hits_binned_target() {
        let inj = injected(ModulationKind::UpToDown, 0.5);
        let resp = LockedLaserResponse::default().calibrate(&inj, 10e-12, 0.51).unwrap();
        let out = apply_laser_response(&inj, &resp).unwrap();
        let bins = bin_sums(&out.samples, 1e12, 10e-12).unwrap();
        let peak = bins.iter().cloned().fold(0.0, f64::max) / (10.0 * 1e-3);
        assert_relative_eq!(peak - 1.0, 0.51, max_relative = 1e-10);
    }
}
