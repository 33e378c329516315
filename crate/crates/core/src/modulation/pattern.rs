use serde::{Deserialize, Serialize};

use super::Waveform;
use crate::validate::{Checker, Validate, Violation};
use crate::{Error, Result};

/// Minimum samples per lobe for a waveform to resolve the pattern.
pub const MIN_SAMPLES_PER_LOBE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModulationKind {
    Up,
    Down,
    UpToDown,
    DownToUp,
}

impl ModulationKind {
    /// Paired patterns carry a compensating lobe and keep the mean power.
    pub fn is_paired(self) -> bool {
        matches!(self, ModulationKind::UpToDown | ModulationKind::DownToUp)
    }

    /// Signs of the lobes in time order.
    fn lobes(self) -> &'static [f64] {
        match self {
            ModulationKind::Up => &[1.0],
            ModulationKind::Down => &[-1.0],
            ModulationKind::UpToDown => &[1.0, -1.0],
            ModulationKind::DownToUp => &[-1.0, 1.0],
        }
    }
}

/// Eve's periodic modulation of the reference beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModulationPattern {
    pub kind: ModulationKind,
    /// Lobe height as a fraction of the baseline power.
    pub height: f64,
    /// Lobe width in seconds.
    pub width_s: f64,
    /// Modulation period in seconds.
    pub period_s: f64,
    pub baseline_w: f64,
}

impl Default for ModulationPattern {
    fn default() -> Self {
        Self {
            kind: ModulationKind::UpToDown,
            height: 0.5,
            width_s: 50e-12,
            period_s: 1e-9,
            baseline_w: 1e-3,
        }
    }
}

impl ModulationPattern {
    pub fn with_height(self, height: f64) -> Self {
        Self { height, ..self }
    }
}

impl Validate for ModulationPattern {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("ModulationPattern");
        if c.finite(self.height, "height") {
            c.check(self.height >= 0.0, "height", || {
                format!("must be >= 0, got {}", self.height)
            });
            let has_down = self.kind != ModulationKind::Up;
            c.check(!has_down || self.height <= 1.0, "height", || {
                format!(
                    "a downward lobe needs height <= 1 to keep power non-negative, got {}",
                    self.height
                )
            });
        }
        if c.finite(self.baseline_w, "baseline_w") {
            c.check(self.baseline_w > 0.0, "baseline_w", || {
                format!("must be > 0, got {}", self.baseline_w)
            });
        }
        let w_ok = c.finite(self.width_s, "width_s");
        if w_ok {
            c.check(self.width_s > 0.0, "width_s", || {
                format!("must be > 0, got {}", self.width_s)
            });
        }
        if c.finite(self.period_s, "period_s") && w_ok {
            let lobes = self.kind.lobes().len() as f64;
            c.check(self.period_s > lobes * self.width_s, "period_s", || {
                format!(
                    "{:?} needs period > {} x width ({} s), got {} s",
                    self.kind, lobes, self.width_s, self.period_s
                )
            });
        }
        c.finish()
    }
}

/// Renders rectangular lobes of `+-height * baseline` on the baseline.
///
/// Lobe widths are rounded to whole samples and every lobe in the trace has
/// the same sample count, so paired patterns are balanced sample for sample.
pub fn synthesize_waveform(pat: &ModulationPattern, duration_s: f64, sample_rate_hz: f64) -> Result<Waveform> {
    pat.validate()?;
    if !(sample_rate_hz > 0.0 && duration_s > 0.0) {
        return Err(Error::domain(
            "synthesize_waveform",
            format!("duration and sample rate must be > 0, got {duration_s} s at {sample_rate_hz} Hz"),
        ));
    }
    let per_lobe = pat.width_s * sample_rate_hz;
    if per_lobe < MIN_SAMPLES_PER_LOBE - 1e-9 {
        return Err(Error::domain(
            "synthesize_waveform",
            format!("{per_lobe:.2} samples per lobe; need at least {MIN_SAMPLES_PER_LOBE}"),
        ));
    }
    let lobe_len = per_lobe.round() as usize;
    let n = (duration_s * sample_rate_hz).round() as usize;
    if n == 0 {
        return Err(Error::domain("synthesize_waveform", "duration shorter than one sample"));
    }
    let period_samples = pat.period_s * sample_rate_hz;

    let base = pat.baseline_w;
    let mut samples = vec![base; n];
    let mut k = 0usize;
    loop {
        let start = (k as f64 * period_samples).round() as usize;
        if start >= n {
            break;
        }
        for (j, sign) in pat.kind.lobes().iter().enumerate() {
            let level = base * (1.0 + sign * pat.height);
            let lo = start + j * lobe_len;
            let hi = (lo + lobe_len).min(n);
            for s in samples.iter_mut().take(hi).skip(lo) {
                *s = level;
            }
        }
        k += 1;
    }
    Waveform::new(samples, sample_rate_hz, Some(base))
}
