//! Trojan-wavelength isolation budget.
//!
//! Spectral profiles are piecewise linear in (nm, dB) and are never
//! extrapolated. Cascades add in dB: attenuation profiles count positively,
//! transparency gains count negatively.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::modulation::photon_energy_j;
use crate::{Error, Result};

pub const DEFAULT_LIDT_REFERENCE_W: f64 = 100.0;
pub const DEFAULT_LIDT_REFERENCE_NM: f64 = 1550.0;
/// Commonly quoted input-to-output isolation for a leakage-free transmitter.
pub const REFERENCE_ISOLATION_DB: f64 = 200.0;
/// Default responsivity floor below the detector's peak that counts as blind.
pub const DEFAULT_RESPONSIVITY_FLOOR_DB: f64 = -20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Attenuation,
    TransparencyGain,
    Responsivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub wavelength_nm: f64,
    pub value_db: f64,
}

/// A measured dB curve over wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    pub name: String,
    pub kind: ProfileKind,
    points: Vec<ProfilePoint>,
}

impl SpectralProfile {
    pub fn new(name: impl Into<String>, kind: ProfileKind, points: Vec<ProfilePoint>) -> Result<Self> {
        let name = name.into();
        if points.is_empty() {
            return Err(Error::domain(
                "SpectralProfile",
                format!("profile '{name}' has no points"),
            ));
        }
        if let Some(p) = points
            .iter()
            .find(|p| !(p.wavelength_nm.is_finite() && p.value_db.is_finite()))
        {
            return Err(Error::domain(
                "SpectralProfile",
                format!("profile '{name}' has a non-finite point {p:?}"),
            ));
        }
        if let Some(w) = points.windows(2).find(|w| !(w[0].wavelength_nm < w[1].wavelength_nm)) {
            return Err(Error::domain(
                "SpectralProfile",
                format!(
                    "profile '{name}': wavelengths must be strictly increasing ({} then {})",
                    w[0].wavelength_nm, w[1].wavelength_nm
                ),
            ));
        }
        Ok(Self { name, kind, points })
    }

    pub fn from_pairs(name: impl Into<String>, kind: ProfileKind, pairs: &[(f64, f64)]) -> Result<Self> {
        let points = pairs
            .iter()
            .map(|&(wavelength_nm, value_db)| ProfilePoint {
                wavelength_nm,
                value_db,
            })
            .collect();
        Self::new(name, kind, points)
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn min_nm(&self) -> f64 {
        self.points[0].wavelength_nm
    }

    pub fn max_nm(&self) -> f64 {
        self.points[self.points.len() - 1].wavelength_nm
    }

    pub fn contains(&self, wavelength_nm: f64) -> bool {
        (self.min_nm()..=self.max_nm()).contains(&wavelength_nm)
    }

    fn out_of_range(&self, what: &'static str, wavelength_nm: f64) -> Error {
        Error::OutOfRange {
            what,
            profile: self.name.clone(),
            wavelength_nm,
            min_nm: self.min_nm(),
            max_nm: self.max_nm(),
        }
    }

    /// Linear interpolation in dB.
    pub fn value_at(&self, wavelength_nm: f64) -> Result<f64> {
        if !self.contains(wavelength_nm) {
            return Err(self.out_of_range("query", wavelength_nm));
        }
        let i = self.points.partition_point(|p| p.wavelength_nm <= wavelength_nm);
        if i == self.points.len() {
            return Ok(self.points[i - 1].value_db);
        }
        let (a, b) = (self.points[i - 1], self.points[i]);
        let f = (wavelength_nm - a.wavelength_nm) / (b.wavelength_nm - a.wavelength_nm);
        Ok(a.value_db + f * (b.value_db - a.value_db))
    }

    pub fn peak_db(&self) -> f64 {
        self.points.iter().map(|p| p.value_db).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Reads `wavelength_nm,value_db` rows.
    pub fn read_csv<R: Read>(name: impl Into<String>, kind: ProfileKind, input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["wavelength_nm", "value_db"] {
            return Err(Error::domain(
                "SpectralProfile::read_csv",
                format!(
                    "expected header 'wavelength_nm,value_db', got '{}'",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let points = r.deserialize().collect::<std::result::Result<Vec<ProfilePoint>, _>>()?;
        Self::new(name, kind, points)
    }

    pub fn load(path: impl AsRef<Path>, kind: ProfileKind) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::read_csv(name, kind, file)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: self.name.clone(),
            source: e,
        })
    }
}

/// `sqrt(lambda / lambda0) * reference_power`.
pub fn lidt_at(wavelength_nm: f64, reference_power_w: f64, reference_nm: f64) -> Result<f64> {
    if !(wavelength_nm > 0.0 && reference_nm > 0.0) {
        return Err(Error::domain(
            "lidt_at",
            format!("wavelengths must be > 0, got {wavelength_nm} nm and {reference_nm} nm"),
        ));
    }
    Ok((wavelength_nm / reference_nm).sqrt() * reference_power_w)
}

// Union of both grids restricted to the overlap of their ranges.
fn shared_grid(a: &SpectralProfile, b: &SpectralProfile) -> Vec<f64> {
    let lo = a.min_nm().max(b.min_nm());
    let hi = a.max_nm().min(b.max_nm());
    let mut grid: Vec<f64> = a
        .points
        .iter()
        .chain(&b.points)
        .map(|p| p.wavelength_nm)
        .filter(|&w| w >= lo && w <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Effective transparency gained by connecting the cavity: the loss with it
/// disconnected minus the loss with it connected (powered off).
pub fn transparency_gain(
    loss_disconnected: &SpectralProfile,
    loss_connected_off: &SpectralProfile,
) -> Result<SpectralProfile> {
    let grid = shared_grid(loss_disconnected, loss_connected_off);
    if grid.is_empty() {
        return Err(Error::domain(
            "transparency_gain",
            format!(
                "profiles '{}' and '{}' do not overlap",
                loss_disconnected.name, loss_connected_off.name
            ),
        ));
    }
    let points = grid
        .into_iter()
        .map(|w| {
            Ok(ProfilePoint {
                wavelength_nm: w,
                value_db: loss_disconnected.value_at(w)? - loss_connected_off.value_at(w)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralProfile::new(
        format!("{}-minus-{}", loss_disconnected.name, loss_connected_off.name),
        ProfileKind::TransparencyGain,
        points,
    )
}

/// Maximal wavelength intervals where the cavity adds transparency and the
/// watchdog photodiode is blind.
///
/// `responsivity_floor_db` is relative to the responsivity peak. Both curves
/// are piecewise linear on the merged grid, so crossings are exact.
pub fn vulnerable_windows(
    gain: &SpectralProfile,
    pd_responsivity: &SpectralProfile,
    responsivity_floor_db: f64,
) -> Result<Vec<(f64, f64)>> {
    let grid = shared_grid(gain, pd_responsivity);
    let floor = pd_responsivity.peak_db() + responsivity_floor_db;
    let mut windows: Vec<(f64, f64)> = Vec::new();
    let mut push = |lo: f64, hi: f64| match windows.last_mut() {
        Some(last) if last.1 >= lo => last.1 = last.1.max(hi),
        _ => windows.push((lo, hi)),
    };

    if grid.len() == 1 {
        let w = grid[0];
        if gain.value_at(w)? > 0.0 && pd_responsivity.value_at(w)? < floor {
            push(w, w);
        }
        return Ok(windows);
    }
    for seg in grid.windows(2) {
        let (x0, x1) = (seg[0], seg[1]);
        let (g0, g1) = (gain.value_at(x0)?, gain.value_at(x1)?);
        let (r0, r1) = (
            pd_responsivity.value_at(x0)? - floor,
            pd_responsivity.value_at(x1)? - floor,
        );
        // on this segment: gain > 0 and r < 0, each a half-line in x
        let Some((a0, a1)) = linear_region(x0, x1, g0, g1, true) else {
            continue;
        };
        let Some((b0, b1)) = linear_region(x0, x1, r0, r1, false) else {
            continue;
        };
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        if lo < hi {
            push(lo, hi);
        }
    }
    Ok(windows)
}

// Sub-interval of [x0, x1] where the linear function through (x0, v0), (x1, v1)
// is positive (or negative).
fn linear_region(x0: f64, x1: f64, v0: f64, v1: f64, positive: bool) -> Option<(f64, f64)> {
    let (v0, v1) = if positive { (v0, v1) } else { (-v0, -v1) };
    match (v0 > 0.0, v1 > 0.0) {
        (true, true) => Some((x0, x1)),
        (false, false) => None,
        (s0, _) => {
            let xc = x0 + (x1 - x0) * v0 / (v0 - v1);
            if s0 {
                Some((x0, xc))
            } else {
                Some((xc, x1))
            }
        }
    }
}

/// Total isolation in dB of a component chain at one wavelength.
pub fn cascade_isolation(components: &[SpectralProfile], wavelength_nm: f64) -> Result<f64> {
    let mut total = 0.0;
    for c in components {
        if !c.contains(wavelength_nm) {
            return Err(c.out_of_range("cascade component", wavelength_nm));
        }
        let v = c.value_at(wavelength_nm)?;
        total += match c.kind {
            ProfileKind::Attenuation => v,
            ProfileKind::TransparencyGain => -v,
            ProfileKind::Responsivity => {
                return Err(Error::domain(
                    "cascade_isolation",
                    format!("'{}' is a responsivity curve, not a cascade component", c.name),
                ))
            }
        };
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub wavelength_nm: f64,
    pub lidt_w: f64,
    pub total_isolation_db: f64,
    pub worst_case_output_w: f64,
    pub worst_case_photons_per_pulse: f64,
    pub max_photons_per_pulse: f64,
    pub meets_target: bool,
    /// Isolation that would bring the LIDT input down to the target.
    pub required_isolation_db: f64,
    /// How far the cascade falls short of the 200 dB reference figure.
    pub shortfall_vs_reference_db: f64,
}

/// Isolation that attenuates `input_w` to `max_photons_per_pulse` photons per
/// pulse at `pulse_rate_hz`.
pub fn required_isolation_db(input_w: f64, wavelength_nm: f64, pulse_rate_hz: f64, max_photons_per_pulse: f64) -> f64 {
    let tolerable_w = max_photons_per_pulse * photon_energy_j(wavelength_nm) * pulse_rate_hz;
    10.0 * (input_w / tolerable_w).log10()
}

/// Worst-case leakage with Eve injecting at the damage threshold.
///
/// `max_photons_per_pulse` has no established default for this protocol
/// family and must come from the caller's security analysis.
pub fn budget_report(
    wavelength_nm: f64,
    components: &[SpectralProfile],
    pulse_rate_hz: f64,
    max_photons_per_pulse: f64,
) -> Result<BudgetReport> {
    if !(pulse_rate_hz > 0.0 && max_photons_per_pulse > 0.0) {
        return Err(Error::domain(
            "budget_report",
            format!("pulse rate and photon target must be > 0, got {pulse_rate_hz} Hz and {max_photons_per_pulse}"),
        ));
    }
    let lidt_w = lidt_at(wavelength_nm, DEFAULT_LIDT_REFERENCE_W, DEFAULT_LIDT_REFERENCE_NM)?;
    let total_isolation_db = cascade_isolation(components, wavelength_nm)?;
    let worst_case_output_w = lidt_w * 10f64.powf(-total_isolation_db / 10.0);
    let worst_case_photons_per_pulse = worst_case_output_w / (photon_energy_j(wavelength_nm) * pulse_rate_hz);
    Ok(BudgetReport {
        wavelength_nm,
        lidt_w,
        total_isolation_db,
        worst_case_output_w,
        worst_case_photons_per_pulse,
        max_photons_per_pulse,
        meets_target: worst_case_photons_per_pulse <= max_photons_per_pulse,
        required_isolation_db: required_isolation_db(lidt_w, wavelength_nm, pulse_rate_hz, max_photons_per_pulse),
        shortfall_vs_reference_db: REFERENCE_ISOLATION_DB - total_isolation_db,
    })
}
