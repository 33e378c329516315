//! Time-domain simulation of reference-intensity modulation and the
//! watchdog detectors that try to catch it.
//!
//! The chain is: [`synthesize_waveform`] builds Eve's injected power trace,
//! [`apply_laser_response`] maps it to the locked laser's output, and the
//! detector models read either trace.

mod detectors;
mod laser;
mod pattern;
mod spectrum;
mod waveform;

pub use detectors::{
    fast_pd_detect, power_meter_readout, snspd_counts, FastPdModel, FastPdReading, PowerMeterModel, PowerMeterReadout,
    SnspdModel, SnspdTrace,
};
pub use laser::{apply_laser_response, GainMap, LockedLaserResponse};
pub use pattern::{synthesize_waveform, ModulationKind, ModulationPattern};
pub use spectrum::{optical_spectrum, sideband_monitor, SidebandReading, Spectrum, SpectrumPoint};
pub use waveform::{Waveform, WaveformPoint};

/// Planck constant times the speed of light, J m.
pub const PLANCK_TIMES_C: f64 = 6.626_070_15e-34 * 299_792_458.0;

/// Photon energy in joules at a vacuum wavelength in nanometres.
pub fn photon_energy_j(wavelength_nm: f64) -> f64 {
    PLANCK_TIMES_C / (wavelength_nm * 1e-9)
}
