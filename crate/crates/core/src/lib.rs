//! Implementation-security analysis for injection-locked twin-field QKD
//! transmitters.
//!
//! * [`keyrate`]: asymptotic sending-or-not-sending statistics and key rate,
//!   with a Monte Carlo detection oracle in [`oracle`].
//! * [`attack`]: key-parameter optimisation and the intensity-attack sweep.
//! * [`modulation`]: Eve's modulation patterns, the locked-laser response and
//!   the watchdog detectors.
//! * [`isolation`]: Trojan-wavelength damage thresholds and isolation budgets.
//! * [`config`] and [`run`]: the scenario runner behind the `oilsec` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod attack;
pub mod config;
mod error;
pub mod isolation;
pub mod keyrate;
pub mod modulation;
pub mod optimize;
pub mod oracle;
pub mod run;
pub mod special;
pub mod validate;

pub use error::{Error, Result};
