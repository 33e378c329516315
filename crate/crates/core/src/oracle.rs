//! Monte Carlo detection oracle for the closed-form yields.
//!
//! Each round samples the senders' choices and optical phases, propagates the
//! coherent amplitudes through the beam splitter at the measurement node and
//! draws one threshold-detector outcome per output port. A round counts as an
//! event when exactly one detector clicks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::keyrate::{effective_half_link, ChannelModel, DetectorModel, ProtocolParams};
use crate::{Error, Result};

pub const MIN_ROUNDS: u64 = 100_000;

/// Rounds handled by one substream. Fixed so results do not depend on the
/// size of the thread pool.
const BLOCK_ROUNDS: u64 = 1 << 16;

/// Event frequencies and their binomial standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub rounds: u64,
    pub corr_events: u64,
    pub err_events: u64,
    pub corr: f64,
    pub err: f64,
    pub corr_stderr: f64,
    pub err_stderr: f64,
    pub warnings: Vec<String>,
}

impl OracleEstimate {
    fn new(rounds: u64, corr_events: u64, err_events: u64, warnings: Vec<String>) -> Self {
        let n = rounds as f64;
        let corr = corr_events as f64 / n;
        let err = err_events as f64 / n;
        Self {
            rounds,
            corr_events,
            err_events,
            corr,
            err,
            corr_stderr: (corr * (1.0 - corr) / n).sqrt(),
            err_stderr: (err * (1.0 - err) / n).sqrt(),
            warnings,
        }
    }
}

#[derive(Clone, Copy)]
struct Optics {
    pd: f64,
    cos_pol: f64,
    sin_pol: f64,
}

impl Optics {
    /// Intensities at the two beam-splitter outputs. Bob's pulse is split into
    /// a component co-polarised with Alice's and an orthogonal one that does
    /// not interfere.
    fn port_intensities(&self, a: Complex64, b: Complex64) -> (f64, f64) {
        let b_par = b * self.cos_pol;
        let b_perp = b.norm_sqr() * self.sin_pol * self.sin_pol;
        let plus = 0.5 * ((a + b_par).norm_sqr() + b_perp);
        let minus = 0.5 * ((a - b_par).norm_sqr() + b_perp);
        (plus, minus)
    }

    /// `1 - (1 - p_d) e^{-I}`
    fn click<R: Rng>(&self, rng: &mut R, intensity: f64) -> bool {
        let p = self.pd - (1.0 - self.pd) * (-intensity).exp_m1();
        rng.random::<f64>() < p
    }
}

fn check_inputs(p: &ProtocolParams, det: &DetectorModel, rounds: u64, op: &'static str) -> Result<Vec<String>> {
    if rounds < MIN_ROUNDS {
        return Err(Error::domain(
            op,
            format!("need at least {MIN_ROUNDS} rounds, got {rounds}"),
        ));
    }
    if !(0.0..=1.0).contains(&p.send_prob) || !(p.signal_intensity >= 0.0) || !(p.decoy_intensity >= 0.0) {
        return Err(Error::domain(op, format!("unphysical protocol parameters {p:?}")));
    }
    let mut warnings = Vec::new();
    let pd = det.dark_count_prob;
    if pd > 0.0 && (rounds as f64) * pd < 10.0 {
        let msg = format!(
            "{rounds} rounds expect {:.2} dark counts per detector; dark-count contributions are not resolved",
            rounds as f64 * pd
        );
        log::warn!("{op}: {msg}");
        warnings.push(msg);
    }
    Ok(warnings)
}

fn run_blocks<F>(rounds: u64, seed: u64, body: F) -> (u64, u64)
where
    F: Fn(&mut ChaCha8Rng, u64) -> (u64, u64) + Sync,
{
    let blocks = rounds.div_ceil(BLOCK_ROUNDS);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = BLOCK_ROUNDS.min(rounds - b * BLOCK_ROUNDS);
            body(&mut rng, n)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1))
}

fn random_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())
}

/// Samples key-basis rounds at `p.signal_intensity`.
///
/// Correct events are those where exactly one party sent a pulse; events
/// where both or neither sent are errors.
pub fn monte_carlo_z_oracle(
    p: &ProtocolParams,
    det: &DetectorModel,
    ch: &ChannelModel,
    rounds: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    let warnings = check_inputs(p, det, rounds, "monte_carlo_z_oracle")?;
    let optics = Optics {
        pd: det.dark_count_prob,
        cos_pol: p.polarisation_misalignment.cos(),
        sin_pol: p.polarisation_misalignment.sin(),
    };
    let eps = p.send_prob;
    let amp = (p.signal_intensity * effective_half_link(det, ch)).sqrt();

    let (corr, err) = run_blocks(rounds, seed, |rng, n| {
        let mut corr = 0u64;
        let mut err = 0u64;
        for _ in 0..n {
            let a_sends = rng.random::<f64>() < eps;
            let b_sends = rng.random::<f64>() < eps;
            let a = if a_sends {
                random_phase(rng) * amp
            } else {
                Complex64::ZERO
            };
            let b = if b_sends {
                random_phase(rng) * amp
            } else {
                Complex64::ZERO
            };
            let (ip, im) = optics.port_intensities(a, b);
            let cp = optics.click(rng, ip);
            let cm = optics.click(rng, im);
            if cp != cm {
                if a_sends != b_sends {
                    corr += 1;
                } else {
                    err += 1;
                }
            }
        }
        (corr, err)
    });
    Ok(OracleEstimate::new(rounds, corr, err, warnings))
}

/// Samples phase-estimation rounds: both parties send decoy pulses of
/// intensity `p.decoy_intensity` with a common random phase, offset by the
/// phase misalignment. A click only at the constructive port is correct.
pub fn monte_carlo_x_oracle(
    p: &ProtocolParams,
    det: &DetectorModel,
    ch: &ChannelModel,
    rounds: u64,
    seed: u64,
) -> Result<OracleEstimate> {
    let warnings = check_inputs(p, det, rounds, "monte_carlo_x_oracle")?;
    let optics = Optics {
        pd: det.dark_count_prob,
        cos_pol: p.polarisation_misalignment.cos(),
        sin_pol: p.polarisation_misalignment.sin(),
    };
    let amp = (p.decoy_intensity * effective_half_link(det, ch)).sqrt();
    let offset = Complex64::from_polar(1.0, p.phase_misalignment);

    let (corr, err) = run_blocks(rounds, seed, |rng, n| {
        let mut corr = 0u64;
        let mut err = 0u64;
        for _ in 0..n {
            let a = random_phase(rng) * amp;
            let b = a * offset;
            let (ip, im) = optics.port_intensities(a, b);
            let cp = optics.click(rng, ip);
            let cm = optics.click(rng, im);
            match (cp, cm) {
                (true, false) => corr += 1,
                (false, true) => err += 1,
                _ => {}
            }
        }
        (corr, err)
    });
    Ok(OracleEstimate::new(rounds, corr, err, warnings))
}
