//! Key-parameter optimisation and the three-way attack comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::keyrate::{secret_key_rate, ChannelModel, DetectorModel, ProtocolParams};
use crate::optimize::nelder_mead_max;
use crate::validate::{Checker, Validate, Violation};
use crate::{Error, Result};

/// Search box and budget for [`optimize_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSettings {
    pub grid_eps: usize,
    pub grid_mu: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    /// Nelder-Mead evaluation budget after the grid.
    pub max_evals: usize,
    pub rel_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid_eps: 40,
            grid_mu: 40,
            eps_min: 0.01,
            eps_max: 0.6,
            mu_min: 0.01,
            mu_max: 1.0,
            max_evals: 200,
            rel_tol: 1e-6,
        }
    }
}

impl Validate for OptimizerSettings {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("OptimizerSettings");
        c.check(self.grid_eps >= 2, "grid_eps", || {
            format!("must be >= 2, got {}", self.grid_eps)
        });
        c.check(self.grid_mu >= 2, "grid_mu", || {
            format!("must be >= 2, got {}", self.grid_mu)
        });
        c.check(
            self.eps_min > 0.0 && self.eps_min < self.eps_max && self.eps_max < 1.0,
            "eps_min",
            || {
                format!(
                    "need 0 < eps_min < eps_max < 1, got [{}, {}]",
                    self.eps_min, self.eps_max
                )
            },
        );
        c.check(
            self.mu_min > 0.0 && self.mu_min < self.mu_max && self.mu_max.is_finite(),
            "mu_min",
            || format!("need 0 < mu_min < mu_max, got [{}, {}]", self.mu_min, self.mu_max),
        );
        c.check(self.rel_tol > 0.0, "rel_tol", || {
            format!("must be > 0, got {}", self.rel_tol)
        });
        c.finish()
    }
}

/// Optimal honest key parameters at one channel configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_eps: f64,
    pub best_mu: f64,
    pub best_rate: f64,
    pub evaluations: usize,
    /// False when no grid point yields a positive rate or the simplex did not
    /// reach the tolerance within budget.
    pub converged: bool,
}

fn honest_rate(fixed: &ProtocolParams, det: &DetectorModel, ch: &ChannelModel, eps: f64, mu: f64) -> f64 {
    if !(eps > 0.0 && eps < 1.0 && mu > 0.0) {
        return f64::NEG_INFINITY;
    }
    let p = fixed.with_key_params(eps, mu);
    secret_key_rate(&p, det, ch, mu, mu).unwrap_or(f64::NEG_INFINITY)
}

/// Maximises the honest key rate over `(send_prob, signal_intensity)`.
///
/// The remaining fields of `fixed` are held constant; its own `send_prob` and
/// `signal_intensity` are ignored.
pub fn optimize_params(
    det: &DetectorModel,
    ch: &ChannelModel,
    fixed: &ProtocolParams,
    settings: &OptimizerSettings,
) -> Result<OptimizationResult> {
    settings.validate()?;
    let s = settings;
    let eps_step = (s.eps_max - s.eps_min) / (s.grid_eps - 1) as f64;
    let mu_step = (s.mu_max - s.mu_min) / (s.grid_mu - 1) as f64;

    let mut grid_best = (f64::NEG_INFINITY, s.eps_min, s.mu_min);
    for i in 0..s.grid_eps {
        let eps = s.eps_min + i as f64 * eps_step;
        for j in 0..s.grid_mu {
            let mu = s.mu_min + j as f64 * mu_step;
            let r = honest_rate(fixed, det, ch, eps, mu);
            if r > grid_best.0 {
                grid_best = (r, eps, mu);
            }
        }
    }
    let grid_evals = s.grid_eps * s.grid_mu;
    let (grid_rate, grid_eps, grid_mu) = grid_best;
    if !grid_rate.is_finite() {
        return Err(Error::NonDistillable(format!(
            "key rate undefined everywhere on the search grid at {} km",
            ch.distance_km
        )));
    }

    let refined = nelder_mead_max(
        |x| honest_rate(fixed, det, ch, x[0], x[1]),
        [grid_eps, grid_mu],
        [0.5 * eps_step, 0.5 * mu_step],
        s.max_evals,
        s.rel_tol,
    );
    let (best_eps, best_mu) = if refined.value > grid_rate {
        (refined.point[0], refined.point[1])
    } else {
        (grid_eps, grid_mu)
    };
    let best_rate = honest_rate(fixed, det, ch, best_eps, best_mu);

    Ok(OptimizationResult {
        best_eps,
        best_mu,
        best_rate,
        evaluations: grid_evals + refined.evaluations,
        converged: grid_rate > 0.0 && refined.converged,
    })
}

/// One distance of the attack comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub distance_km: f64,
    /// Optimised honest rate.
    pub rate_expected: f64,
    /// Rate the security proof guarantees when the enhanced intensity is known.
    pub rate_actual_aware: f64,
    /// Rate computed with the intended intensity and the attacked QBER.
    pub rate_oblivious: f64,
    pub eps_opt: f64,
    pub mu_opt: f64,
}

/// Rates at each distance with Eve scaling the signal intensity by `kappa`.
///
/// The sending probability keeps its honest optimum under attack.
pub fn attack_sweep(
    distances_km: &[f64],
    kappa: f64,
    det: &DetectorModel,
    channel: &ChannelModel,
    fixed: &ProtocolParams,
    settings: &OptimizerSettings,
) -> Result<Vec<SweepRow>> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain("attack_sweep", format!("kappa must be > 0, got {kappa}")));
    }
    if let Some(w) = distances_km.windows(2).find(|w| !(w[0] <= w[1])) {
        return Err(Error::domain(
            "attack_sweep",
            format!("distances must be sorted ascending ({} before {})", w[0], w[1]),
        ));
    }
    distances_km
        .par_iter()
        .map(|&d| {
            let ch = channel.at_distance(d);
            ch.validate()?;
            let opt = optimize_params(det, &ch, fixed, settings)?;
            let p = fixed.with_key_params(opt.best_eps, opt.best_mu);
            let attacked = kappa * opt.best_mu;
            Ok(SweepRow {
                distance_km: d,
                rate_expected: opt.best_rate,
                rate_actual_aware: secret_key_rate(&p, det, &ch, attacked, attacked)?,
                rate_oblivious: secret_key_rate(&p, det, &ch, opt.best_mu, attacked)?,
                eps_opt: opt.best_eps,
                mu_opt: opt.best_mu,
            })
        })
        .collect()
}
