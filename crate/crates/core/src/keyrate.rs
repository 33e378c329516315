//! Asymptotic sending-or-not-sending twin-field key rate.
//!
//! All statistics are per-round probabilities for symmetric Alice-Charlie and
//! Bob-Charlie links of transmittance `t = sqrt(eta)`. Detector efficiency is
//! folded into `eta`, so every function below sees a single effective
//! transmittance and threshold detectors with dark-count probability `p_d`.

use serde::{Deserialize, Serialize};

use crate::special::{bessel_i0_minus_one, binary_entropy};
use crate::validate::{Checker, Validate, Violation};
use crate::{Error, Result};

/// Fibre link between the two senders, measured end to end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelModel {
    /// Attenuation in dB/km.
    pub fiber_loss_db_per_km: f64,
    pub distance_km: f64,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self {
            fiber_loss_db_per_km: 0.2,
            distance_km: 0.0,
        }
    }
}

impl ChannelModel {
    pub fn new(fiber_loss_db_per_km: f64, distance_km: f64) -> Self {
        Self {
            fiber_loss_db_per_km,
            distance_km,
        }
    }

    pub fn at_distance(self, distance_km: f64) -> Self {
        Self { distance_km, ..self }
    }

    /// Total Alice-to-Bob transmittance `10^(-alpha L / 10)`.
    pub fn total_transmittance(&self) -> f64 {
        10f64.powf(-self.fiber_loss_db_per_km * self.distance_km / 10.0)
    }

    /// Transmittance of one arm, `sqrt(eta)`.
    pub fn half_link_transmittance(&self) -> f64 {
        self.total_transmittance().sqrt()
    }
}

impl Validate for ChannelModel {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("ChannelModel");
        if c.finite(self.fiber_loss_db_per_km, "fiber_loss_db_per_km") {
            c.check(self.fiber_loss_db_per_km >= 0.0, "fiber_loss_db_per_km", || {
                format!("must be >= 0, got {}", self.fiber_loss_db_per_km)
            });
        }
        if c.finite(self.distance_km, "distance_km") {
            c.check(self.distance_km >= 0.0, "distance_km", || {
                format!("must be >= 0, got {}", self.distance_km)
            });
        }
        c.finish()
    }
}

/// Threshold detectors at the measurement node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorModel {
    /// Dark-count probability per gate.
    pub dark_count_prob: f64,
    /// Detection efficiency; multiplied into the channel transmittance.
    pub efficiency: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            dark_count_prob: 1e-8,
            efficiency: 1.0,
        }
    }
}

impl DetectorModel {
    pub fn new(dark_count_prob: f64, efficiency: f64) -> Self {
        Self {
            dark_count_prob,
            efficiency,
        }
    }
}

impl Validate for DetectorModel {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("DetectorModel");
        if c.finite(self.dark_count_prob, "dark_count_prob") {
            c.check((0.0..1.0).contains(&self.dark_count_prob), "dark_count_prob", || {
                format!("must lie in [0, 1), got {}", self.dark_count_prob)
            });
        }
        if c.finite(self.efficiency, "efficiency") {
            c.check(self.efficiency > 0.0 && self.efficiency <= 1.0, "efficiency", || {
                format!("must lie in (0, 1], got {}", self.efficiency)
            });
        }
        c.finish()
    }
}

/// Effective per-arm transmittance with detector efficiency folded in.
pub fn effective_half_link(det: &DetectorModel, ch: &ChannelModel) -> f64 {
    (ch.total_transmittance() * det.efficiency).sqrt()
}

/// Protocol settings and misalignments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolParams {
    /// Probability of sending a coherent pulse in a key round (epsilon).
    pub send_prob: f64,
    /// Signal intensity mu.
    pub signal_intensity: f64,
    /// Decoy intensity nu used for the phase-error estimate.
    pub decoy_intensity: f64,
    /// Key-basis probability; the asymptotic rate assumes 1.
    pub key_basis_prob: f64,
    /// Error-correction inefficiency f_E.
    pub ec_efficiency: f64,
    /// Relative phase misalignment in radians.
    pub phase_misalignment: f64,
    /// Polarisation misalignment in radians.
    pub polarisation_misalignment: f64,
    /// Ratio of actual to intended signal intensity under attack (kappa).
    pub enhancement_factor: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            send_prob: 0.05,
            signal_intensity: 0.45,
            decoy_intensity: 1e-6,
            key_basis_prob: 1.0,
            ec_efficiency: 1.16,
            phase_misalignment: 0.0,
            polarisation_misalignment: 0.0,
            enhancement_factor: 1.51,
        }
    }
}

impl ProtocolParams {
    pub fn with_key_params(self, send_prob: f64, signal_intensity: f64) -> Self {
        Self {
            send_prob,
            signal_intensity,
            ..self
        }
    }

    pub fn with_signal_intensity(self, signal_intensity: f64) -> Self {
        Self {
            signal_intensity,
            ..self
        }
    }

    fn check_physical(&self, op: &'static str) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.send_prob)
            && self.signal_intensity >= 0.0
            && self.signal_intensity.is_finite()
            && self.decoy_intensity >= 0.0
            && self.decoy_intensity.is_finite()
            && self.phase_misalignment.is_finite()
            && self.polarisation_misalignment.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::domain(op, format!("unphysical protocol parameters {self:?}")))
        }
    }
}

impl Validate for ProtocolParams {
    fn violations(&self) -> Vec<Violation> {
        let mut c = Checker::new("ProtocolParams");
        if c.finite(self.send_prob, "send_prob") {
            c.check(self.send_prob > 0.0 && self.send_prob < 1.0, "send_prob", || {
                format!("must lie in (0, 1), got {}", self.send_prob)
            });
        }
        let mu_ok = c.finite(self.signal_intensity, "signal_intensity");
        if mu_ok {
            c.check(self.signal_intensity > 0.0, "signal_intensity", || {
                format!("must be > 0, got {}", self.signal_intensity)
            });
        }
        if c.finite(self.decoy_intensity, "decoy_intensity") {
            c.check(self.decoy_intensity > 0.0, "decoy_intensity", || {
                format!("must be > 0, got {}", self.decoy_intensity)
            });
            if mu_ok {
                c.check(self.decoy_intensity < self.signal_intensity, "decoy_intensity", || {
                    format!(
                        "must be below signal_intensity ({}), got {}",
                        self.signal_intensity, self.decoy_intensity
                    )
                });
            }
        }
        if c.finite(self.key_basis_prob, "key_basis_prob") {
            c.check(self.key_basis_prob == 1.0, "key_basis_prob", || {
                format!("only the asymptotic value 1 is supported, got {}", self.key_basis_prob)
            });
        }
        if c.finite(self.ec_efficiency, "ec_efficiency") {
            c.check(self.ec_efficiency >= 1.0, "ec_efficiency", || {
                format!("must be >= 1, got {}", self.ec_efficiency)
            });
        }
        c.finite(self.phase_misalignment, "phase_misalignment");
        c.finite(self.polarisation_misalignment, "polarisation_misalignment");
        if c.finite(self.enhancement_factor, "enhancement_factor") {
            c.check(self.enhancement_factor > 0.0, "enhancement_factor", || {
                format!("must be > 0, got {}", self.enhancement_factor)
            });
        }
        c.finish()
    }
}

/// Correct/erroneous yields of one basis. `qber` is `None` when the total
/// yield vanishes: reporting zero would describe a perfect channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisYields {
    pub corr: f64,
    pub err: f64,
    pub total: f64,
    pub qber: Option<f64>,
}

impl BasisYields {
    fn from_parts(corr: f64, err: f64) -> Self {
        let total = corr + err;
        let qber = if total > 0.0 { Some(err / total) } else { None };
        Self { corr, err, total, qber }
    }
}

/// Every closed-form statistic for one channel configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YieldSet {
    pub s0: f64,
    pub s1: f64,
    pub sz_corr: f64,
    pub sz_err: f64,
    pub sz: f64,
    pub ez: Option<f64>,
    pub sx_corr: f64,
    pub sx_err: f64,
    pub sx: f64,
    pub ex: Option<f64>,
    pub e_ph_bound: f64,
}

/// `s0 = 2 p_d (1 - p_d)`.
pub fn vacuum_yield(det: &DetectorModel) -> f64 {
    let pd = det.dark_count_prob;
    2.0 * pd * (1.0 - pd)
}

/// `s1 = 2 (1 - p_d) [p_d (1 - t) + t / 2]`.
pub fn single_photon_yield(det: &DetectorModel, ch: &ChannelModel) -> f64 {
    let pd = det.dark_count_prob;
    let t = effective_half_link(det, ch);
    2.0 * (1.0 - pd) * (pd * (1.0 - t) + 0.5 * t)
}

/// Key-basis yields at `p.signal_intensity`. Pass `mu * kappa` through
/// [`ProtocolParams::with_signal_intensity`] for the attacked statistics.
pub fn z_basis_yields(p: &ProtocolParams, det: &DetectorModel, ch: &ChannelModel) -> Result<BasisYields> {
    p.check_physical("z_basis_yields")?;
    let eps = p.send_prob;
    let pd = det.dark_count_prob;
    let mt = p.signal_intensity * effective_half_link(det, ch);

    // p_d + e^{mt/2} - 1
    let corr = 4.0 * eps * (1.0 - eps) * (1.0 - pd) * (-mt).exp() * (pd + (0.5 * mt).exp_m1());

    // p_d + e^{mt} I0(mt cos dphi) - 1, split so small mt does not cancel
    let x = mt * p.polarisation_misalignment.cos();
    let bracket = pd + mt.exp_m1() + mt.exp() * bessel_i0_minus_one(x)?;
    let err =
        2.0 * eps * eps * (1.0 - pd) * (-2.0 * mt).exp() * bracket + 2.0 * (1.0 - eps) * (1.0 - eps) * pd * (1.0 - pd);

    Ok(BasisYields::from_parts(corr, err))
}

/// Phase-estimation yields at the decoy intensity.
pub fn x_basis_yields(p: &ProtocolParams, det: &DetectorModel, ch: &ChannelModel) -> Result<BasisYields> {
    p.check_physical("x_basis_yields")?;
    let pd = det.dark_count_prob;
    let nt = p.decoy_intensity * effective_half_link(det, ch);
    let vis = p.polarisation_misalignment.cos() * p.phase_misalignment.cos();

    // (1-p_d)[e^{-nt(1 -+ v)} - (1-p_d) e^{-2nt}] = (1-p_d) e^{-2nt} [expm1(nt(1 +- v)) + p_d]
    let common = (1.0 - pd) * (-2.0 * nt).exp();
    let corr = common * ((nt * (1.0 + vis)).exp_m1() + pd);
    let err = common * ((nt * (1.0 - vis)).exp_m1() + pd);

    Ok(BasisYields::from_parts(corr, err))
}

/// Upper bound on the phase-error rate, clamped into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseErrorBound {
    pub value: f64,
    /// Unclamped value of the bound.
    pub raw: f64,
}

impl PhaseErrorBound {
    fn from_raw(raw: f64) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            raw,
        }
    }

    pub fn clamped(&self) -> bool {
        self.value != self.raw
    }
}

/// `(S_x E_x - s0 e^{-2 nu} / 2) / (2 nu e^{-2 nu} s1)` from a set of
/// statistics, which need not come from the closed forms.
pub fn phase_error_bound(yields: &YieldSet, p: &ProtocolParams) -> Result<PhaseErrorBound> {
    let nu = p.decoy_intensity;
    if !(nu > 0.0) {
        return Err(Error::domain(
            "phase_error_bound",
            format!("decoy intensity must be > 0, got {nu}"),
        ));
    }
    if !(yields.s1 > 0.0) {
        return Err(Error::NonDistillable("single-photon yield is zero".into()));
    }
    let sx_ex = match yields.ex {
        Some(ex) => yields.sx * ex,
        None => 0.0,
    };
    let w = (-2.0 * nu).exp();
    let raw = (sx_ex - 0.5 * yields.s0 * w) / (2.0 * nu * w * yields.s1);
    Ok(PhaseErrorBound::from_raw(raw))
}

// Same bound with the numerator rewritten through expm1. The direct form loses
// about six digits to cancellation at nu = 1e-6.
fn phase_error_bound_closed(p: &ProtocolParams, det: &DetectorModel, ch: &ChannelModel) -> Result<PhaseErrorBound> {
    let nu = p.decoy_intensity;
    if !(nu > 0.0) {
        return Err(Error::domain(
            "phase_error_bound",
            format!("decoy intensity must be > 0, got {nu}"),
        ));
    }
    let s1 = single_photon_yield(det, ch);
    if !(s1 > 0.0) {
        return Err(Error::NonDistillable("single-photon yield is zero".into()));
    }
    let pd = det.dark_count_prob;
    let t = effective_half_link(det, ch);
    let nt = nu * t;
    let vis = p.polarisation_misalignment.cos() * p.phase_misalignment.cos();
    let w = (-2.0 * nu).exp();
    let numerator =
        (1.0 - pd) * ((-2.0 * nt).exp() * (nt * (1.0 - vis)).exp_m1() + pd * w * (2.0 * nu * (1.0 - t)).exp_m1());
    Ok(PhaseErrorBound::from_raw(numerator / (2.0 * nu * w * s1)))
}

/// All closed-form statistics at `p.signal_intensity`.
pub fn yield_set(p: &ProtocolParams, det: &DetectorModel, ch: &ChannelModel) -> Result<YieldSet> {
    let z = z_basis_yields(p, det, ch)?;
    let x = x_basis_yields(p, det, ch)?;
    let e_ph = phase_error_bound_closed(p, det, ch)?;
    Ok(YieldSet {
        s0: vacuum_yield(det),
        s1: single_photon_yield(det, ch),
        sz_corr: z.corr,
        sz_err: z.err,
        sz: z.total,
        ez: z.qber,
        sx_corr: x.corr,
        sx_err: x.err,
        sx: x.total,
        ex: x.qber,
        e_ph_bound: e_ph.value,
    })
}

/// Both terms of the key rate, kept apart for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRateTerms {
    pub rate: f64,
    pub single_photon_term: f64,
    pub correction_term: f64,
    pub e_ph_bound: f64,
    pub sz: f64,
    pub ez: Option<f64>,
}

/// Evaluates `R = 2 eps (1-eps) mu e^{-mu} s1 [1 - h(e_ph)] - f_E S_z h(E_z)`.
///
/// `formula_intensity` is the intensity the parties believe they send: it
/// sets `mu` in the single-photon weight and the predicted key-basis yield
/// `S_z`. `observed_intensity` is the intensity that actually generates the
/// announced detections and fixes the measured QBER `E_z`. With both equal
/// this is the honest rate. Negative rates are returned as is.
pub fn secret_key_rate(
    p: &ProtocolParams,
    det: &DetectorModel,
    ch: &ChannelModel,
    formula_intensity: f64,
    observed_intensity: f64,
) -> Result<f64> {
    key_rate_terms(p, det, ch, formula_intensity, observed_intensity).map(|t| t.rate)
}

/// [`secret_key_rate`] with its intermediate terms.
pub fn key_rate_terms(
    p: &ProtocolParams,
    det: &DetectorModel,
    ch: &ChannelModel,
    formula_intensity: f64,
    observed_intensity: f64,
) -> Result<KeyRateTerms> {
    for (name, v) in [
        ("formula_intensity", formula_intensity),
        ("observed_intensity", observed_intensity),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::domain(
                "secret_key_rate",
                format!("{name} must be finite and >= 0, got {v}"),
            ));
        }
    }
    let eps = p.send_prob;
    let mu = formula_intensity;
    let s1 = single_photon_yield(det, ch);
    let e_ph = phase_error_bound_closed(p, det, ch)?.value;

    let predicted = z_basis_yields(&p.with_signal_intensity(formula_intensity), det, ch)?;
    let observed = if observed_intensity == formula_intensity {
        predicted
    } else {
        z_basis_yields(&p.with_signal_intensity(observed_intensity), det, ch)?
    };

    let single_photon_term = 2.0 * eps * (1.0 - eps) * mu * (-mu).exp() * s1 * (1.0 - binary_entropy(e_ph)?);
    let correction_term = if predicted.total == 0.0 {
        0.0
    } else {
        let ez = observed
            .qber
            .ok_or_else(|| Error::NonDistillable("observed key-basis yield is zero".into()))?;
        p.ec_efficiency * predicted.total * binary_entropy(ez)?
    };
    Ok(KeyRateTerms {
        rate: single_photon_term - correction_term,
        single_photon_term,
        correction_term,
        e_ph_bound: e_ph,
        sz: predicted.total,
        ez: observed.qber,
    })
}
