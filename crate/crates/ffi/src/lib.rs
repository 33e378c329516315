//! C ABI over `oilsec_core`.
//!
//! Fallible functions return an [`OilsecStatus`] and write results through
//! caller-provided pointers. After a failure, [`oilsec_last_error`] returns a
//! message describing it; the message is per thread and stays valid until
//! the next failing call on that thread.
//!
//! Handles ([`OilsecModel`], [`OilsecProfile`]) are created by the library
//! and must be released with the matching `*_free` function. Statistics that
//! are undefined (a QBER over a zero yield) are reported as NaN.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oilsec_core::attack::{self, OptimizationResult, OptimizerSettings, SweepRow};
use oilsec_core::isolation::{self, BudgetReport, ProfileKind, SpectralProfile};
use oilsec_core::keyrate::{self, ChannelModel, DetectorModel, ProtocolParams, YieldSet};
use oilsec_core::validate::Validate;
use oilsec_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OilsecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NonDistillable = 4,
    OutOfRange = 5,
    Io = 6,
    Parse = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

fn status_of(e: &Error) -> OilsecStatus {
    match e {
        Error::Domain { .. } => OilsecStatus::Domain,
        Error::NonDistillable(_) => OilsecStatus::NonDistillable,
        Error::OutOfRange { .. } => OilsecStatus::OutOfRange,
        Error::Invalid(_) | Error::Config(_) => OilsecStatus::InvalidArgument,
        Error::Io { .. } => OilsecStatus::Io,
        Error::Csv(_) => OilsecStatus::Parse,
    }
}

fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> OilsecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OilsecStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("{what} is null"));
            OilsecStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_last_error(msg);
            OilsecStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            OilsecStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn get_mut<'a, T>(p: *mut T, what: &'static str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &'static str) -> FfiResult<&'a [T]> {
    if n == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, n))
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &'static str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Invalid(format!("{what} is not valid UTF-8")))
}

fn nan_if_none(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

// ---- plain data ----

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecProtocol {
    pub send_prob: f64,
    pub signal_intensity: f64,
    pub decoy_intensity: f64,
    pub key_basis_prob: f64,
    pub ec_efficiency: f64,
    pub phase_misalignment: f64,
    pub polarisation_misalignment: f64,
    pub enhancement_factor: f64,
}

impl From<ProtocolParams> for OilsecProtocol {
    fn from(p: ProtocolParams) -> Self {
        Self {
            send_prob: p.send_prob,
            signal_intensity: p.signal_intensity,
            decoy_intensity: p.decoy_intensity,
            key_basis_prob: p.key_basis_prob,
            ec_efficiency: p.ec_efficiency,
            phase_misalignment: p.phase_misalignment,
            polarisation_misalignment: p.polarisation_misalignment,
            enhancement_factor: p.enhancement_factor,
        }
    }
}

impl From<OilsecProtocol> for ProtocolParams {
    fn from(p: OilsecProtocol) -> Self {
        Self {
            send_prob: p.send_prob,
            signal_intensity: p.signal_intensity,
            decoy_intensity: p.decoy_intensity,
            key_basis_prob: p.key_basis_prob,
            ec_efficiency: p.ec_efficiency,
            phase_misalignment: p.phase_misalignment,
            polarisation_misalignment: p.polarisation_misalignment,
            enhancement_factor: p.enhancement_factor,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecDetector {
    pub dark_count_prob: f64,
    pub efficiency: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecChannel {
    pub fiber_loss_db_per_km: f64,
    pub distance_km: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecOptimizerSettings {
    pub grid_eps: usize,
    pub grid_mu: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub max_evals: usize,
    pub rel_tol: f64,
}

impl From<OptimizerSettings> for OilsecOptimizerSettings {
    fn from(s: OptimizerSettings) -> Self {
        Self {
            grid_eps: s.grid_eps,
            grid_mu: s.grid_mu,
            eps_min: s.eps_min,
            eps_max: s.eps_max,
            mu_min: s.mu_min,
            mu_max: s.mu_max,
            max_evals: s.max_evals,
            rel_tol: s.rel_tol,
        }
    }
}

impl From<OilsecOptimizerSettings> for OptimizerSettings {
    fn from(s: OilsecOptimizerSettings) -> Self {
        Self {
            grid_eps: s.grid_eps,
            grid_mu: s.grid_mu,
            eps_min: s.eps_min,
            eps_max: s.eps_max,
            mu_min: s.mu_min,
            mu_max: s.mu_max,
            max_evals: s.max_evals,
            rel_tol: s.rel_tol,
        }
    }
}

/// Closed-form statistics. `ez` and `ex` are NaN when their yield is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecYields {
    pub s0: f64,
    pub s1: f64,
    pub sz_corr: f64,
    pub sz_err: f64,
    pub sz: f64,
    pub ez: f64,
    pub sx_corr: f64,
    pub sx_err: f64,
    pub sx: f64,
    pub ex: f64,
    pub e_ph_bound: f64,
}

impl From<YieldSet> for OilsecYields {
    fn from(y: YieldSet) -> Self {
        Self {
            s0: y.s0,
            s1: y.s1,
            sz_corr: y.sz_corr,
            sz_err: y.sz_err,
            sz: y.sz,
            ez: nan_if_none(y.ez),
            sx_corr: y.sx_corr,
            sx_err: y.sx_err,
            sx: y.sx,
            ex: nan_if_none(y.ex),
            e_ph_bound: y.e_ph_bound,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecOptimization {
    pub best_eps: f64,
    pub best_mu: f64,
    pub best_rate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl From<OptimizationResult> for OilsecOptimization {
    fn from(r: OptimizationResult) -> Self {
        Self {
            best_eps: r.best_eps,
            best_mu: r.best_mu,
            best_rate: r.best_rate,
            evaluations: r.evaluations,
            converged: r.converged,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecSweepRow {
    pub distance_km: f64,
    pub rate_expected: f64,
    pub rate_actual_aware: f64,
    pub rate_oblivious: f64,
    pub eps_opt: f64,
    pub mu_opt: f64,
}

impl From<SweepRow> for OilsecSweepRow {
    fn from(r: SweepRow) -> Self {
        Self {
            distance_km: r.distance_km,
            rate_expected: r.rate_expected,
            rate_actual_aware: r.rate_actual_aware,
            rate_oblivious: r.rate_oblivious,
            eps_opt: r.eps_opt,
            mu_opt: r.mu_opt,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OilsecBudgetReport {
    pub wavelength_nm: f64,
    pub lidt_w: f64,
    pub total_isolation_db: f64,
    pub worst_case_output_w: f64,
    pub worst_case_photons_per_pulse: f64,
    pub max_photons_per_pulse: f64,
    pub meets_target: bool,
    pub required_isolation_db: f64,
    pub shortfall_vs_reference_db: f64,
}

impl From<BudgetReport> for OilsecBudgetReport {
    fn from(r: BudgetReport) -> Self {
        Self {
            wavelength_nm: r.wavelength_nm,
            lidt_w: r.lidt_w,
            total_isolation_db: r.total_isolation_db,
            worst_case_output_w: r.worst_case_output_w,
            worst_case_photons_per_pulse: r.worst_case_photons_per_pulse,
            max_photons_per_pulse: r.max_photons_per_pulse,
            meets_target: r.meets_target,
            required_isolation_db: r.required_isolation_db,
            shortfall_vs_reference_db: r.shortfall_vs_reference_db,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OilsecProfileKind {
    Attenuation = 0,
    TransparencyGain = 1,
    Responsivity = 2,
}

impl From<OilsecProfileKind> for ProfileKind {
    fn from(k: OilsecProfileKind) -> Self {
        match k {
            OilsecProfileKind::Attenuation => ProfileKind::Attenuation,
            OilsecProfileKind::TransparencyGain => ProfileKind::TransparencyGain,
            OilsecProfileKind::Responsivity => ProfileKind::Responsivity,
        }
    }
}

// ---- handles ----

/// Protocol, detector, channel and optimizer settings for key-rate calls.
pub struct OilsecModel {
    protocol: ProtocolParams,
    detector: DetectorModel,
    channel: ChannelModel,
    optimizer: OptimizerSettings,
}

/// A piecewise-linear spectral profile.
pub struct OilsecProfile(SpectralProfile);

fn check<T: Validate>(v: &T) -> FfiResult<()> {
    v.validate().map_err(Failure::Core)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oilsec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread, or NULL.
#[no_mangle]
pub extern "C" fn oilsec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// New model with default parameters. Release with [`oilsec_model_free`].
#[no_mangle]
pub extern "C" fn oilsec_model_new() -> *mut OilsecModel {
    Box::into_raw(Box::new(OilsecModel {
        protocol: ProtocolParams::default(),
        detector: DetectorModel::default(),
        channel: ChannelModel::default(),
        optimizer: OptimizerSettings::default(),
    }))
}

/// # Safety
/// `model` must be NULL or a pointer from [`oilsec_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_free(model: *mut OilsecModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live model handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_get_protocol(
    model: *const OilsecModel,
    out: *mut OilsecProtocol,
) -> OilsecStatus {
    guard(|| {
        *get_mut(out, "out")? = get(model, "model")?.protocol.into();
        Ok(())
    })
}

/// Replaces the protocol parameters after validating them.
///
/// # Safety
/// `model` must be a live model handle and `protocol` a readable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_set_protocol(
    model: *mut OilsecModel,
    protocol: *const OilsecProtocol,
) -> OilsecStatus {
    guard(|| {
        let p: ProtocolParams = (*get(protocol, "protocol")?).into();
        check(&p)?;
        get_mut(model, "model")?.protocol = p;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live model handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_get_detector(
    model: *const OilsecModel,
    out: *mut OilsecDetector,
) -> OilsecStatus {
    guard(|| {
        let d = get(model, "model")?.detector;
        *get_mut(out, "out")? = OilsecDetector {
            dark_count_prob: d.dark_count_prob,
            efficiency: d.efficiency,
        };
        Ok(())
    })
}

/// # Safety
/// `model` must be a live model handle and `detector` a readable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_set_detector(
    model: *mut OilsecModel,
    detector: *const OilsecDetector,
) -> OilsecStatus {
    guard(|| {
        let d = get(detector, "detector")?;
        let d = DetectorModel::new(d.dark_count_prob, d.efficiency);
        check(&d)?;
        get_mut(model, "model")?.detector = d;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live model handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_get_channel(model: *const OilsecModel, out: *mut OilsecChannel) -> OilsecStatus {
    guard(|| {
        let c = get(model, "model")?.channel;
        *get_mut(out, "out")? = OilsecChannel {
            fiber_loss_db_per_km: c.fiber_loss_db_per_km,
            distance_km: c.distance_km,
        };
        Ok(())
    })
}

/// # Safety
/// `model` must be a live model handle and `channel` a readable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_set_channel(
    model: *mut OilsecModel,
    channel: *const OilsecChannel,
) -> OilsecStatus {
    guard(|| {
        let c = get(channel, "channel")?;
        let c = ChannelModel::new(c.fiber_loss_db_per_km, c.distance_km);
        check(&c)?;
        get_mut(model, "model")?.channel = c;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live model handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_get_optimizer(
    model: *const OilsecModel,
    out: *mut OilsecOptimizerSettings,
) -> OilsecStatus {
    guard(|| {
        *get_mut(out, "out")? = get(model, "model")?.optimizer.into();
        Ok(())
    })
}

/// # Safety
/// `model` must be a live model handle and `settings` a readable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_model_set_optimizer(
    model: *mut OilsecModel,
    settings: *const OilsecOptimizerSettings,
) -> OilsecStatus {
    guard(|| {
        let s: OptimizerSettings = (*get(settings, "settings")?).into();
        check(&s)?;
        get_mut(model, "model")?.optimizer = s;
        Ok(())
    })
}

/// Closed-form yields at the model's signal intensity.
///
/// # Safety
/// `model` must be a live model handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_yields(model: *const OilsecModel, out: *mut OilsecYields) -> OilsecStatus {
    guard(|| {
        let m = get(model, "model")?;
        let y = keyrate::yield_set(&m.protocol, &m.detector, &m.channel)?;
        *get_mut(out, "out")? = y.into();
        Ok(())
    })
}

/// Key rate with `formula_intensity` in the bound and `observed_intensity`
/// generating the observed QBER. Pass the same value twice for the honest rate.
///
/// # Safety
/// `model` must be a live model handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_secret_key_rate(
    model: *const OilsecModel,
    formula_intensity: f64,
    observed_intensity: f64,
    out: *mut f64,
) -> OilsecStatus {
    guard(|| {
        let m = get(model, "model")?;
        *get_mut(out, "out")? = keyrate::secret_key_rate(
            &m.protocol,
            &m.detector,
            &m.channel,
            formula_intensity,
            observed_intensity,
        )?;
        Ok(())
    })
}

/// Optimal sending probability and signal intensity at the model's distance.
///
/// # Safety
/// `model` must be a live model handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_optimize(model: *const OilsecModel, out: *mut OilsecOptimization) -> OilsecStatus {
    guard(|| {
        let m = get(model, "model")?;
        let r = attack::optimize_params(&m.detector, &m.channel, &m.protocol, &m.optimizer)?;
        *get_mut(out, "out")? = r.into();
        Ok(())
    })
}

/// Expected, aware and oblivious rates at each of `count` ascending
/// distances. `rows` must have room for `count` entries.
///
/// # Safety
/// `model` must be a live model handle; `distances_km` and `rows` must point
/// to `count` readable and writable elements respectively.
#[no_mangle]
pub unsafe extern "C" fn oilsec_attack_sweep(
    model: *const OilsecModel,
    distances_km: *const f64,
    count: usize,
    kappa: f64,
    rows: *mut OilsecSweepRow,
) -> OilsecStatus {
    guard(|| {
        let m = get(model, "model")?;
        let d = slice(distances_km, count, "distances_km")?;
        if count > 0 && rows.is_null() {
            return Err(Failure::Null("rows"));
        }
        let result = attack::attack_sweep(d, kappa, &m.detector, &m.channel, &m.protocol, &m.optimizer)?;
        for (i, r) in result.into_iter().enumerate() {
            rows.add(i).write(r.into());
        }
        Ok(())
    })
}

/// Damage-threshold power at `wavelength_nm` scaled from a reference point.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_lidt_at(
    wavelength_nm: f64,
    reference_power_w: f64,
    reference_nm: f64,
    out: *mut f64,
) -> OilsecStatus {
    guard(|| {
        *get_mut(out, "out")? = isolation::lidt_at(wavelength_nm, reference_power_w, reference_nm)?;
        Ok(())
    })
}

/// Isolation that brings `input_w` down to `max_photons_per_pulse`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_required_isolation_db(
    input_w: f64,
    wavelength_nm: f64,
    pulse_rate_hz: f64,
    max_photons_per_pulse: f64,
    out: *mut f64,
) -> OilsecStatus {
    guard(|| {
        if !(input_w > 0.0 && wavelength_nm > 0.0 && pulse_rate_hz > 0.0 && max_photons_per_pulse > 0.0) {
            return Err(Failure::Invalid("all arguments must be > 0".into()));
        }
        *get_mut(out, "out")? =
            isolation::required_isolation_db(input_w, wavelength_nm, pulse_rate_hz, max_photons_per_pulse);
        Ok(())
    })
}

/// Loads a `wavelength_nm,value_db` CSV file. Release with [`oilsec_profile_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_profile_load(
    path: *const c_char,
    kind: OilsecProfileKind,
    out: *mut *mut OilsecProfile,
) -> OilsecStatus {
    guard(|| {
        let out = get_mut(out, "out")?;
        let p = SpectralProfile::load(c_str(path, "path")?, kind.into())?;
        *out = Box::into_raw(Box::new(OilsecProfile(p)));
        Ok(())
    })
}

/// Builds a profile from `count` (wavelength, dB) pairs.
///
/// # Safety
/// `name` must be a NUL-terminated string, `wavelengths_nm` and `values_db`
/// must point to `count` elements and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oilsec_profile_from_points(
    name: *const c_char,
    kind: OilsecProfileKind,
    wavelengths_nm: *const f64,
    values_db: *const f64,
    count: usize,
    out: *mut *mut OilsecProfile,
) -> OilsecStatus {
    guard(|| {
        let out = get_mut(out, "out")?;
        let w = slice(wavelengths_nm, count, "wavelengths_nm")?;
        let v = slice(values_db, count, "values_db")?;
        let pairs: Vec<(f64, f64)> = w.iter().copied().zip(v.iter().copied()).collect();
        let p = SpectralProfile::from_pairs(c_str(name, "name")?, kind.into(), &pairs)?;
        *out = Box::into_raw(Box::new(OilsecProfile(p)));
        Ok(())
    })
}

/// # Safety
/// `profile` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oilsec_profile_free(profile: *mut OilsecProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Interpolated value; out-of-range wavelengths fail with
/// `OILSEC_STATUS_OUT_OF_RANGE`.
///
/// # Safety
/// `profile` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_profile_value_at(
    profile: *const OilsecProfile,
    wavelength_nm: f64,
    out: *mut f64,
) -> OilsecStatus {
    guard(|| {
        *get_mut(out, "out")? = get(profile, "profile")?.0.value_at(wavelength_nm)?;
        Ok(())
    })
}

/// # Safety
/// `profile` must be a live handle; `min_nm` and `max_nm` writable pointers.
#[no_mangle]
pub unsafe extern "C" fn oilsec_profile_range(
    profile: *const OilsecProfile,
    min_nm: *mut f64,
    max_nm: *mut f64,
) -> OilsecStatus {
    guard(|| {
        let p = &get(profile, "profile")?.0;
        *get_mut(min_nm, "min_nm")? = p.min_nm();
        *get_mut(max_nm, "max_nm")? = p.max_nm();
        Ok(())
    })
}

/// Transparency gained by connecting the cavity. The result is a new handle.
///
/// # Safety
/// Both profiles must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn oilsec_transparency_gain(
    loss_disconnected: *const OilsecProfile,
    loss_connected_off: *const OilsecProfile,
    out: *mut *mut OilsecProfile,
) -> OilsecStatus {
    guard(|| {
        let out = get_mut(out, "out")?;
        let g = isolation::transparency_gain(
            &get(loss_disconnected, "loss_disconnected")?.0,
            &get(loss_connected_off, "loss_connected_off")?.0,
        )?;
        *out = Box::into_raw(Box::new(OilsecProfile(g)));
        Ok(())
    })
}

unsafe fn profiles(list: *const *const OilsecProfile, count: usize) -> FfiResult<Vec<SpectralProfile>> {
    slice(list, count, "components")?
        .iter()
        .map(|&p| get(p, "component").map(|p| p.0.clone()))
        .collect()
}

/// Total isolation of `count` cascaded components at `wavelength_nm`.
///
/// # Safety
/// `components` must point to `count` live profile handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oilsec_cascade_isolation(
    components: *const *const OilsecProfile,
    count: usize,
    wavelength_nm: f64,
    out: *mut f64,
) -> OilsecStatus {
    guard(|| {
        let comps = profiles(components, count)?;
        *get_mut(out, "out")? = isolation::cascade_isolation(&comps, wavelength_nm)?;
        Ok(())
    })
}

/// Worst-case leakage through the cascade with Eve at the damage threshold.
///
/// # Safety
/// `components` must point to `count` live profile handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oilsec_budget_report(
    wavelength_nm: f64,
    components: *const *const OilsecProfile,
    count: usize,
    pulse_rate_hz: f64,
    max_photons_per_pulse: f64,
    out: *mut OilsecBudgetReport,
) -> OilsecStatus {
    guard(|| {
        let comps = profiles(components, count)?;
        let r = isolation::budget_report(wavelength_nm, &comps, pulse_rate_hz, max_photons_per_pulse)?;
        *get_mut(out, "out")? = r.into();
        Ok(())
    })
}
