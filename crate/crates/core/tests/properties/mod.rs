//! Randomized properties, 1000 cases each. Shared by the invariants and
//! acceptance targets.

use super::support::*;
use approx::assert_relative_eq;
use oilsec_core::attack::{attack_sweep, optimize_params, OptimizerSettings};
use oilsec_core::config::{RunConfig, Scenario};
use oilsec_core::isolation::{
    budget_report, cascade_isolation, lidt_at, transparency_gain, ProfileKind, SpectralProfile,
};
use oilsec_core::keyrate::{
    secret_key_rate, vacuum_yield, x_basis_yields, yield_set, z_basis_yields, ChannelModel, DetectorModel,
    ProtocolParams,
};
use oilsec_core::modulation::{
    apply_laser_response, fast_pd_detect, optical_spectrum, power_meter_readout, sideband_monitor, snspd_counts,
    synthesize_waveform, FastPdModel, LockedLaserResponse, ModulationPattern, PowerMeterModel, SnspdModel,
};
use oilsec_core::run::{execute, KeyrateRow};
use oilsec_core::validate::Validate;
use proptest::prelude::*;

const FS: f64 = 1e12;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x0001_15ec),
        ..ProptestConfig::default()
    }
}

fn calibrated() -> LockedLaserResponse {
    let reference = synthesize_waveform(&ModulationPattern::default(), 1e-9, FS).unwrap();
    LockedLaserResponse::default()
        .calibrate(&reference, 10e-12, 0.51)
        .unwrap()
}

proptest! {
    #![proptest_config(cfg())]

    // ---- key-rate model ----

    fn yield_identities(p in protocol(), det in detector(), ch in channel()) {
        let y = yield_set(&p, &det, &ch).unwrap();
        let pd = det.dark_count_prob;
        prop_assert_eq!(y.s0, vacuum_yield(&det));
        assert_relative_eq!(y.s0, 1.0 - pd * pd - (1.0 - pd) * (1.0 - pd), max_relative = 1e-6, epsilon = 1e-15);
        prop_assert_eq!(y.sz, y.sz_corr + y.sz_err);
        prop_assert_eq!(y.sx, y.sx_corr + y.sx_err);
        match y.ez {
            Some(ez) => assert_relative_eq!(ez * y.sz, y.sz_err, max_relative = 1e-12),
            None => prop_assert_eq!(y.sz, 0.0),
        }
        match y.ex {
            Some(ex) => assert_relative_eq!(ex * y.sx, y.sx_err, max_relative = 1e-12),
            None => prop_assert_eq!(y.sx, 0.0),
        }
        prop_assert!((0.0..=1.0).contains(&y.e_ph_bound));
        for v in [y.s1, y.sz_corr, y.sz_err, y.sx_corr, y.sx_err] {
            prop_assert!((0.0..=1.0).contains(&v), "{y:?}");
        }
    }

    fn key_yield_falls_with_distance(p in protocol(), mu in 0.01..1.386f64, a in 0.1..0.3f64, l1 in 0.0..400.0f64, dl in 0.0..100.0f64) {
        // e^{-x/2} - e^{-x} rises with x = mu t only below 2 ln 2
        let p = p.with_signal_intensity(mu);
        let det = DetectorModel::new(0.0, 1.0);
        let near = z_basis_yields(&p, &det, &ChannelModel::new(a, l1)).unwrap();
        let far = z_basis_yields(&p, &det, &ChannelModel::new(a, l1 + dl)).unwrap();
        prop_assert!(far.corr <= near.corr, "{near:?} {far:?}");
    }

    fn aligned_noiseless_phase_error_is_zero(p in protocol(), ch in channel(), eta in 0.1..=1.0f64) {
        let p = ProtocolParams { phase_misalignment: 0.0, polarisation_misalignment: 0.0, ..p };
        let y = yield_set(&p, &DetectorModel::new(0.0, eta), &ch).unwrap();
        prop_assert_eq!(y.e_ph_bound, 0.0);
        prop_assert_eq!(x_basis_yields(&p, &DetectorModel::new(0.0, eta), &ch).unwrap().err, 0.0);
    }

    fn oblivious_rate_overestimates(d in 0.0..500.0f64) {
        let det = DetectorModel::default();
        let ch = ChannelModel::new(0.2, d);
        let fixed = ProtocolParams::default();
        let opt = optimize_params(&det, &ch, &fixed, &OptimizerSettings::default()).unwrap();
        let p = fixed.with_key_params(opt.best_eps, opt.best_mu);
        let k = 1.51 * opt.best_mu;
        let aware = secret_key_rate(&p, &det, &ch, k, k).unwrap();
        let oblivious = secret_key_rate(&p, &det, &ch, opt.best_mu, k).unwrap();
        if aware > 0.0 && oblivious > 0.0 {
            prop_assert!(oblivious >= aware, "{d} km: {oblivious} < {aware}");
        }
    }

    // ---- attack analysis ----

    fn optimizer_is_deterministic_and_exact(d in 0.0..400.0f64, pd in dark_count()) {
        let det = DetectorModel::new(pd, 1.0);
        let ch = ChannelModel::new(0.2, d);
        let fixed = ProtocolParams::default();
        let s = OptimizerSettings { grid_eps: 12, grid_mu: 12, ..Default::default() };
        let a = optimize_params(&det, &ch, &fixed, &s).unwrap();
        let b = optimize_params(&det, &ch, &fixed, &s).unwrap();
        prop_assert_eq!(a, b);
        let r = secret_key_rate(&fixed.with_key_params(a.best_eps, a.best_mu), &det, &ch, a.best_mu, a.best_mu).unwrap();
        prop_assert_eq!(a.best_rate.to_bits(), r.to_bits());
        prop_assert!(a.best_eps > 0.0 && a.best_eps < 1.0 && a.best_mu > 0.0);
    }

    fn unit_kappa_reproduces_honest_curve(mut d in prop::collection::vec(0.0..400.0f64, 1..4)) {
        d.sort_by(f64::total_cmp);
        let s = OptimizerSettings { grid_eps: 10, grid_mu: 10, ..Default::default() };
        let rows = attack_sweep(&d, 1.0, &DetectorModel::default(), &ChannelModel::default(), &ProtocolParams::default(), &s).unwrap();
        for r in rows {
            prop_assert_eq!(r.rate_expected.to_bits(), r.rate_actual_aware.to_bits());
            prop_assert_eq!(r.rate_expected.to_bits(), r.rate_oblivious.to_bits());
        }
    }

    fn optimized_rate_falls_with_distance(l in 0.0..450.0f64, dl in 1.0..50.0f64) {
        let det = DetectorModel::default();
        let fixed = ProtocolParams::default();
        let s = OptimizerSettings::default();
        let near = optimize_params(&det, &ChannelModel::new(0.2, l), &fixed, &s).unwrap();
        let far = optimize_params(&det, &ChannelModel::new(0.2, l + dl), &fixed, &s).unwrap();
        prop_assert!(far.best_rate <= near.best_rate, "{near:?} {far:?}");
    }

    // ---- modulation ----

    fn traces_stay_non_negative(pat in pattern(any_kind()), periods in 1u32..3) {
        let inj = synthesize_waveform(&pat, pat.period_s * periods as f64, FS).unwrap();
        prop_assert!((inj.duration_s() * FS - inj.len() as f64).abs() <= 1.0);
        let out = apply_laser_response(&inj, &calibrated()).unwrap();
        let pd = fast_pd_detect(&out, &FastPdModel::default()).unwrap();
        for w in [&inj, &out, &pd.trace] {
            prop_assert!(w.samples.iter().all(|&s| s >= 0.0));
        }
        let sn = snspd_counts(&out, &SnspdModel { accumulations: 10, ..Default::default() }, 1).unwrap();
        prop_assert!(sn.expected.iter().all(|&m| m >= 0.0));
    }

    fn balanced_patterns_have_zero_net_area(pat in pattern(balanced_kind()), periods in 1u32..4) {
        let w = synthesize_waveform(&pat, pat.period_s * periods as f64, FS).unwrap();
        let area: f64 = w.samples.iter().map(|s| s - pat.baseline_w).sum();
        prop_assert!(area.abs() <= 1e-9 * pat.baseline_w * w.len() as f64, "{area}");
    }

    fn power_meter_blind_while_fast_pd_fires(
        pat in pattern(balanced_kind()),
        t_int in prop_oneof![Just(25e-6), Just(50e-6), Just(100e-6)],
        seed in any::<u64>(),
    ) {
        // amplitudes inside the calibrated range
        let pat = ModulationPattern { height: 0.05 + 0.45 * pat.height, ..pat };
        let resp = calibrated();
        let inj = synthesize_waveform(&pat, pat.period_s, FS).unwrap();
        let out = apply_laser_response(&inj, &resp).unwrap();
        // exact time average first, then the noisy readout
        prop_assert!((out.mean_power() / pat.baseline_w - 1.0).abs() < 1e-12);
        let pm = PowerMeterModel { integration_time_s: t_int, ..Default::default() };
        let r = power_meter_readout(&out, &pm, 100_000, seed).unwrap();
        prop_assert!(r.z_score().abs() < 5.0, "{r:?}");
        prop_assert!((r.std_ratio - 1.0).abs() < 0.02, "{r:?}");
        // the watchdog pair: one photodiode on the injected light, one on the locked output
        let pd = FastPdModel::default();
        let fired = fast_pd_detect(&inj, &pd).unwrap().detected || fast_pd_detect(&out, &pd).unwrap().detected;
        prop_assert!(fired);
    }

    fn spectra_conserve_power(pat in pattern(any_kind())) {
        let resp = calibrated();
        let out = apply_laser_response(&synthesize_waveform(&pat, pat.period_s, FS).unwrap(), &resp).unwrap();
        let s = optical_spectrum(&out, &resp).unwrap();
        let time_power = out.mean_power();
        assert_relative_eq!(s.total_power(), time_power, max_relative = 1e-9);
    }

    fn sidebands_vanish_only_without_modulation(pat in pattern(any_kind())) {
        let resp = calibrated();
        let pm = PowerMeterModel::default();
        let spectrum = |h: f64| {
            let out = apply_laser_response(&synthesize_waveform(&pat.with_height(h), pat.period_s, FS).unwrap(), &resp).unwrap();
            optical_spectrum(&out, &resp).unwrap()
        };
        let halfwidth = 0.5 / pat.period_s;
        let flat = spectrum(0.0);
        prop_assert!(sideband_monitor(&flat, halfwidth, &pm).unwrap().power_w <= 1e-10 * flat.total_power());
        let h = pat.height.max(0.01);
        let modulated = spectrum(h);
        prop_assert!(sideband_monitor(&modulated, halfwidth, &pm).unwrap().power_w > 1e-10 * modulated.total_power());
    }

    // ---- isolation budget ----

    fn lidt_grows_with_wavelength(a in 100.0..3000.0f64, d in 1e-3..1000.0f64) {
        prop_assert!(lidt_at(a + d, 100.0, 1550.0).unwrap() > lidt_at(a, 100.0, 1550.0).unwrap());
    }

    fn cascade_is_additive_and_order_free(
        comps in prop::collection::vec(wide_attenuation(), 0..6),
        nm in 500.0..2300.0f64,
        seed in any::<u64>(),
    ) {
        let total = cascade_isolation(&comps, nm).unwrap();
        let by_hand: f64 = comps.iter().map(|c| c.value_at(nm).unwrap()).sum();
        assert_relative_eq!(total, by_hand, max_relative = 1e-12, epsilon = 1e-12);
        let mut shuffled = comps.clone();
        let n = shuffled.len().max(1) as u64;
        shuffled.rotate_left((seed % n) as usize);
        shuffled.reverse();
        assert_relative_eq!(cascade_isolation(&shuffled, nm).unwrap(), total, max_relative = 1e-12, epsilon = 1e-12);
    }

    fn transparency_gain_is_antisymmetric(a in profile(ProfileKind::Attenuation), b in profile(ProfileKind::Attenuation)) {
        let aa = transparency_gain(&a, &a).unwrap();
        prop_assert!(aa.points().iter().all(|p| p.value_db == 0.0));
        if let (Ok(ab), Ok(ba)) = (transparency_gain(&a, &b), transparency_gain(&b, &a)) {
            prop_assert_eq!(ab.points().len(), ba.points().len());
            for (x, y) in ab.points().iter().zip(ba.points()) {
                prop_assert_eq!(x.wavelength_nm, y.wavelength_nm);
                prop_assert_eq!(x.value_db, -y.value_db);
            }
        }
    }

    fn profiles_never_extrapolate(p in profile(ProfileKind::Attenuation), d in 1e-6..100.0f64) {
        prop_assert!(p.value_at(p.min_nm() - d).is_err());
        prop_assert!(p.value_at(p.max_nm() + d).is_err());
        prop_assert!(p.value_at(p.min_nm()).is_ok() && p.value_at(p.max_nm()).is_ok());
    }

    fn more_attenuation_less_leakage(
        comps in prop::collection::vec(wide_attenuation(), 0..4),
        extra in 0.1..60.0f64,
        nm in 500.0..2300.0f64,
        rate in 1e6..1e10f64,
    ) {
        let before = budget_report(nm, &comps, rate, 1e-7).unwrap();
        prop_assert_eq!(before.worst_case_output_w, before.lidt_w * 10f64.powf(-before.total_isolation_db / 10.0));
        let mut more = comps.clone();
        more.push(SpectralProfile::from_pairs("extra", ProfileKind::Attenuation, &[(400.0, extra), (2400.0, extra)]).unwrap());
        let after = budget_report(nm, &more, rate, 1e-7).unwrap();
        prop_assert!(after.worst_case_output_w < before.worst_case_output_w);
        let doubled = budget_report(nm, &comps, 2.0 * rate, 1e-7).unwrap();
        assert_relative_eq!(doubled.worst_case_photons_per_pulse, 0.5 * before.worst_case_photons_per_pulse, max_relative = 1e-12);
    }

    // ---- run configuration ----

    fn runs_are_reproducible(seed in any::<u64>(), h in 0.0..0.5f64) {
        let mut c = RunConfig::default();
        c.modulation.heights = vec![h];
        c.modulation.integration_times_s = vec![25e-6];
        c.modulation.windows = 1000;
        c.modulation.snspd.accumulations = 100;
        let a = execute(&c, Scenario::Modulation, seed).unwrap();
        let b = execute(&c, Scenario::Modulation, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    fn keyrate_csv_round_trips(p in protocol(), det in detector(), a in 0.15..0.25f64, d in prop::collection::vec(0.0..2000.0f64, 1..5)) {
        let mut d = d;
        d.sort_by(f64::total_cmp);
        let mut c = RunConfig {
            protocol: p,
            detector: det,
            channel: ChannelModel::new(a, 0.0),
            ..Default::default()
        };
        c.sweep.distances_km = Some(d);
        prop_assume!(c.violations_for(Some(Scenario::Keyrate)).is_empty());
        let rows = oilsec_core::run::keyrate_rows(&c).unwrap();
        let bytes = execute(&c, Scenario::Keyrate, 0).unwrap();
        let back: Vec<KeyrateRow> = csv::Reader::from_reader(bytes.as_slice()).deserialize().collect::<Result<_, _>>().unwrap();
        prop_assert_eq!(back, rows);
    }

    fn protocol_validation_matches_bounds(eps in -1.0..2.0f64, mu in -1.0..2.0f64) {
        let p = ProtocolParams::default().with_key_params(eps, mu);
        let v = p.violations();
        prop_assert_eq!(v.iter().any(|x| x.field == "send_prob"), !(eps > 0.0 && eps < 1.0));
        prop_assert_eq!(v.iter().any(|x| x.field == "signal_intensity"), mu.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater));
    }
}

/// Every property by name.
pub const ALL: &[(&str, fn())] = &[
    ("yield_identities", yield_identities),
    ("key_yield_falls_with_distance", key_yield_falls_with_distance),
    (
        "aligned_noiseless_phase_error_is_zero",
        aligned_noiseless_phase_error_is_zero,
    ),
    ("oblivious_rate_overestimates", oblivious_rate_overestimates),
    (
        "optimizer_is_deterministic_and_exact",
        optimizer_is_deterministic_and_exact,
    ),
    ("unit_kappa_reproduces_honest_curve", unit_kappa_reproduces_honest_curve),
    ("optimized_rate_falls_with_distance", optimized_rate_falls_with_distance),
    ("traces_stay_non_negative", traces_stay_non_negative),
    (
        "balanced_patterns_have_zero_net_area",
        balanced_patterns_have_zero_net_area,
    ),
    (
        "power_meter_blind_while_fast_pd_fires",
        power_meter_blind_while_fast_pd_fires,
    ),
    ("spectra_conserve_power", spectra_conserve_power),
    (
        "sidebands_vanish_only_without_modulation",
        sidebands_vanish_only_without_modulation,
    ),
    ("lidt_grows_with_wavelength", lidt_grows_with_wavelength),
    ("cascade_is_additive_and_order_free", cascade_is_additive_and_order_free),
    ("transparency_gain_is_antisymmetric", transparency_gain_is_antisymmetric),
    ("profiles_never_extrapolate", profiles_never_extrapolate),
    ("more_attenuation_less_leakage", more_attenuation_less_leakage),
    ("runs_are_reproducible", runs_are_reproducible),
    ("keyrate_csv_round_trips", keyrate_csv_round_trips),
    ("protocol_validation_matches_bounds", protocol_validation_matches_bounds),
];

#[allow(dead_code)]
pub fn run(name: &str) {
    let (_, f) = ALL.iter().find(|(n, _)| *n == name).expect("unknown property");
    f();
}
