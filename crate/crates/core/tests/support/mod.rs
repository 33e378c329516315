//! Shared strategies and helpers for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use oilsec_core::isolation::{ProfileKind, SpectralProfile};
use oilsec_core::keyrate::{ChannelModel, DetectorModel, ProtocolParams};
use oilsec_core::modulation::{ModulationKind, ModulationPattern};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load_fixture(name: &str, kind: ProfileKind) -> SpectralProfile {
    SpectralProfile::load(fixture(name), kind).unwrap()
}

pub fn dark_count() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1e-8), Just(1e-6), 1e-9..1e-4]
}

pub fn protocol() -> impl Strategy<Value = ProtocolParams> {
    (0.01..0.99f64, 0.01..1.5f64, 1e-7..1e-2f64, 0.0..0.5f64, 0.0..0.5f64).prop_map(|(eps, mu, nu, dtheta, dphi)| {
        ProtocolParams {
            send_prob: eps,
            signal_intensity: mu,
            decoy_intensity: nu.min(0.5 * mu),
            phase_misalignment: dtheta,
            polarisation_misalignment: dphi,
            ..Default::default()
        }
    })
}

pub fn detector() -> impl Strategy<Value = DetectorModel> {
    (dark_count(), 0.1..=1.0f64).prop_map(|(pd, eta)| DetectorModel::new(pd, eta))
}

pub fn channel() -> impl Strategy<Value = ChannelModel> {
    (0.15..0.25f64, 0.0..400.0f64).prop_map(|(a, l)| ChannelModel::new(a, l))
}

pub fn balanced_kind() -> impl Strategy<Value = ModulationKind> {
    prop_oneof![Just(ModulationKind::UpToDown), Just(ModulationKind::DownToUp)]
}

pub fn any_kind() -> impl Strategy<Value = ModulationKind> {
    prop_oneof![
        Just(ModulationKind::Up),
        Just(ModulationKind::Down),
        Just(ModulationKind::UpToDown),
        Just(ModulationKind::DownToUp),
    ]
}

/// Patterns on a 1 THz grid: widths 50-250 ps, periods 0.2-10 ns.
pub fn pattern(kind: impl Strategy<Value = ModulationKind>) -> impl Strategy<Value = ModulationPattern> {
    (kind, 0.0..=1.0f64, 50usize..=250, 0usize..=2000, 1e-4..1e-2f64).prop_map(|(kind, h, w_ps, extra_ps, base)| {
        let lobes = if kind.is_paired() { 2 } else { 1 };
        let period_ps = (lobes * w_ps + 1 + extra_ps).max(200);
        ModulationPattern {
            kind,
            height: h,
            width_s: w_ps as f64 * 1e-12,
            period_s: period_ps as f64 * 1e-12,
            baseline_w: base,
        }
    })
}

/// Random profile with strictly increasing wavelengths.
pub fn profile(kind: ProfileKind) -> impl Strategy<Value = SpectralProfile> {
    (
        400.0..600.0f64,
        prop::collection::vec((1.0..80.0f64, 0.0..60.0f64), 2..20),
    )
        .prop_map(move |(start, steps)| {
            let mut w = start;
            let pts: Vec<(f64, f64)> = steps
                .into_iter()
                .map(|(dw, v)| {
                    w += dw;
                    (w, v)
                })
                .collect();
            SpectralProfile::from_pairs("random", kind, &pts).unwrap()
        })
}

/// Profile covering [500, 2300] nm so every query in that band is valid.
pub fn wide_attenuation() -> impl Strategy<Value = SpectralProfile> {
    prop::collection::vec(0.0..60.0f64, 10).prop_map(|v| {
        let pts: Vec<(f64, f64)> = v
            .iter()
            .enumerate()
            .map(|(i, &d)| (500.0 + 200.0 * i as f64, d))
            .collect();
        SpectralProfile::from_pairs("wide", ProfileKind::Attenuation, &pts).unwrap()
    })
}
