mod common;

use modscat::config::{EquationKind, InitialSpec};
use modscat::diagnostics::read_column;
use modscat::runner::{run_experiment, simulate};
use modscat::ExperimentConfig;
use modscat_core::scattering::PhaseSign;
use proptest::prelude::*;

#[test]
fn zero_data_gives_zero_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = common::small(dir.path());
    c.initial = InitialSpec::Gaussian { amplitude: 0.0, width: 1.0, center: [0.0; 2], momentum: [0.0; 2] };
    let o = simulate(&c).unwrap();
    assert!(o.records.iter().all(|r| r.mass == 0.0 && r.linf == 0.0));
    assert!(o.pairs.iter().all(|p| p.l2_gap == 0.0 && p.weak_gap == 0.0));
    assert!(o.contrast.unwrap().iter().all(|r| r.corrected == 0.0 && r.uncorrected == 0.0));
}

/// `||(e^{iθ(x)} - 1) u0||` with `θ = x^2 (1/s - 1/t) / 2`, by direct
/// quadrature of the unit Gaussian.
fn modulated_gap(s: f64, t: f64) -> f64 {
    let a = 0.5 * (1.0 / t - 1.0 / s);
    let h = 1e-3;
    (-20_000..=20_000)
        .map(|k| {
            let x = k as f64 * h;
            let d = 2.0 - 2.0 * (a * x * x).cos();
            d * (-x * x).exp() * h
        })
        .sum::<f64>()
        .sqrt()
}

#[test]
fn linear_control_matches_modulated_data() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = common::small(dir.path());
    c.grid.points = 4096;
    c.grid.half_width = 128.0;
    c.equation.kind = EquationKind::Linear;
    c.time.t_end = 32.0;
    let o = simulate(&c).unwrap();
    assert_eq!(o.pairs.len(), 5);
    for p in &o.pairs {
        let exact = modulated_gap(p.s, p.t);
        assert!((p.l2_gap - exact).abs() < 1e-8 * exact.max(1e-3), "({}, {}): {} vs {exact}", p.s, p.t, p.l2_gap);
    }
    // No nonlinear phase: corrected and uncorrected coincide.
    assert!(o.contrast.unwrap().iter().all(|r| (r.corrected - r.uncorrected).abs() < 1e-12));
}

#[test]
fn records_are_ordered_and_mass_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_experiment(&common::small(dir.path())).unwrap();
    let (t, m) = read_column(&dir.path().join("diagnostics.csv"), "mass").unwrap();
    assert!(t.windows(2).all(|w| w[0] < w[1]));
    assert!(m.iter().all(|v| (v - m[0]).abs() <= 1e-9 * m[0]));
    assert_eq!(t.len(), o.records.len());
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["run_id"].as_str().unwrap().len(), 40);
    assert_eq!(manifest["conventions"]["phase_sign"], "plus");
}

#[test]
fn phase_signs_differ_only_in_correction() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = common::small(dir.path());
    c.conventions.phase_sign = PhaseSign::Minus;
    let minus = simulate(&c).unwrap();
    c.conventions.phase_sign = PhaseSign::Plus;
    let plus = simulate(&c).unwrap();
    c.conventions.phase_sign = PhaseSign::Off;
    let off = simulate(&c).unwrap();
    assert!(off.contrast.is_none());
    let last = |o: &modscat::RunOutcome| o.pairs.last().unwrap().l2_gap;
    // For the defocusing sign convention the `plus` correction is the one that cancels the phase.
    assert!(last(&plus) < last(&off) && last(&off) <= last(&minus) * (1.0 + 1e-9));
    assert_eq!(plus.records.iter().map(|r| r.mass).collect::<Vec<_>>(), off.records.iter().map(|r| r.mass).collect::<Vec<_>>());
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    let kind = prop_oneof![
        Just((EquationKind::Linear, 1u32)),
        (1u32..=2).prop_map(|n| (EquationKind::Power, n)),
        (3u32..=5).prop_map(|n| (EquationKind::Saturated, n)),
    ];
    (1usize..=2, 4u32..=7, 1.0f64..100.0, 1e-4f64..0.1, 1.0f64..100.0, kind, any::<u64>(), any::<bool>())
        .prop_map(|(dim, log_points, l, dt, t_end, (kind, n), seed, explicit)| {
            let mut c = common::reference();
            c.grid.dim = dim;
            c.grid.points = 1 << log_points;
            c.grid.half_width = l;
            c.time.dt = dt;
            c.time.t_end = t_end;
            c.equation.n = n;
            c.equation.kind = kind;
            c.initial = InitialSpec::RandomH11 { seed, amplitude: dt, correlation_length: l, envelope_width: t_end };
            if explicit {
                c.time.schedule = modscat::config::Schedule::Explicit { times: vec![dt, t_end / 3.0, t_end] };
            }
            c
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(c in arb_config()) {
        let toml = c.to_toml();
        let back = ExperimentConfig::from_toml(&toml).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(ExperimentConfig::from_toml(&back.to_toml()).unwrap(), back);
        prop_assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn checkpoints_sorted_within_range(c in arb_config()) {
        let cps = c.checkpoints();
        prop_assert!(cps.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(cps.iter().all(|t| *t > 0.0 && *t <= c.time.t_end));
        prop_assert_eq!(cps.last().copied(), Some(c.time.t_end));
    }
}
