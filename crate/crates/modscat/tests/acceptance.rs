//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::Path;
use std::time::{Duration, Instant};

use modscat::config::{EquationKind, InitialSpec, Schedule};
use modscat::propcheck::{run_suite, Suite};
use modscat::runner::{simulate, write_artifacts, RunOutcome};
use modscat::ExperimentConfig;
use modscat_core::operators::{dollard_residual, free_propagate};
use modscat_core::solver::{pseudoconformal_inverse, BoundaryMonitor, Frame};
use modscat_core::spectral::{make_grid, ComplexField};
use modscat_core::Grid64;
use num_complex::Complex;

const REFERENCE: &str = include_str!("../../../configs/reference.toml");

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn reference() -> ExperimentConfig {
    ExperimentConfig::from_toml(REFERENCE).expect("reference config parses")
}

fn timed<R>(f: impl FnOnce() -> R) -> (R, Duration) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed())
}

fn rel_l2(a: &ComplexField<f64>, b: &ComplexField<f64>) -> f64 {
    a.sub(b).expect("same grid").l2() / b.l2()
}

/// Short 1D cubic run from the unit Gaussian to `t = 1`.
fn short_run(points: usize, half_width: f64, dt: f64) -> ExperimentConfig {
    let mut c = reference();
    c.grid.points = points;
    c.grid.half_width = half_width;
    c.time.dt = dt;
    c.time.t_end = 1.0;
    c.time.schedule = Schedule::Explicit { times: vec![1.0] };
    c.observers.scattering = false;
    c.observers.pseudoconformal = false;
    c.monitor.boundary = None;
    c
}

struct Runs {
    coarse: RunOutcome,
    fine: RunOutcome,
    coarse_time: Duration,
}

fn criterion_1() -> Verdict {
    let (errs, elapsed) = timed(|| {
        let g: Grid64 = make_grid(1, 1024, 32.0).unwrap();
        let u0 = ComplexField::from_fn(&g, |[x, _]| Complex::new((-x * x / 2.0).exp(), 0.0));
        [0.5, 1.0, 2.0]
            .map(|t: f64| {
                let a = Complex::new(1.0, t);
                let exact = ComplexField::from_fn(&g, |[x, _]| a.sqrt().inv() * (-x * x / (a * 2.0)).exp());
                rel_l2(&free_propagate(&u0, t).unwrap(), &exact)
            })
    });
    let worst = errs.iter().copied().fold(0.0, f64::max);
    verdict(
        worst < 1e-8 && elapsed < Duration::from_secs(1),
        format!("free propagator vs closed form, worst rel L2 error {worst:.3e} (< 1e-8), {elapsed:.2?}"),
    )
}

fn criterion_2() -> Verdict {
    let (worst, elapsed) = timed(|| {
        let g: Grid64 = make_grid(1, 1024, 64.0).unwrap();
        let suite = [(1.0, 0.0, 0.0), (1.2, 1.0, 0.5), (1.5, -2.0, -0.5)];
        let mut worst = 0.0f64;
        for (w, c, k) in suite {
            let f = ComplexField::from_fn(&g, |[x, _]: [f64; 2]| {
                Complex::from_polar((-(x - c) * (x - c) / (2.0 * w * w)).exp(), k * x)
            });
            for t in [1.0, 2.0, 4.0, 8.0] {
                worst = worst.max(dollard_residual(&f, t).unwrap());
            }
        }
        worst
    });
    verdict(
        worst < 1e-6 && elapsed < Duration::from_secs(5),
        format!("factorized vs spectral propagator, worst residual {worst:.3e} (< 1e-6), {elapsed:.2?}"),
    )
}

fn criterion_3(r: &Runs) -> Verdict {
    let s = &r.coarse.summary;
    verdict(
        s.mass_drift < 1e-9 && s.steps == 25_600 && r.coarse_time < Duration::from_secs(120),
        format!(
            "mass drift {:.3e} (< 1e-9) over {} steps, {:.1?}",
            s.mass_drift, s.steps, r.coarse_time
        ),
    )
}

fn criterion_4(r: &Runs) -> Verdict {
    let a = r.coarse.summary.energy_drift.unwrap_or(f64::INFINITY);
    let b = r.fine.summary.energy_drift.unwrap_or(f64::INFINITY);
    verdict(
        a < 1e-6 && a >= 3.0 * b,
        format!("energy drift {a:.3e} at dt (< 1e-6), {b:.3e} at dt/2, reduction {:.2}x (>= 3x)", a / b),
    )
}

fn criterion_5() -> Verdict {
    let (res, elapsed) = timed(|| -> Result<(f64, f64, f64), modscat::RunError> {
        let run = |dt| simulate(&short_run(1024, 32.0, dt)).map(|o| o.final_field);
        let reference = run(0.0025)?;
        let e1 = run(0.02)?.sub(&reference)?.l2();
        let e2 = run(0.01)?.sub(&reference)?.l2();
        Ok(((e1 / e2).log2(), e1, e2))
    });
    match res {
        Ok((order, e1, e2)) => verdict(
            (order - 2.0).abs() <= 0.2 && elapsed < Duration::from_secs(60),
            format!("self-convergence order {order:.3} (2.0 +- 0.2), errors {e1:.3e} / {e2:.3e}, {elapsed:.1?}"),
        ),
        Err(e) => verdict(false, format!("run failed: {e}")),
    }
}

fn cpce_at(o: &RunOutcome, t: f64) -> Option<f64> {
    o.records.iter().find(|r| (r.t - t).abs() < 1e-9).and_then(|r| r.cpce_residual)
}

fn criterion_6(r: &Runs) -> Verdict {
    let a = cpce_at(&r.coarse, 8.0).unwrap_or(f64::INFINITY);
    let b = cpce_at(&r.fine, 8.0).unwrap_or(f64::INFINITY);
    let bounds = |o: &RunOutcome| {
        o.summary.j_growth_bounded == Some(true) && o.summary.dissipation_bounded == Some(true)
    };
    let (ca, cb) = (bounds(&r.coarse), bounds(&r.fine));
    verdict(
        a < 1e-3 && b < a && ca && cb,
        format!(
            "pseudoconformal residual at t = 8: {a:.3e} at dt (< 1e-3), {b:.3e} at dt/2; \
             J growth and dissipation bounds hold at every checkpoint: {ca} / {cb}"
        ),
    )
}

fn criterion_7() -> Verdict {
    let (res, elapsed) = timed(|| -> Result<f64, modscat::RunError> {
        let direct = simulate(&short_run(2048, 32.0, 1e-3))?;
        let mut c = short_run(2048, 32.0, 1e-3);
        c.equation.frame = Frame::Pseudoconformal;
        c.time.t_end = 0.5;
        c.time.schedule = Schedule::Explicit { times: vec![0.5] };
        let compact = simulate(&c)?;
        let (u, t) = pseudoconformal_inverse(&compact.final_field, 0.5)?;
        assert!((t - 1.0).abs() < 1e-12);
        Ok(rel_l2(&u, &direct.final_field))
    });
    match res {
        Ok(err) => verdict(
            err < 1e-4 && elapsed < Duration::from_secs(120),
            format!("compactified solve mapped back at t = 1, rel L2 error {err:.3e} (< 1e-4), {elapsed:.1?}"),
        ),
        Err(e) => verdict(false, format!("run failed: {e}")),
    }
}

fn criterion_8(r: &Runs) -> Verdict {
    let s = &r.coarse.summary;
    let third = s.sup_t_third_linf.unwrap_or(f64::NAN);
    let half = s.sup_t_half_dim_linf.unwrap_or(f64::NAN);
    let alpha = s.decay_fit.map_or(f64::NAN, |f| f.alpha);
    verdict(
        third.is_finite() && half.is_finite() && (0.33..=0.6).contains(&alpha),
        format!(
            "sup t^(1/3)|u|_inf = {third:.4}, sup t^(1/2)|u|_inf = {half:.4}, fitted alpha = {alpha:.4} (in [0.33, 0.6])"
        ),
    )
}

fn criterion_9(r: &Runs) -> Verdict {
    let rows = r.coarse.contrast.as_deref().unwrap_or_default();
    let Some(last) = rows.last() else {
        return verdict(false, "no contrast rows");
    };
    let late: Vec<f64> = rows.iter().filter(|p| p.t >= 4.0).map(|p| p.corrected).collect();
    let monotone = late.windows(2).all(|w| w[1] <= w[0]);
    verdict(
        last.ratio < 0.5 && monotone && late.len() >= 3,
        format!(
            "final pair ({}, {}): corrected {:.4e}, uncorrected {:.4e}, ratio {:.4} (< 0.5); \
             corrected gaps nonincreasing from t = 4: {monotone}",
            last.s, last.t, last.corrected, last.uncorrected, last.ratio
        ),
    )
}

fn criterion_10(r: &Runs) -> Verdict {
    let ratios: Vec<f64> = r.coarse.pairs.iter().map(|p| p.l2_gap / p.tail_bound).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    verdict(
        ratios.len() >= 4 && lo > 0.0 && hi / lo < 10.0,
        format!("gap / tail bound in [{lo:.4}, {hi:.4}] over {} pairs, spread {:.2}x (< 10x)", ratios.len(), hi / lo),
    )
}

fn criterion_11() -> Verdict {
    let mut c = reference();
    c.name = "radial-2d".into();
    c.grid.dim = 2;
    c.grid.points = 512;
    c.grid.half_width = 64.0;
    c.equation.kind = EquationKind::Power;
    c.equation.n = 2;
    c.initial = InitialSpec::RadialGaussian2d { amplitude: 1.0, width: 1.0 };
    c.time.dt = 0.01;
    c.time.t_end = 16.0;
    c.time.schedule = Schedule::Dyadic { fine_prefix: 0 };
    c.observers.pseudoconformal = false;
    c.monitor.boundary = Some(BoundaryMonitor { radius_fraction: 0.9, tolerance: 1e-3 });
    let (res, elapsed) = timed(|| simulate(&c));
    match res {
        Ok(o) => {
            let dominated = o.pairs.iter().all(|p| p.weak_gap <= p.l2_gap * (1.0 + 1e-12));
            let weak: Vec<f64> = o.pairs.iter().map(|p| p.weak_gap).collect();
            let decreasing = weak.windows(2).all(|w| w[1] < w[0]);
            let text: Vec<String> = o.pairs.iter().map(|p| format!("{:.3e}/{:.3e}", p.weak_gap, p.l2_gap)).collect();
            verdict(
                dominated && decreasing && weak.len() >= 3,
                format!(
                    "weak/L2 gaps {} ; dominated: {dominated}, weak decreasing: {decreasing}, {elapsed:.1?}",
                    text.join(", ")
                ),
            )
        }
        Err(e) => verdict(false, format!("run failed: {e}")),
    }
}

fn suite_verdict(suite: Suite, samples: u64, limit: Duration, what: &str) -> Verdict {
    let (res, elapsed) = timed(|| run_suite(suite, samples, 7));
    match res {
        Ok(reports) => {
            let all: Vec<_> = reports.iter().flat_map(|r| &r.reports).collect();
            let violations: u64 = all.iter().map(|r| r.violations).sum();
            let worst = all.iter().map(|r| r.worst_margin).fold(f64::INFINITY, f64::min);
            verdict(
                violations == 0 && elapsed < limit,
                format!(
                    "{what}: {} checks x {samples} samples, {violations} violations, worst margin {worst:.3e}, {elapsed:.2?}",
                    all.len()
                ),
            )
        }
        Err(e) => verdict(false, format!("suite failed: {e}")),
    }
}

fn criterion_15(r: &Runs) -> Verdict {
    let res = (|| -> Result<bool, Box<dyn std::error::Error>> {
        let again = simulate(&reference())?;
        let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
        write_artifacts(&r.coarse, dirs[0].path())?;
        write_artifacts(&again, dirs[1].path())?;
        let same = |name: &str| -> std::io::Result<bool> {
            let read = |d: &Path| std::fs::read(d.join(name));
            Ok(read(dirs[0].path())? == read(dirs[1].path())?)
        };
        Ok(r.coarse.run_id == again.run_id
            && ["diagnostics.csv", "ledger.csv", "linf.csv", "contrast.csv"]
                .iter()
                .all(|n| same(n).unwrap_or(false)))
    })();
    match res {
        Ok(same) => verdict(same, format!("two reference runs give byte-identical CSV: {same}")),
        Err(e) => verdict(false, format!("run failed: {e}")),
    }
}

fn main() {
    // Reference run at dt and dt/2, shared by several criteria.
    let (coarse, coarse_time) = timed(|| simulate(&reference()));
    let mut half = reference();
    half.time.dt /= 2.0;
    let fine = simulate(&half);
    let runs = match (coarse, fine) {
        (Ok(coarse), Ok(fine)) => Some(Runs { coarse, fine, coarse_time }),
        (a, b) => {
            for e in [a.err(), b.err()].into_iter().flatten() {
                println!("reference run failed: {e}");
            }
            None
        }
    };
    let on_runs = |f: fn(&Runs) -> Verdict| match &runs {
        Some(r) => f(r),
        None => verdict(false, "reference run unavailable"),
    };

    let results = [
        (1, criterion_1()),
        (2, criterion_2()),
        (3, on_runs(criterion_3)),
        (4, on_runs(criterion_4)),
        (5, criterion_5()),
        (6, on_runs(criterion_6)),
        (7, criterion_7()),
        (8, on_runs(criterion_8)),
        (9, on_runs(criterion_9)),
        (10, on_runs(criterion_10)),
        (11, criterion_11()),
        (12, suite_verdict(Suite::Fvw, 100_000, Duration::from_secs(5), "f/V/W pointwise bounds, n = 1..5")),
        (13, suite_verdict(Suite::Hardy, 1_000, Duration::from_secs(5), "Hardy bound on step functions")),
        (14, suite_verdict(Suite::Gn, 100, Duration::from_secs(30), "one-point bounds, 1D and 2D radial")),
        (15, on_runs(criterion_15)),
    ];
    let mut failed = 0;
    for (n, v) in &results {
        println!("criterion {n}: {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
