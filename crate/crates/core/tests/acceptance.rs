//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use pathmarker::algebra::{PathBasis, PathPolState};
use pathmarker::harness::*;
use pathmarker::optics::*;
use pathmarker::polarization::{PolAxis, PolBasis};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scenario(name: &str) -> Scenario {
    Catalog::builtin()
        .get(name)
        .unwrap_or_else(|| panic!("no scenario {name}"))
        .clone()
}

fn measure(s: &Scenario, q: &str) -> f64 {
    let o = run_scenario(s).unwrap();
    evaluate(q.parse().unwrap(), &o.run, o.baseline.as_ref()).unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let j = PathPolState::initial(true)
        .apply_lens()
        .and_then(|s| s.detector_statistics(PolBasis::Circular))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let cell = |d, a| j.get(d, a).unwrap_or(f64::NAN);
    let err = [
        (cell(0, PolAxis::L) - 0.5).abs(),
        (cell(1, PolAxis::R) - 0.5).abs(),
        cell(0, PolAxis::R).abs(),
        cell(1, PolAxis::L).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    ensure(
        err <= 1e-12 && elapsed < Duration::from_millis(1),
        format!("max |error| {err:.1e}, {elapsed:?}"),
    )
}

fn criterion_2() -> Check {
    let j = PathPolState::initial(true)
        .apply_lens()
        .and_then(|s| s.detector_statistics(PolBasis::Linear))
        .map_err(|e| e.to_string())?;
    let mut err: f64 = 0.0;
    for d in 0..2 {
        for a in [PolAxis::H, PolAxis::V] {
            err = err.max((j.get(d, a).unwrap_or(f64::NAN) - 0.25).abs());
        }
    }
    let [a, b] = j.conditional_on(PolAxis::H).ok_or("no H outcome")?;
    err = err.max((a - 0.5).abs()).max((b - 0.5).abs());
    ensure(
        err <= 1e-12,
        format!("max |error| {err:.1e}, P(D_A|H) = {a}, P(D_B|H) = {b}"),
    )
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, right, wrong) in [("item1-A-only", D_A, D_B), ("item1-B-only", D_B, D_A)] {
        let s = scenario(name);
        let o = run_scenario(&s).map_err(|e| e.to_string())?;
        let (p, q) = (
            o.run.summary.detector_total(right),
            o.run.summary.detector_total(wrong),
        );
        ok &= p > 0.95 && q < 0.01;
        detail.push(format!("{name}: {p:.4} / {q:.1e}"));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    detail.push(format!("{elapsed:.2?}"));
    ensure(ok, detail.join(", "))
}

fn criterion_4() -> Check {
    let both = scenario("item4-both-wires");
    let drop = measure(&both, "wire_drop_abs");
    let single = scenario("item2-A-only-wires");
    let loss = measure(&single, "wire_drop_over_fill");
    ensure(
        drop < 0.01 && loss >= 0.8,
        format!("both-slit change {drop:.1e}, single-slit loss {loss:.2} x fill factor"),
    )
}

fn criterion_5() -> Check {
    let s = scenario("marked-lens-plane");
    let o = run_scenario(&s).map_err(|e| e.to_string())?;
    let v = o.run.summary.lens_visibility.ok_or("no visibilities")?;
    let offset = evaluate(Quantity::HvOffsetCells, &o.run, None).map_err(|e| e.to_string())?;
    ensure(
        v.h > 0.9 && v.v > 0.9 && v.total < 0.02 && offset <= 1.0,
        format!(
            "V_H {:.4}, V_V {:.4}, V_total {:.4}, H-min to V-max {offset:.2} cells",
            v.h, v.v, v.total
        ),
    )
}

fn criterion_6() -> Check {
    let catalog = Catalog::builtin();
    let mut detail = Vec::new();
    let mut ok = true;
    for s in catalog.scenarios.iter().filter(|s| {
        s.is_both_slits() && s.config.markers && matches!(s.config.wires, WireSetting::None)
    }) {
        let run = run_experiment(&s.config).map_err(|e| e.to_string())?;
        let worst = max_delta(&cross_validate(&s.config, &run.summary).map_err(|e| e.to_string())?);
        ok &= worst <= CROSS_VALIDATION_TOLERANCE;
        detail.push(format!("{} {worst:.4}", s.name));
    }
    for name in ["marked-circular-L", "marked-linear-H"] {
        let cfg = scenario(name).config;
        let levels: Vec<usize> = (12..=18).map(|k| 1usize << k).collect();
        let study = convergence_study(&cfg, &levels).map_err(|e| e.to_string())?;
        let deltas: Vec<f64> = study.iter().map(|l| l.max_delta).collect();
        let improving = deltas.windows(2).all(|w| w[1] < w[0]);
        ok &= improving;
        detail.push(format!(
            "{name} 2^12..2^18: {}",
            deltas
                .iter()
                .map(|d| format!("{d:.3}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ));
    }
    ensure(ok, detail.join("; "))
}

fn amp() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn state() -> impl Strategy<Value = PathPolState> {
    prop::array::uniform4(amp()).prop_map(|a| {
        let n = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1e-3);
        PathPolState::new(
            [[a[0] / n, a[1] / n], [a[2] / n, a[3] / n]],
            PathBasis::SlitAB,
            PolBasis::Linear,
        )
    })
}

fn algebra_properties() -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&state(), |s| {
            let tol = 1e-12;
            let n = s.norm_sqr();
            let lensed = s.apply_lens().unwrap();
            prop_assert!((lensed.norm_sqr() - n).abs() < tol);
            let pm = s.in_path_basis(PathBasis::PlusMinus).unwrap();
            prop_assert!((pm.norm_sqr() - n).abs() < tol);
            prop_assert!(
                pm.in_path_basis(PathBasis::SlitAB)
                    .unwrap()
                    .max_abs_diff(&s)
                    .unwrap()
                    < tol
            );
            let c = s.in_pol_basis(PolBasis::Circular);
            prop_assert!(c.in_pol_basis(PolBasis::Linear).max_abs_diff(&s).unwrap() < tol);
            for b in [PolBasis::Linear, PolBasis::Circular] {
                let j = lensed.detector_statistics(b).unwrap();
                prop_assert!((j.total() - 1.0).abs() < tol);
            }
            Ok(())
        })
        .map_err(|e| format!("algebra: {e}"))?;

    let product = (
        0.0f64..std::f64::consts::FRAC_PI_2,
        0.0f64..std::f64::consts::TAU,
        prop::array::uniform2(amp()),
        prop::array::uniform2(amp()),
    );
    runner
        .run(&product, |(alpha, phase, ma, mb)| {
            let norm = |m: [Complex64; 2]| {
                let n = (m[0].norm_sqr() + m[1].norm_sqr()).sqrt().max(1e-3);
                [m[0] / n, m[1] / n]
            };
            let (ma, mb) = (norm(ma), norm(mb));
            let ca = Complex64::new(alpha.cos(), 0.0);
            let cb = Complex64::from_polar(alpha.sin(), phase);
            let s = PathPolState::new(
                [[ca * ma[0], ca * ma[1]], [cb * mb[0], cb * mb[1]]],
                PathBasis::SlitAB,
                PolBasis::Linear,
            );
            let r = s.duality().unwrap();
            prop_assert!(r.distinguishability.powi(2) + r.visibility.powi(2) <= 1.0 + 1e-9);
            Ok(())
        })
        .map_err(|e| format!("duality: {e}"))
}

fn field_from(vals: &[(f64, f64)], phase: f64) -> PolarizedField {
    let g = Grid::new(2e-3, 4096).unwrap();
    let e_h = (0..g.points)
        .map(|j| {
            let (a, b) = vals[j % vals.len()];
            Complex64::new(a, b) * Complex64::from_polar(1.0, phase * j as f64)
        })
        .collect();
    let e_v = (0..g.points)
        .map(|j| {
            let (a, b) = vals[(j * 7 + 3) % vals.len()];
            Complex64::new(b, -a)
        })
        .collect();
    PolarizedField::new(g, e_h, e_v, 500e-9, Plane::Aperture).unwrap()
}

fn optics_properties() -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: 32,
        failure_persistence: None,
        ..Config::default()
    });
    let inputs = (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 97),
        0.0f64..0.1,
        amp(),
        amp(),
        0.05f64..0.3,
    );
    runner
        .run(&inputs, |(vals, phase, a, b, z)| {
            let f = field_from(&vals, phase);
            let g = field_from(&vals[1..], phase * 0.5);
            let mut combo = f.clone();
            for j in 0..combo.len() {
                combo.e_h[j] = a * f.e_h[j] + b * g.e_h[j];
                combo.e_v[j] = a * f.e_v[j] + b * g.e_v[j];
            }
            let (pf, pg, pc) = (
                propagate(&f, z).unwrap(),
                propagate(&g, z).unwrap(),
                propagate(&combo, z).unwrap(),
            );
            let err = (0..pc.len())
                .map(|j| {
                    (pc.e_h[j] - a * pf.e_h[j] - b * pg.e_h[j])
                        .norm()
                        .max((pc.e_v[j] - a * pf.e_v[j] - b * pg.e_v[j]).norm())
                })
                .fold(0.0, f64::max);
            prop_assert!(err < 1e-10, "linearity {}", err);
            let drift = (pf.accounted_power() - f.power()).abs() / f.power();
            prop_assert!(drift < 1e-9, "power {}", drift);
            Ok(())
        })
        .map_err(|e| format!("optics: {e}"))
}

fn criterion_7() -> Check {
    algebra_properties()?;
    optics_properties()?;
    Ok(
        "1000 states: norm, round trips, statistics to 1e-12; D^2+V^2 <= 1+1e-9; \
        32 fields: linearity 1e-10, power 1e-9"
            .into(),
    )
}

fn criterion_8(start: Instant) -> Check {
    const N: u64 = 1_000_000;
    let mut detail = Vec::new();
    let mut ok = true;
    for s in Catalog::builtin()
        .scenarios
        .iter()
        .filter(|s| s.photons.is_some())
    {
        let o = run_scenario(s).map_err(|e| e.to_string())?;
        let table = outcome_table(s, &o.run.summary).map_err(|e| e.to_string())?;
        let sample = sample_photons(&table, N, 0).map_err(|e| e.to_string())?;
        let p = sample.chi_square.p_value;
        ok &= p > 0.001;
        detail.push(format!("{} p={p:.3}", s.name));
        if s.name == "marked-circular-L" {
            let wrong = sample.count(Outcome {
                detector: DetectorOutcome::DA,
                pol: Some(PolAxis::R),
            });
            ok &= wrong == 0;
            detail.push(format!("(D_A,R) count {wrong}"));
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    detail.push(format!("suite {elapsed:.1?}"));
    ensure(ok, detail.join(", "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let criteria: [Criterion; 7] = [
        ("exact marker statistics", criterion_1),
        ("exact eraser statistics", criterion_2),
        ("single slit reaches its own detector", criterion_3),
        ("dark-fringe wires leave detection unchanged", criterion_4),
        ("complementary fringes at the lens", criterion_5),
        ("exact and wave tables agree", criterion_6),
        ("property suites", criterion_7),
    ];
    let mut failed = 0;
    let mut report = |k: usize, name: &str, r: Check| {
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {k}: {name}: {detail}");
    };
    for (k, (name, f)) in criteria.iter().enumerate() {
        report(k + 1, name, f());
    }
    report(8, "photon sampling", criterion_8(start));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
