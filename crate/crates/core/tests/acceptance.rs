//! Acceptance gate: one check per criterion, one printed line each.
//!
//! Criteria 1 and 2 pin the closed-form values on the simplex and the
//! shifted simplex. Criteria 3..7 and 9 are randomized identity suites
//! at fixed seeds and tolerances. Criterion 8 is exact simplicity,
//! criterion 10 the classification round trip, and criterion 11 the
//! negative control that must fail.

use std::time::Instant;

use lpproj_core::ops::{self, OperatorKind};
use lpproj_core::rational::{rat, ratio};
use lpproj_core::verify;
use lpproj_core::{Polytope, SignedLpFunction};

const SEED: u64 = 0x5eed_2024;
const ALL_P: [f64; 4] = [1.5, 2.0, 2.5, 3.0];

fn factorial(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

struct Outcome {
    label: &'static str,
    passed: bool,
    detail: String,
}

fn outcome(label: &'static str, passed: bool, detail: String) -> Outcome {
    Outcome { label, passed, detail }
}

/// Criterion 1: simplex evaluations, 1e-12 relative, under one second.
fn criterion_simplex_values() -> Outcome {
    let start = Instant::now();
    let mut max_rel = 0.0f64;
    for n in [3usize, 4, 5] {
        let tn = Polytope::standard_simplex(n).unwrap();
        let expect = 1.0 / factorial(n - 1);
        for p in ALL_P {
            let plus = ops::pi_plus(&tn, p).unwrap();
            let minus = ops::pi_minus(&tn, p).unwrap();
            for i in 0..n {
                let mut u = vec![0.0; n];
                u[i] = 1.0;
                max_rel = max_rel.max((plus.eval(&u).unwrap() - expect).abs() / expect);
                max_rel = max_rel.max(minus.eval(&u).unwrap().abs() / expect);
                u[i] = -1.0;
                max_rel = max_rel.max(plus.eval(&u).unwrap().abs() / expect);
                max_rel = max_rel.max((minus.eval(&u).unwrap() - expect).abs() / expect);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        "criterion 1 simplex evaluations",
        max_rel <= 1e-12 && elapsed < 1.0,
        format!("max relative error {max_rel:.2e}, {elapsed:.2}s"),
    )
}

/// Criterion 2: shifted-simplex values, 1e-12 relative.
fn criterion_shifted_simplex_values() -> Outcome {
    let mut max_err = 0.0f64;
    for n in [3usize, 4, 5] {
        let sh = Polytope::shifted_simplex(n).unwrap();
        let fac = factorial(n - 1);
        for p in ALL_P {
            // Value formula at 10 sampled directions.
            let pos = ops::pi_plus_pos(&sh, p).unwrap();
            let mut rng = verify::case_rng(SEED, n as u64);
            for u in verify::sample_dirs(n, &mut rng, 10).into_iter().take(10) {
                let ones = u.iter().sum::<f64>().max(0.0);
                let expect = 2.0f64.powf(1.0 - p) / fac * ones.powf(p);
                let got = pos.eval(&u).unwrap();
                max_err = max_err.max((got - expect).abs() / (1.0 + expect));
            }
            // Eight values of the four extensions at ±(e_2 - e_1).
            let mut u = vec![0.0; n];
            u[0] = -1.0;
            u[1] = 1.0;
            let mu: Vec<f64> = u.iter().map(|c| -c).collect();
            let table: [(ops::OperatorKind, f64, f64); 4] = [
                (OperatorKind::PiPlusPos, 0.0, 0.0),
                (OperatorKind::PiMinusPos, 0.0, 0.0),
                (OperatorKind::PiPlusNeg, 1.0 / fac, 0.0),
                (OperatorKind::PiMinusNeg, 0.0, 1.0 / fac),
            ];
            for (kind, at_u, at_mu) in table {
                let f = ops::apply(kind, &sh, p).unwrap();
                max_err = max_err.max((f.s_eval(&u).unwrap() - at_u).abs());
                max_err = max_err.max((f.s_eval(&mu).unwrap() - at_mu).abs());
            }
        }
    }
    outcome(
        "criterion 2 shifted-simplex evaluations",
        max_err <= 1e-12,
        format!("max error {max_err:.2e}"),
    )
}

/// Shared case set for the valuation suite: 200 cut pairs per n, reused
/// for every operator and every p.
fn valuation_residual(apply: verify::ApplyFn, cases: usize, ns: &[usize], ps: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for &n in ns {
        let mut pieces = Vec::new();
        for i in 0..cases {
            let mut rng = verify::case_rng(SEED, 0xa000 + i as u64);
            let origin_case = i % 2 == 0;
            let poly = verify::random_polytope(n, &mut rng, origin_case).unwrap();
            let h = verify::random_cut(&poly, &mut rng, origin_case).unwrap();
            let (plus, minus, section) = poly.halfspace_cut(&h).unwrap();
            pieces.push((poly, plus, minus, section, origin_case));
        }
        let mut rng = verify::case_rng(SEED, 0xa900 + n as u64);
        let dirs = verify::sample_dirs(n, &mut rng, 24);
        for (poly, plus, minus, section, origin_case) in &pieces {
            for kind in OperatorKind::ALL_CONCRETE {
                if kind.needs_origin() && !origin_case {
                    continue;
                }
                for &p in ps {
                    let parts: Vec<SignedLpFunction> = [poly, section, plus, minus]
                        .iter()
                        .map(|q| apply(kind, q, p).unwrap())
                        .collect();
                    for u in &dirs {
                        let vals: Vec<f64> =
                            parts.iter().map(|f| f.s_eval(u).unwrap()).collect();
                        let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                        let res = (vals[0] + vals[1] - vals[2] - vals[3]).abs() / (1.0 + scale);
                        worst = worst.max(res);
                    }
                }
            }
        }
    }
    worst
}

/// Criterion 3: valuation identity, 200 cases per operator per (n, p),
/// residual <= 1e-8, under two minutes.
fn criterion_valuation() -> Outcome {
    let start = Instant::now();
    let worst = valuation_residual(&ops::apply, 200, &[3, 4], &[1.5, 2.0, 3.0]);
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        "criterion 3 valuation identity",
        worst <= 1e-8 && elapsed < 120.0,
        format!("max residual {worst:.2e}, {elapsed:.1}s"),
    )
}

/// Shared contravariance residual so the negative control can reuse it.
fn contravariance_residual(apply: verify::ApplyFn, cases: usize, ns: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for &n in ns {
        for i in 0..cases {
            let mut rng = verify::case_rng(SEED, 0xb000 + i as u64);
            let p = ALL_P[i % ALL_P.len()];
            for kind in OperatorKind::ALL_CONCRETE {
                let origin = kind.needs_origin();
                let poly = verify::random_polytope(n, &mut rng, origin || i % 2 == 0).unwrap();
                let map = verify::random_unimodular(n, &mut rng);
                let r = verify::check_contravariance_with(apply, kind, &poly, &map, p, 1e-8)
                    .unwrap();
                worst = worst.max(r.max_residual);
            }
        }
    }
    worst
}

/// Criterion 4: SL(n)-contravariance, 200 cases per operator, 1e-8.
fn criterion_contravariance() -> Outcome {
    let worst = contravariance_residual(&ops::apply, 100, &[3, 4]);
    outcome(
        "criterion 4 sl(n)-contravariance",
        worst <= 1e-8,
        format!("max residual {worst:.2e}"),
    )
}

/// Criterion 5: GL(n) law with positive-determinant rational maps, 1e-7.
fn criterion_gl_law() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100usize {
        let n = if i % 2 == 0 { 3 } else { 4 };
        let mut rng = verify::case_rng(SEED, 0xc000 + i as u64);
        let p = ALL_P[i % ALL_P.len()];
        for kind in OperatorKind::ALL_CONCRETE {
            let origin = kind.needs_origin();
            let poly = verify::random_polytope(n, &mut rng, origin || i % 2 == 0).unwrap();
            let map = verify::random_gl_positive(n, &mut rng);
            let r = verify::check_gl_law(kind, &poly, &map, p, 1e-7).unwrap();
            worst = worst.max(r.max_residual);
        }
    }
    outcome(
        "criterion 5 gl(n) law",
        worst <= 1e-7,
        format!("max residual {worst:.2e}"),
    )
}

/// Criterion 6: homogeneity of degree n - p, s in {1/2, 2, 3}, 1e-9.
fn criterion_homogeneity() -> Outcome {
    let s_values = [ratio(1, 2), rat(2), rat(3)];
    let mut worst = 0.0f64;
    for n in [3usize, 4] {
        for p in ALL_P {
            for kind in OperatorKind::ALL_CONCRETE {
                let r = verify::check_homogeneity(kind, n, p, &s_values, 1e-9).unwrap();
                worst = worst.max(r.max_residual);
            }
        }
    }
    outcome(
        "criterion 6 homogeneity n-p",
        worst <= 1e-9,
        format!("max residual {worst:.2e}"),
    )
}

/// Criterion 7: functional equation on scaled simplices plus the exact
/// polytope split, 1e-8.
fn criterion_functional_equation() -> Outcome {
    let lambdas = [ratio(1, 4), ratio(1, 3), ratio(1, 2), ratio(2, 3)];
    let scales = [rat(1), rat(2)];
    let mut worst = 0.0f64;
    let mut split_ok = true;
    for n in [3usize, 4] {
        for lam in &lambdas {
            split_ok &= verify::exact_split_identity(n, lam).unwrap();
            for s in &scales {
                for p in [2.0, 2.5] {
                    for kind in OperatorKind::ALL_CONCRETE {
                        let r =
                            verify::check_functional_equation(kind, n, p, s, lam, 1e-8).unwrap();
                        worst = worst.max(r.max_residual);
                    }
                }
            }
        }
    }
    outcome(
        "criterion 7 functional equation",
        worst <= 1e-8 && split_ok,
        format!("max residual {worst:.2e}, exact split {split_ok}"),
    )
}

/// Criterion 8: simplicity is exact (empty term lists) on
/// lower-dimensional inputs.
fn criterion_simplicity() -> Outcome {
    let mut failures = 0usize;
    let mut cases = 0usize;
    for n in [3usize, 4] {
        // 25 cases per n per category, 50 in total each.
        for i in 0..25usize {
            let mut rng = verify::case_rng(SEED, 0xd000 + i as u64 + 100 * n as u64);
            let p = ALL_P[i % ALL_P.len()];

            let d = 1 + i % (n - 1);
            let with_origin = verify::random_lowdim(n, &mut rng, d, true, true).unwrap();
            for kind in [OperatorKind::PiPlus, OperatorKind::PiMinus] {
                cases += 1;
                failures += !ops::apply(kind, &with_origin, p).unwrap().is_zero() as usize;
            }
            let generic = {
                let d = 1 + i % (n - 1);
                verify::random_lowdim(n, &mut rng, d, i % 2 == 0, false).unwrap()
            };
            for kind in [OperatorKind::DeltaPlus, OperatorKind::DeltaMinus] {
                cases += 1;
                failures += !ops::apply(kind, &generic, p).unwrap().is_zero() as usize;
            }

            let low = {
                let d = 1 + i % (n - 2).max(1);
                verify::random_lowdim(n, &mut rng, d.min(n - 2), i % 2 == 0, false).unwrap()
            };
            let slice = verify::random_lowdim(n, &mut rng, n - 1, true, false).unwrap();
            for kind in [
                OperatorKind::PiPlusPos,
                OperatorKind::PiMinusPos,
                OperatorKind::PiPlusNeg,
                OperatorKind::PiMinusNeg,
            ] {
                cases += 2;
                failures += !ops::apply(kind, &low, p).unwrap().is_zero() as usize;
                failures += !ops::apply(kind, &slice, p).unwrap().is_zero() as usize;
            }
        }
    }
    outcome(
        "criterion 8 simplicity exact",
        failures == 0,
        format!("{failures} nonzero outputs in {cases} cases"),
    )
}

/// Criterion 9: simple-valuation decomposition on origin-avoiding
/// polytopes, 1e-8.
fn criterion_simple_decomposition() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..100usize {
        let n = if i % 2 == 0 { 3 } else { 4 };
        let mut rng = verify::case_rng(SEED, 0xe000 + i as u64);
        let p = ALL_P[i % ALL_P.len()];
        let poly = verify::random_origin_avoiding(n, &mut rng).unwrap();
        for kind in [OperatorKind::DeltaPlus, OperatorKind::DeltaMinus] {
            let r = verify::check_simple_decomposition(kind, &poly, p, 1e-8).unwrap();
            worst = worst.max(r.max_residual);
        }
    }
    outcome(
        "criterion 9 simple decomposition",
        worst <= 1e-8,
        format!("max residual {worst:.2e}"),
    )
}

/// Criterion 10: classification round trip for 50 random quadruples.
fn criterion_classification() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..50usize {
        let mut rng = verify::case_rng(SEED, 0xf000 + i as u64);
        use rand::Rng as _;
        let c = [
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
        ];
        let p = ALL_P[i % ALL_P.len()];
        let r = verify::check_classification_roundtrip(3, p, c, SEED ^ i as u64, 1e-9).unwrap();
        worst = worst.max(r.max_residual);
    }
    outcome(
        "criterion 10 classification round trip",
        worst <= 1e-9,
        format!("max residual {worst:.2e}"),
    )
}

/// Criterion 11: the corrupted operator must break criteria 3 and 4.
fn criterion_negative_control() -> Outcome {
    let val = valuation_residual(&verify::corrupted_apply, 20, &[3], &[2.0]);
    let contra = contravariance_residual(&verify::corrupted_apply, 20, &[3]);
    outcome(
        "criterion 11 negative control",
        val > 1e-8 && contra > 1e-8,
        format!("corrupted residuals: valuation {val:.2e}, contravariance {contra:.2e}"),
    )
}

#[test]
fn acceptance() {
    let checks: Vec<fn() -> Outcome> = vec![
        criterion_simplex_values,
        criterion_shifted_simplex_values,
        criterion_valuation,
        criterion_contravariance,
        criterion_gl_law,
        criterion_homogeneity,
        criterion_functional_equation,
        criterion_simplicity,
        criterion_simple_decomposition,
        criterion_classification,
        criterion_negative_control,
    ];
    let mut all_ok = true;
    for check in checks {
        let o = check();
        println!(
            "{}: {} ({})",
            o.label,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        all_ok &= o.passed;
    }
    assert!(all_ok, "at least one acceptance criterion failed");
}
