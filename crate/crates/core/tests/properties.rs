//! Randomized invariants of the geometry kernel and the L_p algebra.
//! Proptest drives the seeds; the structured generators from the verify
//! module build the actual inputs so every case is well formed.

use num_traits::{One, Signed};
use proptest::prelude::*;

use lpproj_core::linalg;
use lpproj_core::lp::{direction_sample, LpFunction, LpTerm, TermSign};
use lpproj_core::ops;
use lpproj_core::rational::{primitive_of_rational, rat_to_f64, Rat};
use lpproj_core::verify::{case_rng, random_polytope, random_unimodular, sample_dirs};
use lpproj_core::{OperatorKind, Polytope};

fn random_lp(seed: u64, n: usize, p: f64) -> LpFunction {
    use rand::Rng as _;
    let mut rng = case_rng(seed, 0x1f);
    let m = rng.gen_range(1..6);
    let terms: Vec<LpTerm> = (0..m)
        .map(|_| {
            let dir: Vec<_> = loop {
                let d: Vec<_> = (0..n).map(|_| rng.gen_range(-4i64..=4)).collect();
                if d.iter().any(|&c| c != 0) {
                    break d.into_iter().map(Into::into).collect();
                }
            };
            LpTerm {
                dir,
                sign: if rng.gen_bool(0.5) { TermSign::Plus } else { TermSign::Minus },
                coef: rng.gen_range(0.01..4.0),
            }
        })
        .collect();
    LpFunction::new(p, n, terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// Every vertex satisfies every facet inequality, vertices lie on at
    /// least n facets, and facet supports of origin-containing polytopes
    /// are nonnegative.
    #[test]
    fn hull_facets_are_valid(seed in any::<u64>(), origin in any::<bool>()) {
        let n = 3 + (seed % 2) as usize;
        let mut rng = case_rng(seed, 1);
        let poly = random_polytope(n, &mut rng, origin).unwrap();
        for f in poly.facets() {
            for v in poly.vertices() {
                let val = lpproj_core::rational::int_dot(&f.direction, v);
                prop_assert!(val <= f.support);
            }
            prop_assert!(!origin || !f.support.is_negative());
        }
        for (vi, v) in poly.vertices().iter().enumerate() {
            let active = poly
                .facets()
                .iter()
                .filter(|f| f.vertex_ids.contains(&vi))
                .count();
            prop_assert!(active >= n, "vertex {v:?} lies on {active} facets");
        }
    }

    /// Cutting splits the volume exactly, as rationals.
    #[test]
    fn cut_volume_is_additive(seed in any::<u64>()) {
        let n = 3 + (seed % 2) as usize;
        let mut rng = case_rng(seed, 2);
        let poly = random_polytope(n, &mut rng, false).unwrap();
        let h = lpproj_core::verify::random_cut(&poly, &mut rng, false).unwrap();
        let (plus, minus, _) = poly.halfspace_cut(&h).unwrap();
        prop_assert_eq!(plus.volume() + minus.volume(), poly.volume());
    }

    /// Unimodular images preserve the exact volume, and facet data maps
    /// by the transform law: for a facet (w, a) of P and the primitive
    /// normal tw' = phi^{-t}w of phi P, the image facet has support a/t
    /// and exact weight t times the original.
    #[test]
    fn unimodular_facet_transform(seed in any::<u64>()) {
        let n = 3 + (seed % 2) as usize;
        let mut rng = case_rng(seed, 3);
        let poly = random_polytope(n, &mut rng, seed % 3 == 0).unwrap();
        let map = random_unimodular(n, &mut rng);
        let image = poly.apply_map(&map).unwrap();
        prop_assert_eq!(image.volume(), poly.volume());
        prop_assert_eq!(image.facets().len(), poly.facets().len());
        let inv_t = map.inverse_transpose().unwrap();
        for f in poly.facets() {
            let mapped = inv_t.apply(&lpproj_core::rational::Vector(
                f.direction.iter().map(|c| Rat::from_integer(c.clone())).collect(),
            ));
            let (w, t) = primitive_of_rational(&mapped.0).unwrap();
            let twin = image
                .facets()
                .iter()
                .find(|g| g.direction == w)
                .expect("image facet exists");
            prop_assert_eq!(twin.support.clone(), &f.support / &t);
            let weight = |g: &lpproj_core::Facet| &g.vol_times_norm / &g.sq_norm;
            prop_assert_eq!(weight(twin), &t * weight(f));
        }
    }

    /// eval is p-homogeneous in the direction argument.
    #[test]
    fn eval_is_p_homogeneous(seed in any::<u64>(), p in 1.5f64..3.0) {
        let n = 3;
        let f = random_lp(seed, n, p);
        let mut rng = case_rng(seed, 4);
        for u in sample_dirs(n, &mut rng, 8) {
            for t in [0.5, 2.0, 3.5] {
                let scaled: Vec<f64> = u.iter().map(|c| c * t).collect();
                let (a, b) = (f.eval(&scaled).unwrap(), t.powf(p) * f.eval(&u).unwrap());
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())));
            }
        }
    }

    /// lp_add is a commutative pointwise sum.
    #[test]
    fn lp_add_commutes(seed in any::<u64>()) {
        let (f, g) = (random_lp(seed, 3, 2.5), random_lp(seed ^ 99, 3, 2.5));
        let fg = f.lp_add(&g).unwrap();
        let gf = g.lp_add(&f).unwrap();
        for u in direction_sample(3, 20) {
            let direct = f.eval(&u).unwrap() + g.eval(&u).unwrap();
            prop_assert!((fg.eval(&u).unwrap() - direct).abs() <= 1e-12 * (1.0 + direct));
            prop_assert!((gf.eval(&u).unwrap() - direct).abs() <= 1e-12 * (1.0 + direct));
        }
    }

    /// compose_inverse realizes f(phi^{-1} u).
    #[test]
    fn compose_is_pullback(seed in any::<u64>()) {
        let n = 3;
        let f = random_lp(seed, n, 2.0);
        let mut rng = case_rng(seed, 5);
        let map = random_unimodular(n, &mut rng);
        let g = f.compose_inverse(&map).unwrap();
        let inv = map.inverse().unwrap();
        for u in direction_sample(n, 20) {
            let (a, b) = (g.eval(&u).unwrap(), f.eval(&inv.apply_f64(&u)).unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs())));
        }
    }

    /// eval^{1/p} is sublinear, as a support function must be.
    #[test]
    fn support_power_is_sublinear(seed in any::<u64>(), p in 1.5f64..3.0) {
        let n = 3;
        let mut rng = case_rng(seed, 6);
        let poly = random_polytope(n, &mut rng, true).unwrap();
        let f = ops::pi_plus(&poly, p).unwrap();
        let dirs = sample_dirs(n, &mut rng, 10);
        for u in &dirs {
            for v in dirs.iter().take(6) {
                let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
                let lhs = f.eval(&sum).unwrap().powf(1.0 / p);
                let rhs = f.eval(u).unwrap().powf(1.0 / p) + f.eval(v).unwrap().powf(1.0 / p);
                prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
            }
        }
    }

    /// The two signed parts of the deltas never share a canonical ridge:
    /// cancellation in the constructor is complete.
    #[test]
    fn delta_parts_are_disjoint(seed in any::<u64>()) {
        let n = 3;
        let mut rng = case_rng(seed, 7);
        let poly = random_polytope(n, &mut rng, false).unwrap();
        for kind in [OperatorKind::DeltaPlus, OperatorKind::DeltaMinus] {
            let d = ops::apply(kind, &poly, 2.0).unwrap();
            for t in d.pos().terms() {
                for s in d.neg().terms() {
                    prop_assert!(!(t.dir == s.dir && t.sign == s.sign));
                }
            }
        }
    }

    /// Unimodular maps round-trip: det 1 and exact inverse.
    #[test]
    fn unimodular_is_invertible(seed in any::<u64>()) {
        let n = 3 + (seed % 3) as usize;
        let mut rng = case_rng(seed, 8);
        let map = random_unimodular(n, &mut rng);
        prop_assert_eq!(map.det(), &Rat::one());
        let prod = map.compose(&map.inverse().unwrap());
        let id = linalg::LinearMap::identity(n);
        prop_assert_eq!(prod.entries(), id.entries());
    }

    /// JSON round trips are lossless for polytopes.
    #[test]
    fn polytope_json_round_trip(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 9);
        let poly = random_polytope(3, &mut rng, seed % 2 == 0).unwrap();
        let back = Polytope::from_json(&poly.to_json()).unwrap();
        prop_assert_eq!(back.vertices(), poly.vertices());
        prop_assert_eq!(back.volume(), poly.volume());
    }
}

#[test]
fn triangle_inequality_reference_value() {
    // Anchor for the sublinearity test: on T^3 the support power at
    // e_1 + e_2 doubles the single-axis value for p = 2.
    let t3 = Polytope::standard_simplex(3).unwrap();
    let f = ops::pi_plus(&t3, 2.0).unwrap();
    let v = f.eval(&[1.0, 1.0, 0.0]).unwrap();
    assert!((v - 2.0 * rat_to_f64(&Rat::one())).abs() < 1e-12);
}
