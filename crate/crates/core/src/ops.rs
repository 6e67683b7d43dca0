//! The asymmetric `L_p`-projection-body operators and their extensions.
//!
//! For a full-dimensional polytope the operators are sums over facets:
//! the facet with primitive outer normal `w`, exact support `a` and
//! `(n-1)`-volume `V` contributes `V·|h|^{1-p}·⟨v,·⟩±^p` with unit normal
//! `v = w/||w||`, `h = a/||w||`. Expressed on the primitive direction the
//! coefficient collapses to `(V·||w|| / ||w||²)·|a|^{1-p}`, whose first
//! factor is exact rational; the real power is the only float.
//!
//! An `(n-1)`-dimensional polytope is treated as its own two-sided facet
//! (normals `±w` of its affine hull, support `±c`), which is what makes
//! the extended operators valuations across lower-dimensional sections.
//! In particular they vanish automatically whenever `0 ∈ aff P`, and the
//! signed differences `Δ_p^±` cancel exactly on all lower-dimensional
//! inputs.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::hull;
use crate::lp::{LpFunction, LpTerm, SignedLpFunction, TermSign};
use crate::polytope::Polytope;
use crate::rational::{rat_to_f64, Int, Rat};

/// Which operator to apply; `Combination` carries the four nonnegative
/// constants of the classification (acting on `h^p`, i.e. the theorem's
/// `c_i^p`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorKind {
    PiPlus,
    PiMinus,
    PiPlusPos,
    PiMinusPos,
    PiPlusNeg,
    PiMinusNeg,
    DeltaPlus,
    DeltaMinus,
    Combination(f64, f64, f64, f64),
}

impl OperatorKind {
    pub const ALL_CONCRETE: [OperatorKind; 8] = [
        OperatorKind::PiPlus,
        OperatorKind::PiMinus,
        OperatorKind::PiPlusPos,
        OperatorKind::PiMinusPos,
        OperatorKind::PiPlusNeg,
        OperatorKind::PiMinusNeg,
        OperatorKind::DeltaPlus,
        OperatorKind::DeltaMinus,
    ];

    /// Operators defined only on polytopes containing the origin.
    pub fn needs_origin(&self) -> bool {
        matches!(self, OperatorKind::PiPlus | OperatorKind::PiMinus)
    }

    pub fn name(&self) -> String {
        match self {
            OperatorKind::PiPlus => "pi-plus".into(),
            OperatorKind::PiMinus => "pi-minus".into(),
            OperatorKind::PiPlusPos => "pi-plus-pos".into(),
            OperatorKind::PiMinusPos => "pi-minus-pos".into(),
            OperatorKind::PiPlusNeg => "pi-plus-neg".into(),
            OperatorKind::PiMinusNeg => "pi-minus-neg".into(),
            OperatorKind::DeltaPlus => "delta-plus".into(),
            OperatorKind::DeltaMinus => "delta-minus".into(),
            OperatorKind::Combination(a, b, c, d) => format!("combination({a},{b},{c},{d})"),
        }
    }

    pub fn parse(s: &str) -> Result<OperatorKind> {
        Ok(match s {
            "pi-plus" => OperatorKind::PiPlus,
            "pi-minus" => OperatorKind::PiMinus,
            "pi-plus-pos" => OperatorKind::PiPlusPos,
            "pi-minus-pos" => OperatorKind::PiMinusPos,
            "pi-plus-neg" => OperatorKind::PiPlusNeg,
            "pi-minus-neg" => OperatorKind::PiMinusNeg,
            "delta-plus" => OperatorKind::DeltaPlus,
            "delta-minus" => OperatorKind::DeltaMinus,
            other => return Err(Error::Parse(format!("unknown operator {other:?}"))),
        })
    }
}

/// Facet data feeding the operator sums: primitive direction, exact
/// support, `||w||²` and the exact `vol_{n-1}·||w||`.
struct FacetTerm {
    dir: Vec<Int>,
    support: Rat,
    sq_norm: Rat,
    vol_times_norm: Rat,
}

fn facet_terms(p: &Polytope) -> Vec<FacetTerm> {
    let n = p.n();
    match p.dim() {
        None => vec![],
        Some(d) if d == n => p
            .facets()
            .iter()
            .map(|f| FacetTerm {
                dir: f.direction.clone(),
                support: f.support.clone(),
                sq_norm: f.sq_norm.clone(),
                vol_times_norm: f.vol_times_norm.clone(),
            })
            .collect(),
        Some(d) if d + 1 == n => {
            // P is its own facet, seen from both sides of its affine hull.
            let (w, support, sq_norm, vol_times_norm) = p.hyperfacet_data().clone();
            vec![
                FacetTerm {
                    dir: w.clone(),
                    support: support.clone(),
                    sq_norm: sq_norm.clone(),
                    vol_times_norm: vol_times_norm.clone(),
                },
                FacetTerm {
                    dir: w.iter().map(|c| -c).collect(),
                    support: -support,
                    sq_norm,
                    vol_times_norm,
                },
            ]
        }
        Some(_) => vec![],
    }
}

/// Shared facet loop: sum over facets whose exact support sign matches,
/// with ridge sign `sign`. `positive` selects `a > 0` versus `a < 0`.
fn facet_sum(poly: &Polytope, p: f64, positive: bool, sign: TermSign) -> Result<LpFunction> {
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("p must be > 1, got {p}")));
    }
    let n = poly.n();
    let mut terms = Vec::new();
    for ft in facet_terms(poly) {
        let keep = if positive {
            ft.support.is_positive()
        } else {
            ft.support.is_negative()
        };
        if !keep {
            continue;
        }
        let exact = &ft.vol_times_norm / &ft.sq_norm;
        let coef = rat_to_f64(&exact) * rat_to_f64(&ft.support).abs().powf(1.0 - p);
        terms.push(LpTerm {
            dir: ft.dir,
            sign,
            coef,
        });
    }
    LpFunction::new(p, n, terms)
}

/// `h(Π_p^+ P, ·)^p` for `P ∋ o` full-dimensional; zero for lower
/// dimensions, error when the origin is missing.
pub fn pi_plus(poly: &Polytope, p: f64) -> Result<LpFunction> {
    pi_origin(poly, p, TermSign::Plus)
}

pub fn pi_minus(poly: &Polytope, p: f64) -> Result<LpFunction> {
    pi_origin(poly, p, TermSign::Minus)
}

fn pi_origin(poly: &Polytope, p: f64, sign: TermSign) -> Result<LpFunction> {
    if poly.is_empty() {
        return Ok(LpFunction::zero(p, poly.n()));
    }
    if !poly.contains_origin() {
        return Err(Error::Precondition(
            "pi-plus/pi-minus require the origin inside the polytope".into(),
        ));
    }
    if !poly.is_full_dim() {
        return Ok(LpFunction::zero(p, poly.n()));
    }
    // With o ∈ P, the facets avoiding the origin are exactly those with
    // support > 0, decided exactly.
    facet_sum(poly, p, true, sign)
}

/// `h(Π̃_p^+ P, ·)^p`: the extension summing over facets with `h > 0`.
pub fn pi_plus_pos(poly: &Polytope, p: f64) -> Result<LpFunction> {
    facet_sum(poly, p, true, TermSign::Plus)
}

pub fn pi_minus_pos(poly: &Polytope, p: f64) -> Result<LpFunction> {
    facet_sum(poly, p, true, TermSign::Minus)
}

/// Sums over facets with `h < 0`, weight `|h|^{1-p}`; vanishes on
/// polytopes containing the origin.
pub fn pi_plus_neg(poly: &Polytope, p: f64) -> Result<LpFunction> {
    facet_sum(poly, p, false, TermSign::Plus)
}

pub fn pi_minus_neg(poly: &Polytope, p: f64) -> Result<LpFunction> {
    facet_sum(poly, p, false, TermSign::Minus)
}

/// `Δ_p^+ P = h(Π̃_p^+P)^p − h(Π_p^{−,neg}P)^p`; simple by exact
/// term cancellation.
pub fn delta_plus(poly: &Polytope, p: f64) -> Result<SignedLpFunction> {
    SignedLpFunction::new(pi_plus_pos(poly, p)?, pi_minus_neg(poly, p)?)
}

pub fn delta_minus(poly: &Polytope, p: f64) -> Result<SignedLpFunction> {
    SignedLpFunction::new(pi_minus_pos(poly, p)?, pi_plus_neg(poly, p)?)
}

/// Apply any operator kind.
pub fn apply(kind: OperatorKind, poly: &Polytope, p: f64) -> Result<SignedLpFunction> {
    Ok(match kind {
        OperatorKind::PiPlus => SignedLpFunction::from_pos(pi_plus(poly, p)?),
        OperatorKind::PiMinus => SignedLpFunction::from_pos(pi_minus(poly, p)?),
        OperatorKind::PiPlusPos => SignedLpFunction::from_pos(pi_plus_pos(poly, p)?),
        OperatorKind::PiMinusPos => SignedLpFunction::from_pos(pi_minus_pos(poly, p)?),
        OperatorKind::PiPlusNeg => SignedLpFunction::from_pos(pi_plus_neg(poly, p)?),
        OperatorKind::PiMinusNeg => SignedLpFunction::from_pos(pi_minus_neg(poly, p)?),
        OperatorKind::DeltaPlus => delta_plus(poly, p)?,
        OperatorKind::DeltaMinus => delta_minus(poly, p)?,
        OperatorKind::Combination(c1, c2, c3, c4) => {
            if c1 < 0.0 || c2 < 0.0 || c3 < 0.0 || c4 < 0.0 {
                return Err(Error::Precondition(
                    "combination constants must be >= 0".into(),
                ));
            }
            let f = pi_plus_pos(poly, p)?
                .scaled(c1)?
                .lp_add(&pi_minus_pos(poly, p)?.scaled(c2)?)?
                .lp_add(&pi_plus_neg(poly, p)?.scaled(c3)?)?
                .lp_add(&pi_minus_neg(poly, p)?.scaled(c4)?)?;
            SignedLpFunction::from_pos(f)
        }
    })
}

/// Recover the four classification constants of a black-box operator from
/// its values on the two probe polytopes `T^n` and `e_1 + T^n`:
/// `d_1 = (n-1)!·Φ(T^n)(e_1)`, `d_2 = (n-1)!·Φ(T^n)(-e_1)`,
/// `d_3 = (n-1)!·Φ(e_1+T^n)(e_2-e_1)`, `d_4 = (n-1)!·Φ(e_1+T^n)(e_1-e_2)`.
/// No nonnegativity is enforced; the caller checks.
pub fn fit_constants<F>(mut phi: F, n: usize, p: f64) -> Result<[f64; 4]>
where
    F: FnMut(&Polytope, f64) -> Result<SignedLpFunction>,
{
    if n < 3 {
        return Err(Error::Precondition(format!(
            "classification probes require n >= 3, got {n}"
        )));
    }
    let tn = Polytope::standard_simplex(n)?;
    let shifted = Polytope::shifted_simplex(n)?;
    let fac = rat_to_f64(&Rat::from_integer(hull::factorial(n - 1)));

    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    let m_e1: Vec<f64> = e1.iter().map(|c| -c).collect();
    let mut e2_m_e1 = vec![0.0; n];
    e2_m_e1[0] = -1.0;
    e2_m_e1[1] = 1.0;
    let e1_m_e2: Vec<f64> = e2_m_e1.iter().map(|c| -c).collect();

    let on_tn = phi(&tn, p)?;
    let on_shifted = phi(&shifted, p)?;
    Ok([
        fac * on_tn.s_eval(&e1)?,
        fac * on_tn.s_eval(&m_e1)?,
        fac * on_shifted.s_eval(&e2_m_e1)?,
        fac * on_shifted.s_eval(&e1_m_e2)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, Vector};

    fn unit_cube(n: usize) -> Polytope {
        let mut pts = Vec::new();
        for mask in 0..(1u32 << n) {
            pts.push(Vector(
                (0..n).map(|i| rat(((mask >> i) & 1) as i64)).collect(),
            ));
        }
        Polytope::convex_hull(n, &pts).unwrap()
    }

    #[test]
    fn pi_plus_on_standard_simplex() {
        for n in [3usize, 4, 5] {
            for p in [1.5, 2.0, 2.5, 3.0] {
                let tn = Polytope::standard_simplex(n).unwrap();
                let f = pi_plus(&tn, p).unwrap();
                assert_eq!(f.terms().len(), 1);
                let expect = 1.0 / rat_to_f64(&Rat::from_integer(hull::factorial(n - 1)));
                for i in 0..n {
                    let mut u = vec![0.0; n];
                    u[i] = 1.0;
                    assert!((f.eval(&u).unwrap() - expect).abs() <= 1e-12 * expect);
                    u[i] = -1.0;
                    assert_eq!(f.eval(&u).unwrap(), 0.0);
                }
                let g = pi_minus(&tn, p).unwrap();
                let mut u = vec![0.0; n];
                u[0] = -1.0;
                assert!((g.eval(&u).unwrap() - expect).abs() <= 1e-12 * expect);
            }
        }
    }

    #[test]
    fn pi_plus_on_cube() {
        let c = unit_cube(3);
        let f = pi_plus(&c, 2.0).unwrap();
        // Three facets avoid the origin, each with h = 1, vol = 1.
        assert_eq!(f.terms().len(), 3);
        assert!((f.eval(&[1.0, 2.0, 0.0]).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn pi_plus_requires_origin() {
        let sh = Polytope::shifted_simplex(3).unwrap();
        assert!(matches!(pi_plus(&sh, 2.0), Err(Error::Precondition(_))));
        // Lower-dimensional but origin-containing: zero, not an error.
        let seg = Polytope::convex_hull(
            3,
            &[Vector::from_ints(&[-1, 0, 0]), Vector::from_ints(&[1, 0, 0])],
        )
        .unwrap();
        assert!(pi_plus(&seg, 2.0).unwrap().is_zero());
        assert!(pi_plus(&Polytope::empty(3), 2.0).unwrap().is_zero());
    }

    #[test]
    fn extensions_on_shifted_simplex() {
        let n = 3;
        let p = 2.0;
        let sh = Polytope::shifted_simplex(n).unwrap();
        let fac = 2.0; // (n-1)!

        let pos = pi_plus_pos(&sh, p).unwrap();
        assert_eq!(pos.terms().len(), 1);
        // 2^{1-p}/(n-1)! <(1,..,1), u>_+^p at u = (1,1,1): 9/4 for p = 2.
        assert!((pos.eval(&[1.0, 1.0, 1.0]).unwrap() - 9.0 / 4.0).abs() < 1e-12);
        assert_eq!(pos.eval(&[-1.0, 1.0, 0.0]).unwrap(), 0.0);

        // The eight probe values at ±(e_2 - e_1).
        let u = [-1.0, 1.0, 0.0];
        let mu = [1.0, -1.0, 0.0];
        let table = [
            (pi_plus_pos(&sh, p).unwrap(), 0.0, 0.0),
            (pi_minus_pos(&sh, p).unwrap(), 0.0, 0.0),
            (pi_plus_neg(&sh, p).unwrap(), 1.0 / fac, 0.0),
            (pi_minus_neg(&sh, p).unwrap(), 0.0, 1.0 / fac),
        ];
        for (f, at_u, at_mu) in &table {
            assert!((f.eval(&u).unwrap() - at_u).abs() < 1e-12);
            assert!((f.eval(&mu).unwrap() - at_mu).abs() < 1e-12);
        }
    }

    #[test]
    fn neg_extensions_vanish_with_origin() {
        let tn = Polytope::standard_simplex(4).unwrap();
        assert!(pi_plus_neg(&tn, 2.5).unwrap().is_zero());
        assert!(pi_minus_neg(&tn, 2.5).unwrap().is_zero());
        assert_eq!(
            pi_plus_pos(&tn, 2.5).unwrap(),
            pi_plus(&tn, 2.5).unwrap()
        );
    }

    #[test]
    fn probe_simplex_two_sided_facet() {
        // conv{e_1,..,e_n} has codimension 1 and misses the origin; the
        // positive side contributes exactly the T^n far-facet term.
        let pr = Polytope::probe_simplex(3).unwrap();
        let f = pi_plus_pos(&pr, 2.0).unwrap();
        assert_eq!(f.terms().len(), 1);
        assert!((f.eval(&[1.0, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-13);
        // And with 0 ∈ aff P everything vanishes.
        let seg = Polytope::convex_hull(
            3,
            &[
                Vector::from_ints(&[1, -1, 0]),
                Vector::from_ints(&[0, 1, -1]),
                Vector::from_ints(&[-1, 0, 1]),
            ],
        )
        .unwrap();
        assert_eq!(seg.dim(), Some(2));
        assert!(pi_plus_pos(&seg, 2.0).unwrap().is_zero());
    }

    #[test]
    fn delta_on_simplices() {
        let tn = Polytope::standard_simplex(3).unwrap();
        let d = delta_plus(&tn, 2.0).unwrap();
        assert!(d.neg().is_zero());
        assert_eq!(d.pos(), &pi_plus(&tn, 2.0).unwrap());

        let sh = Polytope::shifted_simplex(3).unwrap();
        let d = delta_plus(&sh, 2.0).unwrap();
        // 9/4 from the positive part minus 1/2 from <-e_1, u>_- = 1.
        assert!((d.s_eval(&[1.0, 1.0, 1.0]).unwrap() - 7.0 / 4.0).abs() < 1e-12);
        // Value 2^{1-p}/2 on the positive ridge, 1/2 weight on (-e_1,-).
        assert!((d.pos().terms()[0].coef - 0.25).abs() < 1e-14);
        assert!((d.neg().terms()[0].coef - 0.5).abs() < 1e-14);

        // Simple: lower-dimensional polytopes cancel exactly.
        let pr = Polytope::probe_simplex(3).unwrap();
        assert!(delta_plus(&pr, 2.0).unwrap().is_zero());
        assert!(delta_minus(&pr, 2.0).unwrap().is_zero());
    }

    #[test]
    fn combination_and_fit_round_trip() {
        let n = 3;
        let p = 2.0;
        let tn = Polytope::standard_simplex(n).unwrap();
        let comb = apply(OperatorKind::Combination(1.0, 0.0, 0.0, 0.0), &tn, p).unwrap();
        assert_eq!(comb.pos(), &pi_plus(&tn, p).unwrap());
        assert!(apply(OperatorKind::Combination(0.0, 0.0, 0.0, 0.0), &tn, p)
            .unwrap()
            .is_zero());

        let c = [0.3, 1.7, 0.2, 2.5];
        let d = fit_constants(
            |poly, p| apply(OperatorKind::Combination(c[0], c[1], c[2], c[3]), poly, p),
            n,
            p,
        )
        .unwrap();
        for (got, want) in d.iter().zip(&c) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let d = fit_constants(|poly, p| Ok(SignedLpFunction::zero(p, poly.n())), n, p).unwrap();
        assert_eq!(d, [0.0; 4]);
        let d = fit_constants(|poly, p| apply(OperatorKind::PiPlusPos, poly, p), n, p).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-12);
        assert!(d[1].abs() < 1e-15 && d[2].abs() < 1e-15 && d[3].abs() < 1e-15);
        assert!(fit_constants(|poly, p| apply(OperatorKind::PiPlus, poly, p), n, p).is_err());
    }

    #[test]
    fn combination_one_one_one_one_probe() {
        // Sum of the four Example values at e_2 - e_1 on e_1 + T^3.
        let sh = Polytope::shifted_simplex(3).unwrap();
        let comb = apply(OperatorKind::Combination(1.0, 1.0, 1.0, 1.0), &sh, 2.0).unwrap();
        assert!((comb.s_eval(&[-1.0, 1.0, 0.0]).unwrap() - 0.5).abs() < 1e-12);
    }
}
