//! Property-check harness: seeded generators for polytopes, cuts and
//! linear maps, plus one check per identity the operators satisfy
//! (valuation, inclusion-exclusion, contravariance, the GL(n) law,
//! homogeneity, the simplex functional equation, simplicity, the
//! simple-valuation decomposition and the classification round trip).
//!
//! Every identity is checked at the level of `h^p`, where the valuation
//! property is plain additivity. Residuals are relative: the defect is
//! divided by `1 + max |term value|` at the sampled direction. All case
//! streams are ChaCha8-seeded; the same seed yields the same reports.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, LinearMap};
use crate::lp::{LpFunction, LpTerm, SignedLpFunction};
use crate::ops::{self, OperatorKind};
use crate::polytope::{Hyperplane, Polytope};
use crate::rational::{format_rat, rat, ratio, Rat, Vector};

/// Operator hook used by the suites, so a corrupted operator can be
/// swapped in for the negative control.
pub type ApplyFn<'a> = &'a dyn Fn(OperatorKind, &Polytope, f64) -> Result<SignedLpFunction>;

const RETRIES: usize = 16;

/// Outcome of one check or one merged suite.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: usize,
    pub max_residual: f64,
    pub passed: bool,
    pub worst_case: serde_json::Value,
    #[serde(skip)]
    pub tolerance: f64,
}

impl CheckReport {
    pub fn single(name: &str, residual: f64, tol: f64, worst_case: serde_json::Value) -> Self {
        CheckReport {
            name: name.into(),
            cases: 1,
            max_residual: residual,
            passed: residual <= tol,
            worst_case,
            tolerance: tol,
        }
    }

    /// Merge case reports into one suite report; the worst case of the
    /// largest residual is kept.
    pub fn merge(name: &str, tol: f64, parts: &[CheckReport]) -> Self {
        let mut cases = 0;
        let mut max_residual = 0.0f64;
        let mut worst_case = serde_json::Value::Null;
        for part in parts {
            cases += part.cases;
            if part.max_residual >= max_residual || worst_case.is_null() {
                max_residual = part.max_residual;
                worst_case = part.worst_case.clone();
            }
        }
        CheckReport {
            name: name.into(),
            cases,
            max_residual,
            passed: max_residual <= tol,
            worst_case,
            tolerance: tol,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Suite parameters; `tol` of `None` uses each suite's own tolerance.
#[derive(Clone, Debug)]
pub struct Config {
    pub n: usize,
    pub p: f64,
    pub cases: usize,
    pub seed: u64,
    pub tol: Option<f64>,
}

// ---------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------

/// Per-case generator; `stream` separates independent case streams
/// derived from the same user seed.
pub fn case_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn small_rat(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rat {
    ratio(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

fn small_point(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector((0..n).map(|_| small_rat(rng, 4, 3)).collect())
}

/// Full-dimensional random polytope; with `contains_origin` the point
/// cloud is symmetrized, which puts the origin in the interior.
pub fn random_polytope(n: usize, rng: &mut ChaCha8Rng, contains_origin: bool) -> Result<Polytope> {
    for _ in 0..RETRIES {
        let mut pts = Vec::new();
        if contains_origin {
            let m = rng.gen_range(n + 2..=2 * n + 2);
            for _ in 0..m {
                let v = small_point(rng, n);
                pts.push(v.neg());
                pts.push(v);
            }
        } else {
            let m = rng.gen_range(2 * n..=4 * n);
            for _ in 0..m {
                pts.push(small_point(rng, n));
            }
        }
        let poly = Polytope::convex_hull(n, &pts)?;
        if poly.is_full_dim() && (!contains_origin || poly.contains_origin()) {
            return Ok(poly);
        }
    }
    Err(Error::GeneratorExhausted(RETRIES))
}

/// Full-dimensional polytope in the open positive orthant, so the
/// origin lies strictly outside.
pub fn random_origin_avoiding(n: usize, rng: &mut ChaCha8Rng) -> Result<Polytope> {
    for _ in 0..RETRIES {
        let m = rng.gen_range(2 * n..=4 * n);
        let pts: Vec<Vector> = (0..m)
            .map(|_| {
                Vector(
                    (0..n)
                        .map(|_| ratio(rng.gen_range(2..=9), rng.gen_range(1..=3)))
                        .collect(),
                )
            })
            .collect();
        let poly = Polytope::convex_hull(n, &pts)?;
        if poly.is_full_dim() {
            return Ok(poly);
        }
    }
    Err(Error::GeneratorExhausted(RETRIES))
}

/// Polytope of dimension exactly `d < n`. `origin_in_aff` keeps the
/// affine hull through the origin; `symmetric` additionally makes
/// `P = -P`, so the origin lies in (the relative interior of) `P`.
pub fn random_lowdim(
    n: usize,
    rng: &mut ChaCha8Rng,
    d: usize,
    origin_in_aff: bool,
    symmetric: bool,
) -> Result<Polytope> {
    assert!(d < n && (!symmetric || origin_in_aff));
    'retry: for _ in 0..RETRIES {
        // Random integer basis of a d-dimensional subspace.
        let basis: Vec<Vec<Rat>> = (0..d)
            .map(|_| (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect())
            .collect();
        if linalg::rank(&basis) != d {
            continue;
        }
        let shift: Vec<Rat> = if origin_in_aff {
            vec![Rat::zero(); n]
        } else {
            (0..n).map(|_| rat(rng.gen_range(-3..=3))).collect()
        };
        let m = d + 1 + rng.gen_range(1..=d + 2);
        let mut pts = Vec::new();
        for _ in 0..m {
            let coords: Vec<Rat> = (0..d).map(|_| small_rat(rng, 3, 2)).collect();
            let mut x = shift.clone();
            for (c, b) in coords.iter().zip(&basis) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            pts.push(Vector(x.clone()));
            if symmetric {
                pts.push(Vector(x.into_iter().map(|c| -c).collect()));
            }
        }
        let poly = Polytope::convex_hull(n, &pts)?;
        if poly.dim() != Some(d) {
            continue;
        }
        if !origin_in_aff {
            // The affine hull must miss the origin: the points must not
            // already span their difference space.
            let rows: Vec<Vec<Rat>> = poly.vertices().iter().map(|v| v.0.clone()).collect();
            let diffs: Vec<Vec<Rat>> = poly.vertices()[1..]
                .iter()
                .map(|v| v.sub(&poly.vertices()[0]).0)
                .collect();
            if linalg::rank(&rows) == linalg::rank(&diffs) {
                continue 'retry;
            }
        }
        return Ok(poly);
    }
    Err(Error::GeneratorExhausted(RETRIES))
}

/// Product of 5..15 integer shears and even coordinate permutations;
/// the determinant is exactly one.
pub fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> LinearMap {
    let mut map = LinearMap::identity(n);
    let steps = rng.gen_range(5..=15);
    for _ in 0..steps {
        if rng.gen_range(0..4) == 0 {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let mut even = LinearMap::permutation(&perm);
            if even.det() != &Rat::one() {
                perm.swap(0, 1);
                even = LinearMap::permutation(&perm);
            }
            map = map.compose(&even);
        } else {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let mut c = rng.gen_range(-3i64..=3);
            if c == 0 {
                c = 1;
            }
            map = map.compose(&LinearMap::shear(n, i, j, rat(c)));
        }
    }
    debug_assert!(map.det() == &Rat::one());
    map
}

/// Random rational map with positive determinant: unimodular factors
/// around a positive diagonal.
pub fn random_gl_positive(n: usize, rng: &mut ChaCha8Rng) -> LinearMap {
    let diag: Vec<Rat> = (0..n)
        .map(|_| ratio(rng.gen_range(1..=4), rng.gen_range(1..=3)))
        .collect();
    random_unimodular(n, rng)
        .compose(&LinearMap::diagonal(&diag))
        .compose(&random_unimodular(n, rng))
}

/// Hyperplane that properly cuts `poly`: through the origin when asked
/// (the origin must then be interior), otherwise through a random point
/// between two vertices.
pub fn random_cut(poly: &Polytope, rng: &mut ChaCha8Rng, through_origin: bool) -> Result<Hyperplane> {
    let n = poly.n();
    for _ in 0..RETRIES {
        let normal = Vector((0..n).map(|_| rat(rng.gen_range(-3..=3))).collect());
        if normal.is_zero() {
            continue;
        }
        if through_origin {
            return Hyperplane::through_origin(normal);
        }
        let verts = poly.vertices();
        let a = rng.gen_range(0..verts.len());
        let b = rng.gen_range(0..verts.len());
        let t = ratio(rng.gen_range(1..=3), 4);
        let x = verts[a].add(&verts[b].sub(&verts[a]).scale(&t));
        return Hyperplane::new(normal.clone(), normal.dot(&x));
    }
    Err(Error::GeneratorExhausted(RETRIES))
}

/// Direction sample for residuals: all `±e_i`, the normalized
/// `±(e_i ± e_j)`, and `extra` random unit vectors from `rng`.
pub fn sample_dirs(n: usize, rng: &mut ChaCha8Rng, extra: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; n];
            u[i] = s;
            dirs.push(u);
        }
    }
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in i + 1..n {
            for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut u = vec![0.0; n];
                u[i] = a * inv;
                u[j] = b * inv;
                dirs.push(u);
            }
        }
    }
    while dirs.len() < 2 * n + 2 * n * (n - 1) + extra {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-3 {
            dirs.push(u.into_iter().map(|c| c / norm).collect());
        }
    }
    dirs
}

// ---------------------------------------------------------------------
// Residual plumbing
// ---------------------------------------------------------------------

/// Max over dirs of `|Σ c_i f_i(u)|`, relative to `1 + max |c_i f_i(u)|`.
fn linear_residual(
    parts: &[(f64, &SignedLpFunction)],
    dirs: &[Vec<f64>],
) -> Result<(f64, Vec<f64>)> {
    let mut worst = 0.0f64;
    let mut worst_dir = Vec::new();
    for u in dirs {
        let mut total = 0.0;
        let mut scale = 0.0f64;
        for (c, f) in parts {
            let v = c * f.s_eval(u)?;
            total += v;
            scale = scale.max(v.abs());
        }
        let res = total.abs() / (1.0 + scale);
        if res >= worst {
            worst = res;
            worst_dir = u.clone();
        }
    }
    Ok((worst, worst_dir))
}

fn hyperplane_json(h: &Hyperplane) -> serde_json::Value {
    serde_json::json!({
        "normal": h.normal.0.iter().map(format_rat).collect::<Vec<_>>(),
        "offset": format_rat(&h.offset),
    })
}

fn map_json(m: &LinearMap) -> serde_json::Value {
    serde_json::json!(m
        .entries()
        .iter()
        .map(|row| row.iter().map(format_rat).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

/// Dyadic rational closest to the real n-th root of `x`; exact enough
/// that the scaling error stays far below every suite tolerance.
fn rational_root(x: f64, n: usize) -> Rat {
    Rat::from_float(x.powf(1.0 / n as f64)).expect("finite root")
}

// ---------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------

pub fn check_valuation(
    kind: OperatorKind,
    poly: &Polytope,
    h: &Hyperplane,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    check_valuation_with(&ops::apply, kind, poly, h, p, tol)
}

pub fn check_valuation_with(
    apply: ApplyFn,
    kind: OperatorKind,
    poly: &Polytope,
    h: &Hyperplane,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    let (plus, minus, section) = poly.halfspace_cut(h)?;
    let on_p = apply(kind, poly, p)?;
    let on_sec = apply(kind, &section, p)?;
    let on_plus = apply(kind, &plus, p)?;
    let on_minus = apply(kind, &minus, p)?;
    let mut rng = case_rng(0xd1e5, poly.vertices().len() as u64);
    let dirs = sample_dirs(poly.n(), &mut rng, 24);
    let (res, dir) = linear_residual(
        &[(1.0, &on_p), (1.0, &on_sec), (-1.0, &on_plus), (-1.0, &on_minus)],
        &dirs,
    )?;
    Ok(CheckReport::single(
        &format!("valuation/{}", kind.name()),
        res,
        tol,
        serde_json::json!({
            "polytope": poly.to_json(),
            "hyperplane": hyperplane_json(h),
            "direction": dir,
        }),
    ))
}

/// Three slabs of `poly` between two parallel cuts; the pairwise
/// intersections are the two sections, deeper intersections are empty.
pub fn check_inclusion_exclusion(
    kind: OperatorKind,
    poly: &Polytope,
    h1: &Hyperplane,
    h2: &Hyperplane,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    check_inclusion_exclusion_with(&ops::apply, kind, poly, h1, h2, p, tol)
}

pub fn check_inclusion_exclusion_with(
    apply: ApplyFn,
    kind: OperatorKind,
    poly: &Polytope,
    h1: &Hyperplane,
    h2: &Hyperplane,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    if h1.normal != h2.normal || h1.offset >= h2.offset {
        return Err(Error::Precondition(
            "inclusion-exclusion expects parallel cuts with increasing offsets".into(),
        ));
    }
    let (mid_hi, low, sec1) = poly.halfspace_cut(h1)?;
    let (high, mid, sec2) = mid_hi.halfspace_cut(h2)?;
    // Union convexity guard: the slab volumes must add back up exactly.
    let vol_sum = low.volume() + mid.volume() + high.volume();
    if vol_sum != poly.volume() {
        return Err(Error::Precondition("slab volumes do not sum to the whole".into()));
    }
    let parts = [
        (-1.0, apply(kind, poly, p)?),
        (1.0, apply(kind, &low, p)?),
        (1.0, apply(kind, &mid, p)?),
        (1.0, apply(kind, &high, p)?),
        (-1.0, apply(kind, &sec1, p)?),
        (-1.0, apply(kind, &sec2, p)?),
    ];
    let refs: Vec<(f64, &SignedLpFunction)> = parts.iter().map(|(c, f)| (*c, f)).collect();
    let mut rng = case_rng(0x1e8c, poly.vertices().len() as u64);
    let dirs = sample_dirs(poly.n(), &mut rng, 24);
    let (res, dir) = linear_residual(&refs, &dirs)?;
    Ok(CheckReport::single(
        &format!("inclusion-exclusion/{}", kind.name()),
        res,
        tol,
        serde_json::json!({
            "polytope": poly.to_json(),
            "cuts": [hyperplane_json(h1), hyperplane_json(h2)],
            "direction": dir,
        }),
    ))
}

pub fn check_contravariance(
    kind: OperatorKind,
    poly: &Polytope,
    map: &LinearMap,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    check_contravariance_with(&ops::apply, kind, poly, map, p, tol)
}

pub fn check_contravariance_with(
    apply: ApplyFn,
    kind: OperatorKind,
    poly: &Polytope,
    map: &LinearMap,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    if map.det() != &Rat::one() {
        return Err(Error::Precondition("contravariance needs det = 1".into()));
    }
    let on_image = apply(kind, &poly.apply_map(map)?, p)?;
    let on_poly = apply(kind, poly, p)?;
    let inv = map.inverse()?;
    let mut rng = case_rng(0xc0de, poly.vertices().len() as u64);
    let mut worst = 0.0f64;
    let mut worst_dir = Vec::new();
    for u in sample_dirs(poly.n(), &mut rng, 24) {
        let lhs = on_image.s_eval(&u)?;
        let rhs = on_poly.s_eval(&inv.apply_f64(&u))?;
        let res = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
        if res >= worst {
            worst = res;
            worst_dir = u;
        }
    }
    Ok(CheckReport::single(
        &format!("contravariance/{}", kind.name()),
        worst,
        tol,
        serde_json::json!({
            "polytope": poly.to_json(),
            "map": map_json(map),
            "direction": worst_dir,
        }),
    ))
}

/// `Φ(φP)(u) = det(φ)^{p/n} Φ(det(φ)^{1/n} P)(φ^{-1}u)` for
/// `det φ > 0`; the real n-th root is replaced by a dyadic rational.
pub fn check_gl_law(
    kind: OperatorKind,
    poly: &Polytope,
    map: &LinearMap,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    check_gl_law_with(&ops::apply, kind, poly, map, p, tol)
}

pub fn check_gl_law_with(
    apply: ApplyFn,
    kind: OperatorKind,
    poly: &Polytope,
    map: &LinearMap,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    if !map.det().is_positive() {
        return Err(Error::Precondition("gl law needs det > 0".into()));
    }
    let n = poly.n();
    let det = map.det().to_f64().ok_or(Error::Parse("det overflow".into()))?;
    let root = rational_root(det, n);
    let on_image = apply(kind, &poly.apply_map(map)?, p)?;
    let on_scaled = apply(kind, &poly.scale(&root)?, p)?;
    let factor = det.powf(p / n as f64);
    let inv = map.inverse()?;
    let mut rng = case_rng(0x91aa, poly.vertices().len() as u64);
    let mut worst = 0.0f64;
    let mut worst_dir = Vec::new();
    for u in sample_dirs(n, &mut rng, 24) {
        let lhs = on_image.s_eval(&u)?;
        let rhs = factor * on_scaled.s_eval(&inv.apply_f64(&u))?;
        let res = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
        if res >= worst {
            worst = res;
            worst_dir = u;
        }
    }
    Ok(CheckReport::single(
        &format!("gl-law/{}", kind.name()),
        worst,
        tol,
        serde_json::json!({
            "polytope": poly.to_json(),
            "map": map_json(map),
            "direction": worst_dir,
        }),
    ))
}

/// `Φ(sT^n)(±e_i)` against `s^{n-p}·Φ(T^n)(±e_i)` and the rest of the
/// direction sample.
pub fn check_homogeneity(
    kind: OperatorKind,
    n: usize,
    p: f64,
    s_values: &[Rat],
    tol: f64,
) -> Result<CheckReport> {
    check_homogeneity_with(&ops::apply, kind, n, p, s_values, tol)
}

pub fn check_homogeneity_with(
    apply: ApplyFn,
    kind: OperatorKind,
    n: usize,
    p: f64,
    s_values: &[Rat],
    tol: f64,
) -> Result<CheckReport> {
    let tn = Polytope::standard_simplex(n)?;
    let base = apply(kind, &tn, p)?;
    let mut rng = case_rng(0x803e, n as u64);
    let dirs = sample_dirs(n, &mut rng, 16);
    let mut parts = Vec::new();
    for s in s_values {
        let scaled = apply(kind, &tn.scale(s)?, p)?;
        let sf = s.to_f64().ok_or(Error::Parse("scale overflow".into()))?;
        let factor = sf.powf(n as f64 - p);
        let mut worst = 0.0f64;
        let mut worst_dir = Vec::new();
        for u in &dirs {
            let lhs = scaled.s_eval(u)?;
            let rhs = factor * base.s_eval(u)?;
            let res = (lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs()));
            if res >= worst {
                worst = res;
                worst_dir = u.clone();
            }
        }
        parts.push(CheckReport::single(
            "case",
            worst,
            tol,
            serde_json::json!({ "s": format_rat(s), "direction": worst_dir }),
        ));
    }
    Ok(CheckReport::merge(
        &format!("homogeneity/{}", kind.name()),
        tol,
        &parts,
    ))
}

fn phi_lambda(n: usize, lam: &Rat) -> LinearMap {
    let mut e = LinearMap::identity(n).entries().to_vec();
    e[0][1] = Rat::one() - lam;
    e[1][1] = lam.clone();
    LinearMap::new(e).expect("square")
}

fn psi_lambda(n: usize, lam: &Rat) -> LinearMap {
    let mut e = LinearMap::identity(n).entries().to_vec();
    e[0][0] = Rat::one() - lam;
    e[1][0] = lam.clone();
    LinearMap::new(e).expect("square")
}

/// The exact split behind the functional equation:
/// `T^n ∩ H_λ^+ = φ_λ T^n` and `T^n ∩ H_λ^- = ψ_λ T^n`, compared by
/// vertex set.
pub fn exact_split_identity(n: usize, lam: &Rat) -> Result<bool> {
    let tn = Polytope::standard_simplex(n)?;
    let mut normal = vec![Rat::zero(); n];
    normal[0] = lam.clone();
    normal[1] = -(Rat::one() - lam);
    let h = Hyperplane::through_origin(Vector(normal))?;
    let (plus, minus, _) = tn.halfspace_cut(&h)?;
    let phi_tn = tn.apply_map(&phi_lambda(n, lam))?;
    let psi_tn = tn.apply_map(&psi_lambda(n, lam))?;
    Ok(plus.vertices() == phi_tn.vertices() && minus.vertices() == psi_tn.vertices())
}

/// `Φ(sT^n)(x) = λ^{p/n} Φ(λ^{1/n}sT^n)(φ_λ^{-1}x)
///              + (1-λ)^{p/n} Φ((1-λ)^{1/n}sT^n)(ψ_λ^{-1}x)`.
pub fn check_functional_equation(
    kind: OperatorKind,
    n: usize,
    p: f64,
    s: &Rat,
    lam: &Rat,
    tol: f64,
) -> Result<CheckReport> {
    check_functional_equation_with(&ops::apply, kind, n, p, s, lam, tol)
}

pub fn check_functional_equation_with(
    apply: ApplyFn,
    kind: OperatorKind,
    n: usize,
    p: f64,
    s: &Rat,
    lam: &Rat,
    tol: f64,
) -> Result<CheckReport> {
    if !lam.is_positive() || lam >= &Rat::one() {
        return Err(Error::Precondition("lambda must lie in (0,1)".into()));
    }
    let tn = Polytope::standard_simplex(n)?;
    let lam_f = lam.to_f64().ok_or(Error::Parse("lambda overflow".into()))?;
    let lhs = apply(kind, &tn.scale(s)?, p)?;
    let f1 = apply(kind, &tn.scale(&(rational_root(lam_f, n) * s))?, p)?;
    let f2 = apply(kind, &tn.scale(&(rational_root(1.0 - lam_f, n) * s))?, p)?;
    let c1 = lam_f.powf(p / n as f64);
    let c2 = (1.0 - lam_f).powf(p / n as f64);
    let phi_inv = phi_lambda(n, lam).inverse()?;
    let psi_inv = psi_lambda(n, lam).inverse()?;
    let mut rng = case_rng(0xfe0a, n as u64);
    let mut worst = 0.0f64;
    let mut worst_dir = Vec::new();
    for x in sample_dirs(n, &mut rng, 20) {
        let l = lhs.s_eval(&x)?;
        let r1 = c1 * f1.s_eval(&phi_inv.apply_f64(&x))?;
        let r2 = c2 * f2.s_eval(&psi_inv.apply_f64(&x))?;
        let res = (l - r1 - r2).abs() / (1.0 + l.abs().max(r1.abs()).max(r2.abs()));
        if res >= worst {
            worst = res;
            worst_dir = x;
        }
    }
    Ok(CheckReport::single(
        &format!("functional-eq/{}", kind.name()),
        worst,
        tol,
        serde_json::json!({
            "s": format_rat(s),
            "lambda": format_rat(lam),
            "direction": worst_dir,
        }),
    ))
}

/// Simplicity is exact: the operator on a lower-dimensional input must
/// produce an empty term list (residual 1 when it does not).
pub fn check_simplicity(kind: OperatorKind, poly: &Polytope, p: f64) -> Result<CheckReport> {
    check_simplicity_with(&ops::apply, kind, poly, p)
}

pub fn check_simplicity_with(
    apply: ApplyFn,
    kind: OperatorKind,
    poly: &Polytope,
    p: f64,
) -> Result<CheckReport> {
    if poly.is_full_dim() {
        return Err(Error::Precondition("simplicity check needs dim < n".into()));
    }
    let f = apply(kind, poly, p)?;
    let res = if f.is_zero() { 0.0 } else { 1.0 };
    Ok(CheckReport::single(
        &format!("simplicity/{}", kind.name()),
        res,
        0.0,
        serde_json::json!({ "polytope": poly.to_json(), "dim": poly.dim() }),
    ))
}

/// `Φ(P) = Φ(P_o) − Σ_i Φ((F_i)_o)` over the facets facing the origin,
/// for the simple signed valuations.
pub fn check_simple_decomposition(
    kind: OperatorKind,
    poly: &Polytope,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    check_simple_decomposition_with(&ops::apply, kind, poly, p, tol)
}

pub fn check_simple_decomposition_with(
    apply: ApplyFn,
    kind: OperatorKind,
    poly: &Polytope,
    p: f64,
    tol: f64,
) -> Result<CheckReport> {
    if !matches!(kind, OperatorKind::DeltaPlus | OperatorKind::DeltaMinus) {
        return Err(Error::Precondition(
            "the decomposition holds for the simple operators delta-plus/delta-minus".into(),
        ));
    }
    if !poly.is_full_dim() {
        return Err(Error::Precondition("decomposition check needs dim = n".into()));
    }
    let n = poly.n();
    let mut parts = vec![(1.0, apply(kind, poly, p)?), (-1.0, apply(kind, &poly.conv_origin()?, p)?)];
    for facet in poly.facets_facing_origin() {
        let mut pts: Vec<Vector> = facet
            .vertex_ids
            .iter()
            .map(|&i| poly.vertices()[i].clone())
            .collect();
        pts.push(Vector::zero(n));
        let pyramid = Polytope::convex_hull(n, &pts)?;
        parts.push((1.0, apply(kind, &pyramid, p)?));
    }
    let refs: Vec<(f64, &SignedLpFunction)> = parts.iter().map(|(c, f)| (*c, f)).collect();
    let mut rng = case_rng(0x5de0, poly.vertices().len() as u64);
    let dirs = sample_dirs(n, &mut rng, 24);
    let (res, dir) = linear_residual(&refs, &dirs)?;
    Ok(CheckReport::single(
        &format!("simple-decomposition/{}", kind.name()),
        res,
        tol,
        serde_json::json!({ "polytope": poly.to_json(), "direction": dir }),
    ))
}

/// Round trip through the classification: fit the four constants of
/// `Combination(c)` from the probe simplices, then compare the refit
/// operator against the original on random polytopes. The functional
/// agreement (tolerance ten times looser) is folded into the residual.
pub fn check_classification_roundtrip(
    n: usize,
    p: f64,
    c: [f64; 4],
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "classification requires n >= 3, got {n}"
        )));
    }
    let original = OperatorKind::Combination(c[0], c[1], c[2], c[3]);
    let d = ops::fit_constants(|poly, p| ops::apply(original, poly, p), n, p)?;
    let fit_res = c
        .iter()
        .zip(&d)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    let refit = OperatorKind::Combination(d[0], d[1], d[2], d[3]);
    let mut rng = case_rng(seed, 0xc1a5);
    let mut agree = 0.0f64;
    let mut worst_poly = serde_json::Value::Null;
    for i in 0..20 {
        let poly = random_polytope(n, &mut rng, i % 2 == 0)?;
        let f = ops::apply(original, &poly, p)?;
        let g = ops::apply(refit, &poly, p)?;
        let dirs = sample_dirs(n, &mut rng, 12);
        for u in &dirs {
            let (a, b) = (f.s_eval(u)?, g.s_eval(u)?);
            let res = (a - b).abs() / (1.0 + a.abs().max(b.abs()));
            if res >= agree {
                agree = res;
                worst_poly = poly.to_json();
            }
        }
    }
    let res = fit_res.max(agree / 10.0);
    Ok(CheckReport::single(
        "classification",
        res,
        tol,
        serde_json::json!({ "constants": c, "fitted": d, "worst_polytope": worst_poly }),
    ))
}

// ---------------------------------------------------------------------
// Corrupted operator (negative control)
// ---------------------------------------------------------------------

/// Scales the single largest coefficient of the output by `1 + 1e-3`.
/// The damage depends on which facet class dominates, so it cannot hide
/// inside the valuation or contravariance identities.
pub fn corrupted_apply(kind: OperatorKind, poly: &Polytope, p: f64) -> Result<SignedLpFunction> {
    let f = ops::apply(kind, poly, p)?;
    let max_pos = f.pos().terms().iter().map(|t| t.coef).fold(0.0f64, f64::max);
    let max_neg = f.neg().terms().iter().map(|t| t.coef).fold(0.0f64, f64::max);
    if max_pos == 0.0 && max_neg == 0.0 {
        return Ok(f);
    }
    let bump = |g: &LpFunction, target: f64| -> Result<LpFunction> {
        let mut done = false;
        let terms: Vec<LpTerm> = g
            .terms()
            .iter()
            .map(|t| {
                let mut t = t.clone();
                if !done && t.coef == target {
                    t.coef *= 1.0 + 1e-3;
                    done = true;
                }
                t
            })
            .collect();
        LpFunction::new(g.p(), g.n(), terms)
    };
    if max_pos >= max_neg {
        SignedLpFunction::new(bump(f.pos(), max_pos)?, f.neg().clone())
    } else {
        SignedLpFunction::new(f.pos().clone(), bump(f.neg(), max_neg)?)
    }
}

// ---------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------

pub const SUITES: [&str; 9] = [
    "valuation",
    "inclusion-exclusion",
    "contravariance",
    "gl-law",
    "homogeneity",
    "functional-eq",
    "simplicity",
    "simple-decomposition",
    "classification",
];

fn operator_cases(kind: OperatorKind) -> bool {
    kind.needs_origin()
}

fn suite_valuation(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-8);
    let mut reports = Vec::new();
    for kind in OperatorKind::ALL_CONCRETE {
        let origin = operator_cases(kind);
        let mut parts = Vec::new();
        for i in 0..cfg.cases {
            let mut rng = case_rng(cfg.seed, 0x7a10 + i as u64);
            let poly = random_polytope(cfg.n, &mut rng, origin || i % 2 == 0)?;
            let h = random_cut(&poly, &mut rng, origin)?;
            parts.push(check_valuation_with(apply, kind, &poly, &h, cfg.p, tol)?);
        }
        reports.push(CheckReport::merge(
            &format!("valuation/{}", kind.name()),
            tol,
            &parts,
        ));
    }
    Ok(reports)
}

fn suite_inclusion_exclusion(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-8);
    let kinds = [
        OperatorKind::PiPlusPos,
        OperatorKind::PiMinusPos,
        OperatorKind::PiPlusNeg,
        OperatorKind::PiMinusNeg,
        OperatorKind::DeltaPlus,
        OperatorKind::DeltaMinus,
    ];
    let mut reports = Vec::new();
    for kind in kinds {
        let mut parts = Vec::new();
        for i in 0..cfg.cases {
            let mut rng = case_rng(cfg.seed, 0x1ec0 + i as u64);
            let poly = random_polytope(cfg.n, &mut rng, i % 2 == 0)?;
            // Two parallel cuts strictly between the support extremes.
            let normal = loop {
                let v = Vector((0..cfg.n).map(|_| rat(rng.gen_range(-3..=3))).collect());
                if !v.is_zero() {
                    break v;
                }
            };
            let lo = poly.vertices().iter().map(|v| v.dot(&normal)).min().unwrap();
            let hi = poly.vertices().iter().map(|v| v.dot(&normal)).max().unwrap();
            if lo == hi {
                continue;
            }
            let width = &hi - &lo;
            let t1 = &lo + &width * ratio(1, 3);
            let t2 = &lo + &width * ratio(2, 3);
            let h1 = Hyperplane::new(normal.clone(), t1)?;
            let h2 = Hyperplane::new(normal, t2)?;
            parts.push(check_inclusion_exclusion_with(
                apply, kind, &poly, &h1, &h2, cfg.p, tol,
            )?);
        }
        reports.push(CheckReport::merge(
            &format!("inclusion-exclusion/{}", kind.name()),
            tol,
            &parts,
        ));
    }
    Ok(reports)
}

fn suite_contravariance(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-8);
    let mut reports = Vec::new();
    for kind in OperatorKind::ALL_CONCRETE {
        let origin = operator_cases(kind);
        let mut parts = Vec::new();
        for i in 0..cfg.cases {
            let mut rng = case_rng(cfg.seed, 0xc0a0 + i as u64);
            let poly = random_polytope(cfg.n, &mut rng, origin || i % 2 == 0)?;
            let map = random_unimodular(cfg.n, &mut rng);
            parts.push(check_contravariance_with(apply, kind, &poly, &map, cfg.p, tol)?);
        }
        reports.push(CheckReport::merge(
            &format!("contravariance/{}", kind.name()),
            tol,
            &parts,
        ));
    }
    Ok(reports)
}

fn suite_gl_law(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-7);
    let mut reports = Vec::new();
    for kind in OperatorKind::ALL_CONCRETE {
        let origin = operator_cases(kind);
        let mut parts = Vec::new();
        for i in 0..cfg.cases {
            let mut rng = case_rng(cfg.seed, 0x91a0 + i as u64);
            let poly = random_polytope(cfg.n, &mut rng, origin || i % 2 == 0)?;
            let map = random_gl_positive(cfg.n, &mut rng);
            parts.push(check_gl_law_with(apply, kind, &poly, &map, cfg.p, tol)?);
        }
        reports.push(CheckReport::merge(
            &format!("gl-law/{}", kind.name()),
            tol,
            &parts,
        ));
    }
    Ok(reports)
}

fn suite_homogeneity(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-9);
    let s_values = [ratio(1, 2), rat(2), rat(3)];
    OperatorKind::ALL_CONCRETE
        .iter()
        .map(|&kind| check_homogeneity_with(apply, kind, cfg.n, cfg.p, &s_values, tol))
        .collect()
}

fn suite_functional_eq(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-8);
    let lambdas = [ratio(1, 4), ratio(1, 3), ratio(1, 2), ratio(2, 3)];
    let scales = [rat(1), rat(2)];
    let mut reports = Vec::new();
    for kind in OperatorKind::ALL_CONCRETE {
        let mut parts = Vec::new();
        for lam in &lambdas {
            if !exact_split_identity(cfg.n, lam)? {
                parts.push(CheckReport::single(
                    "exact-split",
                    1.0,
                    tol,
                    serde_json::json!({ "lambda": format_rat(lam) }),
                ));
            }
            for s in &scales {
                parts.push(check_functional_equation_with(
                    apply, kind, cfg.n, cfg.p, s, lam, tol,
                )?);
            }
        }
        reports.push(CheckReport::merge(
            &format!("functional-eq/{}", kind.name()),
            tol,
            &parts,
        ));
    }
    Ok(reports)
}

fn suite_simplicity(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let n = cfg.n;
    let mut reports = Vec::new();
    for kind in OperatorKind::ALL_CONCRETE {
        let origin = operator_cases(kind);
        let extended = matches!(
            kind,
            OperatorKind::PiPlusPos
                | OperatorKind::PiMinusPos
                | OperatorKind::PiPlusNeg
                | OperatorKind::PiMinusNeg
        );
        let mut parts = Vec::new();
        for i in 0..cfg.cases {
            let mut rng = case_rng(cfg.seed, 0x51e0 + i as u64);
            let poly = if origin {
                // Domain of pi-plus/pi-minus: the polytope must contain o.
                let d = rng.gen_range(1..n);
                random_lowdim(n, &mut rng, d, true, true)?
            } else if extended {
                // Zero is only guaranteed below codimension one, or on
                // hyperplane slices through the origin.
                if i % 2 == 0 && n >= 3 {
                    let d = rng.gen_range(1..=n - 2);
                    let in_aff = rng.gen_bool(0.5);
                    random_lowdim(n, &mut rng, d, in_aff, false)?
                } else {
                    random_lowdim(n, &mut rng, n - 1, true, false)?
                }
            } else {
                // The signed differences are simple on everything.
                let d = rng.gen_range(1..n);
                let in_aff = rng.gen_bool(0.5);
                random_lowdim(n, &mut rng, d, in_aff, false)?
            };
            parts.push(check_simplicity_with(apply, kind, &poly, cfg.p)?);
        }
        reports.push(CheckReport::merge(
            &format!("simplicity/{}", kind.name()),
            0.0,
            &parts,
        ));
    }
    Ok(reports)
}

fn suite_simple_decomposition(cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-8);
    let mut reports = Vec::new();
    for kind in [OperatorKind::DeltaPlus, OperatorKind::DeltaMinus] {
        let mut parts = Vec::new();
        for i in 0..cfg.cases {
            let mut rng = case_rng(cfg.seed, 0x5d00 + i as u64);
            let poly = random_origin_avoiding(cfg.n, &mut rng)?;
            parts.push(check_simple_decomposition_with(apply, kind, &poly, cfg.p, tol)?);
        }
        reports.push(CheckReport::merge(
            &format!("simple-decomposition/{}", kind.name()),
            tol,
            &parts,
        ));
    }
    Ok(reports)
}

fn suite_classification(cfg: &Config) -> Result<Vec<CheckReport>> {
    let tol = cfg.tol.unwrap_or(1e-9);
    let mut parts = Vec::new();
    for i in 0..cfg.cases {
        let mut rng = case_rng(cfg.seed, 0xc1a0 + i as u64);
        let c = [
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
            rng.gen_range(0.0..3.0),
        ];
        parts.push(check_classification_roundtrip(
            cfg.n,
            cfg.p,
            c,
            cfg.seed ^ i as u64,
            tol,
        )?);
    }
    Ok(vec![CheckReport::merge("classification", tol, &parts)])
}

pub fn run_suite(name: &str, cfg: &Config) -> Result<Vec<CheckReport>> {
    run_suite_with(name, cfg, &ops::apply)
}

/// Suite dispatch with a swappable operator hook; `corrupted_apply`
/// here is the negative control.
pub fn run_suite_with(name: &str, cfg: &Config, apply: ApplyFn) -> Result<Vec<CheckReport>> {
    Ok(match name {
        "valuation" => suite_valuation(cfg, apply)?,
        "inclusion-exclusion" => suite_inclusion_exclusion(cfg, apply)?,
        "contravariance" => suite_contravariance(cfg, apply)?,
        "gl-law" => suite_gl_law(cfg, apply)?,
        "homogeneity" => suite_homogeneity(cfg, apply)?,
        "functional-eq" => suite_functional_eq(cfg, apply)?,
        "simplicity" => suite_simplicity(cfg, apply)?,
        "simple-decomposition" => suite_simple_decomposition(cfg, apply)?,
        "classification" => suite_classification(cfg)?,
        "all" => {
            let mut all = Vec::new();
            for suite in SUITES {
                all.extend(run_suite_with(suite, cfg, apply)?);
            }
            all
        }
        other => return Err(Error::Parse(format!("unknown suite {other:?}"))),
    })
}
