//! Exact convex hull and facet enumeration.
//!
//! Facets are found by exhaustive supporting-hyperplane search: every
//! d-subset of the input spans a candidate hyperplane, and a candidate is a
//! facet exactly when all points lie weakly on one side. All decisions are
//! integer determinant signs after clearing denominators, so adversarial
//! rational inputs (cut products, shear images) need no epsilon anywhere.
//! At the input sizes this kernel is built for (tens of points, n <= 5) the
//! subset scan is fast and has no general-position assumptions to violate.

use std::collections::HashMap;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{primitive, Int, Rat, Vector};

/// A facet of a full-dimensional hull, everything exact except nothing.
#[derive(Clone, Debug)]
pub struct HullFacet {
    /// Primitive integer outer normal.
    pub direction: Vec<Int>,
    /// Exact support value `max <x, direction>` over the hull.
    pub support: Rat,
    /// `||direction||^2`.
    pub sq_norm: Rat,
    /// Hull vertex indices incident to the facet.
    pub vertex_ids: Vec<usize>,
    /// Fan triangulation of the facet into `(n-1)`-simplices, as lists of
    /// `n` hull vertex indices each.
    pub simplices: Vec<Vec<usize>>,
    /// `vol_{n-1}(F) * ||direction||`, exact.
    pub vol_times_norm: Rat,
}

#[derive(Clone, Debug)]
pub struct Hull {
    pub ambient: usize,
    /// Intrinsic dimension.
    pub dim: usize,
    /// Irredundant extreme points, lexicographically sorted.
    pub vertices: Vec<Vector>,
    /// Empty unless `dim == ambient`.
    pub facets: Vec<HullFacet>,
}

/// Convex hull of a nonempty point set in `R^n`.
pub fn hull(n: usize, points: &[Vector]) -> Result<Hull> {
    if points.is_empty() {
        return Err(Error::EmptyInput("convex hull of no points"));
    }
    for p in points {
        p.check_dim(n)?;
    }
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort();
    pts.dedup();

    let d = affine_rank(&pts);
    if d == 0 {
        return Ok(Hull {
            ambient: n,
            dim: 0,
            vertices: vec![pts[0].clone()],
            facets: vec![],
        });
    }
    if d < n {
        // Extreme points are preserved by the exact affine chart.
        let chart_pts = chart(&pts, d);
        let (vidx, _) = full_dim_hull(&chart_pts);
        let mut vertices: Vec<Vector> = vidx.into_iter().map(|i| pts[i].clone()).collect();
        vertices.sort();
        return Ok(Hull {
            ambient: n,
            dim: d,
            vertices,
            facets: vec![],
        });
    }

    let (vidx, raw_facets) = full_dim_hull(&pts);
    let mut vertices: Vec<Vector> = vidx.iter().map(|&i| pts[i].clone()).collect();
    vertices.sort();
    let vertex_pos: HashMap<&Vector, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut facets = Vec::with_capacity(raw_facets.len());
    for rf in raw_facets {
        let mut vertex_ids: Vec<usize> = rf
            .on_set
            .iter()
            .filter_map(|&i| vertex_pos.get(&pts[i]).copied())
            .collect();
        vertex_ids.sort_unstable();
        let fpts: Vec<Vector> = vertex_ids.iter().map(|&i| vertices[i].clone()).collect();
        let tri_local =
            triangulate_in_plane(&fpts, &rf.direction).expect("facet has affine rank n - 1");
        let simplices: Vec<Vec<usize>> = tri_local
            .into_iter()
            .map(|s| s.into_iter().map(|i| vertex_ids[i]).collect())
            .collect();
        let vol_times_norm = facet_vol_times_norm(&vertices, &simplices, &rf.direction);
        let sq_norm = Rat::from_integer(
            rf.direction
                .iter()
                .map(|c| c * c)
                .fold(Int::zero(), |acc, t| acc + t),
        );
        facets.push(HullFacet {
            direction: rf.direction,
            support: rf.support,
            sq_norm,
            vertex_ids,
            simplices,
            vol_times_norm,
        });
    }
    facets.sort_by(|a, b| (&a.direction, &a.support).cmp(&(&b.direction, &b.support)));
    Ok(Hull {
        ambient: n,
        dim: n,
        vertices,
        facets,
    })
}

/// Hull of a point set that is known to be exactly the vertex set of a
/// full-dimensional polytope whose facet hyperplanes all appear among
/// `hints` (primitive outer direction, support). Each hint must be a
/// supporting hyperplane of the point set; it is kept as a facet exactly
/// when its incident points have affine rank `n - 1`. This skips the
/// subset scan entirely, which is what makes hyperplane cuts cheap.
pub(crate) fn hull_from_hints(
    n: usize,
    points: &[Vector],
    hints: &[(Vec<Int>, Rat)],
) -> Result<Hull> {
    let mut vertices: Vec<Vector> = points.to_vec();
    vertices.sort();
    vertices.dedup();
    // Homogeneous integer forms so incidence is an exact integer test.
    let homo: Vec<(Vec<Int>, Int)> = vertices
        .iter()
        .map(|p| {
            let mut den = Int::from(1);
            for c in &p.0 {
                den = den.lcm(c.denom());
            }
            let nums = p.0.iter().map(|c| c.numer() * (&den / c.denom())).collect();
            (nums, den)
        })
        .collect();
    let mut facets = Vec::new();
    for (w, a) in hints {
        let on: Vec<usize> = homo
            .iter()
            .enumerate()
            .filter(|(_, (nums, den))| &dot_int(nums, w) * a.denom() == a.numer() * den)
            .map(|(i, _)| i)
            .collect();
        if on.len() < n {
            continue;
        }
        let fpts: Vec<Vector> = on.iter().map(|&i| vertices[i].clone()).collect();
        let tri = match triangulate_in_plane(&fpts, w) {
            Some(tri) => tri,
            None => continue,
        };
        let simplices: Vec<Vec<usize>> = tri
            .into_iter()
            .map(|s| s.into_iter().map(|i| on[i]).collect())
            .collect();
        let vol_times_norm = facet_vol_times_norm(&vertices, &simplices, w);
        let sq_norm = Rat::from_integer(
            w.iter().map(|c| c * c).fold(Int::zero(), |acc, t| acc + t),
        );
        facets.push(HullFacet {
            direction: w.clone(),
            support: a.clone(),
            sq_norm,
            vertex_ids: on,
            simplices,
            vol_times_norm,
        });
    }
    facets.sort_by(|a, b| (&a.direction, &a.support).cmp(&(&b.direction, &b.support)));
    Ok(Hull {
        ambient: n,
        dim: n,
        vertices,
        facets,
    })
}

struct RawFacet {
    direction: Vec<Int>,
    support: Rat,
    /// Indices (into the deduped point list) lying on the facet hyperplane.
    on_set: Vec<usize>,
}

/// Hull of a point set with full affine rank in its ambient space.
/// Returns (indices of extreme points, facets with on-sets).
fn full_dim_hull(pts: &[Vector]) -> (Vec<usize>, Vec<RawFacet>) {
    let m = pts[0].dim();

    if m == 1 {
        let imin = (0..pts.len()).min_by_key(|&i| &pts[i].0[0]).unwrap();
        let imax = (0..pts.len()).max_by_key(|&i| &pts[i].0[0]).unwrap();
        let facets = vec![
            RawFacet {
                direction: vec![Int::from(1)],
                support: pts[imax].0[0].clone(),
                on_set: vec![imax],
            },
            RawFacet {
                direction: vec![Int::from(-1)],
                support: -pts[imin].0[0].clone(),
                on_set: vec![imin],
            },
        ];
        let mut vs = vec![imin, imax];
        vs.dedup();
        return (vs, facets);
    }

    // The subset scan runs on i128 whenever the globally cleared
    // coordinates are small, which they are for generator-fresh points;
    // the bound keeps all intermediates (Bareiss minors, cross
    // components, point classifications) within i128 for n <= 5. Cut
    // products with large mixed denominators use the homogeneous BigInt
    // scan, whose numbers grow with single point denominators instead
    // of their global lcm.
    let mut facets: Vec<RawFacet> = {
        let (ints, scale) = clear_denominators(pts);
        match to_small(&ints) {
            Some(small) => scan_subsets_small(&small, m)
                .into_iter()
                .map(|(direction, sup, on_set)| RawFacet {
                    support: Rat::new(sup, scale.clone()),
                    direction,
                    on_set,
                })
                .collect(),
            None => scan_subsets_homogeneous(pts, m),
        }
    };

    // A point of the hull is extreme iff its active constraints have full rank.
    let mut active: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
    for (fi, f) in facets.iter().enumerate() {
        for &i in &f.on_set {
            active[i].push(fi);
        }
    }
    let mut vidx = Vec::new();
    for (i, act) in active.iter().enumerate() {
        if act.len() < m {
            continue;
        }
        let rows: Vec<Vec<Int>> = act.iter().map(|&fi| facets[fi].direction.clone()).collect();
        if linalg::rank_int(rows) == m {
            vidx.push(i);
        }
    }
    for f in facets.iter_mut() {
        f.on_set.retain(|i| vidx.contains(i));
    }
    (vidx, facets)
}

/// Coordinate bound for the i128 scan; chosen so that for `m <= 5` every
/// Bareiss intermediate (a product of two minors) and every support dot
/// product stays far below `i128::MAX`.
const SMALL_COORD_BOUND: i128 = 250_000;

fn to_small(ints: &[Vec<Int>]) -> Option<Vec<Vec<i128>>> {
    use num_traits::ToPrimitive;
    ints.iter()
        .map(|p| {
            p.iter()
                .map(|c| c.to_i128().filter(|v| v.abs() <= SMALL_COORD_BOUND))
                .collect::<Option<Vec<i128>>>()
        })
        .collect()
}

type Candidate = (Vec<Int>, Int, Vec<usize>);

/// Homogeneous scan: each point kept as `(numerators, denominator)`,
/// difference rows cleared per row. Scaling rows scales the cross
/// product uniformly, so the candidate normal is unchanged, and all
/// side decisions reduce to integer signs against single-point
/// denominators.
fn scan_subsets_homogeneous(pts: &[Vector], m: usize) -> Vec<RawFacet> {
    let homo: Vec<(Vec<Int>, Int)> = pts
        .iter()
        .map(|p| {
            let mut den = Int::from(1);
            for c in &p.0 {
                den = den.lcm(c.denom());
            }
            let nums = p.0.iter().map(|c| c.numer() * (&den / c.denom())).collect();
            (nums, den)
        })
        .collect();
    let mut seen: HashMap<(Vec<Int>, Rat), ()> = HashMap::new();
    let mut out = Vec::new();
    for subset in (0..pts.len()).combinations(m) {
        let (n0, d0) = &homo[subset[0]];
        let rows: Vec<Vec<Int>> = subset[1..]
            .iter()
            .map(|&i| {
                let (ni, di) = &homo[i];
                // den_i * d0 * (p_i - p_0), a positive multiple of the true
                // difference, shrunk by its content to keep minors small.
                let raw: Vec<Int> = ni
                    .iter()
                    .zip(n0.iter())
                    .map(|(a, b)| a * d0 - b * di)
                    .collect();
                primitive(&raw).unwrap_or(raw)
            })
            .collect();
        let w = match cross(&rows) {
            Some(w) => w,
            None => continue,
        };
        let w = primitive(&w).expect("nonzero cross product");
        let a_num = dot_int(n0, &w);
        let support = Rat::new(a_num.clone(), d0.clone());
        let key_pos = (w.clone(), support.clone());
        let key_neg = (w.iter().map(|c| -c).collect::<Vec<_>>(), -support.clone());
        if seen.contains_key(&key_pos) || seen.contains_key(&key_neg) {
            continue;
        }
        seen.insert(key_pos, ());

        let mut any_pos = false;
        let mut any_neg = false;
        let mut on_set = Vec::new();
        for (i, (nums, den)) in homo.iter().enumerate() {
            // sign(<w, p_i> - a) with positive denominators cleared.
            let s = d0 * dot_int(nums, &w) - &a_num * den;
            if s.is_positive() {
                any_pos = true;
            } else if s.is_negative() {
                any_neg = true;
            } else {
                on_set.push(i);
            }
            if any_pos && any_neg {
                break;
            }
        }
        if any_pos && any_neg {
            continue;
        }
        let (direction, support) = if !any_pos {
            (w, support)
        } else {
            (w.into_iter().map(|c| -c).collect(), -support)
        };
        out.push(RawFacet { direction, support, on_set });
    }
    out
}

fn scan_subsets_small(ints: &[Vec<i128>], m: usize) -> Vec<Candidate> {
    let mut seen: HashMap<(Vec<i128>, i128), ()> = HashMap::new();
    let mut out = Vec::new();
    let mut rows = vec![vec![0i128; m]; m - 1];
    for subset in (0..ints.len()).combinations(m) {
        let q0 = &ints[subset[0]];
        for (r, &i) in subset[1..].iter().enumerate() {
            for c in 0..m {
                rows[r][c] = ints[i][c] - q0[c];
            }
        }
        let w = match cross_i128(&rows) {
            Some(w) => w,
            None => continue,
        };
        let w = primitive_i128(w);
        let a: i128 = dot_i128(q0, &w);
        let key_neg = (w.iter().map(|c| -c).collect::<Vec<_>>(), -a);
        if seen.contains_key(&(w.clone(), a)) || seen.contains_key(&key_neg) {
            continue;
        }
        seen.insert((w.clone(), a), ());

        let mut any_pos = false;
        let mut any_neg = false;
        let mut on_set = Vec::new();
        for (i, p) in ints.iter().enumerate() {
            let s = dot_i128(p, &w) - a;
            if s > 0 {
                any_pos = true;
            } else if s < 0 {
                any_neg = true;
            } else {
                on_set.push(i);
            }
            if any_pos && any_neg {
                break;
            }
        }
        if any_pos && any_neg {
            continue;
        }
        let (w, a) = if !any_pos {
            (w, a)
        } else {
            (w.into_iter().map(|c| -c).collect(), -a)
        };
        out.push((w.into_iter().map(Int::from).collect(), Int::from(a), on_set));
    }
    out
}

fn dot_i128(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive_i128(mut v: Vec<i128>) -> Vec<i128> {
    let mut g: i128 = 0;
    for c in &v {
        g = g.gcd(c);
    }
    if g > 1 {
        for c in v.iter_mut() {
            *c /= g;
        }
    }
    v
}

fn cross_i128(rows: &[Vec<i128>]) -> Option<Vec<i128>> {
    let m = rows.len() + 1;
    let mut w = Vec::with_capacity(m);
    let mut minor = vec![vec![0i128; m - 1]; m - 1];
    for k in 0..m {
        for (r, row) in rows.iter().enumerate() {
            let mut cc = 0;
            for (c, &val) in row.iter().enumerate() {
                if c != k {
                    minor[r][cc] = val;
                    cc += 1;
                }
            }
        }
        let d = det_i128(&mut minor.clone());
        w.push(if k % 2 == 0 { d } else { -d });
    }
    if w.iter().all(|&c| c == 0) {
        None
    } else {
        Some(w)
    }
}

fn det_i128(m: &mut [Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Scale all points by the global lcm of denominators; hull combinatorics
/// are invariant, supports divide back by the returned scale.
fn clear_denominators(pts: &[Vector]) -> (Vec<Vec<Int>>, Int) {
    let mut l = Int::from(1);
    for p in pts {
        for c in &p.0 {
            l = l.lcm(c.denom());
        }
    }
    let ints = pts
        .iter()
        .map(|p| {
            p.0.iter()
                .map(|c| c.numer() * (&l / c.denom()))
                .collect::<Vec<Int>>()
        })
        .collect();
    (ints, l)
}

fn dot_int(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Int::zero(), |acc, t| acc + t)
}

/// Generalized cross product of `m-1` integer vectors in `Z^m`: a vector
/// orthogonal to all of them. `None` when they are linearly dependent.
fn cross(rows: &[Vec<Int>]) -> Option<Vec<Int>> {
    let m = rows.len() + 1;
    let mut w = Vec::with_capacity(m);
    for k in 0..m {
        let minor: Vec<Vec<Int>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != k)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let d = det_int(minor);
        w.push(if k % 2 == 0 { d } else { -d });
    }
    if w.iter().all(|c| c.is_zero()) {
        None
    } else {
        Some(w)
    }
}

/// Integer determinant via fraction-free (Bareiss) elimination.
pub fn det_int(mut m: Vec<Vec<Int>>) -> Int {
    let n = m.len();
    if n == 0 {
        return Int::from(1);
    }
    let mut sign = 1i64;
    let mut prev = Int::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = &num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Affine rank of a point set (0 for a single point).
pub fn affine_rank(pts: &[Vector]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let p0 = &pts[0];
    // Per-row denominator clearing preserves rank.
    let rows: Vec<Vec<Int>> = pts[1..]
        .iter()
        .map(|p| {
            let diff = p.sub(p0);
            let mut l = Int::from(1);
            for c in &diff.0 {
                l = l.lcm(c.denom());
            }
            diff.0.iter().map(|c| c.numer() * (&l / c.denom())).collect()
        })
        .collect();
    linalg::rank_int(rows)
}

/// Exact affine chart: coordinates of the points in a basis of their affine
/// hull. An affine bijection, so extreme points and face incidences carry
/// over; metric quantities do not and are never read off the chart.
fn chart(pts: &[Vector], d: usize) -> Vec<Vector> {
    let n = pts[0].dim();
    let p0 = &pts[0];
    // Greedy basis of difference vectors.
    let mut basis: Vec<Vector> = Vec::new();
    for p in &pts[1..] {
        if basis.len() == d {
            break;
        }
        let mut cand: Vec<Vec<Rat>> = basis.iter().map(|b| b.0.clone()).collect();
        cand.push(p.sub(p0).0);
        if linalg::rank(&cand) == basis.len() + 1 {
            basis.push(p.sub(p0));
        }
    }
    debug_assert_eq!(basis.len(), d);
    // d independent coordinate rows of the n x d basis matrix.
    let mut rowsel: Vec<usize> = Vec::new();
    for r in 0..n {
        if rowsel.len() == d {
            break;
        }
        let mut cand: Vec<Vec<Rat>> = rowsel
            .iter()
            .map(|&rr| basis.iter().map(|b| b.0[rr].clone()).collect())
            .collect();
        cand.push(basis.iter().map(|b| b.0[r].clone()).collect());
        if linalg::rank(&cand) == rowsel.len() + 1 {
            rowsel.push(r);
        }
    }
    debug_assert_eq!(rowsel.len(), d);
    let bsub: Vec<Vec<Rat>> = rowsel
        .iter()
        .map(|&r| basis.iter().map(|b| b.0[r].clone()).collect())
        .collect();
    pts.iter()
        .map(|p| {
            let rhs: Vec<Rat> = rowsel
                .iter()
                .map(|&r| &p.0[r] - &p0.0[r])
                .collect();
            Vector(linalg::solve(&bsub, &rhs).expect("chart basis invertible"))
        })
        .collect()
}

/// Triangulate the convex hull of a point set into simplices of its own
/// affine dimension. Returns index lists into `pts` (which should already
/// be extreme points; interior points are ignored by the recursion).
pub fn triangulate(pts: &[Vector]) -> Vec<Vec<usize>> {
    let d = affine_rank(pts);
    if d == 0 {
        return vec![vec![0]];
    }
    if d == 1 {
        // Lexicographic order is geometric order along a line.
        let imin = (0..pts.len()).min_by_key(|&i| &pts[i]).unwrap();
        let imax = (0..pts.len()).max_by_key(|&i| &pts[i]).unwrap();
        return vec![vec![imin, imax]];
    }
    let chart_pts = if d == pts[0].dim() {
        pts.to_vec()
    } else {
        chart(pts, d)
    };
    let (vidx, facets) = full_dim_hull(&chart_pts);
    let v0 = vidx[0];
    let mut out = Vec::new();
    for f in &facets {
        if f.on_set.contains(&v0) {
            continue;
        }
        let fpts: Vec<Vector> = f.on_set.iter().map(|&i| chart_pts[i].clone()).collect();
        let sub_tris = triangulate_in_plane(&fpts, &f.direction)
            .expect("hull facet has affine rank d - 1");
        for sub in sub_tris {
            let mut simplex: Vec<usize> = sub.into_iter().map(|i| f.on_set[i]).collect();
            simplex.push(v0);
            out.push(simplex);
        }
    }
    out
}

/// Triangulation of a point set known to span a hyperplane with normal `w`
/// (in its ambient space). Deleting the coordinate with the largest |w|
/// entry is an affine bijection on that hyperplane, so hull combinatorics
/// and triangulations transfer unchanged — and the recursion never needs a
/// rational chart. Returns `None` when the points do not have full rank in
/// the hyperplane (i.e. the candidate is not a genuine facet).
pub(crate) fn triangulate_in_plane(pts: &[Vector], w: &[Int]) -> Option<Vec<Vec<usize>>> {
    let n = pts[0].dim();
    if n == 1 {
        return Some(vec![vec![0]]);
    }
    let k = (0..n).max_by_key(|&i| w[i].abs()).unwrap();
    let proj: Vec<Vector> = pts
        .iter()
        .map(|p| {
            Vector(
                p.0.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, c)| c.clone())
                    .collect(),
            )
        })
        .collect();
    if affine_rank(&proj) != n - 1 {
        return None;
    }
    Some(triangulate(&proj))
}

/// `vol_{n-1}(F) * ||w||` for a facet given by its fan triangulation.
fn facet_vol_times_norm(vertices: &[Vector], simplices: &[Vec<usize>], w: &[Int]) -> Rat {
    let n = vertices[0].dim();
    let mut total = Rat::zero();
    let wr: Vec<Rat> = w.iter().map(|c| Rat::from_integer(c.clone())).collect();
    for s in simplices {
        let p0 = &vertices[s[0]];
        let mut mat: Vec<Vec<Rat>> = s[1..]
            .iter()
            .map(|&i| vertices[i].sub(p0).0)
            .collect();
        mat.push(wr.clone());
        total += linalg::det_rat(mat).abs();
    }
    total / Rat::from_integer(factorial(n - 1))
}

pub fn factorial(k: usize) -> Int {
    (1..=k).fold(Int::from(1), |acc, i| acc * Int::from(i))
}
