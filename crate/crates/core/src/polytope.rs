//! Exact-rational polytope representation: vertices, facet data, hyperplane
//! cuts, origin cones and JSON round-tripping.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{self, factorial};
use crate::linalg::{self, LinearMap};
use crate::rational::{format_rat, parse_rat, rat_to_f64, Int, Rat, Vector};

/// The set `{x : <x, normal> = offset}`.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub normal: Vector,
    pub offset: Rat,
}

impl Hyperplane {
    pub fn new(normal: Vector, offset: Rat) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::Precondition("hyperplane normal must be nonzero".into()));
        }
        Ok(Hyperplane { normal, offset })
    }

    /// Hyperplane through the origin.
    pub fn through_origin(normal: Vector) -> Result<Self> {
        Self::new(normal, Rat::zero())
    }
}

/// One facet of a full-dimensional polytope.
///
/// The outer normal is stored as a primitive integer direction `w` together
/// with `||w||^2`, so the sign of the unit-normal support `h(P,v) = a/||w||`
/// is decidable exactly. Only the `(n-1)`-volume is floating point; its
/// exact companion `vol_{n-1}(F)·||w||` is kept for coefficient math.
#[derive(Clone, Debug)]
pub struct Facet {
    pub direction: Vec<Int>,
    pub support: Rat,
    pub sq_norm: Rat,
    pub volume: f64,
    pub vertex_ids: Vec<usize>,
    pub vol_times_norm: Rat,
    pub(crate) simplices: Vec<Vec<usize>>,
}

impl Facet {
    fn from_hull(f: hull::HullFacet) -> Facet {
        let volume = rat_to_f64(&f.vol_times_norm) / rat_to_f64(&f.sq_norm).sqrt();
        Facet {
            direction: f.direction,
            support: f.support,
            sq_norm: f.sq_norm,
            volume,
            vertex_ids: f.vertex_ids,
            vol_times_norm: f.vol_times_norm,
            simplices: f.simplices,
        }
    }

    /// Unit-normal support value `h(P, v)` as a float; its sign equals the
    /// exact sign of `support`.
    pub fn unit_support(&self) -> f64 {
        rat_to_f64(&self.support) / rat_to_f64(&self.sq_norm).sqrt()
    }
}

/// A convex polytope, possibly empty or lower-dimensional.
///
/// Vertices are the exact extreme points, lexicographically sorted; facets
/// are populated only when the polytope is full-dimensional.
#[derive(Clone, Debug)]
pub struct Polytope {
    n: usize,
    vertices: Vec<Vector>,
    facets: Vec<Facet>,
    dim: Option<usize>,
    /// Cached facet data of a codimension-1 polytope viewed as a facet of
    /// the ambient space; see [`Polytope::hyperfacet_data`].
    hyperfacet: std::sync::OnceLock<(Vec<Int>, Rat, Rat, Rat)>,
}

impl Polytope {
    /// Hull of a nonempty point set.
    pub fn convex_hull(n: usize, points: &[Vector]) -> Result<Polytope> {
        let h = hull::hull(n, points)?;
        Ok(Polytope {
            n: h.ambient,
            dim: Some(h.dim),
            vertices: h.vertices,
            facets: h.facets.into_iter().map(Facet::from_hull).collect(),
            hyperfacet: std::sync::OnceLock::new(),
        })
    }

    /// The empty polytope: a distinct value, sent to zero by every operator.
    pub fn empty(n: usize) -> Polytope {
        Polytope {
            n,
            vertices: vec![],
            facets: vec![],
            dim: None,
            hyperfacet: std::sync::OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.dim.is_none()
    }

    /// Intrinsic dimension; `None` for the empty polytope.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn is_full_dim(&self) -> bool {
        self.dim == Some(self.n)
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// `h(P, u) = max <x, u>` over vertices; exact.
    pub fn support_value(&self, u: &Vector) -> Result<Rat> {
        u.check_dim(self.n)?;
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .max()
            .ok_or(Error::EmptyInput("support of empty polytope"))
    }

    /// Image under an invertible linear map; facets recomputed exactly.
    pub fn apply_map(&self, map: &LinearMap) -> Result<Polytope> {
        if !map.is_invertible() {
            return Err(Error::SingularMap);
        }
        if self.is_empty() {
            return Ok(Polytope::empty(self.n));
        }
        let pts: Vec<Vector> = self.vertices.iter().map(|v| map.apply(v)).collect();
        Polytope::convex_hull(self.n, &pts)
    }

    /// Split by a hyperplane into `(P ∩ H^+, P ∩ H^-, P ∩ H)`.
    ///
    /// New vertices are exact edge-hyperplane intersections; a side the
    /// polytope does not reach comes back empty or lower-dimensional.
    pub fn halfspace_cut(&self, h: &Hyperplane) -> Result<(Polytope, Polytope, Polytope)> {
        h.normal.check_dim(self.n)?;
        if self.is_empty() {
            return Ok((
                Polytope::empty(self.n),
                Polytope::empty(self.n),
                Polytope::empty(self.n),
            ));
        }
        let signs: Vec<Rat> = self
            .vertices
            .iter()
            .map(|v| v.dot(&h.normal) - &h.offset)
            .collect();
        let mut plus: Vec<Vector> = Vec::new();
        let mut minus: Vec<Vector> = Vec::new();
        let mut section: Vec<Vector> = Vec::new();
        for (v, s) in self.vertices.iter().zip(&signs) {
            if !s.is_negative() {
                plus.push(v.clone());
            }
            if !s.is_positive() {
                minus.push(v.clone());
            }
            if s.is_zero() {
                section.push(v.clone());
            }
        }
        // Edge crossings. For full-dimensional polytopes only genuine
        // edges are intersected (pairs whose common facet normals have
        // rank n-1); interior chords would bloat the piece hulls.
        for (i, j) in self.crossing_pairs() {
            let (i, j) = if signs[i].is_positive() { (i, j) } else { (j, i) };
            if signs[i].is_positive() && signs[j].is_negative() {
                let t = &signs[i] / (&signs[i] - &signs[j]);
                let p = self.vertices[i]
                    .add(&self.vertices[j].sub(&self.vertices[i]).scale(&t));
                plus.push(p.clone());
                minus.push(p.clone());
                section.push(p);
            }
        }
        let build = |pts: Vec<Vector>| -> Result<Polytope> {
            if pts.is_empty() {
                Ok(Polytope::empty(self.n))
            } else {
                Polytope::convex_hull(self.n, &pts)
            }
        };
        let any_pos = signs.iter().any(|s| s.is_positive());
        let any_neg = signs.iter().any(|s| s.is_negative());
        if !self.is_full_dim() || !any_pos || !any_neg {
            // The hyperplane does not pass through the interior; at most
            // one side needs a (cheap, low-dimensional) hull.
            return Ok((build(plus)?, build(minus)?, build(section)?));
        }
        // Genuine cut of a full-dimensional polytope: both pieces are
        // full-dimensional, the collected points are exactly their vertex
        // sets, and every piece facet lies on a parent facet hyperplane or
        // on the cut hyperplane. Reconstruct facets from those hints
        // instead of re-running the hull search.
        let mut den = Int::from(1);
        for c in &h.normal.0 {
            den = num_integer::Integer::lcm(&den, c.denom());
        }
        let ints: Vec<Int> = h
            .normal
            .0
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let cut_dir = crate::rational::primitive(&ints).expect("nonzero cut normal");
        // cut_dir = s * normal with s > 0; the support scales by the same s.
        let pivot = ints.iter().position(|c| !c.is_zero()).unwrap();
        let s = Rat::from_integer(cut_dir[pivot].clone()) / &h.normal.0[pivot];
        let cut_offset = &h.offset * &s;
        let parent_hints: Vec<(Vec<Int>, Rat)> = self
            .facets
            .iter()
            .map(|f| (f.direction.clone(), f.support.clone()))
            .collect();
        let mut plus_hints = parent_hints.clone();
        plus_hints.push((cut_dir.iter().map(|c| -c).collect(), -cut_offset.clone()));
        let mut minus_hints = parent_hints;
        minus_hints.push((cut_dir, cut_offset));
        let from_hints = |pts: Vec<Vector>, hints: &[(Vec<Int>, Rat)]| -> Result<Polytope> {
            let h = hull::hull_from_hints(self.n, &pts, hints)?;
            Ok(Polytope {
                n: h.ambient,
                dim: Some(h.dim),
                vertices: h.vertices,
                facets: h.facets.into_iter().map(Facet::from_hull).collect(),
                hyperfacet: std::sync::OnceLock::new(),
            })
        };
        Ok((
            from_hints(plus, &plus_hints)?,
            from_hints(minus, &minus_hints)?,
            build(section)?,
        ))
    }

    /// Vertex pairs whose segment is an edge (full-dimensional case);
    /// otherwise all pairs, which is cheap at those sizes.
    fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.vertices.len();
        let mut pairs = Vec::new();
        if !self.is_full_dim() {
            for i in 0..m {
                for j in i + 1..m {
                    pairs.push((i, j));
                }
            }
            return pairs;
        }
        let mut incident: Vec<Vec<usize>> = vec![vec![]; m];
        for (fi, f) in self.facets.iter().enumerate() {
            for &vi in &f.vertex_ids {
                incident[vi].push(fi);
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let common: Vec<Vec<Int>> = incident[i]
                    .iter()
                    .filter(|fi| incident[j].contains(fi))
                    .map(|&fi| self.facets[fi].direction.clone())
                    .collect();
                if common.len() >= self.n - 1 && linalg::rank_int(common) == self.n - 1 {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// `P_o = conv({o} ∪ P)`.
    pub fn conv_origin(&self) -> Result<Polytope> {
        let mut pts = self.vertices.clone();
        pts.push(Vector::zero(self.n));
        Polytope::convex_hull(self.n, &pts)
    }

    /// Facets with exact support value `< 0` (those "facing the origin").
    /// Facet data of a codimension-1 polytope viewed as a facet of the
    /// ambient space: `(primitive normal, support, ||normal||², vol·||normal||)`.
    /// Cached: the triangulation behind the volume is the expensive part and
    /// the same value is requested by every operator application.
    ///
    /// # Panics
    /// If `dim() != Some(n - 1)`.
    pub(crate) fn hyperfacet_data(&self) -> &(Vec<Int>, Rat, Rat, Rat) {
        assert_eq!(self.dim, Some(self.n - 1), "hyperfacet of non-codim-1 polytope");
        self.hyperfacet.get_or_init(|| {
            let verts = &self.vertices;
            let rows: Vec<Vec<Rat>> = verts[1..]
                .iter()
                .map(|v| v.sub(&verts[0]).0)
                .collect();
            let normal_rat =
                linalg::null_vector(&rows).expect("codimension-1 hull has a normal line");
            let (w, _) =
                crate::rational::primitive_of_rational(&normal_rat).expect("nonzero normal");
            let support = crate::rational::int_dot(&w, &verts[0]);
            let sq_norm = Rat::from_integer(
                w.iter().map(|c| c * c).fold(Int::from(0), |acc, t| acc + t),
            );
            let simplices = hull::triangulate_in_plane(verts, &w)
                .expect("codimension-1 hull spans its hyperplane");
            let wr: Vec<Rat> = w.iter().map(|c| Rat::from_integer(c.clone())).collect();
            let mut vol_times_norm = Rat::from_integer(Int::from(0));
            for s in &simplices {
                let p0 = &verts[s[0]];
                let mut mat: Vec<Vec<Rat>> =
                    s[1..].iter().map(|&i| verts[i].sub(p0).0).collect();
                mat.push(wr.clone());
                vol_times_norm += linalg::det_rat(mat).abs();
            }
            vol_times_norm /= Rat::from_integer(factorial(self.n - 1));
            (w, support, sq_norm, vol_times_norm)
        })
    }

    pub fn facets_facing_origin(&self) -> Vec<&Facet> {
        self.facets
            .iter()
            .filter(|f| f.support.is_negative())
            .collect()
    }

    /// Exact membership test for the origin.
    pub fn contains_origin(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        if self.is_full_dim() {
            return self.facets.iter().all(|f| !f.support.is_negative());
        }
        // Lower-dimensional: o ∈ P iff adding o changes nothing.
        match self.conv_origin() {
            Ok(po) => po.vertices == self.vertices,
            Err(_) => false,
        }
    }

    /// Scalar multiple `rP` for exact rational `r > 0`, without re-hulling.
    pub fn scale(&self, r: &Rat) -> Result<Polytope> {
        if !r.is_positive() {
            return Err(Error::Precondition("scale factor must be > 0".into()));
        }
        if self.is_empty() {
            return Ok(self.clone());
        }
        let rpow = r.pow(self.n as i32 - 1);
        Ok(Polytope {
            n: self.n,
            dim: self.dim,
            hyperfacet: std::sync::OnceLock::new(),
            vertices: self.vertices.iter().map(|v| v.scale(r)).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    direction: f.direction.clone(),
                    support: &f.support * r,
                    sq_norm: f.sq_norm.clone(),
                    volume: f.volume * rat_to_f64(&rpow),
                    vertex_ids: f.vertex_ids.clone(),
                    vol_times_norm: &f.vol_times_norm * &rpow,
                    simplices: f.simplices.clone(),
                })
                .collect(),
        })
    }

    /// Translate by `t`; facet normals and volumes are unchanged, supports
    /// shift by `<t, w>`.
    pub fn translate(&self, t: &Vector) -> Result<Polytope> {
        t.check_dim(self.n)?;
        if self.is_empty() {
            return Ok(self.clone());
        }
        Ok(Polytope {
            n: self.n,
            dim: self.dim,
            hyperfacet: std::sync::OnceLock::new(),
            vertices: self.vertices.iter().map(|v| v.add(t)).collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    direction: f.direction.clone(),
                    support: &f.support + crate::rational::int_dot(&f.direction, t),
                    sq_norm: f.sq_norm.clone(),
                    volume: f.volume,
                    vertex_ids: f.vertex_ids.clone(),
                    vol_times_norm: f.vol_times_norm.clone(),
                    simplices: f.simplices.clone(),
                })
                .collect(),
        })
    }

    /// Exact n-dimensional volume; zero unless full-dimensional.
    pub fn volume(&self) -> Rat {
        if !self.is_full_dim() {
            return Rat::zero();
        }
        let v0 = &self.vertices[0];
        let mut total = Rat::zero();
        for f in &self.facets {
            if f.vertex_ids.contains(&0) {
                continue;
            }
            for s in &f.simplices {
                let p0 = &self.vertices[s[0]];
                let mut mat: Vec<Vec<Rat>> = s[1..]
                    .iter()
                    .map(|&i| self.vertices[i].sub(p0).0)
                    .collect();
                mat.push(v0.sub(p0).0);
                total += linalg::det_rat(mat).abs();
            }
        }
        total / Rat::from_integer(factorial(self.n))
    }

    /// `T^n = conv{o, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Result<Polytope> {
        if n < 1 {
            return Err(Error::Precondition("simplex dimension must be >= 1".into()));
        }
        let mut pts = vec![Vector::zero(n)];
        for i in 0..n {
            pts.push(Vector::unit(n, i));
        }
        Polytope::convex_hull(n, &pts)
    }

    /// `conv{e_1, ..., e_n}`, the `(n-1)`-dimensional probe simplex.
    pub fn probe_simplex(n: usize) -> Result<Polytope> {
        if n < 1 {
            return Err(Error::Precondition("simplex dimension must be >= 1".into()));
        }
        let pts: Vec<Vector> = (0..n).map(|i| Vector::unit(n, i)).collect();
        Polytope::convex_hull(n, &pts)
    }

    /// `e_1 + T^n`.
    pub fn shifted_simplex(n: usize) -> Result<Polytope> {
        Polytope::standard_simplex(n)?.translate(&Vector::unit(n, 0))
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    n: usize,
    vertices: Vec<Vec<String>>,
}

impl Polytope {
    pub fn to_json(&self) -> serde_json::Value {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.0.iter().map(format_rat).collect())
            .collect();
        serde_json::to_value(PolytopeJson {
            n: self.n,
            vertices,
        })
        .expect("polytope serialization")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Polytope> {
        let pj: PolytopeJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("polytope json: {e}")))?;
        if pj.vertices.is_empty() {
            return Ok(Polytope::empty(pj.n));
        }
        let pts = pj
            .vertices
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse_rat(s))
                    .collect::<Result<Vec<Rat>>>()
                    .map(Vector)
            })
            .collect::<Result<Vec<Vector>>>()?;
        Polytope::convex_hull(pj.n, &pts)
    }
}
