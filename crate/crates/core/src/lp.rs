//! Algebra of finite sums `Σ cᵢ ⟨wᵢ,·⟩±^p` of p-homogeneous ridge terms,
//! and formal differences of two such sums.
//!
//! These are the images `h(K,·)^p` of bodies under the projection-body
//! operators. Directions are exact primitive integer vectors so that term
//! identity is decidable; only coefficients are floating point.
//!
//! Since `⟨-w,·⟩₋ = ⟨w,·⟩₊` pointwise, the canonical form flips every term
//! so the first nonzero coordinate of its direction is positive. This makes
//! the cancellations behind the signed valuations exact at the term level.

use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::LinearMap;
use crate::rational::{int_dot_f64, primitive_of_rational, rat_to_f64, Int, Rat};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TermSign {
    Plus,
    Minus,
}

impl TermSign {
    pub fn flip(self) -> TermSign {
        match self {
            TermSign::Plus => TermSign::Minus,
            TermSign::Minus => TermSign::Plus,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            TermSign::Plus => "+",
            TermSign::Minus => "-",
        }
    }
}

/// One ridge term `coef · ⟨dir, ·⟩_sign^p` with `coef >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpTerm {
    pub dir: Vec<Int>,
    pub sign: TermSign,
    pub coef: f64,
}

impl LpTerm {
    fn eval(&self, u: &[f64], p: f64) -> f64 {
        let d = int_dot_f64(&self.dir, u);
        let part = match self.sign {
            TermSign::Plus => d.max(0.0),
            TermSign::Minus => (-d).max(0.0),
        };
        if part == 0.0 {
            0.0
        } else {
            self.coef * part.powf(p)
        }
    }

    fn canonical_key(dir: &[Int], sign: TermSign) -> (Vec<Int>, TermSign) {
        match dir.iter().find(|c| !c.is_zero()) {
            Some(first) if first.is_negative() => {
                (dir.iter().map(|c| -c).collect(), sign.flip())
            }
            _ => (dir.to_vec(), sign),
        }
    }
}

/// A nonnegative p-homogeneous function `Σ cᵢ ⟨wᵢ,·⟩±^p` in canonical form:
/// flipped directions, terms merged, sorted, float dust dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct LpFunction {
    p: f64,
    n: usize,
    terms: Vec<LpTerm>,
}

impl LpFunction {
    pub fn new(p: f64, n: usize, terms: Vec<LpTerm>) -> Result<LpFunction> {
        if !(p > 1.0) {
            return Err(Error::Precondition(format!("p must be > 1, got {p}")));
        }
        for t in &terms {
            if t.dir.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.dir.len(),
                });
            }
            if t.dir.iter().all(|c| c.is_zero()) {
                return Err(Error::Precondition("zero term direction".into()));
            }
            if t.coef < 0.0 {
                return Err(Error::Precondition("negative term coefficient".into()));
            }
        }
        Ok(LpFunction {
            p,
            n,
            terms: canonicalize(terms),
        })
    }

    pub fn zero(p: f64, n: usize) -> LpFunction {
        LpFunction { p, n, terms: vec![] }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[LpTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_compat(&self, other: &LpFunction) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        if self.p != other.p {
            return Err(Error::Precondition(format!(
                "mismatched exponents p = {} vs {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    /// Pointwise evaluation `Σ cᵢ max(±⟨wᵢ,u⟩, 0)^p`.
    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: u.len(),
            });
        }
        Ok(self.terms.iter().map(|t| t.eval(u, self.p)).sum())
    }

    /// `L_p`-Minkowski addition: termwise merge, so that
    /// `eval(f+g) = eval(f) + eval(g)` everywhere.
    pub fn lp_add(&self, other: &LpFunction) -> Result<LpFunction> {
        self.check_compat(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(LpFunction {
            p: self.p,
            n: self.n,
            terms: canonicalize(terms),
        })
    }

    /// The function of the scaled body `cK` for `c >= 0`: coefficients
    /// multiply by `c^p`.
    pub fn scalar_body(&self, c: f64) -> Result<LpFunction> {
        if c < 0.0 {
            return Err(Error::Precondition("body scale must be >= 0".into()));
        }
        self.scaled(c.powf(self.p))
    }

    /// Multiply every coefficient by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<LpFunction> {
        if factor < 0.0 {
            return Err(Error::Precondition("coefficient factor must be >= 0".into()));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| LpTerm {
                dir: t.dir.clone(),
                sign: t.sign,
                coef: t.coef * factor,
            })
            .collect();
        Ok(LpFunction {
            p: self.p,
            n: self.n,
            terms: canonicalize(terms),
        })
    }

    /// `f ∘ φ^{-1}`: each direction maps `w ↦ φ^{-t}w`, renormalized to a
    /// primitive direction `w'` with `φ^{-t}w = t·w'`, coefficient times `t^p`.
    pub fn compose_inverse(&self, map: &LinearMap) -> Result<LpFunction> {
        if !map.is_invertible() {
            return Err(Error::SingularMap);
        }
        let contragredient = map.inverse_transpose()?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let dir_rat: Vec<Rat> = t
                    .dir
                    .iter()
                    .map(|c| Rat::from_integer(c.clone()))
                    .collect();
                let image = contragredient.apply(&crate::rational::Vector(dir_rat));
                let (w, scale) =
                    primitive_of_rational(&image.0).expect("invertible map keeps directions nonzero");
                LpTerm {
                    dir: w,
                    sign: t.sign,
                    coef: t.coef * rat_to_f64(&scale).powf(self.p),
                }
            })
            .collect();
        Ok(LpFunction {
            p: self.p,
            n: self.n,
            terms: canonicalize(terms),
        })
    }

    /// Structural comparison of canonical forms with per-coefficient
    /// tolerance, falling back to sampled comparison: for even integer p,
    /// distinct term sets can represent the same function.
    pub fn equal(&self, other: &LpFunction, tol: f64) -> Result<bool> {
        self.check_compat(other)?;
        if self.structurally_equal(other, tol) {
            return Ok(true);
        }
        let dirs = direction_sample(self.n, 200);
        let mut scale: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for u in &dirs {
            let a = self.eval(u)?;
            let b = other.eval(u)?;
            scale = scale.max(a.abs()).max(b.abs());
            worst = worst.max((a - b).abs());
        }
        Ok(worst <= tol * (1.0 + scale))
    }

    fn structurally_equal(&self, other: &LpFunction, tol: f64) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        let cmax = self
            .terms
            .iter()
            .chain(&other.terms)
            .fold(0.0f64, |m, t| m.max(t.coef));
        self.terms.iter().zip(&other.terms).all(|(a, b)| {
            a.dir == b.dir && a.sign == b.sign && (a.coef - b.coef).abs() <= tol * (1.0 + cmax)
        })
    }

    /// Sampled Hausdorff-style distance of the represented bodies:
    /// `max |eval(f,u)^{1/p} - eval(g,u)^{1/p}|` over unit directions.
    pub fn sup_distance(&self, other: &LpFunction, dirs: &[Vec<f64>]) -> Result<f64> {
        self.check_compat(other)?;
        let inv_p = 1.0 / self.p;
        let mut worst: f64 = 0.0;
        for u in dirs {
            let norm: f64 = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let un: Vec<f64> = u.iter().map(|c| c / norm).collect();
            let a = self.eval(&un)?.powf(inv_p);
            let b = other.eval(&un)?.powf(inv_p);
            worst = worst.max((a - b).abs());
        }
        Ok(worst)
    }
}

fn canonicalize(terms: Vec<LpTerm>) -> Vec<LpTerm> {
    let mut canon: Vec<LpTerm> = terms
        .into_iter()
        .filter(|t| t.coef != 0.0)
        .map(|t| {
            let (dir, sign) = LpTerm::canonical_key(&t.dir, t.sign);
            LpTerm {
                dir,
                sign,
                coef: t.coef,
            }
        })
        .collect();
    canon.sort_by(|a, b| (&a.dir, a.sign).cmp(&(&b.dir, b.sign)));
    let mut merged: Vec<LpTerm> = Vec::with_capacity(canon.len());
    for t in canon {
        match merged.last_mut() {
            Some(last) if last.dir == t.dir && last.sign == t.sign => last.coef += t.coef,
            _ => merged.push(t),
        }
    }
    // No size-based dropping: operator coefficients scale like a^{1-p} and
    // legitimately span many orders of magnitude. Exact cancellations are
    // produced bit-identically and caught by the `coef != 0` filter above.
    merged
}

/// Formal difference `pos - neg` of two nonnegative sums; the codomain of
/// the signed valuations. Common canonical-term mass cancels exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedLpFunction {
    pos: LpFunction,
    neg: LpFunction,
}

impl SignedLpFunction {
    pub fn new(pos: LpFunction, neg: LpFunction) -> Result<SignedLpFunction> {
        pos.check_compat(&neg)?;
        Ok(Self::cancel(pos, neg))
    }

    pub fn from_pos(pos: LpFunction) -> SignedLpFunction {
        let neg = LpFunction::zero(pos.p, pos.n);
        SignedLpFunction { pos, neg }
    }

    pub fn zero(p: f64, n: usize) -> SignedLpFunction {
        SignedLpFunction {
            pos: LpFunction::zero(p, n),
            neg: LpFunction::zero(p, n),
        }
    }

    fn cancel(pos: LpFunction, neg: LpFunction) -> SignedLpFunction {
        let p = pos.p;
        let n = pos.n;
        let mut pos_terms: Vec<LpTerm> = Vec::new();
        let mut neg_terms: Vec<LpTerm> = Vec::new();
        let mut pi = pos.terms.into_iter().peekable();
        let mut ni = neg.terms.into_iter().peekable();
        loop {
            match (pi.peek(), ni.peek()) {
                (Some(a), Some(b)) => {
                    let ka = (&a.dir, a.sign);
                    let kb = (&b.dir, b.sign);
                    match ka.cmp(&kb) {
                        std::cmp::Ordering::Less => pos_terms.push(pi.next().unwrap()),
                        std::cmp::Ordering::Greater => neg_terms.push(ni.next().unwrap()),
                        std::cmp::Ordering::Equal => {
                            let a = pi.next().unwrap();
                            let b = ni.next().unwrap();
                            let net = a.coef - b.coef;
                            if net > 0.0 {
                                pos_terms.push(LpTerm { coef: net, ..a });
                            } else if net < 0.0 {
                                neg_terms.push(LpTerm { coef: -net, ..b });
                            }
                        }
                    }
                }
                (Some(_), None) => pos_terms.push(pi.next().unwrap()),
                (None, Some(_)) => neg_terms.push(ni.next().unwrap()),
                (None, None) => break,
            }
        }
        SignedLpFunction {
            pos: LpFunction {
                p,
                n,
                terms: canonicalize(pos_terms),
            },
            neg: LpFunction {
                p,
                n,
                terms: canonicalize(neg_terms),
            },
        }
    }

    pub fn pos(&self) -> &LpFunction {
        &self.pos
    }

    pub fn neg(&self) -> &LpFunction {
        &self.neg
    }

    pub fn p(&self) -> f64 {
        self.pos.p
    }

    pub fn n(&self) -> usize {
        self.pos.n
    }

    pub fn is_zero(&self) -> bool {
        self.pos.is_zero() && self.neg.is_zero()
    }

    pub fn s_eval(&self, u: &[f64]) -> Result<f64> {
        Ok(self.pos.eval(u)? - self.neg.eval(u)?)
    }

    pub fn s_add(&self, other: &SignedLpFunction) -> Result<SignedLpFunction> {
        SignedLpFunction::new(
            self.pos.lp_add(&other.pos)?,
            self.neg.lp_add(&other.neg)?,
        )
    }

    pub fn s_negate(&self) -> SignedLpFunction {
        SignedLpFunction {
            pos: self.neg.clone(),
            neg: self.pos.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<SignedLpFunction> {
        Ok(SignedLpFunction {
            pos: self.pos.scaled(factor)?,
            neg: self.neg.scaled(factor)?,
        })
    }

    pub fn compose_inverse(&self, map: &LinearMap) -> Result<SignedLpFunction> {
        SignedLpFunction::new(
            self.pos.compose_inverse(map)?,
            self.neg.compose_inverse(map)?,
        )
    }
}

/// Deterministic direction sample: all `±e_i`, all normalized `±e_i±e_j`,
/// plus `extra` seeded pseudo-random unit vectors. Covers the cone
/// boundaries where the ridge terms kink.
pub fn direction_sample(n: usize, extra: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; n];
            u[i] = s;
            dirs.push(u);
        }
    }
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    for i in 0..n {
        for j in i + 1..n {
            for si in [1.0, -1.0] {
                for sj in [1.0, -1.0] {
                    let mut u = vec![0.0; n];
                    u[i] = si * inv_sqrt2;
                    u[j] = sj * inv_sqrt2;
                    dirs.push(u);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c70_5052_4f4a ^ n as u64);
    let mut added = 0;
    while added < extra {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm: f64 = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        dirs.push(u.iter().map(|c| c / norm).collect());
        added += 1;
    }
    dirs
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    dir: Vec<i64>,
    sign: String,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct LpFunctionJson {
    p: f64,
    n: usize,
    terms: Vec<TermJson>,
}

impl LpFunction {
    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|t| TermJson {
                dir: t
                    .dir
                    .iter()
                    .map(|c| c.to_i64().expect("direction entry fits i64"))
                    .collect(),
                sign: t.sign.as_str().to_string(),
                coef: t.coef,
            })
            .collect();
        serde_json::to_value(LpFunctionJson {
            p: self.p,
            n: self.n,
            terms,
        })
        .expect("lp function serialization")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<LpFunction> {
        let fj: LpFunctionJson = serde_json::from_value(v.clone())
            .map_err(|e| Error::Parse(format!("lp function json: {e}")))?;
        let terms = fj
            .terms
            .into_iter()
            .map(|t| {
                let sign = match t.sign.as_str() {
                    "+" => TermSign::Plus,
                    "-" => TermSign::Minus,
                    other => return Err(Error::Parse(format!("bad term sign {other:?}"))),
                };
                Ok(LpTerm {
                    dir: t.dir.into_iter().map(Int::from).collect(),
                    sign,
                    coef: t.coef,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        LpFunction::new(fj.p, fj.n, terms)
    }
}

impl SignedLpFunction {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "pos": self.pos.to_json(),
            "neg": self.neg.to_json(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<SignedLpFunction> {
        let pos = LpFunction::from_json(
            v.get("pos")
                .ok_or_else(|| Error::Parse("missing pos".into()))?,
        )?;
        let neg = LpFunction::from_json(
            v.get("neg")
                .ok_or_else(|| Error::Parse("missing neg".into()))?,
        )?;
        SignedLpFunction::new(pos, neg)
    }
}
