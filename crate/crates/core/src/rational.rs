//! Exact rational scalars and vectors.
//!
//! Rationals are `num_rational::BigRational`, which keeps values in lowest
//! terms with a positive denominator — exactly the invariant the kernel
//! relies on for sign decisions.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = num_rational::BigRational;

/// Rational from an integer literal.
pub fn rat(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// Rational `num/den`, `den != 0`.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: Int = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: Int = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// Format a rational as `"p"` or `"p/q"`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom() == &Int::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // BigRational::to_f64 is exact-rounding for values in f64 range.
    r.to_f64().unwrap_or(f64::NAN)
}

/// A point or direction in `R^n` with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Vector(pub Vec<Rat>);

impl Vector {
    pub fn zero(n: usize) -> Self {
        Vector(vec![Rat::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![Rat::zero(); n];
        v[i] = rat(1);
        Vector(v)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Vector(coords.iter().map(|&c| rat(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &Vector) -> Rat {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .fold(Rat::zero(), |acc, t| acc + t)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &Rat) -> Vector {
        Vector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rat_to_f64).collect()
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

/// Dot product of an integer direction with a rational point.
pub fn int_dot(dir: &[Int], x: &Vector) -> Rat {
    dir.iter()
        .zip(&x.0)
        .map(|(a, b)| Rat::from_integer(a.clone()) * b)
        .fold(Rat::zero(), |acc, t| acc + t)
}

/// Dot product of an integer direction with a float point.
pub fn int_dot_f64(dir: &[Int], u: &[f64]) -> f64 {
    dir.iter()
        .zip(u)
        .map(|(a, b)| a.to_f64().unwrap_or(f64::NAN) * b)
        .sum()
}

/// Divide an integer vector by the gcd of its entries. Returns `None` for
/// the zero vector. The sign is left untouched.
pub fn primitive(dir: &[Int]) -> Option<Vec<Int>> {
    let mut g = Int::zero();
    for c in dir {
        g = num_integer::gcd(g, c.abs());
    }
    if g.is_zero() {
        return None;
    }
    Some(dir.iter().map(|c| c / &g).collect())
}

/// Clear denominators of a rational vector and reduce to a primitive integer
/// direction `w` with `v = t·w`, `t > 0`. Returns `(w, t)`; `None` if `v = 0`.
pub fn primitive_of_rational(v: &[Rat]) -> Option<(Vec<Int>, Rat)> {
    let mut l = Int::from(1);
    for c in v {
        l = num_integer::lcm(l, c.denom().clone());
    }
    let ints: Vec<Int> = v.iter().map(|c| c.numer() * (&l / c.denom())).collect();
    let w = primitive(&ints)?;
    // v = (g/l)·w where g is the gcd cleared inside `primitive`.
    let g = ints
        .iter()
        .zip(&w)
        .find(|(_, wi)| !wi.is_zero())
        .map(|(ii, wi)| ii / wi)
        .expect("nonzero primitive direction");
    let t = Rat::new(g, l);
    debug_assert!(t.is_positive());
    Some((w, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "-12"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
        assert_eq!(format_rat(&parse_rat("6/4").unwrap()), "3/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn primitive_direction() {
        let v = vec![rat(4), ratio(-2, 3), rat(0)];
        let (w, t) = primitive_of_rational(&v).unwrap();
        assert_eq!(w, vec![Int::from(6), Int::from(-1), Int::from(0)]);
        assert_eq!(t, ratio(2, 3));
        assert!(primitive_of_rational(&[Rat::zero(), Rat::zero()]).is_none());
    }
}
