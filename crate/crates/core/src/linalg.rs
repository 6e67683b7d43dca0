//! Exact rational matrices: determinants, inverses, rank, and the
//! `SL(n)`/`GL(n)` actions on polytopes and directions.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat_to_f64, Int, Rat, Vector};

/// An `n×n` exact-rational matrix with its determinant cached.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMap {
    entries: Vec<Vec<Rat>>,
    det: Rat,
}

impl LinearMap {
    pub fn new(entries: Vec<Vec<Rat>>) -> Result<Self> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        let det = det_rat(entries.clone());
        Ok(LinearMap { entries, det })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        LinearMap {
            entries,
            det: Rat::one(),
        }
    }

    /// Diagonal map with the given entries.
    pub fn diagonal(diag: &[Rat]) -> Self {
        let n = diag.len();
        let entries: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { diag[i].clone() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        let det = diag.iter().fold(Rat::one(), |acc, d| acc * d);
        LinearMap { entries, det }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn det(&self) -> &Rat {
        &self.det
    }

    pub fn entries(&self) -> &[Vec<Rat>] {
        &self.entries
    }

    pub fn is_invertible(&self) -> bool {
        !self.det.is_zero()
    }

    pub fn transpose(&self) -> LinearMap {
        let n = self.n();
        let entries: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| self.entries[j][i].clone()).collect())
            .collect();
        LinearMap {
            entries,
            det: self.det.clone(),
        }
    }

    pub fn inverse(&self) -> Result<LinearMap> {
        if self.det.is_zero() {
            return Err(Error::SingularMap);
        }
        let n = self.n();
        // Gauss-Jordan on [A | I].
        let mut aug: Vec<Vec<Rat>> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                for j in 0..n {
                    r.push(if i == j { Rat::one() } else { Rat::zero() });
                }
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !aug[r][col].is_zero())
                .ok_or(Error::SingularMap)?;
            aug.swap(col, pivot);
            let p = aug[col][col].clone();
            for v in aug[col].iter_mut() {
                *v /= p.clone();
            }
            for r in 0..n {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in 0..2 * n {
                        let sub = &f * &aug[col][c];
                        aug[r][c] -= sub;
                    }
                }
            }
        }
        let entries: Vec<Vec<Rat>> = aug.into_iter().map(|row| row[n..].to_vec()).collect();
        Ok(LinearMap {
            entries,
            det: Rat::one() / self.det.clone(),
        })
    }

    /// `φ^{-t}`: inverse transpose, the contravariant action on directions.
    pub fn inverse_transpose(&self) -> Result<LinearMap> {
        Ok(self.inverse()?.transpose())
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        Vector(
            self.entries
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&x.0)
                        .map(|(a, b)| a * b)
                        .fold(Rat::zero(), |acc, t| acc + t)
                })
                .collect(),
        )
    }

    /// Apply to a float vector. Every f64 is an exact rational, so the
    /// product is computed exactly and rounded once at the end; this keeps
    /// ill-conditioned maps (e.g. inverses of large-determinant maps) from
    /// amplifying rounding error through cancellation.
    pub fn apply_f64(&self, u: &[f64]) -> Vec<f64> {
        let exact = Vector(
            u.iter()
                .map(|&c| Rat::from_float(c).unwrap_or_else(Rat::zero))
                .collect(),
        );
        self.apply(&exact).0.iter().map(rat_to_f64).collect()
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let n = self.n();
        let entries: Vec<Vec<Rat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| &self.entries[i][k] * &other.entries[k][j])
                            .fold(Rat::zero(), |acc, t| acc + t)
                    })
                    .collect()
            })
            .collect();
        LinearMap {
            entries,
            det: &self.det * &other.det,
        }
    }

    /// Multiply every entry by `s`.
    pub fn scaled(&self, s: &Rat) -> LinearMap {
        let n = self.n() as i32;
        LinearMap {
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e * s).collect())
                .collect(),
            det: &self.det * s.pow(n),
        }
    }
}

/// Determinant via rational Gaussian elimination with partial pivoting.
pub fn det_rat(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    if n == 0 {
        return Rat::one();
    }
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= p.clone();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &p;
                for c in col..n {
                    let sub = &f * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    det
}

/// Rank of a set of rational row vectors.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        if rank == m.len() {
            break;
        }
        let pivot = match (rank..m.len()).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        m.swap(rank, pivot);
        let p = m[rank][col].clone();
        for r in rank + 1..m.len() {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &p;
                for c in col..ncols {
                    let sub = &f * &m[rank][c];
                    m[r][c] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination: every
/// intermediate entry is a minor of the input, so the division by the
/// previous pivot is exact and no rational normalization is needed.
pub fn rank_int(mut rows: Vec<Vec<Int>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = Int::from(1);
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let pivot = match (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        rows.swap(rank, pivot);
        for r in rank + 1..rows.len() {
            for c in col + 1..ncols {
                let val = (&rows[rank][col] * &rows[r][c] - &rows[r][col] * &rows[rank][c])
                    / &prev;
                rows[r][c] = val;
            }
            rows[r][col] = Int::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
    }
    rank
}

/// One rational solution of the homogeneous system `rows · x = 0` that is
/// nonzero, for a coefficient matrix of rank `ncols - 1`. Returns `None`
/// if the null space is trivial or has dimension > 1.
pub fn null_vector(rows: &[Vec<Rat>]) -> Option<Vec<Rat>> {
    let ncols = rows.first()?.len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    // Reduced row echelon form.
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let pivot = match (r..m.len()).find(|&row| !m[row][col].is_zero()) {
            Some(p) => p,
            None => continue,
        };
        m.swap(r, pivot);
        let p = m[r][col].clone();
        for v in m[r].iter_mut() {
            *v /= p.clone();
        }
        for row in 0..m.len() {
            if row != r && !m[row][col].is_zero() {
                let f = m[row][col].clone();
                for c in 0..ncols {
                    let sub = &f * &m[r][c];
                    m[row][c] -= sub;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() != ncols - 1 {
        return None;
    }
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![Rat::zero(); ncols];
    x[free] = Rat::one();
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = -m[row][free].clone();
    }
    Some(x)
}

/// Solve the square system `a · x = b` exactly. `None` if singular.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= p.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=n {
                    let sub = &f * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl LinearMap {
    /// Permutation matrix sending `e_i` to `e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut entries = vec![vec![Rat::zero(); n]; n];
        for (i, &pi) in perm.iter().enumerate() {
            entries[pi][i] = Rat::one();
        }
        // Sign of the permutation.
        let mut seen = vec![false; n];
        let mut sign = 1i64;
        for i in 0..n {
            if !seen[i] {
                let mut len = 0;
                let mut j = i;
                while !seen[j] {
                    seen[j] = true;
                    j = perm[j];
                    len += 1;
                }
                if len % 2 == 0 {
                    sign = -sign;
                }
            }
        }
        LinearMap {
            entries,
            det: Rat::from_integer(sign.into()),
        }
    }

    /// Elementary shear `I + c·E_{ij}` for `i != j`; determinant 1.
    pub fn shear(n: usize, i: usize, j: usize, c: Rat) -> Self {
        assert_ne!(i, j);
        let mut m = LinearMap::identity(n);
        m.entries[i][j] = c;
        m
    }
}
