//! Exact linear algebra over Q and Z.
//!
//! Subspaces are kept in reduced row-echelon form so that two spans can be
//! compared by equality of their canonical matrices. Ranks and determinants
//! of whole matrices go through fraction-free (Bareiss) elimination on the
//! integer matrix obtained by clearing denominators row by row.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Generalized binomial coefficient `C(n, k)` for any integer `n`.
pub fn binomial(n: i64, k: u64) -> Q {
    let mut acc = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        acc *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Q::new(acc, den)
}

/// Multiplies a rational row by the lcm of its denominators and divides out
/// the content, giving a primitive integer row spanning the same line.
pub fn clear_denominators(row: &[Q]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = row.iter().map(|x| (x * &lcm).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if content.is_zero() || content.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &content).collect()
    }
}

/// Result of fraction-free elimination: echelon rows, their pivot columns, and
/// the parity of the row permutation used.
pub struct BareissEchelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    pub swaps: usize,
}

/// Bareiss elimination. Every division is exact by Sylvester's identity; this
/// is checked in debug builds.
pub fn bareiss(mut m: Vec<Vec<BigInt>>) -> BareissEchelon {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            swaps += 1;
        }
        let (top, bottom) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            for j in c + 1..ncols {
                let num = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero(), "inexact Bareiss division");
                row[j] = num / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    BareissEchelon {
        rows: m,
        pivots,
        swaps,
    }
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    bareiss(rows.iter().map(|r| clear_denominators(r)).collect())
        .pivots
        .len()
}

/// Determinant of a square rational matrix.
pub fn determinant(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    if n == 0 {
        return Q::one();
    }
    // Clear denominators per row and remember the scale.
    let mut scale = Q::one();
    let mut ints = Vec::with_capacity(n);
    for row in m {
        let lcm = row
            .iter()
            .filter(|x| !x.is_zero())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale /= Q::from_integer(lcm.clone());
        ints.push(row.iter().map(|x| (x * &lcm).to_integer()).collect());
    }
    let ech = bareiss(ints);
    if ech.pivots.len() < n {
        return Q::zero();
    }
    let mut det = Q::from_integer(ech.rows[n - 1][n - 1].clone()) * scale;
    if ech.swaps % 2 == 1 {
        det = -det;
    }
    det
}

/// A subspace of `Q^dim` in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    dim: usize,
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn zero(dim: usize) -> Self {
        Rref {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Row space of `rows`, via fraction-free elimination followed by
    /// back substitution.
    pub fn from_rows(dim: usize, rows: &[Vec<Q>]) -> Self {
        assert!(rows.iter().all(|r| r.len() == dim), "row length mismatch");
        if rows.is_empty() {
            return Rref::zero(dim);
        }
        let ech = bareiss(rows.iter().map(|r| clear_denominators(r)).collect());
        let mut out: Vec<Vec<Q>> = ech
            .rows
            .into_iter()
            .zip(&ech.pivots)
            .map(|(row, &p)| {
                let lead = Q::from_integer(row[p].clone());
                row.into_iter().map(|x| Q::from_integer(x) / &lead).collect()
            })
            .collect();
        for i in (0..out.len()).rev() {
            let p = ech.pivots[i];
            let (above, rest) = out.split_at_mut(i);
            let pivot_row = &rest[0];
            for row in above.iter_mut() {
                if row[p].is_zero() {
                    continue;
                }
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        Rref {
            dim,
            rows: out,
            pivots: ech.pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after clearing every pivot column; zero iff `v` lies
    /// in the subspace.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_all(&self, other: &Rref) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Adds `v` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, v: &[Q]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = r[p].clone();
        for x in r.iter_mut() {
            if !x.is_zero() {
                *x /= &lead;
            }
        }
        for row in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    /// Basis of the null space `{x : M x = 0}` where `M` has these rows.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let free: Vec<usize> = (0..self.dim).filter(|c| !self.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![Q::zero(); self.dim];
                x[f] = Q::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    x[p] = -row[f].clone();
                }
                x
            })
            .collect()
    }
}

/// Solves `Σ c_j basis[j] = target` exactly; `None` when the target is not in
/// the span. The basis vectors must be linearly independent.
pub fn solve_combination(basis: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let k = basis.len();
    let dim = target.len();
    // Augmented system: one equation per ambient coordinate.
    let mut rows: Vec<Vec<Q>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Q> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..dim).find(|&i| !rows[i][c].is_zero()) else {
            return None;
        };
        rows.swap(p, r);
        let lead = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= &lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| rows[i][k].clone()).collect())
}

/// Row-style Hermite normal form of an integer matrix; zero rows dropped.
pub fn hermite_normal_form(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // Euclid on column c among rows r.. until a single nonzero remains.
        loop {
            let Some(p) = (r..nrows)
                .filter(|&i| !m[i][c].is_zero())
                .min_by_key(|&i| m[i][c].abs())
            else {
                break;
            };
            m.swap(p, r);
            let pivot_row = m[r].clone();
            for row in m[r + 1..].iter_mut() {
                if row[c].is_zero() {
                    continue;
                }
                let f = row[c].div_floor(&pivot_row[c]);
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
            if m[r + 1..].iter().all(|row| row[c].is_zero()) {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let pivot_row = m[r].clone();
        for i in 0..r {
            let f = m[i][c].div_floor(&pivot_row[c]);
            if f.is_zero() {
                continue;
            }
            for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}
