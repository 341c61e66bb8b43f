//! Positive-definite even lattices given by an integer Gram matrix.
//!
//! Besides the bilinear form this module enumerates short vectors and
//! computes `Φ(L)`, the nonzero `α` with `⟨α−β, β⟩ < 0` for every `β ∉ {0, α}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, q, Q};

/// Integer coordinates in the lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(rank: usize) -> Self {
        LatticeVector(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lattice {
    gram: Vec<Vec<i64>>,
}

/// `Φ(L)` together with the data used to find it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub phi: Vec<LatticeVector>,
    pub norm_histogram: BTreeMap<i64, usize>,
    pub spans_lattice: bool,
    pub enumeration_bound: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PhiChecks {
    pub negation_closed: bool,
    pub multiples_excluded: bool,
    pub pairing_bound: bool,
    pub spans_lattice: bool,
    pub min_shell_contained: bool,
}

impl PhiChecks {
    pub fn all(&self) -> bool {
        self.negation_closed
            && self.multiples_excluded
            && self.pairing_bound
            && self.spans_lattice
            && self.min_shell_contained
    }
}

impl Lattice {
    /// Validates symmetry, evenness and positive definiteness.
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 {
            return Err(Error::InvalidGram("rank must be positive".into()));
        }
        if gram.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGram("matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidGram(format!(
                        "not symmetric at ({i},{j})"
                    )));
                }
            }
            if gram[i][i] <= 0 || gram[i][i] % 2 != 0 {
                return Err(Error::InvalidGram(format!(
                    "diagonal entry {} at {i} is not a positive even integer",
                    gram[i][i]
                )));
            }
        }
        for k in 1..=n {
            let minor: Vec<Vec<Q>> = gram[..k]
                .iter()
                .map(|row| row[..k].iter().map(|&x| q(x)).collect())
                .collect();
            if !linalg::determinant(&minor).is_positive() {
                return Err(Error::InvalidGram(format!(
                    "leading principal minor of order {k} is not positive"
                )));
            }
        }
        Ok(Lattice { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// The same lattice with the form multiplied by `k`.
    pub fn scaled(&self, k: i64) -> Result<Self> {
        if k <= 0 {
            return Err(Error::InvalidGram(format!("scale {k} is not positive")));
        }
        Lattice::new(
            self.gram
                .iter()
                .map(|row| row.iter().map(|x| x * k).collect())
                .collect(),
        )
    }

    fn check_len(&self, v: &LatticeVector) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, v: &LatticeVector, w: &LatticeVector) -> Result<i64> {
        self.check_len(v)?;
        self.check_len(w)?;
        Ok(self.ip(&v.0, &w.0))
    }

    /// Unchecked form evaluation.
    pub(crate) fn ip(&self, v: &[i64], w: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, vi) in v.iter().enumerate() {
            if *vi == 0 {
                continue;
            }
            let row = &self.gram[i];
            acc += vi * row.iter().zip(w).map(|(g, x)| g * x).sum::<i64>();
        }
        acc
    }

    pub fn norm(&self, v: &LatticeVector) -> i64 {
        self.ip(&v.0, &v.0)
    }

    /// `G·v`, so that `⟨v, w⟩` becomes a plain dot product with `w`.
    pub(crate) fn lower(&self, v: &[i64]) -> Vec<i64> {
        self.gram
            .iter()
            .map(|row| row.iter().zip(v).map(|(g, x)| g * x).sum())
            .collect()
    }

    pub fn inverse_gram(&self) -> Vec<Vec<Q>> {
        let n = self.rank();
        let mut rows: Vec<Vec<Q>> = self
            .gram
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r: Vec<Q> = row.iter().map(|&x| q(x)).collect();
                r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
                r
            })
            .collect();
        let rref = linalg::Rref::from_rows(2 * n, &rows);
        rows = rref.rows().iter().map(|r| r[n..].to_vec()).collect();
        rows
    }

    /// Vectors of norm at most `bound`, sorted by norm and then
    /// lexicographically on coordinates.
    ///
    /// Uses an exact Fincke–Pohst search; [`Lattice::enumerate_box`] is the
    /// plain reference implementation it is tested against.
    pub fn enumerate_up_to_norm(&self, bound: i64) -> Vec<LatticeVector> {
        if bound < 0 {
            return Vec::new();
        }
        let n = self.rank();
        let qf = self.fincke_pohst_form();
        let mut out = Vec::new();
        let mut x = vec![0i64; n];
        self.fp_search(&qf, n - 1, &mut x, q(bound), &mut out);
        self.sorted(out)
    }

    /// Reference enumeration: every coordinate vector in the box
    /// `|x_i| ≤ sqrt(bound · (G⁻¹)_ii)`, filtered by norm.
    pub fn enumerate_box(&self, bound: i64) -> Vec<LatticeVector> {
        if bound < 0 {
            return Vec::new();
        }
        let inv = self.inverse_gram();
        let n = self.rank();
        let radius: Vec<i64> = (0..n)
            .map(|i| {
                // largest t with t² ≤ bound·(G⁻¹)_ii
                let r = &inv[i][i] * q(bound);
                let floor = r.floor().to_integer();
                floor.sqrt().to_i64().expect("box radius fits in i64")
            })
            .collect();
        let mut out = Vec::new();
        let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
        loop {
            if self.ip(&x, &x) <= bound {
                out.push(LatticeVector(x.clone()));
            }
            let mut i = 0;
            loop {
                if i == n {
                    return self.sorted(out);
                }
                if x[i] < radius[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = -radius[i];
                i += 1;
            }
        }
    }

    fn sorted(&self, mut vs: Vec<LatticeVector>) -> Vec<LatticeVector> {
        vs.sort_by_cached_key(|v| (self.norm(v), v.clone()));
        vs
    }

    /// Quadratic form in completed-square shape,
    /// `Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
    fn fincke_pohst_form(&self) -> Vec<Vec<Q>> {
        let n = self.rank();
        let mut qf: Vec<Vec<Q>> = self
            .gram
            .iter()
            .map(|row| row.iter().map(|&x| q(x)).collect())
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                qf[j][i] = qf[i][j].clone();
                qf[i][j] = &qf[i][j] / &qf[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let d = &qf[k][i] * &qf[i][l];
                    qf[k][l] -= d;
                }
            }
        }
        qf
    }

    fn fp_search(
        &self,
        qf: &[Vec<Q>],
        i: usize,
        x: &mut Vec<i64>,
        remaining: Q,
        out: &mut Vec<LatticeVector>,
    ) {
        let n = self.rank();
        let center: Q = (i + 1..n).map(|j| &qf[i][j] * q(x[j])).sum();
        let r = &remaining / &qf[i][i];
        let spread = r.floor().to_integer().sqrt() + BigInt::one();
        let lo = ((-&center).floor().to_integer() - &spread)
            .to_i64()
            .expect("coordinate fits in i64");
        let hi = ((-&center).ceil().to_integer() + &spread)
            .to_i64()
            .expect("coordinate fits in i64");
        for xi in lo..=hi {
            let d = q(xi) + &center;
            let t = &d * &d * &qf[i][i];
            if t > remaining {
                continue;
            }
            x[i] = xi;
            if i == 0 {
                out.push(LatticeVector(x.clone()));
            } else {
                self.fp_search(qf, i - 1, x, &remaining - &t, out);
            }
        }
        x[i] = 0;
    }

    /// All vectors of norm exactly `m`.
    pub fn shell(&self, m: i64) -> Result<Vec<LatticeVector>> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::BadShellNorm(m));
        }
        Ok(self
            .enumerate_up_to_norm(m)
            .into_iter()
            .filter(|v| self.norm(v) == m)
            .collect())
    }

    /// Gram–Schmidt over Q applied to the standard basis, each vector scaled
    /// to a primitive lattice vector.
    pub fn gram_schmidt_family(&self) -> Vec<LatticeVector> {
        let mut family = Vec::new();
        for i in 0..self.rank() {
            let b = LatticeVector::unit(self.rank(), i);
            family.push(
                self.project_away(&b, &family)
                    .expect("standard basis is independent"),
            );
        }
        family
    }

    /// Orthogonal family built greedily from the shortest available vectors:
    /// at each step the first vector (norm-then-lex) of norm at most the
    /// largest diagonal Gram entry that is orthogonal to everything chosen so
    /// far, falling back to a Gram–Schmidt projection of a basis vector.
    pub fn short_orthogonal_family(&self) -> Vec<LatticeVector> {
        let max_diag = (0..self.rank()).map(|i| self.gram[i][i]).max().unwrap_or(0);
        let short = self.enumerate_up_to_norm(max_diag);
        let mut family: Vec<LatticeVector> = Vec::new();
        while family.len() < self.rank() {
            let pick = short.iter().find(|v| {
                !v.is_zero() && family.iter().all(|a| self.ip(&v.0, &a.0) == 0)
            });
            let next = match pick {
                Some(v) => v.clone(),
                None => (0..self.rank())
                    .find_map(|i| {
                        self.project_away(&LatticeVector::unit(self.rank(), i), &family)
                    })
                    .expect("family has fewer than rank vectors"),
            };
            family.push(next);
        }
        family
    }

    /// Component of `v` orthogonal to the (pairwise orthogonal) `family`,
    /// scaled to a primitive lattice vector; `None` if it vanishes.
    fn project_away(&self, v: &LatticeVector, family: &[LatticeVector]) -> Option<LatticeVector> {
        let mut w: Vec<Q> = v.0.iter().map(|&x| q(x)).collect();
        for a in family {
            let c = Q::new(
                BigInt::from(self.ip(&v.0, &a.0)),
                BigInt::from(self.norm(a)),
            );
            for (wi, ai) in w.iter_mut().zip(&a.0) {
                *wi -= &c * q(*ai);
            }
        }
        if w.iter().all(Zero::is_zero) {
            return None;
        }
        let ints = linalg::clear_denominators(&w);
        Some(LatticeVector(
            ints.iter()
                .map(|x| x.to_i64().expect("coordinate fits in i64"))
                .collect(),
        ))
    }

    /// Every `α ∈ Φ(L)` has `⟨α,α⟩` at most the returned value.
    ///
    /// For an orthogonal family `α_1..α_n` and `α ∈ Φ(L)` other than `±α_i`,
    /// `|⟨α,α_i⟩| < ⟨α_i,α_i⟩`, so `α = Σ c_i α_i` with `|c_i| < 1` and
    /// `⟨α,α⟩ < Σ ⟨α_i,α_i⟩`. Two families are tried (Gram–Schmidt of the
    /// standard basis and the greedy short family) and the smaller bound kept;
    /// either one is a valid bound on its own.
    pub fn phi_enumeration_bound(&self) -> i64 {
        self.bound_family().1
    }

    fn bound_family(&self) -> (Vec<LatticeVector>, i64) {
        let sum = |f: &[LatticeVector]| f.iter().map(|a| self.norm(a)).sum::<i64>();
        let gs = self.gram_schmidt_family();
        let greedy = self.short_orthogonal_family();
        let (gs_bound, greedy_bound) = (sum(&gs), sum(&greedy));
        if greedy_bound < gs_bound {
            (greedy, greedy_bound)
        } else {
            (gs, gs_bound)
        }
    }

    /// Membership in `Φ(L)`.
    ///
    /// Only `β` with `⟨β,β⟩ ≤ ⟨α,α⟩` need to be examined: if
    /// `⟨β,β⟩ > ⟨α,α⟩` then by Cauchy–Schwarz
    /// `⟨α−β,β⟩ = ⟨α,β⟩ − ⟨β,β⟩ ≤ |β|(|α| − |β|) < 0`, so such `β` never
    /// witnesses `α ∉ Φ(L)`.
    pub fn is_in_phi(&self, alpha: &LatticeVector) -> Result<bool> {
        self.check_len(alpha)?;
        self.is_in_phi_within(alpha, self.norm(alpha))
    }

    /// Like [`Lattice::is_in_phi`] but scanning every `β` of norm up to
    /// `ball`. Any `ball ≥ ⟨α,α⟩` gives the same answer.
    pub fn is_in_phi_within(&self, alpha: &LatticeVector, ball: i64) -> Result<bool> {
        self.check_len(alpha)?;
        if alpha.is_zero() {
            return Err(Error::ZeroVector);
        }
        let ga = self.lower(&alpha.0);
        Ok(!self
            .enumerate_up_to_norm(ball)
            .iter()
            .any(|b| Self::witnesses(&ga, b, self.norm(b), alpha)))
    }

    /// [`Lattice::is_in_phi`] for many vectors, sharing one enumeration.
    pub fn is_in_phi_batch(&self, alphas: &[LatticeVector]) -> Result<Vec<bool>> {
        for a in alphas {
            self.check_len(a)?;
            if a.is_zero() {
                return Err(Error::ZeroVector);
            }
        }
        let ball = alphas.iter().map(|a| self.norm(a)).max().unwrap_or(0);
        let candidates = self.enumerate_up_to_norm(ball);
        let norms: Vec<i64> = candidates.iter().map(|v| self.norm(v)).collect();
        Ok(alphas
            .iter()
            .map(|alpha| {
                let an = self.norm(alpha);
                let ga = self.lower(&alpha.0);
                !candidates
                    .iter()
                    .zip(&norms)
                    .take_while(|(_, &bn)| bn <= an)
                    .any(|(b, &bn)| Self::witnesses(&ga, b, bn, alpha))
            })
            .collect())
    }

    /// True when `β ∉ {0, α}` and `⟨α−β, β⟩ ≥ 0`.
    fn witnesses(g_alpha: &[i64], beta: &LatticeVector, beta_norm: i64, alpha: &LatticeVector) -> bool {
        if beta.is_zero() || beta == alpha {
            return false;
        }
        let ab: i64 = g_alpha.iter().zip(&beta.0).map(|(a, b)| a * b).sum();
        ab - beta_norm >= 0
    }

    pub fn phi_set(&self) -> PhiReport {
        let (family, bound) = self.bound_family();
        let mut candidates = self.enumerate_up_to_norm(bound);
        for a in &family {
            for v in [a.clone(), -a] {
                if !candidates.contains(&v) {
                    candidates.push(v);
                }
            }
        }
        let candidates = self.sorted(candidates);
        let norms: Vec<i64> = candidates.iter().map(|v| self.norm(v)).collect();
        let mut phi = Vec::new();
        for (alpha, &an) in candidates.iter().zip(&norms) {
            if alpha.is_zero() {
                continue;
            }
            let ga = self.lower(&alpha.0);
            // Sorted by norm, so the ball ⟨β,β⟩ ≤ ⟨α,α⟩ is a prefix.
            let in_phi = !candidates
                .iter()
                .zip(&norms)
                .take_while(|(_, &bn)| bn <= an)
                .any(|(b, &bn)| Self::witnesses(&ga, b, bn, alpha));
            if in_phi {
                phi.push(alpha.clone());
            }
        }
        let mut norm_histogram = BTreeMap::new();
        for a in &phi {
            *norm_histogram.entry(self.norm(a)).or_insert(0) += 1;
        }
        let spans_lattice = self.zspan_check(&phi);
        PhiReport {
            phi,
            norm_histogram,
            spans_lattice,
            enumeration_bound: bound,
        }
    }

    /// Structural checks on a computed `Φ(L)`: closure under negation, no
    /// `nα` with `n = ±2, ±3`, `⟨α,β⟩ < ⟨α,α⟩` for `α ≠ β`, integer span,
    /// and containment of the minimal-norm shell.
    pub fn phi_checks(&self, report: &PhiReport) -> Result<PhiChecks> {
        let members: BTreeSet<&LatticeVector> = report.phi.iter().collect();
        let negation_closed = report.phi.iter().all(|a| members.contains(&(-a)));
        let multiples: Vec<LatticeVector> = report
            .phi
            .iter()
            .flat_map(|a| [2, -2, 3, -3].map(|n| a.scale(n)))
            .collect();
        let multiples_excluded = !self.is_in_phi_batch(&multiples)?.into_iter().any(|b| b);
        let pairing_bound = report.phi.iter().all(|a| {
            let na = self.norm(a);
            report
                .phi
                .iter()
                .all(|b| a == b || self.ip(&a.0, &b.0) < na)
        });
        let min_norm = self.minimal_norm();
        let min_shell_contained = self
            .shell(min_norm)?
            .iter()
            .all(|v| members.contains(v));
        Ok(PhiChecks {
            negation_closed,
            multiples_excluded,
            pairing_bound,
            spans_lattice: self.zspan_check(&report.phi),
            min_shell_contained,
        })
    }

    /// Smallest nonzero norm.
    pub fn minimal_norm(&self) -> i64 {
        let diag = (0..self.rank()).map(|i| self.gram[i][i]).min().unwrap_or(2);
        self.enumerate_up_to_norm(diag)
            .iter()
            .map(|v| self.norm(v))
            .filter(|&n| n > 0)
            .min()
            .unwrap_or(diag)
    }

    /// Whether the integer span of `vectors` is the whole lattice.
    pub fn zspan_check(&self, vectors: &[LatticeVector]) -> bool {
        if vectors.is_empty() {
            return false;
        }
        let rows = vectors
            .iter()
            .map(|v| v.0.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let hnf = linalg::hermite_normal_form(rows);
        hnf.len() == self.rank()
            && hnf.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
            })
    }
}

fn cartan_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(a, b) in edges {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    g
}

/// Simply-laced root lattice by Cartan type (`A1`, `A2`, …, `D4`, …, `E6`,
/// `E7`, `E8`) with the form scaled by `scale`.
pub fn named_lattice(name: &str, scale: i64) -> Result<Lattice> {
    let unknown = || Error::UnknownLattice(name.to_string());
    let trimmed = name.trim();
    let (kind, n) = trimmed.split_at(trimmed.chars().next().map_or(0, char::len_utf8));
    let n: usize = n.parse().map_err(|_| unknown())?;
    let chain = |n: usize| (1..n).map(|i| (i - 1, i)).collect::<Vec<_>>();
    let gram = match kind.to_ascii_uppercase().as_str() {
        "A" if n >= 1 => cartan_from_edges(n, &chain(n)),
        "D" if n >= 4 => {
            let mut edges = chain(n - 1);
            edges.push((n - 3, n - 1));
            cartan_from_edges(n, &edges)
        }
        "E" if (6..=8).contains(&n) => {
            // Bourbaki labelling: 1-3-4-5-6-7-8 with 2 attached to 4.
            let mut edges = vec![(0, 2), (1, 3)];
            edges.extend((2..n - 1).map(|i| (i, i + 1)));
            cartan_from_edges(n, &edges)
        }
        _ => return Err(unknown()),
    };
    Lattice::new(gram)?.scaled(scale)
}
