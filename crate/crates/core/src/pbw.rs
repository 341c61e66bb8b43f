//! Standard monomials in the modes of the generating space.
//!
//! For a generator `u` the mode symbol of degree `d ≥ 1` is `u_{wt u − 1 − d}`.
//! A monomial `u¹_{m₁} ⋯ u^k_{m_k}·1` is standard when its symbols are
//! non-increasing from left to right, where a symbol is larger when it has
//! higher degree, or the same degree and a smaller generator index.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::c1span::{Generator, LatticeVoa};
use crate::error::{Error, Result};
use crate::fock::{GradedVector, Homogeneity};
use crate::linalg::{binomial, Rref};

/// Generators in a fixed total order: by weight, then by construction order.
#[derive(Clone, Debug)]
pub struct GeneratingSpace {
    generators: Vec<Generator>,
}

pub fn order_basis(by_weight: &BTreeMap<u64, Vec<Generator>>) -> GeneratingSpace {
    GeneratingSpace {
        generators: by_weight.values().flatten().cloned().collect(),
    }
}

impl GeneratingSpace {
    pub fn new(generators: Vec<Generator>) -> Self {
        GeneratingSpace { generators }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn get(&self, i: usize) -> &Generator {
        &self.generators[i]
    }

    /// The space with generator `i` removed.
    pub fn without(&self, i: usize) -> GeneratingSpace {
        let mut generators = self.generators.clone();
        generators.remove(i);
        GeneratingSpace { generators }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModeSymbol {
    pub gen_index: usize,
    pub mode: i64,
    pub degree: u64,
}

impl ModeSymbol {
    pub fn new(space: &GeneratingSpace, gen_index: usize, degree: u64) -> Self {
        let wt = space.get(gen_index).weight as i64;
        ModeSymbol {
            gen_index,
            mode: wt - 1 - degree as i64,
            degree,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StandardMonomial {
    pub symbols: Vec<ModeSymbol>,
}

impl StandardMonomial {
    pub fn degree(&self) -> u64 {
        self.symbols.iter().map(|s| s.degree).sum()
    }
}

impl fmt::Display for StandardMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "u{}_{{{}}}", s.gen_index + 1, s.mode)?;
        }
        write!(f, "1")
    }
}

/// All standard monomials of total degree `n`, i.e. landing in `V_(n)`.
pub fn standard_monomials(space: &GeneratingSpace, n: u64) -> Vec<StandardMonomial> {
    // Symbols listed from largest to smallest; a standard monomial is a
    // sequence of positions into this list that never decreases.
    let order: Vec<ModeSymbol> = (1..=n)
        .rev()
        .flat_map(|d| (0..space.len()).map(move |i| (i, d)))
        .map(|(i, d)| ModeSymbol::new(space, i, d))
        .collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    collect_standard(&order, 0, n, &mut stack, &mut out);
    out
}

fn collect_standard(
    order: &[ModeSymbol],
    start: usize,
    remaining: u64,
    stack: &mut Vec<ModeSymbol>,
    out: &mut Vec<StandardMonomial>,
) {
    if remaining == 0 {
        out.push(StandardMonomial {
            symbols: stack.clone(),
        });
        return;
    }
    for (pos, s) in order.iter().enumerate().skip(start) {
        if s.degree > remaining {
            continue;
        }
        stack.push(*s);
        collect_standard(order, pos, remaining - s.degree, stack, out);
        stack.pop();
    }
}

/// Applies the symbols right to left to the vacuum.
pub fn evaluate_monomial(
    voa: &LatticeVoa,
    space: &GeneratingSpace,
    m: &StandardMonomial,
) -> Result<GradedVector> {
    let mut memo = HashMap::new();
    evaluate_suffix(voa, space, &m.symbols, &mut memo)
}

/// Evaluation memoized on suffixes, which standard monomials share heavily.
fn evaluate_suffix(
    voa: &LatticeVoa,
    space: &GeneratingSpace,
    symbols: &[ModeSymbol],
    memo: &mut HashMap<Vec<ModeSymbol>, GradedVector>,
) -> Result<GradedVector> {
    let Some((first, rest)) = symbols.split_first() else {
        return Ok(GradedVector::vacuum(voa.rank()));
    };
    if let Some(v) = memo.get(symbols) {
        return Ok(v.clone());
    }
    let tail = evaluate_suffix(voa, space, rest, memo)?;
    let v = voa
        .engine()
        .general_mode(&space.get(first.gen_index).vector, first.mode, &tail)?;
    memo.insert(symbols.to_vec(), v.clone());
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningReport {
    pub weight: u64,
    pub monomials: usize,
    pub rank: usize,
    pub dim: usize,
    pub spans: bool,
}

/// Rank of the standard monomials of degree `n` inside `V_(n)`.
pub fn spanning_check(voa: &LatticeVoa, space: &GeneratingSpace, n: u64) -> Result<SpanningReport> {
    let piece = voa.piece(n);
    let monomials = standard_monomials(space, n);
    let mut rref = Rref::zero(piece.dim());
    let mut memo = HashMap::new();
    for m in &monomials {
        if rref.is_full() {
            break;
        }
        let v = evaluate_suffix(voa, space, &m.symbols, &mut memo)?;
        rref.insert(&piece.coords(&v)?);
    }
    Ok(SpanningReport {
        weight: n,
        monomials: monomials.len(),
        rank: rref.rank(),
        dim: piece.dim(),
        spans: rref.is_full(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityEntry {
    pub generator: String,
    pub weight: u64,
    pub rank: usize,
    pub dim: usize,
    /// Whether removing this generator loses spanning at its own weight.
    pub needed: bool,
}

/// For each generator `u` of weight `k`, checks that the standard monomials
/// of degree `k` built from the remaining generators fail to span `V_(k)`.
pub fn minimality_check(voa: &LatticeVoa, space: &GeneratingSpace) -> Result<Vec<MinimalityEntry>> {
    (0..space.len())
        .map(|i| {
            let g = space.get(i);
            let r = spanning_check(voa, &space.without(i), g.weight)?;
            Ok(MinimalityEntry {
                generator: g.to_string(),
                weight: g.weight,
                rank: r.rank,
                dim: r.dim,
                needed: !r.spans,
            })
        })
        .collect()
}

fn homogeneous_weight(voa: &LatticeVoa, v: &GradedVector) -> Result<Option<u64>> {
    match v.weight(voa.lattice()) {
        Homogeneity::Zero => Ok(None),
        Homogeneity::Pure(w) => Ok(Some(w)),
        Homogeneity::Mixed => Err(Error::NotHomogeneous),
    }
}

/// The right side of the commutator formula
/// `[u_m, v_n] = Σ_{i ≥ 0} C(m,i) (u_i v)_{m+n−i}`, as pairs `(C(m,i) u_i v,
/// m+n−i)`. Terms vanish once `i ≥ wt u + wt v`; zero terms are dropped.
pub fn commutator_terms(
    voa: &LatticeVoa,
    u: &GradedVector,
    m: i64,
    v: &GradedVector,
    n: i64,
) -> Result<Vec<(GradedVector, i64)>> {
    let (Some(wu), Some(wv)) = (homogeneous_weight(voa, u)?, homogeneous_weight(voa, v)?) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for i in 0..(wu + wv) as i64 {
        let c = binomial(m, i as u64);
        if c.is_zero() {
            continue;
        }
        let x = voa.engine().general_mode(u, i, v)?;
        if !x.is_zero() {
            out.push((x.scaled(&c), m + n - i));
        }
    }
    Ok(out)
}

/// [`commutator_terms`] for two generators of `U`.
pub fn commutator_expand(
    voa: &LatticeVoa,
    space: &GeneratingSpace,
    u_idx: usize,
    m: i64,
    v_idx: usize,
    n: i64,
) -> Result<Vec<(GradedVector, i64)>> {
    commutator_terms(voa, &space.get(u_idx).vector, m, &space.get(v_idx).vector, n)
}

/// Both sides of the commutator formula applied to `w`; equal iff the
/// returned difference is zero.
pub fn commutator_defect(
    voa: &LatticeVoa,
    u: &GradedVector,
    m: i64,
    v: &GradedVector,
    n: i64,
    w: &GradedVector,
) -> Result<GradedVector> {
    let e = voa.engine();
    let lhs = &e.general_mode(u, m, &e.general_mode(v, n, w)?)?
        - &e.general_mode(v, n, &e.general_mode(u, m, w)?)?;
    let mut rhs = GradedVector::zero();
    for (x, k) in commutator_terms(voa, u, m, v, n)? {
        rhs = &rhs + &e.general_mode(&x, k, w)?;
    }
    Ok(&lhs - &rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorSampling {
    pub samples: usize,
    /// Operands `u`, `v` have weight at most this.
    pub operand_weight: u64,
    /// Modes `m`, `n` range over `−max_mode..=max_mode`.
    pub max_mode: i64,
    /// The identity is tested on every basis vector up to this weight.
    pub target_weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutatorReport {
    pub samples: usize,
    pub evaluations: usize,
    pub failures: Vec<String>,
}

fn random_homogeneous(voa: &LatticeVoa, rng: &mut ChaCha8Rng, max_weight: u64) -> GradedVector {
    loop {
        let piece = voa.piece(rng.gen_range(0..=max_weight));
        if piece.dim() == 0 {
            continue;
        }
        let mut v = GradedVector::zero();
        for _ in 0..rng.gen_range(1..=2) {
            let m = piece.basis()[rng.gen_range(0..piece.dim())].clone();
            let c = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
            v.add_term(m, crate::linalg::q(c));
        }
        if !v.is_zero() {
            return v;
        }
    }
}

/// The commutator formula on seeded random homogeneous `u`, `v` and modes,
/// applied to every basis vector of weight at most `target_weight`.
pub fn sample_commutators(voa: &LatticeVoa, seed: u64, cfg: CommutatorSampling) -> Result<CommutatorReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets: Vec<GradedVector> = (0..=cfg.target_weight)
        .flat_map(|k| voa.piece(k).basis().to_vec())
        .map(GradedVector::basis)
        .collect();
    let mut failures = Vec::new();
    let mut evaluations = 0;
    for _ in 0..cfg.samples {
        let u = random_homogeneous(voa, &mut rng, cfg.operand_weight);
        let v = random_homogeneous(voa, &mut rng, cfg.operand_weight);
        let m = rng.gen_range(-cfg.max_mode..=cfg.max_mode);
        let n = rng.gen_range(-cfg.max_mode..=cfg.max_mode);
        for w in &targets {
            evaluations += 1;
            if !commutator_defect(voa, &u, m, &v, n, w)?.is_zero() {
                failures.push(format!("[({u})_{{{m}}}, ({v})_{{{n}}}] on {w}"));
            }
        }
    }
    Ok(CommutatorReport {
        samples: cfg.samples,
        evaluations,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c1span::complement_basis;
    use crate::fock::{graded_basis, FockMonomial};
    use crate::lattice::{named_lattice, Lattice};

    fn setup(gram: Vec<Vec<i64>>, n_max: u64) -> (LatticeVoa, GeneratingSpace) {
        let voa = LatticeVoa::new(&Lattice::new(gram).unwrap());
        let space = order_basis(&complement_basis(&voa, n_max).unwrap());
        (voa, space)
    }

    #[test]
    fn standard_order() {
        let (_, space) = setup(vec![vec![2]], 3);
        assert_eq!(space.len(), 3);
        let ms = standard_monomials(&space, 2);
        // Degree-2 singles come first, then pairs of degree-1 symbols.
        assert_eq!(ms.len(), 3 + 6);
        assert_eq!(ms[0].symbols.len(), 1);
        for m in &ms {
            assert_eq!(m.degree(), 2);
            for w in m.symbols.windows(2) {
                let key = |s: &ModeSymbol| (std::cmp::Reverse(s.degree), s.gen_index);
                assert!(key(&w[0]) <= key(&w[1]));
            }
        }
        assert_eq!(standard_monomials(&space, 0).len(), 1);
    }

    #[test]
    fn mode_symbol_modes() {
        let (_, space) = setup(vec![vec![4]], 3);
        // b(-1) has weight 1, e(±1) weight 2.
        assert_eq!(ModeSymbol::new(&space, 0, 1).mode, -1);
        assert_eq!(ModeSymbol::new(&space, 1, 1).mode, 0);
        assert_eq!(ModeSymbol::new(&space, 1, 3).mode, -2);
    }

    #[test]
    fn spanning_examples() {
        let (voa, space) = setup(vec![vec![2]], 3);
        let r = spanning_check(&voa, &space, 3).unwrap();
        assert_eq!((r.rank, r.dim, r.spans), (7, 7, true));
        let (voa, space) = setup(vec![vec![4]], 4);
        for n in 1..=4 {
            assert!(spanning_check(&voa, &space, n).unwrap().spans);
        }
    }

    #[test]
    fn minimality_examples() {
        let (voa, space) = setup(vec![vec![4]], 4);
        let entries = minimality_check(&voa, &space).unwrap();
        assert_eq!(entries.len(), 3);
        assert!(entries.iter().all(|e| e.needed));
    }

    #[test]
    fn commutator_on_lattice_generators() {
        let voa = LatticeVoa::new(&named_lattice("A2", 1).unwrap());
        let space = order_basis(&complement_basis(&voa, 1).unwrap());
        let e = voa.engine();
        let ws: Vec<FockMonomial> = (0..=2).flat_map(|k| graded_basis(voa.lattice(), k)).collect();
        for (a, b) in [(0, 2), (2, 3), (4, 5), (1, 7)] {
            for (m, n) in [(0, 0), (1, -1), (-1, 0), (2, -2)] {
                let terms = commutator_expand(&voa, &space, a, m, b, n).unwrap();
                for w in &ws {
                    let w = GradedVector::basis(w.clone());
                    let (u, v) = (&space.get(a).vector, &space.get(b).vector);
                    let lhs = &e.general_mode(u, m, &e.general_mode(v, n, &w).unwrap()).unwrap()
                        - &e.general_mode(v, n, &e.general_mode(u, m, &w).unwrap()).unwrap();
                    let mut rhs = GradedVector::zero();
                    for (x, k) in &terms {
                        rhs = &rhs + &e.general_mode(x, *k, &w).unwrap();
                    }
                    assert_eq!(lhs, rhs, "[{a}_{m}, {b}_{n}] on {w}");
                }
            }
        }
    }

    #[test]
    fn seeded_commutator_samples() {
        let voa = LatticeVoa::new(&Lattice::new(vec![vec![4]]).unwrap());
        let cfg = CommutatorSampling {
            samples: 10,
            operand_weight: 3,
            max_mode: 4,
            target_weight: 3,
        };
        let a = sample_commutators(&voa, 7, cfg).unwrap();
        assert!(a.failures.is_empty(), "{:?}", a.failures);
        assert_eq!(a, sample_commutators(&voa, 7, cfg).unwrap());
    }

    #[test]
    fn commutator_terms_drop_weight() {
        let (voa, space) = setup(vec![vec![4]], 4);
        for (x, k) in commutator_expand(&voa, &space, 1, 2, 2, -1).unwrap() {
            let Homogeneity::Pure(w) = x.weight(voa.lattice()) else {
                panic!("zero terms are dropped");
            };
            assert!(w <= 3);
            assert!(k <= 1);
        }
    }
}
