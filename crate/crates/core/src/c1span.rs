//! Degreewise `C₁(V_L)`, `C₂(V_L)` and the generating complement `U`.
//!
//! `C₁` is computed twice: by brute force from its definition (span of
//! `u_{−1}v` for `u, v` of positive weight together with `L(−1)V`) and from
//! the closed-form monomial spanning set `K`. The two must agree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{graded_basis, FockMonomial, GradedVector, ModeEngine, Part};
use crate::lattice::{Lattice, LatticeVector, PhiReport};
use crate::linalg::{Rref, Q};
use crate::TwoCocycle;

/// The basis of one weight space `V_(n)` with a monomial → column index.
#[derive(Debug)]
pub struct GradedPiece {
    weight: u64,
    basis: Vec<FockMonomial>,
    index: HashMap<FockMonomial, usize>,
}

impl GradedPiece {
    fn new(lattice: &Lattice, weight: u64) -> Self {
        let basis = graded_basis(lattice, weight);
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        GradedPiece {
            weight,
            basis,
            index,
        }
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FockMonomial] {
        &self.basis
    }

    pub fn coords(&self, v: &GradedVector) -> Result<Vec<Q>> {
        let mut out = vec![Q::zero(); self.dim()];
        for (m, c) in v.iter() {
            let i = *self
                .index
                .get(m)
                .ok_or(Error::OutsidePiece(self.weight))?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    pub fn vector(&self, coords: &[Q]) -> GradedVector {
        let mut v = GradedVector::zero();
        for (m, c) in self.basis.iter().zip(coords) {
            v.add_term(m.clone(), c.clone());
        }
        v
    }

    fn unit(&self, i: usize) -> Vec<Q> {
        let mut e = vec![Q::zero(); self.dim()];
        e[i] = Q::one();
        e
    }
}

/// A subspace of `V_(n)`, in reduced row-echelon form over the monomial
/// basis of [`GradedPiece`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_weight: u64,
    rref: Rref,
}

impl SubspaceBasis {
    pub fn ambient_weight(&self) -> u64 {
        self.ambient_weight
    }

    pub fn ambient_dim(&self) -> usize {
        self.rref.dim()
    }

    pub fn rank(&self) -> usize {
        self.rref.rank()
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        self.rref.rows()
    }

    pub fn rref(&self) -> &Rref {
        &self.rref
    }

    pub fn contains_coords(&self, v: &[Q]) -> bool {
        self.rref.contains(v)
    }

    pub fn contains(&self, other: &SubspaceBasis) -> bool {
        self.ambient_weight == other.ambient_weight && self.rref.contains_all(&other.rref)
    }
}

/// `V_L` for one lattice: the mode engine, `Φ(L)`, and memoized weight
/// spaces and `C₁` pieces.
#[derive(Debug)]
pub struct LatticeVoa {
    engine: ModeEngine,
    phi: PhiReport,
    phi_members: BTreeSet<LatticeVector>,
    pieces: Mutex<BTreeMap<u64, Arc<GradedPiece>>>,
    c1: Mutex<BTreeMap<u64, Arc<SubspaceBasis>>>,
}

impl LatticeVoa {
    pub fn new(lattice: &Lattice) -> Self {
        LatticeVoa::with_cocycle(lattice, TwoCocycle::build(lattice))
    }

    pub fn with_cocycle(lattice: &Lattice, cocycle: TwoCocycle) -> Self {
        let phi = lattice.phi_set();
        LatticeVoa {
            engine: ModeEngine::new(lattice.clone(), cocycle),
            phi_members: phi.phi.iter().cloned().collect(),
            phi,
            pieces: Mutex::new(BTreeMap::new()),
            c1: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn engine(&self) -> &ModeEngine {
        &self.engine
    }

    pub fn lattice(&self) -> &Lattice {
        self.engine.lattice()
    }

    pub fn cocycle(&self) -> &TwoCocycle {
        self.engine.cocycle()
    }

    pub fn phi(&self) -> &PhiReport {
        &self.phi
    }

    pub fn rank(&self) -> usize {
        self.lattice().rank()
    }

    pub fn in_phi(&self, v: &LatticeVector) -> bool {
        self.phi_members.contains(v)
    }

    pub fn piece(&self, n: u64) -> Arc<GradedPiece> {
        if let Some(p) = self.pieces.lock().expect("poisoned").get(&n) {
            return p.clone();
        }
        let p = Arc::new(GradedPiece::new(self.lattice(), n));
        self.pieces
            .lock()
            .expect("poisoned")
            .entry(n)
            .or_insert(p)
            .clone()
    }

    /// Memoized [`c1_bruteforce`].
    pub fn c1(&self, n: u64) -> Result<Arc<SubspaceBasis>> {
        if let Some(s) = self.c1.lock().expect("poisoned").get(&n) {
            return Ok(s.clone());
        }
        let s = Arc::new(c1_bruteforce(self, n)?);
        Ok(self
            .c1
            .lock()
            .expect("poisoned")
            .entry(n)
            .or_insert(s)
            .clone())
    }

    /// Largest weight of a lattice generator, i.e. `max ⟨α,α⟩/2` over `Φ(L)`.
    pub fn top_phi_weight(&self) -> u64 {
        self.phi
            .norm_histogram
            .keys()
            .max()
            .map_or(0, |&n| (n / 2) as u64)
    }
}

/// Default weight cutoff: two past the heaviest generator.
pub fn default_n_max(voa: &LatticeVoa) -> u64 {
    voa.top_phi_weight().max(1) + 2
}

/// Row space of `u_{−1}v` (`u ∈ V_(p)`, `v ∈ V_(q)`, `p, q ≥ 1`, `p+q = n`)
/// and `L(−1)w` (`w ∈ V_(n−1)`). Stops early once the span is all of `V_(n)`.
pub fn c1_bruteforce(voa: &LatticeVoa, n: u64) -> Result<SubspaceBasis> {
    let piece = voa.piece(n);
    let mut rref = Rref::zero(piece.dim());
    if n >= 1 {
        let lower = voa.piece(n - 1);
        for w in lower.basis() {
            let v = voa.engine().virasoro_lm1(&GradedVector::basis(w.clone()));
            rref.insert(&piece.coords(&v)?);
            if rref.is_full() {
                break;
            }
        }
    }
    'outer: for p in 1..n {
        let left = voa.piece(p);
        let right = voa.piece(n - p);
        for u in left.basis() {
            for v in right.basis() {
                if rref.is_full() {
                    break 'outer;
                }
                let x = voa.engine().mode_on(u, -1, v);
                rref.insert(&piece.coords(&x)?);
            }
        }
    }
    Ok(SubspaceBasis {
        ambient_weight: n,
        rref,
    })
}

/// Which basis monomials belong to the closed-form spanning set `K`: two or
/// more Heisenberg parts; one part and a nonzero lattice point; a single
/// part of level at least 2 on the vacuum; or a bare `ι(e_β)` with
/// `β ∉ Φ(L) ∪ {0}`.
pub fn in_closed_form_span_set(voa: &LatticeVoa, m: &FockMonomial) -> bool {
    match m.parts() {
        [] => !m.point.is_zero() && !voa.in_phi(&m.point),
        [p] => !m.point.is_zero() || p.level >= 2,
        _ => true,
    }
}

pub fn c1_closedform(voa: &LatticeVoa, n: u64) -> SubspaceBasis {
    let piece = voa.piece(n);
    let rows: Vec<Vec<Q>> = piece
        .basis()
        .iter()
        .enumerate()
        .filter(|(_, m)| in_closed_form_span_set(voa, m))
        .map(|(i, _)| piece.unit(i))
        .collect();
    SubspaceBasis {
        ambient_weight: n,
        rref: Rref::from_rows(piece.dim(), &rows),
    }
}

/// Row space of `u_{−2}v` for `u ∈ V_(p)`, `v ∈ V_(q)`, `p + q = n − 1`.
pub fn c2_subspace(voa: &LatticeVoa, n: u64) -> Result<SubspaceBasis> {
    let piece = voa.piece(n);
    let mut rref = Rref::zero(piece.dim());
    if n >= 1 {
        'outer: for p in 0..n {
            let left = voa.piece(p);
            let right = voa.piece(n - 1 - p);
            for u in left.basis() {
                for v in right.basis() {
                    if rref.is_full() {
                        break 'outer;
                    }
                    let x = voa.engine().mode_on(u, -2, v);
                    rref.insert(&piece.coords(&x)?);
                }
            }
        }
    }
    Ok(SubspaceBasis {
        ambient_weight: n,
        rref,
    })
}

/// `dim V_(n) − dim C₁(V)_(n)` for `n = 1..=n_max`.
pub fn q_dims(voa: &LatticeVoa, n_max: u64) -> Result<Vec<usize>> {
    (1..=n_max)
        .map(|n| Ok(voa.piece(n).dim() - voa.c1(n)?.rank()))
        .collect()
}

/// `|{α ∈ Φ(L) : ⟨α,α⟩ = 2n}| + rank·δ_{n,1}`.
pub fn expected_q_dim(voa: &LatticeVoa, n: u64) -> usize {
    let lattice_part = voa
        .phi()
        .norm_histogram
        .get(&(2 * n as i64))
        .copied()
        .unwrap_or(0);
    lattice_part + if n == 1 { voa.rank() } else { 0 }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorLabel {
    Heisenberg { color: usize },
    Lattice { point: LatticeVector },
}

/// One basis vector of the generating space `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: GeneratorLabel,
    pub weight: u64,
    pub vector: GradedVector,
}

impl Generator {
    pub fn heisenberg(rank: usize, color: usize) -> Self {
        Generator {
            label: GeneratorLabel::Heisenberg { color },
            weight: 1,
            vector: GradedVector::basis(FockMonomial::new(
                LatticeVector::zero(rank),
                vec![Part {
                    level: 1,
                    color: color as u32,
                }],
            )),
        }
    }

    pub fn lattice(lattice: &Lattice, point: LatticeVector) -> Self {
        Generator {
            weight: (lattice.norm(&point) / 2) as u64,
            vector: GradedVector::basis(FockMonomial::lattice_state(point.clone())),
            label: GeneratorLabel::Lattice { point },
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            GeneratorLabel::Heisenberg { color } => write!(f, "b{}(-1)", color + 1),
            GeneratorLabel::Lattice { point } => write!(f, "e{point}"),
        }
    }
}

/// The candidate generators of weight `n`: `b_i(−1)1` at weight 1, and
/// `ι(e_α)` for `α ∈ Φ(L)` of norm `2n`.
pub fn candidate_generators(voa: &LatticeVoa, n: u64) -> Vec<Generator> {
    let mut out = Vec::new();
    if n == 1 {
        out.extend((0..voa.rank()).map(|c| Generator::heisenberg(voa.rank(), c)));
    }
    out.extend(
        voa.phi()
            .phi
            .iter()
            .filter(|a| voa.lattice().norm(a) == 2 * n as i64)
            .map(|a| Generator::lattice(voa.lattice(), a.clone())),
    );
    out
}

/// The generating space by weight, after checking at every weight
/// `1..=n_max` that the candidates are independent modulo `C₁(V)_(n)` and
/// together with it fill `V_(n)`.
pub fn complement_basis(voa: &LatticeVoa, n_max: u64) -> Result<BTreeMap<u64, Vec<Generator>>> {
    let mut out = BTreeMap::new();
    for n in 1..=n_max {
        let piece = voa.piece(n);
        let c1 = voa.c1(n)?;
        let mut span = c1.rref().clone();
        let gens = candidate_generators(voa, n);
        for g in &gens {
            if !span.insert(&piece.coords(&g.vector)?) {
                return Err(Error::ComplementMismatch {
                    weight: n,
                    detail: format!("{g} is dependent modulo C1"),
                });
            }
        }
        if !span.is_full() {
            return Err(Error::ComplementMismatch {
                weight: n,
                detail: format!(
                    "C1 plus {} generators spans {} of {} dimensions",
                    gens.len(),
                    span.rank(),
                    piece.dim()
                ),
            });
        }
        if !gens.is_empty() {
            out.insert(n, gens);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named_lattice;

    fn voa(gram: Vec<Vec<i64>>) -> LatticeVoa {
        LatticeVoa::new(&Lattice::new(gram).unwrap())
    }

    #[test]
    fn c1_examples() {
        let a1 = voa(vec![vec![2]]);
        assert_eq!(c1_bruteforce(&a1, 1).unwrap().rank(), 0);
        assert_eq!(c1_bruteforce(&a1, 2).unwrap().rank(), 4);
        assert_eq!(c1_closedform(&a1, 1).rank(), 0);
        assert_eq!(c1_closedform(&a1, 2).rank(), 4);
        let four = voa(vec![vec![4]]);
        let dim2 = four.piece(2).dim();
        assert_eq!(dim2, 4);
        assert_eq!(c1_bruteforce(&four, 2).unwrap().rank(), dim2 - 2);
        assert_eq!(c1_closedform(&four, 2).rank(), dim2 - 2);
    }

    #[test]
    fn c2_examples() {
        let a1 = voa(vec![vec![2]]);
        assert_eq!(c2_subspace(&a1, 1).unwrap().rank(), 0);
        let c2 = c2_subspace(&a1, 2).unwrap();
        let piece = a1.piece(2);
        let h2 = GradedVector::basis(FockMonomial::new(
            LatticeVector::zero(1),
            vec![Part { level: 2, color: 0 }],
        ));
        assert!(c2.contains_coords(&piece.coords(&h2).unwrap()));
        for n in 1..=4 {
            assert!(c1_bruteforce(&a1, n).unwrap().contains(&c2_subspace(&a1, n).unwrap()));
        }
    }

    #[test]
    fn q_dim_examples() {
        assert_eq!(q_dims(&voa(vec![vec![2]]), 5).unwrap(), vec![3, 0, 0, 0, 0]);
        assert_eq!(q_dims(&voa(vec![vec![4]]), 5).unwrap(), vec![1, 2, 0, 0, 0]);
    }

    #[test]
    fn complement_examples() {
        let a1 = voa(vec![vec![2]]);
        let u = complement_basis(&a1, 4).unwrap();
        assert_eq!(u.len(), 1);
        let names: Vec<String> = u[&1].iter().map(ToString::to_string).collect();
        assert_eq!(names, vec!["b1(-1)", "e(-1)", "e(1)"]);

        let four = voa(vec![vec![4]]);
        let u = complement_basis(&four, 4).unwrap();
        assert_eq!(u[&1].len(), 1);
        assert_eq!(u[&2].len(), 2);
        assert_eq!(default_n_max(&four), 4);

        let a2 = LatticeVoa::new(&named_lattice("A2", 1).unwrap());
        let u = complement_basis(&a2, 2).unwrap();
        assert_eq!(u[&1].len(), 8);
    }

    #[test]
    fn wrong_candidates_are_caught() {
        // Dropping the Φ restriction puts ι(e_{±2α}) ∈ C₁ among the candidates.
        let a1 = voa(vec![vec![2]]);
        let piece = a1.piece(4);
        let c1 = a1.c1(4).unwrap();
        let mut span = c1.rref().clone();
        let g = Generator::lattice(a1.lattice(), LatticeVector(vec![2]));
        assert!(!span.insert(&piece.coords(&g.vector).unwrap()));
    }

    #[test]
    fn negative_modes_land_in_c1() {
        let four = voa(vec![vec![4]]);
        for n in 2..=4u64 {
            let c1 = four.c1(n).unwrap();
            let piece = four.piece(n);
            for r in 1..=3i64 {
                for p in 1..n {
                    let qw = n as i64 - p as i64 - r + 1;
                    if qw < 1 {
                        continue;
                    }
                    for u in four.piece(p).basis() {
                        for v in four.piece(qw as u64).basis() {
                            let x = four.engine().mode_on(u, -r, v);
                            assert!(c1.contains_coords(&piece.coords(&x).unwrap()));
                        }
                    }
                }
            }
        }
    }
}
