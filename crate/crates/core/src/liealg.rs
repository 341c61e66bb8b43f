//! The Lie algebra `V₊/C₁(V)` realized on the generating space `U`, with
//! bracket `[ū, v̄] = \overline{u₀v}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::c1span::{GeneratorLabel, LatticeVoa};
use crate::error::{Error, Result};
use crate::fock::{GradedVector, Homogeneity};
use crate::linalg::{q, Rref, Q};
use crate::pbw::GeneratingSpace;

/// Expresses vectors of `V_(t)` in `U`-coordinates modulo `C₁(V)_(t)`.
///
/// Rows are `[c | 0]` for a basis of `C₁` and `[g_i | e_i]` for the
/// generators of weight `t`. Reducing `[x | 0]` to `[0 | −c]` reads off `c`.
struct WeightReducer {
    weight: u64,
    ambient: usize,
    gen_indices: Vec<usize>,
    rref: Rref,
}

impl WeightReducer {
    fn new(voa: &LatticeVoa, space: &GeneratingSpace, weight: u64) -> Result<Self> {
        let piece = voa.piece(weight);
        let c1 = voa.c1(weight)?;
        let gen_indices: Vec<usize> = (0..space.len())
            .filter(|&i| space.get(i).weight == weight)
            .collect();
        let k = gen_indices.len();
        let ambient = piece.dim();
        let mut rows: Vec<Vec<Q>> = c1
            .rows()
            .iter()
            .map(|r| {
                let mut row = r.clone();
                row.resize(ambient + k, Q::zero());
                row
            })
            .collect();
        for (j, &i) in gen_indices.iter().enumerate() {
            let mut row = piece.coords(&space.get(i).vector)?;
            row.resize(ambient + k, Q::zero());
            row[ambient + j] = Q::one();
            rows.push(row);
        }
        let rref = Rref::from_rows(ambient + k, &rows);
        if rref.pivots().iter().any(|&p| p >= ambient) {
            return Err(Error::ComplementMismatch {
                weight,
                detail: "generators are dependent modulo C1".into(),
            });
        }
        Ok(WeightReducer {
            weight,
            ambient,
            gen_indices,
            rref,
        })
    }

    fn coordinates(&self, voa: &LatticeVoa, x: &GradedVector, dim: usize) -> Result<Vec<Q>> {
        let mut row = voa.piece(self.weight).coords(x)?;
        row.resize(self.ambient + self.gen_indices.len(), Q::zero());
        let r = self.rref.reduce(&row);
        if r[..self.ambient].iter().any(|c| !c.is_zero()) {
            return Err(Error::Reduction {
                weight: self.weight,
            });
        }
        let mut out = vec![Q::zero(); dim];
        for (j, &i) in self.gen_indices.iter().enumerate() {
            out[i] = -r[self.ambient + j].clone();
        }
        Ok(out)
    }
}

/// Computes brackets of generating-space vectors, caching one reducer per
/// target weight.
pub struct BracketEngine<'a> {
    voa: &'a LatticeVoa,
    space: &'a GeneratingSpace,
    reducers: BTreeMap<u64, WeightReducer>,
}

impl<'a> BracketEngine<'a> {
    pub fn new(voa: &'a LatticeVoa, space: &'a GeneratingSpace) -> Self {
        BracketEngine {
            voa,
            space,
            reducers: BTreeMap::new(),
        }
    }

    /// `U`-coordinates of `u₀v` modulo `C₁`.
    pub fn bracket(&mut self, u: &GradedVector, v: &GradedVector) -> Result<Vec<Q>> {
        let x = self.voa.engine().general_mode(u, 0, v)?;
        self.reduce(&x)
    }

    /// `U`-coordinates of a homogeneous vector modulo `C₁`.
    pub fn reduce(&mut self, x: &GradedVector) -> Result<Vec<Q>> {
        let weight = match x.weight(self.voa.lattice()) {
            Homogeneity::Zero => return Ok(vec![Q::zero(); self.space.len()]),
            Homogeneity::Pure(w) => w,
            Homogeneity::Mixed => return Err(Error::NotHomogeneous),
        };
        if !self.reducers.contains_key(&weight) {
            let r = WeightReducer::new(self.voa, self.space, weight)?;
            self.reducers.insert(weight, r);
        }
        self.reducers[&weight].coordinates(self.voa, x, self.space.len())
    }
}

/// One-shot bracket; prefer [`BracketEngine`] for many brackets.
pub fn bracket(
    voa: &LatticeVoa,
    space: &GeneratingSpace,
    u: &GradedVector,
    v: &GradedVector,
) -> Result<Vec<Q>> {
    BracketEngine::new(voa, space).bracket(u, v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieTable {
    pub dim: usize,
    pub basis_labels: Vec<String>,
    /// `brackets[i][j]` holds the coordinates of `[u_i, u_j]`.
    pub brackets: Vec<Vec<Vec<Q>>>,
}

/// The bracket table on `U`, checked entrywise against the closed forms.
pub fn lie_table(voa: &LatticeVoa, space: &GeneratingSpace) -> Result<LieTable> {
    let dim = space.len();
    let mut engine = BracketEngine::new(voa, space);
    let mut brackets = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            let got = engine.bracket(&space.get(i).vector, &space.get(j).vector)?;
            let want = closed_form_bracket(voa, space, i, j)?;
            if got != want {
                return Err(Error::LieMismatch(format!(
                    "[{}, {}]: computed {}, expected {}",
                    space.get(i),
                    space.get(j),
                    render(space, &got),
                    render(space, &want)
                )));
            }
            row.push(got);
        }
        brackets.push(row);
    }
    Ok(LieTable {
        dim,
        basis_labels: space.generators().iter().map(ToString::to_string).collect(),
        brackets,
    })
}

fn render(space: &GeneratingSpace, c: &[Q]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| format!("{x}*{}", space.get(i)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn index_of(space: &GeneratingSpace, label: &GeneratorLabel) -> Option<usize> {
    space.generators().iter().position(|g| &g.label == label)
}

/// The bracket of generators `i` and `j` from the closed-form case list,
/// with signs from the fixed cocycle.
pub fn closed_form_bracket(
    voa: &LatticeVoa,
    space: &GeneratingSpace,
    i: usize,
    j: usize,
) -> Result<Vec<Q>> {
    let lat = voa.lattice();
    let mut out = vec![Q::zero(); space.len()];
    let missing = |what: String| Error::LieMismatch(format!("{what} is not in the generating space"));
    match (&space.get(i).label, &space.get(j).label) {
        (GeneratorLabel::Heisenberg { .. }, GeneratorLabel::Heisenberg { .. }) => {}
        (GeneratorLabel::Heisenberg { color }, GeneratorLabel::Lattice { point }) => {
            out[j] = q(lat.lower(point.coords())[*color]);
        }
        (GeneratorLabel::Lattice { point }, GeneratorLabel::Heisenberg { color }) => {
            out[i] = -q(lat.lower(point.coords())[*color]);
        }
        (GeneratorLabel::Lattice { point: a }, GeneratorLabel::Lattice { point: b }) => {
            let sum = a + b;
            let eps = q(voa.cocycle().eps(a, b)? as i64);
            if sum.is_zero() {
                if lat.norm(a) == 2 {
                    for (color, &coord) in a.coords().iter().enumerate() {
                        let label = GeneratorLabel::Heisenberg { color };
                        let k = index_of(space, &label).ok_or_else(|| missing(format!("b{}(-1)", color + 1)))?;
                        out[k] = &eps * q(coord);
                    }
                }
            } else if lat.ip(a.coords(), b.coords()) == -1 && voa.in_phi(&sum) {
                let label = GeneratorLabel::Lattice { point: sum.clone() };
                let k = index_of(space, &label).ok_or_else(|| missing(format!("e{sum}")))?;
                out[k] = eps;
            }
        }
    }
    Ok(out)
}

impl LieTable {
    /// `[x, y]` for coordinate vectors, extended bilinearly.
    pub fn apply(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim];
        for (i, xi) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let c = xi * yj;
                for (o, b) in out.iter_mut().zip(&self.brackets[i][j]) {
                    if !b.is_zero() {
                        *o += &c * b;
                    }
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<Q> {
        let mut e = vec![Q::zero(); self.dim];
        e[i] = Q::one();
        e
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.dim).all(|i| {
            (i..self.dim).all(|j| {
                self.brackets[i][j]
                    .iter()
                    .zip(&self.brackets[j][i])
                    .all(|(a, b)| (a + b).is_zero())
            })
        })
    }

    /// Jacobi identity on all basis triples `i < j < k` (sufficient once the
    /// table is antisymmetric).
    pub fn jacobi_holds(&self) -> bool {
        let d = self.dim;
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
                    let a = self.apply(&ei, &self.brackets[j][k]);
                    let b = self.apply(&ej, &self.brackets[k][i]);
                    let c = self.apply(&ek, &self.brackets[i][j]);
                    if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingReport {
    pub matrix: Vec<Vec<Q>>,
    pub kernel: Vec<Vec<Q>>,
}

impl KillingReport {
    pub fn nondegenerate(&self) -> bool {
        self.kernel.is_empty()
    }
}

/// `K(x, y) = tr(ad x · ad y)` and a basis of its kernel.
pub fn killing_radical(t: &LieTable) -> KillingReport {
    let d = t.dim;
    // ad(x)[r][c] = coefficient of u_r in [u_x, u_c].
    let mut matrix = vec![vec![Q::zero(); d]; d];
    for x in 0..d {
        for y in x..d {
            let mut s = Q::zero();
            for c in 0..d {
                for (r, a) in t.brackets[x][c].iter().enumerate() {
                    if !a.is_zero() {
                        let b = &t.brackets[y][r][c];
                        if !b.is_zero() {
                            s += a * b;
                        }
                    }
                }
            }
            matrix[x][y] = s.clone();
            matrix[y][x] = s;
        }
    }
    let kernel = Rref::from_rows(d, &matrix).kernel();
    KillingReport { matrix, kernel }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c1span::complement_basis;
    use crate::lattice::{Lattice, LatticeVector};
    use crate::pbw::order_basis;

    fn table(gram: Vec<Vec<i64>>) -> (LatticeVoa, GeneratingSpace, LieTable) {
        let voa = LatticeVoa::new(&Lattice::new(gram).unwrap());
        let top = voa.top_phi_weight().max(1);
        let space = order_basis(&complement_basis(&voa, top).unwrap());
        let t = lie_table(&voa, &space).unwrap();
        (voa, space, t)
    }

    #[test]
    fn sl2() {
        let (voa, space, t) = table(vec![vec![2]]);
        assert_eq!(t.basis_labels, vec!["b1(-1)", "e(-1)", "e(1)"]);
        // [h, e(1)] = 2 e(1), [h, e(-1)] = -2 e(-1)
        assert_eq!(t.brackets[0][2], vec![q(0), q(0), q(2)]);
        assert_eq!(t.brackets[0][1], vec![q(0), q(-2), q(0)]);
        let eps = voa
            .cocycle()
            .eps(&LatticeVector(vec![1]), &LatticeVector(vec![-1]))
            .unwrap() as i64;
        assert_eq!(t.brackets[2][1], vec![q(eps), q(0), q(0)]);
        assert!(t.is_antisymmetric() && t.jacobi_holds());
        let k = killing_radical(&t);
        assert!(k.nondegenerate());
        // Trace form of sl2 in this basis: K(h,h) = 8.
        assert_eq!(k.matrix[0][0], q(8));
        assert_eq!(space.len(), 3);
    }

    #[test]
    fn norm_four_radical() {
        let (_, _, t) = table(vec![vec![4]]);
        assert_eq!(t.dim, 3);
        assert_eq!(t.brackets[0][2], vec![q(0), q(0), q(4)]);
        assert!(t.brackets[1][2].iter().all(Zero::is_zero));
        let k = killing_radical(&t);
        let span = Rref::from_rows(3, &k.kernel);
        assert!(span.contains(&[q(0), q(1), q(0)]));
        assert!(span.contains(&[q(0), q(0), q(1)]));
    }

    #[test]
    fn sl2_squared() {
        let (_, space, t) = table(vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(t.dim, 6);
        assert!(t.is_antisymmetric() && t.jacobi_holds());
        assert!(killing_radical(&t).nondegenerate());
        // The two sl2 factors commute.
        let factor = |i: usize| match &space.get(i).label {
            GeneratorLabel::Heisenberg { color } => *color,
            GeneratorLabel::Lattice { point } => usize::from(point.coords()[0] == 0),
        };
        for i in 0..6 {
            for j in 0..6 {
                if factor(i) != factor(j) {
                    assert!(t.brackets[i][j].iter().all(Zero::is_zero));
                }
            }
        }
    }

    #[test]
    fn abelian_killing_is_zero() {
        let t = LieTable {
            dim: 2,
            basis_labels: vec!["x".into(), "y".into()],
            brackets: vec![vec![vec![Q::zero(); 2]; 2]; 2],
        };
        let k = killing_radical(&t);
        assert!(k.matrix.iter().flatten().all(Zero::is_zero));
        assert_eq!(k.kernel.len(), 2);
    }

    #[test]
    fn a2_closed_forms() {
        let (_, _, t) = table(vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(t.dim, 8);
        assert!(t.jacobi_holds());
        assert!(killing_radical(&t).nondegenerate());
    }
}
