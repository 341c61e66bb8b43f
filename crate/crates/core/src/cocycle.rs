//! The sign cocycle of the central extension of `L` by `⟨±1⟩`.
//!
//! Only the commutator `ε(α,β)ε(β,α) = (−1)^⟨α,β⟩` is canonical. We fix the
//! bimultiplicative choice that is trivial on ordered pairs `b_i, b_j` with
//! `i ≤ j` and equals `(−1)^⟨b_i,b_j⟩` for `i > j`. Any other choice differs by
//! a coboundary, which rescales the basis vectors `ι(e_α)` by signs; every
//! structure constant computed downstream is relative to this choice.

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticeVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCocycle {
    lattice: Lattice,
    /// `ε(b_i, b_j)` as ±1.
    basis_signs: Vec<Vec<i8>>,
}

impl TwoCocycle {
    pub fn build(lattice: &Lattice) -> Self {
        let n = lattice.rank();
        let g = lattice.gram();
        let basis_signs = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i > j && g[i][j] % 2 != 0 { -1 } else { 1 })
                    .collect()
            })
            .collect();
        TwoCocycle {
            lattice: lattice.clone(),
            basis_signs,
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn basis_signs(&self) -> &[Vec<i8>] {
        &self.basis_signs
    }

    /// `ε(α, β)` as ±1.
    pub fn eps(&self, alpha: &LatticeVector, beta: &LatticeVector) -> Result<i8> {
        let n = self.lattice.rank();
        for v in [alpha, beta] {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        Ok(self.sign(alpha.coords(), beta.coords()))
    }

    /// Unchecked evaluation: `Π_{i,j} ε(b_i,b_j)^{α_i β_j}`.
    pub(crate) fn sign(&self, alpha: &[i64], beta: &[i64]) -> i8 {
        let mut parity = 0i64;
        for (i, a) in alpha.iter().enumerate() {
            if a % 2 == 0 {
                continue;
            }
            for (j, b) in beta.iter().enumerate() {
                if self.basis_signs[i][j] < 0 {
                    parity += b;
                }
            }
        }
        if parity.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::named_lattice;
    use proptest::prelude::*;

    fn lv(v: &[i64]) -> LatticeVector {
        LatticeVector(v.to_vec())
    }

    #[test]
    fn examples() {
        let a2 = named_lattice("A2", 1).unwrap();
        let c = TwoCocycle::build(&a2);
        let (b1, b2) = (lv(&[1, 0]), lv(&[0, 1]));
        assert_eq!(c.eps(&b1, &b2).unwrap(), 1);
        assert_eq!(c.eps(&b2, &b1).unwrap(), -1);
        assert_eq!(c.eps(&b1, &b2).unwrap() * c.eps(&b2, &b1).unwrap(), -1);
        let a1 = named_lattice("A1", 1).unwrap();
        let c1 = TwoCocycle::build(&a1);
        assert_eq!(c1.eps(&lv(&[1]), &lv(&[-1])).unwrap(), 1);
        assert_eq!(c1.eps(&lv(&[5]), &lv(&[0])).unwrap(), 1);
        assert_eq!(c.eps(&lv(&[0, 0]), &lv(&[3, -2])).unwrap(), 1);
        assert!(c.eps(&lv(&[1]), &b1).is_err());
    }

    fn lattices() -> Vec<Lattice> {
        vec![
            named_lattice("A1", 1).unwrap(),
            named_lattice("A2", 1).unwrap(),
            named_lattice("A3", 2).unwrap(),
            named_lattice("D4", 1).unwrap(),
            Lattice::new(vec![vec![4, 1], vec![1, 6]]).unwrap(),
        ]
    }

    fn vec_strategy(n: usize) -> impl Strategy<Value = LatticeVector> {
        proptest::collection::vec(-6i64..=6, n).prop_map(LatticeVector)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn commutator_law((idx, a, b) in (0usize..5).prop_flat_map(|idx| {
            let n = lattices()[idx].rank();
            (Just(idx), vec_strategy(n), vec_strategy(n))
        })) {
            let l = &lattices()[idx];
            let c = TwoCocycle::build(l);
            let lhs = c.eps(&a, &b).unwrap() * c.eps(&b, &a).unwrap();
            let rhs = if l.inner(&a, &b).unwrap().rem_euclid(2) == 0 { 1 } else { -1 };
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(c.eps(&a, &a).unwrap().pow(2), 1);
        }

        #[test]
        fn cocycle_and_bimultiplicative(
            a in vec_strategy(4), b in vec_strategy(4), g in vec_strategy(4), a2 in vec_strategy(4)
        ) {
            let l = named_lattice("D4", 1).unwrap();
            let c = TwoCocycle::build(&l);
            let e = |x: &LatticeVector, y: &LatticeVector| c.eps(x, y).unwrap();
            prop_assert_eq!(e(&a, &b) * e(&(&a + &b), &g), e(&b, &g) * e(&a, &(&b + &g)));
            prop_assert_eq!(e(&(&a + &a2), &b), e(&a, &b) * e(&a2, &b));
            prop_assert_eq!(e(&a, &(&b + &g)), e(&a, &b) * e(&a, &g));
            prop_assert_eq!(e(&LatticeVector::zero(4), &b), 1);
            prop_assert_eq!(e(&a, &LatticeVector::zero(4)), 1);
        }
    }
}
