//! Exact computations in the lattice vertex operator algebra `V_L` of a
//! positive-definite even lattice: graded pieces, vertex-operator modes,
//! the subspace `C₁(V_L)`, the minimal generating space
//! `U = h ⊕ span{ι(e_α) : α ∈ Φ(L)}`, and the Lie algebra structure on `U`.

pub mod c1span;
pub mod cli;
pub mod cocycle;
pub mod error;
pub mod fock;
pub mod lattice;
pub mod liealg;
pub mod linalg;
pub mod pbw;

pub use cocycle::TwoCocycle;
pub use error::{Error, Result};
pub use fock::{FockMonomial, GradedVector, ModeEngine, Part};
pub use lattice::{named_lattice, Lattice, LatticeVector, PhiReport};
