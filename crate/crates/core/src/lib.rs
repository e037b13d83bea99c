//! Finite-dimensional toolkit for reduction channels on bipartite systems
//! `A ⊗ B`: Lüders dephasing, the modified (sector-weight plus conditional
//! state) reduction and its equivalence classes, the operator algebras that
//! define superselection sectors, entropy relations between the channels,
//! and a toy decoherence model with a predictability sieve.

// `!(x > 0.0)` style checks are used so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod operator_algebra;
pub mod random;
pub mod reduction;
pub mod scenario;
pub mod states;
pub mod tensor_space;

pub use error::{Error, ProjectorViolation, Result};
pub use states::{ApparatusProjectorSet, DensityOperator, ProjectorSet, PureState};
pub use tensor_space::{BipartiteSpace, CMatrix, CVector, Complex};
