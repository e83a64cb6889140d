//! Coherent configurations on small point sets.
//!
//! The crate covers permutation groups and their orbits on tuples, m-ary
//! coherent configurations with Weisfeiler-Leman closure, Schur partitions
//! of cyclic groups, prime field arithmetic, and searches for coherent
//! fusions and automorphism groups.

pub mod arith;
pub mod aut;
pub mod catalog;
pub mod error;
pub mod fusion;
pub mod group;
pub mod perm;
pub mod pipeline;
pub mod schur;
pub mod tensor;

pub use catalog::GroupSpec;
pub use error::{Error, Result};
pub use group::PermGroup;
pub use perm::Permutation;
pub use schur::{Carrier, SchurPartition};
pub use tensor::{EquivPattern, FusionSpec, TensorConfig, TupleSpace};
