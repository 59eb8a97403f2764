//! Semidefinite programs over labelled operator spaces.

pub mod canonical;
pub mod facial;
pub mod map;
pub mod problem;
pub mod sdpa;

pub use canonical::{canonicalize, Block, CanonicalSdp, RowOrigin, SparseRow};
pub use facial::{facial_reduce, Face, ReducedProblem};
pub use map::{LinearMap, Side};
pub use problem::{compose_two_stage, Constraint, EqualityRhs, Scenario, SdpProblem, Term, TwoStageSdp, Variable};
pub use sdpa::{export_sdpa, SdpaData};
