//! Optimal cheating probabilities of two-party quantum protocols as
//! semidefinite programs.
//!
//! [`catalog`] holds the protocols and their states, [`builders`] turns a
//! [`builders::ModelId`] into an [`sdp::SdpProblem`], and [`solver`] solves it
//! with an interior point method or ADMM after facial reduction. [`honest`]
//! runs the protocols exactly with rational arithmetic, [`oracle`] gives
//! closed-form reference values, and [`report`] drives the reproduction table.
pub mod builders;
pub mod catalog;
pub mod error;
pub mod honest;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod sdp;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
