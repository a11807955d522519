//! Symbolic jet-calculus kernel for differential systems.
//!
//! The crate represents differential systems, evolutionary vector fields and
//! conservation laws over an exact symbolic expression type, and mechanically
//! verifies invariance of systems and sub-systems, decoupling certificates,
//! and conservation-law deformations.
//!
//! Everything is exact: constants are arbitrary-precision rationals, and all
//! verdicts reduce to a zero test on a rational normal form.

pub mod conservation;
pub mod corpus;
pub mod decoupling;
pub mod error;
pub mod expr;
pub mod fields;
pub mod gen;
pub mod invariance;
pub mod jet;
pub mod sysfile;
pub mod systems;

pub use error::{Error, Result};
pub use expr::{ElemFn, Expr, MultiIndex};
pub use fields::{EvoField, PointField};
pub use jet::JetContext;
pub use systems::{DiffSystem, PointMap, SubSystem};
