//! Numerical laboratory for concentrating tripartite entanglement.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! - [`math`]: exact binomials, rationals and base-2 entropies;
//! - [`teststate`]: closed-form entanglement of the permutation test state
//!   before and after the compression relabeling, and slope fits;
//! - [`oracle`]: dense state-vector ground truth for up to ten pairs;
//! - [`protocol`]: seeded simulation of the batching procedure and its
//!   entanglement bounds;
//! - [`eof`]: concurrence and entanglement-of-formation bookkeeping.

#![no_std]

extern crate alloc;

pub mod eof;
pub mod error;
pub mod math;
pub mod oracle;
pub mod protocol;
pub mod teststate;

pub use error::{Error, Result};
pub use math::{BigCount, ExactRational, Prob};
pub use teststate::{Encoding, EntanglementReport, SlopeFit, TestStateSpec};
