//! Relation-range toolkit for marked groups and finite graphs.
//!
//! The crate computes truncated windows of the set of lengths at which a
//! finitely generated group acquires genuinely new relations, together with
//! independently checkable certificates for each verdict.

pub mod cayley;
pub mod certify;
pub mod constructions;
pub mod error;
pub mod freewords;
pub mod intmat;
pub mod oracles;
pub mod scalesets;
pub mod scan;

pub use error::{Error, Result};
