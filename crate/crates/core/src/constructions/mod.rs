//! Witness constructions for the concrete families.

pub mod abels;
pub mod endo;
pub mod witnesses;
pub mod sc_family;
