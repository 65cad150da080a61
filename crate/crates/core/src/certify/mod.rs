//! Certificates and their independent checkers.

pub mod certificate;
pub mod dehn;
pub mod filling;
pub mod greendlinger;
pub mod trange;
pub mod witness;

pub use crate::oracles::hnn::{britton_reduce, britton_trivial};
pub use filling::verify_filling;
pub use greendlinger::{greendlinger_new_relator, verify_greendlinger, GreendlingerCertificate};
pub use trange::{trange_reduce, TRangeOutcome};
pub use witness::{DEFAULT_EXHAUSTIVE, DEFAULT_SAMPLES};
pub use witness::{verify_quotient_witness, CheckMode, QuotientWitness, StructuralLemma, WitnessVerdict};
