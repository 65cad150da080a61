//! Cayley balls, relation enumeration, filling search and Φ of finite graphs.

pub mod ball;
pub mod coset;
pub mod fill;
pub mod graphs;

pub use ball::{ball, ball_cached, enumerate_relations, Ball, EXTERIOR};
pub use coset::{coset_enumeration, CosetOutcome};
pub use fill::{fill, FillOutcome, FillingDiagram};
pub use graphs::{compare_phi_subdivision, graph_phi, homology_certificate, Graph, HomologyReport, PhiVerdict};
