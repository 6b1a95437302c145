//! Exact verification engine for the quantum supergroup SPO_q(2n|2m) over ℚ(q).

pub mod frt;
pub mod graded;
pub mod linalg;
pub mod qscalars;
pub mod quadalg;
pub mod report;
pub mod rform;
pub mod rmatrix;
pub mod suite;
pub mod weyl;
