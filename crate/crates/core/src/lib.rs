//! Exact solver for the Hamiltonian inverse problem of linear systems `u' = Bu`.

pub mod exact;
pub mod sample;
pub mod jordan;
pub mod dsolver;
pub mod classifier;
pub mod integrability;
pub mod assign;
pub mod flow;
pub mod report;
