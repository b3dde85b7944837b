//! Simulation of awake-efficient maximal independent set algorithms in the sleeping model.

pub mod engine;
pub mod graphs;
pub mod vtree;
pub mod ldt;
pub mod mis;
pub mod harness;
