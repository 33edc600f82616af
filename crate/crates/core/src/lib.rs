//! A safety model checker for AIGER circuits based on complementary
//! approximate reachability.
//!
//! The checker keeps two sequences of state sets: frames that
//! over-approximate the states reachable from the initial states, used to
//! prove safety, and layers that under-approximate the states that can reach
//! a bad state, used to find counterexamples. Both a forward and a backward
//! engine are provided and can race each other in a portfolio.

pub mod aiger;
pub mod artifacts;
pub mod batch;
pub mod car;
pub mod corpus;
pub mod limits;
pub mod lit;
pub mod oracle;
pub mod reasoners;
pub mod sat;
pub mod ts;
