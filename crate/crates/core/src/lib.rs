//! Test case chain generation for finite-state synchronous reactive models.
//!
//! A chain is one input sequence that covers the trigger of every property
//! and ends in a designated set of final states. The pipeline builds a
//! weighted reachability graph between property triggers with bounded model
//! checking, picks a shortest covering path by solving an asymmetric TSP, and
//! concretises it with a SAT solver, repairing or refining the abstraction
//! when the abstract path is not realisable.

pub mod bmc;
pub mod dsl;
pub mod engine;
pub mod fixtures;
pub mod model;
pub mod optimizer;
pub mod oracle;
pub mod reachgraph;
pub mod sat;
