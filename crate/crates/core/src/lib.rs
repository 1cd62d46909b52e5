//! Markov chains on a cycle with sparse random long-range edges.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] generates the three random graph models (matching on
//!   near-equidistant nodes, fixed-size uniform edge subset, independent
//!   Bernoulli edges), analyses empty arcs and builds the reduced and wound-up
//!   graphs.
//! * [`chain`] turns a graph into a homogeneous doubly stochastic transition
//!   matrix and checks feasibility, laziness and reversibility.
//! * [`conductance`] computes cut flows, exact conductance (exhaustive or over
//!   connected sets) and arc-based upper bounds.
//! * [`mixing`] computes exact total-variation mixing times.
//! * [`lab`] runs seeded sweeps, trims, fits log-log exponents and writes CSV.
//!
//! Data-parallel loops go through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod chain;
pub mod conductance;
pub mod exec;
pub mod lab;
pub mod mixing;
mod numeric;
pub mod rng;
pub mod topology;

pub use chain::{ChainError, ChainParams, TransitionMatrix};
pub use conductance::{ConductanceError, ConductanceEstimate, CutResult, PhiKind};
pub use exec::Parallelism;
pub use lab::{LabError, SweepConfig, SweepRecord};
pub use mixing::{Distribution, MixingError, MixingOptions, MixingResult};
pub use topology::{Arc, LongRangeGraph, Model, ReducedGraph, TopologyError, WoundGraph};
