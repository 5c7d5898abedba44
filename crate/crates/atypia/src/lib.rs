//! Large-deviation exponents for atypical induced random quantum states.
//!
//! The induced random state on an `m`-dimensional system is the partial trace
//! of a uniformly random bipartite pure state over an `n`-dimensional
//! environment. As `n` grows, the probability that this state lands in a set
//! `Ω` decays exponentially, with exponent `m · inf_{ρ∈Ω} D(π‖ρ)` where `π`
//! is the maximally mixed state. This crate computes those exponents exactly
//! for the closed-form families (maximum eigenvalue, trace distance, entropy,
//! binary measurement, expectation value, coherence), minimizes `D(π‖ρ)` over
//! declarative constraint sets numerically, and verifies the exponents at
//! desk scale by rare-event Monte Carlo with exponential-tilting importance
//! sampling.

pub mod config;
pub mod experiments;
pub mod output;
pub mod qstate;
pub mod rates;
pub mod sampler;
pub mod solver;

pub use qstate::{BlochVector, DensityMatrix, HermitianObservable, QStateError, Spectrum};
pub use rates::RateResult;
pub use sampler::{SeededStream, TiltedProposal};
pub use solver::{ConstraintSet, SolverConfig};
