//! Regularized gradient clipping (δ-GClip) and the machinery needed to check
//! its convergence guarantees on small problems.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`], [`rng`], [`eigen`]: dense `f64` kernels, seeded streams and a
//!   cyclic Jacobi eigensolver.
//! - [`objectives`]: SPD quadratics with known PL*/smoothness constants and the
//!   scalar-output feed-forward network under squared loss.
//! - [`optimizers`]: step-size rules (constant, GClip, δ-GClip), deterministic
//!   and stochastic iteration loops, and the Neuro-Tron update.
//! - [`analysis`]: trust radius, rate envelopes, NTK minimum eigenvalue,
//!   stochastic step-size recipe and its criticality bound, gradient checks.

pub mod analysis;
pub mod eigen;
pub mod error;
pub mod objectives;
pub mod optimizers;
pub mod rng;
pub mod tensor;

pub use error::{Error, Result};
pub use objectives::{Dataset, KnownConstants, MlpObjective, MlpSpec, Objective, QuadraticObjective};
pub use optimizers::{
    NoiseOracle, Schedule, StepRule, StepRuleKind, Termination, Trajectory, TrajectoryRecord,
};
pub use rng::RngStream;
pub use tensor::{Matrix, Vector};
