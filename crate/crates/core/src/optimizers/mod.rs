//! Step-size rules and iteration loops.

mod neurotron;
mod noise;
mod run;
mod schedule;
mod step;
mod trajectory;

pub use neurotron::{neurotron_run, NeurotronProblem};
pub use noise::{sample_noise, NoiseOracle};
pub use run::{
    run_deterministic, run_deterministic_observed, run_stochastic, Step, DEFAULT_STOP_TOL,
};
pub use schedule::Schedule;
pub use step::{step_size, StepRule, StepRuleKind};
pub use trajectory::{Termination, Trajectory, TrajectoryRecord};
