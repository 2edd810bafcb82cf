//! Theoretical quantities and the checks that compare runs against them.

mod checks;
mod gradcheck;
mod ntk;
mod report;
mod stochastic;

pub use checks::{
    ball_check, descent_check, empirical_pl, envelope_check, gradient_bound_check, BALL_SLACK,
    ENVELOPE_SLACK, PL_LOSS_FLOOR,
};
pub use gradcheck::{central_differences, gradcheck, FD_STEP};
pub use ntk::{ntk_lambda0, ntk_summary, NtkSummary, MAX_NTK_SAMPLES};
pub use report::{pl_radius, rate_factor, rate_factor_proof, TheoremReport};
pub use stochastic::{
    stochastic_bound, stochastic_bound_raw, stochastic_params, theorem_intervals, StochasticParams,
};
