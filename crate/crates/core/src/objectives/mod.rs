//! Differentiable losses with exact gradients.

mod dataset;
mod mlp;
mod quadratic;

pub use dataset::Dataset;
pub use mlp::{
    jacobian, mlp_forward, network_outputs, squared_loss, squared_loss_gradient, Activation,
    MlpArch, MlpObjective, MlpSpec,
};
pub use quadratic::{quadratic_objective, QuadraticObjective};

use serde::{Deserialize, Serialize};

use crate::tensor::Vector;

/// Analytically known constants of an objective: the PL* constant `mu`, the
/// smoothness constant `beta` and the minimum value `l_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnownConstants {
    pub mu: f64,
    pub beta: f64,
    pub l_star: f64,
}

/// A differentiable scalar loss.
///
/// Callers pass points of length [`Objective::dim`]; implementations may panic
/// otherwise. The optimizers validate the starting point once up front.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, w: &Vector) -> f64;

    fn gradient(&self, w: &Vector) -> Vector;

    fn value_and_gradient(&self, w: &Vector) -> (f64, Vector) {
        (self.value(w), self.gradient(w))
    }

    fn known_constants(&self) -> Option<KnownConstants> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, w: &Vector) -> f64 {
        (**self).value(w)
    }
    fn gradient(&self, w: &Vector) -> Vector {
        (**self).gradient(w)
    }
    fn value_and_gradient(&self, w: &Vector) -> (f64, Vector) {
        (**self).value_and_gradient(w)
    }
    fn known_constants(&self) -> Option<KnownConstants> {
        (**self).known_constants()
    }
}
