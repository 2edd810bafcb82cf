use crate::eigen::sym_eigenvalues;
use crate::error::{invalid, Result};
use crate::objectives::{KnownConstants, Objective};
use crate::tensor::{dot, Matrix, Vector};

/// `L(w) = ½ wᵀAw` for symmetric positive definite `A`.
///
/// Since `‖Aw‖² ≥ λ_min·wᵀAw = 2λ_min·L(w)`, the loss is globally μ-PL* with
/// `μ = 2λ_min(A)` and β-smooth with `β = λ_max(A)`.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    a: Matrix,
    constants: KnownConstants,
}

impl QuadraticObjective {
    pub fn new(a: Matrix) -> Result<Self> {
        let eig = sym_eigenvalues(&a)?;
        let (lmin, lmax) = (eig[0], eig[eig.len() - 1]);
        if lmin <= 1e-12 {
            return Err(invalid(format!(
                "quadratic needs an SPD matrix, smallest eigenvalue is {lmin:e}"
            )));
        }
        Ok(QuadraticObjective {
            a,
            constants: KnownConstants { mu: 2.0 * lmin, beta: lmax, l_star: 0.0 },
        })
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        QuadraticObjective::new(Matrix::from_diag(diag))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn constants(&self) -> KnownConstants {
        self.constants
    }
}

pub fn quadratic_objective(a: Matrix) -> Result<QuadraticObjective> {
    QuadraticObjective::new(a)
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn value(&self, w: &Vector) -> f64 {
        0.5 * dot(w, &self.gradient(w))
    }

    fn gradient(&self, w: &Vector) -> Vector {
        self.a.matvec(w).expect("quadratic: point has wrong dimension")
    }

    fn value_and_gradient(&self, w: &Vector) -> (f64, Vector) {
        let g = self.gradient(w);
        (0.5 * dot(w, &g), g)
    }

    fn known_constants(&self) -> Option<KnownConstants> {
        Some(self.constants)
    }
}
