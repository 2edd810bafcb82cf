use serde::{Deserialize, Serialize};

use crate::eigen::sym_eigenvalues;
use crate::error::{invalid, Result};
use crate::objectives::{jacobian, Dataset, MlpSpec};

/// Largest sample count accepted for the exact kernel spectrum.
pub const MAX_NTK_SAMPLES: usize = 64;

/// Spectrum summary of the tangent kernel `K = DF·DFᵀ` at one weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NtkSummary {
    pub lambda0: f64,
    pub lambda_max: f64,
    /// Lower bound on `|σ'|` of the output activation, if it has one.
    pub rho: Option<f64>,
    /// `λ₀·ρ²`, the ceiling for the PL* constant.
    pub mu_candidate: Option<f64>,
}

pub fn ntk_summary(spec: &MlpSpec, d: &Dataset) -> Result<NtkSummary> {
    if d.len() > MAX_NTK_SAMPLES {
        return Err(invalid(format!(
            "kernel spectrum limited to {MAX_NTK_SAMPLES} samples, got {}",
            d.len()
        )));
    }
    let k = jacobian(spec, d)?.gram_rows();
    let eig = sym_eigenvalues(&k)?;
    let lambda0 = eig[0];
    let rho = spec.arch.output().rho();
    Ok(NtkSummary {
        lambda0,
        lambda_max: eig[eig.len() - 1],
        rho,
        mu_candidate: rho.map(|r| lambda0 * r * r),
    })
}

/// `λ_min(DF(w)·DF(w)ᵀ)`.
pub fn ntk_lambda0(spec: &MlpSpec, d: &Dataset) -> Result<f64> {
    Ok(ntk_summary(spec, d)?.lambda0)
}
