//! Cyclic Jacobi eigensolver for small symmetric matrices.

use crate::error::{invalid, Error, Result};
use crate::tensor::Matrix;

/// Relative asymmetry accepted before symmetrizing.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Sweeps stop once off-diagonal Frobenius mass drops below this fraction of ‖A‖_F.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// All eigenvalues of the symmetrized input, ascending.
pub fn sym_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(invalid(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.data().iter().all(|x| x.is_finite()) {
        return Err(invalid("eigensolver input has non-finite entries"));
    }
    if !m.is_symmetric(SYMMETRY_TOL) {
        return Err(invalid("eigensolver input is not symmetric"));
    }
    let n = m.rows();
    let mut a: Vec<f64> = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m.get(i, j) + m.get(j, i));
        }
    }

    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOL * frob;
    let off_mass = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut off = off_mass(&a);
    let mut sweeps = 0;
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
        sweeps += 1;
        off = off_mass(&a);
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// One Jacobi rotation zeroing `a[p][q]`.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
}

pub fn sym_eig_min(m: &Matrix) -> Result<f64> {
    Ok(sym_eigenvalues(m)?[0])
}

pub fn sym_eig_max(m: &Matrix) -> Result<f64> {
    Ok(*sym_eigenvalues(m)?.last().expect("square matrix has at least one eigenvalue"))
}
