use crate::objectives::Objective;
use crate::tensor::Vector;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-6;

/// `(L(w + h·eᵢ) − L(w − h·eᵢ)) / 2h` for every coordinate.
///
/// Rounding in `L` limits the accuracy to roughly `ε·|L(w)|/h` per
/// coordinate, even when the gradient is exact.
pub fn central_differences(obj: &dyn Objective, w: &Vector) -> Vector {
    let mut probe = w.clone();
    let mut out = Vec::with_capacity(w.dim());
    for i in 0..w.dim() {
        let orig = probe[i];
        probe[i] = orig + FD_STEP;
        let plus = obj.value(&probe);
        probe[i] = orig - FD_STEP;
        let minus = obj.value(&probe);
        probe[i] = orig;
        out.push((plus - minus) / (2.0 * FD_STEP));
    }
    Vector::from_vec(out)
}

/// Largest coordinate-wise discrepancy `|g − g_fd| / max(|g|, |g_fd|, 1)`
/// between the analytic gradient and central differences.
pub fn gradcheck(obj: &dyn Objective, w: &Vector) -> f64 {
    let analytic = obj.gradient(w);
    let numeric = central_differences(obj, w);
    analytic
        .iter()
        .zip(numeric.iter())
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1.0))
        .fold(0.0, f64::max)
}
