//! Spectral diagnostics: eigenvalue shells of empirical Grams and the
//! approximation error computed from harmonic coefficients.

/// Assigns each positive eigenvalue of `Gram/n` to the degree `k` whose `μ_k` is
/// nearest on a log scale (shell boundaries are geometric means of adjacent
/// distinct coefficients) and returns the count per degree `0..mu.len()`.
/// Coefficients below `mu_floor` are ignored.
pub fn shell_counts(eigenvalues: &[f64], mu: &[f64], mu_floor: f64) -> Vec<usize> {
    let centers: Vec<(usize, f64)> =
        mu.iter().enumerate().filter(|(_, &m)| m > mu_floor).map(|(k, &m)| (k, m.ln())).collect();
    let mut counts = vec![0; mu.len()];
    if centers.is_empty() {
        return counts;
    }
    for &e in eigenvalues.iter().filter(|&&e| e > 0.0) {
        let le = e.ln();
        let (k, _) = centers
            .iter()
            .copied()
            .min_by(|a, b| (a.1 - le).abs().total_cmp(&(b.1 - le).abs()))
            .expect("nonempty");
        counts[k] += 1;
    }
    counts
}

/// `A(λ) = inf_f ‖f − f*‖² + λ‖f‖²_H` for a target with harmonic coefficients
/// `coeffs[k][j]` in an orthonormal basis of degree `k` whose first `visible[k]`
/// functions span the part of degree `k` reachable by the RKHS.
///
/// Coefficients in directions the RKHS cannot represent contribute `a²`, the others
/// `a² λ/(μ_k + λ)`.
pub fn approximation_error(coeffs: &[Vec<f64>], mu: &[f64], visible: &[usize], lambda: f64) -> f64 {
    let mut total = 0.0;
    for (k, a) in coeffs.iter().enumerate() {
        let m = mu[k];
        for (j, &c) in a.iter().enumerate() {
            let reachable = j < visible[k] && m > 0.0;
            total += if reachable { c * c * lambda / (m + lambda) } else { c * c };
        }
    }
    total
}
