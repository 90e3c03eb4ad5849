//! `ν_d(ℓ)`, cumulative invariant dimensions and degrees of freedom.

use serde::{Deserialize, Serialize};

use super::{GammaTable, SpectraError};
use crate::harmonics::SpectralProfile;

/// `ν_d(ℓ) = max(max_{k ∈ [ℓ, kmax]} γ_d(k), floor)`.
pub fn nu(table: &GammaTable, l: usize) -> Result<f64, SpectraError> {
    if l > table.kmax {
        return Err(SpectraError::InvalidArgument(format!("l = {l} exceeds kmax = {}", table.kmax)));
    }
    let v = table.values()?;
    Ok(v[l..].iter().copied().fold(table.floor, f64::max))
}

/// `ν_d(ℓ)` for every `ℓ = 0..=kmax` in one backward pass.
pub fn nu_all(table: &GammaTable) -> Result<Vec<f64>, SpectraError> {
    let v = table.values()?;
    let mut out = vec![0.0; v.len()];
    let mut run = table.floor;
    for k in (0..v.len()).rev() {
        run = run.max(v[k]);
        out[k] = run;
    }
    Ok(out)
}

/// `D(ℓ) = Σ_{k<ℓ} N̄(d,k)` from exact invariant dimensions (groups).
pub fn cum_invariant_dim(table: &GammaTable, l: usize) -> Result<u128, SpectraError> {
    let dims = table
        .invariant_dims
        .as_ref()
        .ok_or_else(|| SpectraError::InvalidArgument("table has no exact invariant dimensions".into()))?;
    if l > dims.len() {
        return Err(SpectraError::InvalidArgument(format!("l = {l} exceeds kmax + 1 = {}", dims.len())));
    }
    Ok(dims[..l].iter().sum())
}

/// `Σ_{k<ℓ} γ_d(k) N(d,k)`, the analogue of `D(ℓ)` for weighted sets.
pub fn cum_invariant_mass(table: &GammaTable, l: usize) -> Result<f64, SpectraError> {
    if l > table.kmax + 1 {
        return Err(SpectraError::InvalidArgument(format!("l = {l} exceeds kmax + 1")));
    }
    if let Some(dims) = &table.invariant_dims {
        return Ok(dims[..l].iter().map(|&n| n as f64).fold(0.0, |a, b| a + b));
    }
    let v = table.values()?;
    Ok((0..l).map(|k| v[k] * crate::harmonics::dim_harmonic(table.d, k) as f64).fold(0.0, |a, b| a + b))
}

/// Truncated degrees of freedom and bounds on the omitted tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofPair {
    pub lambda: f64,
    /// `N_K(λ) = Σ_k N(d,k) μ_k/(μ_k+λ)` over `k ≤ kmax`.
    pub plain: f64,
    /// `N_{K_G}(λ) = Σ_k N̄(d,k) μ_k/(μ_k+λ)` over `k ≤ kmax`.
    pub invariant: f64,
    /// Upper bound on the plain tail, `(κ(1) − Σ_{k≤kmax} N μ_k)/λ`.
    pub plain_remainder: f64,
    /// Tail bound scaled by `ν_d(kmax)`.
    pub invariant_remainder: f64,
}

pub fn dof_pair(profile: &SpectralProfile, table: &GammaTable, lambda: f64) -> Result<DofPair, SpectraError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SpectraError::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if profile.d != table.d {
        return Err(SpectraError::InvalidArgument(format!(
            "profile dimension {} differs from table dimension {}",
            profile.d, table.d
        )));
    }
    let kmax = profile.kmax().min(table.kmax);
    let gamma = table.values()?;
    let mut plain = 0.0;
    let mut invariant = 0.0;
    for k in 0..=kmax {
        let mu = profile.mu[k];
        let n = profile.dims[k] as f64;
        let nbar = match &table.invariant_dims {
            Some(dims) => dims[k] as f64,
            None => gamma[k] * n,
        };
        let f = mu / (mu + lambda);
        plain += n * f;
        invariant += nbar * f;
    }
    let tail_mass = (profile.kernel.eval(1.0) - profile.partial_trace(kmax)).max(0.0);
    let plain_remainder = tail_mass / lambda;
    let nu_tail = nu(table, kmax.min(table.kmax))?;
    Ok(DofPair { lambda, plain, invariant, plain_remainder, invariant_remainder: nu_tail * plain_remainder })
}
