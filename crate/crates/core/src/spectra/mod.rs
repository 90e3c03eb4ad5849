//! Frequency-wise invariance ratios `γ_d(k)` and the quantities built on them.

mod dof;
mod gamma;
mod rates;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dof::{cum_invariant_dim, cum_invariant_mass, dof_pair, nu, nu_all, DofPair};
pub use gamma::{gamma_exact, gamma_mc, gamma_mc_all, GammaTable, McEntry, HORIZON_POLICY};
pub use rates::{ln_solver, nud_estimate, RateMode, RateParams};

use crate::harmonics::HarmonicsError;
use crate::perms::PermError;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fit residual at k = {k} is not positive ({value:e})")]
    NonPositiveResidual { k: usize, value: f64 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    All,
    Even,
    Odd,
}

impl Parity {
    pub fn admits(self, k: usize) -> bool {
        match self {
            Parity::All => true,
            Parity::Even => k % 2 == 0,
            Parity::Odd => k % 2 == 1,
        }
    }
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Slope of `log(γ_k − floor)` against `log k` over `k ∈ [k_lo, k_hi]` with the
/// given parity. `values[k]` is `γ_k`.
pub fn slope_fit(
    values: &[f64],
    k_lo: usize,
    k_hi: usize,
    parity: Parity,
    floor: f64,
) -> Result<f64, SpectraError> {
    if k_lo == 0 || k_hi < k_lo || k_hi >= values.len() {
        return Err(SpectraError::InvalidArgument(format!(
            "bad fit range [{k_lo}, {k_hi}] for {} values",
            values.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in (k_lo..=k_hi).filter(|&k| parity.admits(k)) {
        let r = values[k] - floor;
        if !(r > 0.0) {
            return Err(SpectraError::NonPositiveResidual { k, value: r });
        }
        xs.push((k as f64).ln());
        ys.push(r.ln());
    }
    if xs.len() < 2 {
        return Err(SpectraError::InvalidArgument("fewer than two points in fit range".into()));
    }
    Ok(least_squares_slope(&xs, &ys))
}

/// [`slope_fit`] on the values of a table.
pub fn slope_fit_table(
    table: &GammaTable,
    k_lo: usize,
    k_hi: usize,
    parity: Parity,
    floor: f64,
) -> Result<f64, SpectraError> {
    slope_fit(&table.values()?, k_lo, k_hi, parity, floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slopes() {
        let v: Vec<f64> = (0..=120).map(|k| 2.0 / (k as f64 + 2.0)).collect();
        let s = slope_fit(&v, 20, 100, Parity::All, 0.0).unwrap();
        assert!((-1.05..=-0.95).contains(&s));
        let c = vec![0.3; 50];
        assert!(slope_fit(&c, 5, 40, Parity::Even, 0.0).unwrap().abs() < 1e-12);
        assert!(matches!(
            slope_fit(&c, 5, 40, Parity::All, 0.3),
            Err(SpectraError::NonPositiveResidual { .. })
        ));
        assert!(slope_fit(&c, 0, 40, Parity::All, 0.0).is_err());
    }
}
