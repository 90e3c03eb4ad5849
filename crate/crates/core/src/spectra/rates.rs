//! Rate calculators: the frequency cutoff `ℓ_n` and the effective-gain estimate.

use serde::{Deserialize, Serialize};

use super::SpectraError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    /// Group-invariant targets: exponent `2αr/(2αr+1)`.
    Invariant,
    /// Stable targets: exponent `2r/(2αr+1)`.
    Stable,
}

impl std::str::FromStr for RateMode {
    type Err = SpectraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "invariant" => Ok(RateMode::Invariant),
            "stable" => Ok(RateMode::Stable),
            other => Err(SpectraError::InvalidArgument(format!("unknown rate mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    /// Capacity exponent, `α > 1`.
    pub alpha: f64,
    /// Source exponent.
    pub r: f64,
    pub c_k: f64,
    pub c_fstar: f64,
    pub sigma_rho: f64,
    /// Asymptotic gain `ν₀`.
    pub nu0: f64,
    pub beta: f64,
    /// Constant `C` of the effective-gain estimate.
    pub c_beta: f64,
    /// Constant `C₂` in the cutoff condition.
    pub c2: f64,
    pub d: usize,
}

impl Default for RateParams {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            r: 0.5,
            c_k: 1.0,
            c_fstar: 1.0,
            sigma_rho: 1.0,
            nu0: 1.0,
            beta: 1.0,
            c_beta: 1.0,
            c2: 1.0,
            d: 3,
        }
    }
}

impl RateParams {
    pub fn validate(&self) -> Result<(), SpectraError> {
        let bad = |m: String| Err(SpectraError::InvalidArgument(m));
        if !(self.alpha > 1.0) {
            return bad(format!("alpha must exceed 1, got {}", self.alpha));
        }
        if !(self.r > (self.alpha - 1.0) / (2.0 * self.alpha)) {
            return bad(format!("r = {} violates r > (alpha-1)/(2 alpha)", self.r));
        }
        for (name, v) in [("C_K", self.c_k), ("C_fstar", self.c_fstar), ("sigma_rho", self.sigma_rho), ("C2", self.c2)] {
            if !(v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.nu0 > 0.0 && self.nu0 <= 1.0) {
            return bad(format!("nu0 must lie in (0, 1], got {}", self.nu0));
        }
        if self.d < 3 {
            return bad(format!("d must be at least 3, got {}", self.d));
        }
        Ok(())
    }

    fn ar(&self, mode: RateMode) -> f64 {
        match mode {
            RateMode::Invariant => self.alpha * self.r,
            RateMode::Stable => self.r,
        }
    }

    /// Power of `ν` in the cutoff condition.
    pub fn nu_exponent(&self, mode: RateMode) -> f64 {
        2.0 * self.ar(mode) / (2.0 * self.alpha * self.r + 1.0)
    }

    /// Rate exponent `2αr/(2αr+1)` of the excess risk.
    pub fn rate_exponent(&self) -> f64 {
        2.0 * self.alpha * self.r / (2.0 * self.alpha * self.r + 1.0)
    }
}

/// Largest `ℓ ≤ kmax` with `D(ℓ) ≤ C₂ ν(ℓ)^p n^{1/(2αr+1)}`, and `ν(ℓ)` there.
/// `ℓ = 0` is always feasible since `D(0) = 0`.
pub fn ln_solver(
    params: &RateParams,
    dfun: impl Fn(usize) -> f64,
    nufun: impl Fn(usize) -> f64,
    kmax: usize,
    n: f64,
    mode: RateMode,
) -> Result<(usize, f64), SpectraError> {
    params.validate()?;
    if !(n >= 1.0) {
        return Err(SpectraError::InvalidArgument(format!("n must be at least 1, got {n}")));
    }
    let p = params.nu_exponent(mode);
    let scale = params.c2 * n.powf(1.0 / (2.0 * params.alpha * params.r + 1.0));
    let mut best = 0;
    for l in 0..=kmax {
        if dfun(l) <= scale * nufun(l).powf(p) {
            best = l;
        }
    }
    Ok((best, nufun(best)))
}

/// `ν₀ + C·min{(ν₀^{2a} n)^{−β/((d−1)(2αr+1))}, n^{−β/((d−1)(2αr+1)+2βa)}}` with
/// `a = αr` (invariant) or `a = r` (stable).
pub fn nud_estimate(params: &RateParams, n: f64, mode: RateMode) -> Result<f64, SpectraError> {
    params.validate()?;
    if !(n >= 1.0) {
        return Err(SpectraError::InvalidArgument(format!("n must be at least 1, got {n}")));
    }
    let a = params.ar(mode);
    let base = (params.d as f64 - 1.0) * (2.0 * params.alpha * params.r + 1.0);
    let first = (params.nu0.powf(2.0 * a) * n).powf(-params.beta / base);
    let second = n.powf(-params.beta / (base + 2.0 * params.beta * a));
    Ok(params.nu0 + params.c_beta * first.min(second))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(RateParams::default().validate().is_ok());
        assert!(RateParams { alpha: 1.0, ..Default::default() }.validate().is_err());
        assert!(RateParams { alpha: 3.0, r: 0.3, ..Default::default() }.validate().is_err());
        assert!(RateParams { nu0: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn estimate_limits() {
        let p = RateParams { nu0: 0.125, beta: 2.0, d: 8, ..Default::default() };
        for mode in [RateMode::Invariant, RateMode::Stable] {
            let mut last = f64::INFINITY;
            for e in 0..40 {
                let v = nud_estimate(&p, 10f64.powi(e), mode).unwrap();
                assert!(v <= last + 1e-15);
                last = v;
            }
            assert!((nud_estimate(&p, 1e300, mode).unwrap() - 0.125).abs() < 1e-3);
            let flat = RateParams { beta: 0.0, ..p };
            assert!((nud_estimate(&flat, 1e6, mode).unwrap() - 1.125).abs() < 1e-15);
        }
    }

    #[test]
    fn cutoff_is_zero_for_tiny_n_and_monotone() {
        let p = RateParams::default();
        let dfun = |l: usize| (l * l) as f64 * 10.0;
        let nufun = |l: usize| if l == 0 { 1.0 } else { 0.5 };
        assert_eq!(ln_solver(&p, dfun, nufun, 50, 1.0, RateMode::Invariant).unwrap(), (0, 1.0));
        let mut last = 0;
        for e in 0..12 {
            let (l, _) = ln_solver(&p, dfun, nufun, 50, 10f64.powi(e), RateMode::Invariant).unwrap();
            assert!(l >= last);
            last = l;
        }
        assert!(last > 0);
    }
}
