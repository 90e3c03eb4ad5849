//! Legendre (Gegenbauer) polynomials `P_{d,k}` normalized so that `P_{d,k}(1) = 1`,
//! and the dimension `N(d,k)` of degree-`k` spherical harmonics in `R^d`.
//!
//! Evaluation uses the upward three-term recurrence
//!
//! ```text
//! t P_k = k/(2k+d-2) P_{k-1} + (k+d-2)/(2k+d-2) P_{k+1},   t P_0 = P_1,
//! ```
//!
//! which is stable on `[-1, 1]`.

use super::HarmonicsError;

fn check_args(d: usize, t: f64) -> Result<(), HarmonicsError> {
    if d < 3 {
        return Err(HarmonicsError::Dimension(d));
    }
    if !(t.abs() <= 1.0) {
        return Err(HarmonicsError::OutOfDomain(t));
    }
    Ok(())
}

#[inline]
fn next_term(d: usize, k: usize, t: f64, pk: f64, pkm1: f64) -> f64 {
    let (d, k) = (d as f64, k as f64);
    ((2.0 * k + d - 2.0) * t * pk - k * pkm1) / (k + d - 2.0)
}

/// Value of `P_{d,k}(t)`.
pub fn legendre_eval(d: usize, k: usize, t: f64) -> Result<f64, HarmonicsError> {
    check_args(d, t)?;
    Ok(eval_unchecked(d, k, t))
}

/// Recurrence without argument checks; callers guarantee `d >= 3` and `|t| <= 1`.
pub(crate) fn eval_unchecked(d: usize, k: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, t);
    for j in 1..k {
        let next = next_term(d, j, t, cur, prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// `[P_{d,0}(t), ..., P_{d,kmax}(t)]` from a single recurrence sweep.
pub fn legendre_batch(d: usize, kmax: usize, t: f64) -> Result<Vec<f64>, HarmonicsError> {
    check_args(d, t)?;
    let mut out = vec![0.0; kmax + 1];
    fill_batch(d, t, &mut out);
    Ok(out)
}

/// Writes `P_{d,k}(t)` for `k = 0..out.len()` into `out`.
pub(crate) fn fill_batch(d: usize, t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = t;
    }
    for k in 1..out.len().saturating_sub(1) {
        out[k + 1] = next_term(d, k, t, out[k], out[k - 1]);
    }
}

/// Evaluator bound to a dimension and a maximal degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegendreEvaluator {
    d: usize,
    kmax: usize,
}

impl LegendreEvaluator {
    pub fn new(d: usize, kmax: usize) -> Result<Self, HarmonicsError> {
        if d < 3 {
            return Err(HarmonicsError::Dimension(d));
        }
        Ok(Self { d, kmax })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn eval(&self, k: usize, t: f64) -> Result<f64, HarmonicsError> {
        if k > self.kmax {
            return Err(HarmonicsError::DegreeTooLarge { k, kmax: self.kmax });
        }
        legendre_eval(self.d, k, t)
    }

    pub fn batch(&self, t: f64) -> Result<Vec<f64>, HarmonicsError> {
        legendre_batch(self.d, self.kmax, t)
    }

    /// Value of `P_{d,k}` together with `P_{d,k-1}` at `t`, and the derivative
    /// `P'_{d,k}(t)` from `(1-t^2) P'_k = k (P_{k-1} - t P_k)` (interior points only).
    pub(crate) fn with_derivative(d: usize, k: usize, t: f64) -> (f64, f64, f64) {
        debug_assert!(k >= 1);
        let (mut prev, mut cur) = (1.0, t);
        for j in 1..k {
            let next = next_term(d, j, t, cur, prev);
            prev = cur;
            cur = next;
        }
        let deriv = k as f64 * (prev - t * cur) / (1.0 - t * t);
        (cur, prev, deriv)
    }
}

/// Binomial coefficient with overflow detection.
pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is exact at every step
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// `N(d,k) = (2k+d-2)/k * C(k+d-3, d-2)` for `k >= 1`, `N(d,0) = 1`.
///
/// # Panics
/// If `d < 3` or the count overflows `u128`.
pub fn dim_harmonic(d: usize, k: usize) -> u128 {
    assert!(d >= 3, "dim_harmonic needs d >= 3, got {d}");
    if k == 0 {
        return 1;
    }
    let (d, k) = (d as u128, k as u128);
    let c = binomial(k + d - 3, d - 2).expect("N(d,k) overflow");
    (2 * k + d - 2).checked_mul(c).expect("N(d,k) overflow") / k
}
