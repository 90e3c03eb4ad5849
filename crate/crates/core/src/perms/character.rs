//! Exact traces of a permutation on spherical harmonics of each degree.
//!
//! The trace of `σ` on homogeneous polynomials of degree `j` is the coefficient
//! `h_j = [t^j] Π_c (1 − t^{ℓ_c})⁻¹` over the cycles of `σ`, and the trace on
//! harmonics of degree `k` is `h_k − h_{k−2}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{PermError, Permutation};
use crate::harmonics::dim_harmonic;

/// Truncated power series `Π_c (1 − t^{ℓ_c})⁻¹` with 128-bit coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCounter {
    coeffs: Vec<i128>,
}

impl SeriesCounter {
    /// Fails with [`PermError::Overflow`] when a coefficient exceeds `i128`.
    pub fn new(cycle_lengths: &[usize], kmax: usize) -> Result<Self, PermError> {
        let mut c = vec![0i128; kmax + 1];
        c[0] = 1;
        for &l in cycle_lengths {
            if l == 0 {
                return Err(PermError::Unsupported("zero cycle length".into()));
            }
            for j in l..=kmax {
                c[j] = c[j].checked_add(c[j - l]).ok_or(PermError::Overflow(j))?;
            }
        }
        Ok(Self { coeffs: c })
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> i128 {
        self.coeffs[j]
    }

    /// `h_k − h_{k−2}`.
    pub fn harmonic_trace(&self, k: usize) -> i128 {
        self.coeffs[k] - if k >= 2 { self.coeffs[k - 2] } else { 0 }
    }
}

fn big_series(cycle_lengths: &[usize], kmax: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); kmax + 1];
    c[0] = BigInt::from(1);
    for &l in cycle_lengths {
        for j in l..=kmax {
            let add = c[j - l].clone();
            c[j] += add;
        }
    }
    c
}

/// Harmonic traces `h_k − h_{k−2}` for `k = 0..=kmax`, escalating to arbitrary
/// precision if 128-bit arithmetic overflows.
pub fn harmonic_traces(cycle_lengths: &[usize], kmax: usize) -> Vec<BigInt> {
    match SeriesCounter::new(cycle_lengths, kmax) {
        Ok(s) => (0..=kmax).map(|k| BigInt::from(s.harmonic_trace(k))).collect(),
        Err(_) => {
            let h = big_series(cycle_lengths, kmax);
            (0..=kmax)
                .map(|k| if k >= 2 { &h[k] - &h[k - 2] } else { h[k].clone() })
                .collect()
        }
    }
}

/// `E_x[P_{d,k}(⟨σ·x, x⟩)]` as an exact rational, with `d = σ.d() ≥ 3`.
pub fn char_ratio_exact(sigma: &Permutation, k: usize) -> Result<BigRational, PermError> {
    let d = sigma.d();
    if d < 3 {
        return Err(PermError::Unsupported(format!("need d >= 3, got {d}")));
    }
    let tr = harmonic_traces(&sigma.cycle_lengths(), k).pop().expect("nonempty");
    Ok(BigRational::new(tr, BigInt::from(dim_harmonic(d, k))))
}

pub fn char_ratio_f64(sigma: &Permutation, k: usize) -> Result<f64, PermError> {
    Ok(char_ratio_exact(sigma, k)?.to_f64().unwrap_or(f64::NAN))
}
