//! Funk–Hecke coefficients `μ_k` of dot-product kernels and Mercer truncations.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::kernel::KernelFunction;
use super::legendre::{dim_harmonic, fill_batch, legendre_eval};
use super::quadrature::{build_quadrature, sphere_ratio};
use super::HarmonicsError;

/// Successive-order disagreement above which a coefficient is reported as unconverged.
pub const FH_TOLERANCE: f64 = 1e-8;

/// Negative coefficients above this value are treated as quadrature noise.
pub const MU_CLAMP: f64 = 1e-14;

/// `μ_k` for `k = 0..=kmax` using Gauss–Legendre nodes in the angle,
/// `μ_k = (ω_{d-2}/ω_{d-1}) ∫_0^π κ(cos θ) P_{d,k}(cos θ) sin^{d-2} θ dθ`.
fn coefficients_at_order(
    kernel: &KernelFunction,
    d: usize,
    kmax: usize,
    order: usize,
) -> Result<Vec<f64>, HarmonicsError> {
    let gl = build_quadrature(3, order)?;
    let scale = 1.0 / sphere_ratio(d);
    let mut mu = vec![0.0; kmax + 1];
    let mut pk = vec![0.0; kmax + 1];
    for (&s, &w) in gl.nodes.iter().zip(&gl.weights) {
        let theta = 0.5 * PI * (s + 1.0);
        let (sin_t, cos_t) = theta.sin_cos();
        let jac = 0.5 * PI * w * sin_t.powi(d as i32 - 2);
        let kv = kernel.eval_angle(cos_t, sin_t, theta) * jac;
        fill_batch(d, cos_t, &mut pk);
        for (m, p) in mu.iter_mut().zip(&pk) {
            *m += kv * p;
        }
    }
    mu.iter_mut().for_each(|m| *m *= scale);
    Ok(mu)
}

fn funk_hecke_all(
    kernel: &KernelFunction,
    d: usize,
    kmax: usize,
) -> Result<Vec<f64>, HarmonicsError> {
    if d < 3 {
        return Err(HarmonicsError::Dimension(d));
    }
    kernel.validate_for_dimension(d)?;
    let order = (2 * kmax + 64).max(64);
    let coarse = coefficients_at_order(kernel, d, kmax, order)?;
    let mut fine = coefficients_at_order(kernel, d, kmax, 2 * order)?;
    for (k, (c, f)) in coarse.iter().zip(&fine).enumerate() {
        if (c - f).abs() > FH_TOLERANCE {
            return Err(HarmonicsError::NonConvergent(format!(
                "mu_{k}: orders {order} and {} disagree by {:e}",
                2 * order,
                (c - f).abs()
            )));
        }
    }
    for m in fine.iter_mut() {
        if *m < 0.0 && *m > -MU_CLAMP {
            *m = 0.0;
        }
    }
    Ok(fine)
}

/// Single Funk–Hecke coefficient `μ_k` of `kernel` in dimension `d`.
pub fn funk_hecke_coeff(
    kernel: &KernelFunction,
    d: usize,
    k: usize,
) -> Result<f64, HarmonicsError> {
    Ok(funk_hecke_all(kernel, d, k)?[k])
}

/// Kernel eigenvalue table `{μ_k, N(d,k)}` for `k = 0..=kmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub d: usize,
    pub kernel: KernelFunction,
    pub mu: Vec<f64>,
    pub dims: Vec<u128>,
}

impl SpectralProfile {
    pub fn compute(kernel: KernelFunction, d: usize, kmax: usize) -> Result<Self, HarmonicsError> {
        let mu = funk_hecke_all(&kernel, d, kmax)?;
        let dims = (0..=kmax).map(|k| dim_harmonic(d, k)).collect();
        Ok(Self { d, kernel, mu, dims })
    }

    pub fn kmax(&self) -> usize {
        self.mu.len() - 1
    }

    /// `Σ_{k ≤ L} μ_k N(d,k) P_{d,k}(t)`.
    pub fn mercer_reconstruct(&self, l: usize, t: f64) -> Result<f64, HarmonicsError> {
        if l > self.kmax() {
            return Err(HarmonicsError::DegreeTooLarge { k: l, kmax: self.kmax() });
        }
        legendre_eval(self.d, 0, t)?;
        let mut p = vec![0.0; l + 1];
        fill_batch(self.d, t, &mut p);
        Ok((0..=l).map(|k| self.mu[k] * self.dims[k] as f64 * p[k]).sum())
    }

    /// Partial trace `Σ_{k ≤ L} μ_k N(d,k)`, which tends to `κ(1)`.
    pub fn partial_trace(&self, l: usize) -> f64 {
        let l = l.min(self.kmax());
        (0..=l).map(|k| self.mu[k] * self.dims[k] as f64).sum()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "N", "mu"])?;
        for (k, (mu, n)) in self.mu.iter().zip(&self.dims).enumerate() {
            wr.write_record([k.to_string(), n.to_string(), format!("{mu:e}")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_linear_kernels() {
        let one = KernelFunction::Monomial { p: 0 };
        let p = SpectralProfile::compute(one, 5, 6).unwrap();
        assert!((p.mu[0] - 1.0).abs() < 1e-13);
        assert!(p.mu[1..].iter().all(|m| m.abs() < 1e-13));

        for d in [3, 4, 7, 12] {
            let lin = SpectralProfile::compute(KernelFunction::Monomial { p: 1 }, d, 8).unwrap();
            assert!((lin.mu[1] - 1.0 / d as f64).abs() < 1e-13);
            for k in [0, 2, 3, 4, 8] {
                assert!(lin.mu[k].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn single_frequency_kernels() {
        for (d, j) in [(3, 2), (5, 3), (6, 5)] {
            let k = KernelFunction::LegendreSingle { d, k: j };
            let p = SpectralProfile::compute(k, d, 10).unwrap();
            for kk in 0..=10 {
                let want = if kk == j { 1.0 / dim_harmonic(d, j) as f64 } else { 0.0 };
                assert!((p.mu[kk] - want).abs() < 1e-12, "d={d} j={j} k={kk}");
            }
            for i in 0..=20 {
                let t = -1.0 + 0.1 * i as f64;
                let rec = p.mercer_reconstruct(j, t).unwrap();
                assert!((rec - legendre_eval(d, j, t).unwrap()).abs() < 1e-8);
            }
        }
        assert!(funk_hecke_coeff(&KernelFunction::LegendreSingle { d: 5, k: 2 }, 4, 1).is_err());
    }

    #[test]
    fn arc_cosine_spectrum_is_nonnegative_and_traces_to_one() {
        for kernel in [KernelFunction::ArcCosine1, KernelFunction::ReluComposite] {
            let p = SpectralProfile::compute(kernel, 5, 80).unwrap();
            assert!(p.mu.iter().all(|&m| m >= -1e-10));
            let mut last = 0.0;
            for l in [0, 5, 20, 80] {
                let tr = p.partial_trace(l);
                assert!(tr >= last - 1e-14);
                last = tr;
            }
            assert!((last - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn trivial_reconstruction() {
        let p = SpectralProfile::compute(KernelFunction::Monomial { p: 0 }, 4, 0).unwrap();
        assert!((p.mercer_reconstruct(0, 0.3).unwrap() - 1.0).abs() < 1e-13);
        assert!(p.mercer_reconstruct(1, 0.3).is_err());
    }

    #[test]
    fn csv_and_json() {
        let p = SpectralProfile::compute(KernelFunction::ArcCosine1, 4, 3).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("k,N,mu\n0,1,"));
        assert_eq!(s.lines().count(), 5);
        let back: SpectralProfile = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
