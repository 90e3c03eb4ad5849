//! Gauss rules for the weight `dw(t) = (1 - t^2)^{(d-3)/2} dt` on `[-1, 1]`,
//! and sphere surface areas.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::legendre::LegendreEvaluator;
use super::HarmonicsError;

/// `Γ(m/2)` for integer `m >= 1`, by the recurrence from `Γ(1/2)` or `Γ(1)`.
pub(crate) fn gamma_half(m: usize) -> f64 {
    assert!(m >= 1);
    let (mut x, mut acc) = if m % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = m as f64 / 2.0;
    while x < target {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// `ω_{p-1} = 2 π^{p/2} / Γ(p/2)`, the surface area of the unit sphere in `R^p`.
pub fn surface_area(p: usize) -> Result<f64, HarmonicsError> {
    if p == 0 {
        return Err(HarmonicsError::Dimension(0));
    }
    Ok(2.0 * PI.powf(p as f64 / 2.0) / gamma_half(p))
}

/// `ω_{d-1} / ω_{d-2}`: the total mass of `dw`.
pub fn sphere_ratio(d: usize) -> f64 {
    PI.sqrt() * gamma_half(d - 1) / gamma_half(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub d: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Polynomials up to this degree are integrated exactly against `dw`.
    pub order: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

const NEWTON_MAX_ITERS: usize = 100;

/// Gauss rule with `n = ceil((order+1)/2)` nodes for the weight `(1-t^2)^a`,
/// `a = (d-3)/2`.
///
/// Nodes are the zeros of `P_{d,n}`, found by Newton iteration on the recurrence
/// with deflation against roots already found. Weights use the closed form
///
/// ```text
/// w_i = 2^{2a+1} Γ(n+1) Γ(a+1)^2 / Γ(n+2a+1) * (1 - x_i^2) / (n P_{d,n-1}(x_i))^2
/// ```
///
/// where `2a = d-3` is an integer so the gamma ratio reduces to a finite product.
pub fn build_quadrature(d: usize, order: usize) -> Result<QuadratureRule, HarmonicsError> {
    if d < 3 {
        return Err(HarmonicsError::Dimension(d));
    }
    if order == 0 {
        return Err(HarmonicsError::QuadratureOrder(order));
    }
    let n = (order + 1).div_ceil(2);
    let a = (d as f64 - 3.0) / 2.0;

    let mut roots: Vec<f64> = Vec::with_capacity(n);
    for i in 1..=n {
        let theta = PI * (i as f64 - 0.25 + 0.5 * a) / (n as f64 + a + 0.5);
        let mut x = theta.cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERS {
            let (p, _, dp) = LegendreEvaluator::with_derivative(d, n, x);
            let defl: f64 = roots.iter().map(|r| 1.0 / (x - r)).sum();
            let step = p / (dp - p * defl);
            x -= step;
            if !x.is_finite() {
                break;
            }
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                converged = true;
                break;
            }
        }
        if !converged || x.abs() >= 1.0 {
            return Err(HarmonicsError::NonConvergent(format!(
                "Newton failed for root {i} of P_{{{d},{n}}}"
            )));
        }
        roots.push(x);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if roots.windows(2).any(|w| w[1] - w[0] <= 0.0) {
        return Err(HarmonicsError::NonConvergent(format!(
            "duplicate roots for P_{{{d},{n}}}"
        )));
    }

    let mut log_const = (d as f64 - 2.0) * 2f64.ln();
    // Γ(n+1)/Γ(n+2a+1) = 1 / prod_{j=1}^{d-3} (n + j)
    for j in 1..=(d - 3) {
        log_const -= ((n + j) as f64).ln();
    }
    // Γ(a+1) = Γ((d-1)/2)
    log_const += 2.0 * gamma_half(d - 1).ln();
    let c = log_const.exp();

    let nf = n as f64;
    let weights = roots
        .iter()
        .map(|&x| {
            let pnm1 = if n == 1 {
                1.0
            } else {
                LegendreEvaluator::with_derivative(d, n, x).1
            };
            c * (1.0 - x * x) / (nf * pnm1).powi(2)
        })
        .collect();

    Ok(QuadratureRule {
        d,
        nodes: roots,
        weights,
        order: 2 * n - 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harmonics::legendre::{dim_harmonic, legendre_eval};

    #[test]
    fn surface_areas() {
        assert!(surface_area(0).is_err());
        assert!((surface_area(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((surface_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((surface_area(3).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((surface_area(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        for d in 3..12 {
            let r = surface_area(d).unwrap() / surface_area(d - 1).unwrap();
            assert!((sphere_ratio(d) - r).abs() < 1e-13 * r);
        }
    }

    #[test]
    fn gauss_legendre_small() {
        let q = build_quadrature(3, 3).unwrap();
        assert_eq!(q.len(), 2);
        let s = 1.0 / 3f64.sqrt();
        assert!((q.nodes[0] + s).abs() < 1e-15 && (q.nodes[1] - s).abs() < 1e-15);
        assert!((q.weights[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn total_mass_and_nodes() {
        for d in 3..=24 {
            for order in [1, 2, 7, 40, 131] {
                let q = build_quadrature(d, order).unwrap();
                assert!(q.order >= order);
                let mass = sphere_ratio(d);
                assert!(
                    (q.total_mass() - mass).abs() <= 1e-12 * mass,
                    "d={d} order={order} mass={} vs {mass}",
                    q.total_mass()
                );
                assert!(q.nodes.iter().all(|t| t.abs() < 1.0));
                assert!(q.weights.iter().all(|&w| w > 0.0));
            }
        }
    }

    #[test]
    fn norm_and_orthogonality() {
        for d in [3, 4, 5, 6, 9] {
            let q = build_quadrature(d, 64).unwrap();
            let p = |k| move |t: f64| legendre_eval(d, k, t).unwrap();
            let p1p2 = q.integrate(|t| p(1)(t) * p(2)(t));
            assert!(p1p2.abs() < 1e-12);
            for k in 0..=20 {
                let exact = sphere_ratio(d) / dim_harmonic(d, k) as f64;
                let got = q.integrate(|t| p(k)(t).powi(2));
                assert!((got - exact).abs() <= 1e-10 * exact, "d={d} k={k}");
            }
        }
        let q = build_quadrature(4, 8).unwrap();
        let got = q.integrate(|t| legendre_eval(4, 3, t).unwrap().powi(2));
        let exact = sphere_ratio(4) / 16.0;
        assert!((got - exact).abs() <= 1e-10 * exact);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(build_quadrature(5, 0).is_err());
        assert!(build_quadrature(2, 5).is_err());
    }
}
