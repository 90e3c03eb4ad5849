//! Harmonic analysis on the sphere `S^{d-1}` through Legendre polynomials.
//!
//! Nothing here builds individual spherical harmonics; everything is expressed
//! with `P_{d,k}` and the addition formula.

mod kernel;
mod legendre;
mod quadrature;
mod spectrum;

use thiserror::Error;

pub use kernel::{arccos1, KernelFunction};
pub(crate) use kernel::{param, parse_descriptor};
pub use legendre::{binomial, dim_harmonic, legendre_batch, legendre_eval, LegendreEvaluator};
pub(crate) use legendre::fill_batch;
pub use quadrature::{build_quadrature, sphere_ratio, surface_area, QuadratureRule};
pub use spectrum::{funk_hecke_coeff, SpectralProfile, FH_TOLERANCE, MU_CLAMP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicsError {
    #[error("dimension {0} not supported (need d >= 3, or p >= 1 for surface areas)")]
    Dimension(usize),
    #[error("argument {0} outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("degree {k} exceeds kmax = {kmax}")]
    DegreeTooLarge { k: usize, kmax: usize },
    #[error("quadrature order must be >= 1, got {0}")]
    QuadratureOrder(usize),
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("kernel: {0}")]
    Kernel(String),
}
