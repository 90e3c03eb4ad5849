//! Sample-complexity gains of group-invariant and geometrically stable kernels
//! on the sphere.
//!
//! * [`harmonics`]: Legendre/Gegenbauer machinery, quadrature, kernel spectra.
//! * [`perms`]: permutations, transformation sets (groups and deformation sets),
//!   cycle statistics, counting formulas and the exact character oracle.
//! * [`spectra`]: `γ_d(k)` tables, `ν_d(ℓ)`, degrees of freedom and rate calculators.
//! * [`kernel_ridge`]: invariant/stable Gram matrices and kernel ridge regression.
//! * [`datagen`]: sphere sampling, symmetrized targets and datasets.

pub mod datagen;
pub mod harmonics;
pub mod kernel_ridge;
pub mod perms;
pub mod rng;
pub mod spectra;
