//! Permutations of `{0, ..., d-1}` acting on `R^d`, transformation sets, and the
//! combinatorics around them.
//!
//! The action on points is `(σ·x)_u = x_{σ⁻¹(u)}`, so coordinate `u` of `x` is
//! moved to position `σ(u)`.

mod character;
mod counting;
mod deformation;
mod generators;
mod set;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use character::{char_ratio_exact, char_ratio_f64, harmonic_traces, SeriesCounter};
pub use counting::{
    block_tiling_counts, block_tiling_totals, growth_root, subfactorial, xi_brute,
    xi_closed_form, zeta_count, TilingCounts,
};
pub use deformation::{
    count_deformation, deformation_dfs, deformation_filter, fixed_boundary_subset,
    in_deformation_set, wrap_diff, DEFAULT_DEFORMATION_CAP,
};
pub use generators::{
    gen_block_cyclic, gen_cyclic, gen_deformation, gen_symmetric, gen_transposition,
    gen_trivial, BLOCK_CYCLIC_CAP, SYMMETRIC_MAX_D,
};
pub use set::{check_inverse_closed, CycleClass, SetDescriptor, TransformationSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PermError {
    #[error("not a permutation of 0..{d}: {detail}")]
    NotBijection { d: usize, detail: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("enumeration cap {cap} exceeded (counted {partial} elements so far)")]
    CapExceeded { cap: usize, partial: usize },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invalid transformation set: {0}")]
    InvalidSet(String),
    #[error("series coefficient overflow at degree {0}")]
    Overflow(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A bijection `u ↦ σ(u)` on `{0, ..., d-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.mapping
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.mapping)
    }
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self, PermError> {
        let d = mapping.len();
        let mut seen = vec![false; d];
        for &v in &mapping {
            if v >= d {
                return Err(PermError::NotBijection { d, detail: format!("image {v} out of range") });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(PermError::NotBijection { d, detail: format!("image {v} repeated") });
            }
        }
        Ok(Self { mapping })
    }

    pub(crate) fn from_vec_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(mapping.clone()).is_ok());
        Self { mapping }
    }

    pub fn identity(d: usize) -> Self {
        Self { mapping: (0..d).collect() }
    }

    /// Cyclic translation `u ↦ u + j (mod d)`.
    pub fn shift(d: usize, j: usize) -> Self {
        Self { mapping: (0..d).map(|u| (u + j) % d).collect() }
    }

    /// Permutation given by disjoint cycles `[a, b, c]` meaning `a → b → c → a`.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut m: Vec<usize> = (0..d).collect();
        let mut touched = vec![false; d];
        for cyc in cycles {
            for (i, &a) in cyc.iter().enumerate() {
                if a >= d || std::mem::replace(&mut touched[a], true) {
                    return Err(PermError::NotBijection { d, detail: format!("bad cycle {cyc:?}") });
                }
                m[a] = cyc[(i + 1) % cyc.len()];
            }
        }
        Permutation::new(m)
    }

    pub fn d(&self) -> usize {
        self.mapping.len()
    }

    #[inline]
    pub fn image(&self, u: usize) -> usize {
        self.mapping[u]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(u, &v)| u == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.d()];
        for (u, &v) in self.mapping.iter().enumerate() {
            inv[v] = u;
        }
        Self { mapping: inv }
    }

    /// `self ∘ other`, i.e. `u ↦ self(other(u))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self, PermError> {
        if self.d() != other.d() {
            return Err(PermError::DimensionMismatch { expected: self.d(), got: other.d() });
        }
        Ok(Self { mapping: other.mapping.iter().map(|&v| self.mapping[v]).collect() })
    }

    /// `σ·x` with `(σ·x)_u = x_{σ⁻¹(u)}`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, PermError> {
        if x.len() != self.d() {
            return Err(PermError::DimensionMismatch { expected: self.d(), got: x.len() });
        }
        let mut out = vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    #[inline]
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (u, &v) in self.mapping.iter().enumerate() {
            out[v] = x[u];
        }
    }

    /// `⟨σ·x, y⟩ = Σ_u x_u y_{σ(u)}` without materializing `σ·x`.
    #[inline]
    pub fn action_dot(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mapping.iter().zip(x).map(|(&v, &xu)| xu * y[v]).sum()
    }

    /// Sorted (descending) cycle lengths.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let d = self.d();
        let mut seen = vec![false; d];
        let mut lens = Vec::new();
        for start in 0..d {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut u = start;
            while !seen[u] {
                seen[u] = true;
                u = self.mapping[u];
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    pub fn cycle_stats(&self) -> CycleStats {
        CycleStats::from_lengths(self.cycle_lengths())
    }

    pub fn fixed_points(&self) -> usize {
        self.mapping.iter().enumerate().filter(|(u, &v)| *u == v).count()
    }

    /// Dense matrix `A_σ` with `A_σ x = σ·x`, row-major.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        let d = self.d();
        let mut a = vec![vec![0.0; d]; d];
        for (u, &v) in self.mapping.iter().enumerate() {
            a[v][u] = 1.0;
        }
        a
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.mapping.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Cycle statistics of a permutation: cycle type, `c(σ)` and `Fix(σ)`.
///
/// `c(σ)` is also the multiplicity of the eigenvalue 1 of `A_σ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycleStats {
    pub cycle_lengths: Vec<usize>,
    pub cycles: usize,
    pub fixed: usize,
}

impl CycleStats {
    pub fn from_lengths(mut lengths: Vec<usize>) -> Self {
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let fixed = lengths.iter().filter(|&&l| l == 1).count();
        Self { cycles: lengths.len(), fixed, cycle_lengths: lengths }
    }

    pub fn d(&self) -> usize {
        self.cycle_lengths.iter().sum()
    }
}

/// Free-function form of [`Permutation::cycle_stats`].
pub fn cycle_stats(sigma: &Permutation) -> CycleStats {
    sigma.cycle_stats()
}

/// Free-function form of [`Permutation::apply`].
pub fn apply(sigma: &Permutation, x: &[f64]) -> Result<Vec<f64>, PermError> {
    sigma.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_perm(max_d: usize) -> impl Strategy<Value = Permutation> {
        (1..=max_d)
            .prop_flat_map(|d| Just((0..d).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    #[test]
    fn validation() {
        assert!(Permutation::new(vec![0, 2, 1]).is_ok());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_cycles(4, &[&[0, 1], &[1, 2]]).is_err());
    }

    #[test]
    fn cycle_statistics() {
        let s = Permutation::identity(5).cycle_stats();
        assert_eq!((s.cycles, s.fixed), (5, 5));
        let s = Permutation::shift(7, 1).cycle_stats();
        assert_eq!((s.cycles, s.fixed), (1, 0));
        let t = Permutation::from_cycles(6, &[&[2, 4]]).unwrap().cycle_stats();
        assert_eq!((t.cycles, t.fixed), (5, 4));
        assert_eq!(t.cycle_lengths, vec![2, 1, 1, 1, 1]);
    }

    #[test]
    fn action_convention() {
        let sigma = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        assert_eq!(sigma.apply(&[1.0, 0.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(Permutation::identity(3).apply(&[0.3, -1.0, 2.0]).unwrap(), vec![0.3, -1.0, 2.0]);
        assert!(sigma.apply(&[1.0, 0.0]).is_err());
        // the matrix realizes the same action
        let a = sigma.matrix();
        let x = [0.2, -0.5, 0.9];
        let ax: Vec<f64> = a.iter().map(|row| row.iter().zip(&x).map(|(r, v)| r * v).sum()).collect();
        assert_eq!(ax, sigma.apply(&x).unwrap());
    }

    #[test]
    fn shift_cycles_match_gcd() {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        for d in 1..=12 {
            for j in 0..d {
                assert_eq!(Permutation::shift(d, j).cycle_stats().cycles, gcd(d, j));
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_and_compose(p in arb_perm(9)) {
            let inv = p.inverse();
            prop_assert_eq!(inv.inverse(), p.clone());
            prop_assert!(p.compose(&inv).unwrap().is_identity());
            prop_assert!(inv.compose(&p).unwrap().is_identity());
        }

        #[test]
        fn action_is_unitary(p in arb_perm(9), seed in 0u64..1000) {
            let mut r = crate::rng::stream(seed, 0, 0);
            let x = crate::rng::unit_vector(&mut r, p.d());
            let y = crate::rng::unit_vector(&mut r, p.d());
            let sx = p.apply(&x).unwrap();
            let sy = p.apply(&y).unwrap();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
            prop_assert!((dot(&sx, &sy) - dot(&x, &y)).abs() < 1e-12);
            prop_assert!((p.action_dot(&x, &y) - dot(&sx, &y)).abs() < 1e-12);
        }

        #[test]
        fn cycle_bound(p in arb_perm(10)) {
            let s = p.cycle_stats();
            prop_assert_eq!(s.d(), p.d());
            prop_assert_eq!(s.fixed, p.fixed_points());
            prop_assert!(2 * s.cycles <= 2 * s.fixed + (p.d() - s.fixed));
        }
    }
}
