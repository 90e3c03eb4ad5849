//! Permutation statistics counts and the 1/2/3-block tiling recursion.

use super::TransformationSet;
use crate::harmonics::binomial;

/// `ζ(G, s) = |{σ ∈ G : c(σ) > s}|`.
pub fn zeta_count(set: &TransformationSet, s: usize) -> usize {
    set.elements().iter().filter(|p| p.cycle_stats().cycles > s).count()
}

/// `|{σ ∈ G : Fix(σ) > s}|` by enumeration.
pub fn xi_brute(set: &TransformationSet, s: usize) -> usize {
    set.elements().iter().filter(|p| p.fixed_points() > s).count()
}

/// Number of derangements `!m`, by `!m = (m−1)(!(m−1) + !(m−2))`.
///
/// Panics if the value does not fit in `u128` (`m > 34`).
pub fn subfactorial(m: usize) -> u128 {
    let (mut a, mut b) = (1u128, 0u128);
    if m == 0 {
        return a;
    }
    for i in 2..=m {
        let next = ((i - 1) as u128)
            .checked_mul(a + b)
            .expect("subfactorial overflows u128");
        a = b;
        b = next;
    }
    b
}

/// `ξ(S_d, s) = Σ_{j=s+1}^{d} C(d, j) · !(d − j)`.
pub fn xi_closed_form(d: usize, s: usize) -> u128 {
    (s + 1..=d)
        .map(|j| binomial(d as u128, j as u128).expect("binomial overflow") * subfactorial(d - j))
        .sum()
}

/// `B(m; B_1), B(m; B_2), B(m; B_3)` for one length `m`.
pub type TilingCounts = [u128; 3];

/// Tilings of a length-`m` strip by blocks of size 1, 2 and 3 classified by the
/// last block, for `m = 0..=l`:
/// `B(m;B₁) = Σᵢ B(m−1;Bᵢ)`, `B(m;B₂) = B(m−2;B₁) + B(m−2;B₂)`, `B(m;B₃) = B(m−3;B₁)`,
/// with `B(i;Bᵢ) = 1` and `B(m;·) = 0` for `m < i`.
pub fn block_tiling_counts(l: usize) -> Vec<TilingCounts> {
    let mut b: Vec<TilingCounts> = Vec::with_capacity(l + 1);
    for m in 0..=l {
        let at = |k: usize| if m >= k { Some(b[m - k]) } else { None };
        let mut row = [0u128; 3];
        row[0] = match (m, at(1)) {
            (1, _) => 1,
            (_, Some(p)) => p.iter().sum(),
            _ => 0,
        };
        row[1] = match (m, at(2)) {
            (2, _) => 1,
            (_, Some(p)) => p[0] + p[1],
            _ => 0,
        };
        row[2] = match (m, at(3)) {
            (3, _) => 1,
            (_, Some(p)) => p[0],
            _ => 0,
        };
        b.push(row);
    }
    b
}

/// `Σᵢ B(m; Bᵢ)` for `m = 0..=l`.
pub fn block_tiling_totals(l: usize) -> Vec<u128> {
    block_tiling_counts(l).iter().map(|r| r.iter().sum()).collect()
}

fn characteristic(z: f64) -> f64 {
    z - 1.0 - 1.0 / (z * z - 1.0) - 1.0 / (z * z * z)
}

fn characteristic_deriv(z: f64) -> f64 {
    1.0 + 2.0 * z / (z * z - 1.0).powi(2) + 3.0 / z.powi(4)
}

/// Root of `z = 1 + 1/(z²−1) + 1/z³` in `(1.5, 2)`.
pub fn growth_root() -> f64 {
    let (mut lo, mut hi) = (1.5, 2.0);
    debug_assert!(characteristic(lo) < 0.0 && characteristic(hi) > 0.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if characteristic(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    for _ in 0..50 {
        let step = characteristic(z) / characteristic_deriv(z);
        z -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::{gen_cyclic, gen_symmetric};

    #[test]
    fn subfactorials() {
        assert_eq!(subfactorial(0), 1);
        assert_eq!(subfactorial(1), 0);
        assert_eq!(subfactorial(2), 1);
        assert_eq!(subfactorial(4), 9);
        // floor((m! + 1)/e)
        let mut fact = 1.0f64;
        for m in 1..=15usize {
            fact *= m as f64;
            assert_eq!(subfactorial(m), ((fact + 1.0) / std::f64::consts::E).floor() as u128);
        }
    }

    #[test]
    fn zeta_and_xi() {
        for d in 3..=8 {
            let c = gen_cyclic(d).unwrap();
            assert_eq!(zeta_count(&c, d - 1), 1);
            assert_eq!(zeta_count(&c, 0), d);
        }
        let s4 = gen_symmetric(4).unwrap();
        assert_eq!(zeta_count(&s4, 2), 7);
        assert_eq!(xi_closed_form(4, 1), 7);
        for d in 1..=7 {
            let g = gen_symmetric(d).unwrap();
            assert_eq!(xi_closed_form(d, d - 1), 1);
            for s in 0..=d {
                assert_eq!(xi_closed_form(d, s), xi_brute(&g, s) as u128, "d={d} s={s}");
            }
        }
    }

    #[test]
    fn tilings() {
        let b = block_tiling_counts(12);
        assert_eq!((b[1][0], b[2][1], b[3][2]), (1, 1, 1));
        assert_eq!(b[0], [0, 0, 0]);
        let t = block_tiling_totals(11);
        assert_eq!(t, vec![0, 1, 2, 4, 7, 11, 19, 33, 57, 97, 166, 285]);
    }

    #[test]
    fn root() {
        let z = growth_root();
        assert!(characteristic(z).abs() <= 1e-12);
        assert!((z - 1.714).abs() < 1e-3);
    }
}
