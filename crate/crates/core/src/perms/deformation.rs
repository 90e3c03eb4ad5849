//! Deformation sets `Φ_ε`: permutations whose displacement field is ε-Lipschitz
//! on the discrete circle.
//!
//! Differences are taken modulo `d` through neighbour steps
//! `e_u = wrap(σ(u+1) − σ(u) − 1)` with representatives in `(−d/2, d/2]`. A
//! permutation belongs to `Φ_ε` when the steps have zero winding and the lifted
//! displacement `Δ̃_u = Σ_{v<u} e_v` satisfies
//! `|Δ̃_u − Δ̃_{u'}| ≤ ε · circdist(u, u')` for all pairs.

use super::generators::next_permutation;
use super::{PermError, Permutation, TransformationSet};

/// Default element cap for materialized deformation sets.
pub const DEFAULT_DEFORMATION_CAP: usize = 2_000_000;

/// Representative of `x mod d` in `(−d/2, d/2]`.
#[inline]
pub fn wrap_diff(x: i64, d: usize) -> i64 {
    let d = d as i64;
    let r = x.rem_euclid(d);
    if 2 * r > d {
        r - d
    } else {
        r
    }
}

fn circdist(u: usize, v: usize, d: usize) -> usize {
    let a = u.abs_diff(v);
    a.min(d - a)
}

/// Pairwise membership test for `Φ_ε`.
pub fn in_deformation_set(sigma: &Permutation, eps: usize) -> bool {
    let d = sigma.d();
    let m = sigma.as_slice();
    let mut lift = Vec::with_capacity(d);
    let mut acc = 0i64;
    for u in 0..d {
        lift.push(acc);
        acc += wrap_diff(m[(u + 1) % d] as i64 - m[u] as i64 - 1, d);
    }
    if acc != 0 {
        return false;
    }
    for u in 0..d {
        for v in u + 1..d {
            if lift[u].abs_diff(lift[v]) > (eps * circdist(u, v, d)) as u64 {
                return false;
            }
        }
    }
    true
}

/// Exhaustive filter over `S_d`; the reference enumerator for small `d`.
pub fn deformation_filter(d: usize, eps: usize) -> Result<Vec<Permutation>, PermError> {
    if d > 9 {
        return Err(PermError::Unsupported(format!("exhaustive filter limited to d <= 9 (got {d})")));
    }
    let mut cur: Vec<usize> = (0..d).collect();
    let mut out = Vec::new();
    loop {
        let p = Permutation::from_vec_unchecked(cur.clone());
        if in_deformation_set(&p, eps) {
            out.push(p);
        }
        if !next_permutation(&mut cur) {
            break;
        }
    }
    Ok(out)
}

/// Depth-first walk over images `σ(0), σ(1), ...` where each neighbour step
/// satisfies `|e_u| ≤ ε`, pruned on the winding constraint. Calls `leaf` on every
/// complete candidate; stops early when `leaf` returns `false`.
fn step_walk(d: usize, eps: usize, mut leaf: impl FnMut(&[usize]) -> bool) {
    let eps_i = eps as i64;
    let mut img = vec![0usize; d];
    let mut used = vec![false; d];

    fn rec(
        u: usize,
        esum: i64,
        d: usize,
        eps: i64,
        img: &mut [usize],
        used: &mut [bool],
        leaf: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if u == d {
            let e = wrap_diff(img[0] as i64 - img[d - 1] as i64 - 1, d);
            if e.abs() <= eps && esum + e == 0 {
                return leaf(img);
            }
            return true;
        }
        // steps left after this one, including the closing step
        let remaining = (d - u) as i64;
        let cur = img[u - 1];
        for v in 0..d {
            if used[v] {
                continue;
            }
            let e = wrap_diff(v as i64 - cur as i64 - 1, d);
            if e.abs() > eps || (esum + e).abs() > eps * remaining {
                continue;
            }
            used[v] = true;
            img[u] = v;
            let go_on = rec(u + 1, esum + e, d, eps, img, used, leaf);
            used[v] = false;
            if !go_on {
                return false;
            }
        }
        true
    }

    for a in 0..d {
        img[0] = a;
        used[a] = true;
        if d == 1 {
            if !leaf(&img) {
                return;
            }
        } else if !rec(1, 0, d, eps_i, &mut img, &mut used, &mut leaf) {
            return;
        }
        used[a] = false;
    }
}

/// Step-rule enumeration of `Φ_ε` followed by the full pairwise filter.
/// Errors with the partial count once more than `cap` elements are found.
pub fn deformation_dfs(d: usize, eps: usize, cap: usize) -> Result<Vec<Permutation>, PermError> {
    let mut out = Vec::new();
    let mut over = false;
    step_walk(d, eps, |img| {
        let p = Permutation::from_vec_unchecked(img.to_vec());
        if in_deformation_set(&p, eps) {
            if out.len() == cap {
                over = true;
                return false;
            }
            out.push(p);
        }
        true
    });
    if over {
        return Err(PermError::CapExceeded { cap, partial: out.len() });
    }
    Ok(out)
}

/// `|Φ_ε|` by the step rule alone, without materializing elements.
pub fn count_deformation(d: usize, eps: usize) -> u64 {
    let mut n = 0u64;
    step_walk(d, eps, |_| {
        n += 1;
        true
    });
    n
}

/// Elements fixing both `u0` and `u0 − 1 (mod d)`.
pub fn fixed_boundary_subset(set: &TransformationSet, u0: usize) -> Vec<Permutation> {
    let d = set.d();
    let prev = (u0 + d - 1) % d;
    set.elements()
        .iter()
        .filter(|p| p.image(u0 % d) == u0 % d && p.image(prev) == prev)
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_representatives() {
        assert_eq!(wrap_diff(3, 6), 3);
        assert_eq!(wrap_diff(4, 6), -2);
        assert_eq!(wrap_diff(-3, 6), 3);
        assert_eq!(wrap_diff(2, 5), 2);
        assert_eq!(wrap_diff(3, 5), -2);
        assert_eq!(wrap_diff(-7, 5), -2);
    }

    #[test]
    fn dfs_matches_filter() {
        for d in 3..=9 {
            for eps in 0..=2 {
                let mut a = deformation_dfs(d, eps, usize::MAX).unwrap();
                let mut b = deformation_filter(d, eps).unwrap();
                a.sort();
                b.sort();
                assert_eq!(a, b, "d={d} eps={eps}");
                assert_eq!(count_deformation(d, eps), a.len() as u64);
            }
        }
    }

    #[test]
    fn doubling_map_is_excluded() {
        // u ↦ 2u mod 5 has steps all equal to +1 but winds twice around the circle
        let p = Permutation::new(vec![0, 2, 4, 1, 3]).unwrap();
        assert!(!in_deformation_set(&p, 2));
        assert!(!in_deformation_set(&p.inverse(), 2));
    }

    #[test]
    fn cap_reports_partial_count() {
        match deformation_dfs(8, 2, 10) {
            Err(PermError::CapExceeded { cap, partial }) => assert_eq!((cap, partial), (10, 10)),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn known_sizes() {
        let want = [80u64, 144, 301, 600, 1170, 2180, 4125, 7728];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(count_deformation(5 + i, 2), w);
        }
    }
}
