use super::deformation::{deformation_dfs, deformation_filter, DEFAULT_DEFORMATION_CAP};
use super::{PermError, Permutation, TransformationSet};

/// Largest accepted `s^r` for block-cyclic groups.
pub const BLOCK_CYCLIC_CAP: usize = 1_000_000;

/// Largest `d` accepted by [`gen_symmetric`].
pub const SYMMETRIC_MAX_D: usize = 8;

fn check_d(d: usize) -> Result<(), PermError> {
    if d == 0 {
        return Err(PermError::Unsupported("d must be positive".into()));
    }
    Ok(())
}

pub fn gen_trivial(d: usize) -> Result<TransformationSet, PermError> {
    check_d(d)?;
    Ok(TransformationSet::uniform_trusted(d, vec![Permutation::identity(d)], true).with_label(format!("trivial:d={d}")))
}

/// `{id, (0 1)}`.
pub fn gen_transposition(d: usize) -> Result<TransformationSet, PermError> {
    if d < 2 {
        return Err(PermError::Unsupported("transposition needs d >= 2".into()));
    }
    let t = Permutation::from_cycles(d, &[&[0, 1]])?;
    Ok(TransformationSet::uniform_trusted(d, vec![Permutation::identity(d), t], true)
        .with_label(format!("transposition:d={d}")))
}

/// The `d` cyclic translations.
pub fn gen_cyclic(d: usize) -> Result<TransformationSet, PermError> {
    check_d(d)?;
    let elems = (0..d).map(|j| Permutation::shift(d, j)).collect();
    Ok(TransformationSet::uniform_trusted(d, elems, true).with_label(format!("cyclic:d={d}")))
}

/// Independent translations of `r` consecutive blocks of length `s`.
pub fn gen_block_cyclic(s: usize, r: usize) -> Result<TransformationSet, PermError> {
    if s == 0 || r == 0 {
        return Err(PermError::Unsupported("block size and count must be positive".into()));
    }
    let size = (0..r).try_fold(1usize, |acc, _| acc.checked_mul(s).filter(|&v| v <= BLOCK_CYCLIC_CAP));
    let size = size.ok_or(PermError::CapExceeded { cap: BLOCK_CYCLIC_CAP, partial: 0 })?;
    let d = s * r;
    let mut elems = Vec::with_capacity(size);
    let mut shifts = vec![0usize; r];
    for _ in 0..size {
        let mut m = vec![0; d];
        for (b, &j) in shifts.iter().enumerate() {
            for i in 0..s {
                m[b * s + i] = b * s + (i + j) % s;
            }
        }
        elems.push(Permutation::from_vec_unchecked(m));
        for sh in shifts.iter_mut() {
            *sh += 1;
            if *sh < s {
                break;
            }
            *sh = 0;
        }
    }
    Ok(TransformationSet::uniform_trusted(d, elems, true).with_label(format!("blockcyclic:s={s},r={r}")))
}

/// All `d!` permutations in lexicographic order.
pub fn gen_symmetric(d: usize) -> Result<TransformationSet, PermError> {
    check_d(d)?;
    if d > SYMMETRIC_MAX_D {
        return Err(PermError::Unsupported(format!(
            "symmetric group enumeration is capped at d = {SYMMETRIC_MAX_D} (got {d})"
        )));
    }
    let mut cur: Vec<usize> = (0..d).collect();
    let mut elems = vec![Permutation::from_vec_unchecked(cur.clone())];
    while next_permutation(&mut cur) {
        elems.push(Permutation::from_vec_unchecked(cur.clone()));
    }
    Ok(TransformationSet::uniform_trusted(d, elems, true).with_label(format!("symmetric:d={d}")))
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The deformation set `Φ_ε`. Uses the step-rule enumerator for `ε ≤ 2` and the
/// exhaustive filter over `S_d` for larger `ε` when `d ≤ 9`.
pub fn gen_deformation(d: usize, eps: usize) -> Result<TransformationSet, PermError> {
    check_d(d)?;
    let elems = if eps <= 2 {
        if d > 24 {
            return Err(PermError::Unsupported(format!("deformation enumeration supports d <= 24 (got {d})")));
        }
        deformation_dfs(d, eps, DEFAULT_DEFORMATION_CAP)?
    } else if d <= 9 {
        deformation_filter(d, eps)?
    } else {
        return Err(PermError::Unsupported(format!("eps = {eps} is only enumerated for d <= 9")));
    };
    let is_group = elems.len() == d;
    Ok(TransformationSet::uniform_trusted(d, elems, is_group).with_label(format!("phi:d={d},eps={eps}")))
}
