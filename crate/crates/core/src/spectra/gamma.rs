//! `γ_d(k) = Σ_σ h(σ) E_x[P_{d,k}(⟨σ·x, x⟩)]`, exactly and by Monte Carlo.

use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpectraError;
use crate::harmonics::{dim_harmonic, fill_batch};
use crate::perms::{harmonic_traces, Permutation, TransformationSet};
use crate::rng::{self, domain};

/// Tail policy for `ν_d(ℓ)` recorded with every table.
pub const HORIZON_POLICY: &str =
    "sup over k in [l, kmax], floored at the identity weight (1/|G| for uniform groups)";

const MC_CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEntry {
    pub k: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTable {
    pub d: usize,
    pub set_descriptor: String,
    pub set_size: usize,
    pub is_group: bool,
    /// Weight of the identity, the limit of `γ_d(k)` as `k → ∞`.
    pub floor: f64,
    pub kmax: usize,
    pub exact: Option<Vec<f64>>,
    /// Exact values as `p/q` strings (uniform weights only).
    pub exact_rational: Option<Vec<String>>,
    /// `N̄(d,k) = γ_d(k) N(d,k)` (groups only).
    pub invariant_dims: Option<Vec<u128>>,
    pub mc: Option<Vec<McEntry>>,
    pub horizon_policy: String,
}

impl GammaTable {
    /// Table header for `set` with no values yet.
    pub fn new(set: &TransformationSet, kmax: usize) -> Self {
        Self {
            d: set.d(),
            set_descriptor: set.label().to_string(),
            set_size: set.len(),
            is_group: set.is_group(),
            floor: set.identity_weight(),
            kmax,
            exact: None,
            exact_rational: None,
            invariant_dims: None,
            mc: None,
            horizon_policy: HORIZON_POLICY.to_string(),
        }
    }

    /// `γ_d(k)` for `k = 0..=kmax`: exact values when present, otherwise Monte Carlo
    /// estimates covering every degree.
    pub fn values(&self) -> Result<Vec<f64>, SpectraError> {
        if let Some(e) = &self.exact {
            return Ok(e.clone());
        }
        if let Some(mc) = &self.mc {
            let mut v = vec![f64::NAN; self.kmax + 1];
            for e in mc {
                if e.k <= self.kmax {
                    v[e.k] = e.estimate;
                }
            }
            if v.iter().all(|x| x.is_finite()) {
                return Ok(v);
            }
        }
        Err(SpectraError::InvalidArgument("table has no values for every degree".into()))
    }

    pub fn attach_mc(&mut self, entries: Vec<McEntry>) {
        self.mc = Some(entries);
    }

    /// Columns `k, exact, mc, stderr`; absent values are empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SpectraError> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "exact", "mc", "stderr"])?;
        for k in 0..=self.kmax {
            let exact = self.exact.as_ref().map(|e| format!("{:.17e}", e[k])).unwrap_or_default();
            let mc = self.mc.as_ref().and_then(|m| m.iter().find(|e| e.k == k));
            wr.write_record([
                k.to_string(),
                exact,
                mc.map(|e| format!("{:.17e}", e.estimate)).unwrap_or_default(),
                mc.map(|e| format!("{:.17e}", e.stderr)).unwrap_or_default(),
            ])?;
        }
        wr.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Exact `γ_d(k)` for `k = 0..=kmax`, grouped by cycle type. For groups, also the
/// invariant dimensions `N̄(d,k)`, which must come out integral.
pub fn gamma_exact(set: &TransformationSet, kmax: usize) -> Result<GammaTable, SpectraError> {
    let d = set.d();
    if d < 3 {
        return Err(SpectraError::InvalidArgument(format!("need d >= 3, got {d}")));
    }
    let classes = set.cycle_classes();
    let traces: Vec<Vec<BigInt>> =
        classes.par_iter().map(|c| harmonic_traces(&c.cycle_lengths, kmax)).collect();
    let dims: Vec<BigInt> = (0..=kmax).map(|k| BigInt::from(dim_harmonic(d, k))).collect();

    let mut table = GammaTable::new(set, kmax);
    if set.is_uniform() {
        let order = BigInt::from(set.len());
        let mut rational = Vec::with_capacity(kmax + 1);
        let mut inv_dims = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let total: BigInt = classes
                .iter()
                .zip(&traces)
                .map(|(c, t)| BigInt::from(c.count) * &t[k])
                .sum();
            let gamma = BigRational::new(total.clone(), &order * &dims[k]);
            if set.is_group() {
                let (q, rem) = total.div_rem(&order);
                if !rem.is_zero() || q < BigInt::zero() {
                    return Err(SpectraError::InvalidArgument(format!(
                        "invariant dimension at k={k} is not a nonnegative integer"
                    )));
                }
                inv_dims.push(q.to_u128().ok_or_else(|| {
                    SpectraError::InvalidArgument(format!("invariant dimension at k={k} exceeds u128"))
                })?);
            }
            rational.push(gamma);
        }
        table.exact = Some(rational.iter().map(|g| g.to_f64().unwrap_or(f64::NAN)).collect());
        table.exact_rational = Some(rational.iter().map(|g| g.to_string()).collect());
        if set.is_group() {
            table.invariant_dims = Some(inv_dims);
        }
    } else {
        let mut vals = vec![0.0; kmax + 1];
        for (c, t) in classes.iter().zip(&traces) {
            for (k, v) in vals.iter_mut().enumerate() {
                let r = BigRational::new(t[k].clone(), dims[k].clone()).to_f64().unwrap_or(f64::NAN);
                *v += c.weight * r;
            }
        }
        table.exact = Some(vals);
    }
    Ok(table)
}

/// Monte Carlo estimates of `γ_d(k)` for every `k = 0..=kmax` from the same
/// `n_samples` uniform points. Sample `i` uses its own random stream, and partial
/// sums are reduced in a fixed order, so results do not depend on the thread count.
pub fn gamma_mc_all(
    set: &TransformationSet,
    kmax: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<McEntry>, SpectraError> {
    let d = set.d();
    if d < 3 {
        return Err(SpectraError::InvalidArgument(format!("need d >= 3, got {d}")));
    }
    if n_samples < 100 {
        return Err(SpectraError::InvalidArgument(format!("need at least 100 samples, got {n_samples}")));
    }
    let elems: Vec<(&Permutation, f64, bool)> =
        set.iter().map(|(p, w)| (p, w, p.is_identity())).collect();
    let width = kmax + 1;
    let n_chunks = n_samples.div_ceil(MC_CHUNK);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![0.0; width];
            let mut sumsq = vec![0.0; width];
            let mut acc = vec![0.0; width];
            let mut p = vec![0.0; width];
            for i in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(n_samples) {
                let mut r = rng::stream(seed, domain::MONTE_CARLO, i as u64);
                let x = rng::unit_vector(&mut r, d);
                acc.iter_mut().for_each(|a| *a = 0.0);
                for &(sigma, w, is_id) in &elems {
                    let t = if is_id { 1.0 } else { sigma.action_dot(&x, &x).clamp(-1.0, 1.0) };
                    fill_batch(d, t, &mut p);
                    for (a, v) in acc.iter_mut().zip(&p) {
                        *a += w * v;
                    }
                }
                for k in 0..width {
                    sum[k] += acc[k];
                    sumsq[k] += acc[k] * acc[k];
                }
            }
            (sum, sumsq)
        })
        .collect();
    let mut sum = vec![0.0; width];
    let mut sumsq = vec![0.0; width];
    for (s, q) in &partials {
        for k in 0..width {
            sum[k] += s[k];
            sumsq[k] += q[k];
        }
    }
    let n = n_samples as f64;
    Ok((0..width)
        .map(|k| {
            if k == 0 {
                return McEntry { k, estimate: 1.0, stderr: 0.0, n_samples, seed };
            }
            let mean = sum[k] / n;
            let var = ((sumsq[k] - n * mean * mean) / (n - 1.0)).max(0.0);
            McEntry { k, estimate: mean, stderr: (var / n).sqrt(), n_samples, seed }
        })
        .collect())
}

/// Monte Carlo estimate of `γ_d(k)` with its standard error.
pub fn gamma_mc(
    set: &TransformationSet,
    k: usize,
    n_samples: usize,
    seed: u64,
) -> Result<McEntry, SpectraError> {
    Ok(gamma_mc_all(set, k, n_samples, seed)?.pop().expect("nonempty"))
}
