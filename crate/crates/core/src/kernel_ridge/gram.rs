use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::KrrError;
use crate::harmonics::KernelFunction;
use crate::perms::{Permutation, TransformationSet};

/// Kernel evaluations above which assembly logs a warning.
pub const WARN_EVALUATIONS: u64 = 1_000_000_000;

const GRAM_MAGIC: &[u8; 8] = b"SPHGRAM1";

/// `κ` together with an optional averaging set: `K(x, x') = Σ_σ h(σ) κ(⟨σ·x, x'⟩)`.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub kernel: KernelFunction,
    pub set: Option<Arc<TransformationSet>>,
}

/// Serializable form of a [`KernelSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpecMeta {
    pub kernel: KernelFunction,
    pub set: Option<String>,
    pub set_size: usize,
    pub weights_uniform: bool,
}

impl KernelSpec {
    pub fn plain(kernel: KernelFunction) -> Self {
        Self { kernel, set: None }
    }

    pub fn averaged(kernel: KernelFunction, set: Arc<TransformationSet>) -> Self {
        Self { kernel, set: Some(set) }
    }

    pub fn terms(&self) -> usize {
        self.set.as_ref().map_or(1, |s| s.len())
    }

    pub fn meta(&self) -> KernelSpecMeta {
        KernelSpecMeta {
            kernel: self.kernel.clone(),
            set: self.set.as_ref().map(|s| s.label().to_string()),
            set_size: self.terms(),
            weights_uniform: self.set.as_ref().is_none_or(|s| s.is_uniform()),
        }
    }

    pub fn from_meta(meta: &KernelSpecMeta) -> Result<Self, KrrError> {
        match &meta.set {
            None => Ok(Self::plain(meta.kernel.clone())),
            Some(desc) => {
                let set = TransformationSet::from_descriptor(desc).map_err(|e| KrrError::InvalidArgument(e.to_string()))?;
                Ok(Self::averaged(meta.kernel.clone(), Arc::new(set)))
            }
        }
    }

    pub fn descriptor(&self) -> String {
        match &self.set {
            None => self.kernel.to_string(),
            Some(s) => format!("{}|{}", self.kernel, s.label()),
        }
    }

    /// Single kernel evaluation.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.set {
            None => {
                let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                self.kernel.eval(t.clamp(-1.0, 1.0))
            }
            Some(set) => set
                .iter()
                .map(|(sigma, w)| w * self.kernel.eval(sigma.action_dot(x, y).clamp(-1.0, 1.0)))
                .sum(),
        }
    }
}

/// Evaluation cap for Gram assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramBudget {
    pub max_evaluations: Option<u64>,
}

impl Default for GramBudget {
    fn default() -> Self {
        Self { max_evaluations: None }
    }
}

/// Dense row-major matrix of kernel values.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl GramMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Leading `r × c` block.
    pub fn sub_block(&self, r: usize, c: usize) -> GramMatrix {
        let r = r.min(self.rows);
        let c = c.min(self.cols);
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            data.extend_from_slice(&self.row(i)[..c]);
        }
        GramMatrix { rows: r, cols: c, data }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits()))
    }

    pub(crate) fn to_faer(&self) -> faer::Mat<f64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// Eigenvalues of a symmetric Gram matrix, ascending.
    pub fn symmetric_eigenvalues(&self) -> Result<Vec<f64>, KrrError> {
        if !self.is_square() {
            return Err(KrrError::InvalidArgument("eigenvalues need a square matrix".into()));
        }
        let mut ev = self
            .to_faer()
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| KrrError::Numerical(format!("eigenvalue solver: {e:?}")))?;
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// Layout: magic `SPHGRAM1`, `rows`, `cols`, `d` as little-endian `u64`, a
    /// `u32` length-prefixed UTF-8 kernel descriptor, then row-major `f64` values.
    pub fn write_binary<W: Write>(&self, mut w: W, d: usize, descriptor: &str) -> std::io::Result<()> {
        w.write_all(GRAM_MAGIC)?;
        for v in [self.rows as u64, self.cols as u64, d as u64] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(descriptor.len() as u32).to_le_bytes())?;
        w.write_all(descriptor.as_bytes())?;
        let mut buf = Vec::with_capacity(self.data.len() * 8);
        for v in &self.data {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)
    }

    /// Inverse of [`write_binary`](Self::write_binary): `(matrix, d, descriptor)`.
    pub fn read_binary<R: Read>(mut r: R) -> Result<(GramMatrix, usize, String), KrrError> {
        let bad = |m: &str| KrrError::InvalidArgument(format!("gram dump: {m}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != GRAM_MAGIC {
            return Err(bad("bad magic"));
        }
        let mut u = [0u8; 8];
        let mut next = |r: &mut R| -> std::io::Result<u64> {
            r.read_exact(&mut u)?;
            Ok(u64::from_le_bytes(u))
        };
        let rows = next(&mut r)? as usize;
        let cols = next(&mut r)? as usize;
        let d = next(&mut r)? as usize;
        let mut l = [0u8; 4];
        r.read_exact(&mut l)?;
        let mut desc = vec![0u8; u32::from_le_bytes(l) as usize];
        r.read_exact(&mut desc)?;
        let desc = String::from_utf8(desc).map_err(|_| bad("descriptor is not UTF-8"))?;
        let mut raw = vec![0u8; rows.checked_mul(cols).and_then(|v| v.checked_mul(8)).ok_or_else(|| bad("size overflow"))?];
        r.read_exact(&mut raw)?;
        let data = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok((GramMatrix { rows, cols, data }, d, desc))
    }
}

fn check_points(x: &[Vec<f64>], d: usize) -> Result<(), KrrError> {
    for p in x {
        if p.len() != d {
            return Err(KrrError::DimensionMismatch { expected: d, got: p.len() });
        }
        let n2: f64 = p.iter().map(|v| v * v).sum();
        if (n2 - 1.0).abs() > 1e-10 {
            return Err(KrrError::InvalidArgument(format!("point with squared norm {n2} is not on the sphere")));
        }
    }
    Ok(())
}

fn check_budget(evals: u64, budget: &GramBudget) -> Result<(), KrrError> {
    if let Some(cap) = budget.max_evaluations {
        if evals > cap {
            return Err(KrrError::BudgetExceeded { evaluations: evals, cap });
        }
    }
    if evals > WARN_EVALUATIONS {
        log::warn!("gram assembly needs {evals} kernel evaluations");
    }
    Ok(())
}

fn row_values(spec: &KernelSpec, elems: &[(&Permutation, f64)], xi: &[f64], ys: &[Vec<f64>], out: &mut [f64]) {
    match &spec.set {
        None => {
            for (o, y) in out.iter_mut().zip(ys) {
                let t: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
                *o = spec.kernel.eval(t.clamp(-1.0, 1.0));
            }
        }
        Some(_) => {
            for (o, y) in out.iter_mut().zip(ys) {
                let mut s = 0.0;
                for &(sigma, w) in elems {
                    s += w * spec.kernel.eval(sigma.action_dot(xi, y).clamp(-1.0, 1.0));
                }
                *o = s;
            }
        }
    }
}

/// Cross Gram `K[i][j] = K(x_i, x'_j)`.
pub fn gram_assemble(
    x: &[Vec<f64>],
    xp: &[Vec<f64>],
    spec: &KernelSpec,
    budget: &GramBudget,
) -> Result<GramMatrix, KrrError> {
    let d = x.first().or(xp.first()).map_or(0, Vec::len);
    check_points(x, d)?;
    check_points(xp, d)?;
    if let Some(s) = &spec.set {
        if s.d() != d && !(x.is_empty() && xp.is_empty()) {
            return Err(KrrError::DimensionMismatch { expected: s.d(), got: d });
        }
    }
    check_budget((x.len() as u64) * (xp.len() as u64) * spec.terms() as u64, budget)?;
    let elems: Vec<(&Permutation, f64)> = spec.set.as_ref().map(|s| s.iter().collect()).unwrap_or_default();
    let cols = xp.len();
    let mut data = vec![0.0; x.len() * cols];
    if cols > 0 {
        data.par_chunks_mut(cols)
            .zip(x.par_iter())
            .for_each(|(row, xi)| row_values(spec, &elems, xi, xp, row));
    }
    Ok(GramMatrix { rows: x.len(), cols, data })
}

/// Self Gram: the upper triangle is computed and mirrored, so the result is
/// bitwise symmetric.
pub fn gram_self(x: &[Vec<f64>], spec: &KernelSpec, budget: &GramBudget) -> Result<GramMatrix, KrrError> {
    let n = x.len();
    let d = x.first().map_or(0, Vec::len);
    check_points(x, d)?;
    if let Some(s) = &spec.set {
        if s.d() != d && n > 0 {
            return Err(KrrError::DimensionMismatch { expected: s.d(), got: d });
        }
    }
    check_budget((n as u64) * (n as u64 + 1) / 2 * spec.terms() as u64, budget)?;
    let elems: Vec<(&Permutation, f64)> = spec.set.as_ref().map(|s| s.iter().collect()).unwrap_or_default();
    let mut data = vec![0.0; n * n];
    if n > 0 {
        data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            row_values(spec, &elems, &x[i], &x[i..], &mut row[i..]);
        });
    }
    for i in 0..n {
        for j in 0..i {
            data[i * n + j] = data[j * n + i];
        }
    }
    Ok(GramMatrix { rows: n, cols: n, data })
}
