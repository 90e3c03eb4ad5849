use faer::prelude::*;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::gram::{gram_assemble, gram_self, GramBudget, GramMatrix, KernelSpec, KernelSpecMeta};
use super::KrrError;

/// Multiples of `trace/n` added to the diagonal when a factorization fails.
pub const JITTER_LADDER: [f64; 3] = [0.0, 1e-10, 1e-8];

/// `n_points` logarithmically spaced values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n_points: usize) -> Vec<f64> {
    match n_points {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n_points)
                .map(|i| (a + (b - a) * i as f64 / (n_points - 1) as f64).exp())
                .collect()
        }
    }
}

/// Twelve points from `1e-8` to `1`.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-8, 1.0, 12)
}

/// Dual solution of `(K + nλI)α = y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// Diagonal jitter that was needed beyond `nλ`.
    pub jitter: f64,
    /// `‖(K + nλI)α − y‖ / ‖y‖` (0 when `y = 0`).
    pub relative_residual: f64,
}

fn matvec(a: &GramMatrix, x: &[f64]) -> Vec<f64> {
    (0..a.rows).map(|i| a.row(i).iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

/// Solves `(K + nλI)α = y` by Cholesky with the jitter ladder and one step of
/// iterative refinement.
pub fn solve_dual(gram: &GramMatrix, y: &[f64], lambda: f64) -> Result<DualSolution, KrrError> {
    let n = gram.rows;
    if !gram.is_square() {
        return Err(KrrError::InvalidArgument("training Gram must be square".into()));
    }
    if y.len() != n {
        return Err(KrrError::DimensionMismatch { expected: n, got: y.len() });
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(KrrError::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    if n == 0 {
        return Ok(DualSolution { alpha: vec![], jitter: 0.0, relative_residual: 0.0 });
    }
    let ridge = n as f64 * lambda;
    let scale = gram.trace() / n as f64;
    for step in JITTER_LADDER {
        let jitter = step * scale;
        let mut a = gram.to_faer();
        for i in 0..n {
            a[(i, i)] += ridge + jitter;
        }
        let Ok(llt) = a.llt(Side::Lower) else { continue };
        let solve = |rhs: &[f64]| -> Vec<f64> {
            let mut b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
            llt.solve_in_place(b.as_mut());
            (0..n).map(|i| b[(i, 0)]).collect()
        };
        let apply = |v: &[f64]| -> Vec<f64> {
            let mut out = matvec(gram, v);
            for (o, vi) in out.iter_mut().zip(v) {
                *o += (ridge + jitter) * vi;
            }
            out
        };
        let mut alpha = solve(y);
        let r: Vec<f64> = y.iter().zip(apply(&alpha)).map(|(a, b)| a - b).collect();
        let delta = solve(&r);
        alpha.iter_mut().zip(&delta).for_each(|(a, d)| *a += d);
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rnorm = y
            .iter()
            .zip(apply(&alpha))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let relative_residual = if ynorm > 0.0 { rnorm / ynorm } else { rnorm };
        return Ok(DualSolution { alpha, jitter, relative_residual });
    }
    Err(KrrError::Numerical(format!(
        "Cholesky failed after jitter ladder (n = {n}, n*lambda = {ridge:e}, trace/n = {scale:e}, condition estimate >= {:e})",
        scale / ridge
    )))
}

/// Fitted kernel ridge regressor.
#[derive(Debug, Clone)]
pub struct KrrModel {
    pub points: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub lambda: f64,
    pub spec: KernelSpec,
    pub jitter: f64,
    pub relative_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrrModelFile {
    pub points: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub lambda: f64,
    pub kernel: KernelSpecMeta,
    pub jitter: f64,
}

/// Minimizer of `(1/n) Σ (f(x_i) − y_i)² + λ‖f‖²`.
pub fn krr_fit(
    x: &[Vec<f64>],
    y: &[f64],
    spec: &KernelSpec,
    lambda: f64,
    budget: &GramBudget,
) -> Result<KrrModel, KrrError> {
    let gram = gram_self(x, spec, budget)?;
    let sol = solve_dual(&gram, y, lambda)?;
    Ok(KrrModel {
        points: x.to_vec(),
        alpha: sol.alpha,
        lambda,
        spec: spec.clone(),
        jitter: sol.jitter,
        relative_residual: sol.relative_residual,
    })
}

impl KrrModel {
    pub fn predict(&self, x_test: &[Vec<f64>], budget: &GramBudget) -> Result<Vec<f64>, KrrError> {
        if x_test.is_empty() {
            return Ok(vec![]);
        }
        let cross = gram_assemble(x_test, &self.points, &self.spec, budget)?;
        Ok(predict_from_gram(&cross, &self.alpha))
    }

    pub fn to_file(&self) -> KrrModelFile {
        KrrModelFile {
            points: self.points.clone(),
            alpha: self.alpha.clone(),
            lambda: self.lambda,
            kernel: self.spec.meta(),
            jitter: self.jitter,
        }
    }

    pub fn from_file(f: &KrrModelFile) -> Result<Self, KrrError> {
        if f.points.len() != f.alpha.len() {
            return Err(KrrError::DimensionMismatch { expected: f.points.len(), got: f.alpha.len() });
        }
        Ok(Self {
            points: f.points.clone(),
            alpha: f.alpha.clone(),
            lambda: f.lambda,
            spec: KernelSpec::from_meta(&f.kernel)?,
            jitter: f.jitter,
            relative_residual: f64::NAN,
        })
    }
}

/// `f̂(x_t) = Σ_i α_i K(x_i, x_t)` from a test × train Gram.
pub fn predict_from_gram(cross: &GramMatrix, alpha: &[f64]) -> Vec<f64> {
    matvec(cross, alpha)
}

pub fn mean_squared_error(pred: &[f64], y: &[f64]) -> f64 {
    if pred.is_empty() {
        return 0.0;
    }
    pred.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / pred.len() as f64
}

pub fn mse_risk(model: &KrrModel, x_test: &[Vec<f64>], y_test: &[f64], budget: &GramBudget) -> Result<f64, KrrError> {
    if x_test.len() != y_test.len() {
        return Err(KrrError::DimensionMismatch { expected: x_test.len(), got: y_test.len() });
    }
    Ok(mean_squared_error(&model.predict(x_test, budget)?, y_test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub best_lambda: f64,
    pub best_risk: f64,
    /// `(λ, test risk)` in increasing `λ`.
    pub curve: Vec<(f64, f64)>,
}

/// Test risk for every `λ` from precomputed Grams; ties go to the larger `λ`.
pub fn lambda_sweep_gram(
    train: &GramMatrix,
    y_train: &[f64],
    cross: &GramMatrix,
    y_test: &[f64],
    grid: &[f64],
) -> Result<SweepResult, KrrError> {
    if grid.is_empty() {
        return Err(KrrError::InvalidArgument("empty lambda grid".into()));
    }
    if cross.cols != train.rows || cross.rows != y_test.len() {
        return Err(KrrError::DimensionMismatch { expected: train.rows, got: cross.cols });
    }
    let mut lambdas = grid.to_vec();
    lambdas.sort_by(f64::total_cmp);
    let mut curve = Vec::with_capacity(lambdas.len());
    let mut best = (f64::NAN, f64::INFINITY);
    for &lambda in &lambdas {
        let sol = solve_dual(train, y_train, lambda)?;
        let risk = mean_squared_error(&predict_from_gram(cross, &sol.alpha), y_test);
        curve.push((lambda, risk));
        if risk <= best.1 {
            best = (lambda, risk);
        }
    }
    if !best.0.is_finite() {
        return Err(KrrError::Numerical("no finite risk on the lambda grid".into()));
    }
    Ok(SweepResult { best_lambda: best.0, best_risk: best.1, curve })
}

/// Fits on `train`, evaluates on `test` for each `λ` of the grid.
pub fn lambda_sweep(
    x_train: &[Vec<f64>],
    y_train: &[f64],
    x_test: &[Vec<f64>],
    y_test: &[f64],
    spec: &KernelSpec,
    grid: &[f64],
    budget: &GramBudget,
) -> Result<SweepResult, KrrError> {
    let train = gram_self(x_train, spec, budget)?;
    let cross = gram_assemble(x_test, x_train, spec, budget)?;
    lambda_sweep_gram(&train, y_train, &cross, y_test, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::sample_sphere;
    use crate::harmonics::KernelFunction;

    fn spec() -> KernelSpec {
        KernelSpec::plain(KernelFunction::ArcCosine1)
    }

    #[test]
    fn grids() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 12);
        assert!((g[0] - 1e-8).abs() < 1e-20 && (g[11] - 1.0).abs() < 1e-14);
        assert_eq!(log_grid(0.5, 2.0, 1), vec![0.5]);
    }

    #[test]
    fn zero_labels_and_scalar_case() {
        let x = sample_sphere(15, 4, 1).unwrap();
        let m = krr_fit(&x, &vec![0.0; 15], &spec(), 1e-3, &GramBudget::default()).unwrap();
        assert!(m.alpha.iter().all(|&a| a == 0.0));

        let one = sample_sphere(1, 4, 2).unwrap();
        let lambda = 0.37;
        let m = krr_fit(&one, &[2.0], &spec(), lambda, &GramBudget::default()).unwrap();
        assert!((m.alpha[0] - 2.0 / (1.0 + lambda)).abs() < 1e-14);
    }

    #[test]
    fn residual_and_shrinkage() {
        let x = sample_sphere(200, 5, 3).unwrap();
        let y: Vec<f64> = x.iter().map(|p| p[0].signum()).collect();
        let m = krr_fit(&x, &y, &spec(), 1e-6, &GramBudget::default()).unwrap();
        assert!(m.relative_residual <= 1e-8);
        let big = krr_fit(&x, &y, &spec(), 1e9, &GramBudget::default()).unwrap();
        let t = sample_sphere(50, 5, 4).unwrap();
        assert!(big.predict(&t, &GramBudget::default()).unwrap().iter().all(|p| p.abs() < 1e-8));
        assert!(m.predict(&[], &GramBudget::default()).unwrap().is_empty());
    }

    #[test]
    fn interpolation_limit() {
        let x = sample_sphere(40, 6, 5).unwrap();
        let y: Vec<f64> = x.iter().map(|p| p[1] * p[2] + p[0]).collect();
        let m = krr_fit(&x, &y, &spec(), 1e-10, &GramBudget::default()).unwrap();
        let pred = m.predict(&x, &GramBudget::default()).unwrap();
        for (p, t) in pred.iter().zip(&y) {
            assert!((p - t).abs() < 1e-3);
        }
    }

    #[test]
    fn sweep() {
        let x = sample_sphere(80, 4, 6).unwrap();
        let t = sample_sphere(60, 4, 7).unwrap();
        let f = |p: &Vec<f64>| (p[0] >= 0.3) as u8 as f64;
        let (y, yt): (Vec<f64>, Vec<f64>) = (x.iter().map(f).collect(), t.iter().map(f).collect());
        let grid = default_lambda_grid();
        let s = lambda_sweep(&x, &y, &t, &yt, &spec(), &grid, &GramBudget::default()).unwrap();
        assert!(s.curve.iter().all(|(_, r)| r.is_finite() && s.best_risk <= *r));
        let single = lambda_sweep(&x, &y, &t, &yt, &spec(), &[0.01], &GramBudget::default()).unwrap();
        assert_eq!(single.best_lambda, 0.01);
        // identical risks resolve to the larger lambda
        let zero = vec![0.0; 60];
        let s0 = lambda_sweep(&x, &vec![0.0; 80], &t, &zero, &spec(), &[1e-3, 1e-1], &GramBudget::default()).unwrap();
        assert_eq!(s0.best_lambda, 1e-1);
    }

    #[test]
    fn model_json() {
        let x = sample_sphere(10, 3, 8).unwrap();
        let y: Vec<f64> = x.iter().map(|p| p[2]).collect();
        let m = krr_fit(&x, &y, &spec(), 1e-2, &GramBudget::default()).unwrap();
        let json = serde_json::to_string(&m.to_file()).unwrap();
        let back = KrrModel::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        let t = sample_sphere(5, 3, 9).unwrap();
        assert_eq!(back.predict(&t, &GramBudget::default()).unwrap(), m.predict(&t, &GramBudget::default()).unwrap());
    }
}
