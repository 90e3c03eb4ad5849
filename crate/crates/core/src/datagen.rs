//! Uniform sphere samples, symmetrized targets and labelled datasets.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harmonics::legendre_eval;
use crate::perms::{PermError, TransformationSet};
use crate::rng::{self, domain};

/// Largest `|G|^r` averaged per target evaluation.
pub const MAX_SMOOTHING_TERMS: usize = 1_000_000;

pub const DEFAULT_THRESHOLD: f64 = 0.7;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Base function `g` before symmetrization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetBase {
    /// `1{⟨w, x⟩ ≥ threshold}`.
    Halfspace { threshold: f64 },
    /// `⟨w, x⟩`.
    Linear,
    /// `P_{d,k}(⟨w, x⟩)`.
    LegendreSingle { k: usize },
}

impl Default for TargetBase {
    fn default() -> Self {
        TargetBase::Halfspace { threshold: DEFAULT_THRESHOLD }
    }
}

/// `S_G^r g` for a base `g`, direction `w` and optional averaging set.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    pub base: TargetBase,
    pub direction: Vec<f64>,
    pub smoothing: Option<(Arc<TransformationSet>, usize)>,
}

/// Serializable description of a [`TargetSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetMeta {
    pub base: TargetBase,
    pub direction: Vec<f64>,
    pub smoothing_set: Option<String>,
    pub repetitions: usize,
}

/// First coordinate axis.
pub fn default_direction(d: usize) -> Vec<f64> {
    let mut w = vec![0.0; d];
    if d > 0 {
        w[0] = 1.0;
    }
    w
}

/// Uniform random unit direction from the direction stream of `seed`.
pub fn random_direction(d: usize, seed: u64) -> Vec<f64> {
    rng::unit_vector(&mut rng::stream(seed, domain::DIRECTION, 0), d)
}

impl TargetSpec {
    pub fn new(base: TargetBase, direction: Vec<f64>) -> Result<Self, DatagenError> {
        let norm: f64 = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        if direction.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(DatagenError::InvalidArgument("direction must be a unit vector".into()));
        }
        if let TargetBase::LegendreSingle { .. } = base {
            if direction.len() < 3 {
                return Err(DatagenError::InvalidArgument("legendre target needs d >= 3".into()));
            }
        }
        Ok(Self { base, direction, smoothing: None })
    }

    pub fn with_smoothing(mut self, set: Arc<TransformationSet>, repetitions: usize) -> Result<Self, DatagenError> {
        if set.d() != self.d() {
            return Err(DatagenError::InvalidArgument(format!(
                "smoothing set acts on d = {}, target has d = {}",
                set.d(),
                self.d()
            )));
        }
        if repetitions == 0 {
            return Err(DatagenError::InvalidArgument("repetitions must be at least 1".into()));
        }
        let terms = (0..repetitions).try_fold(1usize, |acc, _| acc.checked_mul(set.len()));
        if terms.is_none_or(|t| t > MAX_SMOOTHING_TERMS) {
            return Err(DatagenError::InvalidArgument(format!(
                "averaging over |G|^r = {}^{repetitions} terms per point exceeds {MAX_SMOOTHING_TERMS}",
                set.len()
            )));
        }
        self.smoothing = Some((set, repetitions));
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.direction.len()
    }

    pub fn meta(&self) -> TargetMeta {
        TargetMeta {
            base: self.base.clone(),
            direction: self.direction.clone(),
            smoothing_set: self.smoothing.as_ref().map(|(s, _)| s.label().to_string()),
            repetitions: self.smoothing.as_ref().map_or(0, |(_, r)| *r),
        }
    }

    /// Rebuilds a target from its metadata; the smoothing set must be a descriptor.
    pub fn from_meta(meta: &TargetMeta) -> Result<Self, DatagenError> {
        let spec = Self::new(meta.base.clone(), meta.direction.clone())?;
        match &meta.smoothing_set {
            Some(desc) => {
                let set = TransformationSet::from_descriptor(desc)?;
                spec.with_smoothing(Arc::new(set), meta.repetitions)
            }
            None => Ok(spec),
        }
    }

    fn eval_base(&self, x: &[f64]) -> f64 {
        let t: f64 = self.direction.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.base {
            TargetBase::Halfspace { threshold } => {
                if t >= threshold {
                    1.0
                } else {
                    0.0
                }
            }
            TargetBase::Linear => t,
            TargetBase::LegendreSingle { k } => {
                legendre_eval(self.d(), k, t.clamp(-1.0, 1.0)).expect("validated dimension")
            }
        }
    }

    fn eval_smoothed(&self, set: &TransformationSet, reps: usize, x: &[f64]) -> f64 {
        if reps == 0 {
            return self.eval_base(x);
        }
        let mut y = vec![0.0; x.len()];
        let mut terms: Vec<f64> = set
            .iter()
            .map(|(sigma, w)| {
                sigma.apply_into(x, &mut y);
                w * self.eval_smoothed(set, reps - 1, &y)
            })
            .collect();
        // summing in sorted order makes the result depend only on the multiset of terms
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    }

    /// `S_G^r g(x)`, or `g(x)` without smoothing.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.smoothing {
            Some((set, reps)) => self.eval_smoothed(set, *reps, x),
            None => self.eval_base(x),
        }
    }
}

/// Free-function form of [`TargetSpec::eval`].
pub fn eval_target(spec: &TargetSpec, x: &[f64]) -> f64 {
    spec.eval(x)
}

/// `n` uniform points on `S^{d-1}`; point `i` comes from its own stream.
pub fn sample_sphere(n: usize, d: usize, seed: u64) -> Result<Vec<Vec<f64>>, DatagenError> {
    sample_sphere_in(n, d, seed, domain::POINTS)
}

pub fn sample_sphere_in(n: usize, d: usize, seed: u64, dom: u64) -> Result<Vec<Vec<f64>>, DatagenError> {
    if d < 2 {
        return Err(DatagenError::InvalidArgument(format!("need d >= 2, got {d}")));
    }
    Ok((0..n)
        .into_par_iter()
        .map(|i| rng::unit_vector(&mut rng::stream(seed, dom, i as u64), d))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub point_domain: u64,
    pub noise_sigma: f64,
    pub target: TargetMeta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self) -> usize {
        self.meta.d
    }

    /// First `n` points and labels. Because every point has its own stream, this is
    /// the dataset that `n` would have produced directly.
    pub fn prefix(&self, n: usize) -> Dataset {
        let n = n.min(self.len());
        Dataset {
            points: self.points[..n].to_vec(),
            labels: self.labels[..n].to_vec(),
            meta: DatasetMeta { n, ..self.meta.clone() },
        }
    }

    /// Writes `d` coordinate columns plus `y`, and a JSON sidecar next to it.
    pub fn write(&self, csv_path: &Path) -> Result<(), DatagenError> {
        let mut wr = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = (0..self.d()).map(|j| format!("x{j}")).collect();
        header.push("y".into());
        wr.write_record(&header)?;
        for (x, y) in self.points.iter().zip(&self.labels) {
            let mut rec: Vec<String> = x.iter().map(|v| format!("{v:.17e}")).collect();
            rec.push(format!("{y:.17e}"));
            wr.write_record(&rec)?;
        }
        let bytes = wr.into_inner().map_err(|e| DatagenError::Io(e.into_error()))?;
        write_atomic(csv_path, &bytes)?;
        let sidecar = serde_json::to_vec_pretty(&self.meta)?;
        write_atomic(&csv_path.with_extension("json"), &sidecar)?;
        Ok(())
    }

    pub fn read(csv_path: &Path) -> Result<Dataset, DatagenError> {
        let meta: DatasetMeta = serde_json::from_slice(&fs::read(csv_path.with_extension("json"))?)?;
        let mut rd = csv::Reader::from_path(csv_path)?;
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| DatagenError::InvalidArgument(format!("bad number: {e}")))?;
            if vals.len() != meta.d + 1 {
                return Err(DatagenError::InvalidArgument(format!("expected {} columns", meta.d + 1)));
            }
            labels.push(vals[meta.d]);
            points.push(vals[..meta.d].to_vec());
        }
        Ok(Dataset { points, labels, meta })
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Labels `y_i = f*(x_i) + ε_i`, `ε_i ~ N(0, σ²)` from the noise stream of `seed`.
pub fn make_dataset(spec: &TargetSpec, n: usize, noise_sigma: f64, seed: u64) -> Result<Dataset, DatagenError> {
    make_dataset_in(spec, n, noise_sigma, seed, domain::POINTS)
}

/// [`make_dataset`] drawing points from stream domain `dom`, e.g. for test sets.
pub fn make_dataset_in(
    spec: &TargetSpec,
    n: usize,
    noise_sigma: f64,
    seed: u64,
    dom: u64,
) -> Result<Dataset, DatagenError> {
    if !(noise_sigma >= 0.0) {
        return Err(DatagenError::InvalidArgument(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let d = spec.d();
    let points = sample_sphere_in(n, d, seed, dom)?;
    let labels = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let f = spec.eval(x);
            if noise_sigma > 0.0 {
                f + noise_sigma * rng::standard_normal(&mut rng::stream(seed, domain::NOISE + 16 * dom, i as u64))
            } else {
                f
            }
        })
        .collect();
    Ok(Dataset {
        points,
        labels,
        meta: DatasetMeta { n, d, seed, point_domain: dom, noise_sigma, target: spec.meta() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::{gen_cyclic, gen_symmetric};

    fn halfspace(d: usize) -> TargetSpec {
        TargetSpec::new(TargetBase::default(), default_direction(d)).unwrap()
    }

    #[test]
    fn sampling() {
        let pts = sample_sphere(2000, 5, 11).unwrap();
        assert!(pts.iter().all(|x| (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12));
        let n = pts.len() as f64;
        for j in 0..5 {
            let mean: f64 = pts.iter().map(|x| x[j]).sum::<f64>() / n;
            assert!(mean.abs() < 4.0 / n.sqrt());
        }
        assert_eq!(sample_sphere(10, 5, 11).unwrap()[..], pts[..10]);
        assert!(sample_sphere(3, 1, 0).is_err());
    }

    #[test]
    fn halfspace_threshold() {
        let t = halfspace(3);
        assert_eq!(t.eval(&[0.8, 0.6, 0.0]), 1.0);
        assert_eq!(t.eval(&[0.6, 0.8, 0.0]), 0.0);
    }

    #[test]
    fn smoothing_properties() {
        let g = Arc::new(gen_symmetric(4).unwrap());
        let constant = TargetSpec::new(TargetBase::Halfspace { threshold: -2.0 }, default_direction(4))
            .unwrap()
            .with_smoothing(g.clone(), 1)
            .unwrap();
        assert!((constant.eval(&[0.5, 0.5, 0.5, 0.5]) - 1.0).abs() < 1e-15);

        let once = halfspace(4).with_smoothing(g.clone(), 1).unwrap();
        let twice = halfspace(4).with_smoothing(g.clone(), 2).unwrap();
        for x in sample_sphere(50, 4, 3).unwrap() {
            let v = once.eval(&x);
            assert!((v - twice.eval(&x)).abs() < 1e-12);
            for sigma in g.elements() {
                assert_eq!(once.eval(&sigma.apply(&x).unwrap()), v);
            }
        }
        let c = Arc::new(gen_cyclic(6).unwrap());
        assert!(halfspace(4).with_smoothing(c, 1).is_err());
    }

    #[test]
    fn datasets() {
        let t = halfspace(4);
        let a = make_dataset(&t, 100, 0.0, 5).unwrap();
        let b = make_dataset(&t, 100, 0.0, 5).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.points.iter().zip(&a.labels) {
            assert_eq!(*y, t.eval(x));
        }
        let noisy = make_dataset(&t, 100, 0.5, 5).unwrap();
        assert_eq!(noisy.points, a.points);
        assert_ne!(noisy.labels, a.labels);
        assert_eq!(make_dataset(&t, 40, 0.5, 5).unwrap(), noisy.prefix(40));
        let test = make_dataset_in(&t, 100, 0.0, 5, domain::TEST_POINTS).unwrap();
        assert_ne!(test.points, a.points);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.csv");
        let g = Arc::new(gen_cyclic(3).unwrap().with_label("cyclic:d=3"));
        let t = TargetSpec::new(TargetBase::Linear, default_direction(3)).unwrap().with_smoothing(g, 1).unwrap();
        let ds = make_dataset(&t, 20, 0.1, 1).unwrap();
        ds.write(&path).unwrap();
        let back = Dataset::read(&path).unwrap();
        assert_eq!(back, ds);
        let rebuilt = TargetSpec::from_meta(&back.meta.target).unwrap();
        assert_eq!(rebuilt.eval(&ds.points[0]), t.eval(&ds.points[0]));
    }
}
