//! Dot-product kernel profiles `κ(u)` on `[-1, 1]`, normalized to `κ(1) = 1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::legendre::eval_unchecked;
use super::HarmonicsError;

/// `κ(u)` for the supported kinds. Config strings: `arccos1`, `relu-composite`,
/// `gauss:s=2.0`, `monomial:p=3`, `legendre:d=5,k=2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelFunction {
    /// Arc-cosine kernel of degree 1: `(√(1-u²) + u(π - arccos u)) / π`.
    ArcCosine1,
    /// `(u + 1) κ₁(u) / 2`, the two-layer ReLU kernel divided by its value at 1.
    ReluComposite,
    /// `exp((u - 1) / s²)`, i.e. a Gaussian kernel of bandwidth `s` restricted to the sphere.
    SphereGaussian { s: f64 },
    /// `u^p`.
    Monomial { p: u32 },
    /// `P_{d,k}(u)`; a single-frequency kernel in dimension `d`.
    LegendreSingle { d: usize, k: usize },
}

/// Arc-cosine kernel of degree 1 at a clamped argument.
#[inline]
pub fn arccos1(u: f64) -> f64 {
    let u = u.clamp(-1.0, 1.0);
    ((1.0 - u * u).sqrt() + u * (PI - u.acos())) / PI
}

impl KernelFunction {
    /// Evaluates `κ(u)`; the argument is clamped to `[-1, 1]`.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(-1.0, 1.0);
        match *self {
            KernelFunction::ArcCosine1 => arccos1(u),
            KernelFunction::ReluComposite => 0.5 * (u + 1.0) * arccos1(u),
            KernelFunction::SphereGaussian { s } => ((u - 1.0) / (s * s)).exp(),
            KernelFunction::Monomial { p } => u.powi(p as i32),
            KernelFunction::LegendreSingle { d, k } => eval_unchecked(d, k, u),
        }
    }

    /// `κ` evaluated at `cos θ` with `sin θ` supplied, avoiding the
    /// cancellation in `√(1-u²)` near the poles.
    #[inline]
    pub(crate) fn eval_angle(&self, cos_t: f64, sin_t: f64, theta: f64) -> f64 {
        match *self {
            KernelFunction::ArcCosine1 => (sin_t + cos_t * (PI - theta)) / PI,
            KernelFunction::ReluComposite => {
                0.5 * (cos_t + 1.0) * (sin_t + cos_t * (PI - theta)) / PI
            }
            _ => self.eval(cos_t),
        }
    }

    /// All supported kinds are positive definite on every sphere
    /// (the Legendre kind only on the sphere of its own dimension).
    pub fn is_positive_definite(&self) -> bool {
        true
    }

    pub fn validate_for_dimension(&self, d: usize) -> Result<(), HarmonicsError> {
        match *self {
            KernelFunction::LegendreSingle { d: kd, .. } if kd != d => Err(
                HarmonicsError::Kernel(format!("legendre kernel built for d={kd}, used with d={d}")),
            ),
            KernelFunction::LegendreSingle { d: kd, .. } if kd < 3 => {
                Err(HarmonicsError::Dimension(kd))
            }
            KernelFunction::SphereGaussian { s } if !(s > 0.0) => {
                Err(HarmonicsError::Kernel(format!("gaussian bandwidth must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for KernelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFunction::ArcCosine1 => write!(f, "arccos1"),
            KernelFunction::ReluComposite => write!(f, "relu-composite"),
            KernelFunction::SphereGaussian { s } => write!(f, "gauss:s={s}"),
            KernelFunction::Monomial { p } => write!(f, "monomial:p={p}"),
            KernelFunction::LegendreSingle { d, k } => write!(f, "legendre:d={d},k={k}"),
        }
    }
}

/// Splits `name:key=value,key=value` into the name and its parameters.
pub(crate) fn parse_descriptor(s: &str) -> Result<(String, Vec<(String, String)>), String> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n.trim(), r.trim()),
        None => (s, ""),
    };
    if name.is_empty() {
        return Err(format!("empty descriptor '{s}'"));
    }
    let mut params = Vec::new();
    for kv in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in '{kv}'"))?;
        params.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok((name.to_ascii_lowercase(), params))
}

pub(crate) fn param<T: FromStr>(
    params: &[(String, String)],
    key: &str,
    default: Option<T>,
) -> Result<T, String> {
    match params.iter().find(|(k, _)| k == key) {
        Some((_, v)) => v.parse().map_err(|_| format!("bad value '{v}' for '{key}'")),
        None => default.ok_or_else(|| format!("missing parameter '{key}'")),
    }
}

impl FromStr for KernelFunction {
    type Err = HarmonicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = parse_descriptor(s).map_err(HarmonicsError::Kernel)?;
        let k = match name.as_str() {
            "arccos1" | "arc-cosine-1" | "arccos" => KernelFunction::ArcCosine1,
            "relu-composite" | "relu" => KernelFunction::ReluComposite,
            "gauss" | "sphere-gaussian" => KernelFunction::SphereGaussian {
                s: param(&params, "s", Some(1.0)).map_err(HarmonicsError::Kernel)?,
            },
            "monomial" => KernelFunction::Monomial {
                p: param(&params, "p", Some(1)).map_err(HarmonicsError::Kernel)?,
            },
            "legendre" | "legendre-single" => KernelFunction::LegendreSingle {
                d: param(&params, "d", None).map_err(HarmonicsError::Kernel)?,
                k: param(&params, "k", None).map_err(HarmonicsError::Kernel)?,
            },
            other => return Err(HarmonicsError::Kernel(format!("unknown kernel '{other}'"))),
        };
        if let KernelFunction::LegendreSingle { d, .. } = k {
            k.validate_for_dimension(d)?;
        }
        if let KernelFunction::SphereGaussian { .. } = k {
            k.validate_for_dimension(3)?;
        }
        Ok(k)
    }
}
