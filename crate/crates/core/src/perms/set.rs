//! Weighted transformation sets and their text format.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{PermError, Permutation};
use crate::harmonics::{param, parse_descriptor};

const WEIGHT_TOL: f64 = 1e-12;
const GROUP_CHECK_MAX: usize = 10_000;

/// `true` iff every element's inverse is present with the same weight.
pub fn check_inverse_closed(elements: &[Permutation], weights: &[f64]) -> bool {
    let index: HashMap<&Permutation, f64> = elements.iter().zip(weights.iter().copied()).collect();
    elements.iter().zip(weights).all(|(s, &h)| {
        index
            .get(&s.inverse())
            .is_some_and(|&hi| (hi - h).abs() <= WEIGHT_TOL * h.abs().max(1.0))
    })
}

/// Permutations sharing a cycle type, with their total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleClass {
    pub cycle_lengths: Vec<usize>,
    pub count: usize,
    pub weight: f64,
}

/// Parsed set descriptor such as `cyclic:d=8` or `phi:d=12,eps=2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SetDescriptor {
    Trivial { d: usize },
    Transposition { d: usize },
    Cyclic { d: usize },
    BlockCyclic { s: usize, r: usize },
    Symmetric { d: usize },
    Deformation { d: usize, eps: usize },
}

impl SetDescriptor {
    pub fn d(&self) -> usize {
        match *self {
            SetDescriptor::Trivial { d }
            | SetDescriptor::Transposition { d }
            | SetDescriptor::Cyclic { d }
            | SetDescriptor::Symmetric { d }
            | SetDescriptor::Deformation { d, .. } => d,
            SetDescriptor::BlockCyclic { s, r } => s * r,
        }
    }

    pub fn build(&self) -> Result<TransformationSet, PermError> {
        use super::generators::*;
        match *self {
            SetDescriptor::Trivial { d } => gen_trivial(d),
            SetDescriptor::Transposition { d } => gen_transposition(d),
            SetDescriptor::Cyclic { d } => gen_cyclic(d),
            SetDescriptor::BlockCyclic { s, r } => gen_block_cyclic(s, r),
            SetDescriptor::Symmetric { d } => gen_symmetric(d),
            SetDescriptor::Deformation { d, eps } => gen_deformation(d, eps),
        }
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescriptor::Trivial { d } => write!(f, "trivial:d={d}"),
            SetDescriptor::Transposition { d } => write!(f, "transposition:d={d}"),
            SetDescriptor::Cyclic { d } => write!(f, "cyclic:d={d}"),
            SetDescriptor::BlockCyclic { s, r } => write!(f, "blockcyclic:s={s},r={r}"),
            SetDescriptor::Symmetric { d } => write!(f, "symmetric:d={d}"),
            SetDescriptor::Deformation { d, eps } => write!(f, "phi:d={d},eps={eps}"),
        }
    }
}

impl FromStr for SetDescriptor {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = parse_descriptor(s).map_err(PermError::Parse)?;
        let need = |key: &str| -> Result<usize, PermError> {
            param::<usize>(&params, key, None).map_err(PermError::Parse)
        };
        let known: &[&str] = match name.as_str() {
            "blockcyclic" => &["s", "r"],
            "phi" => &["d", "eps"],
            _ => &["d"],
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !known.contains(&k.as_str())) {
            return Err(PermError::Parse(format!("unknown parameter '{k}' for '{name}'")));
        }
        let desc = match name.as_str() {
            "trivial" | "identity" => SetDescriptor::Trivial { d: need("d")? },
            "transposition" => SetDescriptor::Transposition { d: need("d")? },
            "cyclic" => SetDescriptor::Cyclic { d: need("d")? },
            "blockcyclic" => SetDescriptor::BlockCyclic { s: need("s")?, r: need("r")? },
            "symmetric" => SetDescriptor::Symmetric { d: need("d")? },
            "phi" => SetDescriptor::Deformation { d: need("d")?, eps: need("eps")? },
            other => return Err(PermError::Parse(format!("unknown set '{other}'"))),
        };
        Ok(desc)
    }
}

impl TryFrom<String> for SetDescriptor {
    type Error = PermError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SetDescriptor> for String {
    fn from(d: SetDescriptor) -> Self {
        d.to_string()
    }
}

/// A finite, inversion-closed set of permutations with a probability weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationSet {
    d: usize,
    elements: Vec<Permutation>,
    weights: Vec<f64>,
    is_group: bool,
    label: String,
}

impl TransformationSet {
    /// Validates dimensions, weights, inversion closure and, for groups with at most
    /// 10⁴ elements, the group axioms.
    pub fn new(
        d: usize,
        elements: Vec<Permutation>,
        weights: Vec<f64>,
        is_group: bool,
    ) -> Result<Self, PermError> {
        if elements.is_empty() {
            return Err(PermError::InvalidSet("empty set".into()));
        }
        if weights.len() != elements.len() {
            return Err(PermError::InvalidSet(format!(
                "{} weights for {} elements",
                weights.len(),
                elements.len()
            )));
        }
        if let Some(p) = elements.iter().find(|p| p.d() != d) {
            return Err(PermError::DimensionMismatch { expected: d, got: p.d() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(PermError::InvalidSet("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(PermError::InvalidSet(format!("weights sum to {total}, not 1")));
        }
        let unique: HashSet<&Permutation> = elements.iter().collect();
        if unique.len() != elements.len() {
            return Err(PermError::InvalidSet("duplicate elements".into()));
        }
        if !check_inverse_closed(&elements, &weights) {
            return Err(PermError::InvalidSet("not closed under inversion with matching weights".into()));
        }
        if is_group {
            if !elements.iter().any(Permutation::is_identity) {
                return Err(PermError::InvalidSet("group without identity".into()));
            }
            if elements.len() <= GROUP_CHECK_MAX {
                for a in &elements {
                    for b in &elements {
                        if !unique.contains(&a.compose(b)?) {
                            return Err(PermError::InvalidSet("not closed under composition".into()));
                        }
                    }
                }
            }
        }
        Ok(Self { d, elements, weights, is_group, label: String::new() })
    }

    pub fn uniform(d: usize, elements: Vec<Permutation>, is_group: bool) -> Result<Self, PermError> {
        let n = elements.len().max(1);
        let w = vec![1.0 / n as f64; elements.len()];
        Self::new(d, elements, w, is_group)
    }

    /// Skips validation; for generators whose output is correct by construction.
    pub(crate) fn uniform_trusted(d: usize, elements: Vec<Permutation>, is_group: bool) -> Self {
        let n = elements.len();
        Self { d, weights: vec![1.0 / n as f64; n], elements, is_group, label: String::new() }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn from_descriptor(desc: &str) -> Result<Self, PermError> {
        let parsed: SetDescriptor = desc.parse()?;
        Ok(parsed.build()?.with_label(parsed.to_string()))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_group(&self) -> bool {
        self.is_group
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_uniform(&self) -> bool {
        let w0 = self.weights[0];
        self.weights.iter().all(|&w| w == w0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Permutation, f64)> {
        self.elements.iter().zip(self.weights.iter().copied())
    }

    /// Total weight of the identity (0 if absent).
    pub fn identity_weight(&self) -> f64 {
        self.iter().filter(|(p, _)| p.is_identity()).map(|(_, w)| w).sum()
    }

    /// Elements grouped by cycle type, sorted by cycle type.
    pub fn cycle_classes(&self) -> Vec<CycleClass> {
        let mut map: BTreeMap<Vec<usize>, (usize, f64)> = BTreeMap::new();
        for (p, w) in self.iter() {
            let e = map.entry(p.cycle_lengths()).or_insert((0, 0.0));
            e.0 += 1;
            e.1 += w;
        }
        map.into_iter()
            .map(|(cycle_lengths, (count, weight))| CycleClass { cycle_lengths, count, weight })
            .collect()
    }

    /// Writes `# d=<d> group=<bool> label=<label>` followed by one line per element:
    /// the images `σ(0) .. σ(d-1)`, then the weight.
    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# d={} group={} label={}", self.d, self.is_group, self.label)?;
        for (p, h) in self.iter() {
            writeln!(w, "{p} {h:e}")?;
        }
        Ok(())
    }

    /// Reads the format written by [`write_text`](Self::write_text). The weight column is
    /// optional; if every line omits it, weights are uniform. Without a header the
    /// dimension is the length of the first line and the set is not flagged as a group.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self, PermError> {
        let mut d: Option<usize> = None;
        let mut is_group = false;
        let mut label = String::new();
        let mut elements = Vec::new();
        let mut weights: Vec<Option<f64>> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| PermError::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                for tok in header.split_whitespace() {
                    match tok.split_once('=') {
                        Some(("d", v)) => d = Some(parse_tok(v, lineno)?),
                        Some(("group", v)) => is_group = parse_tok(v, lineno)?,
                        Some(("label", v)) => label = v.to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let dim = *d.get_or_insert(toks.len());
            let (imgs, weight) = match toks.len() {
                n if n == dim => (&toks[..], None),
                n if n == dim + 1 => (&toks[..dim], Some(parse_tok::<f64>(toks[dim], lineno)?)),
                n => {
                    return Err(PermError::Parse(format!(
                        "line {}: {n} fields, expected {dim} or {}",
                        lineno + 1,
                        dim + 1
                    )))
                }
            };
            let mapping = imgs.iter().map(|t| parse_tok(t, lineno)).collect::<Result<Vec<usize>, _>>()?;
            elements.push(Permutation::new(mapping)?);
            weights.push(weight);
        }
        let d = d.ok_or_else(|| PermError::Parse("no elements".into()))?;
        let weights = if weights.iter().all(Option::is_none) {
            vec![1.0 / elements.len().max(1) as f64; elements.len()]
        } else if weights.iter().all(Option::is_some) {
            weights.into_iter().flatten().collect()
        } else {
            return Err(PermError::Parse("weight column present on some lines only".into()));
        };
        Ok(Self::new(d, elements, weights, is_group)?.with_label(label))
    }
}

fn parse_tok<T: FromStr>(s: &str, lineno: usize) -> Result<T, PermError> {
    s.parse().map_err(|_| PermError::Parse(format!("line {}: cannot parse '{s}'", lineno + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perms::{gen_cyclic, gen_deformation, gen_symmetric};

    #[test]
    fn inverse_closure() {
        let c3 = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        assert!(!check_inverse_closed(&[c3.clone()], &[1.0]));
        assert!(TransformationSet::uniform(3, vec![c3.clone()], false).is_err());
        let both = vec![c3.clone(), c3.inverse()];
        assert!(check_inverse_closed(&both, &[0.5, 0.5]));
        assert!(!check_inverse_closed(&both, &[0.3, 0.7]));
        let g = gen_symmetric(4).unwrap();
        assert!(check_inverse_closed(g.elements(), g.weights()));
    }

    #[test]
    fn group_axioms_are_checked() {
        let c3 = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        let not_group = vec![Permutation::identity(3), c3.clone(), c3.inverse(), Permutation::from_cycles(3, &[&[0, 1]]).unwrap()];
        assert!(TransformationSet::uniform(3, not_group.clone(), true).is_err());
        assert!(TransformationSet::uniform(3, not_group, false).is_ok());
        assert!(TransformationSet::uniform(3, vec![c3.clone(), c3.inverse()], true).is_err());
    }

    #[test]
    fn weights_are_validated() {
        let id = Permutation::identity(4);
        assert!(TransformationSet::new(4, vec![id.clone()], vec![0.5], true).is_err());
        assert!(TransformationSet::new(4, vec![id.clone()], vec![-1.0], true).is_err());
        assert!(TransformationSet::new(5, vec![id.clone()], vec![1.0], true).is_err());
        assert!(TransformationSet::new(4, vec![id.clone(), id], vec![0.5, 0.5], true).is_err());
    }

    #[test]
    fn descriptors() {
        for s in ["cyclic:d=8", "blockcyclic:s=6,r=2", "symmetric:d=6", "phi:d=12,eps=2", "trivial:d=5", "transposition:d=6"] {
            let desc: SetDescriptor = s.parse().unwrap();
            assert_eq!(desc.to_string(), s);
        }
        assert_eq!(SetDescriptor::from_str("blockcyclic:s=6,r=2").unwrap().d(), 12);
        assert!(SetDescriptor::from_str("cyclic").is_err());
        assert!(SetDescriptor::from_str("cyclic:d=8,eps=2").is_err());
        assert!(SetDescriptor::from_str("dihedral:d=8").is_err());
        let g = TransformationSet::from_descriptor("cyclic:d=8").unwrap();
        assert_eq!((g.len(), g.label()), (8, "cyclic:d=8"));
    }

    #[test]
    fn text_round_trip() {
        for set in [gen_cyclic(5).unwrap(), gen_deformation(6, 2).unwrap()] {
            let mut buf = Vec::new();
            set.write_text(&mut buf).unwrap();
            let back = TransformationSet::read_text(&buf[..]).unwrap();
            assert_eq!(back.elements(), set.elements());
            assert_eq!(back.is_group(), set.is_group());
            for (a, b) in back.weights().iter().zip(set.weights()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        let plain = "0 1 2\n1 2 0\n2 0 1\n";
        let s = TransformationSet::read_text(plain.as_bytes()).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.is_uniform());
        assert!(TransformationSet::read_text("0 1 2\n1 2 0 0.5\n".as_bytes()).is_err());
        assert!(TransformationSet::read_text("0 1\n1 1\n".as_bytes()).is_err());
    }

    #[test]
    fn cycle_classes_of_s4() {
        let g = gen_symmetric(4).unwrap();
        let classes = g.cycle_classes();
        let counts: Vec<(Vec<usize>, usize)> = classes.iter().map(|c| (c.cycle_lengths.clone(), c.count)).collect();
        assert_eq!(
            counts,
            vec![(vec![1, 1, 1, 1], 1), (vec![2, 1, 1], 6), (vec![2, 2], 3), (vec![3, 1], 8), (vec![4], 6)]
        );
        let tw: f64 = classes.iter().map(|c| c.weight).sum();
        assert!((tw - 1.0).abs() < 1e-12);
    }
}
