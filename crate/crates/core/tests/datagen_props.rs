//! Sampling, targets and smoothing.

use std::sync::Arc;

use proptest::prelude::*;
use sphinv::datagen::{
    default_direction, make_dataset, random_direction, sample_sphere, Dataset, TargetBase, TargetSpec,
};
use sphinv::perms::{gen_block_cyclic, gen_cyclic, gen_symmetric};

/// `P(⟨w, x⟩ ≥ a)` for uniform `x` on `S^{d−1}` by composite Simpson in `t`.
fn cap_probability(d: usize, a: f64) -> f64 {
    let e = (d as f64 - 3.0) / 2.0;
    let simpson = |lo: f64, hi: f64| {
        let m = 200_000;
        let h = (hi - lo) / m as f64;
        let f = |t: f64| (1.0 - t * t).max(0.0).powf(e);
        let mut s = f(lo) + f(hi);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + h * i as f64);
        }
        s * h / 3.0
    };
    simpson(a, 1.0) / simpson(-1.0, 1.0)
}

#[test]
fn second_moment_of_a_coordinate() {
    for d in [3, 6, 12] {
        let n = 40_000;
        let pts = sample_sphere(n, d, 9).unwrap();
        let m: f64 = pts.iter().map(|x| x[0] * x[0]).sum::<f64>() / n as f64;
        // Var(x₁²) = 3/(d(d+2)) − 1/d²
        let sd = ((3.0 / (d * (d + 2)) as f64 - 1.0 / (d * d) as f64) / n as f64).sqrt();
        assert!((m - 1.0 / d as f64).abs() < 4.0 * sd, "d={d} m={m}");
        assert!(pts.iter().all(|x| (x.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12));
    }
}

#[test]
fn halfspace_label_frequency() {
    for (d, a) in [(3, 0.0), (6, 0.7), (6, 0.3), (12, 0.2)] {
        let spec = TargetSpec::new(TargetBase::Halfspace { threshold: a }, default_direction(d)).unwrap();
        let n = 40_000;
        let ds = make_dataset(&spec, n, 0.0, 4).unwrap();
        let p = cap_probability(d, a);
        let freq = ds.labels.iter().sum::<f64>() / n as f64;
        assert!((freq - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt(), "d={d} a={a}: {freq} vs {p}");
    }
    assert!((cap_probability(3, 0.5) - 0.25).abs() < 1e-9);
}

#[test]
fn group_smoothing_is_a_projection() {
    let d = 6;
    let w = random_direction(d, 2);
    for g in [gen_cyclic(d).unwrap(), gen_block_cyclic(2, 3).unwrap(), gen_symmetric(d).unwrap()] {
        let g = Arc::new(g);
        let base = TargetSpec::new(TargetBase::Halfspace { threshold: 0.3 }, w.clone()).unwrap();
        let once = base.clone().with_smoothing(g.clone(), 1).unwrap();
        let twice = base.with_smoothing(g.clone(), 2).unwrap();
        for x in sample_sphere(50, d, 3).unwrap() {
            let f = once.eval(&x);
            assert!((f - twice.eval(&x)).abs() < 1e-12);
            for sigma in g.elements() {
                assert!((once.eval(&sigma.apply(&x).unwrap()) - f).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn smoothing_contracts_l2_norm() {
    let d = 6;
    let base = TargetSpec::new(TargetBase::LegendreSingle { k: 3 }, random_direction(d, 5)).unwrap();
    let g = Arc::new(gen_cyclic(d).unwrap());
    let sm = base.clone().with_smoothing(g.clone(), 1).unwrap();
    let pts = sample_sphere(20_000, d, 8).unwrap();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for x in &pts {
        let f = sm.eval(x);
        // pointwise Jensen against the mean of g² over the orbit
        let orbit: f64 = g.elements().iter().map(|s| base.eval(&s.apply(x).unwrap()).powi(2)).sum::<f64>() / g.len() as f64;
        assert!(f * f <= orbit + 1e-12);
        lhs += f * f;
        rhs += base.eval(x).powi(2);
    }
    assert!(lhs < rhs);
}

#[test]
fn dataset_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.csv");
    let spec = TargetSpec::new(TargetBase::Linear, default_direction(4))
        .unwrap()
        .with_smoothing(Arc::new(gen_cyclic(4).unwrap()), 1)
        .unwrap();
    let ds = make_dataset(&spec, 30, 0.1, 1).unwrap();
    ds.write(&path).unwrap();
    let back = Dataset::read(&path).unwrap();
    assert_eq!(back.points, ds.points);
    assert_eq!(back.labels, ds.labels);
    assert_eq!(back.meta, ds.meta);
    let rebuilt = TargetSpec::from_meta(&back.meta.target).unwrap();
    assert_eq!(rebuilt.eval(&ds.points[0]), spec.eval(&ds.points[0]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn prefixes_are_stable(seed in 0u64..1000, n in 1usize..60) {
        let spec = TargetSpec::new(TargetBase::default(), default_direction(5)).unwrap();
        let big = make_dataset(&spec, 60, 0.2, seed).unwrap();
        let small = make_dataset(&spec, n, 0.2, seed).unwrap();
        prop_assert_eq!(&big.prefix(n).points, &small.points);
        prop_assert_eq!(&big.prefix(n).labels, &small.labels);
    }
}
