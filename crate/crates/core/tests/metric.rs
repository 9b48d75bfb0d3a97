mod common;

use common::{gh_brute, rng};
use proptest::prelude::*;
use qmetric::metric::{gh_exact, gh_upper, hausdorff_from_cross, FiniteMetricSpace, JoinedSpace};
use qmetric::Tolerances;
use rand::Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn random_space<R: Rng>(g: &mut R, max_points: usize) -> FiniteMetricSpace {
    let n = g.random_range(1..=max_points);
    FiniteMetricSpace::random_planar(n, g).unwrap()
}

#[test]
fn validation_examples() {
    let t = tol();
    let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
    assert!(FiniteMetricSpace::new(labels(2), vec![vec![0.0, 1.0], vec![1.0, 0.0]], &t).is_ok());
    let tri = vec![vec![0.0, 3.0, 1.0], vec![3.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
    assert!(FiniteMetricSpace::new(labels(3), tri, &t).is_err());
    assert!(FiniteMetricSpace::new(labels(2), vec![vec![0.0, 1.0], vec![2.0, 0.0]], &t).is_err());
    assert!(FiniteMetricSpace::new(labels(2), vec![vec![0.0, 0.0], vec![0.0, 0.0]], &t).is_err());
}

#[test]
fn diameter_and_hausdorff_examples() {
    assert_eq!(FiniteMetricSpace::point().diameter(), 0.0);
    assert_eq!(FiniteMetricSpace::line(&[0.0, 1.0]).unwrap().diameter(), 1.0);
    assert!((FiniteMetricSpace::circle_chord(4).unwrap().diameter() - 2.0).abs() < 1e-15);
    let line = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
    assert_eq!(line.hausdorff(&[0], &[0, 2]).unwrap(), 2.0);
    assert_eq!(line.hausdorff(&[0, 2], &[1]).unwrap(), 1.0);
    assert_eq!(line.hausdorff(&[0, 1], &[0, 1]).unwrap(), 0.0);
}

#[test]
fn gh_examples() {
    let x = FiniteMetricSpace::circle_chord(3).unwrap();
    assert_eq!(gh_exact(&x, &x).unwrap(), 0.0);
    let two = FiniteMetricSpace::line(&[0.0, 2.0]).unwrap();
    assert_eq!(gh_exact(&FiniteMetricSpace::point(), &two).unwrap(), 1.0);
    assert_eq!(gh_brute(&FiniteMetricSpace::point(), &two), 1.0);
    let a = FiniteMetricSpace::line(&[0.0, 1.0]).unwrap();
    let b = FiniteMetricSpace::line(&[0.0, 3.0]).unwrap();
    assert_eq!(gh_exact(&a, &b).unwrap(), 1.0);
    assert_eq!(gh_brute(&a, &b), 1.0);
    assert!(gh_exact(&FiniteMetricSpace::interval(6).unwrap(), &a).is_err());
}

#[test]
fn gh_upper_examples() {
    let t = tol();
    let x = FiniteMetricSpace::circle_arc(5).unwrap();
    assert_eq!(gh_upper(&x, &x, x.matrix(), &t).unwrap(), 0.0);
    let line = FiniteMetricSpace::line(&[0.0, 0.5, 1.5, 3.0, 3.2]).unwrap();
    let (a, b) = (vec![0, 2, 3], vec![1, 4]);
    let up = gh_upper(&line.subspace(&a).unwrap(), &line.subspace(&b).unwrap(), &line.cross(&a, &b), &t).unwrap();
    assert_eq!(up, line.hausdorff(&a, &b).unwrap());
}

#[test]
fn gh_exact_matches_brute_force_on_pool() {
    let mut g = rng(21);
    let pool: Vec<FiniteMetricSpace> = (0..20).map(|_| random_space(&mut g, 4)).collect();
    for x in &pool {
        let point = gh_exact(&FiniteMetricSpace::point(), x).unwrap();
        assert!((point - x.diameter() / 2.0).abs() < 1e-12);
        for y in &pool {
            let e = gh_exact(x, y).unwrap();
            assert!((e - gh_brute(x, y)).abs() < 1e-12);
        }
    }
}

#[test]
fn gh_upper_dominates_exact() {
    let t = tol();
    let mut g = rng(22);
    for _ in 0..50 {
        // two subsets of one random planar cloud share an embedding
        let cloud = FiniteMetricSpace::random_planar(8, &mut g).unwrap();
        let a: Vec<usize> = (0..8).filter(|_| g.random_bool(0.5)).take(4).collect();
        let b: Vec<usize> = (0..8).filter(|_| g.random_bool(0.5)).take(4).collect();
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let (x, y) = (cloud.subspace(&a).unwrap(), cloud.subspace(&b).unwrap());
        let up = gh_upper(&x, &y, &cloud.cross(&a, &b), &t).unwrap();
        assert!(up + 1e-12 >= gh_exact(&x, &y).unwrap());
    }
}

#[test]
fn epsilon_net_examples() {
    let x = FiniteMetricSpace::circle_chord(8).unwrap();
    assert_eq!(x.epsilon_net(x.diameter(), 0).unwrap().len(), 1);
    assert_eq!(x.epsilon_net(1e-9, 0).unwrap().len(), 8);
    let eps = 2.0 * (std::f64::consts::PI / 8.0).sin();
    let net = x.epsilon_net(eps, 0).unwrap();
    let all: Vec<usize> = (0..8).collect();
    assert!(x.hausdorff(&net, &all).unwrap() <= eps);
}

#[test]
fn scaling_examples() {
    let x = FiniteMetricSpace::circle_arc(6).unwrap();
    assert_eq!(x.scale(1.0).unwrap(), x);
    assert!((x.scale(3.0).unwrap().diameter() - 3.0 * x.diameter()).abs() < 1e-12);
    assert!((x.with_diameter(1.0).unwrap().diameter() - 1.0).abs() < 1e-15);
}

#[test]
fn malformed_json_is_rejected() {
    let bad = r#"{"labels":["a","b"],"dist":[[0,1],[2,0]]}"#;
    assert!(serde_json::from_str::<FiniteMetricSpace>(bad).is_err());
    let good = r#"{"labels":["a","b"],"dist":[[0,1],[1,0]]}"#;
    let s: FiniteMetricSpace = serde_json::from_str(good).unwrap();
    assert_eq!(serde_json::from_str::<FiniteMetricSpace>(&serde_json::to_string(&s).unwrap()).unwrap(), s);
}

fn small_space() -> impl Strategy<Value = FiniteMetricSpace> {
    (1usize..=4, any::<u64>()).prop_map(|(n, seed)| FiniteMetricSpace::random_planar(n, &mut rng(seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gh_is_a_pseudometric(x in small_space(), y in small_space(), z in small_space()) {
        let (xy, yx) = (gh_exact(&x, &y).unwrap(), gh_exact(&y, &x).unwrap());
        prop_assert!((xy - yx).abs() < 1e-12);
        prop_assert_eq!(gh_exact(&x, &x).unwrap(), 0.0);
        let (yz, xz) = (gh_exact(&y, &z).unwrap(), gh_exact(&x, &z).unwrap());
        prop_assert!(xz <= xy + yz + 1e-12);
    }

    #[test]
    fn nets_cover(n in 1usize..40, eps in 0.01..3.0f64, seed in 0usize..40) {
        let x = FiniteMetricSpace::circle_arc(n).unwrap();
        let net = x.epsilon_net(eps, seed % n).unwrap();
        let all: Vec<usize> = (0..n).collect();
        prop_assert!(x.hausdorff(&net, &all).unwrap() <= eps);
    }

    #[test]
    fn joined_space_from_embedding_is_a_metric(seed in any::<u64>(), eps in 1e-4..1.0f64, m in 1usize..4) {
        let mut g = rng(seed);
        let cloud = FiniteMetricSpace::random_planar(10, &mut g).unwrap();
        let a: Vec<usize> = (0..5).collect();
        let b: Vec<usize> = (3..10).collect();
        let offset = eps / (8.0 * std::f64::consts::SQRT_2 * m as f64);
        let j = JoinedSpace::new(
            cloud.subspace(&a).unwrap(), cloud.subspace(&b).unwrap(), cloud.cross(&a, &b), offset, &tol(),
        ).unwrap();
        // full triangle validation over all triples happens when building the space
        prop_assert!(j.to_space(&tol()).is_ok());
        prop_assert!((j.hausdorff() - hausdorff_from_cross(&cloud.cross(&a, &b)) - offset).abs() < 1e-15);
    }
}
