#![allow(dead_code)]
//! Shared strategies and helpers for the integration tests.
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qmetric::algebra::{AlgElement, Algebra, CMat};
use qmetric::metric::FiniteMetricSpace;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn algebra_strategy(max_block: usize) -> impl Strategy<Value = Algebra> {
    prop::collection::vec(1..=max_block, 1..=3).prop_map(|b| Algebra::new(b).unwrap())
}

fn block_strategy(m: usize, hermitian: bool) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), m * m).prop_map(move |v| {
        let rows: Vec<Vec<C64>> = (0..m).map(|i| (0..m).map(|j| C64::new(v[i * m + j].0, v[i * m + j].1)).collect()).collect();
        let a = CMat::from_rows(rows).unwrap();
        if hermitian {
            a.hermitian_part()
        } else {
            a
        }
    })
}

pub fn element_in(alg: &Algebra, hermitian: bool) -> BoxedStrategy<AlgElement> {
    alg.blocks()
        .iter()
        .map(|&m| block_strategy(m, hermitian).boxed())
        .collect::<Vec<_>>()
        .prop_map(AlgElement::from_blocks)
        .boxed()
}

/// An algebra with `count` elements of it.
pub fn elements(max_block: usize, count: usize, hermitian: bool) -> impl Strategy<Value = (Algebra, Vec<AlgElement>)> {
    algebra_strategy(max_block).prop_flat_map(move |alg| {
        let elems = (0..count).map(|_| element_in(&alg, hermitian)).collect::<Vec<_>>();
        (Just(alg), elems)
    })
}

/// Points on a line with distinct coordinates.
pub fn line_strategy(max_points: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    prop::collection::btree_set(0i32..200, 1..=max_points)
        .prop_map(|s| FiniteMetricSpace::line(&s.into_iter().map(|v| v as f64 / 20.0).collect::<Vec<_>>()).unwrap())
}

/// Brute-force Lipschitz constant of a real function on a space.
pub fn brute_lipschitz(space: &FiniteMetricSpace, f: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..space.len() {
        for j in 0..space.len() {
            if i != j {
                best = best.max((f[i] - f[j]).abs() / space.d(i, j));
            }
        }
    }
    best
}

/// Solve a square system by Gaussian elimination; `None` when singular.
pub fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

pub fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if m < k {
        return vec![];
    }
    let mut out = subsets(m - 1, k);
    for mut s in subsets(m - 1, k - 1) {
        s.push(m - 1);
        out.push(s);
    }
    out
}

/// Best objective over all feasible vertices, `None` when there are none.
pub fn vertex_oracle(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let n = c.len();
    let mut best: Option<f64> = None;
    for s in subsets(rows.len(), n) {
        let a: Vec<Vec<f64>> = s.iter().map(|&i| rows[i].clone()).collect();
        let rhs: Vec<f64> = s.iter().map(|&i| b[i]).collect();
        if let Some(x) = gauss(a, rhs) {
            let feasible = rows.iter().zip(b).all(|(r, &bi)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= bi + 1e-9);
            if feasible {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |w: f64| w.max(v)));
            }
        }
    }
    best
}

/// Half the least distortion over every relation with surjective projections.
pub fn gh_brute(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (n, m) = (x.len(), y.len());
    let cells = n * m;
    assert!(cells <= 20);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << cells) {
        let pairs: Vec<(usize, usize)> = (0..cells).filter(|b| mask >> b & 1 == 1).map(|b| (b / m, b % m)).collect();
        if (0..n).any(|i| !pairs.iter().any(|p| p.0 == i)) || (0..m).any(|j| !pairs.iter().any(|p| p.1 == j)) {
            continue;
        }
        let mut dis = 0.0f64;
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                dis = dis.max((x.d(a, c) - y.d(b, d)).abs());
            }
        }
        best = best.min(dis);
    }
    best / 2.0
}

