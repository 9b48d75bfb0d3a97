mod common;

use common::{rng, vertex_oracle};
use proptest::prelude::*;
use qmetric::lpcore::{LinearProgram, LpOutcome};
use rand::Rng;

const TOL: f64 = 1e-7;

fn build(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> LinearProgram {
    let mut lp = LinearProgram::new(c.to_vec());
    for (r, &bi) in rows.iter().zip(b) {
        lp.add_constraint(r.clone(), bi).unwrap();
    }
    lp
}

/// Random LP in a box `|x_i| <= 2`, so the feasible set is bounded.
fn random_boxed<R: Rng>(g: &mut R) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let n = g.random_range(1..=4);
    let extra = g.random_range(0..=(8 - 2 * n).min(4));
    let c: Vec<f64> = (0..n).map(|_| g.random_range(-3.0..3.0)).collect();
    let mut rows = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut r = vec![0.0; n];
            r[i] = s;
            rows.push(r);
            b.push(2.0);
        }
    }
    for _ in 0..extra {
        rows.push((0..n).map(|_| g.random_range(-2.0..2.0)).collect());
        b.push(g.random_range(-1.5..2.0));
    }
    (c, rows, b)
}

#[test]
fn examples() {
    let lp = build(&[1.0], &[vec![1.0]], &[3.0]);
    match lp.solve(TOL).unwrap() {
        LpOutcome::Optimal(s) => assert!((s.optimum - 3.0).abs() < 1e-12),
        o => panic!("{o:?}"),
    }
    let lp = build(&[1.0, 1.0], &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], &[1.0, 1.0, 1.5]);
    match lp.solve(TOL).unwrap() {
        LpOutcome::Optimal(s) => assert!((s.optimum - 1.5).abs() < 1e-12),
        o => panic!("{o:?}"),
    }
}

#[test]
fn unbounded_and_infeasible() {
    let lp = build(&[1.0, 0.0], &[vec![-1.0, 0.0]], &[0.0]);
    assert_eq!(lp.solve(TOL).unwrap(), LpOutcome::Unbounded);
    let lp = build(&[1.0], &[vec![1.0], vec![-1.0]], &[1.0, -2.0]);
    assert_eq!(lp.solve(TOL).unwrap(), LpOutcome::Infeasible);
}

#[test]
fn agrees_with_vertex_enumeration() {
    let mut g = rng(51);
    let mut optimal = 0;
    for _ in 0..300 {
        let (c, rows, b) = random_boxed(&mut g);
        let lp = build(&c, &rows, &b);
        match (lp.solve(TOL).unwrap(), vertex_oracle(&c, &rows, &b)) {
            (LpOutcome::Optimal(s), Some(v)) => {
                optimal += 1;
                assert!((s.optimum - v).abs() <= TOL * (1.0 + v.abs()), "{} vs {v}", s.optimum);
                assert!(lp.max_residual(&s.argmax) <= TOL);
                let at: f64 = c.iter().zip(&s.argmax).map(|(p, q)| p * q).sum();
                assert!((at - s.optimum).abs() <= TOL);
            }
            (LpOutcome::Infeasible, None) => {}
            (got, want) => panic!("solver {got:?}, oracle {want:?}"),
        }
    }
    assert!(optimal > 100);
}

#[test]
fn weak_duality_against_box_certificate() {
    // y puts |c_i| on the active side of each box constraint, so b.y = 2 sum |c_i|
    let mut g = rng(52);
    for _ in 0..100 {
        let (c, rows, b) = random_boxed(&mut g);
        if let LpOutcome::Optimal(s) = build(&c, &rows, &b).solve(TOL).unwrap() {
            let dual_bound: f64 = 2.0 * c.iter().map(|v| v.abs()).sum::<f64>();
            assert!(s.optimum <= dual_bound + TOL);
        }
    }
}

#[test]
fn degenerate_vertices() {
    // many constraints through the optimum
    let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
    let b = vec![1.0, 1.0, 2.0, 3.0, 3.0, 0.0, 0.0];
    let lp = build(&[1.0, 1.0], &rows, &b);
    match lp.solve(TOL).unwrap() {
        LpOutcome::Optimal(s) => assert!((s.optimum - 2.0).abs() < 1e-10),
        o => panic!("{o:?}"),
    }
}

#[test]
fn shape_errors() {
    let mut lp = LinearProgram::new(vec![1.0, 2.0]);
    assert!(lp.add_constraint(vec![1.0], 1.0).is_err());
    assert!(lp.add_constraint(vec![1.0, f64::NAN], 1.0).is_err());
    assert!(lp.set_objective(vec![1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn deterministic_and_self_verifying(seed in any::<u64>()) {
        let (c, rows, b) = random_boxed(&mut rng(seed));
        let lp = build(&c, &rows, &b);
        let first = lp.solve(TOL).unwrap();
        prop_assert_eq!(&first, &lp.solve(TOL).unwrap());
        let bytes = serde_json::to_vec(&lp).unwrap();
        let again: LinearProgram = serde_json::from_slice(&bytes).unwrap();
        prop_assert_eq!(&first, &again.solve(TOL).unwrap());
        if let LpOutcome::Optimal(s) = first {
            prop_assert!(lp.max_residual(&s.argmax) <= TOL);
        }
    }
}
