//! Acceptance run: one line per criterion, non-zero exit if any fails.
mod common;

use std::f64::consts::SQRT_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{brute_lipschitz, gh_brute, rng, vertex_oracle};
use num_complex::Complex64 as C64;
use qmetric::algebra::{AlgState, Algebra, NormKind};
use qmetric::funcspace::{classical_embed, lipnorm, quasi_leibniz_check, QTerm, SeminormSpec};
use qmetric::lpcore::{LinearProgram, LpOutcome};
use qmetric::mcshane::ExtensionProblem;
use qmetric::metric::{gh_exact, FiniteMetricSpace};
use qmetric::mk::{mk_diameter_report, MkOptions, MkProgram, MkResult};
use qmetric::propinquity::{approx_table, halving_schedule};
use qmetric::random;
use qmetric::states::FunctionalState;
use qmetric::Tolerances;
use rand::seq::index::sample;
use rand::Rng;

type Outcome = Result<String, String>;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn program(x: &FiniteMetricSpace, alg: &Algebra, spec: SeminormSpec) -> MkProgram {
    MkProgram::new(x, alg, spec, MkOptions::default(), &tol()).unwrap()
}

fn tracial_constant() -> Outcome {
    let mut g = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let alg = random::algebra(&mut g, 5, 4);
        let v = random::probability(alg.block_count(), &mut g);
        worst = worst.max((AlgState::tracial(&alg, &v, &tol()).unwrap().k_mu() - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("max |k_mu - 1| = {worst:e}"))?;
    Ok(format!("max |k_mu - 1| = {worst:.1e} over 100 states"))
}

fn norm_sandwiches() -> Outcome {
    let mut g = rng(2);
    let slack = 1e-12;
    let mut violations = 0;
    for _ in 0..1000 {
        let alg = random::algebra(&mut g, 5, 3);
        let m = alg.max_block() as f64;
        let a = random::element(&alg, &mut g);
        let (op, max) = (a.op_norm(), a.max_norm());
        if op / m > max + slack || max > op + slack {
            violations += 1;
        }
        let h = random::self_adjoint(&alg, &mut g);
        let (op, r) = (h.op_norm(), h.real_max_norm(&tol()).unwrap());
        if r > op + slack || op > SQRT_2 * m * r + slack {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("0 violations over 1000 + 1000 elements".into())
}

fn classical_recovery() -> Outcome {
    let mut g = rng(3);
    let t = tol();
    let cx = SeminormSpec::new(NormKind::Operator, QTerm::PointwiseQuotient).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = g.random_range(2..=10);
        let x = FiniteMetricSpace::random_planar(n, &mut g).unwrap();
        let alg = random::algebra(&mut g, 3, 2);
        let f: Vec<f64> = (0..n).map(|_| g.random_range(-2.0..2.0)).collect();
        let a = classical_embed(&x, &alg, &f);
        let lip = brute_lipschitz(&x, &f);
        let k = SeminormSpec::new(NormKind::RealMax, QTerm::ScaledRealQuotient(x.diameter())).unwrap();
        for spec in [&cx, &k] {
            worst = worst.max((lipnorm(&a, spec, &t).unwrap() - lip).abs() / lip.max(1.0));
        }
    }
    ensure(worst <= 1e-12, || format!("max relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e} over 100 functions, two seminorms"))
}

fn quasi_leibniz() -> Outcome {
    let mut g = rng(4);
    let t = tol();
    let cx = SeminormSpec::new(NormKind::Operator, QTerm::PointwiseQuotient).unwrap();
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for _ in 0..100 {
        let x = FiniteMetricSpace::random_planar(g.random_range(2..6), &mut g).unwrap();
        let alg = random::algebra(&mut g, 3, 2);
        let m_a = alg.max_block() as f64;
        let a = random::function(&x, &alg, true, &mut g);
        let b = random::function(&x, &alg, true, &mut g);
        for (spec, c) in [(&cx, 1.0), (&SeminormSpec::conv(), SQRT_2 * m_a)] {
            let r = quasi_leibniz_check(&a, &b, spec, c, 0.0, &t).unwrap();
            min_slack = min_slack.min(r.slack);
            if r.slack < -1e-9 {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations, min slack {min_slack:e}"))?;
    Ok(format!("0 violations over 2 x 100 pairs, min slack {min_slack:.3e}"))
}

fn isometry() -> Outcome {
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for n in [8, 12] {
        let x = FiniteMetricSpace::circle_chord(n).unwrap().with_diameter(1.0).unwrap();
        for blocks in [vec![2], vec![2, 3]] {
            let alg = Algebra::new(blocks.clone()).unwrap();
            let v = vec![1.0 / blocks.len() as f64; blocks.len()];
            let tr = AlgState::tracial(&alg, &v, &tol()).unwrap();
            let start = Instant::now();
            let r = qmetric::mk::embed_check(&program(&x, &alg, SeminormSpec::conv()), &tr).unwrap();
            let defect = r.pairs.iter().map(|p| (p.mk - p.distance).abs()).fold(0.0, f64::max);
            worst = worst.max(defect);
            report.push(format!("{n}pt {blocks:?} {:.1}s", start.elapsed().as_secs_f64()));
        }
    }
    ensure(worst <= 1e-6, || format!("max |mk - d| = {worst:e}"))?;
    Ok(format!("max |mk - d| = {worst:.1e} ({})", report.join(", ")))
}

fn lipschitz_upper_bound() -> Outcome {
    let mut g = rng(6);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let n = g.random_range(2..=5);
        let x = FiniteMetricSpace::random_planar(n, &mut g).unwrap();
        let alg = random::algebra(&mut g, 3, 2);
        let mu = random::state(&alg, &mut g);
        let pick = sample(&mut g, n, 2);
        let (i, j) = (pick.index(0), pick.index(1));
        let r = program(&x, &alg, SeminormSpec::conv())
            .distance(&FunctionalState::delta(mu.clone(), i), &FunctionalState::delta(mu.clone(), j))
            .unwrap();
        worst = worst.max(r.value() - SQRT_2 * mu.k_mu() * x.d(i, j));
    }
    ensure(worst <= 1e-6, || format!("max excess {worst:e}"))?;
    Ok(format!("max mk - sqrt2 k_mu d = {worst:.3e} over 50 states"))
}

fn diameter_caps() -> Outcome {
    let mut g = rng(7);
    let families = [
        (FiniteMetricSpace::circle_chord(6).unwrap(), Algebra::new(vec![2]).unwrap()),
        (FiniteMetricSpace::interval(5).unwrap().scale(4.0).unwrap(), Algebra::new(vec![1, 2]).unwrap()),
        (FiniteMetricSpace::random_planar(5, &mut g).unwrap(), Algebra::new(vec![3]).unwrap()),
    ];
    let mut parts = Vec::new();
    for (x, alg) in &families {
        let pairs = random::pure_state_pairs(x, alg, 20, &mut g);
        let r = mk_diameter_report(&program(x, alg, SeminormSpec::conv()), &pairs).unwrap();
        let cap = 2.0 * SQRT_2 * alg.max_block() as f64;
        ensure(r.max_observed <= cap + 1e-6, || format!("observed {} above cap {cap}", r.max_observed))?;
        parts.push(format!("{:.3}/{:.3}", r.max_observed, cap));
    }
    Ok(format!("max/cap per family: {}", parts.join(", ")))
}

fn mcshane() -> Outcome {
    let mut g = rng(8);
    for _ in 0..100 {
        let n = g.random_range(2..=12);
        let space = FiniteMetricSpace::random_planar(n, &mut g).unwrap();
        let k: f64 = g.random_range(0.1..3.0);
        let size = g.random_range(1..=n);
        let subset: Vec<usize> = sample(&mut g, n, size).into_iter().collect();
        let anchor = g.random_range(0..n);
        let values: Vec<f64> = subset.iter().map(|&i| k * space.d(i, anchor) - 1.0).collect();
        let p = ExtensionProblem::new(space.clone(), subset.clone(), values.clone(), k);
        let out = p.extend(&tol()).unwrap();
        for (s, &i) in subset.iter().enumerate() {
            ensure(out[i] == values[s], || "restriction changed".into())?;
        }
        ensure(brute_lipschitz(&space, &out) <= k + 1e-12, || "Lipschitz bound exceeded".into())?;
        let range = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        ensure(range(&out) == range(&values), || "range changed".into())?;
    }
    Ok("100 problems: restriction exact, Lipschitz <= K, range exact".into())
}

fn gh_oracle() -> Outcome {
    let mut g = rng(9);
    let pool: Vec<FiniteMetricSpace> = (0..20)
        .map(|_| {
            let n = g.random_range(1..=4);
            FiniteMetricSpace::random_planar(n, &mut g).unwrap()
        })
        .collect();
    let mut worst = 0.0f64;
    for x in &pool {
        worst = worst.max((gh_exact(&FiniteMetricSpace::point(), x).unwrap() - x.diameter() / 2.0).abs());
        for y in &pool {
            worst = worst.max((gh_exact(x, y).unwrap() - gh_brute(x, y)).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max disagreement {worst:e}"))?;
    Ok(format!("400 pairs agree with enumeration (max diff {worst:.1e})"))
}

fn convergence_table() -> Outcome {
    let x = FiniteMetricSpace::circle_chord(64).unwrap();
    let alg = Algebra::new(vec![2]).unwrap();
    let eps = 1e-3;
    let t = approx_table(&x, &alg, &halving_schedule(&x, 6), eps, 4, 10, &tol()).unwrap();
    for r in &t.rows {
        ensure(r.bound <= SQRT_2 * 2.0 * r.hausdorff + eps / 2.0 + 1e-12, || format!("row {r:?} above formula"))?;
    }
    let last = t.rows.last().unwrap().bound;
    ensure(last < 0.1, || format!("final bound {last}"))?;
    let certs: usize = t.rows.iter().map(|r| r.certificates).sum();
    ensure(t.all_verified(), || "a certificate failed".into())?;
    let col: Vec<String> = t.rows.iter().map(|r| format!("{:.4}", r.bound)).collect();
    Ok(format!("bounds [{}], {certs} certificates verified", col.join(", ")))
}

fn two_path() -> Outcome {
    let mut g = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = g.random_range(1..6);
        let x = FiniteMetricSpace::random_planar(n, &mut g).unwrap();
        let alg = random::algebra(&mut g, 4, 3);
        let mu = random::state(&alg, &mut g);
        let p = g.random_range(0..n);
        let a = random::function(&x, &alg, false, &mut g);
        let direct = FunctionalState::delta(mu.clone(), p).evaluate(&a).unwrap();
        let mut units = C64::new(0.0, 0.0);
        for (k, &m) in alg.blocks().iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    units += mu.apply(&alg.matrix_unit(k, i, j).unwrap()).unwrap() * a.value(p).block(k).get(i, j);
                }
            }
        }
        worst = worst.max((direct - units).norm() / (1.0 + direct.norm()));
    }
    ensure(worst <= 1e-12, || format!("max difference {worst:e}"))?;
    Ok(format!("max relative difference {worst:.1e} over 200 triples"))
}

fn lp_self_verification() -> Outcome {
    let mut g = rng(12);
    let t = tol();
    let mut exact = 0;
    for _ in 0..30 {
        let x = FiniteMetricSpace::random_planar(g.random_range(2..5), &mut g).unwrap();
        let alg = random::algebra(&mut g, 2, 2);
        let specs = [
            SeminormSpec::conv(),
            SeminormSpec::new(NormKind::RealMax, QTerm::ScaledRealQuotient(0.8)).unwrap(),
            SeminormSpec::new(NormKind::RealMax, QTerm::PointwiseQuotient).unwrap(),
        ];
        for spec in specs {
            let mu = FunctionalState::delta(random::state(&alg, &mut g), g.random_range(0..x.len()));
            let nu = FunctionalState::delta(random::state(&alg, &mut g), g.random_range(0..x.len()));
            let r = program(&x, &alg, spec.clone()).distance(&mu, &nu).unwrap();
            let MkResult::Exact { value, witness } = r else { return Err("real max spec gave an interval".into()) };
            let l = lipnorm(&witness, &spec, &t).unwrap();
            let gap = (mu.evaluate(&witness).unwrap() - nu.evaluate(&witness).unwrap()).norm();
            ensure(l <= 1.0 + 1e-7 && (gap - value).abs() <= 1e-7, || format!("witness: L = {l}, gap {gap} vs {value}"))?;
            exact += 1;
        }
    }
    let mut agree = 0;
    while agree < 50 {
        let n = g.random_range(1..=4);
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
        for _ in 0..(8 - 2 * n).min(3) {
            rows.push((0..n).map(|_| g.random_range(-2.0..2.0)).collect());
            b.push(g.random_range(-1.0..2.0));
        }
        let mut lp = LinearProgram::new(c.clone());
        for (r, &bi) in rows.iter().zip(&b) {
            lp.add_constraint(r.clone(), bi).unwrap();
        }
        match (lp.solve(1e-7).unwrap(), vertex_oracle(&c, &rows, &b)) {
            (LpOutcome::Optimal(s), Some(v)) => {
                ensure((s.optimum - v).abs() <= 1e-7 * (1.0 + v.abs()), || format!("LP {} vs oracle {v}", s.optimum))?;
            }
            (LpOutcome::Infeasible, None) => {}
            (got, want) => return Err(format!("solver {got:?}, oracle {want:?}")),
        }
        agree += 1;
    }
    Ok(format!("{exact} witnesses re-validated, {agree} LPs match vertex enumeration"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("tracial constant", tracial_constant),
        ("norm sandwiches", norm_sandwiches),
        ("classical recovery", classical_recovery),
        ("quasi-Leibniz", quasi_leibniz),
        ("isometry reproduction", isometry),
        ("Lipschitz upper bound", lipschitz_upper_bound),
        ("diameter caps", diameter_caps),
        ("McShane", mcshane),
        ("GH oracle agreement", gh_oracle),
        ("convergence table", convergence_table),
        ("two-path state evaluation", two_path),
        ("LP self-verification", lp_self_verification),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
