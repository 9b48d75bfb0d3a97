//! Random instances: algebras, elements, states and functions.
//!
//! Everything takes the generator by reference so a seeded generator
//! reproduces the same instances.
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::algebra::{AlgElement, AlgState, Algebra, CMat};
use crate::funcspace::MatrixFunction;
use crate::metric::FiniteMetricSpace;
use crate::states::FunctionalState;
use crate::tol::Tolerances;

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(normal(rng), normal(rng))
}

/// Between 1 and `max_blocks` blocks, each of size 1 to `max_block`.
pub fn algebra<R: Rng + ?Sized>(rng: &mut R, max_block: usize, max_blocks: usize) -> Algebra {
    let count = rng.random_range(1..=max_blocks.max(1));
    Algebra::new((0..count).map(|_| rng.random_range(1..=max_block.max(1))).collect()).expect("sizes are positive")
}

fn matrix<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    CMat::from_rows((0..m).map(|_| (0..m).map(|_| complex_normal(rng)).collect()).collect()).expect("square")
}

/// Gaussian complex entries.
pub fn element<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R) -> AlgElement {
    AlgElement::from_blocks(alg.blocks().iter().map(|&m| matrix(m, rng)).collect())
}

/// Hermitian part of a Gaussian element.
pub fn self_adjoint<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R) -> AlgElement {
    AlgElement::from_blocks(alg.blocks().iter().map(|&m| matrix(m, rng).hermitian_part()).collect())
}

/// A point drawn uniformly from the simplex.
pub fn probability<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Random weights and densities `G G* / tr(G G*)`.
pub fn state<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R) -> AlgState {
    let weights = probability(alg.block_count(), rng);
    let densities = alg
        .blocks()
        .iter()
        .map(|&m| {
            let g = matrix(m, rng);
            let gg = g.mul(&g.adjoint()).hermitian_part();
            let tr = gg.trace().re;
            gg.scale(C64::new(1.0 / tr, 0.0))
        })
        .collect();
    AlgState::new(alg, weights, densities, &Tolerances::default()).expect("random density is a state")
}

/// A vector state on a uniformly chosen block.
pub fn pure_state<R: Rng + ?Sized>(alg: &Algebra, rng: &mut R) -> AlgState {
    let k = rng.random_range(0..alg.block_count());
    let v: Vec<C64> = (0..alg.blocks()[k]).map(|_| complex_normal(rng)).collect();
    AlgState::vector(alg, k, &v, &Tolerances::default()).expect("nonzero Gaussian vector")
}

/// Gaussian values at every point, self-adjoint when asked.
pub fn function<R: Rng + ?Sized>(space: &FiniteMetricSpace, alg: &Algebra, self_adjoint_values: bool, rng: &mut R) -> MatrixFunction {
    let values = (0..space.len())
        .map(|_| if self_adjoint_values { self_adjoint(alg, rng) } else { element(alg, rng) })
        .collect();
    MatrixFunction::new(space.clone(), alg.clone(), values).expect("shapes match")
}

/// Pairs of pure states `phi o ev_x`, `psi o ev_y` at random points.
pub fn pure_state_pairs<R: Rng + ?Sized>(
    space: &FiniteMetricSpace,
    alg: &Algebra,
    count: usize,
    rng: &mut R,
) -> Vec<(FunctionalState, FunctionalState)> {
    (0..count)
        .map(|_| {
            let x = rng.random_range(0..space.len());
            let y = rng.random_range(0..space.len());
            (FunctionalState::delta(pure_state(alg, rng), x), FunctionalState::delta(pure_state(alg, rng), y))
        })
        .collect()
}
