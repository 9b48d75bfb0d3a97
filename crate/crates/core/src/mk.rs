//! Monge-Kantorovich distances between states of `C(X, A)`.
//!
//! The distance is `sup |mu(a) - nu(a)|` over self-adjoint `a` in the unit
//! ball of a seminorm. When the Lipschitz norm is the real max norm the ball
//! is a polytope in the real coordinates of `a` (real diagonal entries plus
//! real and imaginary parts of the upper off-diagonal entries at every
//! point), so the supremum is a linear program and the result is exact.
//! For the operator and max norms the ball is squeezed between two such
//! polytopes and the result is an interval.
//!
//! ```
//! use qmetric::algebra::Algebra;
//! use qmetric::funcspace::SeminormSpec;
//! use qmetric::metric::FiniteMetricSpace;
//! use qmetric::mk::{MkOptions, MkProgram};
//! use qmetric::states::FunctionalState;
//! use qmetric::Tolerances;
//!
//! let tol = Tolerances::default();
//! let space = FiniteMetricSpace::circle_chord(6).unwrap().with_diameter(1.0).unwrap();
//! let alg = Algebra::new(vec![2]).unwrap();
//! let prog = MkProgram::new(&space, &alg, SeminormSpec::conv(), MkOptions::default(), &tol).unwrap();
//! let mu = FunctionalState::tracial(&alg, &[1.0], 0, &tol).unwrap();
//! let nu = FunctionalState::tracial(&alg, &[1.0], 2, &tol).unwrap();
//! let d = prog.distance(&mu, &nu).unwrap().value();
//! assert!((d - space.d(0, 2)).abs() < 1e-9);
//! ```
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElement, AlgState, Algebra, CMat, NormKind};
use crate::error::{Error, Result};
use crate::funcspace::{lipnorm, MatrixFunction, QTerm, SeminormSpec};
use crate::lpcore::{LinearProgram, LpOutcome};
use crate::metric::FiniteMetricSpace;
use crate::states::FunctionalState;
use crate::tol::Tolerances;

const POLYGON_SIDES: usize = 16;

/// Result of a distance computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MkResult {
    /// Exact value with a maximizing function in the unit ball.
    Exact { value: f64, witness: MatrixFunction },
    /// Lower and upper bounds from an inner and an outer polytope.
    Interval { lower: f64, upper: f64 },
}

impl MkResult {
    /// The exact value, or the upper end of an interval.
    pub fn value(&self) -> f64 {
        self.upper()
    }

    pub fn lower(&self) -> f64 {
        match self {
            MkResult::Exact { value, .. } => *value,
            MkResult::Interval { lower, .. } => *lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            MkResult::Exact { value, .. } => *value,
            MkResult::Interval { upper, .. } => *upper,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MkResult::Exact { .. })
    }
}

/// Knobs for building the linear programs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MkOptions {
    /// Drop the Lipschitz constraints of a pair `(x, y)` when some `z` lies
    /// metrically between them; they are implied by the two shorter pairs.
    pub prune_pairs: bool,
    /// In interval mode, bound complex entries by regular 16-gons instead
    /// of boxes on real and imaginary parts.
    pub polygons: bool,
    /// Run independent solves (pairs in [`embed_check`]) on the rayon pool.
    pub parallel: bool,
}

impl Default for MkOptions {
    fn default() -> Self {
        MkOptions { prune_pairs: true, polygons: false, parallel: true }
    }
}

#[derive(Debug, Clone, Copy)]
enum OffShape {
    /// `|Re| <= r` and `|Im| <= r`.
    Box(f64),
    /// `cos t Re + sin t Im <= r` for 16 equally spaced `t`.
    Polygon(f64),
}

/// Radii for diagonal and off-diagonal entries of one constrained quantity.
#[derive(Debug, Clone, Copy)]
struct Shape {
    diag: f64,
    off: OffShape,
}

impl Shape {
    const UNIT_BOX: Shape = Shape { diag: 1.0, off: OffShape::Box(1.0) };

    fn scaled(self, s: f64) -> Shape {
        Shape {
            diag: self.diag * s,
            off: match self.off {
                OffShape::Box(r) => OffShape::Box(r * s),
                OffShape::Polygon(r) => OffShape::Polygon(r * s),
            },
        }
    }
}

/// Where the "scalar" subtracted in the quotient constraints comes from.
#[derive(Debug, Clone)]
enum Center {
    /// One free variable shared by all points.
    Shared(usize),
    /// One free variable per point, starting at this index.
    PerPoint(usize),
    /// The linear functional `mu(a)` on the coordinates.
    Functional(Vec<f64>),
}

/// Variable indices of one block at one point.
#[derive(Debug, Clone)]
struct BlockVars {
    diag: Vec<usize>,
    /// `(p, q, re, im)` for `p < q`.
    off: Vec<(usize, usize, usize, usize)>,
}

/// The Lipschitz-ball polytopes for one space, algebra and seminorm,
/// built once and reused for any number of objectives.
#[derive(Debug, Clone)]
pub struct MkProgram {
    space: FiniteMetricSpace,
    algebra: Algebra,
    spec: SeminormSpec,
    options: MkOptions,
    tol: Tolerances,
    vars: Vec<Vec<BlockVars>>,
    n_coords: usize,
    /// One polytope when exact; inner then outer when an interval.
    balls: Vec<LinearProgram>,
    kept_pairs: usize,
}

impl MkProgram {
    pub fn new(
        space: &FiniteMetricSpace,
        algebra: &Algebra,
        spec: SeminormSpec,
        options: MkOptions,
        tol: &Tolerances,
    ) -> Result<Self> {
        if let QTerm::StateCentered(mu) = &spec.q {
            mu.validate(space.len(), algebra, tol)?;
        }
        let mut next = 0;
        let vars: Vec<Vec<BlockVars>> = (0..space.len())
            .map(|_| {
                algebra
                    .blocks()
                    .iter()
                    .map(|&m| {
                        let diag = (0..m).map(|_| bump(&mut next)).collect();
                        let mut off = Vec::new();
                        for p in 0..m {
                            for q in p + 1..m {
                                off.push((p, q, bump(&mut next), bump(&mut next)));
                            }
                        }
                        BlockVars { diag, off }
                    })
                    .collect()
            })
            .collect();
        let n_coords = next;
        let center = match &spec.q {
            QTerm::PointwiseQuotient => Center::PerPoint(n_coords),
            QTerm::StateCentered(mu) => {
                Center::Functional(real_coefficients(&vars, &mu.unit_coefficients(space.len(), algebra), n_coords))
            }
            _ => Center::Shared(n_coords),
        };
        let n_vars = match &center {
            Center::Shared(_) => n_coords + 1,
            Center::PerPoint(_) => n_coords + space.len(),
            Center::Functional(_) => n_coords,
        };

        let m_a = algebra.max_block() as f64;
        let shapes: Vec<Shape> = match (spec.norm, options.polygons) {
            (NormKind::RealMax, _) => vec![Shape::UNIT_BOX],
            (NormKind::Max, false) => vec![Shape { diag: 1.0, off: OffShape::Box(FRAC_1_SQRT_2) }, Shape::UNIT_BOX],
            (NormKind::Max, true) => vec![
                Shape { diag: 1.0, off: OffShape::Polygon((PI / POLYGON_SIDES as f64).cos()) },
                Shape { diag: 1.0, off: OffShape::Polygon(1.0) },
            ],
            (NormKind::Operator, false) => {
                vec![Shape { diag: 1.0 / m_a, off: OffShape::Box(FRAC_1_SQRT_2 / m_a) }, Shape::UNIT_BOX]
            }
            (NormKind::Operator, true) => vec![
                Shape { diag: 1.0 / m_a, off: OffShape::Polygon((PI / POLYGON_SIDES as f64).cos() / m_a) },
                Shape { diag: 1.0, off: OffShape::Polygon(1.0) },
            ],
        };

        let pairs = lipschitz_pairs(space, options.prune_pairs);
        let balls = shapes
            .iter()
            .map(|&shape| {
                let q_shape = match spec.q {
                    QTerm::RealQuotient => Shape::UNIT_BOX,
                    QTerm::ScaledRealQuotient(k) => Shape::UNIT_BOX.scaled(k / 2.0),
                    _ => shape,
                };
                let mut lp = LinearProgram::new(vec![0.0; n_vars]);
                for &(x, y) in &pairs {
                    let inv = 1.0 / space.d(x, y);
                    for (bx, by) in vars[x].iter().zip(&vars[y]) {
                        for (&vx, &vy) in bx.diag.iter().zip(&by.diag) {
                            push_abs(&mut lp, &[(vx, inv), (vy, -inv)], &[], shape.diag)?;
                        }
                        for (&(_, _, rx, ix), &(_, _, ry, iy)) in bx.off.iter().zip(&by.off) {
                            push_off(&mut lp, &[(rx, inv), (ry, -inv)], &[(ix, inv), (iy, -inv)], shape.off)?;
                        }
                    }
                }
                for (x, blocks) in vars.iter().enumerate() {
                    for b in blocks {
                        for &v in &b.diag {
                            match &center {
                                Center::Shared(r) => push_abs(&mut lp, &[(v, 1.0), (*r, -1.0)], &[], q_shape.diag)?,
                                Center::PerPoint(r0) => {
                                    push_abs(&mut lp, &[(v, 1.0), (r0 + x, -1.0)], &[], q_shape.diag)?
                                }
                                Center::Functional(f) => push_abs(&mut lp, &[(v, 1.0)], f, q_shape.diag)?,
                            }
                        }
                        for &(_, _, re, im) in &b.off {
                            push_off(&mut lp, &[(re, 1.0)], &[(im, 1.0)], q_shape.off)?;
                        }
                    }
                }
                Ok(lp)
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(MkProgram {
            space: space.clone(),
            algebra: algebra.clone(),
            spec,
            options,
            tol: *tol,
            vars,
            n_coords,
            balls,
            kept_pairs: pairs.len(),
        })
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn spec(&self) -> &SeminormSpec {
        &self.spec
    }

    pub fn is_exact(&self) -> bool {
        self.balls.len() == 1
    }

    pub fn n_vars(&self) -> usize {
        self.balls[0].n_vars()
    }

    pub fn n_constraints(&self) -> usize {
        self.balls[0].n_constraints()
    }

    /// Point pairs that carry Lipschitz constraints after pruning.
    pub fn kept_pairs(&self) -> usize {
        self.kept_pairs
    }

    /// The polytope(s) as linear programs with a zero objective.
    pub fn programs(&self) -> &[LinearProgram] {
        &self.balls
    }

    fn difference_objective(&self, mu: &FunctionalState, nu: &FunctionalState) -> Result<Vec<f64>> {
        let n = self.space.len();
        mu.validate(n, &self.algebra, &self.tol)?;
        nu.validate(n, &self.algebra, &self.tol)?;
        let cm = mu.unit_coefficients(n, &self.algebra);
        let cn = nu.unit_coefficients(n, &self.algebra);
        let diff: Vec<Vec<CMat>> =
            cm.iter().zip(&cn).map(|(a, b)| a.iter().zip(b).map(|(p, q)| p.sub(q)).collect()).collect();
        Ok(real_coefficients(&self.vars, &diff, self.n_vars()))
    }

    /// The function encoded by an LP point.
    pub fn witness(&self, x: &[f64]) -> MatrixFunction {
        let values = self
            .vars
            .iter()
            .map(|blocks| {
                let mats = blocks
                    .iter()
                    .zip(self.algebra.blocks())
                    .map(|(b, &m)| {
                        let mut mat = CMat::zeros(m);
                        for (p, &v) in b.diag.iter().enumerate() {
                            mat.set(p, p, C64::new(x[v], 0.0));
                        }
                        for &(p, q, re, im) in &b.off {
                            mat.set(p, q, C64::new(x[re], x[im]));
                            mat.set(q, p, C64::new(x[re], -x[im]));
                        }
                        mat
                    })
                    .collect();
                AlgElement::from_blocks(mats)
            })
            .collect();
        MatrixFunction::new(self.space.clone(), self.algebra.clone(), values).expect("layout matches algebra")
    }

    fn maximize(&self, ball: usize, objective: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self.balls[ball].solve_with(objective, self.tol.lp)? {
            LpOutcome::Optimal(sol) => Ok((sol.optimum, sol.argmax)),
            LpOutcome::Infeasible => Err(Error::Invariant("the Lipschitz ball is empty, yet 0 lies in it".into())),
            LpOutcome::Unbounded => Err(Error::Lp("objective is unbounded on the Lipschitz ball".into())),
        }
    }

    /// Check an exact optimum: the witness lies in the unit ball and
    /// attains `value`.
    fn certify(&self, value: f64, witness: &MatrixFunction, attained: f64) -> Result<()> {
        let l = lipnorm(witness, &self.spec, &self.tol)?;
        if l > 1.0 + self.tol.lp {
            return Err(Error::Invariant(format!("witness has seminorm {l} > 1")));
        }
        if (attained - value).abs() > self.tol.lp * (1.0 + value.abs()) {
            return Err(Error::Invariant(format!("witness attains {attained}, LP reports {value}")));
        }
        Ok(())
    }

    /// The distance between two states.
    pub fn distance(&self, mu: &FunctionalState, nu: &FunctionalState) -> Result<MkResult> {
        let obj = self.difference_objective(mu, nu)?;
        if self.is_exact() {
            let (value, x) = self.maximize(0, &obj)?;
            let witness = self.witness(&x);
            let attained = (mu.evaluate(&witness)? - nu.evaluate(&witness)?).re;
            self.certify(value, &witness, attained)?;
            Ok(MkResult::Exact { value: value.max(0.0), witness })
        } else {
            let (lower, _) = self.maximize(0, &obj)?;
            let (upper, _) = self.maximize(1, &obj)?;
            if lower > upper + self.tol.lp * (1.0 + upper.abs()) {
                return Err(Error::Invariant(format!("inner bound {lower} exceeds outer bound {upper}")));
            }
            Ok(MkResult::Interval { lower: lower.max(0.0), upper: upper.max(lower).max(0.0) })
        }
    }

    /// Extreme points of the unit ball found by maximizing random linear
    /// functionals that vanish on the unit. Exact programs only.
    pub fn sample_unit_ball<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<MatrixFunction>> {
        if !self.is_exact() {
            return Err(Error::Precondition("unit-ball sampling needs an exact (real max) seminorm".into()));
        }
        let diag: Vec<usize> = self.vars.iter().flatten().flat_map(|b| b.diag.iter().copied()).collect();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut obj = vec![0.0; self.n_vars()];
            for v in obj.iter_mut().take(self.n_coords) {
                *v = rng.sample(StandardNormal);
            }
            let mean = diag.iter().map(|&v| obj[v]).sum::<f64>() / diag.len() as f64;
            for &v in &diag {
                obj[v] -= mean;
            }
            let (value, x) = self.maximize(0, &obj)?;
            let witness = self.witness(&x);
            let attained: f64 = obj.iter().zip(&x).take(self.n_coords).map(|(c, v)| c * v).sum();
            self.certify(value, &witness, attained)?;
            out.push(witness);
        }
        Ok(out)
    }
}

fn bump(next: &mut usize) -> usize {
    *next += 1;
    *next - 1
}

/// Coefficients of `a -> Re f(a)` on the coordinates, where
/// `f(a) = sum coeffs[x][k][(p,q)] a^k_{p,q}(x)` and `a` is self-adjoint.
fn real_coefficients(vars: &[Vec<BlockVars>], coeffs: &[Vec<CMat>], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (x, blocks) in vars.iter().enumerate() {
        for (k, b) in blocks.iter().enumerate() {
            let c = &coeffs[x][k];
            for (p, &v) in b.diag.iter().enumerate() {
                out[v] = c.get(p, p).re;
            }
            for &(p, q, re, im) in &b.off {
                out[re] = c.get(p, q).re + c.get(q, p).re;
                out[im] = c.get(q, p).im - c.get(p, q).im;
            }
        }
    }
    out
}

/// Pairs `x < y` whose constraints are not implied through a middle point.
fn lipschitz_pairs(space: &FiniteMetricSpace, prune: bool) -> Vec<(usize, usize)> {
    let n = space.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let dxy = space.d(x, y);
            let implied = prune && (0..n).any(|z| z != x && z != y && space.d(x, z) + space.d(z, y) <= dxy * (1.0 + 1e-12));
            if !implied {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

/// `|sparse . v + dense . v| <= r`, as two rows.
fn push_abs(lp: &mut LinearProgram, sparse: &[(usize, f64)], dense: &[f64], r: f64) -> Result<()> {
    let n = lp.n_vars();
    let mut row = vec![0.0; n];
    for (i, &d) in dense.iter().enumerate() {
        row[i] -= d;
    }
    for &(i, c) in sparse {
        row[i] += c;
    }
    let neg: Vec<f64> = row.iter().map(|v| -v).collect();
    lp.add_constraint(row, r)?;
    lp.add_constraint(neg, r)
}

/// Constraints on a complex quantity with real part `re . v` and imaginary
/// part `im . v`.
fn push_off(lp: &mut LinearProgram, re: &[(usize, f64)], im: &[(usize, f64)], shape: OffShape) -> Result<()> {
    match shape {
        OffShape::Box(r) => {
            push_abs(lp, re, &[], r)?;
            push_abs(lp, im, &[], r)
        }
        OffShape::Polygon(r) => {
            for j in 0..POLYGON_SIDES {
                let t = 2.0 * PI * j as f64 / POLYGON_SIDES as f64;
                let (s, c) = t.sin_cos();
                let mut row = vec![0.0; lp.n_vars()];
                for &(i, v) in re {
                    row[i] += c * v;
                }
                for &(i, v) in im {
                    row[i] += s * v;
                }
                lp.add_constraint(row, r)?;
            }
            Ok(())
        }
    }
}

/// Convenience wrapper: build the program and compute one distance.
pub fn mk_distance(
    space: &FiniteMetricSpace,
    algebra: &Algebra,
    mu: &FunctionalState,
    nu: &FunctionalState,
    spec: &SeminormSpec,
    options: MkOptions,
    tol: &Tolerances,
) -> Result<MkResult> {
    MkProgram::new(space, algebra, spec.clone(), options, tol)?.distance(mu, nu)
}

/// `N` with `||b||_op <= N ||b||` for the Lipschitz norm of a seminorm spec.
fn op_constant(norm: NormKind, algebra: &Algebra) -> f64 {
    let m_a = algebra.max_block() as f64;
    match norm {
        NormKind::Operator => 1.0,
        NormKind::Max => m_a,
        NormKind::RealMax => SQRT_2 * m_a,
    }
}

/// Upper bound on the distance between any two states for a seminorm.
pub fn diameter_cap(spec: &SeminormSpec, space: &FiniteMetricSpace, algebra: &Algebra) -> f64 {
    let n = op_constant(spec.norm, algebra);
    let real = SQRT_2 * algebra.max_block() as f64;
    match spec.q {
        QTerm::RealQuotient => 2.0 * real,
        QTerm::ScaledRealQuotient(k) => k * real,
        QTerm::ScalarQuotient | QTerm::StateCentered(_) => 2.0 * n,
        QTerm::PointwiseQuotient => 2.0 * n + n * space.diameter(),
    }
}

/// Observed distances over sampled state pairs against [`diameter_cap`].
///
/// For interval results only the lower end is certified to be at most the
/// true distance, so exceedances are counted on lower ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub samples: usize,
    /// Largest certified distance (lower end for intervals).
    pub max_observed: f64,
    /// Largest upper end.
    pub max_upper: f64,
    pub cap: f64,
    /// Samples whose certified distance exceeds the cap by more than the LP tolerance.
    pub exceedances: usize,
    /// `(lower, upper)` per sample; equal for exact results.
    pub values: Vec<(f64, f64)>,
}

pub fn mk_diameter_report(program: &MkProgram, pairs: &[(FunctionalState, FunctionalState)]) -> Result<DiameterReport> {
    let cap = diameter_cap(&program.spec, &program.space, &program.algebra);
    let run = |(mu, nu): &(FunctionalState, FunctionalState)| program.distance(mu, nu).map(|r| (r.lower(), r.upper()));
    let values: Vec<(f64, f64)> = if program.options.parallel {
        pairs.par_iter().map(run).collect::<Result<_>>()?
    } else {
        pairs.iter().map(run).collect::<Result<_>>()?
    };
    let exceedances = values.iter().filter(|v| v.0 > cap + program.tol.lp).count();
    Ok(DiameterReport {
        samples: values.len(),
        max_observed: values.iter().map(|v| v.0).fold(0.0, f64::max),
        max_upper: values.iter().map(|v| v.1).fold(0.0, f64::max),
        cap,
        exceedances,
        values,
    })
}

/// One pair in an [`EmbedReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedPair {
    pub x: usize,
    pub y: usize,
    pub distance: f64,
    pub mk: f64,
}

/// Comparison of `mk(mu_x, mu_y)` with `d(x, y)` over all pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedReport {
    pub pairs: Vec<EmbedPair>,
    /// `mk <= upper_constant * d` must hold.
    pub upper_constant: f64,
    /// `mk >= lower_constant * d` must hold.
    pub lower_constant: f64,
    /// `max |mk - d| / d`.
    pub max_relative_defect: f64,
    pub upper_violations: usize,
    pub lower_violations: usize,
}

impl EmbedReport {
    pub fn ok(&self) -> bool {
        self.upper_violations == 0 && self.lower_violations == 0
    }
}

/// `sum |mu(e_kpp)| + sqrt 2 * sum_{p != q} |mu(e_kpq)|`: each real
/// coordinate of a difference moves by at most `d`, so an off-diagonal
/// complex entry moves by at most `sqrt 2 d`.
pub fn lipschitz_upper_constant(mu: &AlgState, algebra: &Algebra) -> f64 {
    let mut total = 0.0;
    for (k, &m) in algebra.blocks().iter().enumerate() {
        for p in 0..m {
            for q in 0..m {
                let v = mu.unit_value(k, p, q).norm();
                total += if p == q { v } else { SQRT_2 * v };
            }
        }
    }
    total
}

/// Guaranteed `mk(mu_x, mu_y) >= c d(x, y)`, from scalar test functions.
pub fn lipschitz_lower_constant(spec: &SeminormSpec, space: &FiniteMetricSpace) -> f64 {
    let diam = space.diameter();
    let inv = |t: f64| if t <= 1.0 { 1.0 } else { 1.0 / t };
    match spec.q {
        QTerm::PointwiseQuotient => 1.0,
        QTerm::ScalarQuotient | QTerm::RealQuotient => inv(diam),
        QTerm::StateCentered(_) => inv(2.0 * diam),
        QTerm::ScaledRealQuotient(k) => {
            if diam == 0.0 {
                1.0
            } else {
                (k / diam).min(1.0)
            }
        }
    }
}

/// Compare `x -> mu o ev_x` with the metric for every pair of points.
pub fn embed_check(program: &MkProgram, mu: &AlgState) -> Result<EmbedReport> {
    if !program.is_exact() {
        return Err(Error::Precondition("embed_check needs an exact (real max) seminorm".into()));
    }
    mu.validate(&program.algebra, &program.tol)?;
    let n = program.space.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let run = |&(x, y): &(usize, usize)| -> Result<EmbedPair> {
        let r = program.distance(&FunctionalState::delta(mu.clone(), x), &FunctionalState::delta(mu.clone(), y))?;
        Ok(EmbedPair { x, y, distance: program.space.d(x, y), mk: r.value() })
    };
    let pairs: Vec<EmbedPair> = if program.options.parallel {
        pairs.par_iter().map(run).collect::<Result<_>>()?
    } else {
        pairs.iter().map(run).collect::<Result<_>>()?
    };
    let upper = lipschitz_upper_constant(mu, &program.algebra);
    let lower = lipschitz_lower_constant(&program.spec, &program.space);
    let t = program.tol.lp;
    Ok(EmbedReport {
        max_relative_defect: pairs.iter().map(|p| (p.mk - p.distance).abs() / p.distance).fold(0.0, f64::max),
        upper_violations: pairs.iter().filter(|p| p.mk > upper * p.distance + t).count(),
        lower_violations: pairs.iter().filter(|p| p.mk < lower * p.distance - t).count(),
        upper_constant: upper,
        lower_constant: lower,
        pairs,
    })
}
