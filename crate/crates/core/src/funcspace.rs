//! Matrix-valued functions on a finite metric space and their Lipschitz
//! seminorms.
//!
//! A seminorm is the larger of a Lipschitz part, the best constant for
//! `||a(x) - a(y)|| <= L d(x, y)` in a chosen algebra norm, and a quotient
//! part that measures how far `a` is from some family of "constant"
//! elements. See [`QTerm`] for the available quotient parts.
//!
//! ```
//! use qmetric::algebra::{Algebra, NormKind};
//! use qmetric::funcspace::{classical_embed, lipnorm, QTerm, SeminormSpec};
//! use qmetric::metric::FiniteMetricSpace;
//! use qmetric::Tolerances;
//!
//! let tol = Tolerances::default();
//! let space = FiniteMetricSpace::line(&[0.0, 1.0]).unwrap();
//! let f = classical_embed(&space, &Algebra::scalars(), &[0.0, 3.0]);
//! let spec = SeminormSpec::new(NormKind::Operator, QTerm::PointwiseQuotient).unwrap();
//! assert_eq!(lipnorm(&f, &spec, &tol).unwrap(), 3.0);
//! let spec = SeminormSpec::new(NormKind::RealMax, QTerm::ScalarQuotient).unwrap();
//! assert_eq!(lipnorm(&f, &spec, &tol).unwrap(), 3.0);
//! ```
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{pooled_dist_to_scalars, AlgElement, Algebra, NormKind};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::states::FunctionalState;
use crate::tol::Tolerances;

/// A function from the points of a finite metric space into an algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionRepr", into = "FunctionRepr")]
pub struct MatrixFunction {
    space: FiniteMetricSpace,
    algebra: Algebra,
    values: Vec<AlgElement>,
}

#[derive(Serialize, Deserialize)]
struct FunctionRepr {
    space: FiniteMetricSpace,
    algebra: Algebra,
    values: Vec<AlgElement>,
}

impl TryFrom<FunctionRepr> for MatrixFunction {
    type Error = Error;
    fn try_from(r: FunctionRepr) -> Result<Self> {
        MatrixFunction::new(r.space, r.algebra, r.values)
    }
}

impl From<MatrixFunction> for FunctionRepr {
    fn from(f: MatrixFunction) -> Self {
        FunctionRepr { space: f.space, algebra: f.algebra, values: f.values }
    }
}

impl MatrixFunction {
    pub fn new(space: FiniteMetricSpace, algebra: Algebra, values: Vec<AlgElement>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Shape(format!("{} values for {} points", values.len(), space.len())));
        }
        for (i, v) in values.iter().enumerate() {
            algebra.check(v).map_err(|e| Error::Shape(format!("value at point {i}: {e}")))?;
        }
        Ok(MatrixFunction { space, algebra, values })
    }

    pub fn constant(space: &FiniteMetricSpace, algebra: &Algebra, value: AlgElement) -> Self {
        MatrixFunction { space: space.clone(), algebra: algebra.clone(), values: vec![value; space.len()] }
    }

    /// Build from a closure of the point index. Panics if the closure
    /// returns elements of the wrong shape.
    pub fn from_fn(space: &FiniteMetricSpace, algebra: &Algebra, f: impl Fn(usize) -> AlgElement) -> Self {
        Self::new(space.clone(), algebra.clone(), (0..space.len()).map(f).collect()).expect("closure values match the algebra")
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn values(&self) -> &[AlgElement] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &AlgElement {
        &self.values[x]
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.is_self_adjoint(tol))
    }

    fn require_self_adjoint(&self, tol: f64, what: &str) -> Result<()> {
        for (i, v) in self.values.iter().enumerate() {
            v.require_self_adjoint(tol, &format!("{what} (point {i})"))?;
        }
        Ok(())
    }

    fn same_domain(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.algebra != other.algebra {
            return Err(Error::Shape("functions live on different spaces or algebras".into()));
        }
        Ok(())
    }

    fn pointwise(&self, other: &Self, f: impl Fn(&AlgElement, &AlgElement) -> AlgElement) -> Result<Self> {
        self.same_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(MatrixFunction { space: self.space.clone(), algebra: self.algebra.clone(), values })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.pointwise(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.pointwise(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.pointwise(other, |a, b| a * b)
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v.scale(s))
    }

    pub fn map(&self, f: impl Fn(&AlgElement) -> AlgElement) -> Self {
        MatrixFunction { space: self.space.clone(), algebra: self.algebra.clone(), values: self.values.iter().map(f).collect() }
    }

    /// The C*-norm: `max_x ||a(x)||_op`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(AlgElement::op_norm).fold(0.0, f64::max)
    }
}

/// The quotient part of a seminorm.
#[derive(Debug, Clone, PartialEq)]
pub enum QTerm {
    /// Distance to functions whose every value is a scalar multiple of the
    /// unit; on a finite space this is `max_x dist(a(x), C 1)`.
    PointwiseQuotient,
    /// Distance to the constant scalar functions: one scalar for all points.
    ScalarQuotient,
    /// `max_x || a(x) - mu(a) 1 ||` for a fixed state `mu`.
    StateCentered(FunctionalState),
    /// Distance to a real constant in the real max norm, whatever the
    /// Lipschitz norm is: `inf_r max_x ||a(x) - r 1||` entrywise.
    RealQuotient,
    /// [`QTerm::RealQuotient`] multiplied by `2 / K`.
    ScaledRealQuotient(f64),
}

impl QTerm {
    /// Short name used in reports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            QTerm::PointwiseQuotient => "cx",
            QTerm::ScalarQuotient => "c",
            QTerm::StateCentered(_) => "state",
            QTerm::RealQuotient => "conv",
            QTerm::ScaledRealQuotient(_) => "convk",
        }
    }

    /// Whether the term is measured in the real max norm regardless of the
    /// chosen Lipschitz norm.
    pub fn is_real_quotient(&self) -> bool {
        matches!(self, QTerm::RealQuotient | QTerm::ScaledRealQuotient(_))
    }
}

/// A Lipschitz norm kind together with a quotient part.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormSpec {
    pub norm: NormKind,
    pub q: QTerm,
}

impl SeminormSpec {
    pub fn new(norm: NormKind, q: QTerm) -> Result<Self> {
        if let QTerm::ScaledRealQuotient(k) = q {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Precondition(format!("K must be positive, got {k}")));
            }
        }
        Ok(SeminormSpec { norm, q })
    }

    /// The seminorm used for the convergence results: real max norm with
    /// the real quotient.
    pub fn conv() -> Self {
        SeminormSpec { norm: NormKind::RealMax, q: QTerm::RealQuotient }
    }

    /// Whether the unit ball is cut out by linear inequalities, so
    /// distances can be computed exactly by linear programming.
    pub fn is_lp_exact(&self) -> bool {
        self.norm == NormKind::RealMax
    }

    /// Whether only self-adjoint functions are admissible.
    pub fn requires_self_adjoint(&self) -> bool {
        self.norm.requires_self_adjoint() || self.q.is_real_quotient()
    }
}

/// `max_{x != y} ||a(x) - a(y)|| / d(x, y)`; 0 on a one-point space.
pub fn lip_part(a: &MatrixFunction, norm: NormKind, tol: &Tolerances) -> Result<f64> {
    if norm.requires_self_adjoint() {
        a.require_self_adjoint(tol.sa, "the real max norm")?;
    }
    let n = a.values.len();
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let diff = &a.values[i] - &a.values[j];
            let v = match norm {
                NormKind::Operator => diff.op_norm_with(tol.eig),
                NormKind::Max => diff.max_norm(),
                NormKind::RealMax => diff.entrywise_real_max(),
            };
            best = best.max(v / a.space.d(i, j));
        }
    }
    Ok(best)
}

/// The quotient part of `spec` evaluated at `a`.
pub fn q_term(a: &MatrixFunction, spec: &SeminormSpec, tol: &Tolerances) -> Result<f64> {
    match &spec.q {
        QTerm::PointwiseQuotient => {
            let mut best: f64 = 0.0;
            for v in &a.values {
                best = best.max(v.dist_to_scalars(spec.norm, tol)?);
            }
            Ok(best)
        }
        QTerm::ScalarQuotient => pooled_dist_to_scalars(&a.values, spec.norm, tol),
        QTerm::StateCentered(mu) => {
            if spec.norm.requires_self_adjoint() {
                a.require_self_adjoint(tol.sa, "the real max norm")?;
            }
            mu.validate(a.space.len(), &a.algebra, tol)?;
            let center = mu.evaluate(a)?;
            let mut best: f64 = 0.0;
            for v in &a.values {
                let shifted = v.shift(center);
                let n = match spec.norm {
                    NormKind::Operator => shifted.op_norm_with(tol.eig),
                    NormKind::Max => shifted.max_norm(),
                    NormKind::RealMax => shifted.entrywise_real_max(),
                };
                best = best.max(n);
            }
            Ok(best)
        }
        QTerm::RealQuotient => real_quotient(a, tol),
        QTerm::ScaledRealQuotient(k) => Ok(2.0 / k * real_quotient(a, tol)?),
    }
}

fn real_quotient(a: &MatrixFunction, tol: &Tolerances) -> Result<f64> {
    a.require_self_adjoint(tol.sa, "the real quotient")?;
    pooled_dist_to_scalars(&a.values, NormKind::RealMax, tol)
}

/// `max(lip_part, q_term)`.
pub fn lipnorm(a: &MatrixFunction, spec: &SeminormSpec, tol: &Tolerances) -> Result<f64> {
    Ok(lip_part(a, spec.norm, tol)?.max(q_term(a, spec, tol)?))
}

/// `x -> f(x) 1_A`.
pub fn classical_embed(space: &FiniteMetricSpace, alg: &Algebra, f: &[f64]) -> MatrixFunction {
    assert_eq!(f.len(), space.len(), "one value per point");
    MatrixFunction::from_fn(space, alg, |x| alg.scalar(C64::new(f[x], 0.0)))
}

/// Complex-valued version of [`classical_embed`].
pub fn classical_embed_complex(space: &FiniteMetricSpace, alg: &Algebra, f: &[C64]) -> MatrixFunction {
    assert_eq!(f.len(), space.len(), "one value per point");
    MatrixFunction::from_fn(space, alg, |x| alg.scalar(f[x]))
}

/// Both sides of the quasi-Leibniz inequality for one pair of functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeibnizReport {
    /// Seminorm of the Jordan product `(ab + ba) / 2`.
    pub jordan: f64,
    /// Seminorm of the Lie product `(ab - ba) / 2i`.
    pub lie: f64,
    /// `C (||a|| L(b) + ||b|| L(a)) + D L(a) L(b)`.
    pub bound: f64,
    /// `bound - max(jordan, lie)`.
    pub slack: f64,
    pub violated: bool,
}

/// Evaluate `max(L(a o b), L({a, b})) <= C (||a|| L(b) + ||b|| L(a)) + D L(a) L(b)`
/// with `||.||` the sup of operator norms.
pub fn quasi_leibniz_check(
    a: &MatrixFunction,
    b: &MatrixFunction,
    spec: &SeminormSpec,
    c: f64,
    d: f64,
    tol: &Tolerances,
) -> Result<LeibnizReport> {
    a.require_self_adjoint(tol.sa, "the quasi-Leibniz check")?;
    b.require_self_adjoint(tol.sa, "the quasi-Leibniz check")?;
    let ab = a.try_mul(b)?;
    let ba = b.try_mul(a)?;
    let jordan = ab.try_add(&ba)?.scale(C64::new(0.5, 0.0));
    let lie = ab.try_sub(&ba)?.scale(C64::new(0.0, -0.5));
    let (la, lb) = (lipnorm(a, spec, tol)?, lipnorm(b, spec, tol)?);
    let bound = c * (a.sup_norm() * lb + b.sup_norm() * la) + d * la * lb;
    let jordan = lipnorm(&jordan, spec, tol)?;
    let lie = lipnorm(&lie, spec, tol)?;
    let slack = bound - jordan.max(lie);
    Ok(LeibnizReport { jordan, lie, bound, slack, violated: slack < -tol.leibniz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CMat;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn constants_have_zero_lip_part() {
        let space = FiniteMetricSpace::circle_chord(5).unwrap();
        let alg = Algebra::new(vec![2, 1]).unwrap();
        let a = MatrixFunction::constant(&space, &alg, alg.matrix_unit(0, 0, 1).unwrap());
        assert_eq!(lip_part(&a, NormKind::Operator, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn two_point_examples() {
        let space = FiniteMetricSpace::line(&[0.0, 2.0]).unwrap();
        let alg = Algebra::new(vec![2]).unwrap();
        let flip = &alg.matrix_unit(0, 0, 1).unwrap() + &alg.matrix_unit(0, 1, 0).unwrap();
        let a = MatrixFunction::new(space, alg.clone(), vec![alg.zero(), flip]).unwrap();
        assert!((lip_part(&a, NormKind::Operator, &tol()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(lip_part(&a, NormKind::RealMax, &tol()).unwrap(), 0.5);
    }

    #[test]
    fn single_point_conv() {
        let space = FiniteMetricSpace::point();
        let alg = Algebra::new(vec![2]).unwrap();
        let v = CMat::from_rows(vec![
            vec![C64::new(0.0, 0.0), C64::new(1.0, 1.0)],
            vec![C64::new(1.0, -1.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let a = MatrixFunction::new(space, alg.clone(), vec![alg.element(vec![v]).unwrap()]).unwrap();
        assert_eq!(q_term(&a, &SeminormSpec::conv(), &tol()).unwrap(), 1.0);
        assert_eq!(lip_part(&a, NormKind::RealMax, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn scalar_quotient_midpoint() {
        let space = FiniteMetricSpace::line(&[0.0, 1.0]).unwrap();
        let f = classical_embed(&space, &Algebra::scalars(), &[0.0, 3.0]);
        for norm in [NormKind::Operator, NormKind::Max, NormKind::RealMax] {
            let spec = SeminormSpec::new(norm, QTerm::ScalarQuotient).unwrap();
            assert!((q_term(&f, &spec, &tol()).unwrap() - 1.5).abs() < 1e-15);
            let spec = SeminormSpec::new(norm, QTerm::PointwiseQuotient).unwrap();
            assert_eq!(q_term(&f, &spec, &tol()).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_has_zero_seminorm() {
        let space = FiniteMetricSpace::interval(4).unwrap();
        let alg = Algebra::new(vec![2, 3]).unwrap();
        let one = MatrixFunction::constant(&space, &alg, alg.identity());
        let mu = FunctionalState::tracial(&alg, &[0.5, 0.5], 2, &tol()).unwrap();
        for q in [
            QTerm::PointwiseQuotient,
            QTerm::ScalarQuotient,
            QTerm::StateCentered(mu),
            QTerm::RealQuotient,
            QTerm::ScaledRealQuotient(0.7),
        ] {
            for norm in [NormKind::Operator, NormKind::Max, NormKind::RealMax] {
                let spec = SeminormSpec::new(norm, q.clone()).unwrap();
                assert!(lipnorm(&one, &spec, &tol()).unwrap() < 1e-14, "{spec:?}");
            }
        }
    }

    #[test]
    fn bad_k_rejected() {
        assert!(SeminormSpec::new(NormKind::RealMax, QTerm::ScaledRealQuotient(0.0)).is_err());
    }

    #[test]
    fn leibniz_identity() {
        let space = FiniteMetricSpace::interval(3).unwrap();
        let alg = Algebra::new(vec![2]).unwrap();
        let one = MatrixFunction::constant(&space, &alg, alg.identity());
        let r = quasi_leibniz_check(&one, &one, &SeminormSpec::conv(), 1.0, 0.0, &tol()).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(!r.violated);
    }
}
