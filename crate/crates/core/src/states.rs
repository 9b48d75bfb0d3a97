//! States on `C(X, A)` as convex combinations of point evaluations composed
//! with states of the algebra.
//!
//! ```
//! use qmetric::algebra::Algebra;
//! use qmetric::funcspace::MatrixFunction;
//! use qmetric::metric::FiniteMetricSpace;
//! use qmetric::states::FunctionalState;
//! use qmetric::Tolerances;
//!
//! let tol = Tolerances::default();
//! let space = FiniteMetricSpace::interval(3).unwrap();
//! let alg = Algebra::new(vec![2]).unwrap();
//! let s = FunctionalState::tracial(&alg, &[1.0], 1, &tol).unwrap();
//! let one = MatrixFunction::constant(&space, &alg, alg.identity());
//! assert!((s.evaluate(&one).unwrap().re - 1.0).abs() < 1e-15);
//! ```
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgState, Algebra, CMat};
use crate::error::{Error, Result};
use crate::funcspace::MatrixFunction;
use crate::metric::FiniteMetricSpace;
use crate::tol::Tolerances;

/// One term `weight * (phi evaluated at point)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTerm {
    pub weight: f64,
    pub point: usize,
    pub phi: AlgState,
}

/// A convex combination of product states `phi o ev_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalState {
    terms: Vec<StateTerm>,
}

impl FunctionalState {
    /// Validate the terms against a space and algebra.
    pub fn new(terms: Vec<StateTerm>, space: &FiniteMetricSpace, alg: &Algebra, tol: &Tolerances) -> Result<Self> {
        let s = FunctionalState { terms };
        s.validate(space.len(), alg, tol)?;
        Ok(s)
    }

    /// The single-term state `mu o ev_x`.
    pub fn delta(mu: AlgState, x: usize) -> Self {
        FunctionalState { terms: vec![StateTerm { weight: 1.0, point: x, phi: mu }] }
    }

    /// The weighted normalized trace evaluated at `x`.
    pub fn tracial(alg: &Algebra, v: &[f64], x: usize, tol: &Tolerances) -> Result<Self> {
        Ok(Self::delta(AlgState::tracial(alg, v, tol)?, x))
    }

    pub fn terms(&self) -> &[StateTerm] {
        &self.terms
    }

    pub fn validate(&self, n_points: usize, alg: &Algebra, tol: &Tolerances) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::State("a state needs at least one term".into()));
        }
        let mut total = 0.0;
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.weight >= -tol.state && t.weight <= 1.0 + tol.state) {
                return Err(Error::State(format!("term {i} has weight {} outside [0, 1]", t.weight)));
            }
            if t.point >= n_points {
                return Err(Error::Index(format!("term {i} refers to point {} of {n_points}", t.point)));
            }
            t.phi.validate(alg, tol)?;
            total += t.weight;
        }
        if (total - 1.0).abs() > tol.state {
            return Err(Error::State(format!("term weights sum to {total}, not 1")));
        }
        Ok(())
    }

    fn check_function(&self, a: &MatrixFunction) -> Result<()> {
        if let Some(t) = self.terms.iter().find(|t| t.point >= a.values().len()) {
            return Err(Error::Shape(format!("state refers to point {} of a {}-point function", t.point, a.values().len())));
        }
        Ok(())
    }

    /// `sum_terms weight * phi(a(point))`.
    pub fn evaluate(&self, a: &MatrixFunction) -> Result<C64> {
        self.check_function(a)?;
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            acc += t.phi.apply(a.value(t.point))? * t.weight;
        }
        Ok(acc)
    }

    /// The same value through matrix units: `sum phi(e_{k,(p,q)}) a^k_{p,q}(x)`.
    pub fn evaluate_by_units(&self, a: &MatrixFunction) -> Result<C64> {
        self.check_function(a)?;
        let alg = a.algebra();
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            if t.phi.weights().len() != alg.block_count() {
                return Err(Error::Shape("state and function use different algebras".into()));
            }
            let value = a.value(t.point);
            for (k, &m) in alg.blocks().iter().enumerate() {
                if t.phi.densities()[k].dim() != m {
                    return Err(Error::Shape(format!("block {k} size differs between state and function")));
                }
                for p in 0..m {
                    for q in 0..m {
                        acc += t.phi.unit_value(k, p, q) * value.block(k).get(p, q) * t.weight;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Per point and block, the matrix of values on matrix units:
    /// `out[x][k][(p,q)] = sum over terms at x of weight * phi(e_{k,(p,q)})`.
    pub fn unit_coefficients(&self, n_points: usize, alg: &Algebra) -> Vec<Vec<CMat>> {
        let mut out: Vec<Vec<CMat>> =
            (0..n_points).map(|_| alg.blocks().iter().map(|&m| CMat::zeros(m)).collect()).collect();
        for t in &self.terms {
            for (k, &m) in alg.blocks().iter().enumerate() {
                for p in 0..m {
                    for q in 0..m {
                        let cur = out[t.point][k].get(p, q);
                        out[t.point][k].set(p, q, cur + t.phi.unit_value(k, p, q) * t.weight);
                    }
                }
            }
        }
        out
    }

    /// JSON with point labels: `{"terms":[{"w":..,"x":"label","phi":..}]}`.
    pub fn to_json(&self, space: &FiniteMetricSpace) -> serde_json::Value {
        let terms = self
            .terms
            .iter()
            .map(|t| TermRepr { w: t.weight, x: PointRef::Label(space.labels()[t.point].clone()), phi: t.phi.clone() })
            .collect();
        serde_json::to_value(StateRepr { terms }).expect("state serializes")
    }

    /// Parse the JSON form; `x` may be a label or a zero-based index.
    pub fn from_json(value: &serde_json::Value, space: &FiniteMetricSpace, alg: &Algebra, tol: &Tolerances) -> Result<Self> {
        let repr: StateRepr =
            serde_json::from_value(value.clone()).map_err(|e| Error::Precondition(format!("state JSON: {e}")))?;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                let point = match t.x {
                    PointRef::Index(i) => i,
                    PointRef::Label(l) => {
                        space.index_of(&l).ok_or_else(|| Error::Index(format!("no point labelled `{l}`")))?
                    }
                };
                Ok(StateTerm { weight: t.w, point, phi: t.phi })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms, space, alg, tol)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    w: f64,
    x: PointRef,
    phi: AlgState,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRef {
    Index(usize),
    Label(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (FiniteMetricSpace, Algebra, Tolerances) {
        (FiniteMetricSpace::line(&[0.0, 1.0, 3.0]).unwrap(), Algebra::new(vec![1, 2]).unwrap(), Tolerances::default())
    }

    #[test]
    fn json_round_trip() {
        let (space, alg, tol) = setup();
        let s = FunctionalState::tracial(&alg, &[0.5, 0.5], 2, &tol).unwrap();
        let j = s.to_json(&space);
        assert_eq!(j["terms"][0]["x"], "2");
        let back = FunctionalState::from_json(&j, &space, &alg, &tol).unwrap();
        assert_eq!(back, s);
        let bad = serde_json::json!({"terms":[{"w":1.0,"x":"nope","phi":j["terms"][0]["phi"].clone()}]});
        assert!(FunctionalState::from_json(&bad, &space, &alg, &tol).is_err());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let (space, alg, tol) = setup();
        let phi = AlgState::tracial(&alg, &[1.0, 0.0], &tol).unwrap();
        let terms = vec![
            StateTerm { weight: 0.5, point: 0, phi: phi.clone() },
            StateTerm { weight: 0.4, point: 1, phi },
        ];
        assert!(matches!(FunctionalState::new(terms, &space, &alg, &tol), Err(Error::State(_))));
    }

    #[test]
    fn distinct_points_separate() {
        let (space, alg, tol) = setup();
        let a = MatrixFunction::from_fn(&space, &alg, |x| alg.scalar(C64::new(x as f64, 0.0)));
        let s0 = FunctionalState::tracial(&alg, &[0.3, 0.7], 0, &tol).unwrap();
        let s1 = FunctionalState::tracial(&alg, &[0.3, 0.7], 1, &tol).unwrap();
        assert!((s0.evaluate(&a).unwrap() - s1.evaluate(&a).unwrap()).norm() > 0.5);
    }
}
