//! Lipschitz extension of real functions from a subset of a finite metric
//! space, preserving both the Lipschitz constant and the range.
//!
//! ```
//! use qmetric::mcshane::ExtensionProblem;
//! use qmetric::metric::FiniteMetricSpace;
//! use qmetric::Tolerances;
//!
//! let line = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
//! let p = ExtensionProblem::new(line, vec![0, 2], vec![0.0, 2.0], 1.0);
//! assert_eq!(p.extend(&Tolerances::default()).unwrap(), vec![0.0, 1.0, 2.0]);
//! ```
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::tol::Tolerances;

/// Values on a subset of a space, to be extended with Lipschitz bound `lip_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionProblem {
    pub space: FiniteMetricSpace,
    pub subset: Vec<usize>,
    pub values: Vec<f64>,
    pub lip_bound: f64,
}

impl ExtensionProblem {
    pub fn new(space: FiniteMetricSpace, subset: Vec<usize>, values: Vec<f64>, lip_bound: f64) -> Self {
        ExtensionProblem { space, subset, values, lip_bound }
    }

    fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.subset.is_empty() {
            return Err(Error::Precondition("the subset is empty".into()));
        }
        if self.subset.len() != self.values.len() {
            return Err(Error::Shape(format!("{} values for {} subset points", self.values.len(), self.subset.len())));
        }
        if !(self.lip_bound >= 0.0 && self.lip_bound.is_finite()) {
            return Err(Error::Precondition(format!("Lipschitz bound must be nonnegative, got {}", self.lip_bound)));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("value {v} is not finite")));
        }
        let n = self.space.len();
        let mut seen = vec![false; n];
        for &s in &self.subset {
            if s >= n {
                return Err(Error::Index(format!("subset point {s} of {n}")));
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::Precondition(format!("subset point {s} listed twice")));
            }
        }
        for i in 0..self.subset.len() {
            for j in i + 1..self.subset.len() {
                let (si, sj) = (self.subset[i], self.subset[j]);
                let gap = (self.values[i] - self.values[j]).abs();
                let allowed = self.lip_bound * self.space.d(si, sj);
                if gap > allowed + tol.sa {
                    return Err(Error::Precondition(format!(
                        "values are not {}-Lipschitz: points {si} and {sj} differ by {gap} over distance {}",
                        self.lip_bound,
                        self.space.d(si, sj)
                    )));
                }
            }
        }
        Ok(())
    }

    /// `z -> clamp(min_y f(y) + K d(z, y), [min f, max f])`, with subset
    /// points keeping their input values exactly.
    pub fn extend(&self, tol: &Tolerances) -> Result<Vec<f64>> {
        self.validate(tol)?;
        Ok(inf_convolution(&self.space, &self.subset, &self.values, self.lip_bound))
    }
}

/// The unchecked extension formula; `dist` gives distances on the whole space.
pub(crate) fn inf_convolution_matrix(dist: &[Vec<f64>], subset: &[usize], values: &[f64], k: f64) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = (0..dist.len())
        .map(|z| {
            subset
                .iter()
                .zip(values)
                .map(|(&y, &f)| f + k * dist[z][y])
                .fold(f64::INFINITY, f64::min)
                .clamp(lo, hi)
        })
        .collect();
    for (&s, &v) in subset.iter().zip(values) {
        out[s] = v;
    }
    out
}

fn inf_convolution(space: &FiniteMetricSpace, subset: &[usize], values: &[f64], k: f64) -> Vec<f64> {
    inf_convolution_matrix(space.matrix(), subset, values, k)
}
