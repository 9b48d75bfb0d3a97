//! States on a block algebra: block weights plus one density matrix per block.
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{AlgElement, Algebra, CMat};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// `a -> sum_k t_k tr(rho_k a_k)` with `t` a probability vector and each
/// `rho_k` a density matrix.
///
/// ```
/// use qmetric::algebra::{Algebra, AlgState};
/// use qmetric::Tolerances;
///
/// let alg = Algebra::new(vec![2, 3]).unwrap();
/// let tr = AlgState::tracial(&alg, &[0.25, 0.75], &Tolerances::default()).unwrap();
/// assert!((tr.k_mu() - 1.0).abs() < 1e-15);
/// assert!((tr.apply(&alg.identity()).unwrap().re - 1.0).abs() < 1e-15);
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgState {
    weights: Vec<f64>,
    densities: Vec<CMat>,
}

impl AlgState {
    /// Build and validate against `alg`.
    pub fn new(alg: &Algebra, weights: Vec<f64>, densities: Vec<CMat>, tol: &Tolerances) -> Result<Self> {
        let s = AlgState { weights, densities };
        s.validate(alg, tol)?;
        Ok(s)
    }

    /// The weighted normalized trace `sum_k v_k tr_{m_k}`.
    pub fn tracial(alg: &Algebra, v: &[f64], tol: &Tolerances) -> Result<Self> {
        let densities = alg
            .blocks()
            .iter()
            .map(|&m| CMat::identity(m).scale(C64::new(1.0 / m as f64, 0.0)))
            .collect();
        Self::new(alg, v.to_vec(), densities, tol)
    }

    /// Vector state `a -> <v, a_k v>` on block `k`; `v` is normalized here.
    pub fn vector(alg: &Algebra, k: usize, v: &[C64], tol: &Tolerances) -> Result<Self> {
        let m = *alg.blocks().get(k).ok_or_else(|| Error::Index(format!("block {k}")))?;
        if v.len() != m {
            return Err(Error::Shape(format!("vector of length {} for a {m}x{m} block", v.len())));
        }
        let len = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if len == 0.0 {
            return Err(Error::State("zero vector".into()));
        }
        let mut weights = vec![0.0; alg.block_count()];
        weights[k] = 1.0;
        let mut densities: Vec<CMat> = alg.blocks().iter().map(|&m| CMat::identity(m).scale(C64::new(1.0 / m as f64, 0.0))).collect();
        let mut rho = CMat::zeros(m);
        for p in 0..m {
            for q in 0..m {
                rho.set(p, q, v[p] * v[q].conj() / (len * len));
            }
        }
        densities[k] = rho;
        Self::new(alg, weights, densities, tol)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn densities(&self) -> &[CMat] {
        &self.densities
    }

    /// Check weights, trace, hermiticity and positivity against `alg`.
    pub fn validate(&self, alg: &Algebra, tol: &Tolerances) -> Result<()> {
        let n = alg.block_count();
        if self.weights.len() != n || self.densities.len() != n {
            return Err(Error::Shape(format!(
                "state has {} weights and {} densities for {n} blocks",
                self.weights.len(),
                self.densities.len()
            )));
        }
        for (k, (rho, &m)) in self.densities.iter().zip(alg.blocks()).enumerate() {
            if rho.dim() != m {
                return Err(Error::Shape(format!("density {k} is {0}x{0}, expected {m}x{m}", rho.dim())));
            }
        }
        if let Some(k) = self.weights.iter().position(|w| !w.is_finite() || *w < -tol.state) {
            return Err(Error::State(format!("weight {k} is negative or not finite")));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > tol.state {
            return Err(Error::State(format!("weights sum to {total}, not 1")));
        }
        for (k, rho) in self.densities.iter().enumerate() {
            if rho.hermitian_defect() > tol.state {
                return Err(Error::State(format!("density {k} is not Hermitian")));
            }
            let tr = rho.trace();
            if (tr.re - 1.0).abs() > tol.state || tr.im.abs() > tol.state {
                return Err(Error::State(format!("density {k} has trace {tr}, not 1")));
            }
            let low = rho.hermitian_eigenvalues(tol.eig)[0];
            if low < -tol.state {
                return Err(Error::State(format!("density {k} has eigenvalue {low:.3e} < 0")));
            }
        }
        Ok(())
    }

    /// `sum_k t_k tr(rho_k a_k)`.
    pub fn apply(&self, a: &AlgElement) -> Result<C64> {
        if a.shape() != self.densities.iter().map(CMat::dim).collect::<Vec<_>>() {
            return Err(Error::Shape(format!("state on {:?} applied to element of shape {:?}", self.shape(), a.shape())));
        }
        let mut acc = C64::new(0.0, 0.0);
        for ((&t, rho), blk) in self.weights.iter().zip(&self.densities).zip(a.blocks()) {
            acc += rho.mul(blk).trace() * t;
        }
        Ok(acc)
    }

    /// Value on the matrix unit `e_{k,(p,q)}`, i.e. `t_k rho_k[q][p]`.
    pub fn unit_value(&self, k: usize, p: usize, q: usize) -> C64 {
        self.densities[k].get(q, p) * self.weights[k]
    }

    /// Sum of `|value|` over every matrix unit.
    pub fn k_mu(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.densities)
            .map(|(&t, rho)| t.abs() * rho.entries().iter().map(|z| z.norm()).sum::<f64>())
            .sum()
    }

    fn shape(&self) -> Vec<usize> {
        self.densities.iter().map(CMat::dim).collect()
    }
}
