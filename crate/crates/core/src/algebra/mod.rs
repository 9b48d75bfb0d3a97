//! Finite-dimensional C*-algebras `M_{m_0}(C) + ... + M_{m_n}(C)`.
//!
//! An [`Algebra`] is its list of block sizes. An [`AlgElement`] holds one
//! square complex matrix per block. Three norms are provided: the operator
//! (C*) norm, the entrywise max-modulus norm, and the "real max" norm
//! `max(|Re|, |Im|)` over entries, which is a norm on self-adjoint elements.
//!
//! ```
//! use qmetric::algebra::{Algebra, NormKind};
//! use qmetric::Tolerances;
//!
//! let alg = Algebra::new(vec![2, 3]).unwrap();
//! let one = alg.identity();
//! assert_eq!(one.op_norm(), 1.0);
//! assert_eq!(one.max_norm(), 1.0);
//! let e = alg.matrix_unit(1, 2, 0).unwrap();
//! assert_eq!(e.op_norm(), 1.0);
//! assert_eq!(one.dist_to_scalars(NormKind::RealMax, &Tolerances::default()).unwrap(), 0.0);
//! ```
mod enclosing;
mod matrix;
mod state;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use enclosing::min_enclosing_radius;
pub use matrix::CMat;
pub use state::AlgState;

use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Which norm on the algebra a computation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// The C*-norm: largest singular value.
    Operator,
    /// Largest entry modulus.
    Max,
    /// Largest `|Re|` or `|Im|` over entries; self-adjoint elements only.
    RealMax,
}

impl NormKind {
    pub fn requires_self_adjoint(self) -> bool {
        matches!(self, NormKind::RealMax)
    }
}

/// Block structure of a direct sum of full matrix algebras.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr", into = "AlgebraRepr")]
pub struct Algebra {
    blocks: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraRepr {
    blocks: Vec<usize>,
}

impl TryFrom<AlgebraRepr> for Algebra {
    type Error = Error;
    fn try_from(r: AlgebraRepr) -> Result<Self> {
        Algebra::new(r.blocks)
    }
}

impl From<Algebra> for AlgebraRepr {
    fn from(a: Algebra) -> Self {
        AlgebraRepr { blocks: a.blocks }
    }
}

impl Algebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Shape("an algebra needs at least one block".into()));
        }
        if let Some(k) = blocks.iter().position(|&m| m == 0) {
            return Err(Error::Shape(format!("block {k} has size 0")));
        }
        Ok(Algebra { blocks })
    }

    /// The complex numbers, as `M_1(C)`.
    pub fn scalars() -> Self {
        Algebra { blocks: vec![1] }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Largest block size (`m_A`).
    pub fn max_block(&self) -> usize {
        *self.blocks.iter().max().expect("non-empty")
    }

    /// Sum of block sizes, i.e. the number of diagonal entries.
    pub fn total_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().map(|&m| CMat::zeros(m)).collect() }
    }

    pub fn identity(&self) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().map(|&m| CMat::identity(m)).collect() }
    }

    pub fn scalar(&self, c: C64) -> AlgElement {
        AlgElement { blocks: self.blocks.iter().map(|&m| CMat::identity(m).scale(c)).collect() }
    }

    /// The element with a single 1 at row `p`, column `q` of block `k`.
    /// All indices are zero-based.
    pub fn matrix_unit(&self, k: usize, p: usize, q: usize) -> Result<AlgElement> {
        let m = *self
            .blocks
            .get(k)
            .ok_or_else(|| Error::Index(format!("block {k} of {}", self.blocks.len())))?;
        if p >= m || q >= m {
            return Err(Error::Index(format!("entry ({p},{q}) of a {m}x{m} block")));
        }
        let mut e = self.zero();
        e.blocks[k].set(p, q, C64::new(1.0, 0.0));
        Ok(e)
    }

    /// Confirm that `a` has this block structure.
    pub fn check(&self, a: &AlgElement) -> Result<()> {
        if a.blocks.len() != self.blocks.len() {
            return Err(Error::Shape(format!(
                "element has {} blocks, algebra has {}",
                a.blocks.len(),
                self.blocks.len()
            )));
        }
        for (k, (b, &m)) in a.blocks.iter().zip(&self.blocks).enumerate() {
            if b.dim() != m {
                return Err(Error::Shape(format!("block {k} is {0}x{0}, expected {m}x{m}", b.dim())));
            }
        }
        Ok(())
    }

    /// Build an element from its blocks, checking the shape.
    pub fn element(&self, blocks: Vec<CMat>) -> Result<AlgElement> {
        let a = AlgElement { blocks };
        self.check(&a)?;
        Ok(a)
    }
}

/// An element of an [`Algebra`]: one square matrix per block.
///
/// JSON form is a list of blocks, each a list of rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlgElement {
    blocks: Vec<CMat>,
}

impl AlgElement {
    /// Wrap blocks without checking them against an algebra.
    pub fn from_blocks(blocks: Vec<CMat>) -> Self {
        AlgElement { blocks }
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.blocks.iter().map(CMat::dim).collect()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::Shape(format!("block sizes {:?} vs {:?}", self.shape(), other.shape())))
        }
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Result<Self> {
        self.same_shape(other)?;
        Ok(AlgElement { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, CMat::add)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, CMat::sub)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.zip_blocks(other, CMat::mul)
    }

    pub fn scale(&self, s: C64) -> Self {
        AlgElement { blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self - c * 1`.
    pub fn shift(&self, c: C64) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            for i in 0..b.dim() {
                let v = b.get(i, i);
                b.set(i, i, v - c);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        AlgElement { blocks: self.blocks.iter().map(CMat::adjoint).collect() }
    }

    /// Largest `|a_ij - conj(a_ji)|` over all blocks.
    pub fn self_adjoint_defect(&self) -> f64 {
        self.blocks.iter().map(CMat::hermitian_defect).fold(0.0, f64::max)
    }

    /// Self-adjoint up to `tol` times `max(1, max_norm)`.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjoint_defect() <= tol * self.max_norm().max(1.0)
    }

    pub(crate) fn require_self_adjoint(&self, tol: f64, what: &str) -> Result<()> {
        if self.is_self_adjoint(tol) {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what} requires a self-adjoint element (defect {:.3e})",
                self.self_adjoint_defect()
            )))
        }
    }

    /// Largest singular value over all blocks.
    pub fn op_norm(&self) -> f64 {
        self.op_norm_with(Tolerances::default().eig)
    }

    /// [`op_norm`](Self::op_norm) with an explicit Jacobi tolerance.
    pub fn op_norm_with(&self, eig_tol: f64) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                if b.dim() == 1 {
                    return b.get(0, 0).norm();
                }
                let gram = b.adjoint().mul(b);
                let top = *largest(&gram.hermitian_eigenvalues(eig_tol));
                top.max(0.0).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.blocks.iter().map(CMat::max_modulus).fold(0.0, f64::max)
    }

    /// Largest `|Re|` or `|Im|` over entries; errors on non-self-adjoint input.
    pub fn real_max_norm(&self, tol: &Tolerances) -> Result<f64> {
        self.require_self_adjoint(tol.sa, "the real max norm")?;
        Ok(self.entrywise_real_max())
    }

    pub(crate) fn entrywise_real_max(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.entries().iter())
            .map(|z| z.re.abs().max(z.im.abs()))
            .fold(0.0, f64::max)
    }

    pub fn norm(&self, kind: NormKind, tol: &Tolerances) -> Result<f64> {
        match kind {
            NormKind::Operator => Ok(self.op_norm_with(tol.eig)),
            NormKind::Max => Ok(self.max_norm()),
            NormKind::RealMax => self.real_max_norm(tol),
        }
    }

    /// Eigenvalues of every block, pooled and sorted; for self-adjoint input.
    pub fn spectrum(&self, eig_tol: f64) -> Vec<f64> {
        let mut all: Vec<f64> = self.blocks.iter().flat_map(|b| b.hermitian_eigenvalues(eig_tol)).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Diagonal entries of every block, in block order.
    pub fn diagonal(&self) -> impl Iterator<Item = C64> + '_ {
        self.blocks.iter().flat_map(|b| (0..b.dim()).map(move |i| b.get(i, i)))
    }

    /// Off-diagonal entries of every block.
    pub fn off_diagonal(&self) -> impl Iterator<Item = C64> + '_ {
        self.blocks.iter().flat_map(|b| {
            let n = b.dim();
            (0..n).flat_map(move |r| (0..n).filter(move |&c| c != r).map(move |c| b.get(r, c)))
        })
    }

    /// Distance from `self` to the scalar multiples of the unit in the given norm.
    pub fn dist_to_scalars(&self, kind: NormKind, tol: &Tolerances) -> Result<f64> {
        pooled_dist_to_scalars(std::slice::from_ref(self), kind, tol)
    }
}

fn largest(v: &[f64]) -> &f64 {
    v.last().expect("non-empty spectrum")
}

/// `inf_lambda max_i || a_i - lambda 1 ||` for a common scalar `lambda`.
///
/// The operator case needs self-adjoint input and uses half the spread of
/// the joint spectrum. The max case takes the larger of the off-diagonal
/// max modulus and the enclosing radius of all diagonal entries. The real
/// max case needs self-adjoint input and uses half the spread of the real
/// diagonal.
pub fn pooled_dist_to_scalars(elems: &[AlgElement], kind: NormKind, tol: &Tolerances) -> Result<f64> {
    if elems.is_empty() {
        return Ok(0.0);
    }
    match kind {
        NormKind::Operator => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for a in elems {
                a.require_self_adjoint(tol.sa, "operator-norm distance to scalars")?;
                let s = a.spectrum(tol.eig);
                lo = lo.min(s[0]);
                hi = hi.max(*largest(&s));
            }
            Ok((hi - lo) / 2.0)
        }
        NormKind::Max => {
            let off = elems.iter().flat_map(|a| a.off_diagonal()).map(|z| z.norm()).fold(0.0, f64::max);
            let diag: Vec<C64> = elems.iter().flat_map(|a| a.diagonal()).collect();
            Ok(off.max(min_enclosing_radius(&diag)))
        }
        NormKind::RealMax => {
            let mut off: f64 = 0.0;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for a in elems {
                a.require_self_adjoint(tol.sa, "real-max distance to scalars")?;
                off = off.max(a.off_diagonal().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max));
                for d in a.diagonal() {
                    lo = lo.min(d.re);
                    hi = hi.max(d.re);
                }
            }
            Ok(off.max((hi - lo) / 2.0))
        }
    }
}

impl Add for &AlgElement {
    type Output = AlgElement;
    /// Panics on mismatched shapes; use [`AlgElement::try_add`] to handle that.
    fn add(self, rhs: Self) -> AlgElement {
        self.try_add(rhs).expect("element shapes must agree")
    }
}

impl Sub for &AlgElement {
    type Output = AlgElement;
    fn sub(self, rhs: Self) -> AlgElement {
        self.try_sub(rhs).expect("element shapes must agree")
    }
}

impl Mul for &AlgElement {
    type Output = AlgElement;
    fn mul(self, rhs: Self) -> AlgElement {
        self.try_mul(rhs).expect("element shapes must agree")
    }
}
