//! Small dense complex square matrices.
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from rows; every row must have as many entries as there are rows.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Shape("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {dim}", row.len())));
            }
            data.extend(row);
        }
        Ok(CMat { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| C64::new(v, 0.0)).collect()).collect())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        CMat { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        CMat { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation `|a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// `(a + a*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// Eigenvalues of the Hermitian part, ascending, by cyclic complex Jacobi.
    ///
    /// Sweeps continue until the off-diagonal Frobenius mass drops below
    /// `rel_tol` times the total mass, then one more sweep is run; Jacobi
    /// converges quadratically so that final sweep lands near roundoff.
    pub fn hermitian_eigenvalues(&self, rel_tol: f64) -> Vec<f64> {
        let n = self.dim;
        let mut h = self.hermitian_part();
        let total = h.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut extra_sweeps = 1;
        if n > 1 && total > 0.0 {
            for _ in 0..64 {
                let off = off_diagonal_mass(&h);
                if off == 0.0 {
                    break;
                }
                if off <= rel_tol * total {
                    if extra_sweeps == 0 {
                        break;
                    }
                    extra_sweeps -= 1;
                }
                for p in 0..n {
                    for q in p + 1..n {
                        jacobi_rotate(&mut h, p, q);
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
        eig.sort_by(f64::total_cmp);
        eig
    }
}

fn off_diagonal_mass(h: &CMat) -> f64 {
    let n = h.dim;
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += h.get(r, c).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilate `h[p][q]` with the unitary `diag(1, e^{-i phi}) * R(c, s)` on
/// coordinates `(p, q)`, where `phi = arg h[p][q]`.
fn jacobi_rotate(h: &mut CMat, p: usize, q: usize) {
    let n = h.dim;
    let hpq = h.get(p, q);
    let mag = hpq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = hpq / mag; // e^{i phi}
    let app = h.get(p, p).re;
    let aqq = h.get(q, q).re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U columns p and q.
    let phase_conj = phase.conj();
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase_conj * (-s);
    let u_qq = phase_conj * c;
    // H <- H U
    for k in 0..n {
        let hkp = h.data[k * n + p];
        let hkq = h.data[k * n + q];
        h.data[k * n + p] = hkp * u_pp + hkq * u_qp;
        h.data[k * n + q] = hkp * u_pq + hkq * u_qq;
    }
    // H <- U* H
    for k in 0..n {
        let hpk = h.data[p * n + k];
        let hqk = h.data[q * n + k];
        h.data[p * n + k] = u_pp.conj() * hpk + u_qp.conj() * hqk;
        h.data[q * n + k] = u_pq.conj() * hpk + u_qq.conj() * hqk;
    }
    h.set(p, q, C64::new(0.0, 0.0));
    h.set(q, p, C64::new(0.0, 0.0));
    let dp = h.get(p, p).re;
    let dq = h.get(q, q).re;
    h.set(p, p, C64::new(dp, 0.0));
    h.set(q, q, C64::new(dq, 0.0));
}

/// JSON form: a list of rows, each a list of `[re, im]` pairs.
impl Serialize for CMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            self.data.chunks(self.dim).map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows = rows.into_iter().map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect()).collect();
        CMat::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
