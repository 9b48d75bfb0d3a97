//! Certified upper bounds on the propinquity between `C(X, A)` and
//! `C(Y, A)` for the real-max Lipschitz norm, through the bridge whose
//! pivot is the unit.
//!
//! The bound is `sqrt 2 * m_A * delta + eps / 2` where `delta` is the
//! Hausdorff distance between X and Y in a caller-supplied embedding. Unit
//! ball elements are sampled and matched across the bridge to produce
//! checkable certificates.
//!
//! ```
//! use qmetric::algebra::Algebra;
//! use qmetric::metric::FiniteMetricSpace;
//! use qmetric::propinquity::propinquity_upper_bound;
//! use qmetric::Tolerances;
//!
//! let tol = Tolerances::default();
//! let x = FiniteMetricSpace::circle_chord(4).unwrap();
//! let alg = Algebra::new(vec![2]).unwrap();
//! let b = propinquity_upper_bound(&x, &x, x.matrix(), 1e-3, &alg, 1, 7, &tol).unwrap();
//! assert_eq!(b.bound, 1e-3 / 2.0);
//! assert!(b.all_verified);
//! ```
use std::collections::HashMap;
use std::f64::consts::SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgElement, Algebra, CMat, NormKind};
use crate::error::{Error, Result};
use crate::funcspace::{lip_part, lipnorm, q_term, MatrixFunction, SeminormSpec};
use crate::mcshane::inf_convolution_matrix;
use crate::metric::{hausdorff_from_cross, FiniteMetricSpace, JoinedSpace};
use crate::mk::{MkOptions, MkProgram};
use crate::tol::Tolerances;

use num_complex::Complex64 as C64;

/// The joined space, the matching set W and the derived constants.
#[derive(Debug, Clone)]
pub struct Bridge {
    joined: JoinedSpace,
    /// Union distances without the offset, used for extensions.
    pseudo: Vec<Vec<f64>>,
    algebra: Algebra,
    epsilon: f64,
    delta: f64,
    threshold: f64,
    w_set: Vec<(usize, usize)>,
}

impl Bridge {
    /// Join X and Y with cross distances `cross + eps / (8 sqrt 2 m_A)` and
    /// collect `W = {(x, y) : d(x, y) <= delta + eps / (2 sqrt 2 m_A)}`.
    pub fn build(
        x: &FiniteMetricSpace,
        y: &FiniteMetricSpace,
        cross: &[Vec<f64>],
        epsilon: f64,
        algebra: &Algebra,
        tol: &Tolerances,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
        }
        let scale = SQRT_2 * algebra.max_block() as f64;
        let offset = epsilon / (8.0 * scale);
        let joined = JoinedSpace::new(x.clone(), y.clone(), cross.to_vec(), offset, tol)?;
        joined.to_space(tol)?;
        let pseudo = JoinedSpace::new(x.clone(), y.clone(), cross.to_vec(), 0.0, tol)?.matrix().to_vec();
        let delta = hausdorff_from_cross(cross);
        let threshold = delta + epsilon / (2.0 * scale);
        let mut w_set = Vec::new();
        for (i, row) in cross.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c + offset <= threshold {
                    w_set.push((i, j));
                }
            }
        }
        let mut seen_x = vec![false; x.len()];
        let mut seen_y = vec![false; y.len()];
        for &(i, j) in &w_set {
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if let Some(i) = seen_x.iter().position(|s| !s) {
            return Err(Error::Invariant(format!("point {i} of X has no partner in W")));
        }
        if let Some(j) = seen_y.iter().position(|s| !s) {
            return Err(Error::Invariant(format!("point {j} of Y has no partner in W")));
        }
        Ok(Bridge { joined, pseudo, algebra: algebra.clone(), epsilon, delta, threshold, w_set })
    }

    /// The same bridge seen from Y.
    pub fn reversed(&self, tol: &Tolerances) -> Result<Self> {
        let cross = self.joined.cross();
        let t: Vec<Vec<f64>> = (0..self.joined.y().len()).map(|j| cross.iter().map(|r| r[j]).collect()).collect();
        Bridge::build(self.joined.y(), self.joined.x(), &t, self.epsilon, &self.algebra, tol)
    }

    pub fn x(&self) -> &FiniteMetricSpace {
        self.joined.x()
    }

    pub fn y(&self) -> &FiniteMetricSpace {
        self.joined.y()
    }

    pub fn joined(&self) -> &JoinedSpace {
        &self.joined
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Hausdorff distance between X and Y for the raw cross distances.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `delta + eps / (2 sqrt 2 m_A)`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn w_set(&self) -> &[(usize, usize)] {
        &self.w_set
    }

    /// The pivot is the unit, so the height vanishes.
    pub fn height(&self) -> f64 {
        0.0
    }

    /// `sqrt 2 m_A delta + eps / 2`.
    pub fn bound(&self) -> f64 {
        SQRT_2 * self.algebra.max_block() as f64 * self.delta + self.epsilon / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    XToY,
    YToX,
}

/// What was checked when matching one unit-ball element across a bridge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchCertificate {
    pub direction: Direction,
    pub sample: usize,
    /// Seminorm of the input element.
    pub lipnorm_in: f64,
    /// Seminorm of the matched element.
    pub lipnorm_out: f64,
    /// Quotient part of the matched element measured against the input's
    /// optimal real scalar.
    pub q_at_input_center: f64,
    /// `max_{(x,y) in W}` of the real max norm of `a(x) - b(y)`.
    pub w_defect: f64,
    pub threshold: f64,
    /// Same maximum in the operator norm.
    pub cstar_defect: f64,
    /// `sqrt 2 m_A * w_defect`.
    pub cstar_bound: f64,
    pub verified: bool,
}

/// Extend the real and imaginary part of every entry of `a` from X to the
/// joined space, keeping the Lipschitz constant and range, then restrict to Y.
///
/// Extensions use the cross distances without the offset. They are still
/// K-Lipschitz on Y, and a point of Y at cross distance 0 from a point of X
/// receives exactly its value.
pub fn match_element(bridge: &Bridge, a: &MatrixFunction, tol: &Tolerances) -> Result<(MatrixFunction, MatchCertificate)> {
    if a.space().matrix() != bridge.x().matrix() || a.algebra() != &bridge.algebra {
        return Err(Error::Shape("function does not live on the bridge's X side".into()));
    }
    let spec = SeminormSpec::conv();
    let lipnorm_in = lipnorm(a, &spec, tol)?;
    if lipnorm_in > 1.0 + tol.lp {
        return Err(Error::Precondition(format!("element has seminorm {lipnorm_in} > 1")));
    }
    let k = lip_part(a, NormKind::RealMax, tol)?.max(1.0);
    let nx = bridge.x().len();
    let ny = bridge.y().len();
    let subset: Vec<usize> = (0..nx).collect();
    let dist = &bridge.pseudo;
    let extend = |vals: Vec<f64>| -> Vec<f64> { inf_convolution_matrix(dist, &subset, &vals, k)[nx..].to_vec() };

    let blocks = bridge.algebra.blocks();
    let mut mats: Vec<Vec<CMat>> = (0..ny).map(|_| blocks.iter().map(|&m| CMat::zeros(m)).collect()).collect();
    for (bk, &m) in blocks.iter().enumerate() {
        for p in 0..m {
            for q in p..m {
                let re = extend(a.values().iter().map(|v| v.block(bk).get(p, q).re).collect());
                let im = if p < q {
                    extend(a.values().iter().map(|v| v.block(bk).get(p, q).im).collect())
                } else {
                    vec![0.0; ny]
                };
                for y in 0..ny {
                    mats[y][bk].set(p, q, C64::new(re[y], im[y]));
                    mats[y][bk].set(q, p, C64::new(re[y], -im[y]));
                }
            }
        }
    }
    let b = MatrixFunction::new(
        bridge.y().clone(),
        bridge.algebra.clone(),
        mats.into_iter().map(AlgElement::from_blocks).collect(),
    )?;

    let lipnorm_out = lip_part(&b, NormKind::RealMax, tol)?.max(q_term(&b, &spec, tol)?);
    let (lo, hi) = a
        .values()
        .iter()
        .flat_map(|v| v.diagonal())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d.re), hi.max(d.re)));
    let center = C64::new((lo + hi) / 2.0, 0.0);
    let q_at_input_center = b.values().iter().map(|v| v.shift(center).entrywise_real_max()).fold(0.0, f64::max);
    let (mut w_defect, mut cstar_defect) = (0.0f64, 0.0f64);
    for &(x, y) in bridge.w_set() {
        let diff = a.value(x) - b.value(y);
        w_defect = w_defect.max(diff.entrywise_real_max());
        cstar_defect = cstar_defect.max(diff.op_norm_with(tol.eig));
    }
    let cstar_bound = SQRT_2 * bridge.algebra.max_block() as f64 * w_defect;
    let t = tol.lp;
    let verified = lipnorm_out <= 1.0 + t
        && q_at_input_center <= 1.0 + t
        && w_defect <= bridge.threshold + t
        && cstar_defect <= cstar_bound + t;
    let cert = MatchCertificate {
        direction: Direction::XToY,
        sample: 0,
        lipnorm_in,
        lipnorm_out,
        q_at_input_center,
        w_defect,
        threshold: bridge.threshold,
        cstar_defect,
        cstar_bound,
        verified,
    };
    Ok((b, cert))
}

/// The bound with its sampled certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropinquityBound {
    /// Hausdorff distance of X and Y in the supplied embedding.
    pub delta: f64,
    pub epsilon: f64,
    pub height: f64,
    /// `sqrt 2 m_A delta + eps / 2`.
    pub bound: f64,
    pub w_size: usize,
    pub certificates: Vec<MatchCertificate>,
    pub all_verified: bool,
    pub note: String,
}

const DELTA_NOTE: &str = "delta is the Hausdorff distance inside the supplied embedding, \
an upper bound for the Gromov-Hausdorff distance; the reported bound is at least the one \
computed from the Gromov-Hausdorff distance itself";

fn sample_ball(space: &FiniteMetricSpace, algebra: &Algebra, count: usize, seed: u64, tol: &Tolerances) -> Result<Vec<MatrixFunction>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let prog = MkProgram::new(space, algebra, SeminormSpec::conv(), MkOptions::default(), tol)?;
    prog.sample_unit_ball(count, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn certify_all(bridge: &Bridge, samples: &[MatrixFunction], direction: Direction, tol: &Tolerances) -> Result<Vec<MatchCertificate>> {
    samples
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let (_, mut c) = match_element(bridge, a, tol)?;
            c.direction = direction;
            c.sample = i;
            Ok(c)
        })
        .collect()
}

fn bound_with_samples(
    bridge: &Bridge,
    x_samples: &[MatrixFunction],
    y_samples: &[MatrixFunction],
    tol: &Tolerances,
) -> Result<PropinquityBound> {
    let reverse = bridge.reversed(tol)?;
    let mut certificates = certify_all(bridge, x_samples, Direction::XToY, tol)?;
    certificates.extend(certify_all(&reverse, y_samples, Direction::YToX, tol)?);
    Ok(PropinquityBound {
        delta: bridge.delta,
        epsilon: bridge.epsilon,
        height: bridge.height(),
        bound: bridge.bound(),
        w_size: bridge.w_set.len(),
        all_verified: certificates.iter().all(|c| c.verified),
        certificates,
        note: DELTA_NOTE.into(),
    })
}

/// Bound the propinquity between `C(X, A)` and `C(Y, A)` and certify
/// `samples` unit-ball elements in each direction.
#[allow(clippy::too_many_arguments)]
pub fn propinquity_upper_bound(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    cross: &[Vec<f64>],
    epsilon: f64,
    algebra: &Algebra,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<PropinquityBound> {
    let bridge = Bridge::build(x, y, cross, epsilon, algebra, tol)?;
    let xs = sample_ball(x, algebra, samples, seed, tol)?;
    let ys = sample_ball(y, algebra, samples, seed.wrapping_add(1), tol)?;
    bound_with_samples(&bridge, &xs, &ys, tol)
}

/// One row of an approximation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub eps_n: f64,
    pub net_size: usize,
    pub hausdorff: f64,
    pub delta_xy: f64,
    pub bound: f64,
    pub certificates: usize,
    pub all_verified: bool,
}

/// Bounds for a schedule of greedy nets of one ground space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxTable {
    pub epsilon: f64,
    pub rows: Vec<ApproxRow>,
    #[serde(skip)]
    pub certificates: Vec<Vec<MatchCertificate>>,
}

impl ApproxTable {
    /// CSV with columns `eps_n,net_size,hausdorff,delta_xy,bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps_n,net_size,hausdorff,delta_xy,bound\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                crate::format_sig(r.eps_n),
                r.net_size,
                crate::format_sig(r.hausdorff),
                crate::format_sig(r.delta_xy),
                crate::format_sig(r.bound)
            ));
        }
        out
    }

    pub fn all_verified(&self) -> bool {
        self.rows.iter().all(|r| r.all_verified)
    }
}

/// For each `eps_n`, bound the propinquity between the greedy net at
/// scale `eps_n` and the whole space. Unit-ball samples are cached per
/// net, so the ground space is sampled once.
#[allow(clippy::too_many_arguments)]
pub fn approx_table(
    space: &FiniteMetricSpace,
    algebra: &Algebra,
    schedule: &[f64],
    epsilon: f64,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<ApproxTable> {
    if schedule.iter().any(|&e| !(e > 0.0)) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("the schedule must be strictly decreasing and positive".into()));
    }
    let all: Vec<usize> = (0..space.len()).collect();
    let mut cache: HashMap<Vec<usize>, Vec<MatrixFunction>> = HashMap::new();
    cache.insert(all.clone(), sample_ball(space, algebra, samples, seed, tol)?);
    let mut rows = Vec::new();
    let mut certificates = Vec::new();
    for (row, &eps_n) in schedule.iter().enumerate() {
        let mut net = space.epsilon_net(eps_n, 0)?;
        net.sort_unstable();
        let sub = space.subspace(&net)?;
        if !cache.contains_key(&net) {
            let s = sample_ball(&sub, algebra, samples, seed.wrapping_add(1 + row as u64), tol)?;
            cache.insert(net.clone(), s);
        }
        let cross = space.cross(&net, &all);
        let bridge = Bridge::build(&sub, space, &cross, epsilon, algebra, tol)?;
        let b = bound_with_samples(&bridge, &cache[&net], &cache[&all], tol)?;
        rows.push(ApproxRow {
            eps_n,
            net_size: net.len(),
            hausdorff: space.hausdorff(&net, &all)?,
            delta_xy: b.delta,
            bound: b.bound,
            certificates: b.certificates.len(),
            all_verified: b.all_verified,
        });
        certificates.push(b.certificates);
    }
    Ok(ApproxTable { epsilon, rows, certificates })
}

/// `diam / 2, diam / 4, ...` with `rows` entries.
pub fn halving_schedule(space: &FiniteMetricSpace, rows: usize) -> Vec<f64> {
    let mut e = space.diameter() / 2.0;
    (0..rows)
        .map(|_| {
            let cur = e;
            e /= 2.0;
            cur
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_spaces_give_half_epsilon() {
        let tol = Tolerances::default();
        let x = FiniteMetricSpace::circle_chord(5).unwrap();
        let alg = Algebra::new(vec![2]).unwrap();
        for eps in [1e-3, 0.1, 1.0] {
            let b = Bridge::build(&x, &x, x.matrix(), eps, &alg, &tol).unwrap();
            assert_eq!(b.bound(), eps / 2.0);
            for i in 0..5 {
                assert!(b.w_set().contains(&(i, i)));
            }
        }
    }

    #[test]
    fn matching_on_identical_spaces_is_exact() {
        let tol = Tolerances::default();
        let x = FiniteMetricSpace::interval(4).unwrap();
        let alg = Algebra::new(vec![2]).unwrap();
        let b = Bridge::build(&x, &x, x.matrix(), 1e-3, &alg, &tol).unwrap();
        let a = sample_ball(&x, &alg, 2, 3, &tol).unwrap();
        for f in &a {
            let (g, cert) = match_element(&b, f, &tol).unwrap();
            assert_eq!(g.values(), f.values());
            assert_eq!(cert.w_defect, 0.0);
            assert!(cert.verified);
        }
    }

    #[test]
    fn bad_schedule_rejected() {
        let tol = Tolerances::default();
        let x = FiniteMetricSpace::interval(3).unwrap();
        assert!(approx_table(&x, &Algebra::scalars(), &[0.5, 0.5], 1e-3, 0, 0, &tol).is_err());
    }
}
