//! Finite metric spaces, Hausdorff and Gromov-Hausdorff distances,
//! joined spaces and epsilon-nets.
//!
//! ```
//! use qmetric::metric::FiniteMetricSpace;
//!
//! let line = FiniteMetricSpace::line(&[0.0, 1.0, 2.0]).unwrap();
//! assert_eq!(line.diameter(), 2.0);
//! assert_eq!(line.hausdorff(&[0], &[0, 2]).unwrap(), 2.0);
//! let circle = FiniteMetricSpace::circle_chord(4).unwrap();
//! assert!((circle.diameter() - 2.0).abs() < 1e-15);
//! ```
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Default size cap for [`gh_exact`].
pub const GH_EXACT_CAP: usize = 5;

/// Labelled points with a validated distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl TryFrom<SpaceRepr> for FiniteMetricSpace {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        FiniteMetricSpace::new(r.labels, r.dist, &Tolerances::default())
    }
}

impl From<FiniteMetricSpace> for SpaceRepr {
    fn from(s: FiniteMetricSpace) -> Self {
        SpaceRepr { labels: s.labels, dist: s.dist }
    }
}

/// Check the metric axioms, reporting the first violation with its indices.
///
/// With `allow_zero` the positivity of off-diagonal entries is not required
/// (pseudometrics).
fn check_axioms(dist: &[Vec<f64>], tol: f64, allow_zero: bool) -> Result<()> {
    let n = dist.len();
    for (i, row) in dist.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Shape(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if let Some(j) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Metric(format!("d[{i}][{j}] = {} is negative or not finite", row[j])));
        }
    }
    for i in 0..n {
        if dist[i][i].abs() > tol {
            return Err(Error::Metric(format!("d[{i}][{i}] = {} is not zero", dist[i][i])));
        }
        for j in i + 1..n {
            if (dist[i][j] - dist[j][i]).abs() > tol {
                return Err(Error::Metric(format!(
                    "not symmetric: d[{i}][{j}] = {} but d[{j}][{i}] = {}",
                    dist[i][j], dist[j][i]
                )));
            }
            if !allow_zero && dist[i][j] <= tol {
                return Err(Error::Metric(format!("distinct points {i} and {j} are at distance {}", dist[i][j])));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist[i][j] > dist[i][k] + dist[k][j] + tol {
                    return Err(Error::Metric(format!(
                        "triangle inequality fails for ({i},{j}) via {k}: {} > {} + {}",
                        dist[i][j], dist[i][k], dist[k][j]
                    )));
                }
            }
        }
    }
    Ok(())
}

fn symmetrized(dist: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = dist.len();
    let mut out = dist;
    for i in 0..n {
        out[i][i] = 0.0;
        for j in i + 1..n {
            let v = (out[i][j] + out[j][i]) / 2.0;
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

impl FiniteMetricSpace {
    /// Validate and build. Entries within `tol.metric` of symmetric are
    /// averaged so the stored matrix is exactly symmetric.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>, tol: &Tolerances) -> Result<Self> {
        if labels.len() != dist.len() {
            return Err(Error::Shape(format!("{} labels for {} points", labels.len(), dist.len())));
        }
        if dist.is_empty() {
            return Err(Error::Shape("a metric space needs at least one point".into()));
        }
        for i in 0..labels.len() {
            if labels[i + 1..].contains(&labels[i]) {
                return Err(Error::Shape(format!("duplicate label `{}`", labels[i])));
            }
        }
        check_axioms(&dist, tol.metric, false)?;
        Ok(FiniteMetricSpace { labels, dist: symmetrized(dist) })
    }

    /// Validate a matrix, labelling points `0, 1, ...`.
    pub fn validate(dist: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..dist.len()).map(|i| i.to_string()).collect();
        Self::new(labels, dist, &Tolerances::default())
    }

    /// The single-point space.
    pub fn point() -> Self {
        FiniteMetricSpace { labels: vec!["p".into()], dist: vec![vec![0.0]] }
    }

    /// Distinct reals on the line.
    pub fn line(xs: &[f64]) -> Result<Self> {
        let dist = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect();
        Self::validate(dist)
    }

    /// `n` equally spaced points of the unit circle with the chord metric.
    pub fn circle_chord(n: usize) -> Result<Self> {
        Self::circle(n, |k| 2.0 * (PI * k.min(n - k) as f64 / n as f64).sin())
    }

    /// `n` equally spaced points of the unit circle with the arc-length metric.
    pub fn circle_arc(n: usize) -> Result<Self> {
        Self::circle(n, |k| 2.0 * PI * k.min(n - k) as f64 / n as f64)
    }

    fn circle(n: usize, by_gap: impl Fn(usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("a circle net needs at least one point".into()));
        }
        let dist = (0..n).map(|i| (0..n).map(|j| by_gap(i.abs_diff(j))).collect()).collect();
        let labels = (0..n).map(|i| format!("t{i}")).collect();
        Self::new(labels, dist, &Tolerances::default())
    }

    /// `n` equally spaced points of `[0, 1]` (a single point at 0 when `n = 1`).
    pub fn interval(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("an interval net needs at least one point".into()));
        }
        let xs: Vec<f64> = (0..n).map(|i| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 }).collect();
        Self::line(&xs)
    }

    /// `n` uniform random points of the unit square with the Euclidean metric.
    pub fn random_planar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        let dist = pts.iter().map(|a| pts.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect()).collect();
        Self::validate(dist)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points (0 for a single point).
    pub fn separation(&self) -> f64 {
        let n = self.len();
        let mut s = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                s = s.min(self.dist[i][j]);
            }
        }
        if s.is_finite() {
            s
        } else {
            0.0
        }
    }

    /// All distances multiplied by `c > 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Precondition(format!("scale factor must be positive, got {c}")));
        }
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|r| r.iter().map(|v| v * c).collect()).collect(),
        })
    }

    /// Rescale so the diameter is `target` (identity for a single point).
    pub fn with_diameter(&self, target: f64) -> Result<Self> {
        let d = self.diameter();
        if d == 0.0 {
            return Ok(self.clone());
        }
        self.scale(target / d)
    }

    /// The subspace on the given indices, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> Result<Self> {
        self.check_indices(idx)?;
        let mut seen = vec![false; self.len()];
        for &i in idx {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::Precondition(format!("index {i} repeated in subset")));
            }
        }
        Ok(FiniteMetricSpace {
            labels: idx.iter().map(|&i| self.labels[i].clone()).collect(),
            dist: idx.iter().map(|&i| idx.iter().map(|&j| self.dist[i][j]).collect()).collect(),
        })
    }

    fn check_indices(&self, idx: &[usize]) -> Result<()> {
        match idx.iter().find(|&&i| i >= self.len()) {
            Some(i) => Err(Error::Index(format!("point {i} of {}", self.len()))),
            None => Ok(()),
        }
    }

    /// Two-sided Hausdorff distance between non-empty index subsets.
    pub fn hausdorff(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Precondition("Hausdorff distance needs non-empty subsets".into()));
        }
        self.check_indices(a)?;
        self.check_indices(b)?;
        let cross: Vec<Vec<f64>> = a.iter().map(|&i| b.iter().map(|&j| self.dist[i][j]).collect()).collect();
        Ok(hausdorff_from_cross(&cross))
    }

    /// Greedy farthest-point net from `seed`: keep adding the point farthest
    /// from the net (lowest index on ties) until every point is within `eps`.
    /// Indices are returned in insertion order.
    pub fn epsilon_net(&self, eps: f64, seed: usize) -> Result<Vec<usize>> {
        if !(eps > 0.0) {
            return Err(Error::Precondition(format!("epsilon must be positive, got {eps}")));
        }
        self.check_indices(&[seed])?;
        let mut net = vec![seed];
        let mut gap: Vec<f64> = self.dist[seed].clone();
        loop {
            let (far, &worst) = gap
                .iter()
                .enumerate()
                .fold((0, &f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            if worst <= eps {
                return Ok(net);
            }
            net.push(far);
            for (g, &d) in gap.iter_mut().zip(&self.dist[far]) {
                *g = g.min(d);
            }
        }
    }

    /// Cross-distance matrix `d(a_i, b_j)` between two index subsets.
    pub fn cross(&self, a: &[usize], b: &[usize]) -> Vec<Vec<f64>> {
        a.iter().map(|&i| b.iter().map(|&j| self.dist[i][j]).collect()).collect()
    }
}

/// Hausdorff distance from a cross-distance matrix: the larger of the two
/// directed values, each a max of row or column minima.
pub fn hausdorff_from_cross(cross: &[Vec<f64>]) -> f64 {
    let rows = cross.iter().map(|r| r.iter().copied().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let ncols = cross.first().map_or(0, Vec::len);
    let cols = (0..ncols)
        .map(|j| cross.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    rows.max(cols)
}

/// The disjoint union of two spaces with cross distances `cross + offset`.
///
/// Zero cross distances are allowed, so the union may be a pseudometric.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinedSpace {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    cross: Vec<Vec<f64>>,
    offset: f64,
    dist: Vec<Vec<f64>>,
}

impl JoinedSpace {
    /// Build and check the triangle inequality over every triple of the union.
    pub fn new(
        x: FiniteMetricSpace,
        y: FiniteMetricSpace,
        cross: Vec<Vec<f64>>,
        offset: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        if !(offset >= 0.0 && offset.is_finite()) {
            return Err(Error::Precondition(format!("offset must be nonnegative, got {offset}")));
        }
        if cross.len() != x.len() || cross.iter().any(|r| r.len() != y.len()) {
            return Err(Error::Shape(format!("cross matrix must be {}x{}", x.len(), y.len())));
        }
        let (nx, ny) = (x.len(), y.len());
        let mut dist = vec![vec![0.0; nx + ny]; nx + ny];
        for i in 0..nx {
            for j in 0..nx {
                dist[i][j] = x.d(i, j);
            }
            for j in 0..ny {
                dist[i][nx + j] = cross[i][j] + offset;
                dist[nx + j][i] = cross[i][j] + offset;
            }
        }
        for i in 0..ny {
            for j in 0..ny {
                dist[nx + i][nx + j] = y.d(i, j);
            }
        }
        check_axioms(&dist, tol.metric, true).map_err(|e| match e {
            Error::Metric(m) => Error::Metric(format!("joined space (X first, then Y): {m}")),
            other => other,
        })?;
        Ok(JoinedSpace { x, y, cross, offset, dist })
    }

    pub fn x(&self) -> &FiniteMetricSpace {
        &self.x
    }

    pub fn y(&self) -> &FiniteMetricSpace {
        &self.y
    }

    /// The raw cross distances, without the offset.
    pub fn cross(&self) -> &[Vec<f64>] {
        &self.cross
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Distances on the union; X occupies the first indices.
    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    /// Hausdorff distance between the X and Y parts inside the union.
    pub fn hausdorff(&self) -> f64 {
        hausdorff_from_cross(&self.cross) + self.offset
    }

    /// The union as a metric space, labels prefixed `X:` and `Y:`. Fails when
    /// some cross distance is zero.
    pub fn to_space(&self, tol: &Tolerances) -> Result<FiniteMetricSpace> {
        let labels = self
            .x
            .labels()
            .iter()
            .map(|l| format!("X:{l}"))
            .chain(self.y.labels().iter().map(|l| format!("Y:{l}")))
            .collect();
        FiniteMetricSpace::new(labels, self.dist.clone(), tol)
    }
}

/// Hausdorff distance of X and Y inside the union built from `cross`.
///
/// This bounds the Gromov-Hausdorff distance from above.
pub fn gh_upper(x: &FiniteMetricSpace, y: &FiniteMetricSpace, cross: &[Vec<f64>], tol: &Tolerances) -> Result<f64> {
    Ok(JoinedSpace::new(x.clone(), y.clone(), cross.to_vec(), 0.0, tol)?.hausdorff())
}

/// Gromov-Hausdorff distance: half the least distortion of a correspondence.
///
/// Branch and bound over correspondences: each step covers the first
/// uncovered point of X (then of Y) with one more pair, and abandons
/// branches whose distortion already reaches the best found. Both spaces
/// must have at most [`GH_EXACT_CAP`] points.
pub fn gh_exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    if x.len() > GH_EXACT_CAP || y.len() > GH_EXACT_CAP {
        return Err(Error::TooLarge(format!(
            "exact Gromov-Hausdorff search is capped at {GH_EXACT_CAP} points per space \
             ({} and {} given); use gh_upper with a cross-distance matrix instead",
            x.len(),
            y.len()
        )));
    }
    let mut search = GhSearch {
        x,
        y,
        pairs: Vec::new(),
        covered_x: vec![0; x.len()],
        covered_y: vec![0; y.len()],
        best: f64::INFINITY,
    };
    search.descend(0.0);
    Ok(search.best / 2.0)
}

struct GhSearch<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    pairs: Vec<(usize, usize)>,
    covered_x: Vec<u32>,
    covered_y: Vec<u32>,
    best: f64,
}

impl GhSearch<'_> {
    fn descend(&mut self, distortion: f64) {
        if distortion >= self.best {
            return;
        }
        let candidates: Vec<(usize, usize)> = if let Some(i) = self.covered_x.iter().position(|&c| c == 0) {
            (0..self.y.len()).map(|j| (i, j)).collect()
        } else if let Some(j) = self.covered_y.iter().position(|&c| c == 0) {
            (0..self.x.len()).map(|i| (i, j)).collect()
        } else {
            self.best = distortion;
            return;
        };
        for (i, j) in candidates {
            let added = self
                .pairs
                .iter()
                .map(|&(a, b)| (self.x.d(i, a) - self.y.d(j, b)).abs())
                .fold(distortion, f64::max);
            if added >= self.best {
                continue;
            }
            self.pairs.push((i, j));
            self.covered_x[i] += 1;
            self.covered_y[j] += 1;
            self.descend(added);
            self.pairs.pop();
            self.covered_x[i] -= 1;
            self.covered_y[j] -= 1;
        }
    }
}
