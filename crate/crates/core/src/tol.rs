//! Numerical tolerances.
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances used throughout the library.
///
/// Parse overrides from a `key=value,...` string with [`Tolerances::parse_overrides`];
/// recognised keys are `sa`, `state`, `eig`, `metric`, `lp` and `leibniz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Self-adjointness and Lipschitz-input checks.
    pub sa: f64,
    /// Validity of states (weights, trace, positivity).
    pub state: f64,
    /// Relative off-diagonal mass at which Jacobi iteration stops.
    pub eig: f64,
    /// Metric axiom checks.
    pub metric: f64,
    /// Linear-program feasibility and optimality.
    pub lp: f64,
    /// Absolute slack below which a quasi-Leibniz check counts as violated.
    pub leibniz: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sa: 1e-9,
            state: 1e-8,
            eig: 1e-11,
            metric: 1e-9,
            lp: 1e-7,
            leibniz: 1e-9,
        }
    }
}

impl Tolerances {
    /// Apply `key=value` overrides separated by commas.
    ///
    /// ```
    /// use qmetric::Tolerances;
    /// let t = Tolerances::default().parse_overrides("lp=1e-8, sa=1e-10").unwrap();
    /// assert_eq!(t.lp, 1e-8);
    /// assert_eq!(t.sa, 1e-10);
    /// assert!(Tolerances::default().parse_overrides("bogus=1").is_err());
    /// ```
    pub fn parse_overrides(mut self, spec: &str) -> Result<Self> {
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Precondition(format!("tolerance override `{part}` is not key=value")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Precondition(format!("tolerance `{key}` has non-numeric value `{value}`")))?;
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Precondition(format!("tolerance `{key}` must be finite and nonnegative")));
            }
            let slot = match key.trim() {
                "sa" => &mut self.sa,
                "state" => &mut self.state,
                "eig" => &mut self.eig,
                "metric" => &mut self.metric,
                "lp" => &mut self.lp,
                "leibniz" => &mut self.leibniz,
                other => return Err(Error::Precondition(format!("unknown tolerance key `{other}`"))),
            };
            *slot = value;
        }
        Ok(self)
    }
}
