//! Quantum metric computations on matrix-valued functions over finite
//! metric spaces.
//!
//! The crate works with `C(X, A)` where X is a finite metric space and
//! A is a finite-dimensional C*-algebra given as a direct sum of matrix
//! blocks. It provides Lipschitz seminorms, Monge-Kantorovich distances
//! between states computed by linear programming, McShane extensions and
//! certified propinquity bounds.
//!
//! ```
//! use qmetric::algebra::Algebra;
//! use qmetric::metric::FiniteMetricSpace;
//!
//! let alg = Algebra::new(vec![1, 2]).unwrap();
//! assert_eq!(alg.total_dim(), 3);
//! let x = FiniteMetricSpace::interval(3).unwrap();
//! assert_eq!(x.diameter(), 1.0);
//! ```
#![forbid(unsafe_code)]

pub mod algebra;
pub mod error;
pub mod funcspace;
pub mod lpcore;
pub mod mcshane;
pub mod metric;
pub mod mk;
pub mod propinquity;
pub mod random;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;

/// Book chapters, compiled as doctests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/metric_spaces.md")]
    mod metric_spaces {}
    #[doc = include_str!("../../../book/src/seminorms.md")]
    mod seminorms {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/mk.md")]
    mod mk {}
    #[doc = include_str!("../../../book/src/lp.md")]
    mod lp {}
    #[doc = include_str!("../../../book/src/mcshane.md")]
    mod mcshane {}
    #[doc = include_str!("../../../book/src/propinquity.md")]
    mod propinquity {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Format with 12 significant digits, trimming trailing zeros. Output is
/// stable across runs so reports can be compared byte for byte.
///
/// ```
/// assert_eq!(qmetric::format_sig(0.5), "0.5");
/// assert_eq!(qmetric::format_sig(1.0 / 3.0), "0.333333333333");
/// assert_eq!(qmetric::format_sig(0.0), "0");
/// ```
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        let s = format!("{v:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}
