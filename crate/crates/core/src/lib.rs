//! Numerical verification engine for differential subordination and
//! superordination theorems built on the Lashin integral operator.
//!
//! The numeric core ([`series`], [`lashin`], [`disk`], [`forms`]) is generic
//! over the real scalar type; the verification harness ([`verifier`]), the
//! preset registry and the command line work in `f64`. The aliases below name
//! the `f64` instantiations used throughout the harness.

pub mod cli;
pub mod disk;
pub mod error;
pub mod forms;
pub mod gamma;
pub mod lashin;
pub mod literal;
pub mod presets;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod series;
pub mod verifier;

pub use error::{Error, Result};
pub use scalar::{Cx, Scalar};

pub type C64 = num_complex::Complex<f64>;
pub type Series = series::AnalyticSeries<f64>;
pub type Meromorphic = series::MeromorphicSeries<f64>;
pub type Lashin = lashin::LashinParams<f64>;
pub type Grid = disk::DiskGrid<f64>;
pub type Verdict = disk::Verdict<f64>;
pub type Params = forms::TheoremParams<f64>;
pub type QSpec = forms::QFamilySpec<f64>;
