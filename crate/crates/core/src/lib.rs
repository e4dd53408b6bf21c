//! Cubic homogeneous forms, their Freudenthal-Springer algebras, and
//! numerical certification that no nonzero cubic solves the p-Laplace
//! equation away from the exceptional exponents.
//!
//! Module map:
//! - [`poly`]: exact and floating homogeneous polynomials, text format, polarization
//! - [`fsalg`]: the metrised algebra of a cubic form
//! - [`ops`]: Laplacian, p- and infinity-Laplace residuals, the quintic algebra identity
//! - [`identities`]: the idempotent-based contradiction chain, replayed on concrete algebras
//! - [`search`]: idempotent search, sphere moments, nonexistence certification
//! - [`fixtures`]: named test algebras with re-verified closed-form facts

pub mod error;
pub mod fixtures;
pub mod fsalg;
pub mod identities;
pub mod linalg;
pub mod ops;
pub mod poly;
pub mod scalar;
pub mod search;

pub use error::{AlgebraError, FixtureError, PolyError, SearchError};
pub use fsalg::FSAlgebra;
pub use linalg::LinOp;
pub use ops::PParam;
pub use poly::{CubicForm, GramMetric, HomoPoly, InnerScheme};
pub use scalar::{Rational, Scalar};
