//! Hierarchical convex minimization through multiscale gradient flows.

pub mod convex;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod operator;
pub mod quadrature;
pub mod report;
pub mod schedule;
pub mod solvers;
pub mod splitting;

pub use error::{Error, Result};
pub use linalg::Point;
