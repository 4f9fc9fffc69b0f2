//! Finite-volume solvers for one- and two-dimensional hyperbolic
//! conservation laws built on high-order flux vector splitting.
//!
//! Each step integrates the split interface flux exactly in time: the flux
//! is Taylor-expanded, time derivatives are traded for space derivatives of
//! an in-cell polynomial, and the resulting scheme is single-stage at any
//! order. A WENO + TVD Runge-Kutta method-of-lines solver is included as a
//! baseline.

pub mod baseline;
pub mod driver;
pub mod error;
pub mod flux;
pub mod mesh;
pub mod physics;
pub mod problems;
pub mod reconstruction;
mod sweep;

pub use driver::{run_to_time, RunOutcome, RunStats, Scheme, SchemeConfig, StepRecord};
pub use error::{HfvsError, Result};
pub use flux::{JacobianEval, LeadingTermKind};
pub use mesh::{BoundaryCondition, Boundaries, GridField, GridSpec};
pub use reconstruction::{FaceWeights, Order, WenoOrder};
