//! State algebra, fluxes and characteristic structure of the supported
//! conservation laws.
//!
//! Every model implements [`Physics`] for a fixed number of conserved
//! variables `M`: scalar linear advection (`M = 1`), the 1D Euler equations
//! (`M = 3`) and the 2D Euler equations (`M = 4`). Downstream modules are
//! generic over the trait, so the scalar model is just the degenerate case of
//! the same interfaces.

mod advection;
mod euler;

pub use advection::LinearAdvection;
pub use euler::{EosParams, Euler1d, Euler2d, PrimitiveVector};

use nalgebra::{SMatrix, SVector};

use crate::error::Result;

/// Cell-averaged or point value of the conserved variables.
pub type ConservedVector<const M: usize> = SVector<f64, M>;

/// Square matrix acting on conserved vectors.
pub type Matrix<const M: usize> = SMatrix<f64, M, M>;

/// Density and pressure must exceed this floor for a state to be valid.
pub const VALIDITY_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

/// Sign selector for the split parts of a flux or Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Plus,
    Minus,
}

impl Part {
    #[inline]
    pub fn select(self, lambda: f64) -> f64 {
        match self {
            Part::Plus => lambda.max(0.0),
            Part::Minus => lambda.min(0.0),
        }
    }
}

/// Right/left eigenvectors and eigenvalues of the flux Jacobian,
/// `A = R diag(eigenvalues) L` with `L = R^-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem<const M: usize> {
    pub eigenvalues: SVector<f64, M>,
    pub right: Matrix<M>,
    pub left: Matrix<M>,
}

impl<const M: usize> EigenSystem<M> {
    pub fn jacobian(&self) -> Matrix<M> {
        self.right * Matrix::from_diagonal(&self.eigenvalues) * self.left
    }

    /// `R diag(f(lambda_i)) L`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Matrix<M> {
        let diag = self.eigenvalues.map(f);
        self.right * Matrix::from_diagonal(&diag) * self.left
    }

    pub fn split_matrix(&self, part: Part) -> Matrix<M> {
        self.map_eigenvalues(|l| part.select(l))
    }

    /// `A^± w` without forming the matrix.
    pub fn apply_split(&self, part: Part, w: &ConservedVector<M>) -> ConservedVector<M> {
        let mut chars = self.left * w;
        for (c, l) in chars.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= part.select(*l);
        }
        self.right * chars
    }
}

/// A hyperbolic system of conservation laws with `M` conserved variables.
pub trait Physics<const M: usize>: Send + Sync {
    fn name(&self) -> &'static str;

    /// Validity predicate: `Err(NonPhysicalState)` for states outside the
    /// admissible set.
    fn check(&self, w: &ConservedVector<M>) -> Result<()>;

    fn is_admissible(&self, w: &ConservedVector<M>) -> bool {
        self.check(w).is_ok()
    }

    fn flux(&self, w: &ConservedVector<M>, axis: Axis) -> Result<ConservedVector<M>>;

    /// Closed-form flux Jacobian `dF/dW`.
    fn jacobian(&self, w: &ConservedVector<M>, axis: Axis) -> Result<Matrix<M>>;

    fn eigensystem(&self, w: &ConservedVector<M>, axis: Axis) -> Result<EigenSystem<M>>;

    /// Spectral radius of the Jacobian along `axis`.
    fn max_wave_speed(&self, w: &ConservedVector<M>, axis: Axis) -> Result<f64>;

    /// HLLC approximate Riemann flux between a left and right state.
    fn hllc_flux(
        &self,
        left: &ConservedVector<M>,
        right: &ConservedVector<M>,
        axis: Axis,
    ) -> Result<ConservedVector<M>>;

    /// Mirror image across a wall normal to `axis`.
    fn reflect(&self, w: &ConservedVector<M>, axis: Axis) -> ConservedVector<M>;

    /// Column names of [`Physics::output_row`].
    fn output_columns(&self) -> &'static [&'static str];

    /// Plot-ready quantities derived from a conserved state.
    fn output_row(&self, w: &ConservedVector<M>) -> Vec<f64>;
}

/// Jacobian together with its eigen-factorization and the split matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitJacobian<const M: usize> {
    pub a: Matrix<M>,
    pub eigenvalues: SVector<f64, M>,
    pub right_eigenvectors: Matrix<M>,
    pub left_eigenvectors: Matrix<M>,
    pub a_plus: Matrix<M>,
    pub a_minus: Matrix<M>,
}

pub fn build_split_jacobian<P: Physics<M>, const M: usize>(
    physics: &P,
    w: &ConservedVector<M>,
    axis: Axis,
) -> Result<SplitJacobian<M>> {
    let a = physics.jacobian(w, axis)?;
    let eig = physics.eigensystem(w, axis)?;
    Ok(SplitJacobian {
        a,
        eigenvalues: eig.eigenvalues,
        right_eigenvectors: eig.right,
        left_eigenvectors: eig.left,
        a_plus: eig.split_matrix(Part::Plus),
        a_minus: eig.split_matrix(Part::Minus),
    })
}

/// Steger-Warming pair `(A^+ W, A^- W)`.
pub fn steger_warming_flux_pair<P: Physics<M>, const M: usize>(
    physics: &P,
    w: &ConservedVector<M>,
    axis: Axis,
) -> Result<(ConservedVector<M>, ConservedVector<M>)> {
    let eig = physics.eigensystem(w, axis)?;
    Ok((eig.apply_split(Part::Plus, w), eig.apply_split(Part::Minus, w)))
}
