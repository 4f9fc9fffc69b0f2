use nalgebra::SVector;

use super::{Axis, ConservedVector, EigenSystem, Matrix, Physics};
use crate::error::Result;

/// `w_t + a w_x = 0` with constant speed `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAdvection {
    pub speed: f64,
}

impl LinearAdvection {
    pub fn new(speed: f64) -> Self {
        Self { speed }
    }
}

impl Default for LinearAdvection {
    fn default() -> Self {
        Self { speed: 1.0 }
    }
}

impl Physics<1> for LinearAdvection {
    fn name(&self) -> &'static str {
        "linear-advection"
    }

    fn check(&self, _w: &ConservedVector<1>) -> Result<()> {
        Ok(())
    }

    fn flux(&self, w: &ConservedVector<1>, _axis: Axis) -> Result<ConservedVector<1>> {
        Ok(w * self.speed)
    }

    fn jacobian(&self, _w: &ConservedVector<1>, _axis: Axis) -> Result<Matrix<1>> {
        Ok(Matrix::<1>::from_element(self.speed))
    }

    fn eigensystem(&self, _w: &ConservedVector<1>, _axis: Axis) -> Result<EigenSystem<1>> {
        Ok(EigenSystem {
            eigenvalues: SVector::from([self.speed]),
            right: Matrix::identity(),
            left: Matrix::identity(),
        })
    }

    fn max_wave_speed(&self, _w: &ConservedVector<1>, _axis: Axis) -> Result<f64> {
        Ok(self.speed.abs())
    }

    fn hllc_flux(
        &self,
        left: &ConservedVector<1>,
        right: &ConservedVector<1>,
        _axis: Axis,
    ) -> Result<ConservedVector<1>> {
        // A single wave: every Riemann solver reduces to upwinding.
        let upwind = if self.speed >= 0.0 { left } else { right };
        Ok(upwind * self.speed)
    }

    fn reflect(&self, w: &ConservedVector<1>, _axis: Axis) -> ConservedVector<1> {
        *w
    }

    fn output_columns(&self) -> &'static [&'static str] {
        &["w"]
    }

    fn output_row(&self, w: &ConservedVector<1>) -> Vec<f64> {
        vec![w[0]]
    }
}
