use nalgebra::SVector;

use super::{Axis, ConservedVector, EigenSystem, Matrix, Physics, VALIDITY_FLOOR};
use crate::error::{HfvsError, Result};
use crate::flux::hllc::{hllc_normal_flux, GasState};

/// Perfect-gas equation of state `P = (gamma - 1) rho e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EosParams {
    gamma: f64,
}

impl EosParams {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 1.0 && gamma.is_finite() {
            Ok(Self { gamma })
        } else {
            Err(HfvsError::InvalidParameter(format!(
                "ratio of specific heats must exceed 1, got {gamma}"
            )))
        }
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sound_speed(&self, rho: f64, pressure: f64) -> f64 {
        (self.gamma * pressure / rho).sqrt()
    }

    pub fn internal_energy(&self, rho: f64, pressure: f64) -> f64 {
        pressure / ((self.gamma - 1.0) * rho)
    }
}

impl Default for EosParams {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

/// Density, velocity and pressure. The second velocity component is zero
/// for 1D states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveVector {
    pub rho: f64,
    pub velocity: [f64; 2],
    pub pressure: f64,
}

impl PrimitiveVector {
    pub fn new_1d(rho: f64, u: f64, pressure: f64) -> Self {
        Self { rho, velocity: [u, 0.0], pressure }
    }

    pub fn new_2d(rho: f64, u: f64, v: f64, pressure: f64) -> Self {
        Self { rho, velocity: [u, v], pressure }
    }
}

fn validate(rho: f64, pressure: f64) -> Result<()> {
    // Written so that NaN fails too.
    if rho > VALIDITY_FLOOR && pressure > VALIDITY_FLOOR {
        Ok(())
    } else {
        Err(HfvsError::NonPhysicalState { density: rho, pressure })
    }
}

fn checked_sound_speed(eos: &EosParams, rho: f64, pressure: f64) -> Result<f64> {
    let c = eos.sound_speed(rho, pressure);
    if c > 0.0 && c.is_finite() {
        Ok(c)
    } else {
        Err(HfvsError::DegenerateEigensystem { sound_speed: c })
    }
}

/// One-dimensional Euler equations, `W = (rho, rho u, rho E)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Euler1d {
    pub eos: EosParams,
}

impl Euler1d {
    pub fn new(eos: EosParams) -> Self {
        Self { eos }
    }

    #[inline]
    pub fn primitive_from_conserved(&self, w: &ConservedVector<3>) -> Result<PrimitiveVector> {
        let rho = w[0];
        let u = w[1] / rho;
        let pressure = (self.eos.gamma - 1.0) * (w[2] - 0.5 * rho * u * u);
        validate(rho, pressure)?;
        Ok(PrimitiveVector::new_1d(rho, u, pressure))
    }

    pub fn conserved_from_primitive(&self, p: &PrimitiveVector) -> ConservedVector<3> {
        let u = p.velocity[0];
        let energy = p.pressure / (self.eos.gamma - 1.0) + 0.5 * p.rho * u * u;
        SVector::from([p.rho, p.rho * u, energy])
    }

    fn gas_state(&self, w: &ConservedVector<3>) -> Result<GasState> {
        let p = self.primitive_from_conserved(w)?;
        Ok(GasState {
            rho: p.rho,
            normal_velocity: p.velocity[0],
            tangential_velocity: 0.0,
            pressure: p.pressure,
            total_energy: w[2],
        })
    }
}

impl Physics<3> for Euler1d {
    fn name(&self) -> &'static str {
        "euler-1d"
    }

    #[inline]
    fn check(&self, w: &ConservedVector<3>) -> Result<()> {
        self.primitive_from_conserved(w).map(|_| ())
    }

    #[inline]
    fn flux(&self, w: &ConservedVector<3>, _axis: Axis) -> Result<ConservedVector<3>> {
        let p = self.primitive_from_conserved(w)?;
        let u = p.velocity[0];
        Ok(SVector::from([w[1], w[1] * u + p.pressure, (w[2] + p.pressure) * u]))
    }

    fn jacobian(&self, w: &ConservedVector<3>, _axis: Axis) -> Result<Matrix<3>> {
        let p = self.primitive_from_conserved(w)?;
        let g = self.eos.gamma;
        let u = p.velocity[0];
        let h = (w[2] + p.pressure) / p.rho;
        Ok(Matrix::<3>::new(
            0.0,
            1.0,
            0.0,
            0.5 * (g - 3.0) * u * u,
            (3.0 - g) * u,
            g - 1.0,
            u * (0.5 * (g - 1.0) * u * u - h),
            h - (g - 1.0) * u * u,
            g * u,
        ))
    }

    #[inline(always)]
    fn eigensystem(&self, w: &ConservedVector<3>, _axis: Axis) -> Result<EigenSystem<3>> {
        let p = self.primitive_from_conserved(w)?;
        let c = checked_sound_speed(&self.eos, p.rho, p.pressure)?;
        let inv_c = 1.0 / c;
        let u = p.velocity[0];
        let h = (w[2] + p.pressure) / p.rho;
        let b1 = (self.eos.gamma - 1.0) * (inv_c * inv_c);
        let b2 = 0.5 * b1 * u * u;
        let right = Matrix::<3>::new(
            1.0,
            1.0,
            1.0,
            u - c,
            u,
            u + c,
            h - u * c,
            0.5 * u * u,
            h + u * c,
        );
        let left = Matrix::<3>::new(
            0.5 * (b2 + u * inv_c),
            -0.5 * (b1 * u + inv_c),
            0.5 * b1,
            1.0 - b2,
            b1 * u,
            -b1,
            0.5 * (b2 - u * inv_c),
            -0.5 * (b1 * u - inv_c),
            0.5 * b1,
        );
        Ok(EigenSystem { eigenvalues: SVector::from([u - c, u, u + c]), right, left })
    }

    #[inline]
    fn max_wave_speed(&self, w: &ConservedVector<3>, _axis: Axis) -> Result<f64> {
        let p = self.primitive_from_conserved(w)?;
        Ok(p.velocity[0].abs() + self.eos.sound_speed(p.rho, p.pressure))
    }

    fn hllc_flux(
        &self,
        left: &ConservedVector<3>,
        right: &ConservedVector<3>,
        _axis: Axis,
    ) -> Result<ConservedVector<3>> {
        let f = hllc_normal_flux(&self.gas_state(left)?, &self.gas_state(right)?, self.eos.gamma);
        Ok(SVector::from([f[0], f[1], f[3]]))
    }

    fn reflect(&self, w: &ConservedVector<3>, _axis: Axis) -> ConservedVector<3> {
        SVector::from([w[0], -w[1], w[2]])
    }

    fn output_columns(&self) -> &'static [&'static str] {
        &["rho", "u", "p", "e"]
    }

    fn output_row(&self, w: &ConservedVector<3>) -> Vec<f64> {
        let rho = w[0];
        let u = w[1] / rho;
        let pressure = (self.eos.gamma - 1.0) * (w[2] - 0.5 * rho * u * u);
        vec![rho, u, pressure, self.eos.internal_energy(rho, pressure)]
    }
}

/// Two-dimensional Euler equations, `W = (rho, rho u, rho v, rho E)`.
///
/// The y-direction quantities are the x-direction ones of the state with the
/// two momentum components exchanged, permuted back.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Euler2d {
    pub eos: EosParams,
}

#[inline]
fn swap_momenta(w: &ConservedVector<4>) -> ConservedVector<4> {
    SVector::from([w[0], w[2], w[1], w[3]])
}

fn swap_matrix(m: &Matrix<4>) -> Matrix<4> {
    let mut out = *m;
    out.swap_rows(1, 2);
    out.swap_columns(1, 2);
    out
}

impl Euler2d {
    pub fn new(eos: EosParams) -> Self {
        Self { eos }
    }

    #[inline]
    pub fn primitive_from_conserved(&self, w: &ConservedVector<4>) -> Result<PrimitiveVector> {
        let rho = w[0];
        let u = w[1] / rho;
        let v = w[2] / rho;
        let pressure = (self.eos.gamma - 1.0) * (w[3] - 0.5 * rho * (u * u + v * v));
        validate(rho, pressure)?;
        Ok(PrimitiveVector::new_2d(rho, u, v, pressure))
    }

    pub fn conserved_from_primitive(&self, p: &PrimitiveVector) -> ConservedVector<4> {
        let [u, v] = p.velocity;
        let energy = p.pressure / (self.eos.gamma - 1.0) + 0.5 * p.rho * (u * u + v * v);
        SVector::from([p.rho, p.rho * u, p.rho * v, energy])
    }

    fn oriented(w: &ConservedVector<4>, axis: Axis) -> ConservedVector<4> {
        match axis {
            Axis::X => *w,
            Axis::Y => swap_momenta(w),
        }
    }

    fn flux_x(&self, w: &ConservedVector<4>) -> Result<ConservedVector<4>> {
        let p = self.primitive_from_conserved(w)?;
        let u = p.velocity[0];
        Ok(SVector::from([
            w[1],
            w[1] * u + p.pressure,
            w[2] * u,
            (w[3] + p.pressure) * u,
        ]))
    }

    fn jacobian_x(&self, w: &ConservedVector<4>) -> Result<Matrix<4>> {
        let p = self.primitive_from_conserved(w)?;
        let g = self.eos.gamma;
        let [u, v] = p.velocity;
        let q2 = u * u + v * v;
        let h = (w[3] + p.pressure) / p.rho;
        Ok(Matrix::<4>::new(
            0.0,
            1.0,
            0.0,
            0.0,
            0.5 * (g - 1.0) * q2 - u * u,
            (3.0 - g) * u,
            -(g - 1.0) * v,
            g - 1.0,
            -u * v,
            v,
            u,
            0.0,
            u * (0.5 * (g - 1.0) * q2 - h),
            h - (g - 1.0) * u * u,
            -(g - 1.0) * u * v,
            g * u,
        ))
    }

    #[inline(always)]
    fn eigensystem_x(&self, w: &ConservedVector<4>) -> Result<EigenSystem<4>> {
        let p = self.primitive_from_conserved(w)?;
        let c = checked_sound_speed(&self.eos, p.rho, p.pressure)?;
        let inv_c = 1.0 / c;
        let [u, v] = p.velocity;
        let q2 = u * u + v * v;
        let h = (w[3] + p.pressure) / p.rho;
        let b1 = (self.eos.gamma - 1.0) * (inv_c * inv_c);
        let b2 = 0.5 * b1 * q2;
        let right = Matrix::<4>::new(
            1.0,
            1.0,
            0.0,
            1.0,
            u - c,
            u,
            0.0,
            u + c,
            v,
            v,
            1.0,
            v,
            h - u * c,
            0.5 * q2,
            v,
            h + u * c,
        );
        let left = Matrix::<4>::new(
            0.5 * (b2 + u * inv_c),
            -0.5 * (b1 * u + inv_c),
            -0.5 * b1 * v,
            0.5 * b1,
            1.0 - b2,
            b1 * u,
            b1 * v,
            -b1,
            -v,
            0.0,
            1.0,
            0.0,
            0.5 * (b2 - u * inv_c),
            -0.5 * (b1 * u - inv_c),
            -0.5 * b1 * v,
            0.5 * b1,
        );
        Ok(EigenSystem { eigenvalues: SVector::from([u - c, u, u, u + c]), right, left })
    }

    fn gas_state(&self, w: &ConservedVector<4>) -> Result<GasState> {
        let p = self.primitive_from_conserved(w)?;
        Ok(GasState {
            rho: p.rho,
            normal_velocity: p.velocity[0],
            tangential_velocity: p.velocity[1],
            pressure: p.pressure,
            total_energy: w[3],
        })
    }
}

impl Physics<4> for Euler2d {
    fn name(&self) -> &'static str {
        "euler-2d"
    }

    #[inline]
    fn check(&self, w: &ConservedVector<4>) -> Result<()> {
        self.primitive_from_conserved(w).map(|_| ())
    }

    #[inline]
    fn flux(&self, w: &ConservedVector<4>, axis: Axis) -> Result<ConservedVector<4>> {
        let f = self.flux_x(&Self::oriented(w, axis))?;
        Ok(Self::oriented(&f, axis))
    }

    fn jacobian(&self, w: &ConservedVector<4>, axis: Axis) -> Result<Matrix<4>> {
        let a = self.jacobian_x(&Self::oriented(w, axis))?;
        Ok(match axis {
            Axis::X => a,
            Axis::Y => swap_matrix(&a),
        })
    }

    #[inline(always)]
    fn eigensystem(&self, w: &ConservedVector<4>, axis: Axis) -> Result<EigenSystem<4>> {
        let eig = self.eigensystem_x(&Self::oriented(w, axis))?;
        Ok(match axis {
            Axis::X => eig,
            Axis::Y => {
                let mut right = eig.right;
                right.swap_rows(1, 2);
                let mut left = eig.left;
                left.swap_columns(1, 2);
                EigenSystem { eigenvalues: eig.eigenvalues, right, left }
            }
        })
    }

    #[inline]
    fn max_wave_speed(&self, w: &ConservedVector<4>, axis: Axis) -> Result<f64> {
        let p = self.primitive_from_conserved(w)?;
        let un = match axis {
            Axis::X => p.velocity[0],
            Axis::Y => p.velocity[1],
        };
        Ok(un.abs() + self.eos.sound_speed(p.rho, p.pressure))
    }

    fn hllc_flux(
        &self,
        left: &ConservedVector<4>,
        right: &ConservedVector<4>,
        axis: Axis,
    ) -> Result<ConservedVector<4>> {
        let l = self.gas_state(&Self::oriented(left, axis))?;
        let r = self.gas_state(&Self::oriented(right, axis))?;
        let f = SVector::from(hllc_normal_flux(&l, &r, self.eos.gamma));
        Ok(Self::oriented(&f, axis))
    }

    fn reflect(&self, w: &ConservedVector<4>, axis: Axis) -> ConservedVector<4> {
        match axis {
            Axis::X => SVector::from([w[0], -w[1], w[2], w[3]]),
            Axis::Y => SVector::from([w[0], w[1], -w[2], w[3]]),
        }
    }

    fn output_columns(&self) -> &'static [&'static str] {
        &["rho", "u", "v", "p", "e"]
    }

    fn output_row(&self, w: &ConservedVector<4>) -> Vec<f64> {
        let rho = w[0];
        let u = w[1] / rho;
        let v = w[2] / rho;
        let pressure = (self.eos.gamma - 1.0) * (w[3] - 0.5 * rho * (u * u + v * v));
        vec![rho, u, v, pressure, self.eos.internal_energy(rho, pressure)]
    }
}
