//! Method-of-lines baseline: component-wise WENO face values, a global
//! Lax-Friedrichs flux and the three-stage TVD Runge-Kutta integrator.

use crate::error::{HfvsError, Result};
use crate::mesh::GridField;
use crate::physics::{Axis, ConservedVector, Physics};
use crate::reconstruction::{weno_interface_values, InterfaceValues, StencilWindow, WenoOrder};
use crate::sweep::{collect_range, sweep, LineResult};

/// Largest spectral radius along `axis` over the interior cells.
fn global_alpha<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &GridField<M>,
    axis: Axis,
) -> Result<f64> {
    let mut alpha: f64 = 0.0;
    for (_, _, w) in field.interior() {
        alpha = alpha.max(physics.max_wave_speed(w, axis)?);
    }
    Ok(alpha)
}

#[allow(clippy::too_many_arguments)]
fn weno_line<P: Physics<M>, const M: usize>(
    physics: &P,
    line: &[ConservedVector<M>],
    g: usize,
    order: WenoOrder,
    h: f64,
    alpha: f64,
    axis: Axis,
    parallel: bool,
) -> LineResult<Vec<ConservedVector<M>>> {
    let n = line.len() - 2 * g;
    let r = order.radius();
    let faces: Vec<InterfaceValues<M>> = collect_range(parallel, n + 2, |e| {
        let c = g - 1 + e;
        let values = weno_interface_values(&StencilWindow::new(&line[c - r..=c + r], h), order);
        if physics.is_admissible(&values.minus) && physics.is_admissible(&values.plus) {
            Ok(values)
        } else {
            Ok(InterfaceValues { minus: line[c], plus: line[c] })
        }
    })?;
    let fluxes = collect_range(parallel, n + 1, |f| {
        let (wl, wr) = (faces[f].plus, faces[f + 1].minus);
        let cell = f.min(n - 1);
        let fl = physics.flux(&wl, axis).map_err(|e| (cell, e))?;
        let fr = physics.flux(&wr, axis).map_err(|e| (cell, e))?;
        Ok((fl + fr) * 0.5 - (wr - wl) * (0.5 * alpha))
    })?;
    Ok((0..n).map(|i| (fluxes[i] - fluxes[i + 1]) / h).collect())
}

/// `L(W) = -(F_{i+1/2} - F_{i-1/2}) / dx` (plus the y part in 2D) per
/// interior cell in row-major order. Ghosts must be filled.
pub fn semidiscrete_rhs_weno<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &GridField<M>,
    order: WenoOrder,
    parallel: bool,
) -> Result<Vec<ConservedVector<M>>> {
    let spec = field.spec;
    spec.validate(order.radius() + 1)?;
    let alpha_x = global_alpha(physics, field, Axis::X)?;
    let alpha_y = if spec.is_2d() { global_alpha(physics, field, Axis::Y)? } else { 0.0 };
    sweep(field, parallel, |line, axis, inner| {
        let (h, alpha) = match axis {
            Axis::X => (spec.dx(), alpha_x),
            Axis::Y => (spec.dy(), alpha_y),
        };
        weno_line(physics, line, spec.ghost, order, h, alpha, axis, inner)
    })
    .map_err(|e| e.into_rejection(field.time, 0.0))
}

/// `a u + b (v + dt L)` on the interior of `v`; ghosts are left stale.
fn combine<const M: usize>(
    a: f64,
    u: &GridField<M>,
    b: f64,
    v: &GridField<M>,
    dt: f64,
    rhs: &[ConservedVector<M>],
    time: f64,
) -> Result<GridField<M>> {
    let spec = u.spec;
    if rhs.len() != spec.nx * spec.ny {
        return Err(HfvsError::InvalidParameter(format!(
            "right-hand side has {} entries for {} cells",
            rhs.len(),
            spec.nx * spec.ny
        )));
    }
    let mut out = v.clone();
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let (ii, jj) = (i as isize, j as isize);
            let stage = v.get(ii, jj) + rhs[j * spec.nx + i] * dt;
            *out.get_mut(ii, jj) = u.get(ii, jj) * a + stage * b;
        }
    }
    out.time = time;
    Ok(out)
}

/// One step of the Shu-Osher three-stage TVD Runge-Kutta scheme.
/// `rhs` fills the ghosts of the stage it is given and evaluates `L`.
pub fn tvd_rk3_step<const M: usize>(
    field: &GridField<M>,
    dt: f64,
    mut rhs: impl FnMut(&mut GridField<M>) -> Result<Vec<ConservedVector<M>>>,
) -> Result<GridField<M>> {
    let t = field.time;
    let mut u0 = field.clone();
    let l0 = rhs(&mut u0)?;
    let mut u1 = combine(0.0, &u0, 1.0, &u0, dt, &l0, t + dt)?;
    let l1 = rhs(&mut u1)?;
    let mut u2 = combine(0.75, &u0, 0.25, &u1, dt, &l1, t + 0.5 * dt)?;
    let l2 = rhs(&mut u2)?;
    combine(1.0 / 3.0, &u0, 2.0 / 3.0, &u2, dt, &l2, t + dt)
}
