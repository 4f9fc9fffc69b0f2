//! Scheme selection, the conservative single-step update and the
//! time-marching loop.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::baseline::{semidiscrete_rhs_weno, tvd_rk3_step};
use crate::error::{HfvsError, Result};
use crate::flux::{hfvs_time_integrated_flux, InterfaceData, JacobianEval, LeadingTermKind};
use crate::mesh::{cfl_dt, clip_to_end, fill_ghosts, Boundaries, GridField};
use crate::physics::{Axis, ConservedVector, Physics};
use crate::reconstruction::{reconstruct_cell_with, CellExpansion, FaceWeights, Order, StencilWindow, WenoOrder};
use crate::sweep::{collect_range, map_range, sweep, LineResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Hfvs(Order),
    WenoRk3(WenoOrder),
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Hfvs(Order::Two),
        Scheme::Hfvs(Order::Three),
        Scheme::Hfvs(Order::Five),
        Scheme::WenoRk3(WenoOrder::Three),
        Scheme::WenoRk3(WenoOrder::Five),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Hfvs(Order::Two) => "hfvs2",
            Scheme::Hfvs(Order::Three) => "hfvs3",
            Scheme::Hfvs(Order::Five) => "hfvs5",
            Scheme::WenoRk3(WenoOrder::Three) => "weno3rk3",
            Scheme::WenoRk3(WenoOrder::Five) => "weno5rk3",
        }
    }

    pub fn ghost_width(&self) -> usize {
        match self {
            Scheme::Hfvs(order) => order.ghost_width(),
            Scheme::WenoRk3(order) => order.radius() + 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = HfvsError;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| {
            HfvsError::InvalidParameter(format!(
                "unknown scheme `{s}`, expected one of hfvs2, hfvs3, hfvs5, weno3rk3, weno5rk3"
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub leading_term: LeadingTermKind,
    pub jacobian_eval: JacobianEval,
    pub cfl: f64,
    /// Retry a rejected HFVS step with the first-order flux.
    pub fallback_first_order: bool,
    /// Data-parallel sweeps on the current rayon pool.
    pub parallel: bool,
    /// Constant step (the last one still clipped to land on the end time)
    /// in place of the CFL step, so two schemes can share one step sequence.
    pub fixed_dt: Option<f64>,
    /// Blending of the HFVS face reconstructions.
    pub face_weights: FaceWeights,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, cfl: f64) -> Self {
        Self {
            scheme,
            leading_term: LeadingTermKind::StegerWarming,
            jacobian_eval: JacobianEval::InterfaceLimit,
            cfl,
            fallback_first_order: false,
            parallel: false,
            fixed_dt: None,
            face_weights: FaceWeights::Nonlinear,
        }
    }

    pub fn with_leading_term(mut self, kind: LeadingTermKind) -> Self {
        self.leading_term = kind;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(HfvsError::InvalidParameter(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(HfvsError::InvalidParameter(format!(
                    "fixed time step must be positive, got {dt}"
                )));
            }
        }
        Ok(())
    }
}

/// Cell expansions for line cells `g-1 ..= g+n`, reverting to the cell
/// average wherever a reconstructed face limit is not admissible.
#[allow(clippy::too_many_arguments)]
fn line_expansions<P: Physics<M>, const M: usize>(
    physics: &P,
    line: &[ConservedVector<M>],
    n: usize,
    g: usize,
    h: f64,
    order: Order,
    weights: FaceWeights,
    first_order: bool,
    parallel: bool,
) -> Vec<CellExpansion<M>> {
    let r = order.radius();
    map_range(parallel, n + 2, |e| {
        let c = g - 1 + e;
        if first_order {
            return CellExpansion::constant(order, line[c]);
        }
        let exp = reconstruct_cell_with(order, &StencilWindow::new(&line[c - r..=c + r], h), weights);
        if physics.is_admissible(&exp.w_left) && physics.is_admissible(&exp.w_right) {
            exp
        } else {
            CellExpansion::constant(order, line[c])
        }
    })
}

/// `-(F_{i+1/2} - F_{i-1/2}) / dx` per interior cell of one line, with
/// time-integrated HFVS fluxes.
#[allow(clippy::too_many_arguments)]
fn hfvs_line<P: Physics<M>, const M: usize>(
    physics: &P,
    line: &[ConservedVector<M>],
    g: usize,
    order: Order,
    h: f64,
    dt: f64,
    axis: Axis,
    config: &SchemeConfig,
    first_order: bool,
    parallel: bool,
) -> LineResult<Vec<ConservedVector<M>>> {
    let n = line.len() - 2 * g;
    let expansions = line_expansions(physics, line, n, g, h, order, config.face_weights, first_order, parallel);
    // Face f sits between line cells g-1+f and g+f.
    let fluxes = collect_range(parallel, n + 1, |f| {
        let iface = InterfaceData { left: &expansions[f], right: &expansions[f + 1], dx: h, axis };
        hfvs_time_integrated_flux(physics, &iface, dt, config.leading_term, config.jacobian_eval)
            .map(|flux| flux.value)
            .map_err(|e| (f.min(n - 1), e))
    })?;
    Ok((0..n).map(|i| (fluxes[i] - fluxes[i + 1]) / h).collect())
}

fn hfvs_update<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &GridField<M>,
    dt: f64,
    order: Order,
    config: &SchemeConfig,
    first_order: bool,
) -> Result<GridField<M>> {
    let spec = field.spec;
    spec.validate(order.ghost_width())?;
    let increments = sweep(field, config.parallel, |line, axis, parallel| {
        let h = match axis {
            Axis::X => spec.dx(),
            Axis::Y => spec.dy(),
        };
        hfvs_line(physics, line, spec.ghost, order, h, dt, axis, config, first_order, parallel)
    })
    .map_err(|e| e.into_rejection(field.time, dt))?;

    let mut next = field.clone();
    for j in 0..spec.ny {
        for i in 0..spec.nx {
            let w = next.get_mut(i as isize, j as isize);
            *w += increments[j * spec.nx + i];
        }
    }
    next.time = field.time + dt;
    if let Some((cell, source)) = next.first_invalid(physics) {
        return Err(HfvsError::StepRejected {
            step: 0,
            time: field.time,
            dt,
            cell,
            source: Box::new(source),
        });
    }
    Ok(next)
}

/// One HFVS step `W^{n+1} = W^n - (Fhat_{j+1/2} - Fhat_{j-1/2}) / dx` (plus
/// the y faces in 2D) on a field whose ghosts are filled.
pub fn advance_step_hfvs<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &GridField<M>,
    dt: f64,
    config: &SchemeConfig,
) -> Result<GridField<M>> {
    let Scheme::Hfvs(order) = config.scheme else {
        return Err(HfvsError::InvalidParameter(format!(
            "{} is not an HFVS scheme",
            config.scheme
        )));
    };
    hfvs_update(physics, field, dt, order, config, false)
}

/// First-order variant of [`advance_step_hfvs`]: cell averages as face
/// values, no derivative terms.
pub fn advance_step_first_order<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &GridField<M>,
    dt: f64,
    config: &SchemeConfig,
) -> Result<GridField<M>> {
    let order = match config.scheme {
        Scheme::Hfvs(order) => order,
        Scheme::WenoRk3(_) => Order::Two,
    };
    hfvs_update(physics, field, dt, order, config, true)
}

/// One step of the configured scheme. Ghosts of `field` must be filled; the
/// Runge-Kutta stages refill their own.
pub fn advance_step<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &GridField<M>,
    dt: f64,
    config: &SchemeConfig,
    bcs: &Boundaries<M>,
) -> Result<GridField<M>> {
    match config.scheme {
        Scheme::Hfvs(_) => advance_step_hfvs(physics, field, dt, config),
        Scheme::WenoRk3(order) => {
            let next = tvd_rk3_step(field, dt, |stage: &mut GridField<M>| {
                fill_ghosts(physics, stage, bcs);
                semidiscrete_rhs_weno(physics, stage, order, config.parallel)
            })?;
            if let Some((cell, source)) = next.first_invalid(physics) {
                return Err(HfvsError::StepRejected {
                    step: 0,
                    time: field.time,
                    dt,
                    cell,
                    source: Box::new(source),
                });
            }
            Ok(next)
        }
    }
}

/// Per-step statistics handed to observers.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<const M: usize> {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    pub totals: ConservedVector<M>,
    pub first_order_fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats<const M: usize> {
    pub steps: usize,
    pub wall_seconds: f64,
    pub initial_totals: ConservedVector<M>,
    pub final_totals: ConservedVector<M>,
    /// `sum |W| dV` of the initial field, the scale for drift.
    pub initial_abs_totals: ConservedVector<M>,
    pub fallback_steps: usize,
    pub min_dt: f64,
    pub max_dt: f64,
}

impl<const M: usize> RunStats<M> {
    /// Change of each conserved total relative to the initial `sum |W| dV`.
    pub fn conservation_drift(&self) -> ConservedVector<M> {
        ConservedVector::<M>::from_fn(|i, _| {
            let scale = self.initial_abs_totals[i];
            let change = (self.final_totals[i] - self.initial_totals[i]).abs();
            if scale > 0.0 {
                change / scale
            } else {
                change
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome<const M: usize> {
    pub field: GridField<M>,
    pub stats: RunStats<M>,
}

/// Marches `initial` to `t_end`: fill ghosts, choose the CFL step (clipped to
/// land on `t_end`), advance. `observer` sees every accepted step.
pub fn run_to_time<P: Physics<M>, const M: usize>(
    physics: &P,
    initial: GridField<M>,
    t_end: f64,
    config: &SchemeConfig,
    bcs: &Boundaries<M>,
    observer: &mut dyn FnMut(&StepRecord<M>, &GridField<M>),
) -> Result<RunOutcome<M>> {
    config.validate()?;
    bcs.validate()?;
    initial.spec.validate(config.scheme.ghost_width())?;
    if t_end < initial.time {
        return Err(HfvsError::InvalidParameter(format!(
            "end time {t_end} precedes the initial time {}",
            initial.time
        )));
    }
    let started = Instant::now();
    let initial_totals = initial.totals();
    let initial_abs_totals = initial.abs_totals();
    let mut field = initial;
    let mut steps = 0;
    let mut fallback_steps = 0;
    let (mut min_dt, mut max_dt) = (f64::INFINITY, 0.0f64);

    while field.time < t_end {
        fill_ghosts(physics, &mut field, bcs);
        let raw = match config.fixed_dt {
            Some(dt) => dt,
            None => cfl_dt(physics, &field, config.cfl)?,
        };
        let dt = clip_to_end(raw, field.time, t_end);
        if dt <= 0.0 {
            break;
        }
        let mut used_fallback = false;
        let attempt = advance_step(physics, &field, dt, config, bcs);
        let next = match attempt {
            Ok(next) => next,
            Err(err) if config.fallback_first_order && matches!(config.scheme, Scheme::Hfvs(_)) => {
                used_fallback = true;
                advance_step_first_order(physics, &field, dt, config)
                    .map_err(|_| with_step(err, steps + 1))?
            }
            Err(err) => return Err(with_step(err, steps + 1)),
        };
        steps += 1;
        fallback_steps += used_fallback as usize;
        min_dt = min_dt.min(dt);
        max_dt = max_dt.max(dt);
        let last = dt >= t_end - field.time;
        field = next;
        if last {
            field.time = t_end;
        }
        let record = StepRecord {
            step: steps,
            time: field.time,
            dt,
            totals: field.totals(),
            first_order_fallback: used_fallback,
        };
        observer(&record, &field);
    }
    fill_ghosts(physics, &mut field, bcs);

    let stats = RunStats {
        steps,
        wall_seconds: started.elapsed().as_secs_f64(),
        initial_totals,
        final_totals: field.totals(),
        initial_abs_totals,
        fallback_steps,
        min_dt: if steps == 0 { 0.0 } else { min_dt },
        max_dt,
    };
    Ok(RunOutcome { field, stats })
}

fn with_step(err: HfvsError, step: usize) -> HfvsError {
    match err {
        HfvsError::StepRejected { time, dt, cell, source, .. } => {
            HfvsError::StepRejected { step, time, dt, cell, source }
        }
        other => other,
    }
}
