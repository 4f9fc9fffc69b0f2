//! Uniform structured grids with ghost layers, boundary conditions and the
//! CFL time-step restriction.

use std::fmt;
use std::sync::Arc;

use crate::error::{HfvsError, Result};
use crate::physics::{Axis, ConservedVector, Physics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    One,
    Two,
}

/// Cell counts, physical extents and ghost width of a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub dimension: Dimension,
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub ghost: usize,
}

/// Physical extent of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellBounds {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl GridSpec {
    pub fn new_1d(n: usize, x_range: (f64, f64), ghost: usize) -> Self {
        Self { dimension: Dimension::One, nx: n, ny: 1, x_range, y_range: (0.0, 1.0), ghost }
    }

    pub fn new_2d(
        nx: usize,
        ny: usize,
        x_range: (f64, f64),
        y_range: (f64, f64),
        ghost: usize,
    ) -> Self {
        Self { dimension: Dimension::Two, nx, ny, x_range, y_range, ghost }
    }

    pub fn with_ghost(mut self, ghost: usize) -> Self {
        self.ghost = ghost;
        self
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_range.1 - self.y_range.0) / self.ny as f64
    }

    pub fn is_2d(&self) -> bool {
        self.dimension == Dimension::Two
    }

    pub fn ghost_y(&self) -> usize {
        if self.is_2d() {
            self.ghost
        } else {
            0
        }
    }

    /// Row length including ghosts.
    pub fn stride(&self) -> usize {
        self.nx + 2 * self.ghost
    }

    pub fn rows(&self) -> usize {
        self.ny + 2 * self.ghost_y()
    }

    pub fn len(&self) -> usize {
        self.stride() * self.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.nx == 0 || self.ny == 0
    }

    /// Storage index of cell `(i, j)`; negative or `>= n` addresses ghosts.
    #[inline]
    pub fn index(&self, i: isize, j: isize) -> usize {
        let col = (i + self.ghost as isize) as usize;
        let row = (j + self.ghost_y() as isize) as usize;
        row * self.stride() + col
    }

    /// Bounds of cell `i` along x; valid for ghost indices too.
    pub fn x_bounds(&self, i: isize) -> (f64, f64) {
        let dx = self.dx();
        (self.x_range.0 + i as f64 * dx, self.x_range.0 + (i + 1) as f64 * dx)
    }

    pub fn y_bounds(&self, j: isize) -> (f64, f64) {
        let dy = self.dy();
        (self.y_range.0 + j as f64 * dy, self.y_range.0 + (j + 1) as f64 * dy)
    }

    pub fn cell_bounds(&self, i: isize, j: isize) -> CellBounds {
        CellBounds { x: self.x_bounds(i), y: self.y_bounds(j) }
    }

    pub fn x_center(&self, i: isize) -> f64 {
        self.x_range.0 + (i as f64 + 0.5) * self.dx()
    }

    pub fn y_center(&self, j: isize) -> f64 {
        self.y_range.0 + (j as f64 + 0.5) * self.dy()
    }

    pub fn cell_volume(&self) -> f64 {
        if self.is_2d() {
            self.dx() * self.dy()
        } else {
            self.dx()
        }
    }

    pub fn validate(&self, min_ghost: usize) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(HfvsError::InvalidParameter("grid has no cells".into()));
        }
        if self.ghost < min_ghost {
            return Err(HfvsError::InvalidParameter(format!(
                "ghost width {} below the required {}",
                self.ghost, min_ghost
            )));
        }
        if !(self.dx() > 0.0) || (self.is_2d() && !(self.dy() > 0.0)) {
            return Err(HfvsError::InvalidParameter("empty domain".into()));
        }
        Ok(())
    }
}

/// Cell averages of the conserved variables on a grid, ghosts included.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<const M: usize> {
    pub spec: GridSpec,
    pub data: Vec<ConservedVector<M>>,
    pub time: f64,
}

impl<const M: usize> GridField<M> {
    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, data: vec![ConservedVector::zeros(); spec.len()], time: 0.0 }
    }

    /// Interior cells from `f(i, j)`; ghosts start at zero.
    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(usize, usize) -> ConservedVector<M>) -> Self {
        let mut field = Self::zeros(spec);
        for j in 0..spec.ny {
            for i in 0..spec.nx {
                let k = spec.index(i as isize, j as isize);
                field.data[k] = f(i, j);
            }
        }
        field
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> &ConservedVector<M> {
        &self.data[self.spec.index(i, j)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: isize, j: isize) -> &mut ConservedVector<M> {
        let k = self.spec.index(i, j);
        &mut self.data[k]
    }

    pub fn interior(&self) -> impl Iterator<Item = (usize, usize, &ConservedVector<M>)> + '_ {
        let spec = self.spec;
        (0..spec.ny).flat_map(move |j| {
            (0..spec.nx).map(move |i| (i, j, self.get(i as isize, j as isize)))
        })
    }

    /// Interior values in row-major order.
    pub fn interior_values(&self) -> Vec<ConservedVector<M>> {
        self.interior().map(|(_, _, w)| *w).collect()
    }

    /// Row `j` including its x ghosts.
    pub fn row(&self, j: usize) -> &[ConservedVector<M>] {
        let start = self.spec.index(-(self.spec.ghost as isize), j as isize);
        &self.data[start..start + self.spec.stride()]
    }

    /// Column `i` including its y ghosts.
    pub fn column(&self, i: usize) -> Vec<ConservedVector<M>> {
        let g = self.spec.ghost_y() as isize;
        (-g..self.spec.ny as isize + g).map(|j| *self.get(i as isize, j)).collect()
    }

    /// Sum of the conserved variables times cell volume over the interior.
    pub fn totals(&self) -> ConservedVector<M> {
        let mut sum = ConservedVector::<M>::zeros();
        for (_, _, w) in self.interior() {
            sum += w;
        }
        sum * self.spec.cell_volume()
    }

    /// Like [`GridField::totals`] with absolute values.
    pub fn abs_totals(&self) -> ConservedVector<M> {
        let mut sum = ConservedVector::<M>::zeros();
        for (_, _, w) in self.interior() {
            sum += w.abs();
        }
        sum * self.spec.cell_volume()
    }

    /// First interior cell violating the physics' validity predicate.
    pub fn first_invalid<P: Physics<M>>(&self, physics: &P) -> Option<((usize, usize), HfvsError)> {
        self.interior()
            .find_map(|(i, j, w)| physics.check(w).err().map(|e| ((i, j), e)))
    }
}

/// Exact cell average at time `t`, used by [`BoundaryCondition::InflowExact`].
pub type ExactCellAverage<const M: usize> =
    Arc<dyn Fn(CellBounds, f64) -> ConservedVector<M> + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition<const M: usize> {
    Periodic,
    /// Zero-gradient extrapolation.
    Outflow,
    /// Mirror with the normal velocity negated.
    Reflective,
    /// Ghost values from a supplied exact solution.
    InflowExact(ExactCellAverage<M>),
}

impl<const M: usize> fmt::Debug for BoundaryCondition<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Periodic => f.write_str("Periodic"),
            BoundaryCondition::Outflow => f.write_str("Outflow"),
            BoundaryCondition::Reflective => f.write_str("Reflective"),
            BoundaryCondition::InflowExact(_) => f.write_str("InflowExact"),
        }
    }
}

/// One condition per side.
#[derive(Debug, Clone)]
pub struct Boundaries<const M: usize> {
    pub x_lo: BoundaryCondition<M>,
    pub x_hi: BoundaryCondition<M>,
    pub y_lo: BoundaryCondition<M>,
    pub y_hi: BoundaryCondition<M>,
}

impl<const M: usize> Boundaries<M> {
    pub fn uniform(bc: BoundaryCondition<M>) -> Self {
        Self { x_lo: bc.clone(), x_hi: bc.clone(), y_lo: bc.clone(), y_hi: bc }
    }

    pub fn validate(&self) -> Result<()> {
        let periodic = |b: &BoundaryCondition<M>| matches!(b, BoundaryCondition::Periodic);
        if periodic(&self.x_lo) != periodic(&self.x_hi)
            || periodic(&self.y_lo) != periodic(&self.y_hi)
        {
            return Err(HfvsError::InvalidParameter(
                "periodic boundaries must be paired on both sides of an axis".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Side {
    Lo,
    Hi,
}

/// Fill the ghost cells of one line (`n` interior cells, `g` ghosts per side).
#[allow(clippy::too_many_arguments)]
fn fill_line<P: Physics<M>, const M: usize>(
    physics: &P,
    line: &mut [ConservedVector<M>],
    n: usize,
    g: usize,
    bc: &BoundaryCondition<M>,
    side: Side,
    axis: Axis,
    exact: impl Fn(isize) -> CellBounds,
    time: f64,
) {
    for k in 0..g {
        // Interior index of the ghost and of the cell feeding it.
        let (ghost_cell, periodic_src, mirror_src, nearest) = match side {
            Side::Lo => (-(k as isize) - 1, n as isize - 1 - k as isize, k as isize, 0),
            Side::Hi => (n as isize + k as isize, k as isize, n as isize - 1 - k as isize, n - 1),
        };
        let at = |i: isize| (i + g as isize) as usize;
        let value = match bc {
            BoundaryCondition::Periodic => line[at(periodic_src)],
            BoundaryCondition::Outflow => line[at(nearest as isize)],
            BoundaryCondition::Reflective => physics.reflect(&line[at(mirror_src)], axis),
            BoundaryCondition::InflowExact(f) => f(exact(ghost_cell), time),
        };
        line[at(ghost_cell)] = value;
    }
}

/// Populate all ghost layers of `field` in place.
pub fn fill_ghosts<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &mut GridField<M>,
    bcs: &Boundaries<M>,
) {
    let spec = field.spec;
    let (g, nx, ny) = (spec.ghost, spec.nx, spec.ny);
    let time = field.time;
    let stride = spec.stride();
    for j in 0..ny {
        let start = spec.index(-(g as isize), j as isize);
        let line = &mut field.data[start..start + stride];
        let y = spec.y_bounds(j as isize);
        let bounds = |i: isize| CellBounds { x: spec.x_bounds(i), y };
        fill_line(physics, line, nx, g, &bcs.x_lo, Side::Lo, Axis::X, bounds, time);
        fill_line(physics, line, nx, g, &bcs.x_hi, Side::Hi, Axis::X, bounds, time);
    }
    if spec.is_2d() {
        let mut column = vec![ConservedVector::<M>::zeros(); ny + 2 * g];
        for i in 0..nx {
            for (jj, slot) in column.iter_mut().enumerate() {
                *slot = *field.get(i as isize, jj as isize - g as isize);
            }
            let x = spec.x_bounds(i as isize);
            let bounds = |j: isize| CellBounds { x, y: spec.y_bounds(j) };
            fill_line(physics, &mut column, ny, g, &bcs.y_lo, Side::Lo, Axis::Y, bounds, time);
            fill_line(physics, &mut column, ny, g, &bcs.y_hi, Side::Hi, Axis::Y, bounds, time);
            for k in 0..g {
                let lo = -(k as isize) - 1;
                let hi = (ny + k) as isize;
                *field.get_mut(i as isize, lo) = column[(lo + g as isize) as usize];
                *field.get_mut(i as isize, hi) = column[(hi + g as isize) as usize];
            }
        }
    }
}

/// Largest stable step over the interior:
/// `cfl dx / max(|u| + c)` in 1D, `cfl / max((|u| + c)/dx + (|v| + c)/dy)` in 2D.
pub fn cfl_dt<P: Physics<M>, const M: usize>(
    physics: &P,
    field: &GridField<M>,
    cfl: f64,
) -> Result<f64> {
    let spec = field.spec;
    let (dx, dy) = (spec.dx(), spec.dy());
    let mut rate: f64 = 0.0;
    for (_, _, w) in field.interior() {
        let mut r = physics.max_wave_speed(w, Axis::X)? / dx;
        if spec.is_2d() {
            r += physics.max_wave_speed(w, Axis::Y)? / dy;
        }
        rate = rate.max(r);
    }
    if rate > 0.0 && rate.is_finite() {
        Ok(cfl / rate)
    } else {
        Err(HfvsError::InvalidParameter(format!("no finite signal speed on the grid ({rate})")))
    }
}

/// `dt` shortened so the step lands exactly on `t_end`.
pub fn clip_to_end(dt: f64, time: f64, t_end: f64) -> f64 {
    dt.min(t_end - time).max(0.0)
}
