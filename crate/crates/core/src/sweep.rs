//! Dimension-by-dimension line sweeps shared by the HFVS update and the
//! WENO semi-discretization.

use rayon::prelude::*;

use crate::error::HfvsError;
use crate::mesh::GridField;
use crate::physics::{Axis, ConservedVector};

/// Failure inside a sweep, located by interior cell `(i, j)`.
#[derive(Debug, Clone)]
pub(crate) struct CellError {
    pub cell: (usize, usize),
    pub source: HfvsError,
}

impl CellError {
    pub fn into_rejection(self, time: f64, dt: f64) -> HfvsError {
        HfvsError::StepRejected {
            step: 0,
            time,
            dt,
            cell: self.cell,
            source: Box::new(self.source),
        }
    }
}

/// Failure at line-local interior index.
pub(crate) type LineResult<T> = std::result::Result<T, (usize, HfvsError)>;

/// `(0..n).map(f)`, optionally on the rayon pool, stopping at the first error.
pub(crate) fn collect_range<T, F>(parallel: bool, n: usize, f: F) -> LineResult<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> LineResult<T> + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// `(0..n).map(f)`, optionally on the rayon pool.
pub(crate) fn map_range<T, F>(parallel: bool, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// Applies `line_op` to every interior row (x) and, in 2D, every interior
/// column (y), and returns the summed per-cell contributions in row-major
/// interior order. `line_op` gets the line with ghosts and returns one
/// contribution per interior cell.
pub(crate) fn sweep<const M: usize, F>(
    field: &GridField<M>,
    parallel: bool,
    line_op: F,
) -> Result<Vec<ConservedVector<M>>, CellError>
where
    F: Fn(&[ConservedVector<M>], Axis, bool) -> LineResult<Vec<ConservedVector<M>>> + Sync,
{
    let spec = field.spec;
    let (nx, ny) = (spec.nx, spec.ny);
    // 2D parallelises across lines, 1D inside the single line.
    let inner_parallel = parallel && !spec.is_2d();
    let outer_parallel = parallel && spec.is_2d();

    let rows: Vec<LineResult<Vec<ConservedVector<M>>>> = if outer_parallel {
        (0..ny).into_par_iter().map(|j| line_op(field.row(j), Axis::X, false)).collect()
    } else {
        (0..ny).map(|j| line_op(field.row(j), Axis::X, inner_parallel)).collect()
    };
    let mut out = Vec::with_capacity(nx * ny);
    for (j, row) in rows.into_iter().enumerate() {
        let row = row.map_err(|(i, source)| CellError { cell: (i, j), source })?;
        out.extend(row);
    }
    if !spec.is_2d() {
        return Ok(out);
    }

    let column_op = |i: usize| line_op(&field.column(i), Axis::Y, false);
    let columns: Vec<LineResult<Vec<ConservedVector<M>>>> = if outer_parallel {
        (0..nx).into_par_iter().map(column_op).collect()
    } else {
        (0..nx).map(column_op).collect()
    };
    for (i, column) in columns.into_iter().enumerate() {
        let column = column.map_err(|(j, source)| CellError { cell: (i, j), source })?;
        for (j, inc) in column.into_iter().enumerate() {
            let x_part = out[j * nx + i];
            // The x and y parts are combined only by this single addition.
            out[j * nx + i] = x_part + inc;
        }
    }
    Ok(out)
}
