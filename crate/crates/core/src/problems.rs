//! Catalog of named test problems: initial data, boundary conditions, end
//! times, exact solutions where known and fine-grid reference solutions.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::driver::{run_to_time, Scheme, SchemeConfig};
use crate::error::{HfvsError, Result};
use crate::mesh::{BoundaryCondition, Boundaries, CellBounds, Dimension, GridField, GridSpec};
use crate::physics::{
    ConservedVector, EosParams, Euler1d, Euler2d, LinearAdvection, Physics, PrimitiveVector,
};
use crate::reconstruction::WenoOrder;

/// 5-point Gauss-Legendre nodes and weights on `[-1, 1]`.
const GAUSS_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Point value of the conserved variables at `(x, y)`.
pub type InitialCondition<const M: usize> = Arc<dyn Fn(f64, f64) -> ConservedVector<M> + Send + Sync>;

/// How a problem's error or distance is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceKind {
    /// Closed-form cell averages via [`ProblemSpec::exact_cell_average`].
    Exact,
    /// A baseline run on a fine grid.
    FineGrid { cells: usize, scheme: Scheme, cfl: f64 },
    None,
}

#[derive(Clone)]
pub struct ProblemSpec<const M: usize> {
    pub name: &'static str,
    pub dimension: Dimension,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub initial: InitialCondition<M>,
    pub boundaries: Boundaries<M>,
    pub t_end: f64,
    pub default_cells: (usize, usize),
    pub default_cfl: f64,
    pub reference: ReferenceKind,
    exact: Option<Arc<dyn Fn(CellBounds, f64) -> ConservedVector<M> + Send + Sync>>,
}

impl<const M: usize> std::fmt::Debug for ProblemSpec<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("x_range", &self.x_range)
            .field("y_range", &self.y_range)
            .field("boundaries", &self.boundaries)
            .field("t_end", &self.t_end)
            .field("reference", &self.reference)
            .finish()
    }
}

impl<const M: usize> ProblemSpec<M> {
    pub fn grid(&self, nx: usize, ny: usize, ghost: usize) -> GridSpec {
        match self.dimension {
            Dimension::One => GridSpec::new_1d(nx, self.x_range, ghost),
            Dimension::Two => GridSpec::new_2d(nx, ny, self.x_range, self.y_range, ghost),
        }
    }

    pub fn has_exact_solution(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_cell_average(&self, bounds: CellBounds, t: f64) -> Option<ConservedVector<M>> {
        self.exact.as_ref().map(|f| f(bounds, t))
    }

    /// Cell averages of the initial condition by tensor Gauss-Legendre
    /// quadrature. Cells whose quadrature points all see the same state
    /// take that state exactly.
    pub fn init_cell_averages<P: Physics<M>>(&self, physics: &P, grid: GridSpec) -> Result<GridField<M>> {
        if grid.dimension != self.dimension {
            return Err(HfvsError::InvalidParameter(format!(
                "{} is {:?}-dimensional, grid is {:?}",
                self.name, self.dimension, grid.dimension
            )));
        }
        grid.validate(0)?;
        let field = GridField::from_fn(grid, |i, j| {
            let b = grid.cell_bounds(i as isize, j as isize);
            cell_average(&*self.initial, b, self.dimension)
        });
        if let Some(((i, j), source)) = field.first_invalid(physics) {
            return Err(HfvsError::InvalidParameter(format!(
                "{} initial data invalid in cell ({i}, {j}): {source}",
                self.name
            )));
        }
        Ok(field)
    }
}

fn cell_average<const M: usize>(
    f: &dyn Fn(f64, f64) -> ConservedVector<M>,
    b: CellBounds,
    dimension: Dimension,
) -> ConservedVector<M> {
    let map = |(lo, hi): (f64, f64), s: f64| 0.5 * (lo + hi) + 0.5 * (hi - lo) * s;
    let y_points: &[(f64, f64)] = &match dimension {
        Dimension::One => vec![(0.5 * (b.y.0 + b.y.1), 1.0)],
        Dimension::Two => GAUSS_NODES
            .iter()
            .zip(GAUSS_WEIGHTS)
            .map(|(&s, w)| (map(b.y, s), 0.5 * w))
            .collect(),
    };
    let mut sum = ConservedVector::<M>::zeros();
    let mut first: Option<ConservedVector<M>> = None;
    let mut uniform = true;
    for &(y, wy) in y_points {
        for (&s, wx) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let v = f(map(b.x, s), y);
            match first {
                None => first = Some(v),
                Some(f0) => uniform &= f0 == v,
            }
            sum += v * (0.5 * wx * wy);
        }
    }
    match first {
        Some(v) if uniform => v,
        _ => sum,
    }
}

/// `sin(2 pi (x - t))`.
pub fn exact_solution_advection(x: f64, t: f64) -> f64 {
    (2.0 * PI * (x - t)).sin()
}

/// Average of [`exact_solution_advection`] over `[a, b]`.
pub fn exact_cell_average_advection(a: f64, b: f64, t: f64) -> f64 {
    ((2.0 * PI * (a - t)).cos() - (2.0 * PI * (b - t)).cos()) / (2.0 * PI * (b - a))
}

pub fn advection_sine() -> ProblemSpec<1> {
    ProblemSpec {
        name: "advection-sine",
        dimension: Dimension::One,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        initial: Arc::new(|x, _| ConservedVector::<1>::from([exact_solution_advection(x, 0.0)])),
        boundaries: Boundaries::uniform(BoundaryCondition::Periodic),
        t_end: 1.0,
        default_cells: (640, 1),
        default_cfl: 0.95,
        reference: ReferenceKind::Exact,
        exact: Some(Arc::new(|b, t| ConservedVector::<1>::from([exact_cell_average_advection(b.x.0, b.x.1, t)]))),
    }
}

/// The sine problem with ghosts taken from the exact solution instead of
/// periodic copies.
pub fn advection_sine_inflow() -> ProblemSpec<1> {
    let mut spec = advection_sine();
    spec.name = "advection-sine-inflow";
    let exact = spec.exact.clone().expect("exact solution");
    spec.boundaries = Boundaries::uniform(BoundaryCondition::InflowExact(exact));
    spec
}

fn euler1d_initial(
    physics: Euler1d,
    prim: impl Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
) -> InitialCondition<3> {
    Arc::new(move |x, _| {
        let (rho, u, p) = prim(x);
        physics.conserved_from_primitive(&PrimitiveVector::new_1d(rho, u, p))
    })
}

fn euler2d_initial(
    physics: Euler2d,
    prim: impl Fn(f64, f64) -> (f64, f64, f64, f64) + Send + Sync + 'static,
) -> InitialCondition<4> {
    Arc::new(move |x, y| {
        let (rho, u, v, p) = prim(x, y);
        physics.conserved_from_primitive(&PrimitiveVector::new_2d(rho, u, v, p))
    })
}

pub fn shu_osher(physics: Euler1d) -> ProblemSpec<3> {
    ProblemSpec {
        name: "shu-osher",
        dimension: Dimension::One,
        x_range: (-1.0, 1.0),
        y_range: (0.0, 1.0),
        initial: euler1d_initial(physics, |x| {
            if x < -0.8 {
                (3.857143, 2.629369, 10.333333)
            } else {
                (1.0 + 0.2 * (5.0 * PI * x).sin(), 0.0, 1.0)
            }
        }),
        boundaries: Boundaries::uniform(BoundaryCondition::Outflow),
        t_end: 0.47,
        default_cells: (200, 1),
        default_cfl: 0.95,
        reference: ReferenceKind::FineGrid {
            cells: 2000,
            scheme: Scheme::WenoRk3(WenoOrder::Three),
            cfl: 0.95,
        },
        exact: None,
    }
}

pub fn blast_wave(physics: Euler1d) -> ProblemSpec<3> {
    ProblemSpec {
        name: "blast-wave",
        dimension: Dimension::One,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        initial: euler1d_initial(physics, |x| {
            if x < 0.1 {
                (1.0, 0.0, 1000.0)
            } else if x < 0.9 {
                (1.0, 0.0, 0.01)
            } else {
                (1.0, 0.0, 100.0)
            }
        }),
        boundaries: Boundaries::uniform(BoundaryCondition::Reflective),
        t_end: 0.038,
        default_cells: (800, 1),
        default_cfl: 0.95,
        reference: ReferenceKind::FineGrid {
            cells: 10000,
            scheme: Scheme::WenoRk3(WenoOrder::Three),
            cfl: 0.6,
        },
        exact: None,
    }
}

/// Smooth periodic density wave `rho = 1 + 0.2 sin(2 pi x)` carried at unit
/// speed and pressure.
pub fn density_wave(physics: Euler1d) -> ProblemSpec<3> {
    let rho = |x: f64| 1.0 + 0.2 * (2.0 * PI * x).sin();
    let exact = move |b: CellBounds, t: f64| {
        let (a, c) = b.x;
        let mean_rho = 1.0
            + 0.2 * ((2.0 * PI * (a - t)).cos() - (2.0 * PI * (c - t)).cos()) / (2.0 * PI * (c - a));
        let e = 1.0 / (physics.eos.gamma() - 1.0);
        ConservedVector::<3>::from([mean_rho, mean_rho, e + 0.5 * mean_rho])
    };
    ProblemSpec {
        name: "density-wave",
        dimension: Dimension::One,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        initial: euler1d_initial(physics, move |x| (rho(x), 1.0, 1.0)),
        boundaries: Boundaries::uniform(BoundaryCondition::Periodic),
        t_end: 1.0,
        default_cells: (100, 1),
        default_cfl: 0.95,
        reference: ReferenceKind::Exact,
        exact: Some(Arc::new(exact)),
    }
}

pub fn riemann_2d_quadrants(physics: Euler2d) -> ProblemSpec<4> {
    ProblemSpec {
        name: "riemann-2d-quadrants",
        dimension: Dimension::Two,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        initial: euler2d_initial(physics, |x, y| {
            if (x < 0.5) == (y < 0.5) {
                (1.0, 0.0, 0.0, 1.0)
            } else {
                (0.1, 0.0, 0.0, 0.1)
            }
        }),
        boundaries: Boundaries::uniform(BoundaryCondition::Outflow),
        t_end: 0.15,
        default_cells: (100, 100),
        default_cfl: 0.45,
        reference: ReferenceKind::None,
        exact: None,
    }
}

pub fn riemann_2d_disk(physics: Euler2d) -> ProblemSpec<4> {
    ProblemSpec {
        name: "riemann-2d-disk",
        dimension: Dimension::Two,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        initial: euler2d_initial(physics, |x, y| {
            let (dx, dy) = (x - 0.5, y - 0.5);
            if (dx * dx + dy * dy).sqrt() <= 0.3 {
                (1.0, 0.0, 0.0, 1.0)
            } else {
                (0.125, 0.0, 0.0, 0.1)
            }
        }),
        boundaries: Boundaries::uniform(BoundaryCondition::Reflective),
        t_end: 1.0,
        default_cells: (100, 100),
        default_cfl: 0.45,
        reference: ReferenceKind::None,
        exact: None,
    }
}

/// A catalog entry together with its physics.
#[derive(Debug, Clone)]
pub enum AnyProblem {
    Advection(LinearAdvection, ProblemSpec<1>),
    Euler1d(Euler1d, ProblemSpec<3>),
    Euler2d(Euler2d, ProblemSpec<4>),
}

impl AnyProblem {
    pub const NAMES: [&'static str; 7] = [
        "advection-sine",
        "advection-sine-inflow",
        "shu-osher",
        "blast-wave",
        "density-wave",
        "riemann-2d-quadrants",
        "riemann-2d-disk",
    ];

    pub fn by_name(name: &str, eos: EosParams) -> Result<Self> {
        let e1 = Euler1d::new(eos);
        let e2 = Euler2d::new(eos);
        Ok(match name {
            "advection-sine" => AnyProblem::Advection(LinearAdvection::default(), advection_sine()),
            "advection-sine-inflow" => {
                AnyProblem::Advection(LinearAdvection::default(), advection_sine_inflow())
            }
            "shu-osher" => AnyProblem::Euler1d(e1, shu_osher(e1)),
            "blast-wave" => AnyProblem::Euler1d(e1, blast_wave(e1)),
            "density-wave" => AnyProblem::Euler1d(e1, density_wave(e1)),
            "riemann-2d-quadrants" => AnyProblem::Euler2d(e2, riemann_2d_quadrants(e2)),
            "riemann-2d-disk" => AnyProblem::Euler2d(e2, riemann_2d_disk(e2)),
            other => {
                return Err(HfvsError::InvalidParameter(format!(
                    "unknown problem `{other}`, expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnyProblem::Advection(_, s) => s.name,
            AnyProblem::Euler1d(_, s) => s.name,
            AnyProblem::Euler2d(_, s) => s.name,
        }
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            AnyProblem::Advection(_, s) => s.dimension,
            AnyProblem::Euler1d(_, s) => s.dimension,
            AnyProblem::Euler2d(_, s) => s.dimension,
        }
    }

    pub fn t_end(&self) -> f64 {
        match self {
            AnyProblem::Advection(_, s) => s.t_end,
            AnyProblem::Euler1d(_, s) => s.t_end,
            AnyProblem::Euler2d(_, s) => s.t_end,
        }
    }

    pub fn default_cells(&self) -> (usize, usize) {
        match self {
            AnyProblem::Advection(_, s) => s.default_cells,
            AnyProblem::Euler1d(_, s) => s.default_cells,
            AnyProblem::Euler2d(_, s) => s.default_cells,
        }
    }

    pub fn default_cfl(&self) -> f64 {
        match self {
            AnyProblem::Advection(_, s) => s.default_cfl,
            AnyProblem::Euler1d(_, s) => s.default_cfl,
            AnyProblem::Euler2d(_, s) => s.default_cfl,
        }
    }

    pub fn reference(&self) -> ReferenceKind {
        match self {
            AnyProblem::Advection(_, s) => s.reference,
            AnyProblem::Euler1d(_, s) => s.reference,
            AnyProblem::Euler2d(_, s) => s.reference,
        }
    }
}

/// A fine-grid solution of a 1D problem at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference<const M: usize> {
    pub problem: String,
    pub scheme: Scheme,
    pub cfl: f64,
    pub x_range: (f64, f64),
    pub time: f64,
    pub values: Vec<ConservedVector<M>>,
}

const CACHE_MAGIC: &str = "hfvs-reference";
const CACHE_VERSION: u32 = 1;

impl<const M: usize> Reference<M> {
    pub fn cells(&self) -> usize {
        self.values.len()
    }

    /// Cell averages on a uniform `n`-cell grid of the same domain. Integer
    /// coarsening ratios average blocks; other ratios weigh fine cells by
    /// their overlap.
    pub fn project(&self, n: usize) -> Result<Vec<ConservedVector<M>>> {
        let fine = self.cells();
        if n == 0 || n > fine {
            return Err(HfvsError::InvalidParameter(format!(
                "cannot project {fine} reference cells onto {n} cells"
            )));
        }
        if fine % n == 0 {
            let k = fine / n;
            return Ok(self
                .values
                .chunks(k)
                .map(|block| {
                    if k == 1 {
                        block[0]
                    } else {
                        block.iter().fold(ConservedVector::<M>::zeros(), |a, v| a + v) / k as f64
                    }
                })
                .collect());
        }
        // Overlap in units of fine cells: coarse cell c covers [c r, (c+1) r).
        let ratio = fine as f64 / n as f64;
        Ok((0..n)
            .map(|c| {
                let (lo, hi) = (c as f64 * ratio, (c + 1) as f64 * ratio);
                let mut sum = ConservedVector::<M>::zeros();
                let first = lo.floor() as usize;
                let last = (hi.ceil() as usize).min(fine);
                for f in first..last {
                    let overlap = (hi.min(f as f64 + 1.0) - lo.max(f as f64)).max(0.0);
                    sum += self.values[f] * overlap;
                }
                sum / ratio
            })
            .collect())
    }

    fn cache_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CACHE_MAGIC} {CACHE_VERSION}");
        let _ = writeln!(out, "problem {}", self.problem);
        let _ = writeln!(out, "scheme {}", self.scheme);
        let _ = writeln!(out, "cfl {:?}", self.cfl);
        let _ = writeln!(out, "domain {:?} {:?}", self.x_range.0, self.x_range.1);
        let _ = writeln!(out, "time {:?}", self.time);
        let _ = writeln!(out, "components {M}");
        let _ = writeln!(out, "cells {}", self.values.len());
        for v in &self.values {
            let row: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    fn parse_cache(path: &Path, text: &str) -> Result<Self> {
        let bad = |message: String| HfvsError::MalformedReference { path: path.display().to_string(), message };
        let mut lines = text.lines();
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{key}` line")))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(str::to_owned)
                .ok_or_else(|| bad(format!("expected `{key}`, found `{line}`")))
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("bad number `{s}`: {e}")));

        let version = field(CACHE_MAGIC)?;
        if version != CACHE_VERSION.to_string() {
            return Err(bad(format!("unsupported version {version}")));
        }
        let problem = field("problem")?;
        let scheme: Scheme = field("scheme")?.parse().map_err(|e: HfvsError| bad(e.to_string()))?;
        let cfl = num(&field("cfl")?)?;
        let domain = field("domain")?;
        let (a, b) = domain.split_once(' ').ok_or_else(|| bad("bad domain".into()))?;
        let x_range = (num(a)?, num(b)?);
        let time = num(&field("time")?)?;
        let comps = field("components")?;
        if comps != M.to_string() {
            return Err(bad(format!("expected {M} components, found {comps}")));
        }
        let cells: usize = field("cells")?.parse().map_err(|e| bad(format!("bad cell count: {e}")))?;
        let mut values = Vec::with_capacity(cells);
        for line in lines.by_ref().take(cells) {
            let parts: Vec<f64> = line.split_whitespace().map(num).collect::<Result<_>>()?;
            if parts.len() != M {
                return Err(bad(format!("row `{line}` has {} values", parts.len())));
            }
            values.push(ConservedVector::<M>::from_iterator(parts));
        }
        if values.len() != cells {
            return Err(bad(format!("expected {cells} rows, found {}", values.len())));
        }
        Ok(Self { problem, scheme, cfl, x_range, time, values })
    }
}

fn cache_path(dir: &Path, problem: &str, cells: usize, scheme: Scheme, cfl: f64, time: f64) -> PathBuf {
    dir.join(format!("{problem}-n{cells}-{scheme}-cfl{cfl}-t{time}.ref"))
}

static CACHE_LOCK: Mutex<()> = Mutex::new(());

/// Solves a 1D problem on `cells` cells with `scheme`, caching the result
/// under `cache_dir` when given.
pub fn generate_reference<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    cells: usize,
    scheme: Scheme,
    cfl: f64,
    cache_dir: Option<&Path>,
) -> Result<Reference<M>> {
    if spec.dimension != Dimension::One {
        return Err(HfvsError::InvalidParameter(format!(
            "fine-grid references are 1D only; {} is 2D",
            spec.name
        )));
    }
    let _guard = CACHE_LOCK.lock().unwrap_or_else(|p| p.into_inner());
    let path = cache_dir.map(|d| cache_path(d, spec.name, cells, scheme, cfl, spec.t_end));
    if let Some(path) = &path {
        if path.exists() {
            let text = fs::read_to_string(path)?;
            return Reference::parse_cache(path, &text);
        }
    }
    let grid = spec.grid(cells, 1, scheme.ghost_width());
    let initial = spec.init_cell_averages(physics, grid)?;
    let mut config = SchemeConfig::new(scheme, cfl);
    config.parallel = true;
    let outcome = run_to_time(physics, initial, spec.t_end, &config, &spec.boundaries, &mut |_, _| {})?;
    let reference = Reference {
        problem: spec.name.to_owned(),
        scheme,
        cfl,
        x_range: spec.x_range,
        time: outcome.field.time,
        values: outcome.field.interior_values(),
    };
    if let (Some(path), Some(dir)) = (&path, cache_dir) {
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension("ref.tmp");
        fs::write(&tmp, reference.cache_text())?;
        fs::rename(&tmp, path)?;
    }
    Ok(reference)
}
