//! The subcommands. Each one runs, writes its artifacts under the
//! configured output directory and returns what it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use hfvs::physics::{EosParams, Physics};
use hfvs::problems::{generate_reference, AnyProblem, ProblemSpec, ReferenceKind};
use hfvs::{run_to_time, GridField, LeadingTermKind, Order, RunOutcome, Scheme, SchemeConfig, StepRecord, WenoOrder};
use serde::Serialize;

use crate::config::RunConfig;
use crate::fields::FieldTable;
use crate::report::{create, write_json, ErrorNorms, ErrorReport, RunSummary, TimingReport};
use crate::{io_error, HarnessError, Result};

macro_rules! with_problem {
    ($problem:expr, |$physics:ident, $spec:ident| $body:expr) => {
        match &$problem {
            AnyProblem::Advection($physics, $spec) => $body,
            AnyProblem::Euler1d($physics, $spec) => $body,
            AnyProblem::Euler2d($physics, $spec) => $body,
        }
    };
}

pub const DEFAULT_GRIDS: [usize; 6] = [20, 40, 80, 160, 320, 640];

type Observer<'a, const M: usize> = dyn FnMut(&StepRecord<M>, &GridField<M>) + Send + 'a;

pub fn load_problem(config: &RunConfig) -> Result<AnyProblem> {
    Ok(AnyProblem::by_name(&config.problem, EosParams::new(config.gamma)?)?)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_error(dir))
}

fn scheme_config<const M: usize>(config: &RunConfig, spec: &ProblemSpec<M>, scheme: Scheme) -> SchemeConfig {
    let mut sc = SchemeConfig::new(scheme, config.cfl.unwrap_or(spec.default_cfl));
    sc.leading_term = config.leading_term;
    sc.jacobian_eval = config.jacobian_eval;
    sc.fallback_first_order = config.fallback_first_order;
    sc.parallel = config.threads > 1;
    sc
}

fn cells<const M: usize>(config: &RunConfig, spec: &ProblemSpec<M>) -> (usize, usize) {
    (config.nx.unwrap_or(spec.default_cells.0), config.ny.unwrap_or(spec.default_cells.1))
}

fn end_time<const M: usize>(config: &RunConfig, spec: &ProblemSpec<M>) -> f64 {
    config.t_end.unwrap_or(spec.t_end)
}

fn initial_field<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
    scheme: Scheme,
) -> Result<GridField<M>> {
    let (nx, ny) = cells(config, spec);
    Ok(spec.init_cell_averages(physics, spec.grid(nx, ny, scheme.ghost_width()))?)
}

/// Runs inside a dedicated pool when more than one thread is requested.
fn march<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
    sc: &SchemeConfig,
    initial: GridField<M>,
    observer: &mut Observer<'_, M>,
) -> Result<RunOutcome<M>> {
    let t_end = end_time(config, spec);
    let go = move || run_to_time(physics, initial, t_end, sc, &spec.boundaries, observer);
    let outcome = if config.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| HarnessError::Usage(format!("cannot start {} threads: {e}", config.threads)))?;
        pool.install(go)
    } else {
        go()
    };
    Ok(outcome?)
}

fn solve<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
    sc: &SchemeConfig,
) -> Result<RunOutcome<M>> {
    let initial = initial_field(physics, spec, config, sc.scheme)?;
    march(physics, spec, config, sc, initial, &mut |_, _| {})
}

/// First-component errors against the exact cell averages, if known.
fn exact_errors<const M: usize>(spec: &ProblemSpec<M>, field: &GridField<M>) -> Option<ErrorNorms> {
    if !spec.has_exact_solution() {
        return None;
    }
    let errors: Vec<f64> = field
        .interior()
        .map(|(i, j, w)| {
            let exact = spec.exact_cell_average(field.spec.cell_bounds(i as isize, j as isize), field.time);
            w[0] - exact.map_or(f64::NAN, |e| e[0])
        })
        .collect();
    Some(ErrorNorms::from_errors(errors))
}

fn snapshot_name(step: usize) -> String {
    format!("field-{step:06}.csv")
}

pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let problem = load_problem(config)?;
    with_problem!(problem, |physics, spec| run_problem(physics, spec, config))
}

fn run_problem<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
) -> Result<RunSummary> {
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let sc = scheme_config(config, spec, config.scheme);
    let initial = initial_field(physics, spec, config, config.scheme)?;
    let write = |step: usize, field: &GridField<M>| -> Result<String> {
        let name = snapshot_name(step);
        FieldTable::from_field(physics, field).write(&dir.join(&name))?;
        Ok(name)
    };
    let mut snapshots = vec![write(0, &initial)?];
    let mut last_written = 0;
    let mut failure: Option<HarnessError> = None;
    let every = config.output_every;
    let outcome = march(physics, spec, config, &sc, initial, &mut |record, field| {
        if every > 0 && record.step % every == 0 && failure.is_none() {
            match write(record.step, field) {
                Ok(name) => {
                    snapshots.push(name);
                    last_written = record.step;
                }
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let stats = &outcome.stats;
    if stats.steps > last_written {
        snapshots.push(write(stats.steps, &outcome.field)?);
    }
    let (nx, ny) = cells(config, spec);
    let summary = RunSummary {
        problem: spec.name.to_owned(),
        scheme: config.scheme.to_string(),
        leading_term: config.leading_term.to_string(),
        jacobian_eval: config.jacobian_eval.to_string(),
        cfl: sc.cfl,
        nx,
        ny: if outcome.field.spec.is_2d() { ny } else { 1 },
        t_end: end_time(config, spec),
        final_time: outcome.field.time,
        steps: stats.steps,
        wall_seconds: stats.wall_seconds,
        min_dt: stats.min_dt,
        max_dt: stats.max_dt,
        fallback_steps: stats.fallback_steps,
        initial_totals: stats.initial_totals.iter().copied().collect(),
        final_totals: stats.final_totals.iter().copied().collect(),
        conservation_drift: stats.conservation_drift().iter().copied().collect(),
        error: exact_errors(spec, &outcome.field),
        threads: config.threads,
        deterministic: config.threads <= 1,
        snapshots,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Error table against the exact solution over `grids`.
pub fn convergence(config: &RunConfig, grids: &[usize]) -> Result<ErrorReport> {
    if grids.is_empty() || grids.contains(&0) {
        return Err(HarnessError::Usage("grid list must be non-empty and positive".into()));
    }
    let problem = load_problem(config)?;
    with_problem!(problem, |physics, spec| convergence_problem(physics, spec, config, grids))
}

fn convergence_problem<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
    grids: &[usize],
) -> Result<ErrorReport> {
    if !spec.has_exact_solution() {
        return Err(HarnessError::Usage(format!("{} has no exact solution to converge to", spec.name)));
    }
    let sc = scheme_config(config, spec, config.scheme);
    let mut rows = Vec::with_capacity(grids.len());
    for &n in grids {
        let mut c = config.clone();
        c.nx = Some(n);
        c.ny = Some(config.ny.unwrap_or(n));
        let outcome = solve(physics, spec, &c, &sc)?;
        rows.push((n, exact_errors(spec, &outcome.field).expect("exact solution")));
    }
    let report = ErrorReport::new(spec.name, config.scheme.name(), rows);
    ensure_dir(&config.output_dir)?;
    let path = config.output_dir.join(format!("convergence-{}-{}.csv", spec.name, config.scheme));
    report.write_csv(create(&path)?)?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub schemes: Vec<Scheme>,
    /// Timed runs per scheme, interleaved; the minimum wall time is kept.
    pub repeats: usize,
    /// March every scheme with one constant step: the smallest adaptive
    /// step any of them takes. Step counts then agree exactly.
    pub shared_dt: bool,
    pub baseline: Option<Scheme>,
    pub cache_dir: Option<PathBuf>,
}

impl CompareOptions {
    pub fn new(schemes: Vec<Scheme>) -> Self {
        Self { schemes, repeats: 1, shared_dt: false, baseline: None, cache_dir: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeRun {
    pub scheme: String,
    pub steps: usize,
    pub wall_seconds: f64,
    /// Mean absolute first-component distance to the reference.
    pub l1_to_reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub problem: String,
    pub nx: usize,
    pub ny: usize,
    pub shared_dt: Option<f64>,
    pub runs: Vec<SchemeRun>,
    /// Schemes that failed, with the solver's diagnostic.
    pub failures: Vec<(String, String)>,
    pub timing: Option<TimingReport>,
}

impl Comparison {
    pub fn run(&self, scheme: Scheme) -> Option<&SchemeRun> {
        self.runs.iter().find(|r| r.scheme == scheme.name())
    }
}

pub fn compare(config: &RunConfig, options: &CompareOptions) -> Result<Comparison> {
    if options.schemes.len() < 2 {
        return Err(HarnessError::Usage("compare needs at least two schemes".into()));
    }
    if options.repeats == 0 {
        return Err(HarnessError::Usage("repeats must be at least 1".into()));
    }
    let problem = load_problem(config)?;
    with_problem!(problem, |physics, spec| compare_problem(physics, spec, config, options))
}

/// First components of the reference on the run's grid.
fn reference_values<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    field: &GridField<M>,
    cache_dir: Option<&Path>,
) -> Result<Option<Vec<f64>>> {
    match spec.reference {
        ReferenceKind::Exact => Ok(Some(
            field
                .interior()
                .filter_map(|(i, j, _)| spec.exact_cell_average(field.spec.cell_bounds(i as isize, j as isize), field.time))
                .map(|e| e[0])
                .collect(),
        )),
        // A fine solution only describes the problem's own end time.
        ReferenceKind::FineGrid { cells, scheme, cfl } if field.time == spec.t_end && !field.spec.is_2d() => {
            let reference = generate_reference(physics, spec, cells, scheme, cfl, cache_dir)?;
            Ok(Some(reference.project(field.spec.nx)?.iter().map(|v| v[0]).collect()))
        }
        _ => Ok(None),
    }
}

fn compare_problem<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
    options: &CompareOptions,
) -> Result<Comparison> {
    let mut failures: Vec<(String, String)> = Vec::new();
    let mut alive: Vec<Scheme> = options.schemes.clone();

    let shared_dt = if options.shared_dt {
        let mut dt = f64::INFINITY;
        for &scheme in &options.schemes {
            let sc = scheme_config(config, spec, scheme);
            let mut steps: Vec<f64> = Vec::new();
            let initial = initial_field(physics, spec, config, scheme)?;
            match march(physics, spec, config, &sc, initial, &mut |r, _| steps.push(r.dt)) {
                Ok(_) => {
                    // The last step is clipped to the end time.
                    steps.pop();
                    dt = steps.iter().copied().fold(dt, f64::min);
                }
                Err(e) => {
                    failures.push((scheme.to_string(), e.to_string()));
                    alive.retain(|s| *s != scheme);
                }
            }
        }
        dt.is_finite().then_some(dt)
    } else {
        None
    };

    let mut best: Vec<Option<(RunOutcome<M>, f64)>> = vec![None; alive.len()];
    for _ in 0..options.repeats {
        for (k, &scheme) in alive.iter().enumerate() {
            if failures.iter().any(|f| f.0 == scheme.name()) {
                continue;
            }
            let mut sc = scheme_config(config, spec, scheme);
            sc.fixed_dt = shared_dt;
            match solve(physics, spec, config, &sc) {
                Ok(outcome) => {
                    let secs = outcome.stats.wall_seconds;
                    match &mut best[k] {
                        Some((_, t)) => *t = t.min(secs),
                        slot => *slot = Some((outcome, secs)),
                    }
                }
                Err(e) => {
                    failures.push((scheme.to_string(), e.to_string()));
                    best[k] = None;
                }
            }
        }
    }

    let mut runs = Vec::new();
    let mut overlay: Option<FieldTable> = None;
    let mut reference: Option<Option<Vec<f64>>> = None;
    for (scheme, result) in alive.iter().zip(&best) {
        let Some((outcome, secs)) = result else { continue };
        let table = FieldTable::from_field(physics, &outcome.field);
        overlay.get_or_insert_with(|| table.coordinates()).append_prefixed(scheme.name(), &table)?;
        if reference.is_none() {
            reference = Some(reference_values(physics, spec, &outcome.field, options.cache_dir.as_deref())?);
        }
        let l1_to_reference = reference.as_ref().and_then(|r| r.as_ref()).map(|r| {
            ErrorNorms::from_errors(outcome.field.interior().zip(r).map(|((_, _, w), v)| w[0] - v)).l1
        });
        runs.push(SchemeRun { scheme: scheme.to_string(), steps: outcome.stats.steps, wall_seconds: *secs, l1_to_reference });
    }

    let baseline = options
        .baseline
        .or_else(|| options.schemes.iter().copied().find(|s| matches!(s, Scheme::WenoRk3(_))))
        .unwrap_or(options.schemes[0]);
    let timed: Vec<(String, usize, f64)> = runs.iter().map(|r| (r.scheme.clone(), r.steps, r.wall_seconds)).collect();
    let timing = TimingReport::new(baseline.name(), &timed);

    let (nx, ny) = cells(config, spec);
    let comparison = Comparison {
        problem: spec.name.to_owned(),
        nx,
        ny: if spec.dimension == hfvs::mesh::Dimension::Two { ny } else { 1 },
        shared_dt,
        runs,
        failures,
        timing,
    };
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    if let Some(table) = &overlay {
        table.write(&dir.join("compare-overlay.csv"))?;
    }
    if let Some(t) = &comparison.timing {
        t.write_csv(create(&dir.join("timing.csv"))?)?;
    }
    write_json(&dir.join("compare.json"), &comparison)?;
    Ok(comparison)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingTermStudy {
    pub problem: String,
    pub order: usize,
    pub steps: [usize; 2],
    /// Largest pointwise difference of the first component (density).
    pub max_density_difference: f64,
}

pub fn leading_term_study(config: &RunConfig, order: usize) -> Result<LeadingTermStudy> {
    let order = match order {
        2 => Order::Two,
        5 => Order::Five,
        other => return Err(HarnessError::Usage(format!("leading-term study supports orders 2 and 5, not {other}"))),
    };
    let problem = load_problem(config)?;
    with_problem!(problem, |physics, spec| study_problem(physics, spec, config, order))
}

fn study_problem<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
    order: Order,
) -> Result<LeadingTermStudy> {
    let scheme = Scheme::Hfvs(order);
    let mut outcomes = Vec::new();
    for kind in LeadingTermKind::ALL {
        let sc = scheme_config(config, spec, scheme).with_leading_term(kind);
        outcomes.push(solve(physics, spec, config, &sc)?);
    }
    let (a, b) = (&outcomes[0].field, &outcomes[1].field);
    let max_density_difference =
        a.interior().zip(b.interior()).map(|((_, _, u), (_, _, v))| (u[0] - v[0]).abs()).fold(0.0, f64::max);

    let mut overlay: Option<FieldTable> = None;
    for (kind, out) in LeadingTermKind::ALL.iter().zip(&outcomes) {
        let table = FieldTable::from_field(physics, &out.field);
        overlay.get_or_insert_with(|| table.coordinates()).append_prefixed(kind.name(), &table)?;
    }
    let study = LeadingTermStudy {
        problem: spec.name.to_owned(),
        order: order.as_number(),
        steps: [outcomes[0].stats.steps, outcomes[1].stats.steps],
        max_density_difference,
    };
    let dir = &config.output_dir;
    ensure_dir(dir)?;
    let stem = format!("leading-term-{}-hfvs{}", spec.name, study.order);
    overlay.expect("two runs").write(&dir.join(format!("{stem}.csv")))?;
    write_json(&dir.join(format!("{stem}.json")), &study)?;
    Ok(study)
}

/// Generates (or loads) a fine-grid reference and dumps it as a field CSV.
/// Unset options fall back to the problem's catalogued reference.
pub fn reference(config: &RunConfig, cells: Option<usize>, scheme: Option<Scheme>, cache_dir: Option<&Path>) -> Result<PathBuf> {
    let problem = load_problem(config)?;
    with_problem!(problem, |physics, spec| reference_problem(physics, spec, config, cells, scheme, cache_dir))
}

fn reference_problem<P: Physics<M>, const M: usize>(
    physics: &P,
    spec: &ProblemSpec<M>,
    config: &RunConfig,
    cells: Option<usize>,
    scheme: Option<Scheme>,
    cache_dir: Option<&Path>,
) -> Result<PathBuf> {
    let (default_cells, default_scheme, default_cfl) = match spec.reference {
        ReferenceKind::FineGrid { cells, scheme, cfl } => (cells, scheme, cfl),
        _ => (spec.default_cells.0 * 10, Scheme::WenoRk3(WenoOrder::Three), spec.default_cfl),
    };
    let cells = cells.unwrap_or(default_cells);
    let scheme = scheme.unwrap_or(default_scheme);
    let cfl = config.cfl.unwrap_or(default_cfl);
    let reference = generate_reference(physics, spec, cells, scheme, cfl, cache_dir)?;

    let mut field = GridField::from_fn(spec.grid(cells, 1, 0), |i, _| reference.values[i]);
    field.time = reference.time;
    ensure_dir(&config.output_dir)?;
    let path = config.output_dir.join(format!("reference-{}-n{cells}-{scheme}.csv", spec.name));
    FieldTable::from_field(physics, &field).write(&path)?;
    Ok(path)
}
