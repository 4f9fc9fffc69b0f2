//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Everything runs inside one test so the timing criterion never shares the
//! machine with other solver runs. Fine-grid references are cached under the
//! cargo target tmpdir; the first run spends about two minutes generating
//! the blast-wave one.

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use hfvs::mesh::CellBounds;
use hfvs::physics::{
    build_split_jacobian, steger_warming_flux_pair, Axis, ConservedVector, EosParams, Euler1d, Euler2d,
    LinearAdvection, Matrix, Physics, PrimitiveVector,
};
use hfvs::reconstruction::{basis, recover_derivatives, weno_interface_values, StencilWindow};
use hfvs::{
    run_to_time, BoundaryCondition, Boundaries, FaceWeights, GridField, GridSpec, Order, Scheme, SchemeConfig,
    WenoOrder,
};
use hfvs_harness::commands::{self, CompareOptions, DEFAULT_GRIDS};
use hfvs_harness::fields::FieldTable;
use hfvs_harness::report::ErrorReport;
use hfvs_harness::RunConfig;
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const HFVS2: Scheme = Scheme::Hfvs(Order::Two);
const HFVS3: Scheme = Scheme::Hfvs(Order::Three);
const HFVS5: Scheme = Scheme::Hfvs(Order::Five);
const WENO3: Scheme = Scheme::WenoRk3(WenoOrder::Three);
const WENO5: Scheme = Scheme::WenoRk3(WenoOrder::Five);

struct Context {
    out: tempfile::TempDir,
    cache: PathBuf,
}

impl Context {
    fn config(&self, problem: &str, scheme: Scheme, tag: &str) -> RunConfig {
        let mut c = RunConfig::new(problem, scheme);
        c.output_dir = self.out.path().join(tag);
        c
    }
}

type Outcome = (bool, String);
type Check = fn(&Context) -> Outcome;

fn convergence(ctx: &Context, scheme: Scheme) -> ErrorReport {
    let config = ctx.config("advection-sine", scheme, "convergence");
    commands::convergence(&config, &DEFAULT_GRIDS).expect("convergence study")
}

fn criterion_1(ctx: &Context) -> Outcome {
    // (scheme, design order, tolerance, Table 1 errors at N = 640)
    let cases = [
        (HFVS2, 2.0, 0.15, [1.8e-4, 2.0e-4, 2.8e-4]),
        (HFVS3, 3.0, 0.2, [1.02e-5, 1.13e-5, 1.60e-5]),
        (HFVS5, 5.0, 0.3, [4.93e-9, 5.48e-9, 7.75e-9]),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (scheme, design, tol, table) in cases {
        let report = convergence(ctx, scheme);
        let row = report.row(640).expect("N = 640 row");
        let orders = row.orders.expect("320 -> 640 orders");
        let errors = [row.norms.l1, row.norms.l2, row.norms.linf];
        let ok_orders = orders.iter().all(|o| (o - design).abs() <= tol);
        let ok_sizes = errors.iter().zip(table).all(|(e, t)| *e <= 10.0 * t);
        pass &= ok_orders && ok_sizes;
        detail.push(format!(
            "{scheme} orders {:.2}/{:.2}/{:.2} L1 {:.2e} (table {:.2e})",
            orders[0], orders[1], orders[2], errors[0], table[0]
        ));
    }
    (pass, detail.join("; "))
}

fn criterion_2(ctx: &Context) -> Outcome {
    let weno5 = convergence(ctx, WENO5);
    let weno3 = convergence(ctx, WENO3);
    let hfvs5 = convergence(ctx, HFVS5);
    let mut pass = true;
    let mut orders = Vec::new();
    for n in [320, 640] {
        let o = weno5.row(n).and_then(|r| r.orders).expect("weno5 orders");
        pass &= o.iter().all(|v| (v - 3.0).abs() <= 0.2);
        orders.push(format!("{:.3}/{:.3}/{:.3} at {n}", o[0], o[1], o[2]));
    }
    let o5 = weno5.row(640).and_then(|r| r.orders).unwrap();
    let h5 = hfvs5.row(640).and_then(|r| r.orders).unwrap();
    let below = o5.iter().zip(&h5).all(|(w, h)| w < h);
    let smaller = weno5.rows.iter().zip(&weno3.rows).all(|(a, b)| a.norms.l1 < b.norms.l1);
    pass &= below && smaller;
    let e = |r: &ErrorReport| r.row(640).unwrap().norms.l1;
    (
        pass,
        format!(
            "weno5rk3 orders {}; hfvs5 L1 order {:.2}; L1 at 640 weno5 {:.2e} < weno3 {:.2e}: {smaller}",
            orders.join(", "),
            h5[0],
            e(&weno5),
            e(&weno3)
        ),
    )
}

fn criterion_3(ctx: &Context) -> Outcome {
    let mut worst = 0.0f64;
    let mut where_ = String::new();
    for problem in ["advection-sine", "density-wave"] {
        for scheme in Scheme::ALL {
            let summary = commands::run(&ctx.config(problem, scheme, &format!("conserve-{problem}-{scheme}"))).unwrap();
            let drift = summary.conservation_drift.iter().copied().fold(0.0, f64::max);
            if drift >= worst {
                worst = drift;
                where_ = format!("{problem} {scheme}");
            }
        }
    }
    (worst <= 1e-12, format!("max relative drift {worst:.2e} ({where_}) over all schemes"))
}

fn scaled<const M: usize>(a: &Matrix<M>, b: &Matrix<M>) -> f64 {
    (a - b).abs().max() / (1.0 + b.abs().max())
}

/// Largest identity residual and finite-difference Jacobian mismatch.
fn splitting_errors<P: Physics<M>, const M: usize>(p: &P, w: &ConservedVector<M>, axis: Axis) -> (f64, f64) {
    let s = build_split_jacobian(p, w, axis).unwrap();
    let (r, l) = (s.right_eigenvectors, s.left_eigenvectors);
    let lam = Matrix::<M>::from_diagonal(&s.eigenvalues);
    let (fp, fm) = steger_warming_flux_pair(p, w, axis).unwrap();
    let f = p.flux(w, axis).unwrap();
    let identities = [
        scaled(&(s.a_plus + s.a_minus), &s.a),
        scaled(&(r * lam * l), &s.a),
        scaled(&(l * r), &Matrix::<M>::identity()),
        (fp + fm - f).abs().max() / (1.0 + f.abs().max()),
    ];
    let mut fd = Matrix::<M>::zeros();
    for c in 0..M {
        let h = 1e-6 * w[c].abs().max(1e-3);
        let (mut up, mut down) = (*w, *w);
        up[c] += h;
        down[c] -= h;
        fd.set_column(c, &((p.flux(&up, axis).unwrap() - p.flux(&down, axis).unwrap()) / (2.0 * h)));
    }
    (identities.into_iter().fold(0.0, f64::max), scaled(&s.a, &fd))
}

fn criterion_4(_: &Context) -> Outcome {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(4);
    let e1 = Euler1d::new(EosParams::default());
    let e2 = Euler2d::new(EosParams::default());
    let (mut ident, mut jac) = (0.0f64, 0.0f64);
    let states = 200;
    for _ in 0..states {
        let rho = rng.gen_range(0.05..20.0);
        let u = rng.gen_range(-10.0..10.0);
        let v = rng.gen_range(-10.0..10.0);
        let p = rng.gen_range(0.01..1000.0);
        let (a, b) = splitting_errors(&e1, &e1.conserved_from_primitive(&PrimitiveVector::new_1d(rho, u, p)), Axis::X);
        let w2 = e2.conserved_from_primitive(&PrimitiveVector::new_2d(rho, u, v, p));
        let axis = if rng.gen_bool(0.5) { Axis::X } else { Axis::Y };
        let (c, d) = splitting_errors(&e2, &w2, axis);
        ident = ident.max(a).max(c);
        jac = jac.max(b).max(d);
    }
    let secs = started.elapsed().as_secs_f64();
    (
        ident <= 1e-11 && jac <= 1e-6 && secs < 1.0,
        format!("{states} 1D + {states} 2D states: identities {ident:.1e}, FD Jacobian {jac:.1e}, {secs:.2} s"),
    )
}

fn basis_average(k: usize, m: f64) -> f64 {
    let poly: &[f64] = match k {
        1 => &[0.0, 1.0],
        2 => &[-1.0 / 24.0, 0.0, 0.5],
        3 => &[0.0, 0.0, 0.0, 1.0 / 6.0],
        4 => &[-1.0 / 1920.0, 0.0, 0.0, 0.0, 1.0 / 24.0],
        _ => unreachable!(),
    };
    poly_average(poly, m)
}

fn poly_average(c: &[f64], m: f64) -> f64 {
    let (a, b) = (m - 0.5, m + 0.5);
    c.iter().enumerate().map(|(p, ci)| ci * (b.powi(p as i32 + 1) - a.powi(p as i32 + 1)) / (p as f64 + 1.0)).sum()
}

fn poly_value(c: &[f64], xi: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * xi + ci)
}

/// Dense solve of the closure: face equations, plus both neighbour
/// averages at order 5.
fn oracle(order: Order, left: f64, mean: f64, right: f64, wm: f64, wp: f64) -> Vec<f64> {
    let n = order.derivative_terms();
    let face = |xi: f64| (1..=n).map(|k| basis(k, xi)).collect::<Vec<_>>();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    if order == Order::Two {
        rows.push((vec![1.0], wp - wm));
    } else {
        rows.push((face(-0.5), wm - mean));
        rows.push((face(0.5), wp - mean));
    }
    if order == Order::Five {
        rows.push(((1..=n).map(|k| basis_average(k, -1.0)).collect(), left - mean));
        rows.push(((1..=n).map(|k| basis_average(k, 1.0)).collect(), right - mean));
    }
    let a = DMatrix::from_fn(n, n, |i, j| rows[i].0[j]);
    let b = DVector::from_fn(n, |i, _| rows[i].1);
    a.lu().solve(&b).expect("regular closure").iter().copied().collect()
}

fn criterion_5(_: &Context) -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let s = |v: f64| ConservedVector::<1>::from([v]);
    let mut oracle_err = 0.0f64;
    for order in [Order::Two, Order::Three, Order::Five] {
        for _ in 0..1000 {
            let c: Vec<f64> = (0..=order.derivative_terms()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let (l, m, r) = (poly_average(&c, -1.0), poly_average(&c, 0.0), poly_average(&c, 1.0));
            let (wm, wp) = (poly_value(&c, -0.5), poly_value(&c, 0.5));
            let cells = [s(l), s(m), s(r)];
            let e = recover_derivatives(order, &StencilWindow::new(&cells, 1.0), &s(wm), &s(wp));
            for (k, want) in oracle(order, l, m, r, wm, wp).iter().enumerate() {
                oracle_err = oracle_err.max((e.coefficients[k][0] - want).abs() / (1.0 + want.abs()));
            }
        }
    }
    let mut weno_err = 0.0f64;
    for _ in 0..1000 {
        let (slope, offset, h) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.001..1.0));
        let cells: Vec<_> = (-2..=2).map(|k| s(offset + slope * k as f64 * h)).collect();
        for (order, window) in [(WenoOrder::Three, &cells[1..4]), (WenoOrder::Five, &cells[..])] {
            let f = weno_interface_values(&StencilWindow::new(window, h), order);
            let scale = 1.0 + offset.abs() + (slope * h).abs();
            weno_err = weno_err.max((f.plus[0] - (offset + 0.5 * slope * h)).abs() / scale);
            weno_err = weno_err.max((f.minus[0] - (offset - 0.5 * slope * h)).abs() / scale);
        }
    }
    (
        oracle_err <= 1e-10 && weno_err <= 1e-12,
        format!("3 x 1000 polynomials: closure vs dense solve {oracle_err:.1e}; WENO on 1000 linear sets {weno_err:.1e}"),
    )
}

fn compare(ctx: &Context, problem: &str, schemes: &[Scheme], tag: &str, repeats: usize, shared_dt: bool) -> commands::Comparison {
    let mut options = CompareOptions::new(schemes.to_vec());
    options.cache_dir = Some(ctx.cache.clone());
    options.repeats = repeats;
    options.shared_dt = shared_dt;
    commands::compare(&ctx.config(problem, schemes[0], tag), &options).expect("comparison")
}

fn criterion_6(ctx: &Context) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (problem, n) in [("shu-osher", 200), ("blast-wave", 800)] {
        let mut c = ctx.config(problem, HFVS2, "shocks");
        c.nx = Some(n);
        let mut options = CompareOptions::new(vec![HFVS2, HFVS3, HFVS5]);
        options.cache_dir = Some(ctx.cache.clone());
        let cmp = commands::compare(&c, &options).expect("comparison");
        let l1: Vec<f64> = [HFVS2, HFVS3, HFVS5]
            .iter()
            .map(|s| cmp.run(*s).and_then(|r| r.l1_to_reference).unwrap_or(f64::NAN))
            .collect();
        let monotone = l1[0] > l1[1] && l1[1] > l1[2];
        pass &= cmp.failures.is_empty() && monotone;
        detail.push(format!(
            "{problem} N={n} L1 {:.4e} > {:.4e} > {:.4e}: {monotone}{}",
            l1[0],
            l1[1],
            l1[2],
            if cmp.failures.is_empty() { String::new() } else { format!(", failures {:?}", cmp.failures) }
        ));
    }
    (pass, detail.join("; "))
}

/// Density on the `n x n` grid, indexed `[i][j]`, read back from the last
/// snapshot.
fn read_density(dir: &Path, last: &str, n: usize) -> Vec<Vec<f64>> {
    let table = FieldTable::read(&dir.join(last)).unwrap();
    let (x, y, rho) = (table.column("x").unwrap(), table.column("y").unwrap(), table.column("rho").unwrap());
    let mut grid = vec![vec![f64::NAN; n]; n];
    for k in 0..rho.len() {
        let i = (x[k] * n as f64 - 0.5).round() as usize;
        let j = (y[k] * n as f64 - 0.5).round() as usize;
        grid[i][j] = rho[k];
    }
    grid
}

fn criterion_7(ctx: &Context) -> Outcome {
    let n = 100;
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for problem in ["riemann-2d-quadrants", "riemann-2d-disk"] {
        for scheme in [HFVS2, HFVS3, HFVS5] {
            let mut c = ctx.config(problem, scheme, &format!("2d-{problem}-{scheme}"));
            c.nx = Some(n);
            c.ny = Some(n);
            c.cfl = Some(0.45);
            let summary = match commands::run(&c) {
                Ok(s) => s,
                Err(e) => return (false, format!("{problem} {scheme} failed: {e}")),
            };
            let rho = read_density(&c.output_dir, summary.snapshots.last().unwrap(), n);
            let mut asym = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let pairs: [(usize, usize); 2] = if problem == "riemann-2d-quadrants" {
                        [(j, i), (n - 1 - j, n - 1 - i)]
                    } else {
                        [(n - 1 - i, j), (i, n - 1 - j)]
                    };
                    for (a, b) in pairs {
                        asym = asym.max((rho[i][j] - rho[a][b]).abs());
                    }
                }
            }
            worst = worst.max(asym);
            detail.push(format!("{problem} {scheme} t={} {:.1e}", summary.final_time, asym));
        }
    }
    (worst <= 1e-10, format!("symmetry defects: {}", detail.join(", ")))
}

fn criterion_8(ctx: &Context) -> Outcome {
    let cmp = compare(ctx, "shu-osher", &[HFVS3, WENO3, HFVS5, WENO5], "timing", 7, true);
    let run = |s: Scheme| cmp.run(s).expect("timed run");
    let mut pass = cmp.failures.is_empty();
    let mut detail = Vec::new();
    for (h, w) in [(HFVS3, WENO3), (HFVS5, WENO5)] {
        let (a, b) = (run(h), run(w));
        let faster = a.wall_seconds < b.wall_seconds;
        pass &= faster && a.steps == b.steps;
        detail.push(format!(
            "{h} {:.4} s vs {w} {:.4} s (ratio {:.2}), steps {}/{}",
            a.wall_seconds,
            b.wall_seconds,
            a.wall_seconds / b.wall_seconds,
            a.steps,
            b.steps
        ));
    }
    (pass, format!("min of 7 interleaved runs, shared dt: {}", detail.join("; ")))
}

fn criterion_9(ctx: &Context) -> Outcome {
    let config = ctx.config("shu-osher", HFVS2, "leading-term");
    let d2 = commands::leading_term_study(&config, 2).unwrap().max_density_difference;
    let d5 = commands::leading_term_study(&config, 5).unwrap().max_density_difference;
    (d5 < d2, format!("max |rho_SW - rho_HLLC|: hfvs2 {d2:.4e}, hfvs5 {d5:.4e}"))
}

/// Worst per-step error of HFVS5 advecting a quartic whose ghosts carry its
/// exact shifted cell averages.
fn quartic_sentinel(weights: FaceWeights, n: usize) -> (f64, usize) {
    let c = [0.3, -1.0, 0.7, 2.0, -1.5];
    let average = move |a: f64, b: f64| {
        let prim = |x: f64| c.iter().enumerate().map(|(p, ci)| ci * x.powi(p as i32 + 1) / (p as f64 + 1.0)).sum::<f64>();
        (prim(b) - prim(a)) / (b - a)
    };
    let exact: Arc<dyn Fn(CellBounds, f64) -> ConservedVector<1> + Send + Sync> =
        Arc::new(move |b: CellBounds, t: f64| ConservedVector::<1>::from([average(b.x.0 - t, b.x.1 - t)]));
    let spec = GridSpec::new_1d(n, (0.0, 1.0), HFVS5.ghost_width());
    let initial = GridField::from_fn(spec, |i, _| exact(spec.cell_bounds(i as isize, 0), 0.0));
    let bcs = Boundaries::uniform(BoundaryCondition::InflowExact(exact.clone()));
    let mut config = SchemeConfig::new(HFVS5, 0.95);
    config.face_weights = weights;
    let mut worst = 0.0f64;
    let out = run_to_time(&LinearAdvection::default(), initial, 0.25, &config, &bcs, &mut |r, f| {
        for (i, _, w) in f.interior() {
            worst = worst.max((w[0] - exact(f.spec.cell_bounds(i as isize, 0), r.time)[0]).abs());
        }
    })
    .expect("sentinel run");
    (worst, out.stats.steps)
}

fn criterion_10(_: &Context) -> Outcome {
    let (linear, steps) = quartic_sentinel(FaceWeights::Linear, 40);
    let (nonlinear, _) = quartic_sentinel(FaceWeights::Nonlinear, 40);
    (
        linear <= 1e-10,
        format!(
            "quartic, N=40, {steps} steps, ideal-weight faces: worst step error {linear:.1e} \
             (Jiang-Shu weights, not polynomial-exact: {nonlinear:.1e})"
        ),
    )
}

fn say(line: &str) {
    // Straight to stdout, past the test harness's capture.
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

#[test]
fn acceptance() {
    let ctx = Context {
        out: tempfile::tempdir().unwrap(),
        cache: Path::new(env!("CARGO_TARGET_TMPDIR")).join("references"),
    };
    let criteria: [(&str, Check); 10] = [
        ("convergence orders and magnitudes", criterion_1),
        ("order barrier of WENO5+RK3", criterion_2),
        ("conservation", criterion_3),
        ("splitting and eigensystem identities", criterion_4),
        ("reconstruction oracle", criterion_5),
        ("shock robustness and monotone improvement", criterion_6),
        ("2D runs and symmetry", criterion_7),
        ("timing", criterion_8),
        ("leading-term study", criterion_9),
        ("exactness sentinel", criterion_10),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (pass, detail) = panic::catch_unwind(AssertUnwindSafe(|| check(&ctx)))
            .unwrap_or_else(|e| {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                (false, format!("panicked: {}", msg.unwrap_or_default()))
            });
        let secs = started.elapsed().as_secs_f64();
        say(&format!("{} [{:>2}] {name}: {detail} ({secs:.1} s)", if pass { "PASS" } else { "FAIL" }, k + 1));
        if !pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
