//! Error tables, timing tables and run summaries.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{io_error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl ErrorNorms {
    /// `L1 = mean |e|`, `L2 = sqrt(mean e^2)`, `Linf = max |e|`.
    pub fn from_errors(errors: impl IntoIterator<Item = f64>) -> Self {
        let (mut n, mut s1, mut s2, mut max) = (0usize, 0.0, 0.0, 0.0f64);
        for e in errors {
            let a = e.abs();
            n += 1;
            s1 += a;
            s2 += a * a;
            max = max.max(a);
        }
        let n = n.max(1) as f64;
        Self { l1: s1 / n, l2: (s2 / n).sqrt(), linf: max }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.l1, self.l2, self.linf]
    }
}

/// Observed order between grids of `n_coarse` and `n_fine` cells.
pub fn observed_order(e_coarse: f64, e_fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    (e_coarse / e_fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRow {
    pub n: usize,
    pub norms: ErrorNorms,
    /// Orders in L1, L2, Linf against the previous row; only set when the
    /// previous grid is exactly half this one.
    pub orders: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub problem: String,
    pub scheme: String,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn new(problem: &str, scheme: &str, mut grids: Vec<(usize, ErrorNorms)>) -> Self {
        grids.sort_by_key(|g| g.0);
        let mut rows: Vec<ErrorRow> = Vec::with_capacity(grids.len());
        for (n, norms) in grids {
            let orders = rows.last().filter(|prev| prev.n * 2 == n).map(|prev| {
                let (a, b) = (prev.norms.as_array(), norms.as_array());
                [0, 1, 2].map(|k| observed_order(a[k], b[k], prev.n, n))
            });
            rows.push(ErrorRow { n, norms, orders });
        }
        Self { problem: problem.to_owned(), scheme: scheme.to_owned(), rows }
    }

    pub fn row(&self, n: usize) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// Columns `N, L1, order, L2, order, Linf, order`; the first row's orders
    /// are blank.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["N", "L1", "L1_order", "L2", "L2_order", "Linf", "Linf_order"])?;
        for r in &self.rows {
            let e = r.norms.as_array();
            let o = r.orders.map(|o| o.map(|v| format!("{v:?}")));
            let order = |k: usize| o.as_ref().map_or(String::new(), |o| o[k].clone());
            w.write_record([
                r.n.to_string(),
                format!("{:?}", e[0]),
                order(0),
                format!("{:?}", e[1]),
                order(1),
                format!("{:?}", e[2]),
                order(2),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub scheme: String,
    pub steps: usize,
    pub wall_seconds: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub baseline: String,
    pub rows: Vec<TimingRow>,
}

impl TimingReport {
    /// `runs` are `(scheme, steps, seconds)`; ratios are against `baseline`,
    /// which must be one of them.
    pub fn new(baseline: &str, runs: &[(String, usize, f64)]) -> Option<Self> {
        let base = runs.iter().find(|r| r.0 == baseline)?.2;
        let rows = runs
            .iter()
            .map(|(scheme, steps, secs)| TimingRow {
                scheme: scheme.clone(),
                steps: *steps,
                wall_seconds: *secs,
                ratio: if scheme == baseline { 1.0 } else { secs / base },
            })
            .collect();
        Some(Self { baseline: baseline.to_owned(), rows })
    }

    pub fn row(&self, scheme: &str) -> Option<&TimingRow> {
        self.rows.iter().find(|r| r.scheme == scheme)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheme", "steps", "wall_seconds", "ratio"])?;
        for r in &self.rows {
            w.write_record([r.scheme.clone(), r.steps.to_string(), format!("{:?}", r.wall_seconds), format!("{:?}", r.ratio)])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Machine-readable record of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: String,
    pub scheme: String,
    pub leading_term: String,
    pub jacobian_eval: String,
    pub cfl: f64,
    pub nx: usize,
    pub ny: usize,
    pub t_end: f64,
    pub final_time: f64,
    pub steps: usize,
    pub wall_seconds: f64,
    pub min_dt: f64,
    pub max_dt: f64,
    pub fallback_steps: usize,
    pub initial_totals: Vec<f64>,
    pub final_totals: Vec<f64>,
    /// Per component, relative to the initial absolute total.
    pub conservation_drift: Vec<f64>,
    /// Density (or scalar) error against the exact cell averages.
    pub error: Option<ErrorNorms>,
    pub threads: usize,
    /// No random numbers are drawn anywhere, so single-threaded runs repeat
    /// bit for bit.
    pub deterministic: bool,
    pub snapshots: Vec<String>,
}

pub(crate) fn create(path: &Path) -> Result<std::io::BufWriter<File>> {
    Ok(std::io::BufWriter::new(File::create(path).map_err(io_error(path))?))
}

pub(crate) fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(io_error(path))?;
    out.flush().map_err(io_error(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_known_errors() {
        let n = ErrorNorms::from_errors([3.0, -4.0]);
        assert_eq!(n.l1, 3.5);
        assert_eq!(n.l2, 12.5f64.sqrt());
        assert_eq!(n.linf, 4.0);
    }

    #[test]
    fn orders_skip_non_doublings() {
        let e = |v: f64| ErrorNorms { l1: v, l2: v, linf: v };
        let r = ErrorReport::new("p", "s", vec![(40, e(0.25)), (20, e(1.0)), (60, e(0.1))]);
        assert_eq!(r.rows[0].orders, None);
        assert_eq!(r.rows[1].orders, Some([2.0, 2.0, 2.0]));
        assert_eq!(r.rows[2].orders, None);
    }

    #[test]
    fn baseline_ratio_is_one() {
        let runs = vec![("weno3rk3".to_owned(), 10, 2.0), ("hfvs3".to_owned(), 10, 1.0)];
        let t = TimingReport::new("weno3rk3", &runs).unwrap();
        assert_eq!(t.row("weno3rk3").unwrap().ratio, 1.0);
        assert_eq!(t.row("hfvs3").unwrap().ratio, 0.5);
        assert!(TimingReport::new("hfvs5", &runs).is_none());
    }

    #[test]
    fn convergence_csv_leaves_first_orders_blank() {
        let e = |v: f64| ErrorNorms { l1: v, l2: v, linf: v };
        let r = ErrorReport::new("p", "s", vec![(20, e(1.0)), (40, e(0.5))]);
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[1], "20,1.0,,1.0,,1.0,");
        assert_eq!(lines[2], "40,0.5,1.0,0.5,1.0,0.5,1.0");
    }
}
