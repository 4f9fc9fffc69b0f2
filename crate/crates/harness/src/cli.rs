//! Argument parsing and dispatch for the `hfvs` binary.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hfvs::{JacobianEval, LeadingTermKind, Scheme};

use crate::commands::{self, CompareOptions, DEFAULT_GRIDS};
use crate::config::RunConfig;
use crate::{io_error, HarnessError, Result};

#[derive(Debug, Parser)]
#[command(name = "hfvs", version, about = "High-order flux vector splitting solver harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one configuration, writing field snapshots and a summary.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<Scheme>,
    },
    /// Error table against the exact solution over a list of grids.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<Scheme>,
        /// Comma-separated cell counts.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GRIDS)]
        grids: Vec<usize>,
    },
    /// Run several schemes on one grid: overlaid profiles, timing, distances
    /// to the reference.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Comma-separated, at least two.
        #[arg(long, value_delimiter = ',', required = true)]
        scheme: Vec<Scheme>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Use one constant step for every scheme so step counts agree.
        #[arg(long)]
        shared_dt: bool,
        /// Scheme the timing ratios are relative to.
        #[arg(long)]
        baseline: Option<Scheme>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Steger-Warming against HLLC leading terms at order 2 or 5.
    LeadingTermStudy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: usize,
    },
    /// Generate a fine-grid reference solution.
    Reference {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        scheme: Option<Scheme>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

/// Flags shared by every subcommand; they override the config file.
#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub problem: Option<String>,
    /// Cells in x (and y, for 2D problems, unless --ny is given).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub tend: Option<f64>,
    #[arg(long)]
    pub leading_term: Option<LeadingTermKind>,
    #[arg(long)]
    pub jacobian_eval: Option<JacobianEval>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub output_every: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub fallback_first_order: bool,
    /// Assert determinism. Nothing draws random numbers, so this only
    /// records the assertion.
    #[arg(long)]
    pub seed_free: bool,
}

fn usage(message: impl Into<String>) -> HarnessError {
    HarnessError::Usage(message.into())
}

impl Common {
    /// The config file (if any) with flags applied. `scheme` stands in when
    /// neither source names one.
    pub fn resolve(&self, scheme: Option<Scheme>, fallback: Option<Scheme>) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_error(path))?;
                RunConfig::from_toml(&text, &path.display().to_string())?
            }
            None => {
                let problem = self.problem.as_deref().ok_or_else(|| usage("--problem is required without --config"))?;
                let scheme = scheme.or(fallback).ok_or_else(|| usage("--scheme is required without --config"))?;
                RunConfig::new(problem, scheme)
            }
        };
        if let Some(p) = &self.problem {
            config.problem = p.clone();
        }
        if let Some(s) = scheme {
            config.scheme = s;
        }
        if let Some(n) = self.n {
            config.nx = Some(n);
            config.ny = Some(n);
        }
        if let Some(v) = self.nx {
            config.nx = Some(v);
        }
        if let Some(v) = self.ny {
            config.ny = Some(v);
        }
        if [config.nx, config.ny].contains(&Some(0)) {
            return Err(usage("cell counts must be positive"));
        }
        if let Some(cfl) = self.cfl {
            if !(cfl > 0.0 && cfl <= 1.0) {
                return Err(usage(format!("--cfl must lie in (0, 1], got {cfl}")));
            }
            config.cfl = Some(cfl);
        }
        if let Some(t) = self.tend {
            if !(t.is_finite() && t >= 0.0) {
                return Err(usage(format!("--tend must be finite and non-negative, got {t}")));
            }
            config.t_end = Some(t);
        }
        if let Some(k) = self.leading_term {
            config.leading_term = k;
        }
        if let Some(j) = self.jacobian_eval {
            config.jacobian_eval = j;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(usage("--threads must be at least 1"));
            }
            config.threads = t;
        }
        if let Some(e) = self.output_every {
            config.output_every = e;
        }
        if let Some(g) = self.gamma {
            config.gamma = g;
        }
        config.fallback_first_order |= self.fallback_first_order;
        if self.seed_free && config.threads > 1 {
            return Err(usage("--seed-free promises bitwise repeatability, which needs --threads 1"));
        }
        Ok(config)
    }
}

/// Runs the command and returns a short report for stdout.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Run { common, scheme } => {
            let config = common.resolve(scheme, None)?;
            let s = commands::run(&config)?;
            let drift = s.conservation_drift.iter().copied().fold(0.0, f64::max);
            Ok(format!(
                "{} {}: {} steps to t = {} in {:.3} s, max conservation drift {drift:.3e}, output in {}",
                s.problem,
                s.scheme,
                s.steps,
                s.final_time,
                s.wall_seconds,
                config.output_dir.display()
            ))
        }
        Command::Convergence { common, scheme, grids } => {
            let config = common.resolve(scheme, None)?;
            let report = commands::convergence(&config, &grids)?;
            let mut out = Vec::new();
            report.write_csv(&mut out)?;
            Ok(String::from_utf8_lossy(&out).trim_end().to_owned())
        }
        Command::Compare { common, scheme, repeats, shared_dt, baseline, cache_dir } => {
            let config = common.resolve(None, scheme.first().copied())?;
            let mut options = CompareOptions::new(scheme);
            options.repeats = repeats;
            options.shared_dt = shared_dt;
            options.baseline = baseline;
            options.cache_dir = cache_dir;
            let c = commands::compare(&config, &options)?;
            let mut lines = Vec::new();
            for r in &c.runs {
                let ratio = c.timing.as_ref().and_then(|t| t.row(&r.scheme)).map(|t| t.ratio);
                lines.push(format!(
                    "{:<9} steps {:>6}  wall {:.4} s  ratio {}  L1 {}",
                    r.scheme,
                    r.steps,
                    r.wall_seconds,
                    ratio.map_or("-".into(), |v| format!("{v:.3}")),
                    r.l1_to_reference.map_or("-".into(), |v| format!("{v:.4e}")),
                ));
            }
            for (scheme, message) in &c.failures {
                lines.push(format!("{scheme:<9} failed: {message}"));
            }
            Ok(lines.join("\n"))
        }
        Command::LeadingTermStudy { common, order } => {
            let config = common.resolve(None, Some(Scheme::Hfvs(hfvs::Order::Two)))?;
            let s = commands::leading_term_study(&config, order)?;
            Ok(format!("{} hfvs{}: max density difference {:.6e}", s.problem, s.order, s.max_density_difference))
        }
        Command::Reference { common, cells, scheme, cache_dir } => {
            let config = common.resolve(None, Some(Scheme::WenoRk3(hfvs::WenoOrder::Three)))?;
            let path = commands::reference(&config, cells, scheme, cache_dir.as_deref())?;
            Ok(format!("reference written to {}", path.display()))
        }
    }
}
