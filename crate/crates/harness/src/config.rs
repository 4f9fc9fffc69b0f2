//! Run configuration: a TOML file, then command-line overrides.

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;

use hfvs::problems::AnyProblem;
use hfvs::{JacobianEval, LeadingTermKind, Scheme};
use serde::Deserialize;
use toml::Spanned;

/// Config problem located in the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub line: usize,
    pub column: usize,
    /// Offending key, when known.
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: ", self.origin, self.line, self.column)?;
        match &self.key {
            Some(key) => write!(f, "invalid value for `{key}`: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: Spanned<String>,
    scheme: Spanned<String>,
    leading_term: Option<Spanned<String>>,
    jacobian_eval: Option<Spanned<String>>,
    cfl: Option<Spanned<f64>>,
    nx: Option<Spanned<usize>>,
    ny: Option<Spanned<usize>>,
    t_end: Option<Spanned<f64>>,
    output_dir: Option<String>,
    output_every: Option<usize>,
    threads: Option<Spanned<usize>>,
    fallback_first_order: Option<bool>,
    gamma: Option<Spanned<f64>>,
}

/// A fully specified run. Optional fields fall back to the problem's
/// defaults when the run starts.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub scheme: Scheme,
    pub leading_term: LeadingTermKind,
    pub jacobian_eval: JacobianEval,
    pub cfl: Option<f64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub t_end: Option<f64>,
    pub output_dir: PathBuf,
    /// Snapshot every this many steps; 0 writes only the first and last.
    pub output_every: usize,
    pub threads: usize,
    pub fallback_first_order: bool,
    pub gamma: f64,
}

impl RunConfig {
    pub fn new(problem: &str, scheme: Scheme) -> Self {
        Self {
            problem: problem.to_owned(),
            scheme,
            leading_term: LeadingTermKind::StegerWarming,
            jacobian_eval: JacobianEval::InterfaceLimit,
            cfl: None,
            nx: None,
            ny: None,
            t_end: None,
            output_dir: PathBuf::from("out"),
            output_every: 0,
            threads: 1,
            fallback_first_order: false,
            gamma: 1.4,
        }
    }

    /// Parses `text`; `origin` names the source in diagnostics.
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let err = |span: Option<Range<usize>>, key: Option<&str>, message: String| {
            let (line, column) = span.map_or((1, 1), |s| line_column(text, s.start));
            ConfigError { origin: origin.to_owned(), line, column, key: key.map(str::to_owned), message }
        };
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| err(e.span(), None, e.message().to_owned()))?;

        fn parse<T: FromStr>(
            v: &Spanned<String>,
        ) -> Result<T, (Range<usize>, String)>
        where
            T::Err: fmt::Display,
        {
            v.get_ref().parse::<T>().map_err(|e| (v.span(), e.to_string()))
        }
        let located = |key: &str, (span, message): (Range<usize>, String)| err(Some(span), Some(key), message);

        if !AnyProblem::NAMES.contains(&raw.problem.get_ref().as_str()) {
            return Err(err(
                Some(raw.problem.span()),
                Some("problem"),
                format!("unknown problem `{}`, expected one of {}", raw.problem.get_ref(), AnyProblem::NAMES.join(", ")),
            ));
        }
        let scheme: Scheme = parse(&raw.scheme).map_err(|e| located("scheme", e))?;
        let mut config = RunConfig::new(raw.problem.get_ref(), scheme);
        if let Some(v) = &raw.leading_term {
            config.leading_term = parse(v).map_err(|e| located("leading_term", e))?;
        }
        if let Some(v) = &raw.jacobian_eval {
            config.jacobian_eval = parse(v).map_err(|e| located("jacobian_eval", e))?;
        }
        if let Some(v) = &raw.cfl {
            let cfl = *v.get_ref();
            if !(cfl > 0.0 && cfl <= 1.0) {
                return Err(err(Some(v.span()), Some("cfl"), format!("must lie in (0, 1], got {cfl}")));
            }
            config.cfl = Some(cfl);
        }
        for (key, value, slot) in [("nx", &raw.nx, &mut config.nx), ("ny", &raw.ny, &mut config.ny)] {
            if let Some(v) = value {
                if *v.get_ref() == 0 {
                    return Err(err(Some(v.span()), Some(key), "cell count must be positive".into()));
                }
                *slot = Some(*v.get_ref());
            }
        }
        if let Some(v) = &raw.t_end {
            if !(v.get_ref().is_finite() && *v.get_ref() >= 0.0) {
                return Err(err(Some(v.span()), Some("t_end"), format!("must be finite and non-negative, got {}", v.get_ref())));
            }
            config.t_end = Some(*v.get_ref());
        }
        if let Some(v) = &raw.threads {
            if *v.get_ref() == 0 {
                return Err(err(Some(v.span()), Some("threads"), "must be at least 1".into()));
            }
            config.threads = *v.get_ref();
        }
        if let Some(v) = &raw.gamma {
            if v.get_ref().is_nan() || *v.get_ref() <= 1.0 {
                return Err(err(Some(v.span()), Some("gamma"), format!("must exceed 1, got {}", v.get_ref())));
            }
            config.gamma = *v.get_ref();
        }
        if let Some(dir) = raw.output_dir {
            config.output_dir = PathBuf::from(dir);
        }
        config.output_every = raw.output_every.unwrap_or(0);
        config.fallback_first_order = raw.fallback_first_order.unwrap_or(false);
        Ok(config)
    }
}

/// 1-based line and column of byte `offset`.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hfvs::Order;

    const GOOD: &str = r#"
problem = "shu-osher"
scheme = "hfvs5"
leading_term = "hllc"
cfl = 0.8
nx = 200
output_every = 10
"#;

    #[test]
    fn parses_a_complete_config() {
        let c = RunConfig::from_toml(GOOD, "good.toml").unwrap();
        assert_eq!(c.scheme, Scheme::Hfvs(Order::Five));
        assert_eq!(c.leading_term, LeadingTermKind::Hllc);
        assert_eq!(c.jacobian_eval, JacobianEval::InterfaceLimit);
        assert_eq!((c.cfl, c.nx, c.output_every), (Some(0.8), Some(200), 10));
    }

    #[test]
    fn invalid_scheme_names_the_key_and_line() {
        let text = "problem = \"shu-osher\"\nscheme = \"hfvs4\"\n";
        let e = RunConfig::from_toml(text, "bad.toml").unwrap_err();
        assert_eq!(e.key.as_deref(), Some("scheme"));
        assert_eq!((e.line, e.column), (2, 10));
        assert!(e.to_string().starts_with("bad.toml:2:10: invalid value for `scheme`"), "{e}");
    }

    #[test]
    fn out_of_range_cfl_is_located() {
        let text = "problem = \"blast-wave\"\nscheme = \"hfvs2\"\n\ncfl = 1.5\n";
        let e = RunConfig::from_toml(text, "c.toml").unwrap_err();
        assert_eq!((e.key.as_deref(), e.line), (Some("cfl"), 4));
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let text = "problem = \"blast-wave\"\nscheme = \"hfvs2\"\nschem = 3\n";
        let e = RunConfig::from_toml(text, "c.toml").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("schem"), "{}", e.message);
    }

    #[test]
    fn unknown_problem_is_rejected() {
        let e = RunConfig::from_toml("problem = \"sod\"\nscheme = \"hfvs2\"\n", "c.toml").unwrap_err();
        assert_eq!((e.key.as_deref(), e.line), (Some("problem"), 1));
    }

    #[test]
    fn line_column_counts_from_one() {
        assert_eq!(line_column("ab\ncd", 0), (1, 1));
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
    }
}
