//! Flat `key = value` run configuration with command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rcg::linesearch::WolfeParams;
use rcg::{Method, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<rcg::Error> for ConfigError {
    fn from(e: rcg::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Rayleigh,
    Brockett,
    Quadratic,
}

impl FromStr for ProblemKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "rayleigh" => Ok(Self::Rayleigh),
            "brockett" => Ok(Self::Brockett),
            "quadratic" => Ok(Self::Quadratic),
            _ => err(format!(
                "unknown problem `{s}` (expected rayleigh, brockett or quadratic)"
            )),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rayleigh => "rayleigh",
            Self::Brockett => "brockett",
            Self::Quadratic => "quadratic",
        })
    }
}

pub const KEYS: [&str; 13] = [
    "problem",
    "n",
    "p",
    "seed",
    "method",
    "c1",
    "c2",
    "grad_tol",
    "max_iters",
    "output_path",
    "check_invariants",
    "a_diag",
    "b",
];

/// Every field optional: the union of a config file and flag overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub problem: Option<ProblemKind>,
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub grad_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub check_invariants: Option<bool>,
    /// Diagonal of `A` for a hand-written quadratic.
    pub a_diag: Option<Vec<f64>>,
    pub b: Option<Vec<f64>>,
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError(format!("invalid value `{v}` for `{key}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|t| parse_value(key, t.trim())).collect()
}

impl PartialConfig {
    pub fn parse_file_contents(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    i + 1
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return err(format!("line {}: duplicate key `{key}`", i + 1));
            }
            seen.push(key);
            cfg.set(key, value)
                .map_err(|e| ConfigError(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        match key {
            "problem" => self.problem = Some(v.parse()?),
            "n" => self.n = Some(parse_value(key, v)?),
            "p" => self.p = Some(parse_value(key, v)?),
            "seed" => self.seed = Some(parse_value(key, v)?),
            "method" => {
                self.method = Some(
                    v.parse()
                        .map_err(|e: rcg::Error| ConfigError(e.to_string()))?,
                )
            }
            "c1" => self.c1 = Some(parse_value(key, v)?),
            "c2" => self.c2 = Some(parse_value(key, v)?),
            "grad_tol" => self.grad_tol = Some(parse_value(key, v)?),
            "max_iters" => self.max_iters = Some(parse_value(key, v)?),
            "output_path" => self.output_path = Some(PathBuf::from(v)),
            "check_invariants" => self.check_invariants = Some(parse_value(key, v)?),
            "a_diag" => self.a_diag = Some(parse_list(key, v)?),
            "b" => self.b = Some(parse_list(key, v)?),
            _ => {
                return err(format!(
                    "unknown key `{key}` (known keys: {})",
                    KEYS.join(", ")
                ))
            }
        }
        Ok(())
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: PartialConfig) -> PartialConfig {
        PartialConfig {
            problem: other.problem.or(self.problem),
            n: other.n.or(self.n),
            p: other.p.or(self.p),
            seed: other.seed.or(self.seed),
            method: other.method.or(self.method),
            c1: other.c1.or(self.c1),
            c2: other.c2.or(self.c2),
            grad_tol: other.grad_tol.or(self.grad_tol),
            max_iters: other.max_iters.or(self.max_iters),
            output_path: other.output_path.or(self.output_path),
            check_invariants: other.check_invariants.or(self.check_invariants),
            a_diag: other.a_diag.or(self.a_diag),
            b: other.b.or(self.b),
        }
    }

    pub fn resolve(self) -> Result<RunConfig, ConfigError> {
        let Some(problem) = self.problem else {
            return err("missing `problem`");
        };
        let n = match (&self.a_diag, self.n) {
            (Some(d), Some(n)) if d.len() != n => {
                return err(format!("`a_diag` has {} entries but n = {n}", d.len()));
            }
            (Some(d), _) => d.len(),
            (None, Some(n)) => n,
            (None, None) => return err("missing `n`"),
        };
        if n == 0 {
            return err("n must be positive");
        }
        if (self.a_diag.is_some() || self.b.is_some()) && problem != ProblemKind::Quadratic {
            return err("`a_diag` and `b` only apply to the quadratic problem");
        }
        match (&self.a_diag, &self.b) {
            (Some(_), None) | (None, Some(_)) => {
                return err("`a_diag` and `b` must be given together")
            }
            (Some(_), Some(b)) if b.len() != n => {
                return err(format!("`b` has {} entries but n = {n}", b.len()));
            }
            _ => {}
        }
        let p = match problem {
            ProblemKind::Brockett => {
                let Some(p) = self.p else {
                    return err("missing `p` for the brockett problem");
                };
                if p == 0 || p > n {
                    return err(format!(
                        "p must satisfy 1 <= p <= n, got p = {p} and n = {n}"
                    ));
                }
                Some(p)
            }
            _ => {
                if self.p.is_some() {
                    return err("`p` only applies to the brockett problem");
                }
                None
            }
        };
        let cfg = RunConfig {
            problem,
            n,
            p,
            seed: self.seed.unwrap_or(0),
            method: self.method.unwrap_or(Method::ScaledDY),
            c1: self.c1,
            c2: self.c2,
            grad_tol: self.grad_tol.unwrap_or(1e-8),
            max_iters: self.max_iters.unwrap_or(5000),
            output_path: self
                .output_path
                .unwrap_or_else(|| PathBuf::from("trace.csv")),
            check_invariants: self.check_invariants.unwrap_or(true),
            a_diag: self.a_diag,
            b: self.b,
        };
        cfg.solve_options(cfg.method)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemKind,
    pub n: usize,
    pub p: Option<usize>,
    pub seed: u64,
    pub method: Method,
    /// `None` keeps the method's default.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub output_path: PathBuf,
    pub check_invariants: bool,
    pub a_diag: Option<Vec<f64>>,
    pub b: Option<Vec<f64>>,
}

impl RunConfig {
    /// Solver options for `method`, validated.
    pub fn solve_options(&self, method: Method) -> Result<SolveOptions, ConfigError> {
        let mut o = SolveOptions::new(method);
        let base: WolfeParams = o.wolfe;
        o.wolfe = WolfeParams {
            c1: self.c1.unwrap_or(base.c1),
            c2: self.c2.unwrap_or(base.c2),
            ..base
        };
        o.grad_tol = self.grad_tol;
        o.max_iters = self.max_iters;
        o.check_invariants = self.check_invariants;
        o.validate()?;
        Ok(o)
    }
}
