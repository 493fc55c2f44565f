//! Flat `key = value` experiment files.
//!
//! ```text
//! # benchmark run
//! a = 1
//! T = 1
//! M = 50
//! N = 128
//! u0 = gaussian:16
//! potential = example1
//! observation_index = 0
//! P = 10000
//! epsilon = 0.1
//! method = tikhonov
//! mu = 0.03
//! xi_max = 30
//! base_seed = 20240601
//! sampler = fd
//! threads = 1
//! ```
//!
//! Blank lines and `#` comments are ignored; unknown or repeated keys are
//! errors. `mu` is required for `method = tikhonov`, `xi_max` for
//! `method = cutoff`; the other may be given and is carried along.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use spde_inverse::{FilterSpec, Grid1D, InitialCondition, Potential, RunConfig, Sampler};

use crate::csvio::read_series;
use crate::error::{CliError, Result};

pub const KEYS: [&str; 15] = [
    "a",
    "T",
    "M",
    "N",
    "u0",
    "potential",
    "observation_index",
    "P",
    "epsilon",
    "method",
    "mu",
    "xi_max",
    "base_seed",
    "sampler",
    "threads",
];

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialPreset {
    /// `sin(pi t)`
    Example1,
    /// Piecewise square-root profile with kinks at 1/5, 1/2, 4/5.
    Example2,
    /// Piecewise constant 0, 1, 2, 0.
    Example3,
    Constant(f64),
    /// `amplitude * sin(pi t)`
    Sine(f64),
    /// Tabulated `t,value` CSV.
    Csv(PathBuf),
}

impl PotentialPreset {
    pub fn to_potential(&self) -> Result<Potential> {
        Ok(match self {
            PotentialPreset::Example1 => Potential::Sine { amplitude: 1.0 },
            PotentialPreset::Example2 => Potential::PiecewiseRoot,
            PotentialPreset::Example3 => Potential::PiecewiseConstant,
            PotentialPreset::Constant(c) => Potential::Constant(*c),
            PotentialPreset::Sine(a) => Potential::Sine { amplitude: *a },
            PotentialPreset::Csv(path) => Potential::Tabulated(read_series(path)?),
        })
    }

    fn parse(value: &str, base: &Path) -> std::result::Result<Self, String> {
        match split_arg(value) {
            ("example1", None) => Ok(PotentialPreset::Example1),
            ("example2", None) => Ok(PotentialPreset::Example2),
            ("example3", None) => Ok(PotentialPreset::Example3),
            ("constant", Some(c)) => parse_f64(c).map(PotentialPreset::Constant),
            ("sine", Some(a)) => parse_f64(a).map(PotentialPreset::Sine),
            ("csv", Some(p)) => Ok(PotentialPreset::Csv(resolve(base, p))),
            _ => Err(format!(
                "expected example1, example2, example3, constant:<c>, sine:<amplitude> or csv:<path>, got '{value}'"
            )),
        }
    }
}

impl fmt::Display for PotentialPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialPreset::Example1 => write!(f, "example1"),
            PotentialPreset::Example2 => write!(f, "example2"),
            PotentialPreset::Example3 => write!(f, "example3"),
            PotentialPreset::Constant(c) => write!(f, "constant:{c}"),
            PotentialPreset::Sine(a) => write!(f, "sine:{a}"),
            PotentialPreset::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPreset {
    /// `exp(-s x^2)`
    Gaussian(f64),
    /// `sin(pi (x + a) / (2a))`
    Eigen1,
    /// Tabulated `x,value` CSV.
    Csv(PathBuf),
}

impl InitialPreset {
    pub fn to_initial(&self, a: f64) -> Result<InitialCondition> {
        Ok(match self {
            InitialPreset::Gaussian(s) => InitialCondition::Gaussian { sharpness: *s },
            InitialPreset::Eigen1 => InitialCondition::FirstEigenmode { a },
            InitialPreset::Csv(path) => {
                InitialCondition::tabulated(crate::csvio::read_pairs(path)?)?
            }
        })
    }

    fn parse(value: &str, base: &Path) -> std::result::Result<Self, String> {
        match split_arg(value) {
            ("gaussian", None) => Ok(InitialPreset::Gaussian(16.0)),
            ("gaussian", Some(s)) => parse_f64(s).map(InitialPreset::Gaussian),
            ("eigen1", None) => Ok(InitialPreset::Eigen1),
            ("csv", Some(p)) => Ok(InitialPreset::Csv(resolve(base, p))),
            _ => Err(format!(
                "expected gaussian[:<s>], eigen1 or csv:<path>, got '{value}'"
            )),
        }
    }
}

impl fmt::Display for InitialPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialPreset::Gaussian(s) => write!(f, "gaussian:{s}"),
            InitialPreset::Eigen1 => write!(f, "eigen1"),
            InitialPreset::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Tikhonov,
    Cutoff,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Tikhonov => "tikhonov",
            Method::Cutoff => "cutoff",
        })
    }
}

pub fn sampler_name(s: Sampler) -> &'static str {
    match s {
        Sampler::Fd => "fd",
        Sampler::ExactExponential => "exact",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub a: f64,
    pub t_final: f64,
    pub m: usize,
    pub n: usize,
    pub u0: InitialPreset,
    pub potential: PotentialPreset,
    pub observation_index: i64,
    pub paths: usize,
    pub epsilon: f64,
    pub method: Method,
    pub mu: Option<f64>,
    pub xi_max: Option<f64>,
    pub base_seed: u64,
    pub sampler: Sampler,
    pub threads: usize,
}

impl Default for ExperimentConfig {
    /// The smooth benchmark at desk scale (`P = 10^4`).
    fn default() -> Self {
        Self {
            a: 1.0,
            t_final: 1.0,
            m: 50,
            n: 128,
            u0: InitialPreset::Gaussian(16.0),
            potential: PotentialPreset::Example1,
            observation_index: 0,
            paths: 10_000,
            epsilon: 0.1,
            method: Method::Tikhonov,
            mu: Some(0.03),
            xi_max: Some(30.0),
            base_seed: 20_240_601,
            sampler: Sampler::Fd,
            threads: 1,
        }
    }
}

fn split_arg(value: &str) -> (&str, Option<&str>) {
    match value.split_once(':') {
        Some((head, tail)) => (head.trim(), Some(tail.trim())),
        None => (value.trim(), None),
    }
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("expected a finite number, got '{v}'"))
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let path = PathBuf::from(p);
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; relative CSV paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::ConfigField {
                    line: line_no,
                    key: line.to_string(),
                    message: "expected 'key = value'".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(known) = KEYS.iter().find(|k| **k == key) else {
                return Err(CliError::ConfigField {
                    line: line_no,
                    key: key.to_string(),
                    message: format!("unknown key (expected one of {})", KEYS.join(", ")),
                });
            };
            if let Some((first, _)) = entries.insert(known, (line_no, value)) {
                return Err(CliError::ConfigField {
                    line: line_no,
                    key: key.to_string(),
                    message: format!("duplicate key (first set on line {first})"),
                });
            }
        }

        let field = |key: &str| entries.get(key).copied();
        let fail = |key: &str, message: String| {
            let line = field(key).map_or(0, |(l, _)| l);
            CliError::ConfigField {
                line,
                key: key.to_string(),
                message,
            }
        };
        let required = |key: &str| {
            field(key)
                .map(|(_, v)| v)
                .ok_or_else(|| fail(key, "missing required key".into()))
        };
        let number = |key: &str, v: &str| parse_f64(v).map_err(|m| fail(key, m));
        let count = |key: &str, v: &str| {
            v.parse::<usize>()
                .map_err(|_| fail(key, format!("expected a non-negative integer, got '{v}'")))
        };

        let a = number("a", required("a")?)?;
        let t_final = number("T", required("T")?)?;
        let m = count("M", required("M")?)?;
        let n = count("N", required("N")?)?;
        let u0 = match field("u0") {
            Some((_, v)) => InitialPreset::parse(v, base).map_err(|m| fail("u0", m))?,
            None => InitialPreset::Gaussian(16.0),
        };
        let potential = PotentialPreset::parse(required("potential")?, base)
            .map_err(|m| fail("potential", m))?;
        let observation_index = match field("observation_index") {
            Some((_, v)) => v.parse::<i64>().map_err(|_| {
                fail(
                    "observation_index",
                    format!("expected an integer, got '{v}'"),
                )
            })?,
            None => 0,
        };
        let paths = count("P", required("P")?)?;
        let epsilon = number("epsilon", required("epsilon")?)?;
        let method = match required("method")? {
            "tikhonov" => Method::Tikhonov,
            "cutoff" => Method::Cutoff,
            other => {
                return Err(fail(
                    "method",
                    format!("expected tikhonov or cutoff, got '{other}'"),
                ))
            }
        };
        let mu = field("mu").map(|(_, v)| number("mu", v)).transpose()?;
        let xi_max = field("xi_max")
            .map(|(_, v)| number("xi_max", v))
            .transpose()?;
        let base_seed = required("base_seed")?
            .parse::<u64>()
            .map_err(|_| fail("base_seed", "expected an unsigned 64-bit integer".into()))?;
        let sampler = match field("sampler").map(|(_, v)| v) {
            None | Some("fd") => Sampler::Fd,
            Some("exact") => Sampler::ExactExponential,
            Some(other) => {
                return Err(fail(
                    "sampler",
                    format!("expected fd or exact, got '{other}'"),
                ))
            }
        };
        let threads = match field("threads") {
            Some((_, v)) => count("threads", v)?,
            None => 1,
        };

        let cfg = Self {
            a,
            t_final,
            m,
            n,
            u0,
            potential,
            observation_index,
            paths,
            epsilon,
            method,
            mu,
            xi_max,
            base_seed,
            sampler,
            threads,
        };
        cfg.check(&fail)?;
        Ok(cfg)
    }

    fn check(&self, fail: &dyn Fn(&str, String) -> CliError) -> Result<()> {
        if let Err(e) = Grid1D::new(self.a, self.t_final, self.m, self.n) {
            let key = if !(self.a > 0.0) {
                "a"
            } else if !(self.t_final > 0.0) {
                "T"
            } else if self.m < 2 {
                "M"
            } else {
                "N"
            };
            return Err(fail(key, e.to_string()));
        }
        if self.n < 16 {
            return Err(fail("N", "periodization needs N >= 16".into()));
        }
        if self.observation_index.unsigned_abs() >= self.m as u64 {
            return Err(fail(
                "observation_index",
                format!(
                    "node {} is not interior (|m| must be < M = {})",
                    self.observation_index, self.m
                ),
            ));
        }
        if self.paths < 1 {
            return Err(fail("P", "must be at least 1".into()));
        }
        if self.epsilon < 0.0 {
            return Err(fail("epsilon", "must be >= 0".into()));
        }
        match self.method {
            Method::Tikhonov if !self.mu.is_some_and(|m| m > 0.0) => {
                return Err(fail("mu", "method = tikhonov needs mu > 0".into()))
            }
            Method::Cutoff if !self.xi_max.is_some_and(|x| x > 0.0) => {
                return Err(fail("xi_max", "method = cutoff needs xi_max > 0".into()))
            }
            _ => {}
        }
        if self.threads < 1 {
            return Err(fail("threads", "must be at least 1".into()));
        }
        Ok(())
    }

    pub fn filter(&self) -> FilterSpec {
        match self.method {
            Method::Tikhonov => FilterSpec::Tikhonov {
                mu: self.mu.expect("validated"),
            },
            Method::Cutoff => FilterSpec::Cutoff {
                xi_max: self.xi_max.expect("validated"),
            },
        }
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Ok(Grid1D::new(self.a, self.t_final, self.m, self.n)?)
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        let cfg = RunConfig {
            grid: self.grid()?,
            potential: self.potential.to_potential()?,
            initial_condition: self.u0.to_initial(self.a)?,
            observation_index: self.observation_index,
            paths: self.paths,
            epsilon: self.epsilon,
            filter: self.filter(),
            base_seed: self.base_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config text; `threads` is omitted when `with_threads` is false, since
    /// it never affects results.
    pub fn to_config_string(&self, with_threads: bool) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("a", self.a.to_string());
        put("T", self.t_final.to_string());
        put("M", self.m.to_string());
        put("N", self.n.to_string());
        put("u0", self.u0.to_string());
        put("potential", self.potential.to_string());
        put("observation_index", self.observation_index.to_string());
        put("P", self.paths.to_string());
        put("epsilon", self.epsilon.to_string());
        put("method", self.method.to_string());
        if let Some(mu) = self.mu {
            put("mu", mu.to_string());
        }
        if let Some(x) = self.xi_max {
            put("xi_max", x.to_string());
        }
        put("base_seed", self.base_seed.to_string());
        put("sampler", sampler_name(self.sampler).to_string());
        if with_threads {
            put("threads", self.threads.to_string());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(text, Path::new("/data"))
    }

    const FULL: &str = "a = 1\nT = 1\nM = 50\nN = 128\nu0 = gaussian:16\npotential = example1\n\
        observation_index = 0\nP = 10000\nepsilon = 0.1\nmethod = tikhonov\nmu = 0.03\nxi_max = 30\n\
        base_seed = 20240601\nsampler = fd\nthreads = 1\n";

    #[test]
    fn full_config_is_default() {
        assert_eq!(parse(FULL).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig {
            potential: PotentialPreset::Csv("/data/q.csv".into()),
            epsilon: 0.1 + 0.2,
            method: Method::Cutoff,
            mu: None,
            sampler: Sampler::ExactExponential,
            threads: 8,
            ..ExperimentConfig::default()
        };
        assert_eq!(parse(&c.to_config_string(true)).unwrap(), c);
        let without = parse(&c.to_config_string(false)).unwrap();
        assert_eq!(without.threads, 1);
    }

    #[test]
    fn comments_and_defaults() {
        let text = "# header\na=2 # half width\nT=0.5\nM=10\nN=32\npotential=constant:1.5\nP=5\nepsilon=0\nmethod=cutoff\nxi_max=20\nbase_seed=1\n";
        let c = parse(text).unwrap();
        assert_eq!(c.a, 2.0);
        assert_eq!(c.potential, PotentialPreset::Constant(1.5));
        assert_eq!(c.u0, InitialPreset::Gaussian(16.0));
        assert_eq!(c.sampler, Sampler::Fd);
        assert_eq!(c.threads, 1);
        assert_eq!(c.filter(), FilterSpec::Cutoff { xi_max: 20.0 });
    }

    fn field_error(text: &str) -> (usize, String) {
        match parse(text) {
            Err(CliError::ConfigField { line, key, .. }) => (line, key),
            other => panic!("expected field error, got {other:?}"),
        }
    }

    #[test]
    fn field_level_errors() {
        assert_eq!(
            field_error(&format!("{FULL}colour = red\n")),
            (16, "colour".into())
        );
        assert_eq!(field_error(&format!("{FULL}P = 3\n")), (16, "P".into()));
        assert_eq!(
            field_error(&FULL.replace("M = 50", "M = fifty")),
            (3, "M".into())
        );
        assert_eq!(
            field_error(&FULL.replace("observation_index = 0", "observation_index = 50")),
            (7, "observation_index".into())
        );
        assert_eq!(field_error(&FULL.replace("mu = 0.03\n", "")).1, "mu");
        assert_eq!(
            field_error(&FULL.replace("epsilon = 0.1", "epsilon = -1")).1,
            "epsilon"
        );
        assert_eq!(
            field_error(&FULL.replace("sampler = fd", "sampler = milstein")).1,
            "sampler"
        );
        assert_eq!(
            field_error(&FULL.replace("potential = example1", "potential = example4")).1,
            "potential"
        );
        assert_eq!(field_error(&FULL.replace("N = 128", "N = 8")).1, "N");
        assert_eq!(field_error(&FULL.replace("P = 10000\n", "")).1, "P");
        assert_eq!(field_error("just words\n").0, 1);
    }

    #[test]
    fn relative_csv_paths_resolve_against_config_dir() {
        let c = parse(&FULL.replace("potential = example1", "potential = csv:q.csv")).unwrap();
        assert_eq!(c.potential, PotentialPreset::Csv("/data/q.csv".into()));
    }
}
