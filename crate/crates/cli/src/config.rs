//! Run configuration: a TOML file whose sections feed the subcommands.
//!
//! ```toml
//! measure = "two_source:a=1"
//!
//! [simulation]
//! n_particles = 1000
//! beta = 2.0
//! dt = 0.001
//! t_end = 1.0
//! seed = 7
//! sample_times = [0.5, 1.0]
//!
//! [density]
//! times = [0.25, 0.5, 1.0, 1.5, 2.0]
//! grid = { min = -4.0, max = 4.0, n = 801 }
//!
//! [support]
//! t_range = { min = 0.0, max = 2.0, n = 41 }
//!
//! [verify]
//! suite = "all"
//! inject = []
//!
//! [output]
//! dir = "out"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dyson_core::io::LineGrid;
use dyson_core::particle::HistogramGrid;
use dyson_core::verify::Fault;
use dyson_core::{AnalyticProfile, AtomicMeasure, SimParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Initial measure: `one_source`, `two_source:a=A` or `atoms:FILE`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum MeasureSpec {
    OneSource,
    TwoSource { a: f64 },
    Atoms { path: PathBuf },
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::OneSource => write!(f, "one_source"),
            MeasureSpec::TwoSource { a } => write!(f, "two_source:a={a}"),
            MeasureSpec::Atoms { path } => write!(f, "atoms:{}", path.display()),
        }
    }
}

impl FromStr for MeasureSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "one_source" {
            return Ok(MeasureSpec::OneSource);
        }
        if let Some(rest) = s.strip_prefix("two_source") {
            let value = match rest {
                "" => "1",
                _ => rest
                    .strip_prefix(":a=")
                    .ok_or_else(|| format!("expected two_source:a=A, got {s:?}"))?,
            };
            let a: f64 = value.parse().map_err(|_| format!("bad source position {value:?}"))?;
            if !(a > 0.0) || !a.is_finite() {
                return Err(format!("source position must be positive, got {a}"));
            }
            return Ok(MeasureSpec::TwoSource { a });
        }
        if let Some(path) = s.strip_prefix("atoms:") {
            if path.is_empty() {
                return Err("atoms: needs a file path".into());
            }
            return Ok(MeasureSpec::Atoms { path: path.into() });
        }
        Err(format!("unknown measure {s:?}; use one_source, two_source:a=A or atoms:FILE"))
    }
}

impl TryFrom<String> for MeasureSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<MeasureSpec> for String {
    fn from(m: MeasureSpec) -> String {
        m.to_string()
    }
}

impl MeasureSpec {
    pub fn profile(&self) -> Result<AnalyticProfile, CliError> {
        Ok(match self {
            MeasureSpec::OneSource => AnalyticProfile::OneSource,
            MeasureSpec::TwoSource { a } => AnalyticProfile::TwoSource { a: *a },
            MeasureSpec::Atoms { path } => {
                let file = std::fs::File::open(path)
                    .map_err(|e| CliError::Validation(format!("measure: cannot open {}: {e}", path.display())))?;
                let atoms = AtomicMeasure::from_csv_reader(file)
                    .map_err(|e| CliError::Validation(format!("measure: {}: {e}", path.display())))?;
                AnalyticProfile::General { atoms }
            }
        })
    }

    /// Whether KS distances against the analytic limit are reported.
    pub fn has_closed_form(&self) -> bool {
        !matches!(self, MeasureSpec::Atoms { .. })
    }
}

/// `MIN:MAX:N` on the command line, `{ min, max, n }` in files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, n] = parts.as_slice() else {
            return Err(format!("expected MIN:MAX:N, got {s:?}"));
        };
        Ok(GridSpec {
            min: min.parse().map_err(|_| format!("bad minimum {min:?}"))?,
            max: max.parse().map_err(|_| format!("bad maximum {max:?}"))?,
            n: n.parse().map_err(|_| format!("bad count {n:?}"))?,
        })
    }
}

impl GridSpec {
    pub fn line(&self, field: &str) -> Result<LineGrid, CliError> {
        LineGrid::new(self.min, self.max, self.n).map_err(|e| match e {
            dyson_core::Error::InvalidParameter { reason, .. } => CliError::Validation(format!("{field}: {reason}")),
            other => CliError::Runtime(other.to_string()),
        })
    }
}

/// Comma-separated list of reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad number {v:?}")))
        .collect()
}

/// `--times` argument.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeList(pub Vec<f64>);

impl FromStr for TimeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_list(s).map(TimeList)
    }
}

/// Seeds are written as TOML integers when they fit and as strings otherwise.
mod seed_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => u64::try_from(v).map_err(serde::de::Error::custom),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub n_particles: usize,
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    #[serde(with = "seed_repr", default)]
    pub seed: u64,
    /// Defaults to `[t_end]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_times: Option<Vec<f64>>,
    /// Histogram bins; by default they span the particles and the analytic support.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<HistogramSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_bins: usize,
}

impl SimulationConfig {
    pub fn params(&self) -> SimParams {
        SimParams {
            n_particles: self.n_particles,
            beta: self.beta,
            dt: self.dt,
            seed: self.seed,
            t_end: self.t_end,
        }
    }

    pub fn sample_times(&self) -> Vec<f64> {
        self.sample_times.clone().unwrap_or_else(|| vec![self.t_end])
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params().validate().map_err(|e| CliError::field("simulation", e))?;
        let times = self.sample_times();
        for (k, &t) in times.iter().enumerate() {
            if !(0.0..=self.t_end).contains(&t) {
                return Err(CliError::Validation(format!(
                    "simulation.sample_times[{k}]: {t} lies outside [0, t_end = {}]",
                    self.t_end
                )));
            }
            if k > 0 && t < times[k - 1] {
                return Err(CliError::Validation("simulation.sample_times: must be ascending".into()));
            }
        }
        if let Some(h) = &self.histogram {
            HistogramGrid::new(h.x_min, h.x_max, h.n_bins).map_err(|e| CliError::field("simulation.histogram", e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub times: Vec<f64>,
    pub grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportConfig {
    pub t_range: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_suite")]
    pub suite: String,
    #[serde(default)]
    pub inject: Vec<Fault>,
}

fn default_suite() -> String {
    "all".into()
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: default_suite(),
            inject: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

/// Everything a run needs; sections irrelevant to a command may be absent.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<SupportConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "dyson-output";

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .as_ref()
            .map_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR), |o| o.dir.clone())
    }

    pub fn measure(&self) -> Result<&MeasureSpec, CliError> {
        self.measure
            .as_ref()
            .ok_or_else(|| CliError::Validation("measure: missing (give --measure or `measure = ...`)".into()))
    }

    pub fn simulation(&self) -> Result<&SimulationConfig, CliError> {
        self.simulation
            .as_ref()
            .ok_or_else(|| CliError::Validation("simulation: missing section".into()))
    }
}
