//! Experiment configuration: TOML file, command-line flags, defaults.
//!
//! Flags override file values, file values override per-experiment defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use serde::Deserialize;

use coslat_core::linalg::Matrix;
use coslat_core::lattice::{Domain, GeneratingVector};
use coslat_core::measures::MeasureSpec;

use crate::error::{config, io_err, Error, Result};
use crate::files::{load_vector, shipped_vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Uniform,
    Normal,
    DomainSweep,
    KernelSweep,
    LaplaceCompare,
    Diagnostics,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Uniform,
        Experiment::Normal,
        Experiment::DomainSweep,
        Experiment::KernelSweep,
        Experiment::LaplaceCompare,
        Experiment::Diagnostics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Uniform => "uniform",
            Experiment::Normal => "normal",
            Experiment::DomainSweep => "domain-sweep",
            Experiment::KernelSweep => "kernel-sweep",
            Experiment::LaplaceCompare => "laplace-compare",
            Experiment::Diagnostics => "diagnostics",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}; expected one of uniform, normal, domain-sweep, kernel-sweep, laplace-compare, diagnostics"))
    }
}

/// Command-line flags. Every flag is optional so that a config file can
/// supply it instead.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "coslat", version, about = "Cosine-expansion lattice rule experiments")]
pub struct Flags {
    /// uniform | normal | domain-sweep | kernel-sweep | laplace-compare | diagnostics
    #[arg(long)]
    pub experiment: Option<Experiment>,
    /// Dimension(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<usize>>,
    /// Weight parameter of the test function.
    #[arg(long)]
    pub w: Option<f64>,
    /// Kernel truncation radius (l1), comma separated for sweeps.
    #[arg(long = "K", value_delimiter = ',')]
    pub k: Option<Vec<u64>>,
    /// Projection box width, box = [-L/2, L/2]^s; comma separated for sweeps.
    #[arg(long = "L", value_delimiter = ',')]
    pub l: Option<Vec<f64>>,
    #[arg(long)]
    pub n_min_log2: Option<u32>,
    #[arg(long)]
    pub n_max_log2: Option<u32>,
    /// Generating vector file (`s_max n_max` header, one component per line).
    #[arg(long)]
    pub vector_file: Option<PathBuf>,
    /// Directory for cached weight tables.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// CSV (or report) destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write `log10 N, log10 |error|` pairs here.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// TOML file with the same keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Measure table of the config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureConfig {
    Uniform { lower: Vec<f64>, upper: Vec<f64> },
    Normal { mean: Vec<f64>, cov: Vec<Vec<f64>> },
    AsymmetricLaplace { mu_bar: Vec<f64>, sigma: Vec<Vec<f64>> },
}

impl MeasureConfig {
    pub fn to_spec(&self) -> Result<MeasureSpec> {
        let num = |e: coslat_core::Error| config(format!("measure: {e}"));
        match self {
            MeasureConfig::Uniform { lower, upper } => Ok(MeasureSpec::uniform(Domain::new(lower.clone(), upper.clone()).map_err(num)?)),
            MeasureConfig::Normal { mean, cov } => MeasureSpec::normal(mean.clone(), Matrix::from_rows(cov).map_err(num)?).map_err(num),
            MeasureConfig::AsymmetricLaplace { mu_bar, sigma } => {
                MeasureSpec::asymmetric_laplace(mu_bar.clone(), Matrix::from_rows(sigma).map_err(num)?).map_err(num)
            }
        }
    }
}

/// Explicit projection box, replacing `L`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<String>,
    pub s: Option<OneOrMany<usize>>,
    pub w: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<OneOrMany<u64>>,
    #[serde(rename = "L")]
    pub l: Option<OneOrMany<f64>>,
    pub n_min_log2: Option<u32>,
    pub n_max_log2: Option<u32>,
    pub vector_file: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub plot_data: Option<PathBuf>,
    #[serde(rename = "box")]
    pub domain: Option<BoxConfig>,
    pub measure: Option<MeasureConfig>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path).map_err(io_err(path))?)
    }
}

/// Fully resolved and validated experiment settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dims: Vec<usize>,
    pub w: f64,
    /// Explicit `K` values; `None` means the per-dimension default.
    pub radii: Option<Vec<u64>>,
    pub widths: Vec<f64>,
    pub domain: Option<Domain>,
    pub measure: Option<MeasureSpec>,
    /// Ascending exponents `p` of `N = 2^p`.
    pub n_schedule: Vec<u32>,
    pub vector: GeneratingVector,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub plot_data: Option<PathBuf>,
}

/// Default `K` for the normal experiments in dimension `s`.
pub fn default_radius(s: usize) -> u64 {
    if s >= 3 {
        64
    } else {
        128
    }
}

impl ExperimentConfig {
    /// Settings from flags, reading `--config` when given.
    pub fn from_flags(flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        Self::resolve(flags, file)
    }

    pub fn resolve(flags: &Flags, file: FileConfig) -> Result<Self> {
        let experiment = match (&flags.experiment, &file.experiment) {
            (Some(e), _) => *e,
            (None, Some(name)) => name.parse().map_err(Error::Config)?,
            (None, None) => return Err(config("no experiment given (use --experiment or the `experiment` key)")),
        };
        let vector = match flags.vector_file.as_ref().or(file.vector_file.as_ref()) {
            Some(p) => load_vector(p)?,
            None => shipped_vector(),
        };
        let dims = flags.s.clone().or_else(|| file.s.map(OneOrMany::into_vec)).unwrap_or_else(|| match experiment {
            Experiment::Uniform => (1..=8).collect(),
            Experiment::Normal => vec![1, 2, 3],
            _ => vec![2],
        });
        let w = flags.w.or(file.w).unwrap_or(match experiment {
            Experiment::Uniform => 0.5,
            _ => 0.9,
        });
        let radii = flags.k.clone().or_else(|| file.k.map(OneOrMany::into_vec)).or(match experiment {
            Experiment::KernelSweep => Some(vec![8, 16, 32, 64, 128, 256, 512]),
            Experiment::LaplaceCompare => Some(vec![64]),
            _ => None,
        });
        let widths = flags.l.clone().or_else(|| file.l.map(OneOrMany::into_vec)).unwrap_or_else(|| match experiment {
            Experiment::DomainSweep => vec![1.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0],
            _ => vec![9.0],
        });
        let domain = file.domain.map(|b| Domain::new(b.lower, b.upper)).transpose().map_err(|e| config(format!("box: {e}")))?;
        let measure = file.measure.as_ref().map(MeasureConfig::to_spec).transpose()?;
        let n_min = flags.n_min_log2.or(file.n_min_log2).unwrap_or(4);
        let n_max = flags.n_max_log2.or(file.n_max_log2).unwrap_or(match experiment {
            Experiment::Uniform => 18,
            Experiment::Diagnostics => 6,
            _ => 14,
        });
        let cfg = ExperimentConfig {
            experiment,
            dims,
            w,
            radii,
            widths,
            domain,
            measure,
            n_schedule: (n_min..=n_max).collect(),
            vector,
            cache_dir: flags.cache_dir.clone().or(file.cache_dir),
            out: flags.out.clone().or(file.out),
            plot_data: flags.plot_data.clone().or(file.plot_data),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let max_dim = match self.experiment {
            Experiment::Uniform => 8,
            Experiment::Normal => 3,
            _ => 2,
        };
        if self.dims.is_empty() {
            return Err(config("no dimension given"));
        }
        for &s in &self.dims {
            if s == 0 || s > max_dim {
                return Err(config(format!("{} supports s in 1..={max_dim}, got {s}", self.experiment)));
            }
            if s > self.vector.dim() {
                return Err(config(format!("s = {s} exceeds the generating vector's {} components", self.vector.dim())));
            }
        }
        if matches!(self.experiment, Experiment::LaplaceCompare | Experiment::DomainSweep | Experiment::KernelSweep) && self.dims != [2] {
            return Err(config(format!("{} is two-dimensional", self.experiment)));
        }
        if !(self.w > 0.0 && self.w <= 1.0) {
            return Err(config(format!("w must lie in (0, 1], got {}", self.w)));
        }
        if let Some(r) = &self.radii {
            if r.is_empty() || r.contains(&0) {
                return Err(config("K values must be positive"));
            }
        }
        if self.widths.is_empty() || self.widths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(config("L values must be positive"));
        }
        if self.n_schedule.is_empty() {
            return Err(config("empty N schedule (n_min_log2 > n_max_log2)"));
        }
        let (lo, hi) = (self.n_schedule[0], *self.n_schedule.last().unwrap());
        if lo < 1 || hi >= 63 || (1u64 << hi) > self.vector.n_max() {
            return Err(config(format!("N schedule 2^{lo}..2^{hi} must stay within [2, n_max = {}]", self.vector.n_max())));
        }
        if let Some(d) = &self.domain {
            if self.dims.iter().any(|&s| s != d.dim()) {
                return Err(config("box dimension does not match s"));
            }
        }
        if let Some(m) = &self.measure {
            if self.dims.iter().any(|&s| s != m.dim()) {
                return Err(config("measure dimension does not match s"));
            }
            let ok = match self.experiment {
                Experiment::LaplaceCompare => !matches!(m, MeasureSpec::UniformOnBox(_)),
                Experiment::Normal | Experiment::DomainSweep | Experiment::KernelSweep => !matches!(m, MeasureSpec::AsymmetricLaplace { .. }),
                _ => false,
            };
            if !ok {
                return Err(config(format!("{} does not take a measure table", self.experiment)));
            }
        }
        Ok(())
    }

    pub fn schedule(&self) -> impl Iterator<Item = u64> + '_ {
        self.n_schedule.iter().map(|&p| 1u64 << p)
    }
}
