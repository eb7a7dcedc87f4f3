//! Run configuration: config-file values overridden by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use proxyfaug_core::{AugmentationParams, Estimator, KeyValues, Schema};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorArg {
    Mean,
    InverseDissimilarity,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Mean => Estimator::Mean,
            EstimatorArg::InverseDissimilarity => Estimator::InverseDissimilarity,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// Key-value config file (`key = value` per line, keys as the long flag names)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Training CSV
    #[arg(long, global = true)]
    pub train: Option<PathBuf>,
    /// Validation CSV
    #[arg(long, global = true)]
    pub validation: Option<PathBuf>,
    /// Test CSV
    #[arg(long, global = true)]
    pub test: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Column mapping file (rssi_columns, lat_column, lon_column, sentinel)
    #[arg(long, global = true)]
    pub schema: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Proximity range in meters
    #[arg(long, global = true)]
    pub range: Option<f64>,
    /// Maximum cluster size
    #[arg(long, global = true)]
    pub smax: Option<usize>,
    /// Offspring per parent pair
    #[arg(long, global = true)]
    pub ncross: Option<usize>,
    /// Mutation probability
    #[arg(long, global = true)]
    pub pmut: Option<f64>,
    /// Number of nearest neighbors
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Powed transform exponent
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Sentinel replacement value; defaults to the training minimum
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub floor: Option<f64>,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true, env = "PROXYFAUG_THREADS")]
    pub threads: Option<usize>,
}

/// Fully resolved settings of one run; embedded in every output manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub train: Option<PathBuf>,
    pub validation: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub out: PathBuf,
    pub schema: Option<PathBuf>,
    pub augmentation: AugmentationParams,
    pub k: usize,
    pub beta: f64,
    pub floor: Option<f64>,
    pub threads: usize,
    #[serde(skip)]
    file: KeyValues,
}

const KNOWN_KEYS: &[&str] = &[
    "train",
    "validation",
    "test",
    "out",
    "schema",
    "seed",
    "range",
    "smax",
    "ncross",
    "pmut",
    "k",
    "beta",
    "floor",
    "threads",
    "split",
    "ks",
    "estimator",
];

fn file_value<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<T>, CliError> {
    kv.parse_value(key)
        .map_err(|e| CliError::Usage(format!("config file: {e}")))
}

impl RunConfig {
    pub fn resolve(flags: &RunFlags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => KeyValues::from_file(path)?,
            None => KeyValues::default(),
        };
        if let Some(key) = file.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(CliError::Usage(format!("config file: unknown key `{key}`")));
        }
        let path = |flag: &Option<PathBuf>, key: &str| {
            flag.clone().or_else(|| file.get(key).map(PathBuf::from))
        };
        let defaults = AugmentationParams::default();

        macro_rules! pick {
            ($flag:expr, $key:literal, $default:expr) => {
                match $flag {
                    Some(v) => v,
                    None => file_value(&file, $key)?.unwrap_or($default),
                }
            };
        }

        Ok(RunConfig {
            train: path(&flags.train, "train"),
            validation: path(&flags.validation, "validation"),
            test: path(&flags.test, "test"),
            out: path(&flags.out, "out").unwrap_or_else(|| PathBuf::from(".")),
            schema: path(&flags.schema, "schema"),
            augmentation: AugmentationParams {
                range_m: pick!(flags.range, "range", defaults.range_m),
                s_max: pick!(flags.smax, "smax", defaults.s_max),
                n_crossovers: pick!(flags.ncross, "ncross", defaults.n_crossovers),
                p_mutation: pick!(flags.pmut, "pmut", defaults.p_mutation),
                seed: pick!(flags.seed, "seed", defaults.seed),
            },
            k: pick!(flags.k, "k", 6),
            beta: pick!(flags.beta, "beta", 2.6),
            floor: match flags.floor {
                Some(f) => Some(f),
                None => file_value(&file, "floor")?,
            },
            threads: pick!(flags.threads, "threads", 0),
            file,
        })
    }

    /// A raw config-file value for subcommand-specific keys.
    pub fn file_value(&self, key: &str) -> Option<&str> {
        self.file.get(key)
    }

    pub fn schema(&self) -> Result<Schema, CliError> {
        match &self.schema {
            Some(path) => Ok(Schema::from_file(path)?),
            None => Ok(Schema::default()),
        }
    }

    pub fn require<'a>(
        &self,
        value: &'a Option<PathBuf>,
        name: &str,
    ) -> Result<&'a Path, CliError> {
        value.as_deref().ok_or_else(|| {
            CliError::Usage(format!("missing --{name} (flag or config key `{name}`)"))
        })
    }

    pub fn split_path(&self, split: Split) -> Result<&Path, CliError> {
        match split {
            Split::Train => self.require(&self.train, "train"),
            Split::Validation => self.require(&self.validation, "validation"),
            Split::Test => self.require(&self.test, "test"),
        }
    }
}

/// Parses `1..15` (inclusive), `1,2,6` or a mix such as `1..4,6`.
pub fn parse_ks(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("invalid k list `{spec}`"));
    let mut ks = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| bad())?;
            let hi: usize = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            ks.extend(lo..=hi);
        } else {
            ks.push(part.parse().map_err(|_| bad())?);
        }
    }
    if ks.is_empty() {
        return Err(bad());
    }
    Ok(ks)
}
