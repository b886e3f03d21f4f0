//! Key-value defaults read from a TOML file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::args::{self, FamilyArg, FilterArg};
use crate::density::Bandwidth;
use crate::error::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "UNIFILTER_OUT_DIR";

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BandwidthSetting {
    Value(f64),
    Name(String),
}

/// Every key the config file may set. Flags override these, and these
/// override built-in defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub df: Option<u32>,
    pub epsilon: Option<f64>,
    pub mu: Option<f64>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub xi: Option<f64>,
    pub alpha: Option<f64>,
    pub transform: Option<bool>,
    pub bandwidth: Option<BandwidthSetting>,
    pub filter: Option<String>,
    pub window: Option<usize>,
    pub threshold: Option<f64>,
    pub nbins: Option<usize>,
    pub upto: Option<f64>,
    pub reps: Option<usize>,
    pub jobs: Option<usize>,
    pub gamma: Option<f64>,
    pub r: Option<f64>,
    pub m_grid: Option<Vec<usize>>,
    pub out_dir: Option<PathBuf>,
}

fn checked<T>(key: &str, parsed: std::result::Result<T, String>) -> Result<T> {
    parsed.map_err(|e| Error::Config(format!("config key `{key}`: {e}")))
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn family(&self) -> Result<Option<FamilyArg>> {
        self.family
            .as_deref()
            .map(|s| match s {
                "gaussian" => Ok(FamilyArg::Gaussian),
                "cauchy" => Ok(FamilyArg::Cauchy),
                "student-t" | "student_t" => Ok(FamilyArg::StudentT),
                other => Err(Error::Config(format!("config key `family`: unknown family `{other}`"))),
            })
            .transpose()
    }

    pub fn filter(&self) -> Result<Option<FilterArg>> {
        self.filter
            .as_deref()
            .map(|s| match s {
                "fixed" => Ok(FilterArg::Fixed),
                "random" => Ok(FilterArg::Random),
                other => Err(Error::Config(format!("config key `filter`: unknown filter `{other}`"))),
            })
            .transpose()
    }

    pub fn bandwidth(&self) -> Result<Option<Bandwidth>> {
        match &self.bandwidth {
            None => Ok(None),
            Some(BandwidthSetting::Name(s)) => checked("bandwidth", args::parse_bandwidth(s)).map(Some),
            Some(BandwidthSetting::Value(v)) => checked("bandwidth", args::parse_bandwidth(&v.to_string())).map(Some),
        }
    }

    pub fn epsilon(&self) -> Result<Option<f64>> {
        self.epsilon
            .map(|v| checked("epsilon", args::parse_epsilon(&v.to_string())))
            .transpose()
    }

    pub fn open_unit(&self, key: &str, v: Option<f64>) -> Result<Option<f64>> {
        v.map(|v| checked(key, args::parse_open_unit(&v.to_string()))).transpose()
    }

    pub fn count(&self, key: &str, v: Option<usize>) -> Result<Option<usize>> {
        v.map(|v| checked(key, args::parse_count(&v.to_string()))).transpose()
    }
}

/// Flag, then config file, then `UNIFILTER_OUT_DIR`, then the working directory.
pub fn resolve_out_dir(flag: Option<&Path>, file: &FileConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| file.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
