//! Experiment configuration and its flat `key = value` text form.
//!
//! Unknown keys are rejected, missing keys take the defaults, `#` starts a
//! comment. A grid file holds several documents separated by `---` lines.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use facerec_core::classify::Metric;
use facerec_core::radon::RadonMode;
use facerec_core::sfs::{LightDirection, SfsConfig};
use facerec_core::subspace::DEFAULT_MU_SCALE;
use facerec_core::wavelet::Family;

use crate::dataset::{Selection, SplitSpec};
use crate::error::{Error, Result};
use crate::synthetic::{Illumination, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Algorithm {
    /// Depth, wavelet-packet energies, LDA, k-NN.
    #[default]
    CoifPacket,
    /// Depth, principal-axis Radon spectrum, LDA, k-NN.
    RadonDft,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::CoifPacket => "coif-packet",
            Algorithm::RadonDft => "radon-dft",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "coif" | "coif-packet" => Ok(Algorithm::CoifPacket),
            "radon" | "radon-dft" => Ok(Algorithm::RadonDft),
            other => Err(format!("unknown algorithm {other:?}, expected coif or radon")),
        }
    }
}

/// Where the images come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatabaseSource {
    Directory(PathBuf),
    /// The built-in bump-surface set; `varied` selects per-image lighting.
    Synthetic {
        varied: bool,
    },
}

impl DatabaseSource {
    pub fn synthetic_spec(&self, seed: u64) -> Option<SyntheticSpec> {
        match self {
            DatabaseSource::Synthetic { varied } => Some(SyntheticSpec {
                illumination: if *varied {
                    Illumination::Varied
                } else {
                    Illumination::Fixed
                },
                seed,
                ..SyntheticSpec::default()
            }),
            DatabaseSource::Directory(_) => None,
        }
    }
}

impl fmt::Display for DatabaseSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatabaseSource::Directory(p) => write!(f, "{}", p.display()),
            DatabaseSource::Synthetic { varied: true } => f.write_str("synthetic"),
            DatabaseSource::Synthetic { varied: false } => f.write_str("synthetic-fixed"),
        }
    }
}

impl FromStr for DatabaseSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "" => Err("database path is empty".into()),
            "synthetic" => Ok(DatabaseSource::Synthetic { varied: true }),
            "synthetic-fixed" => Ok(DatabaseSource::Synthetic { varied: false }),
            path => Ok(DatabaseSource::Directory(PathBuf::from(path))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub database: DatabaseSource,
    pub algorithm: Algorithm,
    pub family: Family,
    pub levels: u32,
    pub radon_mode: RadonMode,
    /// DFT magnitudes when set, raw resampled projections otherwise.
    pub radon_spectrum: bool,
    pub sfs: SfsConfig,
    pub split: SplitSpec,
    pub metric: Metric,
    pub mu_scale: f64,
    pub k: usize,
    /// Project onto the total-scatter range before LDA.
    pub pca: bool,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            database: DatabaseSource::Synthetic { varied: true },
            algorithm: Algorithm::default(),
            family: Family::default(),
            levels: 4,
            radon_mode: RadonMode::default(),
            radon_spectrum: true,
            sfs: SfsConfig::default(),
            split: SplitSpec::default(),
            metric: Metric::default(),
            mu_scale: DEFAULT_MU_SCALE,
            k: 1,
            pca: false,
            output: None,
        }
    }
}

const KEYS: &[&str] = &[
    "database",
    "algorithm",
    "family",
    "levels",
    "radon_mode",
    "radon_features",
    "sfs_iterations",
    "light_slant",
    "light_tilt",
    "train_per_class",
    "selection",
    "seed",
    "metric",
    "mu_scale",
    "k",
    "pca",
    "output",
];

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::Config {
        line,
        message: format!("{key}: {e}"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config {
            line,
            message: format!("{key}: expected true or false, got {value:?}"),
        }),
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let value = value.trim();
        match key {
            "database" => self.database = parse(line, key, value)?,
            "algorithm" => self.algorithm = parse(line, key, value)?,
            "family" => self.family = parse(line, key, value)?,
            "levels" => self.levels = parse(line, key, value)?,
            "radon_mode" => self.radon_mode = parse(line, key, value)?,
            "radon_features" => {
                self.radon_spectrum = match value {
                    "dft" => true,
                    "raw" => false,
                    _ => {
                        return Err(Error::Config {
                            line,
                            message: format!("radon_features: expected dft or raw, got {value:?}"),
                        })
                    }
                }
            }
            "sfs_iterations" => self.sfs.iterations = parse(line, key, value)?,
            "light_slant" | "light_tilt" => {
                let v: f64 = parse(line, key, value)?;
                let (slant, tilt) = if key == "light_slant" {
                    (v, self.sfs.light.tilt())
                } else {
                    (self.sfs.light.slant(), v)
                };
                self.sfs.light = LightDirection::new(slant, tilt).map_err(|e| Error::Config {
                    line,
                    message: format!("{key}: {e}"),
                })?;
            }
            "train_per_class" => self.split.n_train_per_class = parse(line, key, value)?,
            "selection" => self.split.selection = parse::<Selection>(line, key, value)?,
            "seed" => self.split.seed = parse(line, key, value)?,
            "metric" => self.metric = parse(line, key, value)?,
            "mu_scale" => self.mu_scale = parse(line, key, value)?,
            "k" => self.k = parse(line, key, value)?,
            "pca" => self.pca = parse_bool(line, key, value)?,
            "output" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key {key:?}"),
                })
            }
        }
        Ok(())
    }

    /// Parses one document; line numbers in errors count from `first_line`.
    fn parse_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = Vec::new();
        for (line, raw) in lines {
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (key, value) = text.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected key = value, got {text:?}"),
            })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key {key:?}"),
                });
            }
            cfg.set(key, value, line)?;
            seen.push(key);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }

    /// Every key, one per line, in a fixed order.
    pub fn to_text(&self) -> String {
        let output = self
            .output
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default();
        let values = [
            self.database.to_string(),
            self.algorithm.to_string(),
            self.family.to_string(),
            self.levels.to_string(),
            self.radon_mode.to_string(),
            (if self.radon_spectrum { "dft" } else { "raw" }).to_string(),
            self.sfs.iterations.to_string(),
            format!("{:?}", self.sfs.light.slant()),
            format!("{:?}", self.sfs.light.tilt()),
            self.split.n_train_per_class.to_string(),
            self.split.selection.to_string(),
            self.split.seed.to_string(),
            self.metric.to_string(),
            format!("{:?}", self.mu_scale),
            self.k.to_string(),
            self.pca.to_string(),
            output,
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| {
                if v.is_empty() {
                    format!("{k} =\n")
                } else {
                    format!("{k} = {v}\n")
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: &str| {
            Err(Error::Config {
                line: 0,
                message: message.into(),
            })
        };
        if self.levels == 0 {
            return bad("levels must be at least 1");
        }
        if !(self.mu_scale > 0.0 && self.mu_scale.is_finite()) {
            return bad("mu_scale must be positive");
        }
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if self.split.n_train_per_class == 0 {
            return bad("train_per_class must be at least 1");
        }
        if let Err(e) = self.sfs.validate() {
            return Err(Error::Config {
                line: 0,
                message: e.to_string(),
            });
        }
        Ok(())
    }

    /// Short label for the feature stage: the wavelet family or the Radon
    /// mode.
    pub fn feature_label(&self) -> String {
        match self.algorithm {
            Algorithm::CoifPacket => self.family.to_string(),
            Algorithm::RadonDft => self.radon_mode.to_string(),
        }
    }
}

/// Splits a grid file into documents at `---` lines.
pub fn parse_grid(text: &str) -> Result<Vec<ExperimentConfig>> {
    let mut docs: Vec<Vec<(usize, &str)>> = vec![Vec::new()];
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            docs.push(Vec::new());
        } else {
            docs.last_mut().expect("never empty").push((i + 1, line));
        }
    }
    docs.into_iter()
        .filter(|d| {
            d.iter()
                .any(|(_, l)| !l.split('#').next().unwrap_or("").trim().is_empty())
        })
        .map(|d| ExperimentConfig::parse_lines(d.into_iter()))
        .collect()
}
