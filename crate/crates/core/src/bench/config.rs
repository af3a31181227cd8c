use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::split::check_ratios;
use crate::classify::{BoostedStumps, Classifier, ExternalClassifier, FrequencyClassifier, LogisticRegression, TrainingConfig};
use crate::error::{Error, Result};
use crate::grid::FeatureOptions;
use crate::infer::Target;

pub const STATIC_K_VALUES: [usize; 5] = [4, 5, 10, 15, 20];
pub const DYNAMIC_K_VALUES: [usize; 1] = [5];
pub const DEFAULT_ORIGINS: [usize; 3] = [1, 2, 3];
pub const EXTERNAL_ROW_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Static,
    Dynamic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    Logistic,
    Stumps,
    Frequency,
    External(String),
}

/// A model entry such as `stumps`, `hazard:logistic` or `external:python3 server.py`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub target: Target,
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (target, rest) = match s.strip_prefix("hazard:") {
            Some(rest) => (Target::Hazard, rest),
            None => (Target::Failure, s),
        };
        let kind = match rest {
            "logistic" => ModelKind::Logistic,
            "stumps" => ModelKind::Stumps,
            "frequency" => ModelKind::Frequency,
            _ => match rest.strip_prefix("external:") {
                Some(cmd) if !cmd.trim().is_empty() => ModelKind::External(cmd.trim().to_owned()),
                _ => return Err(Error::Config(format!("unknown model `{s}`"))),
            },
        };
        Ok(Self { kind, target })
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.target == Target::Hazard {
            f.write_str("hazard:")?;
        }
        match &self.kind {
            ModelKind::Logistic => f.write_str("logistic"),
            ModelKind::Stumps => f.write_str("stumps"),
            ModelKind::Frequency => f.write_str("frequency"),
            ModelKind::External(cmd) => write!(f, "external:{cmd}"),
        }
    }
}

impl ModelSpec {
    pub fn build(&self, training: &TrainingConfig, timeout: Duration) -> Result<Box<dyn Classifier>> {
        Ok(match &self.kind {
            ModelKind::Logistic => Box::new(LogisticRegression::new(training.clone())),
            ModelKind::Stumps => Box::new(BoostedStumps::new(training.clone())),
            ModelKind::Frequency => Box::new(FrequencyClassifier::new()),
            ModelKind::External(cmd) => Box::new(ExternalClassifier::new(cmd)?.with_timeout(timeout)),
        })
    }

    pub fn default_cap(&self) -> Option<usize> {
        matches!(self.kind, ModelKind::External(_)).then_some(EXTERNAL_ROW_CAP)
    }
}

/// Which dynamic feature variants to try. `Select` fits all four and keeps
/// the one with the best validation C-index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureChoice {
    #[default]
    Select,
    Base,
    Elapsed,
    Horizon,
    Full,
}

impl FeatureChoice {
    pub fn candidates(self) -> Vec<FeatureOptions> {
        match self {
            FeatureChoice::Select => FeatureOptions::ALL.to_vec(),
            other => FeatureOptions::ALL
                .into_iter()
                .filter(|o| o.label() == other.label())
                .collect(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            FeatureChoice::Select => "select",
            FeatureChoice::Base => "base",
            FeatureChoice::Elapsed => "elapsed",
            FeatureChoice::Horizon => "horizon",
            FeatureChoice::Full => "full",
        }
    }
}

/// Experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub setting: Setting,
    pub datasets: Vec<PathBuf>,
    pub models: Vec<String>,
    #[serde(default)]
    pub k_values: Option<Vec<usize>>,
    #[serde(default = "default_split")]
    pub split: [f64; 3],
    #[serde(default)]
    pub seed: u64,
    /// Row caps on the expanded training set, keyed by model name.
    #[serde(default)]
    pub subsample_caps: BTreeMap<String, usize>,
    #[serde(default)]
    pub origins: Option<Vec<usize>>,
    #[serde(default)]
    pub features: FeatureChoice,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_timeout")]
    pub external_timeout_secs: u64,
    #[serde(default)]
    pub training: TrainingConfig,
}

fn default_split() -> [f64; 3] {
    [0.70, 0.15, 0.15]
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

fn default_timeout() -> u64 {
    300
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file; relative dataset paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            for d in &mut config.datasets {
                if d.is_relative() {
                    *d = dir.join(&*d);
                }
            }
            if config.output_dir.is_relative() {
                config.output_dir = dir.join(&config.output_dir);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        check_ratios(self.split)?;
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models".into()));
        }
        let specs = self.model_specs()?;
        if let Some(k) = self.k_values().iter().find(|&&k| k < 2) {
            return Err(Error::Config(format!("K must be at least 2, got {k}")));
        }
        if let Some(name) = self.subsample_caps.keys().find(|n| !self.models.contains(n)) {
            return Err(Error::Config(format!("subsample cap for unknown model `{name}`")));
        }
        if self.setting == Setting::Dynamic {
            if specs.iter().any(|s| s.target == Target::Hazard) {
                return Err(Error::Config("hazard targets are static only".into()));
            }
            if self.origins().is_empty() {
                return Err(Error::Config("no evaluation origins".into()));
            }
        }
        if self.training.learning_rate <= 0.0 || self.training.histogram_bins < 2 {
            return Err(Error::Config("training: learning_rate must be positive and histogram_bins at least 2".into()));
        }
        Ok(())
    }

    pub fn model_specs(&self) -> Result<Vec<ModelSpec>> {
        self.models.iter().map(|m| m.parse()).collect()
    }

    pub fn k_values(&self) -> Vec<usize> {
        self.k_values.clone().unwrap_or_else(|| match self.setting {
            Setting::Static => STATIC_K_VALUES.to_vec(),
            Setting::Dynamic => DYNAMIC_K_VALUES.to_vec(),
        })
    }

    pub fn origins(&self) -> Vec<usize> {
        self.origins.clone().unwrap_or_else(|| DEFAULT_ORIGINS.to_vec())
    }

    pub fn subsample_cap(&self, name: &str, spec: &ModelSpec) -> Option<usize> {
        self.subsample_caps.get(name).copied().or_else(|| spec.default_cap())
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> Result<String> {
        let text = toml::to_string(self).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_models() {
        for name in ["logistic", "stumps", "frequency", "hazard:stumps", "external:python3 -u srv.py"] {
            let spec: ModelSpec = name.parse().unwrap();
            assert_eq!(spec.to_string(), name);
        }
        assert!("forest".parse::<ModelSpec>().is_err());
        assert!("external:".parse::<ModelSpec>().is_err());
        assert!("hazard:hazard:logistic".parse::<ModelSpec>().is_err());
        assert_eq!("external:x".parse::<ModelSpec>().unwrap().default_cap(), Some(EXTERNAL_ROW_CAP));
    }

    #[test]
    fn defaults_and_validation() {
        let c = ExperimentConfig::from_toml("setting = \"static\"\ndatasets = [\"a.csv\"]\nmodels = [\"logistic\"]\n").unwrap();
        assert_eq!(c.k_values(), STATIC_K_VALUES.to_vec());
        assert_eq!(c.split, [0.7, 0.15, 0.15]);
        assert_eq!(c.hash().unwrap().len(), 64);

        let d = ExperimentConfig::from_toml("setting = \"dynamic\"\ndatasets = [\"a.csv\"]\nmodels = [\"stumps\"]\n").unwrap();
        assert_eq!(d.k_values(), vec![5]);
        assert_eq!(d.origins(), vec![1, 2, 3]);
        assert_eq!(d.features.candidates().len(), 4);

        for bad in [
            "setting = \"static\"\ndatasets = [\"a\"]\nmodels = [\"logistic\"]\nsplit = [0.5, 0.5, 0.5]\n",
            "setting = \"static\"\ndatasets = [\"a\"]\nmodels = [\"logistic\"]\nk_values = [1]\n",
            "setting = \"static\"\ndatasets = [\"a\"]\nmodels = [\"tree\"]\n",
            "setting = \"static\"\ndatasets = [\"a\"]\nmodels = [\"logistic\"]\ncolour = 1\n",
            "setting = \"dynamic\"\ndatasets = [\"a\"]\nmodels = [\"hazard:logistic\"]\n",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn fixed_feature_choice() {
        let only = FeatureChoice::Full.candidates();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].label(), "full");
    }
}
