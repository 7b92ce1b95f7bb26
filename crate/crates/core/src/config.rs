//! Experiment configuration: a flat JSON config file whose keys are
//! exactly the CLI flags, with flag values taking precedence.

use crate::eig::Normalization;
use crate::error::{Error, Result};
use crate::triples::parse_triple;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// One layer of settings; every field optional. The same shape serves
/// for the config file and for CLI overrides.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub triple: Option<String>,
    pub n: Option<usize>,
    pub orders: Option<Vec<usize>>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub normalization: Option<String>,
    pub beta: Option<f64>,
    pub grid: Option<usize>,
    pub kmax: Option<usize>,
    pub top: Option<usize>,
    pub out: Option<String>,
    pub plots: Option<bool>,
}

impl ConfigFile {
    /// Field-wise overlay: `self` wins where set, `base` fills the rest.
    pub fn over(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            triple: self.triple.or(base.triple),
            n: self.n.or(base.n),
            orders: self.orders.or(base.orders),
            reps: self.reps.or(base.reps),
            seed: self.seed.or(base.seed),
            normalization: self.normalization.or(base.normalization),
            beta: self.beta.or(base.beta),
            grid: self.grid.or(base.grid),
            kmax: self.kmax.or(base.kmax),
            top: self.top.or(base.top),
            out: self.out.or(base.out),
            plots: self.plots.or(base.plots),
        }
    }
}

/// Parses the JSON config text. Unknown keys are rejected so typos
/// cannot silently revert a setting to its default.
pub fn parse_config_str(text: &str) -> Result<ConfigFile> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad config: {e}")))
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Fully resolved settings with defaults applied and the triple name
/// verified against the registry.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub triple: Option<String>,
    pub n: usize,
    pub orders: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub normalization: Normalization,
    pub grid: usize,
    pub kmax: usize,
    pub top: usize,
    pub out: PathBuf,
    pub plots: bool,
}

pub const DEFAULT_ORDERS: [usize; 4] = [128, 256, 512, 1024];

impl ExperimentConfig {
    pub fn resolve(layered: ConfigFile) -> Result<Self> {
        if let Some(name) = &layered.triple {
            parse_triple(name)?;
        }
        let normalization = match (&layered.normalization, layered.beta) {
            (Some(_), Some(_)) => {
                return Err(Error::invalid(
                    "give either `normalization` or `beta`, not both",
                ))
            }
            (Some(s), None) => Normalization::parse(s)?,
            (None, Some(beta)) => {
                if !beta.is_finite() {
                    return Err(Error::invalid("beta must be finite"));
                }
                Normalization::Power(beta)
            }
            (None, None) => Normalization::Raw,
        };

        let cfg = ExperimentConfig {
            triple: layered.triple,
            n: layered.n.unwrap_or(100),
            orders: layered.orders.unwrap_or_else(|| DEFAULT_ORDERS.to_vec()),
            reps: layered.reps.unwrap_or(20),
            seed: layered.seed.unwrap_or(0),
            normalization,
            grid: layered.grid.unwrap_or(512),
            kmax: layered.kmax.unwrap_or(64),
            top: layered.top.unwrap_or(5),
            out: PathBuf::from(layered.out.unwrap_or_else(|| "out".into())),
            plots: layered.plots.unwrap_or(false),
        };

        if cfg.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if cfg.reps == 0 {
            return Err(Error::invalid("reps must be at least 1"));
        }
        if cfg.orders.is_empty() || cfg.orders.contains(&0) {
            return Err(Error::invalid("orders must be nonempty positive integers"));
        }
        if cfg.grid < 2 {
            return Err(Error::invalid("grid must be at least 2"));
        }
        if cfg.kmax == 0 {
            return Err(Error::invalid("kmax must be at least 1"));
        }
        if cfg.top == 0 {
            return Err(Error::invalid("top must be at least 1"));
        }
        Ok(cfg)
    }

    /// The triple name, required by most commands.
    pub fn triple_name(&self) -> Result<&str> {
        self.triple
            .as_deref()
            .ok_or_else(|| Error::invalid("no triple selected; pass --triple or set it in the config"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = ExperimentConfig::resolve(ConfigFile::default()).unwrap();
        assert_eq!(cfg.n, 100);
        assert_eq!(cfg.reps, 20);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.normalization, Normalization::Raw);
        assert_eq!(cfg.grid, 512);
        assert_eq!(cfg.kmax, 64);
        assert_eq!(cfg.top, 5);
        assert_eq!(cfg.orders, DEFAULT_ORDERS.to_vec());
        assert!(!cfg.plots);
        assert!(cfg.triple_name().is_err());
    }

    #[test]
    fn file_parses_and_cli_overrides() {
        let file = parse_config_str(
            r#"{"triple": "circle", "n": 1000, "reps": 40, "normalization": "n"}"#,
        )
        .unwrap();
        let cli = ConfigFile {
            reps: Some(5),
            seed: Some(9),
            ..ConfigFile::default()
        };
        let cfg = ExperimentConfig::resolve(cli.over(file)).unwrap();
        assert_eq!(cfg.triple_name().unwrap(), "circle");
        assert_eq!(cfg.n, 1000);
        assert_eq!(cfg.reps, 5);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.normalization, Normalization::ByN);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config_str(r#"{"tripel": "circle"}"#).is_err());
        assert!(parse_config_str(r#"{"n": -4}"#).is_err());
        assert!(parse_config_str("not json").is_err());
        assert!(parse_config_str("").is_err());
    }

    #[test]
    fn unknown_triple_rejected_at_resolve() {
        let file = parse_config_str(r#"{"triple": "foo"}"#).unwrap();
        let err = ExperimentConfig::resolve(file).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        // the message names the registry so the user can self-correct
        assert!(err.to_string().contains("cauchy-line"));
    }

    #[test]
    fn beta_is_power_normalization() {
        let cfg = ExperimentConfig::resolve(ConfigFile {
            beta: Some(1.5),
            ..ConfigFile::default()
        })
        .unwrap();
        assert_eq!(cfg.normalization, Normalization::Power(1.5));

        let conflict = ConfigFile {
            beta: Some(1.5),
            normalization: Some("raw".into()),
            ..ConfigFile::default()
        };
        assert!(ExperimentConfig::resolve(conflict).is_err());
    }

    #[test]
    fn zero_values_rejected() {
        for bad in [
            ConfigFile { n: Some(0), ..ConfigFile::default() },
            ConfigFile { reps: Some(0), ..ConfigFile::default() },
            ConfigFile { grid: Some(1), ..ConfigFile::default() },
            ConfigFile { kmax: Some(0), ..ConfigFile::default() },
            ConfigFile { top: Some(0), ..ConfigFile::default() },
            ConfigFile { orders: Some(vec![]), ..ConfigFile::default() },
            ConfigFile { orders: Some(vec![64, 0]), ..ConfigFile::default() },
        ] {
            assert!(ExperimentConfig::resolve(bad).is_err());
        }
    }
}
