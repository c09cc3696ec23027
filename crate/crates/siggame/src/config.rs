//! TOML configuration files.
//!
//! ```toml
//! [game]
//! sigma_x2 = 1.0
//! sigma_v2 = 1.0
//! sigma_w2 = 1.0
//! theta = 0.111111111111
//! bias = 0.0
//!
//! [multi_stage]
//! n = 1
//! beta = 1.0            # scalar, or a list of length n
//! sigma_n2 = 1.0
//! sigma_x0_2 = 1.0
//! sigma_v2 = [1.0, 1.0] # scalar, or a list of length n + 1
//! sigma_w2 = 1.0
//! theta = 0.111111111111
//! bias = 0.0
//!
//! [strategy]
//! a = 1.0
//! c = 0.0
//! slopes = [1.0, 0.92]
//!
//! [simulation]
//! samples = 1000000
//! seed = 42
//! block_size = 65536
//! mode = "innovations"
//! ```
//!
//! Command-line flags take precedence over file values.

use std::path::Path;

use serde::{Deserialize, Serialize};
use siggame_core::{EncoderMode, GameParams, MultiStageParams};

use crate::cli::ParamArgs;
use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub game: Option<GameSection>,
    pub multi_stage: Option<MultiStageSection>,
    pub strategy: Option<StrategySection>,
    pub simulation: Option<SimulationSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub sigma_x2: Option<f64>,
    pub sigma_v2: Option<f64>,
    pub sigma_w2: Option<f64>,
    pub theta: Option<f64>,
    pub bias: Option<f64>,
}

/// A per-stage value; a scalar applies to every stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerStage {
    Scalar(f64),
    List(Vec<f64>),
}

impl PerStage {
    fn from_flag(values: &[f64]) -> Option<Self> {
        match values {
            [] => None,
            [x] => Some(PerStage::Scalar(*x)),
            xs => Some(PerStage::List(xs.to_vec())),
        }
    }

    fn expand(self, len: usize) -> Vec<f64> {
        match self {
            PerStage::Scalar(x) => vec![x; len],
            PerStage::List(xs) => xs,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiStageSection {
    pub n: Option<usize>,
    pub beta: Option<PerStage>,
    pub sigma_n2: Option<PerStage>,
    pub sigma_x0_2: Option<f64>,
    pub sigma_v2: Option<PerStage>,
    pub sigma_w2: Option<PerStage>,
    pub theta: Option<PerStage>,
    pub bias: Option<PerStage>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySection {
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub alpha: Option<f64>,
    pub slopes: Option<Vec<f64>>,
    pub alphas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub block_size: Option<u64>,
    pub mode: Option<EncoderMode>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

fn missing(section: &str, key: &str) -> CliError {
    CliError::Config(format!(
        "missing required parameter `{key}` (set [{section}].{key} or --{})",
        key.replace('_', "-")
    ))
}

fn single_flag(values: &[f64], key: &str) -> Result<Option<f64>, CliError> {
    match values {
        [] => Ok(None),
        [x] => Ok(Some(*x)),
        _ => Err(CliError::Config(format!(
            "`{key}` takes a single value for single-stage commands (got {})",
            values.len()
        ))),
    }
}

/// Merges `[game]` with flags and validates. `bias` defaults to 0.
pub fn resolve_game(file: &ConfigFile, flags: &ParamArgs) -> Result<GameParams, CliError> {
    let g = file.game.clone().unwrap_or_default();
    let pick = |flag: Option<f64>, file: Option<f64>, key: &str| flag.or(file).ok_or_else(|| missing("game", key));
    let p = GameParams {
        sigma_x2: pick(flags.sigma_x2, g.sigma_x2, "sigma_x2")?,
        sigma_v2: pick(single_flag(&flags.sigma_v2, "sigma_v2")?, g.sigma_v2, "sigma_v2")?,
        sigma_w2: pick(single_flag(&flags.sigma_w2, "sigma_w2")?, g.sigma_w2, "sigma_w2")?,
        theta: pick(single_flag(&flags.theta, "theta")?, g.theta, "theta")?,
        bias: single_flag(&flags.bias, "bias")?.or(g.bias).unwrap_or(0.0),
    };
    p.validate()?;
    Ok(p)
}

/// Merges `[multi_stage]` with flags, broadcasts scalars and validates.
/// `bias` defaults to 0.
pub fn resolve_multi(file: &ConfigFile, flags: &ParamArgs) -> Result<MultiStageParams, CliError> {
    let m = file.multi_stage.clone().unwrap_or_default();
    let n = flags.horizon.or(m.n).ok_or_else(|| missing("multi_stage", "n"))?;
    let per = |flag: &[f64], file: Option<PerStage>, key: &str, len: usize| {
        PerStage::from_flag(flag)
            .or(file)
            .map(|v| v.expand(len))
            .ok_or_else(|| missing("multi_stage", key))
    };
    let p = MultiStageParams {
        n,
        beta: per(&flags.beta, m.beta, "beta", n)?,
        sigma_n2: per(&flags.sigma_n2, m.sigma_n2, "sigma_n2", n)?,
        sigma_x0_2: flags
            .sigma_x0_2
            .or(m.sigma_x0_2)
            .ok_or_else(|| missing("multi_stage", "sigma_x0_2"))?,
        sigma_w2: per(&flags.sigma_w2, m.sigma_w2, "sigma_w2", n + 1)?,
        sigma_v2: per(&flags.sigma_v2, m.sigma_v2, "sigma_v2", n + 1)?,
        theta: per(&flags.theta, m.theta, "theta", n + 1)?,
        bias: PerStage::from_flag(&flags.bias)
            .or(m.bias)
            .unwrap_or(PerStage::Scalar(0.0))
            .expand(n + 1),
    };
    p.validate()?;
    Ok(p)
}
