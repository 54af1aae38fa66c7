use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_HBAR: f64 = 1.0;
pub const DEFAULT_LOCUS_TOL: f64 = 1e-6;

/// Run configuration: the TOML file merged with command-line flags, flags winning.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub hbar: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub structure: StructureConfig,
    #[serde(default)]
    pub tensors: TensorsConfig,
    #[serde(default)]
    pub witness: WitnessConfig,
    #[serde(default)]
    pub wigner: WignerConfig,
    #[serde(default)]
    pub moyal: MoyalConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    pub algebra: Option<String>,
    pub symbol: Option<String>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorsConfig {
    pub points: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub steps: Option<usize>,
    pub b: Option<f64>,
    pub c_frac: Option<f64>,
    pub phi: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    pub state: Option<String>,
    pub n: Option<usize>,
    pub q0: Option<f64>,
    pub p0: Option<f64>,
    pub sigma: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoyalConfig {
    pub hbars: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn hbar(&self) -> Result<f64, CliError> {
        let h = self.hbar.unwrap_or(DEFAULT_HBAR);
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Validation(format!("hbar must be positive, got {h}")));
        }
        Ok(h)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(geoqm::validation::DEFAULT_SEED)
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }
}

/// Override `slot` when the flag was given.
pub fn merge<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}
