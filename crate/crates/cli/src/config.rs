use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_ENV: &str = "HHP_CONFIG";

/// Run settings. Loaded from the file named by `HHP_CONFIG` when set;
/// command-line flags override individual fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub cutoff: usize,
    pub grid: usize,
    pub spectral_tol: f64,
    pub matrix_tol: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cutoff: 32,
            grid: 4096,
            spectral_tol: 1e-8,
            matrix_tol: 1e-6,
            seed: hhp_core::suite::DEFAULT_SEED,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var_os(CONFIG_ENV) {
            None => Ok(RunConfig::default()),
            Some(path) => {
                let path = PathBuf::from(path);
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(path.display().to_string(), e))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("{CONFIG_ENV} ({}): {e}", path.display())))
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.cutoff == 0 {
            return Err(CliError::Usage("cutoff must be at least 1".into()));
        }
        if self.grid < 4 * self.cutoff {
            return Err(CliError::Usage(format!(
                "grid size {} is below 4 x cutoff = {}",
                self.grid,
                4 * self.cutoff
            )));
        }
        for (name, t) in [("spectral", self.spectral_tol), ("matrix", self.matrix_tol)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Usage(format!(
                    "{name} tolerance must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }
}
