//! Run manifest: the reproducibility record written next to every run.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use dal_core::{rng, ExperimentConfig};

use crate::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub created_utc: String,
    pub config_path: String,
    /// Fully resolved engine config; rerunning with this reproduces the run.
    pub config: ExperimentConfig,
    pub dataset: DatasetInfo,
    pub seeds: SeedRegistry,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub provenance: String,
    pub rows: usize,
    pub features: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedRegistry {
    pub master_seed: u64,
    pub replicate_seeds: Vec<u64>,
}

impl RunManifest {
    pub fn new(
        config_path: &Path,
        config: ExperimentConfig,
        dataset: DatasetInfo,
        outputs: BTreeMap<String, String>,
    ) -> Self {
        let replicate_seeds = (0..config.replicates)
            .map(|r| rng::mix(config.master_seed, &[r as u64]))
            .collect();
        Self {
            tool: "dal".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
            config_path: config_path.display().to_string(),
            seeds: SeedRegistry {
                master_seed: config.master_seed,
                replicate_seeds,
            },
            config,
            dataset,
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), Failure> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Failure::Runtime(format!("serializing manifest: {e}")))?;
        std::fs::write(path, json)
            .map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))
    }
}
