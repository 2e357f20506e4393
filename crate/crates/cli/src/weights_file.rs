//! JSON persistence of learned fusion weights.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use psinterp::{FusionWeights, ModelResult, WaveletKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelWeights {
    pub weights: [f64; 6],
    pub fitness_db: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub wavelet: String,
    pub channels: Vec<ChannelWeights>,
    pub seed: u64,
}

impl WeightsFile {
    pub fn from_models(wavelet: WaveletKind, models: &[ModelResult], seed: u64) -> Self {
        Self {
            wavelet: wavelet.name().to_string(),
            channels: models
                .iter()
                .map(|m| ChannelWeights {
                    weights: *m.weights.as_array(),
                    fitness_db: m.fitness_db,
                    iterations: m.iterations,
                })
                .collect(),
            seed,
        }
    }

    pub fn wavelet(&self) -> Result<WaveletKind> {
        Ok(self.wavelet.parse()?)
    }

    pub fn fusion_weights(&self) -> Result<Vec<FusionWeights>> {
        if self.channels.is_empty() {
            bail!("weights file has no channels");
        }
        self.channels
            .iter()
            .map(|c| Ok(FusionWeights::new(c.weights)?))
            .collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}
