//! Optional TOML config overriding the numeric defaults.
//!
//! ```toml
//! [grids]
//! identity = 2048     # identity-residual grid
//! winding = 8192      # winding-number samples for coverage checks
//!
//! [detect]
//! transient = 10000   # steps discarded before cycle detection
//! tolerance = 1e-6    # point-matching tolerance
//! dedup = 1e-4        # point-set distance merging two cycles
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use dfc_core::dynamics::DetectOptions;

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub identity_grid: usize,
    pub winding_samples: usize,
    pub detect: DetectOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            identity_grid: dfc_core::trigpoly::DEFAULT_IDENTITY_GRID,
            winding_samples: dfc_core::stability::DEFAULT_WINDING_SAMPLES,
            detect: DetectOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let value: toml::Value = text
            .parse()
            .with_context(|| format!("parsing config {}", path.display()))?;
        let mut cfg = Self::default();
        if let Some(grids) = value.get("grids") {
            if let Some(v) = grids.get("identity").and_then(|v| v.as_integer()) {
                cfg.identity_grid = v.max(16) as usize;
            }
            if let Some(v) = grids.get("winding").and_then(|v| v.as_integer()) {
                cfg.winding_samples = v.max(64) as usize;
            }
        }
        if let Some(detect) = value.get("detect") {
            if let Some(v) = detect.get("transient").and_then(|v| v.as_integer()) {
                cfg.detect.transient = v.max(0) as usize;
            }
            if let Some(v) = detect.get("tolerance").and_then(|v| v.as_float()) {
                cfg.detect.tol = v;
            }
            if let Some(v) = detect.get("dedup").and_then(|v| v.as_float()) {
                cfg.detect.dedup = v;
            }
        }
        Ok(cfg)
    }
}
