//! Optional JSON config file, merged underneath explicit flags.

use std::path::Path;

use serde::Deserialize;

/// Every field is optional; a flag given on the command line wins over the
/// same key here, and anything still unset falls back to the built-in default.
/// Unknown keys are rejected.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub length: Option<f64>,
    pub mass: Option<f64>,
    pub hbar: Option<f64>,
    pub points: Option<usize>,
    pub mode: Option<u32>,
    pub paper_n: Option<u32>,
    pub terms: Option<String>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub stride: Option<usize>,
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub dt_traj: Option<f64>,
    pub record_stride: Option<usize>,
    pub ks_times: Option<String>,
    pub radius: Option<f64>,
    pub current_mass: Option<f64>,
    pub constituent_mass: Option<f64>,
    pub format: Option<String>,
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}
