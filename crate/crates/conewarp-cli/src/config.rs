//! Run configurations: JSON with rejected unknown keys, grid overrides from
//! the command line, and a canonical echo for exact replay.

use serde::{Deserialize, Serialize};

fn default_seed() -> u64 {
    7
}

fn default_n() -> usize {
    3
}

fn default_h_inf() -> f64 {
    0.5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub l3_lo: f64,
    pub l3_hi: f64,
    pub radii: usize,
    pub deltas: usize,
    pub samples: usize,
    pub directions: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { l3_lo: 1.0, l3_hi: 4.0, radii: 60, deltas: 41, samples: 12, directions: 3 }
    }
}

impl GridConfig {
    pub fn to_directional(&self, seed: u64) -> conewarp::DirectionalGrid {
        conewarp::DirectionalGrid {
            l3_lo: self.l3_lo,
            l3_hi: self.l3_hi,
            n_radii: self.radii,
            n_deltas: self.deltas,
            n_samples: self.samples,
            n_directions: self.directions,
            seed,
        }
    }

    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<(), String> {
        let parse_usize = |v: &str| v.parse::<usize>().map_err(|e| e.to_string());
        let parse_f64 = |v: &str| v.parse::<f64>().map_err(|e| e.to_string());
        match key {
            "radii" => self.radii = parse_usize(value)?,
            "deltas" => self.deltas = parse_usize(value)?,
            "samples" => self.samples = parse_usize(value)?,
            "directions" => self.directions = parse_usize(value)?,
            "l3_lo" => self.l3_lo = parse_f64(value)?,
            "l3_hi" => self.l3_hi = parse_f64(value)?,
            other => return Err(format!("unknown grid axis '{other}'")),
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaVerifyConfig {
    /// "stationary-round" or "example1-loop".
    pub family: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_h_inf")]
    pub h_inf: f64,
    /// Explicit lemma parameters (E, F, r0, h_inf, D). None means defaults.
    #[serde(default)]
    pub params: Option<conewarp::LemmaParams>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "LemmaVerifyConfig::default_m_max")]
    pub m_max: usize,
    #[serde(default = "LemmaVerifyConfig::default_cycles")]
    pub cycles: usize,
}

impl LemmaVerifyConfig {
    fn default_m_max() -> usize {
        8
    }
    fn default_cycles() -> usize {
        1
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaSearchConfig {
    pub family: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_h_inf")]
    pub h_inf: f64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub sweep: Option<conewarp::SweepSchedule>,
    #[serde(default = "LemmaVerifyConfig::default_m_max")]
    pub m_max: usize,
    #[serde(default = "LemmaVerifyConfig::default_cycles")]
    pub cycles: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Config {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "Example1Config::default_sigma")]
    pub sigma: f64,
    #[serde(default = "Example1Config::default_check_points")]
    pub check_points: usize,
}

impl Example1Config {
    fn default_sigma() -> f64 {
        0.1
    }
    fn default_check_points() -> usize {
        100
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example2Config {
    #[serde(default = "Example2Config::default_b0")]
    pub b0: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "Example2Config::default_step1_grid")]
    pub step1_t: Vec<f64>,
    #[serde(default = "Example2Config::default_step2_grid")]
    pub step2_t: Vec<f64>,
    #[serde(default = "Example2Config::default_smoothing")]
    pub smoothing: f64,
}

impl Example2Config {
    fn default_b0() -> f64 {
        0.1
    }
    fn default_step1_grid() -> Vec<f64> {
        vec![0.1, 0.25, 0.5, 0.75, 1.0]
    }
    fn default_step2_grid() -> Vec<f64> {
        vec![1.0, 1.25, 1.5, 1.75, 2.0]
    }
    fn default_smoothing() -> f64 {
        0.1
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CobordismConfig {
    /// None runs the feasibility search for (b0, b1, e0).
    #[serde(default)]
    pub b0: Option<f64>,
    #[serde(default)]
    pub b1: Option<f64>,
    #[serde(default)]
    pub e0: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhCommandConfig {
    /// "demo" (nonuniqueness) or "smoke" (identical spaces).
    #[serde(default = "GhCommandConfig::default_mode")]
    pub mode: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "GhCommandConfig::default_n_sample")]
    pub n_sample: usize,
    #[serde(default = "GhCommandConfig::default_degree")]
    pub graph_degree: usize,
    #[serde(default = "GhCommandConfig::default_iterations")]
    pub gh_iterations: usize,
    #[serde(default = "GhCommandConfig::default_m_max")]
    pub m_max: usize,
    #[serde(default = "GhCommandConfig::default_scales")]
    pub scales_per_target: usize,
    #[serde(default = "GhCommandConfig::default_upper")]
    pub own_upper_threshold: f64,
    #[serde(default = "GhCommandConfig::default_lower")]
    pub cross_lower_threshold: f64,
}

impl GhCommandConfig {
    fn default_mode() -> String {
        "demo".into()
    }
    fn default_n_sample() -> usize {
        220
    }
    fn default_degree() -> usize {
        10
    }
    fn default_iterations() -> usize {
        300
    }
    fn default_m_max() -> usize {
        48
    }
    fn default_scales() -> usize {
        2
    }
    fn default_upper() -> f64 {
        0.05
    }
    fn default_lower() -> f64 {
        0.1
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCrosscheckConfig {
    /// "berger", "five-d", "flat-cone", or "football-unit".
    pub ansatz: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "OracleCrosscheckConfig::default_draws")]
    pub draws: usize,
    #[serde(default = "OracleCrosscheckConfig::default_tolerance")]
    pub tolerance: f64,
}

impl OracleCrosscheckConfig {
    fn default_draws() -> usize {
        100
    }
    fn default_tolerance() -> f64 {
        1e-5
    }
}

/// Load a config, apply `--seed` and `--grid` overrides, and return both the
/// value and its canonical echo text.
pub fn load_config<T: serde::de::DeserializeOwned + Serialize>(
    path: Option<&str>,
    fallback: &str,
) -> Result<T, String> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("reading {p}: {e}"))?,
        None => fallback.to_string(),
    };
    serde_json::from_str::<T>(&text).map_err(|e| format!("config: {e}"))
}

pub fn echo_config<T: Serialize>(cfg: &T) -> String {
    let mut text = serde_json::to_string_pretty(cfg).expect("config serializes");
    text.push('\n');
    text
}
