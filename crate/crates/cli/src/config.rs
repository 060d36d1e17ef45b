//! Flat `key = value` scenario configuration.
//!
//! One key per line, `#` starts a comment, blank lines are ignored. Every
//! key is optional; absent keys take the urban defaults baked into
//! [`ScenarioConfig::default`]. An empty file is therefore a complete
//! configuration.

use mmv2v::montecarlo::ScenarioConfig;
use mmv2v::radiolink::{AntennaPattern, LinkBudget};
use mmv2v::traffic::HeadwayModel;
use mmv2v::GridGeometry;
use std::collections::BTreeSet;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config key `{key}`: expected a number, got `{value}`")]
    NonNumeric { key: String, value: String },
    #[error("config line {line} is not `key = value`: `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config key `{key}` appears more than once")]
    Duplicate { key: String },
    #[error("invalid configuration: {0}")]
    Constraint(String),
}

/// Names of all accepted keys, in documentation order.
pub const CONFIG_KEYS: [&str; 25] = [
    "r_valid",
    "lt",
    "alpha",
    "d_safe",
    "mu",
    "rx",
    "ry",
    "p_t",
    "n0",
    "bandwidth",
    "sigma",
    "t_slot",
    "t_pilot",
    "t_proc",
    "packet_bits",
    "psi_tx",
    "psi_rx",
    "phi_tx",
    "phi_rx",
    "g_main",
    "g_side",
    "epsilon",
    "replications",
    "seed",
    "max_hops",
];

/// A parsed scenario plus the set of keys the file set explicitly (used to
/// reject sweeping a variable the file pins).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub scenario: ScenarioConfig,
    pub explicit: BTreeSet<String>,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Constraint(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, ConfigError> {
    let mut values: Vec<(String, f64)> = Vec::new();
    let mut explicit = BTreeSet::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Malformed {
                line: idx + 1,
                text: raw_line.trim().to_string(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        if !explicit.insert(key.clone()) {
            return Err(ConfigError::Duplicate { key });
        }
        let num: f64 = value
            .parse()
            .map_err(|_| ConfigError::NonNumeric {
                key: key.clone(),
                value,
            })?;
        values.push((key, num));
    }
    let scenario = build_scenario(&values)?;
    Ok(LoadedConfig { scenario, explicit })
}

fn build_scenario(values: &[(String, f64)]) -> Result<ScenarioConfig, ConfigError> {
    let defaults = ScenarioConfig::default();
    let mut r_valid = defaults.r_valid_m;
    let mut lt = defaults.lt_m;
    let mut alpha = defaults.budget.alpha;
    let mut d_safe = defaults.headway.d_safe;
    let mut mu = defaults.headway.mu;
    let mut rx = defaults.geom.rx;
    let mut ry = defaults.geom.ry;
    let mut p_t = defaults.budget.p_t_dbm;
    let mut n0 = defaults.budget.n0_dbm_hz;
    let mut bandwidth = defaults.budget.bandwidth_hz;
    let mut sigma = defaults.budget.sigma_db;
    let mut t_slot = defaults.budget.slot_s;
    let mut t_pilot = defaults.budget.pilot_s;
    let mut t_proc = defaults.budget.proc_delay_s;
    let mut packet_bits = defaults.budget.packet_bits;
    let mut psi_tx = defaults.budget.antenna.psi_tx_deg;
    let mut psi_rx = defaults.budget.antenna.psi_rx_deg;
    let mut phi_tx = defaults.budget.antenna.phi_tx_deg;
    let mut phi_rx = defaults.budget.antenna.phi_rx_deg;
    let mut g_main = defaults.budget.antenna.g_main_db;
    let mut g_side = defaults.budget.antenna.g_side_db;
    let mut epsilon = defaults.epsilon_db;
    let mut replications = defaults.replications;
    let mut seed = defaults.seed;
    let mut max_hops = defaults.max_hops;

    let as_count = |key: &str, v: f64| -> Result<u32, ConfigError> {
        if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            Ok(v as u32)
        } else {
            Err(ConfigError::Constraint(format!(
                "key `{key}` must be a non-negative integer, got {v}"
            )))
        }
    };

    for (key, v) in values {
        match key.as_str() {
            "r_valid" => r_valid = *v,
            "lt" => lt = *v,
            "alpha" => alpha = *v,
            "d_safe" => d_safe = *v,
            "mu" => mu = *v,
            "rx" => rx = *v,
            "ry" => ry = *v,
            "p_t" => p_t = *v,
            "n0" => n0 = *v,
            "bandwidth" => bandwidth = *v,
            "sigma" => sigma = *v,
            "t_slot" => t_slot = *v,
            "t_pilot" => t_pilot = *v,
            "t_proc" => t_proc = *v,
            "packet_bits" => packet_bits = *v,
            "psi_tx" => psi_tx = *v,
            "psi_rx" => psi_rx = *v,
            "phi_tx" => phi_tx = *v,
            "phi_rx" => phi_rx = *v,
            "g_main" => g_main = *v,
            "g_side" => g_side = *v,
            "epsilon" => epsilon = *v,
            "replications" => replications = as_count(key, *v)?,
            "seed" => {
                if *v >= 0.0 && v.fract() == 0.0 && *v <= u64::MAX as f64 {
                    seed = *v as u64;
                } else {
                    return Err(ConfigError::Constraint(format!(
                        "key `seed` must be a non-negative integer, got {v}"
                    )));
                }
            }
            "max_hops" => max_hops = Some(as_count(key, *v)?),
            _ => unreachable!("key list checked during parsing"),
        }
    }

    let antenna = AntennaPattern::new(g_main, g_side, psi_tx, psi_rx, phi_tx, phi_rx)
        .map_err(|e| ConfigError::Constraint(e.to_string()))?;
    let budget = LinkBudget::new(
        p_t,
        n0,
        bandwidth,
        alpha,
        sigma,
        t_slot,
        t_pilot,
        t_proc,
        packet_bits,
        antenna,
    )
    .map_err(|e| ConfigError::Constraint(e.to_string()))?;
    let geom = GridGeometry::new(rx, ry).map_err(|e| ConfigError::Constraint(e.to_string()))?;
    let headway =
        HeadwayModel::new(d_safe, mu).map_err(|e| ConfigError::Constraint(e.to_string()))?;

    ScenarioConfig {
        r_valid_m: r_valid,
        lt_m: lt,
        geom,
        headway,
        budget,
        epsilon_db: epsilon,
        replications,
        seed,
        max_hops,
    }
    .validated()
    .map_err(|e| ConfigError::Constraint(e.to_string()))
}
