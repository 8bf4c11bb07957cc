//! Experiment configuration: defaults, validation, and a flat
//! `key = value` config-file format whose rendered form is itself a valid
//! config file.

use crate::engine::ExchangeRule;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: bad value for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleName {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkKind {
    FullyConnected,
    /// Random network with degrees uniform on `1..=k_max`, rewired per
    /// realization unless `reuse_network` is set.
    UniformDegree(u32),
}

/// Full description of one ensemble experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: u32,
    pub mean_w: u64,
    pub rule: RuleName,
    /// Additive stake per trade.
    pub c: u64,
    /// Multiplicative stake fraction.
    pub nu: f64,
    pub bankruptcy: bool,
    pub network: NetworkKind,
    pub mcs_budget: u64,
    pub realizations: u32,
    pub seed: u64,
    /// Entropy/poverty recording stride.
    pub stride: u64,
    /// `None` defaults to a single snapshot at the end of the budget;
    /// `Some(vec![])` disables snapshots entirely.
    pub snapshot_times: Option<Vec<u64>>,
    /// Wire one network from a dedicated stream and share it across
    /// realizations instead of rewiring per realization.
    pub reuse_network: bool,
    /// Worker-thread cap; `None` uses the default pool.
    pub workers: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 500,
            mean_w: 100,
            rule: RuleName::Additive,
            c: 20,
            nu: 0.2,
            bankruptcy: false,
            network: NetworkKind::FullyConnected,
            mcs_budget: 400_000,
            realizations: 100,
            seed: 42,
            stride: 500,
            snapshot_times: None,
            reuse_network: false,
            workers: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n < 2 {
            return Err(ConfigError::Invalid(format!(
                "need at least 2 agents, got {}",
                self.n
            )));
        }
        if self.mean_w < 1 {
            return Err(ConfigError::Invalid("mean_w must be at least 1".into()));
        }
        if self.realizations < 1 {
            return Err(ConfigError::Invalid(
                "realizations must be at least 1".into(),
            ));
        }
        if self.stride < 1 {
            return Err(ConfigError::Invalid("stride must be at least 1".into()));
        }
        if self.c < 1 {
            return Err(ConfigError::Invalid("c must be at least 1".into()));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "nu must lie strictly between 0 and 1, got {}",
                self.nu
            )));
        }
        if let NetworkKind::UniformDegree(k) = self.network {
            if k < 1 || k as u64 >= self.n as u64 {
                return Err(ConfigError::Invalid(format!(
                    "k_max must lie in 1..{}, got {k}",
                    self.n
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(ConfigError::Invalid("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn rule(&self) -> ExchangeRule {
        let rule = match self.rule {
            RuleName::Additive => ExchangeRule::additive(self.c),
            RuleName::Multiplicative => ExchangeRule::multiplicative(self.nu),
        };
        rule.with_bankruptcy(self.bankruptcy)
    }

    /// Snapshot times actually captured: the configured list, or a single
    /// end-of-budget snapshot when none was given.
    pub fn resolved_snapshots(&self) -> Vec<u64> {
        let mut times = match &self.snapshot_times {
            None => vec![self.mcs_budget],
            Some(list) => list.clone(),
        };
        times.retain(|&t| t <= self.mcs_budget);
        times.sort_unstable();
        times.dedup();
        times
    }

    /// Render as config-file text; `parse_config` accepts the output.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "mean_w = {}", self.mean_w);
        let rule = match self.rule {
            RuleName::Additive => "additive",
            RuleName::Multiplicative => "multiplicative",
        };
        let _ = writeln!(s, "rule = {rule}");
        let _ = writeln!(s, "c = {}", self.c);
        let _ = writeln!(s, "nu = {}", self.nu);
        let _ = writeln!(s, "bankruptcy = {}", self.bankruptcy);
        match self.network {
            NetworkKind::FullyConnected => {
                let _ = writeln!(s, "network = full");
            }
            NetworkKind::UniformDegree(k) => {
                let _ = writeln!(s, "network = {k}");
            }
        }
        let _ = writeln!(s, "mcs = {}", self.mcs_budget);
        let _ = writeln!(s, "realizations = {}", self.realizations);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "stride = {}", self.stride);
        let snaps = self.resolved_snapshots();
        if snaps.is_empty() {
            let _ = writeln!(s, "snapshots = none");
        } else {
            let list: Vec<String> = snaps.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "snapshots = {}", list.join(","));
        }
        let _ = writeln!(s, "reuse_network = {}", self.reuse_network);
        if let Some(w) = self.workers {
            let _ = writeln!(s, "workers = {w}");
        }
        s
    }
}

fn bad(line: usize, key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        line,
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Parse flat `key = value` text. Unknown keys are errors; `#` starts a
/// comment; values on later lines override earlier ones.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let mut cfg = SimConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: content.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "n" => cfg.n = value.parse().map_err(|e| bad(line, key, format!("{e}")))?,
            "mean_w" => cfg.mean_w = value.parse().map_err(|e| bad(line, key, format!("{e}")))?,
            "rule" => {
                cfg.rule = match value {
                    "additive" => RuleName::Additive,
                    "multiplicative" => RuleName::Multiplicative,
                    other => {
                        return Err(bad(
                            line,
                            key,
                            format!("expected additive|multiplicative, got `{other}`"),
                        ))
                    }
                }
            }
            "c" => cfg.c = value.parse().map_err(|e| bad(line, key, format!("{e}")))?,
            "nu" => cfg.nu = value.parse().map_err(|e| bad(line, key, format!("{e}")))?,
            "bankruptcy" => {
                cfg.bankruptcy = value.parse().map_err(|e| bad(line, key, format!("{e}")))?
            }
            "network" => {
                cfg.network = if value == "full" {
                    NetworkKind::FullyConnected
                } else {
                    let k = value
                        .parse()
                        .map_err(|_| bad(line, key, "expected `full` or a degree bound"))?;
                    NetworkKind::UniformDegree(k)
                }
            }
            "mcs" => {
                cfg.mcs_budget = value.parse().map_err(|e| bad(line, key, format!("{e}")))?
            }
            "realizations" => {
                cfg.realizations = value.parse().map_err(|e| bad(line, key, format!("{e}")))?
            }
            "seed" => cfg.seed = value.parse().map_err(|e| bad(line, key, format!("{e}")))?,
            "stride" => cfg.stride = value.parse().map_err(|e| bad(line, key, format!("{e}")))?,
            "snapshots" => {
                cfg.snapshot_times = if value == "none" {
                    Some(Vec::new())
                } else {
                    let times: Result<Vec<u64>, _> =
                        value.split(',').map(|v| v.trim().parse()).collect();
                    Some(times.map_err(|e| bad(line, key, format!("{e}")))?)
                }
            }
            "reuse_network" => {
                cfg.reuse_network = value.parse().map_err(|e| bad(line, key, format!("{e}")))?
            }
            "workers" => {
                cfg.workers = Some(value.parse().map_err(|e| bad(line, key, format!("{e}")))?)
            }
            other => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SimConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.n, 500);
        assert_eq!(cfg.mean_w, 100);
        assert_eq!(cfg.mcs_budget, 400_000);
        assert_eq!(cfg.realizations, 100);
        assert_eq!(cfg.resolved_snapshots(), vec![400_000]);
    }

    #[test]
    fn render_parse_round_trip() {
        let mut cfg = SimConfig {
            rule: RuleName::Multiplicative,
            bankruptcy: true,
            network: NetworkKind::UniformDegree(3),
            snapshot_times: Some(vec![1000, 399_000]),
            workers: Some(4),
            seed: 981,
            ..SimConfig::default()
        };
        let parsed = parse_config(&cfg.render()).unwrap();
        // Rendering resolves the snapshot list, so compare resolved forms.
        cfg.snapshot_times = Some(cfg.resolved_snapshots());
        assert_eq!(parsed, cfg);

        let none = SimConfig {
            snapshot_times: Some(Vec::new()),
            ..SimConfig::default()
        };
        let parsed = parse_config(&none.render()).unwrap();
        assert_eq!(parsed.resolved_snapshots(), Vec::<u64>::new());
    }

    #[test]
    fn parses_comments_and_overrides() {
        let text = "
            # comment line
            n = 50
            seed = 7   # trailing comment
            seed = 8
            network = full
        ";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.n, 50);
        assert_eq!(cfg.seed, 8);
        assert_eq!(cfg.network, NetworkKind::FullyConnected);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            parse_config("agents = 5").unwrap_err(),
            ConfigError::UnknownKey { key, .. } if key == "agents"
        ));
        assert!(matches!(
            parse_config("n fifty").unwrap_err(),
            ConfigError::Malformed { .. }
        ));
        assert!(matches!(
            parse_config("nu = often").unwrap_err(),
            ConfigError::BadValue { .. }
        ));
        assert!(matches!(
            parse_config("network = sparse").unwrap_err(),
            ConfigError::BadValue { .. }
        ));
    }

    #[test]
    fn validation_catches_out_of_range_fields() {
        let bad_n = SimConfig {
            n: 1,
            ..SimConfig::default()
        };
        assert!(bad_n.validate().is_err());
        let bad_nu = SimConfig {
            nu: 1.0,
            ..SimConfig::default()
        };
        assert!(bad_nu.validate().is_err());
        let bad_k = SimConfig {
            network: NetworkKind::UniformDegree(500),
            ..SimConfig::default()
        };
        assert!(bad_k.validate().is_err());
        let bad_k0 = SimConfig {
            network: NetworkKind::UniformDegree(0),
            ..SimConfig::default()
        };
        assert!(bad_k0.validate().is_err());
    }

    #[test]
    fn snapshot_resolution_clamps_and_sorts() {
        let cfg = SimConfig {
            mcs_budget: 1000,
            snapshot_times: Some(vec![900, 100, 900, 5000]),
            ..SimConfig::default()
        };
        assert_eq!(cfg.resolved_snapshots(), vec![100, 900]);
    }

    #[test]
    fn rule_construction_matches_fields() {
        let cfg = SimConfig {
            rule: RuleName::Multiplicative,
            nu: 0.25,
            bankruptcy: true,
            ..SimConfig::default()
        };
        let rule = cfg.rule();
        assert!(rule.bankruptcy);
        assert_eq!(rule.poverty_line(), 2);
        let add = SimConfig::default().rule();
        assert!(!add.bankruptcy);
        assert_eq!(add.poverty_line(), 20);
    }
}
