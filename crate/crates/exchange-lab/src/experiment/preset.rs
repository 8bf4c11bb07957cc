//! Canned scenario catalog. Each name expands to one or more actions —
//! simulation runs, parameter sweeps, exact component-structure tables, or
//! network ensembles — covering the standard outputs this tool exists to
//! produce. The names are stable identifiers for the CLI.

use super::config::{NetworkKind, RuleName, SimConfig};
use super::{ConfigError, SweepParam};

#[derive(Debug, Clone)]
pub enum PresetAction {
    Run {
        label: String,
        config: SimConfig,
    },
    Sweep {
        label: String,
        base: SimConfig,
        param: SweepParam,
        values: Vec<f64>,
    },
    Tables {
        k_values: Vec<u32>,
        s_max: usize,
    },
    Components {
        label: String,
        n: u32,
        k_max: u32,
        wirings: u32,
    },
}

pub const PRESET_NAMES: &[&str] = &[
    "fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5", "fig7", "fig8", "fig10", "fig11", "fig12",
    "tables",
];

const NETWORK_BOUNDS: [u32; 4] = [2, 3, 4, 20];

fn run(label: &str, config: SimConfig) -> PresetAction {
    PresetAction::Run {
        label: label.to_string(),
        config,
    }
}

/// Expand a scenario name into its actions. `seed` becomes the master
/// seed of every action, so the whole preset is reproducible from one
/// number.
pub fn preset(name: &str, seed: u64) -> Result<Vec<PresetAction>, ConfigError> {
    let base = SimConfig {
        seed,
        ..SimConfig::default()
    };
    let network_runs = |rule: RuleName, label: &str, snapshots: Option<Vec<u64>>| {
        NETWORK_BOUNDS
            .iter()
            .map(|&k| {
                run(
                    &format!("{label}-k{k}"),
                    SimConfig {
                        rule,
                        network: NetworkKind::UniformDegree(k),
                        snapshot_times: snapshots.clone(),
                        ..base.clone()
                    },
                )
            })
            .collect::<Vec<_>>()
    };
    // Wealth-distribution scenarios save late-time histograms; time-series
    // scenarios skip snapshots entirely.
    let dist_times = Some(vec![500, 5_000, 50_000, 399_500]);
    let late_network = Some(vec![399_000]);
    let none = Some(Vec::new());

    let actions = match name {
        // Fully connected wealth distributions over time, one rule each.
        "fig1a" => vec![run(
            "fig1a",
            SimConfig {
                snapshot_times: dist_times.clone(),
                ..base.clone()
            },
        )],
        "fig1b" => vec![run(
            "fig1b",
            SimConfig {
                rule: RuleName::Multiplicative,
                snapshot_times: dist_times,
                ..base.clone()
            },
        )],
        // Entropy/poverty series, both rules, without and with bankruptcy.
        "fig2" => vec![
            run(
                "fig2-additive",
                SimConfig {
                    snapshot_times: none.clone(),
                    ..base.clone()
                },
            ),
            run(
                "fig2-multiplicative",
                SimConfig {
                    rule: RuleName::Multiplicative,
                    snapshot_times: none.clone(),
                    ..base.clone()
                },
            ),
        ],
        // Condensation runs under bankruptcy. Additive condensation at
        // n = 500 lands around 3×10⁶ steps, so it gets a budget with slack;
        // runs stop early once only one solvent agent is left.
        "fig3" => vec![
            run(
                "fig3-additive",
                SimConfig {
                    bankruptcy: true,
                    mcs_budget: 40_000_000,
                    snapshot_times: none.clone(),
                    ..base.clone()
                },
            ),
            run(
                "fig3-multiplicative",
                SimConfig {
                    rule: RuleName::Multiplicative,
                    bankruptcy: true,
                    snapshot_times: none.clone(),
                    ..base.clone()
                },
            ),
        ],
        // Condensation-time scaling against agent count (sweeps force
        // bankruptcy themselves). Additive condensation grows roughly as
        // n², so the largest agent counts need room; budgets are generous
        // because condensed runs stop early anyway.
        "fig4" => {
            let sweep_base = SimConfig {
                realizations: 50,
                snapshot_times: none.clone(),
                ..base.clone()
            };
            vec![
                PresetAction::Sweep {
                    label: "fig4-additive".into(),
                    base: SimConfig {
                        mcs_budget: 40_000_000,
                        ..sweep_base.clone()
                    },
                    param: SweepParam::N,
                    values: vec![100.0, 200.0, 400.0, 800.0],
                },
                PresetAction::Sweep {
                    label: "fig4-multiplicative".into(),
                    base: SimConfig {
                        rule: RuleName::Multiplicative,
                        mcs_budget: 4_000_000,
                        ..sweep_base
                    },
                    param: SweepParam::N,
                    values: vec![100.0, 200.0, 400.0, 800.0],
                },
            ]
        }
        // Condensation time against the stake size. Small additive stakes
        // condense slowest (around 10⁶–10⁷ steps at c = 26), hence the
        // larger additive budget.
        "fig5" => {
            let sweep_base = SimConfig {
                realizations: 50,
                snapshot_times: none.clone(),
                ..base.clone()
            };
            vec![
                PresetAction::Sweep {
                    label: "fig5-additive".into(),
                    base: SimConfig {
                        mcs_budget: 20_000_000,
                        ..sweep_base.clone()
                    },
                    param: SweepParam::Dw,
                    values: vec![26.0, 30.0, 33.0, 34.0, 40.0, 50.0],
                },
                PresetAction::Sweep {
                    label: "fig5-multiplicative".into(),
                    base: SimConfig {
                        mcs_budget: 4_000_000,
                        ..sweep_base
                    },
                    param: SweepParam::Nu,
                    values: vec![0.1, 0.2, 0.4],
                },
            ]
        }
        // Network runs: series for every degree bound, then late-time
        // distributions for the same bounds, per rule.
        "fig7" => network_runs(RuleName::Additive, "fig7", none.clone()),
        "fig8" => network_runs(RuleName::Additive, "fig8", late_network.clone()),
        "fig10" => network_runs(RuleName::Multiplicative, "fig10", none.clone()),
        "fig11" => network_runs(RuleName::Multiplicative, "fig11", late_network),
        // Component-size ensembles matching the simulated networks.
        "fig12" => NETWORK_BOUNDS
            .iter()
            .map(|&k| PresetAction::Components {
                label: format!("fig12-k{k}"),
                n: base.n,
                k_max: k,
                wirings: base.realizations,
            })
            .collect(),
        // Exact component-structure tables. Order 60 already puts every
        // truncated tail far below double precision; exact coefficients
        // for the k_max = 20 polynomial grow too fast for much more.
        "tables" => vec![PresetAction::Tables {
            k_values: NETWORK_BOUNDS.to_vec(),
            s_max: 60,
        }],
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown preset `{other}`; known presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(actions)
}
