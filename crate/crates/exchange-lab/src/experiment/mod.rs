//! Ensemble orchestration: run many independent realizations of one
//! configuration, aggregate them deterministically, sweep parameters, and
//! sample network-component statistics.
//!
//! Every realization draws from its own random stream derived from the
//! master seed and the realization index, so results are a pure function
//! of the configuration no matter how many worker threads execute them;
//! aggregation always happens in realization order.

pub mod config;
pub mod output;
pub mod preset;

pub use config::{parse_config, ConfigError, NetworkKind, RuleName, SimConfig};

use crate::engine::{self, RunSpec};
use crate::fit::{self, FitResult};
use crate::metrics::{SeriesPoint, WealthHistogram};
use crate::network::{self, Topology};
use crate::rng::{stream_rng, stream_seed};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Stream index reserved for the shared wiring in `reuse_network` mode,
/// far outside any realization index.
const SHARED_WIRING_STREAM: u64 = u64::MAX;

/// Per-realization results kept after aggregation.
#[derive(Debug, Clone)]
pub struct RealizationOutcome {
    pub index: u32,
    pub t_c: Option<u64>,
    pub terminal_entropy: f64,
    pub series: Vec<SeriesPoint>,
    pub realized_mean_degree: Option<f64>,
    pub abandoned_stubs: u64,
}

/// One point of the realization-averaged series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPoint {
    pub t: u64,
    pub entropy: f64,
    pub poverty: f64,
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub config: SimConfig,
    pub realizations: Vec<RealizationOutcome>,
    pub mean_series: Vec<MeanPoint>,
    /// Histograms summed over realizations at each captured time.
    pub pooled_snapshots: Vec<(u64, WealthHistogram)>,
    /// Standard fits of the last pooled snapshot: exponential over the full
    /// support, exponential below twice the mean, power law above it.
    pub fits: Vec<FitResult>,
}

impl ExperimentOutput {
    pub fn condensation_times(&self) -> Vec<u64> {
        self.realizations.iter().filter_map(|r| r.t_c).collect()
    }

    pub fn reached_count(&self) -> u32 {
        self.realizations.iter().filter(|r| r.t_c.is_some()).count() as u32
    }

    pub fn last_snapshot(&self) -> Option<&WealthHistogram> {
        self.pooled_snapshots.last().map(|(_, h)| h)
    }

    pub fn mean_realized_degree(&self) -> Option<f64> {
        let degrees: Vec<f64> = self
            .realizations
            .iter()
            .filter_map(|r| r.realized_mean_degree)
            .collect();
        if degrees.is_empty() {
            None
        } else {
            Some(degrees.iter().sum::<f64>() / degrees.len() as f64)
        }
    }
}

struct RealizationData {
    outcome: RealizationOutcome,
    snapshots: Vec<(u64, WealthHistogram)>,
}

fn run_one(cfg: &SimConfig, r: u32, shared: Option<&(Topology, f64, u64)>) -> RealizationData {
    let mut rng = stream_rng(cfg.seed, r as u64);
    let (top, realized_mean_degree, abandoned_stubs) = match cfg.network {
        NetworkKind::FullyConnected => {
            let top = network::fully_connected(cfg.n as usize).expect("validated n");
            (top, None, 0)
        }
        NetworkKind::UniformDegree(k) => match shared {
            Some((top, deg, abandoned)) => (top.clone(), Some(*deg), *abandoned),
            None => {
                // The wiring consumes the head of the realization stream and
                // the dynamics continue it, so one seed fixes both.
                let degrees = network::sample_degrees(cfg.n as usize, k, &mut rng)
                    .expect("validated degree bound");
                let wiring = network::wire(&degrees, &mut rng);
                let deg = wiring.realized_mean_degree();
                (wiring.topology, Some(deg), wiring.abandoned_stubs)
            }
        },
    };
    let spec = RunSpec {
        rule: cfg.rule(),
        mcs_budget: cfg.mcs_budget,
        series_stride: cfg.stride,
        snapshot_times: cfg.resolved_snapshots(),
    };
    let traj = engine::run(&top, cfg.mean_w, &spec, &mut rng);
    RealizationData {
        outcome: RealizationOutcome {
            index: r,
            t_c: traj.condensation.t_c,
            terminal_entropy: traj.condensation.terminal_entropy,
            series: traj.series,
            realized_mean_degree,
            abandoned_stubs,
        },
        snapshots: traj
            .snapshots
            .into_iter()
            .map(|s| (s.t, s.histogram))
            .collect(),
    }
}

/// Run all realizations of `config` and aggregate. Deterministic in
/// `(config, seed)`: realizations use independent streams and are reduced
/// in index order, so worker count never changes the result.
pub fn run_experiment(config: &SimConfig) -> Result<ExperimentOutput, ConfigError> {
    config.validate()?;
    let shared: Option<(Topology, f64, u64)> = match (config.network, config.reuse_network) {
        (NetworkKind::UniformDegree(k), true) => {
            let mut rng = stream_rng(config.seed, SHARED_WIRING_STREAM);
            let degrees = network::sample_degrees(config.n as usize, k, &mut rng)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let wiring = network::wire(&degrees, &mut rng);
            let deg = wiring.realized_mean_degree();
            Some((wiring.topology, deg, wiring.abandoned_stubs))
        }
        _ => None,
    };

    let body = || -> Vec<RealizationData> {
        (0..config.realizations)
            .into_par_iter()
            .map(|r| run_one(config, r, shared.as_ref()))
            .collect()
    };
    let mut data = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| ConfigError::Invalid(format!("worker pool: {e}")))?
            .install(body),
        None => body(),
    };

    // Pool snapshots in realization order; every realization captured the
    // same times, so positions line up.
    let mut pooled: Vec<(u64, WealthHistogram)> = data
        .first()
        .map(|d| {
            d.snapshots
                .iter()
                .map(|(t, _)| (*t, WealthHistogram::from_counts(std::iter::empty())))
                .collect()
        })
        .unwrap_or_default();
    for d in &data {
        assert_eq!(d.snapshots.len(), pooled.len(), "snapshot grids differ");
        for (slot, (t, h)) in pooled.iter_mut().zip(&d.snapshots) {
            assert_eq!(slot.0, *t, "snapshot grids differ");
            slot.1.merge(h);
        }
    }

    // Pointwise mean of the series over realizations.
    let len = data.first().map(|d| d.outcome.series.len()).unwrap_or(0);
    let mut mean_series = Vec::with_capacity(len);
    if len > 0 {
        let inv = 1.0 / data.len() as f64;
        for i in 0..len {
            let t = data[0].outcome.series[i].t;
            let mut entropy = 0.0;
            let mut poverty = 0.0;
            for d in &data {
                let p = &d.outcome.series[i];
                assert_eq!(p.t, t, "series grids differ");
                entropy += p.entropy;
                poverty += p.poverty as f64;
            }
            mean_series.push(MeanPoint {
                t,
                entropy: entropy * inv,
                poverty: poverty * inv,
            });
        }
    }

    let mut fits = Vec::new();
    if let Some((_, h)) = pooled.last() {
        if let Some(w_max) = h.max_wealth() {
            let mw = config.mean_w;
            if let Ok(f) = fit::fit_exponential(h, 0, w_max, mw) {
                fits.push(f);
            }
            if let Ok(f) = fit::fit_exponential(h, 0, 2 * mw, mw) {
                fits.push(f);
            }
            if w_max > 2 * mw {
                if let Ok(f) = fit::fit_power_law(h, 2 * mw + 1, w_max) {
                    fits.push(f);
                }
            }
        }
    }

    Ok(ExperimentOutput {
        config: config.clone(),
        realizations: data.drain(..).map(|d| d.outcome).collect(),
        mean_series,
        pooled_snapshots: pooled,
        fits,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Agent count (condensation-time scaling).
    N,
    /// Additive stake `c`.
    Dw,
    /// Multiplicative stake fraction.
    Nu,
    /// Network degree bound.
    KMax,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::N => "n",
            SweepParam::Dw => "dw",
            SweepParam::Nu => "nu",
            SweepParam::KMax => "kmax",
        }
    }

    /// Condensation-time sweeps make no sense without bankruptcy, so they
    /// force it on; the degree-bound sweep reports distribution fits and
    /// keeps the base setting.
    fn forces_bankruptcy(self) -> bool {
        !matches!(self, SweepParam::KMax)
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub mean_tc: Option<f64>,
    pub std_tc: Option<f64>,
    pub reached: u32,
    pub total: u32,
    /// Full-range exponential decay constant of the last pooled snapshot
    /// (the degree-bound sweep's report column).
    pub fit_b: Option<f64>,
    pub realized_mean_degree: Option<f64>,
    pub tc_values: Vec<u64>,
}

#[derive(Debug)]
pub struct SweepOutput {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    /// Log-log fit of mean condensation time against the swept value
    /// (agent-count sweeps with at least three fully-usable rows).
    pub scaling: Option<FitResult>,
}

fn apply_sweep_value(
    cfg: &mut SimConfig,
    param: SweepParam,
    value: f64,
) -> Result<(), ConfigError> {
    let as_count = |value: f64, what: &str| -> Result<u64, ConfigError> {
        if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
            return Err(ConfigError::Invalid(format!(
                "{what} sweep values must be positive integers, got {value}"
            )));
        }
        Ok(value as u64)
    };
    match param {
        SweepParam::N => cfg.n = as_count(value, "agent-count")? as u32,
        SweepParam::Dw => {
            cfg.rule = RuleName::Additive;
            cfg.c = as_count(value, "stake")?;
        }
        SweepParam::Nu => {
            cfg.rule = RuleName::Multiplicative;
            cfg.nu = value;
        }
        SweepParam::KMax => {
            cfg.network = NetworkKind::UniformDegree(as_count(value, "degree-bound")? as u32);
        }
    }
    Ok(())
}

/// Run one experiment per swept value. Each row's sub-seed depends only on
/// the base seed and the value, so permuting `values` permutes rows
/// without changing their contents.
pub fn sweep(
    base: &SimConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<SweepOutput, ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::Invalid("sweep needs at least one value".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let mut cfg = base.clone();
        apply_sweep_value(&mut cfg, param, value)?;
        if param.forces_bankruptcy() {
            cfg.bankruptcy = true;
        }
        cfg.seed = stream_seed(base.seed, value.to_bits());
        let out = run_experiment(&cfg)?;
        let tcs = out.condensation_times();
        let reached = tcs.len() as u32;
        let total = cfg.realizations;
        let (mean_tc, std_tc) = if tcs.is_empty() {
            (None, None)
        } else {
            let m = tcs.iter().map(|&t| t as f64).sum::<f64>() / tcs.len() as f64;
            let var = tcs
                .iter()
                .map(|&t| (t as f64 - m) * (t as f64 - m))
                .sum::<f64>()
                / tcs.len() as f64;
            (Some(m), Some(var.sqrt()))
        };
        let fit_b = out
            .last_snapshot()
            .and_then(|h| h.max_wealth().map(|w_max| (h, w_max)))
            .and_then(|(h, w_max)| fit::fit_exponential(h, 0, w_max, cfg.mean_w).ok())
            .map(|f| f.p1);
        rows.push(SweepRow {
            value,
            mean_tc,
            std_tc,
            reached,
            total,
            fit_b,
            realized_mean_degree: out.mean_realized_degree(),
            tc_values: tcs,
        });
    }

    let scaling = if param == SweepParam::N {
        let mut pts = Vec::new();
        for row in &rows {
            match row.mean_tc {
                Some(m) if row.reached == row.total => pts.push((row.value, m)),
                Some(_) => eprintln!(
                    "warning: {} of {} realizations condensed at {} = {}; row kept out of the scaling fit",
                    row.reached,
                    row.total,
                    param.label(),
                    row.value
                ),
                None => eprintln!(
                    "warning: no realization condensed at {} = {}; row excluded from the scaling fit",
                    param.label(),
                    row.value
                ),
            }
        }
        fit::fit_scaling(&pts).ok()
    } else {
        None
    };

    Ok(SweepOutput {
        param,
        rows,
        scaling,
    })
}

/// Component statistics of an ensemble of freshly wired networks.
#[derive(Debug, Clone)]
pub struct ComponentStats {
    pub n: u32,
    pub k_max: u32,
    pub wirings: u32,
    /// Component size -> number of components over the whole ensemble.
    pub counts: BTreeMap<usize, u64>,
    /// Components of size at least 2.
    pub total_components: u64,
    pub mean_realized_degree: f64,
}

impl ComponentStats {
    /// Fraction of size-`s` components among all components with `s >= 2`.
    pub fn frequency(&self, s: usize) -> f64 {
        if self.total_components == 0 {
            return 0.0;
        }
        let c = self.counts.get(&s).copied().unwrap_or(0);
        c as f64 / self.total_components as f64
    }
}

pub fn component_ensemble(
    n: u32,
    k_max: u32,
    wirings: u32,
    seed: u64,
) -> Result<ComponentStats, ConfigError> {
    if wirings < 1 {
        return Err(ConfigError::Invalid("need at least one wiring".into()));
    }
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut degree_sum = 0.0;
    for w in 0..wirings {
        let mut rng = stream_rng(seed, w as u64);
        let degrees = network::sample_degrees(n as usize, k_max, &mut rng)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let wiring = network::wire(&degrees, &mut rng);
        degree_sum += wiring.realized_mean_degree();
        for s in network::component_sizes(&wiring.topology) {
            *counts.entry(s).or_insert(0) += 1;
        }
    }
    let total_components = counts
        .iter()
        .filter(|&(&s, _)| s >= 2)
        .map(|(_, &c)| c)
        .sum();
    Ok(ComponentStats {
        n,
        k_max,
        wirings,
        counts,
        total_components,
        mean_realized_degree: degree_sum / wirings as f64,
    })
}
