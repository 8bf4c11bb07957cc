//! Wealth histograms and inequality diagnostics.
//!
//! Entropy is Shannon entropy over exact integer wealth states — each
//! distinct wealth value is its own state, with no binning — so it is `0`
//! for a uniform population and at most `ln n`. Condensation is the moment
//! the poverty count first reaches `n - 1`: one agent holds essentially
//! everything and the entropy settles at a closed-form floor.

use std::collections::BTreeMap;

/// Counts of agents per exact wealth value. Only occupied states are
/// stored. Histograms from several realizations can be pooled with
/// [`WealthHistogram::merge`]; `n_agents` then counts agent-observations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WealthHistogram {
    counts: BTreeMap<u64, u64>,
    n_agents: u64,
}

impl WealthHistogram {
    pub fn from_wealths(wealths: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &w in wealths {
            *counts.entry(w).or_insert(0) += 1;
        }
        WealthHistogram {
            counts,
            n_agents: wealths.len() as u64,
        }
    }

    /// Build from `(wealth, count)` pairs; zero counts are dropped.
    pub fn from_counts(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut counts = BTreeMap::new();
        let mut n = 0u64;
        for (w, c) in pairs {
            if c > 0 {
                *counts.entry(w).or_insert(0) += c;
                n += c;
            }
        }
        WealthHistogram { counts, n_agents: n }
    }

    /// Pool another histogram into this one (counts add).
    pub fn merge(&mut self, other: &WealthHistogram) {
        for (&w, &c) in &other.counts {
            *self.counts.entry(w).or_insert(0) += c;
        }
        self.n_agents += other.n_agents;
    }

    /// Occupied `(wealth, count)` states in increasing wealth order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&w, &c)| (w, c))
    }

    pub fn count_at(&self, w: u64) -> u64 {
        self.counts.get(&w).copied().unwrap_or(0)
    }

    pub fn n_agents(&self) -> u64 {
        self.n_agents
    }

    pub fn occupied_states(&self) -> usize {
        self.counts.len()
    }

    pub fn max_wealth(&self) -> Option<u64> {
        self.counts.keys().next_back().copied()
    }

    pub fn total_wealth(&self) -> u64 {
        let total: u128 = self
            .counts
            .iter()
            .map(|(&w, &c)| w as u128 * c as u128)
            .sum();
        u64::try_from(total).expect("total wealth overflows u64")
    }

    pub fn mean_wealth(&self) -> f64 {
        if self.n_agents == 0 {
            return 0.0;
        }
        self.total_wealth() as f64 / self.n_agents as f64
    }
}

/// Shannon entropy `-Σ p_k ln p_k` over occupied wealth states, with
/// `p_k = n_k / n`. Zero when all agents share one state; at most `ln n`.
pub fn shannon_entropy(h: &WealthHistogram) -> f64 {
    if h.n_agents == 0 {
        return 0.0;
    }
    let n = h.n_agents as f64;
    let mut acc = 0.0;
    for (_, c) in h.iter() {
        let p = c as f64 / n;
        acc += p * p.ln();
    }
    if acc == 0.0 {
        0.0
    } else {
        -acc
    }
}

/// Entropy floor of a fully condensed population: `n - 1` agents share one
/// state and a single agent holds another. Evaluates the same expression
/// [`shannon_entropy`] would on that two-state histogram.
pub fn condensation_entropy(n: u64) -> f64 {
    assert!(n >= 2, "condensation needs at least 2 agents");
    let nf = n as f64;
    let p_poor = (n - 1) as f64 / nf;
    let p_rich = 1.0 / nf;
    -(p_poor * p_poor.ln() + p_rich * p_rich.ln())
}

/// Number of agents whose wealth lies strictly below `poverty_line`.
pub fn poverty_count(wealths: &[u64], poverty_line: u64) -> usize {
    wealths.iter().filter(|&&w| w < poverty_line).count()
}

/// One recorded point of an entropy/poverty time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub t: u64,
    pub entropy: f64,
    pub poverty: u64,
}

/// Outcome of condensation detection over one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensationResult {
    /// First recorded time at which poverty reached `n - 1`, if any.
    pub t_c: Option<u64>,
    /// Entropy at the last recorded point.
    pub terminal_entropy: f64,
}

impl CondensationResult {
    pub fn reached(&self) -> bool {
        self.t_c.is_some()
    }
}

/// Scan a recorded series for the condensation point: the first entry whose
/// poverty count equals `n - 1`. Returns `None` for an empty series.
pub fn detect_condensation(series: &[SeriesPoint], n: usize) -> Option<CondensationResult> {
    let last = series.last()?;
    let t_c = series
        .iter()
        .find(|p| p.poverty as usize == n - 1)
        .map(|p| p.t);
    Some(CondensationResult {
        t_c,
        terminal_entropy: last.entropy,
    })
}
