//! Conservative pairwise exchange dynamics.
//!
//! One Monte Carlo step is one pair-selection attempt. A step that selects
//! an isolated agent, draws a bankrupt neighbor, computes a zero stake, or
//! finds the loser unable to pay still consumes the step. Wealth is a
//! non-negative integer throughout and the population total never changes.
//!
//! Bankrupt agents are out of the game entirely: they leave the selection
//! pool the moment they are flagged, so the first agent of a pair is always
//! drawn from those still trading. On an explicit network the partner is
//! drawn from the first agent's links, which may still point at bankrupt
//! agents; such draws fail and burn the step.

use rand::Rng;

use crate::metrics::{
    poverty_count, shannon_entropy, CondensationResult, SeriesPoint, WealthHistogram,
};
use crate::network::Topology;

/// How the stake of a trade is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleKind {
    /// Fixed stake of `c` wealth units per trade.
    Additive { c: u64 },
    /// Stake is `nu` times the poorer participant's wealth, rounded to the
    /// nearest integer with ties away from zero.
    Multiplicative { nu: f64 },
}

/// A stake rule plus the bankruptcy switch. With bankruptcy on, an agent
/// whose wealth falls below the rule's viability line after a trade is
/// flagged, drops out of the selection pool, and never trades again (the
/// flag is absorbing).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeRule {
    pub kind: RuleKind,
    pub bankruptcy: bool,
}

impl ExchangeRule {
    pub fn additive(c: u64) -> Self {
        assert!(c >= 1, "additive stake must be at least 1");
        ExchangeRule {
            kind: RuleKind::Additive { c },
            bankruptcy: false,
        }
    }

    pub fn multiplicative(nu: f64) -> Self {
        assert!(
            nu > 0.0 && nu < 1.0,
            "multiplicative fraction must lie in (0, 1), got {nu}"
        );
        ExchangeRule {
            kind: RuleKind::Multiplicative { nu },
            bankruptcy: false,
        }
    }

    pub fn with_bankruptcy(mut self, on: bool) -> Self {
        self.bankruptcy = on;
        self
    }

    /// Amount at stake for a pair holding `wi` and `wj`.
    pub fn stake(&self, wi: u64, wj: u64) -> u64 {
        match self.kind {
            RuleKind::Additive { c } => c,
            RuleKind::Multiplicative { nu } => (nu * wi.min(wj) as f64).round() as u64,
        }
    }

    /// Whether wealth `w` is below the rule's viability line: under the
    /// additive rule `w < c`; under the multiplicative rule the rounded
    /// stake of a pair whose poorer member holds `w` is zero.
    pub fn is_bankrupt(&self, w: u64) -> bool {
        match self.kind {
            RuleKind::Additive { c } => w < c,
            RuleKind::Multiplicative { nu } => (nu * w as f64).round() < 1.0,
        }
    }

    /// Smallest wealth that is not poverty under this rule. Agents with
    /// `w < poverty_line()` are the poverty count.
    pub fn poverty_line(&self) -> u64 {
        match self.kind {
            RuleKind::Additive { c } => c,
            RuleKind::Multiplicative { .. } => (0..)
                .find(|&w| !self.is_bankrupt(w))
                .expect("some wealth always clears a fraction in (0,1)"),
        }
    }
}

/// Mutable population state: exact integer wealths, absorbing bankruptcy
/// flags, and the Monte Carlo clock.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    pub wealth: Vec<u64>,
    pub bankrupt: Vec<bool>,
    pub t: u64,
}

impl PopulationState {
    /// Every agent starts with exactly `mean_w`; no one starts bankrupt.
    pub fn new(n: usize, mean_w: u64) -> Self {
        assert!(n >= 2, "population needs at least 2 agents");
        assert!(mean_w >= 1, "initial wealth must be positive");
        PopulationState {
            wealth: vec![mean_w; n],
            bankrupt: vec![false; n],
            t: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.wealth.len()
    }

    pub fn total_wealth(&self) -> u64 {
        self.wealth.iter().sum()
    }
}

/// What a single step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    /// A trade completed: `amount` moved from `loser` to `winner`;
    /// `newly_bankrupt` participants were flagged afterwards.
    Transferred {
        loser: usize,
        winner: usize,
        amount: u64,
        newly_bankrupt: u32,
    },
    /// No pair could form: the selected agent has no neighbors, or fewer
    /// than two agents are still in the pool.
    NoPartner,
    /// The drawn neighbor was already flagged bankrupt.
    BankruptParticipant,
    /// The stake rounded to zero.
    ZeroStake,
    /// The loser could not cover the stake.
    LoserCannotPay,
}

/// The set of agents still eligible for selection. Starts as everyone;
/// with bankruptcy enabled, flagged agents are removed and selection
/// narrows to the survivors. Removal is O(1) swap-remove and idempotent.
#[derive(Debug, Clone)]
pub struct TradingPool {
    members: Vec<u32>,
    slot: Vec<u32>,
}

const GONE: u32 = u32::MAX;

impl TradingPool {
    /// Pool of all `n` agents in index order.
    pub fn full(n: usize) -> Self {
        assert!(n < GONE as usize, "population too large for pool indices");
        TradingPool {
            members: (0..n as u32).collect(),
            slot: (0..n as u32).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.slot[agent] != GONE
    }

    /// Drop `agent` from the pool; no-op if already gone.
    pub fn remove(&mut self, agent: usize) {
        let s = self.slot[agent];
        if s == GONE {
            return;
        }
        self.members.swap_remove(s as usize);
        if let Some(&moved) = self.members.get(s as usize) {
            self.slot[moved as usize] = s;
        }
        self.slot[agent] = GONE;
    }

    fn get(&self, idx: usize) -> usize {
        self.members[idx] as usize
    }
}

/// Select a trading pair: `i` uniform over the pool; `j` uniform over
/// `i`'s neighbors (uniform over the rest of the pool when fully
/// connected). Returns `None` when `i` is isolated or the pool cannot
/// supply two agents.
pub fn select_pair(
    top: &Topology,
    pool: &TradingPool,
    rng: &mut impl Rng,
) -> Option<(usize, usize)> {
    match top {
        Topology::FullyConnected { .. } => {
            if pool.len() < 2 {
                return None;
            }
            let a = rng.gen_range(0..pool.len());
            let mut b = rng.gen_range(0..pool.len() - 1);
            if b >= a {
                b += 1;
            }
            Some((pool.get(a), pool.get(b)))
        }
        Topology::Sparse { neighbors } => {
            if pool.is_empty() {
                return None;
            }
            let i = pool.get(rng.gen_range(0..pool.len()));
            let nb = &neighbors[i];
            if nb.is_empty() {
                return None;
            }
            let j = nb[rng.gen_range(0..nb.len())] as usize;
            Some((i, j))
        }
    }
}

/// Apply one trade attempt between `i` and `j` with a decided coin. Exposed
/// so deterministic trade sequences can be driven without a generator.
pub fn apply_trade(
    state: &mut PopulationState,
    rule: ExchangeRule,
    i: usize,
    j: usize,
    i_loses: bool,
) -> StepOutcome {
    let dw = rule.stake(state.wealth[i], state.wealth[j]);
    let (loser, winner) = if i_loses { (i, j) } else { (j, i) };
    if dw == 0 {
        return StepOutcome::ZeroStake;
    }
    if state.wealth[loser] < dw {
        return StepOutcome::LoserCannotPay;
    }
    state.wealth[loser] -= dw;
    state.wealth[winner] += dw;
    let mut newly_bankrupt = 0;
    if rule.bankruptcy {
        for a in [loser, winner] {
            if !state.bankrupt[a] && rule.is_bankrupt(state.wealth[a]) {
                state.bankrupt[a] = true;
                newly_bankrupt += 1;
            }
        }
    }
    StepOutcome::Transferred {
        loser,
        winner,
        amount: dw,
        newly_bankrupt,
    }
}

/// Advance the clock by one pair-selection attempt. The coin is drawn for
/// every non-bankrupt selected pair, even when the stake turns out to be
/// zero or unpayable, so the random stream consumed per step is fixed.
/// Participants flagged during the trade leave the pool immediately.
pub fn step(
    state: &mut PopulationState,
    top: &Topology,
    rule: ExchangeRule,
    pool: &mut TradingPool,
    rng: &mut impl Rng,
) -> StepOutcome {
    state.t += 1;
    let Some((i, j)) = select_pair(top, pool, rng) else {
        return StepOutcome::NoPartner;
    };
    if rule.bankruptcy && (state.bankrupt[i] || state.bankrupt[j]) {
        return StepOutcome::BankruptParticipant;
    }
    let i_loses: bool = rng.gen();
    let out = apply_trade(state, rule, i, j, i_loses);
    if rule.bankruptcy {
        if let StepOutcome::Transferred {
            newly_bankrupt: 1..,
            ..
        } = out
        {
            for a in [i, j] {
                if state.bankrupt[a] {
                    pool.remove(a);
                }
            }
        }
    }
    out
}

/// Recording plan for one trajectory.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub rule: ExchangeRule,
    pub mcs_budget: u64,
    /// Entropy/poverty are recorded at `t = 0`, every `series_stride`
    /// steps, and at the final step.
    pub series_stride: u64,
    /// Times at which full wealth histograms are captured. Times beyond the
    /// budget are ignored.
    pub snapshot_times: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: u64,
    pub histogram: WealthHistogram,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub series: Vec<SeriesPoint>,
    pub snapshots: Vec<Snapshot>,
    pub condensation: CondensationResult,
    pub final_wealth: Vec<u64>,
}

/// Whether no future trade can complete. With bankruptcy, `n - 1` flags
/// freeze everything (any pair includes a flagged agent). Under the
/// multiplicative rule, `n - 1` agents below the poverty line freeze
/// everything even without flags: every pair's poorer member rounds to a
/// zero stake.
fn is_absorbed(rule: ExchangeRule, n: usize, poverty: usize, n_bankrupt: usize) -> bool {
    (rule.bankruptcy && n_bankrupt >= n - 1)
        || (matches!(rule.kind, RuleKind::Multiplicative { .. }) && poverty >= n - 1)
}

/// Run one realization from the uniform initial condition.
///
/// The poverty count is tracked incrementally, so the condensation time in
/// the result is exact (the step at which poverty first reached `n - 1`),
/// not quantized to the series stride. Once the dynamics are absorbed the
/// remaining grid points repeat the frozen state without burning steps;
/// recorded output is identical to stepping through them.
pub fn run(
    top: &Topology,
    mean_w: u64,
    spec: &RunSpec,
    rng: &mut impl Rng,
) -> Trajectory {
    let n = top.n();
    assert!(spec.series_stride >= 1, "series stride must be positive");
    let rule = spec.rule;
    let line = rule.poverty_line();

    let mut state = PopulationState::new(n, mean_w);
    let mut pool = TradingPool::full(n);
    let expected_total = (n as u64).checked_mul(mean_w).expect("total wealth overflow");
    let mut poverty = poverty_count(&state.wealth, line);
    let mut n_bankrupt = 0usize;
    let mut t_c: Option<u64> = if poverty == n - 1 { Some(0) } else { None };

    let mut snap_times: Vec<u64> = spec
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t <= spec.mcs_budget)
        .collect();
    snap_times.sort_unstable();
    snap_times.dedup();

    let mut series = Vec::with_capacity((spec.mcs_budget / spec.series_stride) as usize + 2);
    let mut snapshots: Vec<Snapshot> = Vec::with_capacity(snap_times.len());
    let mut snap_idx = 0usize;

    let capture = |state: &PopulationState, t: u64, snapshots: &mut Vec<Snapshot>| {
        let histogram = WealthHistogram::from_wealths(&state.wealth);
        assert_eq!(
            histogram.total_wealth(),
            expected_total,
            "wealth not conserved at snapshot t = {t}"
        );
        snapshots.push(Snapshot { t, histogram });
    };
    let record = |state: &PopulationState, t: u64, poverty: usize, series: &mut Vec<SeriesPoint>| {
        let h = WealthHistogram::from_wealths(&state.wealth);
        debug_assert_eq!(h.total_wealth(), expected_total);
        series.push(SeriesPoint {
            t,
            entropy: shannon_entropy(&h),
            poverty: poverty as u64,
        });
    };

    record(&state, 0, poverty, &mut series);
    while snap_idx < snap_times.len() && snap_times[snap_idx] == 0 {
        capture(&state, 0, &mut snapshots);
        snap_idx += 1;
    }

    let mut absorbed = is_absorbed(rule, n, poverty, n_bankrupt);
    while state.t < spec.mcs_budget && !absorbed {
        let outcome = step(&mut state, top, rule, &mut pool, rng);
        if let StepOutcome::Transferred {
            loser,
            winner,
            amount,
            newly_bankrupt,
        } = outcome
        {
            let loser_now = state.wealth[loser];
            let winner_now = state.wealth[winner];
            if loser_now + amount >= line && loser_now < line {
                poverty += 1;
            }
            if winner_now - amount < line && winner_now >= line {
                poverty -= 1;
            }
            n_bankrupt += newly_bankrupt as usize;
            if t_c.is_none() && poverty == n - 1 {
                t_c = Some(state.t);
            }
            absorbed = is_absorbed(rule, n, poverty, n_bankrupt);
        }
        let t = state.t;
        if t % spec.series_stride == 0 {
            record(&state, t, poverty, &mut series);
        }
        while snap_idx < snap_times.len() && snap_times[snap_idx] == t {
            capture(&state, t, &mut snapshots);
            snap_idx += 1;
        }
    }

    if state.t < spec.mcs_budget {
        // Absorbed early: replay the frozen state onto the remaining grid.
        let t_frozen = state.t;
        let mut grid = t_frozen / spec.series_stride * spec.series_stride;
        loop {
            grid += spec.series_stride;
            if grid > spec.mcs_budget {
                break;
            }
            record(&state, grid, poverty, &mut series);
        }
        while snap_idx < snap_times.len() {
            capture(&state, snap_times[snap_idx], &mut snapshots);
            snap_idx += 1;
        }
        state.t = spec.mcs_budget;
    }
    if series.last().map(|p| p.t) != Some(spec.mcs_budget) {
        record(&state, spec.mcs_budget, poverty, &mut series);
    }

    let terminal_entropy = series.last().expect("series never empty").entropy;
    Trajectory {
        series,
        snapshots,
        condensation: CondensationResult { t_c, terminal_entropy },
        final_wealth: state.wealth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{fully_connected, Topology};
    use crate::rng::stream_rng;

    #[test]
    fn additive_stake_ignores_wealths() {
        let rule = ExchangeRule::additive(20);
        assert_eq!(rule.stake(0, 0), 20);
        assert_eq!(rule.stake(1_000_000, 3), 20);
    }

    #[test]
    fn multiplicative_stake_rounds_half_away_from_zero() {
        let rule = ExchangeRule::multiplicative(0.2);
        assert_eq!(rule.stake(100, 250), 20); // 0.2 * 100
        assert_eq!(rule.stake(12, 800), 2); // 2.4 -> 2
        assert_eq!(rule.stake(13, 800), 3); // 2.6 -> 3
        assert_eq!(rule.stake(2, 800), 0); // 0.4 -> 0
        assert_eq!(rule.stake(3, 800), 1); // 0.6 -> 1
        let half = ExchangeRule::multiplicative(0.5);
        assert_eq!(half.stake(5, 5), 3); // 2.5 rounds away from zero
        assert_eq!(half.stake(1, 9), 1); // 0.5 rounds away from zero
    }

    #[test]
    fn bankruptcy_lines() {
        let add = ExchangeRule::additive(20);
        assert!(add.is_bankrupt(19));
        assert!(!add.is_bankrupt(20));
        assert_eq!(add.poverty_line(), 20);

        let mul = ExchangeRule::multiplicative(0.2);
        assert!(mul.is_bankrupt(0));
        assert!(mul.is_bankrupt(2));
        assert!(!mul.is_bankrupt(3));
        assert_eq!(mul.poverty_line(), 3);

        let fine = ExchangeRule::multiplicative(0.25);
        // 0.25 * 2 = 0.5 rounds to 1: still viable.
        assert!(!fine.is_bankrupt(2));
        assert_eq!(fine.poverty_line(), 2);
    }

    #[test]
    fn completed_trade_moves_exactly_the_stake() {
        let top = fully_connected(2).unwrap();
        let mut state = PopulationState::new(2, 100);
        let mut pool = TradingPool::full(2);
        let rule = ExchangeRule::additive(20);
        let mut rng = stream_rng(0, 0);
        let before = state.total_wealth();
        let out = step(&mut state, &top, rule, &mut pool, &mut rng);
        match out {
            StepOutcome::Transferred { amount, .. } => assert_eq!(amount, 20),
            other => panic!("expected a completed trade, got {other:?}"),
        }
        assert_eq!(state.total_wealth(), before);
        assert_eq!(state.t, 1);
        let mut ws = state.wealth.clone();
        ws.sort_unstable();
        assert_eq!(ws, vec![80, 120]);
    }

    #[test]
    fn loser_who_cannot_pay_blocks_the_trade() {
        let mut state = PopulationState::new(2, 100);
        state.wealth = vec![10, 190];
        let rule = ExchangeRule::additive(20);
        // Agent 0 loses but cannot cover the stake.
        let out = apply_trade(&mut state, rule, 0, 1, true);
        assert_eq!(out, StepOutcome::LoserCannotPay);
        assert_eq!(state.wealth, vec![10, 190]);
        // Agent 0 can still win.
        let out = apply_trade(&mut state, rule, 0, 1, false);
        assert!(matches!(out, StepOutcome::Transferred { .. }));
        assert_eq!(state.wealth, vec![30, 170]);
    }

    #[test]
    fn zero_stake_is_a_null_step() {
        let mut state = PopulationState::new(2, 100);
        state.wealth = vec![2, 198];
        let rule = ExchangeRule::multiplicative(0.2);
        for coin in [true, false] {
            let out = apply_trade(&mut state, rule, 0, 1, coin);
            assert_eq!(out, StepOutcome::ZeroStake);
            assert_eq!(state.wealth, vec![2, 198]);
        }
    }

    #[test]
    fn alternating_coin_is_wealth_neutral_for_equal_traders() {
        let mut state = PopulationState::new(2, 100);
        let rule = ExchangeRule::additive(20);
        for round in 0..50 {
            let out = apply_trade(&mut state, rule, 0, 1, round % 2 == 0);
            assert!(matches!(out, StepOutcome::Transferred { .. }));
            if round % 2 == 1 {
                assert_eq!(state.wealth, vec![100, 100], "round {round}");
            }
        }
    }

    #[test]
    fn bankruptcy_flag_is_absorbing_and_empties_the_pool() {
        let top = fully_connected(2).unwrap();
        let rule = ExchangeRule::additive(60).with_bankruptcy(true);
        let mut state = PopulationState::new(2, 100);
        let mut pool = TradingPool::full(2);
        let mut rng = stream_rng(9, 0);
        // The first step always completes (both can pay) and drops the
        // loser to 40 < 60, flagging it out of the pool.
        let out = step(&mut state, &top, rule, &mut pool, &mut rng);
        match out {
            StepOutcome::Transferred { newly_bankrupt, .. } => assert_eq!(newly_bankrupt, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(pool.len(), 1);
        let frozen = state.wealth.clone();
        for _ in 0..1000 {
            let out = step(&mut state, &top, rule, &mut pool, &mut rng);
            assert_eq!(out, StepOutcome::NoPartner, "a lone survivor has no one to trade with");
        }
        assert_eq!(state.wealth, frozen);
        assert_eq!(state.t, 1001);
    }

    #[test]
    fn bankrupt_neighbors_still_burn_steps() {
        // Path 0-1. Agent 1 is flagged and out of the pool, but agent 0's
        // only link still points at it: every step fails yet consumes time.
        let top = Topology::Sparse {
            neighbors: vec![vec![1], vec![0]],
        };
        let rule = ExchangeRule::additive(20).with_bankruptcy(true);
        let mut state = PopulationState::new(2, 100);
        state.wealth = vec![190, 10];
        state.bankrupt[1] = true;
        let mut pool = TradingPool::full(2);
        pool.remove(1);
        let mut rng = stream_rng(11, 0);
        for _ in 0..500 {
            let out = step(&mut state, &top, rule, &mut pool, &mut rng);
            assert_eq!(out, StepOutcome::BankruptParticipant);
        }
        assert_eq!(state.t, 500);
        assert_eq!(state.wealth, vec![190, 10]);
    }

    #[test]
    fn pool_removal_is_idempotent_and_narrows_selection() {
        let top = fully_connected(5).unwrap();
        let mut pool = TradingPool::full(5);
        pool.remove(2);
        pool.remove(4);
        pool.remove(2);
        assert_eq!(pool.len(), 3);
        assert!(pool.contains(0) && pool.contains(1) && pool.contains(3));
        assert!(!pool.contains(2) && !pool.contains(4));
        let mut rng = stream_rng(13, 0);
        for _ in 0..2000 {
            let (i, j) = select_pair(&top, &pool, &mut rng).unwrap();
            assert_ne!(i, j);
            for a in [i, j] {
                assert!(a == 0 || a == 1 || a == 3, "selected removed agent {a}");
            }
        }
    }

    #[test]
    fn isolated_agents_consume_steps() {
        let top = Topology::Sparse {
            neighbors: vec![vec![], vec![]],
        };
        let mut state = PopulationState::new(2, 100);
        let mut pool = TradingPool::full(2);
        let rule = ExchangeRule::additive(20);
        let mut rng = stream_rng(1, 0);
        for _ in 0..100 {
            let out = step(&mut state, &top, rule, &mut pool, &mut rng);
            assert_eq!(out, StepOutcome::NoPartner);
        }
        assert_eq!(state.t, 100);
        assert_eq!(state.wealth, vec![100, 100]);
    }

    #[test]
    fn pair_selection_is_uniform_on_small_populations() {
        // 50 agents, a million ordered draws: every ordered pair within
        // five sigma of its multinomial expectation.
        let n = 50usize;
        let draws = 1_000_000usize;
        let top = fully_connected(n).unwrap();
        let pool = TradingPool::full(n);
        let mut rng = stream_rng(2024, 0);
        let mut counts = vec![0u32; n * n];
        for _ in 0..draws {
            let (i, j) = select_pair(&top, &pool, &mut rng).unwrap();
            assert_ne!(i, j);
            counts[i * n + j] += 1;
        }
        let p = 1.0 / (n * (n - 1)) as f64;
        let mu = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    assert_eq!(counts[i * n + j], 0);
                    continue;
                }
                let dev = (counts[i * n + j] as f64 - mu).abs();
                assert!(
                    dev <= 5.0 * sigma,
                    "pair ({i},{j}) count {} deviates {dev:.1} (5 sigma = {:.1})",
                    counts[i * n + j],
                    5.0 * sigma
                );
            }
        }
    }

    #[test]
    fn pair_selection_chi_square_on_large_population() {
        // 500 agents: a per-pair band would trip on expected extremes, so
        // check the global chi-square statistic instead.
        let n = 500usize;
        let draws = 1_000_000usize;
        let top = fully_connected(n).unwrap();
        let pool = TradingPool::full(n);
        let mut rng = stream_rng(2025, 0);
        let mut counts = vec![0u32; n * n];
        for _ in 0..draws {
            let (i, j) = select_pair(&top, &pool, &mut rng).unwrap();
            counts[i * n + j] += 1;
        }
        let cells = (n * (n - 1)) as f64;
        let e = draws as f64 / cells;
        let mut chi2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = counts[i * n + j] as f64 - e;
                chi2 += d * d / e;
            }
        }
        let df = cells - 1.0;
        let bound = 6.0 * (2.0 * df).sqrt();
        assert!(
            (chi2 - df).abs() < bound,
            "chi-square {chi2:.0} vs df {df:.0} (six-sigma band {bound:.0})"
        );
    }

    #[test]
    fn neighbor_selection_is_uniform_over_links() {
        // Path 0-1-2: from the middle agent both ends are equally likely.
        let top = Topology::Sparse {
            neighbors: vec![vec![1], vec![0, 2], vec![1]],
        };
        let pool = TradingPool::full(3);
        let mut rng = stream_rng(77, 0);
        let (mut to0, mut to2, mut from1) = (0u32, 0u32, 0u32);
        for _ in 0..300_000 {
            let (i, j) = select_pair(&top, &pool, &mut rng).unwrap();
            if i == 1 {
                from1 += 1;
                match j {
                    0 => to0 += 1,
                    2 => to2 += 1,
                    other => panic!("not a neighbor: {other}"),
                }
            }
        }
        let half = from1 as f64 / 2.0;
        let sigma = (from1 as f64 * 0.25).sqrt();
        assert!((to0 as f64 - half).abs() < 5.0 * sigma);
        assert!((to2 as f64 - half).abs() < 5.0 * sigma);
    }

    #[test]
    fn run_records_grid_and_conserves() {
        let top = fully_connected(50).unwrap();
        let spec = RunSpec {
            rule: ExchangeRule::additive(20),
            mcs_budget: 2_000,
            series_stride: 300,
            snapshot_times: vec![0, 1_000, 2_000, 9_999_999],
        };
        let mut rng = stream_rng(5, 0);
        let traj = run(&top, 100, &spec, &mut rng);
        let ts: Vec<u64> = traj.series.iter().map(|p| p.t).collect();
        assert_eq!(ts, vec![0, 300, 600, 900, 1200, 1500, 1800, 2000]);
        assert_eq!(traj.snapshots.len(), 3, "out-of-budget snapshot dropped");
        for s in &traj.snapshots {
            assert_eq!(s.histogram.total_wealth(), 50 * 100);
        }
        assert_eq!(traj.final_wealth.iter().sum::<u64>(), 50 * 100);
        assert_eq!(traj.series[0].entropy, 0.0, "uniform start has zero entropy");
    }

    #[test]
    fn zero_budget_run_is_a_single_point() {
        let top = fully_connected(10).unwrap();
        let spec = RunSpec {
            rule: ExchangeRule::additive(5),
            mcs_budget: 0,
            series_stride: 100,
            snapshot_times: vec![0],
        };
        let mut rng = stream_rng(6, 0);
        let traj = run(&top, 50, &spec, &mut rng);
        assert_eq!(traj.series.len(), 1);
        assert_eq!(traj.series[0].t, 0);
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.snapshots[0].histogram.count_at(50), 10);
        assert!(!traj.condensation.reached());
    }

    #[test]
    fn two_agent_bankruptcy_condenses_and_freezes() {
        let top = fully_connected(2).unwrap();
        let spec = RunSpec {
            rule: ExchangeRule::additive(20).with_bankruptcy(true),
            mcs_budget: 100_000,
            series_stride: 50,
            snapshot_times: vec![100_000],
        };
        let mut rng = stream_rng(8, 0);
        let traj = run(&top, 100, &spec, &mut rng);
        let r = &traj.condensation;
        assert!(r.reached(), "a 2-agent gamble must ruin someone");
        // Terminal state: one agent at 0, the other holding everything.
        let h = &traj.snapshots[0].histogram;
        assert_eq!(h.count_at(0), 1);
        assert_eq!(h.count_at(200), 1);
        assert!((r.terminal_entropy - std::f64::consts::LN_2).abs() < 1e-12);
        // Poverty stays n-1 = 1 on every recorded point after t_c.
        let tc = r.t_c.unwrap();
        for p in traj.series.iter().filter(|p| p.t >= tc) {
            assert_eq!(p.poverty, 1);
        }
    }

    #[test]
    fn multiplicative_poor_majority_freezes_without_flags() {
        // Two agents, one already below the stake-rounding line: nothing
        // can ever trade, and the run fast-forwards to the budget.
        let top = Topology::Sparse {
            neighbors: vec![vec![1], vec![0]],
        };
        let spec = RunSpec {
            rule: ExchangeRule::multiplicative(0.2),
            mcs_budget: 1_000_000_000,
            series_stride: 100_000_000,
            snapshot_times: vec![],
        };
        let mut rng = stream_rng(10, 0);
        // mean_w = 1 puts both agents below the line immediately.
        let t0 = std::time::Instant::now();
        let traj = run(&top, 1, &spec, &mut rng);
        assert!(t0.elapsed().as_secs() < 5, "absorbed run must not step");
        assert_eq!(traj.final_wealth, vec![1, 1]);
        assert_eq!(traj.series.last().unwrap().t, 1_000_000_000);
    }
}
