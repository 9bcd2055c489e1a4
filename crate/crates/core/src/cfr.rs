//! Regret matching, a normal-form validation solver, and chance-sampled
//! CFR over the abstract pattern game.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abstraction::{info_set_key, legal_abstract_actions, mask_count, ActionMask, DecisionSchedule, InfoSetKey};
use crate::engine::{new_game, GameState};
use crate::error::{Error, Result};
use crate::eval::{evaluate, EvalMode, EvalOptions};
use crate::persistence::{save_store, write_report};
use crate::policy::{choose_action, AbstractAction};
use crate::tiles::{shuffle_deal, Deal};

/// A distribution over `[Normal, PongPongHu, QiDui]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strategy(pub [f64; 3]);

impl Strategy {
    pub fn prob(&self, a: AbstractAction) -> f64 {
        self.0[a.index()]
    }

    /// Most likely action; ties go to the lowest index.
    pub fn argmax(&self) -> AbstractAction {
        let mut best = 0;
        for i in 1..3 {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        AbstractAction::from_index(best).expect("index < 3")
    }

    fn uniform(mask: &ActionMask) -> Strategy {
        let n = mask_count(mask) as f64;
        Strategy(mask.map(|legal| if legal { 1.0 / n } else { 0.0 }))
    }
}

/// Positive-part normalisation of `values` over the legal actions, uniform
/// when nothing is positive.
fn normalize_positive(values: &[f64; 3], mask: &ActionMask) -> Result<Strategy> {
    if mask_count(mask) == 0 {
        return Err(Error::EmptyMask);
    }
    let mut probs = [0.0; 3];
    let mut total = 0.0;
    for i in 0..3 {
        if mask[i] {
            probs[i] = values[i].max(0.0);
            total += probs[i];
        }
    }
    if total > 0.0 {
        for p in &mut probs {
            *p /= total;
        }
        Ok(Strategy(probs))
    } else {
        Ok(Strategy::uniform(mask))
    }
}

pub fn regret_match(regret_sum: &[f64; 3], legal_mask: &ActionMask) -> Result<Strategy> {
    normalize_positive(regret_sum, legal_mask)
}

/// Payoffs of a two-player matrix game; `row[i][j]` and `col[i][j]` are the
/// utilities when row plays `i` and column plays `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    pub row: Vec<Vec<f64>>,
    pub col: Vec<Vec<f64>>,
}

impl MatrixGame {
    pub fn new(row: Vec<Vec<f64>>, col: Vec<Vec<f64>>) -> Result<Self> {
        let n = row.len();
        let m = row.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::Matrix("empty payoff matrix".into()));
        }
        if col.len() != n || row.iter().chain(&col).any(|r| r.len() != m) {
            return Err(Error::Matrix("ragged or mismatched payoff matrices".into()));
        }
        if row.iter().chain(&col).flatten().any(|v| !v.is_finite()) {
            return Err(Error::Matrix("non-finite payoff".into()));
        }
        Ok(MatrixGame { row, col })
    }

    pub fn zero_sum(row: Vec<Vec<f64>>) -> Result<Self> {
        let col = row.iter().map(|r| r.iter().map(|v| -v).collect()).collect();
        MatrixGame::new(row, col)
    }

    pub fn rock_paper_scissors() -> Self {
        MatrixGame::zero_sum(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .expect("valid matrix")
    }

    pub fn matching_pennies() -> Self {
        MatrixGame::zero_sum(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).expect("valid matrix")
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row.len(), self.row[0].len())
    }

    /// Expected utility of each row action against a column mix.
    pub fn row_values(&self, col_mix: &[f64]) -> Vec<f64> {
        self.row
            .iter()
            .map(|r| r.iter().zip(col_mix).map(|(u, p)| u * p).sum())
            .collect()
    }

    /// Expected utility of each column action against a row mix.
    pub fn col_values(&self, row_mix: &[f64]) -> Vec<f64> {
        let (_, m) = self.shape();
        (0..m)
            .map(|j| self.col.iter().zip(row_mix).map(|(r, p)| r[j] * p).sum())
            .collect()
    }

    /// Sum over players of the gain from best-responding to `strategies`.
    pub fn exploitability(&self, strategies: &[Vec<f64>; 2]) -> f64 {
        let rv = self.row_values(&strategies[1]);
        let cv = self.col_values(&strategies[0]);
        let row_now: f64 = rv.iter().zip(&strategies[0]).map(|(v, p)| v * p).sum();
        let col_now: f64 = cv.iter().zip(&strategies[1]).map(|(v, p)| v * p).sum();
        let row_best = rv.iter().cloned().fold(f64::MIN, f64::max);
        let col_best = cv.iter().cloned().fold(f64::MIN, f64::max);
        (row_best - row_now) + (col_best - col_now)
    }
}

fn rm_step(regrets: &[f64], out: &mut [f64]) {
    let total: f64 = regrets.iter().map(|r| r.max(0.0)).sum();
    if total > 0.0 {
        for (o, r) in out.iter_mut().zip(regrets) {
            *o = r.max(0.0) / total;
        }
    } else {
        out.fill(1.0 / regrets.len() as f64);
    }
}

/// Simultaneous regret matching with accumulated regrets. Each round both
/// players play their current regret-matched mix; regrets grow by the
/// expected gain of every pure action over that mix. Returns the normalised
/// strategy sums.
pub fn rm_normal_form(game: &MatrixGame, iterations: usize) -> Result<[Vec<f64>; 2]> {
    if iterations == 0 {
        return Err(Error::Config("regret matching needs at least one iteration".into()));
    }
    let (n, m) = game.shape();
    let mut regrets = [vec![0.0; n], vec![0.0; m]];
    let mut sums = [vec![0.0; n], vec![0.0; m]];
    let mut current = [vec![0.0; n], vec![0.0; m]];
    for _ in 0..iterations {
        for p in 0..2 {
            let (r, c) = (&regrets[p], &mut current[p]);
            rm_step(r, c);
        }
        let values = [game.row_values(&current[1]), game.col_values(&current[0])];
        for p in 0..2 {
            let now: f64 = values[p].iter().zip(&current[p]).map(|(v, s)| v * s).sum();
            for (a, v) in values[p].iter().enumerate() {
                regrets[p][a] += v - now;
                sums[p][a] += current[p][a];
            }
        }
    }
    Ok(sums.map(|s| {
        let total: f64 = s.iter().sum();
        s.into_iter().map(|x| x / total).collect()
    }))
}

/// Tabular regret and strategy accumulators for one information set.
#[derive(Debug, Clone, PartialEq)]
pub struct CfrNode {
    pub key: InfoSetKey,
    pub legal_mask: ActionMask,
    pub regret_sum: [f64; 3],
    pub strategy_sum: [f64; 3],
    pub visits: u64,
}

impl CfrNode {
    pub fn new(key: InfoSetKey, legal_mask: ActionMask) -> Self {
        CfrNode {
            key,
            legal_mask,
            regret_sum: [0.0; 3],
            strategy_sum: [0.0; 3],
            visits: 0,
        }
    }

    pub fn current_strategy(&self, mask: &ActionMask) -> Result<Strategy> {
        regret_match(&self.regret_sum, mask)
    }

    /// Average strategy restricted to `mask`.
    pub fn average_strategy_in(&self, mask: &ActionMask) -> Result<Strategy> {
        normalize_positive(&self.strategy_sum, mask)
    }
}

pub fn average_strategy(node: &CfrNode) -> Strategy {
    node.average_strategy_in(&node.legal_mask)
        .unwrap_or(Strategy([1.0, 0.0, 0.0]))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeStore {
    nodes: BTreeMap<InfoSetKey, CfrNode>,
}

impl NodeStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, key: InfoSetKey) -> Option<&CfrNode> {
        self.nodes.get(&key)
    }

    /// Nodes in increasing key order.
    pub fn iter(&self) -> impl Iterator<Item = &CfrNode> {
        self.nodes.values()
    }

    /// Adds a node; a second node with the same key is rejected.
    pub fn insert(&mut self, node: CfrNode) -> Result<()> {
        if self.nodes.contains_key(&node.key) {
            return Err(Error::Config(format!("duplicate key {}", node.key)));
        }
        self.nodes.insert(node.key, node);
        Ok(())
    }

    fn entry(&mut self, key: InfoSetKey, mask: ActionMask) -> &mut CfrNode {
        let node = self.nodes.entry(key).or_insert_with(|| CfrNode::new(key, mask));
        for (seen, now) in node.legal_mask.iter_mut().zip(mask) {
            *seen |= now;
        }
        node
    }
}

struct Traversal<'a> {
    store: &'a mut NodeStore,
    schedule: DecisionSchedule,
}

impl Traversal<'_> {
    /// Plays forward under the bound patterns until the game ends or a
    /// player reaches a decision point with a real choice.
    fn walk(&mut self, mut state: GameState, mut bound: [AbstractAction; 2], reach: [f64; 2]) -> Result<[f64; 2]> {
        loop {
            if let Some(outcome) = state.terminal {
                return Ok(outcome.utilities().map(f64::from));
            }
            let p = state.to_act;
            if self.schedule.is_decision_point(&state, p) {
                let mask = legal_abstract_actions(&state, p);
                if mask_count(&mask) >= 2 {
                    return self.branch(state, bound, reach, mask);
                }
                bound[p as usize] = AbstractAction::Normal;
            }
            let action = choose_action(&state, p, bound[p as usize])?;
            state.apply_mut(action)?;
        }
    }

    fn branch(&mut self, state: GameState, bound: [AbstractAction; 2], reach: [f64; 2], mask: ActionMask) -> Result<[f64; 2]> {
        let p = state.to_act as usize;
        let opp = 1 - p;
        let key = info_set_key(&state, state.to_act);
        let sigma = self.store.entry(key, mask).current_strategy(&mask)?;

        let mut action_values = [[0.0f64; 2]; 3];
        let mut value = [0.0f64; 2];
        for a in AbstractAction::ALL.into_iter().filter(|a| mask[a.index()]) {
            let mut child = state.clone();
            let mut child_bound = bound;
            child_bound[p] = a;
            let concrete = choose_action(&child, state.to_act, a)?;
            child.apply_mut(concrete)?;
            let mut child_reach = reach;
            child_reach[p] *= sigma.prob(a);
            let v = self.walk(child, child_bound, child_reach)?;
            action_values[a.index()] = v;
            for i in 0..2 {
                value[i] += sigma.prob(a) * v[i];
            }
        }

        let node = self.store.entry(key, mask);
        for i in (0..3).filter(|&i| mask[i]) {
            node.regret_sum[i] += reach[opp] * (action_values[i][p] - value[p]);
            node.strategy_sum[i] += reach[p] * sigma.0[i];
        }
        node.visits += 1;
        Ok(value)
    }
}

/// One chance-sampled CFR pass over `deal`, updating both players. Returns
/// the expected utilities of the current profile at the root.
pub fn cfr_iteration(deal: &Deal, store: &mut NodeStore, schedule: &DecisionSchedule) -> Result<[f64; 2]> {
    let state = new_game(deal)?;
    let mut t = Traversal {
        store,
        schedule: *schedule,
    };
    t.walk(state, [AbstractAction::Normal; 2], [1.0, 1.0])
}

/// Seed of the `index`-th item of the stream rooted at `base`: the first
/// output of `ChaCha8Rng::seed_from_u64(base)` on stream `index`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.next_u64()
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub iterations: usize,
    pub epoch_size: usize,
    pub seed: u64,
    pub schedule: DecisionSchedule,
    pub benchmark: Vec<Deal>,
    pub store_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub workers: usize,
    pub eval_mode: EvalMode,
}

impl TrainConfig {
    pub fn new(iterations: usize, epoch_size: usize, seed: u64) -> Self {
        TrainConfig {
            iterations,
            epoch_size,
            seed,
            schedule: DecisionSchedule::default(),
            benchmark: Vec::new(),
            store_path: None,
            report_path: None,
            workers: 1,
            eval_mode: EvalMode::Argmax,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epoch_size == 0 {
            return Err(Error::Config("epoch size must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochReport {
    pub epoch: usize,
    pub iterations_total: usize,
    pub nodes: usize,
    /// Absent when no benchmark was supplied.
    pub exploitability: Option<f64>,
}

/// Runs `config.iterations` CFR passes, each on a fresh deal
/// `shuffle_deal(derive_seed(seed, t))`. After every `epoch_size` passes
/// (and after a trailing partial epoch) the store is evaluated on the
/// benchmark, checkpointed, and a report row is appended.
pub fn train(config: &TrainConfig, store: &mut NodeStore) -> Result<Vec<EpochReport>> {
    config.validate()?;
    let mut reports = Vec::new();
    let mut done = 0;
    while done < config.iterations {
        let epoch = reports.len() + 1;
        let end = (done + config.epoch_size).min(config.iterations);
        let wrap = |e: Error| Error::Epoch {
            epoch,
            source: Box::new(e),
        };
        for t in done..end {
            let deal = shuffle_deal(derive_seed(config.seed, t as u64));
            cfr_iteration(&deal, store, &config.schedule).map_err(wrap)?;
        }
        done = end;
        let exploitability = if config.benchmark.is_empty() {
            None
        } else {
            let opts = EvalOptions {
                mode: config.eval_mode,
                schedule: config.schedule,
                workers: config.workers,
                ..EvalOptions::default()
            };
            let report = evaluate(store, &config.benchmark, &opts).map_err(wrap)?;
            Some(report.exploitability)
        };
        reports.push(EpochReport {
            epoch,
            iterations_total: done,
            nodes: store.len(),
            exploitability,
        });
        if let Some(path) = &config.store_path {
            save_store(store, path).map_err(wrap)?;
        }
        if let Some(path) = &config.report_path {
            write_report(&reports, path).map_err(wrap)?;
        }
    }
    if reports.is_empty() {
        if let Some(path) = &config.report_path {
            write_report(&reports, path)?;
        }
        if let Some(path) = &config.store_path {
            save_store(store, path)?;
        }
    }
    Ok(reports)
}
