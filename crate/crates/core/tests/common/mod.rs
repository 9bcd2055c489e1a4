//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cfrp::abstraction::{info_set_key, legal_abstract_actions, ActionMask, DecisionSchedule, InfoSetKey};
use cfrp::cfr::NodeStore;
use cfrp::engine::{new_game, GameState};
use cfrp::patterns::WinPattern;
use cfrp::policy::{choose_action, AbstractAction};
use cfrp::tiles::{Deal, NUM_KINDS};
use num_bigint::BigUint;

// ---------------------------------------------------------------------------
// Win checking by exhaustive decomposition.

fn remove_pongs_only(c: &mut [u8; NUM_KINDS]) -> bool {
    let Some(i) = c.iter().position(|&n| n > 0) else {
        return true;
    };
    if c[i] < 3 {
        return false;
    }
    c[i] -= 3;
    let ok = remove_pongs_only(c);
    c[i] += 3;
    ok
}

fn remove_sets(c: &mut [u8; NUM_KINDS]) -> bool {
    let Some(i) = c.iter().position(|&n| n > 0) else {
        return true;
    };
    if c[i] >= 3 {
        c[i] -= 3;
        let ok = remove_sets(c);
        c[i] += 3;
        if ok {
            return true;
        }
    }
    if i <= 6 && c[i + 1] > 0 && c[i + 2] > 0 {
        for k in i..i + 3 {
            c[k] -= 1;
        }
        let ok = remove_sets(c);
        for k in i..i + 3 {
            c[k] += 1;
        }
        if ok {
            return true;
        }
    }
    false
}

fn seven_pairs(c: &mut [u8; NUM_KINDS], left: u8) -> bool {
    if left == 0 {
        return c.iter().all(|&n| n == 0);
    }
    let Some(i) = c.iter().position(|&n| n > 0) else {
        return false;
    };
    if c[i] < 2 {
        return false;
    }
    c[i] -= 2;
    let ok = seven_pairs(c, left - 1);
    c[i] += 2;
    ok
}

fn with_some_eye(c: &[u8; NUM_KINDS], rest: fn(&mut [u8; NUM_KINDS]) -> bool) -> bool {
    (0..NUM_KINDS).any(|e| {
        if c[e] < 2 {
            return false;
        }
        let mut d = *c;
        d[e] -= 2;
        rest(&mut d)
    })
}

/// Best pattern of a fully concealed 14-tile hand, by search over every
/// decomposition.
pub fn brute_force_win(counts: &[u8; NUM_KINDS]) -> WinPattern {
    assert_eq!(counts.iter().map(|&n| n as usize).sum::<usize>(), 14);
    let mut c = *counts;
    if seven_pairs(&mut c, 7) {
        WinPattern::QiDui
    } else if with_some_eye(counts, remove_pongs_only) {
        WinPattern::PongPongHu
    } else if with_some_eye(counts, remove_sets) {
        WinPattern::Normal
    } else {
        WinPattern::None
    }
}

// ---------------------------------------------------------------------------
// Multinomial by factorials.

pub fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k))
}

// ---------------------------------------------------------------------------
// Zero-sum matrix games by linear programming.

/// Value and maximin row mix of the zero-sum game `a` (row maximises),
/// from the tableau simplex on `max 1.y s.t. A'y <= 1, y >= 0` where `A'`
/// is `a` shifted to be positive.
pub fn solve_zero_sum(a: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let m = a.len();
    let n = a[0].len();
    let min = a.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    // Tableau rows: m constraints, columns: n structural + m slack + rhs.
    let width = n + m + 1;
    let mut t = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        for j in 0..n {
            t[i][j] = a[i][j] + shift;
        }
        t[i][n + i] = 1.0;
        t[i][width - 1] = 1.0;
    }
    for j in 0..n {
        t[m][j] = -1.0;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        // Bland's rule keeps the method from cycling.
        let Some(col) = (0..width - 1).find(|&j| t[m][j] < -1e-12) else {
            break;
        };
        let mut row = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][col] > 1e-12 {
                let ratio = t[i][width - 1] / t[i][col];
                if ratio < best - 1e-12 || (ratio <= best + 1e-12 && row.is_some_and(|r: usize| basis[i] < basis[r])) {
                    best = ratio;
                    row = Some(i);
                }
            }
        }
        let row = row.expect("bounded program");
        let p = t[row][col];
        for v in t[row].iter_mut() {
            *v /= p;
        }
        for i in 0..=m {
            if i != row && t[i][col].abs() > 0.0 {
                let f = t[i][col];
                for j in 0..width {
                    t[i][j] -= f * t[row][j];
                }
            }
        }
        basis[row] = col;
    }
    let total = t[m][width - 1];
    let value = 1.0 / total - shift;
    // Row mix from the duals: reduced costs of the slack columns.
    let x: Vec<f64> = (0..m).map(|i| t[m][n + i] / total).collect();
    (value, x)
}

// ---------------------------------------------------------------------------
// The abstract game induced by one deal.

#[derive(Debug, Clone)]
pub enum Tree {
    Leaf([f64; 2]),
    Decision {
        player: usize,
        key: InfoSetKey,
        mask: ActionMask,
        children: Vec<(AbstractAction, Tree)>,
    },
}

fn build(mut state: GameState, mut bound: [AbstractAction; 2], schedule: &DecisionSchedule) -> Tree {
    loop {
        if let Some(o) = state.terminal {
            return Tree::Leaf(o.utilities().map(f64::from));
        }
        let p = state.to_act;
        if schedule.is_decision_point(&state, p) {
            let mask = legal_abstract_actions(&state, p);
            if mask.iter().filter(|&&b| b).count() >= 2 {
                let children = AbstractAction::ALL
                    .into_iter()
                    .filter(|a| mask[a.index()])
                    .map(|a| {
                        let mut child = state.clone();
                        child.apply_mut(choose_action(&state, p, a).unwrap()).unwrap();
                        let mut b = bound;
                        b[p as usize] = a;
                        (a, build(child, b, schedule))
                    })
                    .collect();
                return Tree::Decision {
                    player: p as usize,
                    key: info_set_key(&state, p),
                    mask,
                    children,
                };
            }
            bound[p as usize] = AbstractAction::Normal;
        }
        let a = choose_action(&state, p, bound[p as usize]).unwrap();
        state.apply_mut(a).unwrap();
    }
}

pub fn abstract_tree(deal: &Deal, schedule: &DecisionSchedule) -> Tree {
    build(new_game(deal).unwrap(), [AbstractAction::Normal; 2], schedule)
}

impl Tree {
    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Decision { children, .. } => children.iter().map(|(_, c)| c.leaves()).sum(),
        }
    }

    /// Legal actions of every key of `player`.
    pub fn keys(&self, player: usize, out: &mut BTreeMap<InfoSetKey, BTreeSet<AbstractAction>>) {
        if let Tree::Decision { player: p, key, children, .. } = self {
            if *p == player {
                out.entry(*key).or_default().extend(children.iter().map(|(a, _)| *a));
            }
            for (_, c) in children {
                c.keys(player, out);
            }
        }
    }

    /// Whether every key of every player is reached with one and the same
    /// history of that player's own (key, action) choices.
    pub fn has_perfect_recall(&self) -> bool {
        fn walk(t: &Tree, own: &mut [Vec<(InfoSetKey, AbstractAction)>; 2], seen: &mut BTreeMap<(usize, InfoSetKey), Vec<(InfoSetKey, AbstractAction)>>) -> bool {
            let Tree::Decision { player, key, children, .. } = t else {
                return true;
            };
            let hist = own[*player].clone();
            if let Some(prev) = seen.insert((*player, *key), hist.clone()) {
                if prev != hist {
                    return false;
                }
            }
            for (a, c) in children {
                own[*player].push((*key, *a));
                let ok = walk(c, own, seen);
                own[*player].pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        walk(self, &mut [Vec::new(), Vec::new()], &mut BTreeMap::new())
    }

    /// Player-0 utility when each player follows a pure assignment.
    pub fn pure_value(&self, plans: &[BTreeMap<InfoSetKey, AbstractAction>; 2]) -> f64 {
        match self {
            Tree::Leaf(u) => u[0],
            Tree::Decision { player, key, children, .. } => {
                let choice = plans[*player][key];
                children.iter().find(|(a, _)| *a == choice).unwrap().1.pure_value(plans)
            }
        }
    }

    /// Player-0 utility of the behaviour profile `probs`.
    pub fn behaviour_value(&self, probs: &dyn Fn(InfoSetKey, &ActionMask) -> [f64; 3]) -> f64 {
        match self {
            Tree::Leaf(u) => u[0],
            Tree::Decision { key, mask, children, .. } => {
                let p = probs(*key, mask);
                children.iter().map(|(a, c)| p[a.index()] * c.behaviour_value(probs)).sum()
            }
        }
    }
}

/// Every pure assignment of actions to the given keys.
pub fn pure_plans(keys: &BTreeMap<InfoSetKey, BTreeSet<AbstractAction>>) -> Vec<BTreeMap<InfoSetKey, AbstractAction>> {
    let mut plans = vec![BTreeMap::new()];
    for (k, acts) in keys {
        plans = plans
            .into_iter()
            .flat_map(|p| {
                acts.iter().map(move |a| {
                    let mut q = p.clone();
                    q.insert(*k, *a);
                    q
                })
            })
            .collect();
    }
    plans
}

/// Normal-form payoff matrix (player 0 rows) of the deal's abstract game.
pub fn payoff_matrix(tree: &Tree) -> Vec<Vec<f64>> {
    let plans: Vec<_> = (0..2)
        .map(|p| {
            let mut keys = BTreeMap::new();
            tree.keys(p, &mut keys);
            pure_plans(&keys)
        })
        .collect();
    plans[0]
        .iter()
        .map(|r| {
            plans[1]
                .iter()
                .map(|c| tree.pure_value(&[r.clone(), c.clone()]))
                .collect()
        })
        .collect()
}

/// Player-0 utility of the store's average strategies on `tree`.
pub fn average_profile_value(tree: &Tree, store: &NodeStore) -> f64 {
    tree.behaviour_value(&|key, mask| match store.get(key) {
        Some(node) => node.average_strategy_in(mask).unwrap().0,
        None => {
            let n = mask.iter().filter(|&&b| b).count() as f64;
            mask.map(|b| if b { 1.0 / n } else { 0.0 })
        }
    })
}
