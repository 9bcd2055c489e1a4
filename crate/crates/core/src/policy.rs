//! Greedy executors that turn a committed winning pattern into concrete
//! moves.

use std::fmt;

use crate::abstraction::DecisionSchedule;
use crate::engine::{Choice, ConcreteAction, GameState, Phase, PlayerId, Selector};
use crate::error::{Error, Result};
use crate::patterns::{acceptance_count, shanten, Meld, MeldKind, SHANTEN_IMPOSSIBLE};
use crate::tiles::{Hand, TileKind};

/// Winning pattern a player commits to. The index order is fixed and shared
/// by every regret/strategy vector and file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbstractAction {
    Normal = 0,
    PongPongHu = 1,
    QiDui = 2,
}

impl AbstractAction {
    pub const ALL: [AbstractAction; 3] = [
        AbstractAction::Normal,
        AbstractAction::PongPongHu,
        AbstractAction::QiDui,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            AbstractAction::Normal => "normal",
            AbstractAction::PongPongHu => "pongpong",
            AbstractAction::QiDui => "qidui",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for AbstractAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

fn with_meld(melds: &[Meld], meld: Meld) -> Vec<Meld> {
    let mut v = melds.to_vec();
    v.push(meld);
    v
}

/// Hand and melds after claiming `action` on `discard`.
fn after_claim(hand: &Hand, melds: &[Meld], discard: TileKind, action: ConcreteAction) -> Option<(Hand, Vec<Meld>)> {
    let mut h = *hand;
    let meld = match action {
        ConcreteAction::Pong => {
            h.remove(discard, 2);
            Meld::pong(discard)
        }
        ConcreteAction::KongExposed => {
            h.remove(discard, 3);
            Meld::kong(discard, true)
        }
        ConcreteAction::Chow(base) => {
            for k in base.index()..base.index() + 3 {
                if k != discard.index() {
                    h.remove(TileKind::new(k as u8).ok()?, 1);
                }
            }
            Meld::chow(base).ok()?
        }
        _ => return None,
    };
    Some((h, with_meld(melds, meld)))
}

fn claim_rank(action: ConcreteAction) -> u8 {
    match action {
        ConcreteAction::KongExposed => 0,
        ConcreteAction::Pong => 1,
        _ => 2,
    }
}

/// Deterministic executor for `pattern`.
///
/// - Win is taken whenever legal.
/// - A Pong/Kong (or, under Normal only, a Chow) is taken when it does not
///   raise shanten for `pattern`; among several, the lowest resulting
///   shanten wins, then Kong over Pong over Chow, then the lowest Chow base.
///   Concealed Kongs are never declared under QiDui.
/// - Discards minimise post-discard shanten, then maximise acceptance, then
///   prefer an isolated honor, then the lowest kind index.
pub fn choose_action(state: &GameState, player: PlayerId, pattern: AbstractAction) -> Result<ConcreteAction> {
    if state.to_act != player {
        return Err(Error::IllegalAction {
            phase: state.phase.index(),
            player,
            action: "choose_action out of turn".into(),
        });
    }
    let legal = state.legal_actions()?;
    if legal.contains(&ConcreteAction::Win) {
        return Ok(ConcreteAction::Win);
    }
    let hand = state.hand(player);
    let melds = state.melds_of(player);
    match state.phase {
        Phase::Claim => {
            let discard = state.last_discard.expect("claim phase has a discard");
            let before = shanten(hand, melds, pattern);
            let mut best: Option<(i32, u8, ConcreteAction)> = None;
            for &a in &legal {
                if matches!(a, ConcreteAction::Chow(_)) && pattern != AbstractAction::Normal {
                    continue;
                }
                let Some((h, m)) = after_claim(hand, melds, discard, a) else {
                    continue;
                };
                let s = shanten(&h, &m, pattern);
                let key = (s, claim_rank(a), a);
                if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
            Ok(match best {
                Some((s, _, a)) if s <= before && s < SHANTEN_IMPOSSIBLE => a,
                _ => ConcreteAction::Pass,
            })
        }
        Phase::Draw => {
            if pattern == AbstractAction::QiDui {
                return Ok(ConcreteAction::Pass);
            }
            let before = shanten(hand, melds, pattern);
            let mut best: Option<(i32, ConcreteAction)> = None;
            for &a in &legal {
                if let ConcreteAction::KongConcealed(k) = a {
                    let mut h = *hand;
                    h.remove(k, 4);
                    let s = shanten(&h, &with_meld(melds, Meld::kong(k, false)), pattern);
                    if best.is_none_or(|b| s < b.0) {
                        best = Some((s, a));
                    }
                }
            }
            Ok(match best {
                Some((s, a)) if s <= before && s < SHANTEN_IMPOSSIBLE => a,
                _ => ConcreteAction::Pass,
            })
        }
        Phase::Discard => Ok(ConcreteAction::Discard(best_discard(hand, melds, pattern))),
    }
}

/// The discard chosen by [`choose_action`] in phase 2.
pub fn best_discard(hand: &Hand, melds: &[Meld], pattern: AbstractAction) -> TileKind {
    let scored: Vec<(i32, TileKind)> = hand
        .kinds()
        .map(|k| (shanten(&hand.without(k), melds, pattern), k))
        .collect();
    let min = scored.iter().map(|s| s.0).min().expect("non-empty hand");
    scored
        .into_iter()
        .filter(|s| s.0 == min)
        .map(|(_, k)| {
            let rest = hand.without(k);
            let acceptance = acceptance_count(&rest, melds, pattern);
            let isolated_honor = k.is_honor() && hand.count(k) == 1;
            (std::cmp::Reverse(acceptance), !isolated_honor, k)
        })
        .min()
        .map(|(_, _, k)| k)
        .expect("non-empty hand")
}

/// Whether any of the player's melds is a Chow.
pub fn has_chow(melds: &[Meld]) -> bool {
    melds.iter().any(|m| m.kind == MeldKind::Chow)
}

/// Plays a single fixed pattern for the whole game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPatternAgent {
    pub pattern: AbstractAction,
    pub schedule: DecisionSchedule,
}

pub fn fixed_pattern_agent(pattern: AbstractAction) -> FixedPatternAgent {
    FixedPatternAgent {
        pattern,
        schedule: DecisionSchedule::default(),
    }
}

impl Selector for FixedPatternAgent {
    fn select(&mut self, state: &GameState) -> Choice {
        let player = state.to_act;
        let action = choose_action(state, player, self.pattern).expect("non-terminal state");
        let commit = self
            .schedule
            .is_decision_point(state, player)
            .then_some(self.pattern);
        Choice { action, commit }
    }
}
