//! Extensive-form state machine. Each turn is split into three phases:
//! claiming the opponent's discard (0), acting on a fresh draw (1) and
//! discarding (2).

use std::fmt;

use arrayvec::ArrayVec;

use crate::error::{Error, Result};
use crate::patterns::{evaluate_win, Meld, WinPattern};
use crate::policy::AbstractAction;
use crate::tiles::{deal_initial, Deal, Hand, TileKind, Wall, HAND_SIZE, NUM_KINDS, WALL_SIZE};

pub type PlayerId = u8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// Respond to the opponent's discard.
    Claim = 0,
    /// Act on a tile just drawn from the wall.
    Draw = 1,
    Discard = 2,
}

impl Phase {
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            0 => Some(Phase::Claim),
            1 => Some(Phase::Draw),
            2 => Some(Phase::Discard),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConcreteAction {
    Pass,
    Chow(TileKind),
    Pong,
    KongExposed,
    KongConcealed(TileKind),
    Win,
    Discard(TileKind),
}

impl fmt::Display for ConcreteAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcreteAction::Pass => f.write_str("Pass"),
            ConcreteAction::Chow(b) => write!(f, "Chow({b})"),
            ConcreteAction::Pong => f.write_str("Pong"),
            ConcreteAction::KongExposed => f.write_str("KongExposed"),
            ConcreteAction::KongConcealed(k) => write!(f, "KongConcealed({k})"),
            ConcreteAction::Win => f.write_str("Win"),
            ConcreteAction::Discard(k) => write!(f, "Discard({k})"),
        }
    }
}

pub type Actions = ArrayVec<ConcreteAction, 16>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub winner: Option<PlayerId>,
    pub pattern: WinPattern,
    pub points: i32,
}

impl Outcome {
    pub fn drawn() -> Self {
        Outcome {
            winner: None,
            pattern: WinPattern::None,
            points: 0,
        }
    }

    pub fn utilities(&self) -> [i32; 2] {
        match self.winner {
            Some(w) => {
                let mut u = [-self.points; 2];
                u[w as usize] = self.points;
                u
            }
            None => [0, 0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawEnd {
    Front,
    Back,
}

/// Most discards one player can make: one per wall draw plus the opening hand.
const MAX_DISCARDS: usize = WALL_SIZE + HAND_SIZE;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub seed: u64,
    pub to_act: PlayerId,
    pub phase: Phase,
    pub hands: [Hand; 2],
    pub melds: [ArrayVec<Meld, 4>; 2],
    pub discards: [ArrayVec<TileKind, MAX_DISCARDS>; 2],
    pub wall: Wall,
    pub last_discard: Option<TileKind>,
    /// Wall draws taken so far, from either end.
    pub round: u8,
    /// Normal (front) draws taken by each player; a player's turn count.
    pub turns: [u8; 2],
    /// True right after a front draw, before the player has acted on it.
    pub turn_start: bool,
    pub terminal: Option<Outcome>,
}

/// What a transition drew from the wall, if anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Transition {
    pub draw: Option<(TileKind, DrawEnd)>,
}

/// Sets up a game and performs player 0's opening draw, leaving player 0
/// in phase 1 with 14 tiles.
pub fn new_game(deal: &Deal) -> Result<GameState> {
    let (hand0, hand1, wall) = deal_initial(deal)?;
    let mut state = GameState {
        seed: deal.seed,
        to_act: 0,
        phase: Phase::Draw,
        hands: [hand0, hand1],
        melds: Default::default(),
        discards: Default::default(),
        wall,
        last_discard: None,
        round: 0,
        turns: [0, 0],
        turn_start: false,
        terminal: None,
    };
    state.draw(DrawEnd::Front);
    Ok(state)
}

impl GameState {
    pub fn is_terminal(&self) -> bool {
        self.terminal.is_some()
    }

    pub fn opponent(&self) -> PlayerId {
        1 - self.to_act
    }

    pub fn hand(&self, player: PlayerId) -> &Hand {
        &self.hands[player as usize]
    }

    pub fn melds_of(&self, player: PlayerId) -> &[Meld] {
        &self.melds[player as usize]
    }

    /// Per-kind tile count across hands, melds, discards and the wall.
    pub fn census(&self) -> [u8; NUM_KINDS] {
        let mut counts = [0u8; NUM_KINDS];
        for p in 0..2 {
            for k in TileKind::all() {
                counts[k.index()] += self.hands[p].count(k);
                counts[k.index()] += self.melds[p].iter().map(|m| m.tiles_of(k)).sum::<u8>();
            }
            for t in &self.discards[p] {
                counts[t.index()] += 1;
            }
        }
        for t in self.wall.remaining() {
            counts[t.index()] += 1;
        }
        counts
    }

    fn draw(&mut self, end: DrawEnd) -> Option<TileKind> {
        let tile = match end {
            DrawEnd::Front => self.wall.draw_front(),
            DrawEnd::Back => self.wall.draw_back(),
        };
        match tile {
            Some(t) => {
                let p = self.to_act as usize;
                self.hands[p].add(t);
                self.round += 1;
                self.phase = Phase::Draw;
                self.turn_start = end == DrawEnd::Front;
                if end == DrawEnd::Front {
                    self.turns[p] += 1;
                }
                Some(t)
            }
            None => {
                self.terminal = Some(Outcome::drawn());
                None
            }
        }
    }

    fn win_with(&self, hand: &Hand) -> Option<WinPattern> {
        let melds = self.melds_of(self.to_act);
        match evaluate_win(hand, melds) {
            Ok(r) if r.is_win() => Some(r.pattern),
            _ => None,
        }
    }

    pub fn legal_actions(&self) -> Result<Actions> {
        if self.is_terminal() {
            return Err(Error::Terminal);
        }
        let hand = self.hand(self.to_act);
        let mut out = Actions::new();
        match self.phase {
            Phase::Claim => {
                let d = self.last_discard.ok_or_else(|| {
                    Error::InconsistentHand("claim phase without a discard".into())
                })?;
                if d.is_character() {
                    let i = d.index();
                    for base in i.saturating_sub(2)..=i.min(6) {
                        let has_others = (base..base + 3)
                            .filter(|&k| k != i)
                            .all(|k| hand.counts()[k] > 0);
                        if has_others {
                            out.push(ConcreteAction::Chow(TileKind::new(base as u8)?));
                        }
                    }
                }
                if hand.count(d) >= 2 {
                    out.push(ConcreteAction::Pong);
                }
                if hand.count(d) == 3 && !self.wall.is_empty() {
                    out.push(ConcreteAction::KongExposed);
                }
                if self.win_with(&hand.with(d)).is_some() {
                    out.push(ConcreteAction::Win);
                }
                out.push(ConcreteAction::Pass);
            }
            Phase::Draw => {
                if !self.wall.is_empty() {
                    for k in hand.kinds().filter(|&k| hand.count(k) == 4) {
                        out.push(ConcreteAction::KongConcealed(k));
                    }
                }
                if self.win_with(hand).is_some() {
                    out.push(ConcreteAction::Win);
                }
                out.push(ConcreteAction::Pass);
            }
            Phase::Discard => {
                for k in hand.kinds() {
                    out.push(ConcreteAction::Discard(k));
                }
            }
        }
        Ok(out)
    }

    /// Pure transition; `self` is left untouched.
    pub fn apply(&self, action: ConcreteAction) -> Result<GameState> {
        let mut next = self.clone();
        next.apply_mut(action)?;
        Ok(next)
    }

    /// In-place transition for search and playouts.
    pub fn apply_mut(&mut self, action: ConcreteAction) -> Result<Transition> {
        let legal = self.legal_actions()?;
        if !legal.contains(&action) {
            return Err(Error::IllegalAction {
                phase: self.phase.index(),
                player: self.to_act,
                action: action.to_string(),
            });
        }
        let p = self.to_act as usize;
        let mut tr = Transition::default();
        match (self.phase, action) {
            (Phase::Claim, ConcreteAction::Pass) => {
                self.last_discard = None;
                if let Some(t) = self.draw(DrawEnd::Front) {
                    tr.draw = Some((t, DrawEnd::Front));
                }
            }
            (Phase::Claim, ConcreteAction::Win) => {
                let d = self.seize();
                self.hands[p].add(d);
                let pattern = self.win_with(&self.hands[p]).expect("checked legal");
                self.terminal = Some(Outcome {
                    winner: Some(self.to_act),
                    pattern,
                    points: pattern.points(),
                });
            }
            (Phase::Claim, ConcreteAction::Chow(base)) => {
                let d = self.seize();
                for k in base.index()..base.index() + 3 {
                    if k != d.index() {
                        self.hands[p].remove(TileKind::new(k as u8)?, 1);
                    }
                }
                self.melds[p].push(Meld::chow(base)?);
                self.phase = Phase::Discard;
            }
            (Phase::Claim, ConcreteAction::Pong) => {
                let d = self.seize();
                self.hands[p].remove(d, 2);
                self.melds[p].push(Meld::pong(d));
                self.phase = Phase::Discard;
            }
            (Phase::Claim, ConcreteAction::KongExposed) => {
                let d = self.seize();
                self.hands[p].remove(d, 3);
                self.melds[p].push(Meld::kong(d, true));
                if let Some(t) = self.draw(DrawEnd::Back) {
                    tr.draw = Some((t, DrawEnd::Back));
                }
            }
            (Phase::Draw, ConcreteAction::KongConcealed(k)) => {
                self.hands[p].remove(k, 4);
                self.melds[p].push(Meld::kong(k, false));
                if let Some(t) = self.draw(DrawEnd::Back) {
                    tr.draw = Some((t, DrawEnd::Back));
                }
            }
            (Phase::Draw, ConcreteAction::Win) => {
                let pattern = self.win_with(&self.hands[p]).expect("checked legal");
                self.terminal = Some(Outcome {
                    winner: Some(self.to_act),
                    pattern,
                    points: pattern.points(),
                });
            }
            (Phase::Draw, ConcreteAction::Pass) => {
                self.phase = Phase::Discard;
                self.turn_start = false;
            }
            (Phase::Discard, ConcreteAction::Discard(k)) => {
                self.hands[p].remove(k, 1);
                self.discards[p].push(k);
                self.last_discard = Some(k);
                self.to_act = 1 - self.to_act;
                self.phase = Phase::Claim;
                self.turn_start = false;
            }
            _ => unreachable!("legal_actions admitted {action} in {:?}", self.phase),
        }
        Ok(tr)
    }

    /// Takes the opponent's last discard off the table.
    fn seize(&mut self) -> TileKind {
        let d = self.last_discard.take().expect("claim phase has a discard");
        let popped = self.discards[1 - self.to_act as usize].pop();
        debug_assert_eq!(popped, Some(d));
        self.turn_start = false;
        d
    }

    pub fn terminal_utility(&self) -> Result<[i32; 2]> {
        self.terminal.map(|o| o.utilities()).ok_or(Error::NotTerminal)
    }

    /// One-line summary used in diagnostics.
    pub fn snapshot(&self) -> String {
        format!(
            "round={} to_act={} phase={} hand0=[{}] hand1=[{}] last_discard={}",
            self.round,
            self.to_act,
            self.phase.index(),
            self.hands[0],
            self.hands[1],
            self.last_discard.map_or("-".to_string(), |t| t.to_string())
        )
    }
}

pub fn legal_actions(state: &GameState) -> Result<Actions> {
    state.legal_actions()
}

pub fn apply(state: &GameState, action: ConcreteAction) -> Result<GameState> {
    state.apply(action)
}

pub fn terminal_utility(state: &GameState) -> Result<[i32; 2]> {
    state.terminal_utility()
}

/// One line of a game log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Seed(u64),
    Hand { player: PlayerId, tiles: Vec<TileKind> },
    Draw { player: PlayerId, tile: TileKind, end: DrawEnd },
    Discard { player: PlayerId, tile: TileKind },
    Chow { player: PlayerId, base: TileKind },
    Pong { player: PlayerId, tile: TileKind },
    Kong { player: PlayerId, tile: TileKind, concealed: bool },
    Pass { player: PlayerId, phase: Phase },
    Policy { player: PlayerId, round: u8, pattern: AbstractAction },
    End(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GameLog {
    pub events: Vec<Event>,
}

impl GameLog {
    pub fn outcome(&self) -> Option<Outcome> {
        self.events.iter().rev().find_map(|e| match e {
            Event::End(o) => Some(*o),
            _ => None,
        })
    }

    /// Seed and both opening hands of a deal.
    pub fn header(deal: &Deal) -> GameLog {
        let t = deal.tiles();
        let mut h0 = t[..HAND_SIZE].to_vec();
        let mut h1 = t[HAND_SIZE..2 * HAND_SIZE].to_vec();
        h0.sort();
        h1.sort();
        GameLog {
            events: vec![
                Event::Seed(deal.seed),
                Event::Hand { player: 0, tiles: h0 },
                Event::Hand { player: 1, tiles: h1 },
                Event::Draw {
                    player: 0,
                    tile: t[2 * HAND_SIZE],
                    end: DrawEnd::Front,
                },
            ],
        }
    }
}

/// What a selector decided, plus the pattern it committed to if this was
/// one of its decision points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Choice {
    pub action: ConcreteAction,
    pub commit: Option<AbstractAction>,
}

impl From<ConcreteAction> for Choice {
    fn from(action: ConcreteAction) -> Self {
        Choice { action, commit: None }
    }
}

/// A deterministic action selector for one seat.
pub trait Selector {
    fn select(&mut self, state: &GameState) -> Choice;
}

impl<F> Selector for F
where
    F: FnMut(&GameState) -> ConcreteAction,
{
    fn select(&mut self, state: &GameState) -> Choice {
        self(state).into()
    }
}

fn events_for(state: &GameState, action: ConcreteAction, tr: Transition, out: &mut Vec<Event>) {
    let player = state.to_act;
    match action {
        ConcreteAction::Pass => out.push(Event::Pass {
            player,
            phase: state.phase,
        }),
        ConcreteAction::Chow(base) => out.push(Event::Chow { player, base }),
        ConcreteAction::Pong => out.push(Event::Pong {
            player,
            tile: state.last_discard.expect("claim"),
        }),
        ConcreteAction::KongExposed => out.push(Event::Kong {
            player,
            tile: state.last_discard.expect("claim"),
            concealed: false,
        }),
        ConcreteAction::KongConcealed(tile) => out.push(Event::Kong {
            player,
            tile,
            concealed: true,
        }),
        ConcreteAction::Discard(tile) => out.push(Event::Discard { player, tile }),
        ConcreteAction::Win => {}
    }
    if let Some((tile, end)) = tr.draw {
        out.push(Event::Draw { player, tile, end });
    }
}

/// Plays from `state` to the end. Returns terminal utilities and the events
/// of every step taken.
pub fn playout<A: Selector + ?Sized, B: Selector + ?Sized>(
    state: &GameState,
    policy0: &mut A,
    policy1: &mut B,
) -> Result<([i32; 2], GameLog)> {
    let mut state = state.clone();
    let mut log = GameLog::default();
    while state.terminal.is_none() {
        let choice = if state.to_act == 0 {
            policy0.select(&state)
        } else {
            policy1.select(&state)
        };
        if let Some(pattern) = choice.commit {
            log.events.push(Event::Policy {
                player: state.to_act,
                round: state.round,
                pattern,
            });
        }
        let before = state.clone();
        let tr = state.apply_mut(choice.action).map_err(|_| Error::SelectorFault {
            player: before.to_act,
            action: choice.action.to_string(),
            snapshot: before.snapshot(),
        })?;
        events_for(&before, choice.action, tr, &mut log.events);
    }
    let outcome = state.terminal.expect("loop exits on terminal");
    log.events.push(Event::End(outcome));
    Ok((outcome.utilities(), log))
}

/// Full game from a deal, with the seed/hand header in the log.
pub fn play_deal<A: Selector + ?Sized, B: Selector + ?Sized>(
    deal: &Deal,
    policy0: &mut A,
    policy1: &mut B,
) -> Result<([i32; 2], GameLog)> {
    let state = new_game(deal)?;
    let (u, body) = playout(&state, policy0, policy1)?;
    let mut log = GameLog::header(deal);
    log.events.extend(body.events);
    Ok((u, log))
}
