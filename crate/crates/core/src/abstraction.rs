//! Upper level of the policy hierarchy: information-set features, their
//! 20-bit key, abstract-action legality and the decision schedule.
//!
//! Key layout:
//!
//! | bits  | field                          | range |
//! |-------|--------------------------------|-------|
//! | 0-5   | round (wall draws so far)      | 0-38  |
//! | 6-8   | concealed pairs                | 0-6   |
//! | 9-11  | pongs/kongs (concealed+melded) | 0-4   |
//! | 12-15 | character tiles owned          | 0-14  |
//! | 16-19 | wind tiles owned               | 0-14  |

use std::fmt;
use std::str::FromStr;

use crate::engine::{GameState, Phase, PlayerId};
use crate::error::{Error, Result};
use crate::patterns::MeldKind;
use crate::policy::AbstractAction;
use crate::tiles::{TileKind, WALL_SIZE};

pub const MAX_PAIRS: u8 = 6;
pub const MAX_PONGS: u8 = 4;
pub const MAX_SUIT_TILES: u8 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Features {
    pub round: u8,
    pub pairs: u8,
    pub pongs_kongs: u8,
    pub character_tiles: u8,
    pub wind_tiles: u8,
}

impl Features {
    pub fn new(round: u8, pairs: u8, pongs_kongs: u8, character_tiles: u8, wind_tiles: u8) -> Self {
        Features {
            round,
            pairs,
            pongs_kongs,
            character_tiles,
            wind_tiles,
        }
    }

    pub fn in_range(&self) -> bool {
        self.round as usize <= WALL_SIZE
            && self.pairs <= MAX_PAIRS
            && self.pongs_kongs <= MAX_PONGS
            && self.character_tiles <= MAX_SUIT_TILES
            && self.wind_tiles <= MAX_SUIT_TILES
    }
}

impl fmt::Display for Features {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "round={} pairs={} pongs={} characters={} winds={}",
            self.round, self.pairs, self.pongs_kongs, self.character_tiles, self.wind_tiles
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoSetKey(u32);

impl InfoSetKey {
    pub const BITS: u32 = 20;

    pub fn new(value: u32) -> Result<Self> {
        if value >> Self::BITS != 0 {
            return Err(Error::FeatureRange(format!("key {value} exceeds 20 bits")));
        }
        Ok(InfoSetKey(value))
    }

    pub fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for InfoSetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for InfoSetKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .parse::<u32>()
            .map_err(|_| Error::FeatureRange(format!("bad key `{s}`")))?;
        InfoSetKey::new(v)
    }
}

pub fn encode(f: &Features) -> Result<InfoSetKey> {
    if !f.in_range() {
        return Err(Error::FeatureRange(format!("{f}")));
    }
    Ok(InfoSetKey(
        f.round as u32
            | (f.pairs as u32) << 6
            | (f.pongs_kongs as u32) << 9
            | (f.character_tiles as u32) << 12
            | (f.wind_tiles as u32) << 16,
    ))
}

pub fn decode(key: InfoSetKey) -> Features {
    let v = key.0;
    Features {
        round: (v & 0x3f) as u8,
        pairs: (v >> 6 & 0x7) as u8,
        pongs_kongs: (v >> 9 & 0x7) as u8,
        character_tiles: (v >> 12 & 0xf) as u8,
        wind_tiles: (v >> 16 & 0xf) as u8,
    }
}

/// Features visible to `player`: own concealed tiles, own melds and the
/// round counter. Nothing about the opponent or the wall is read.
///
/// A concealed count of 2 is a pair; 3 or 4 counts as one Pong/Kong and no
/// pair. Fields are clamped to their ranges.
pub fn extract_features(state: &GameState, player: PlayerId) -> Features {
    let hand = state.hand(player);
    let melds = state.melds_of(player);
    let pairs = hand.counts().iter().filter(|&&c| c == 2).count() as u8;
    let concealed_sets = hand.counts().iter().filter(|&&c| c >= 3).count() as u8;
    let melded_sets = melds.iter().filter(|m| m.kind != MeldKind::Chow).count() as u8;
    let owned = |pred: fn(TileKind) -> bool| -> u8 {
        TileKind::all()
            .filter(|&k| pred(k))
            .map(|k| hand.count(k) + melds.iter().map(|m| m.tiles_of(k)).sum::<u8>())
            .sum()
    };
    Features {
        round: state.round.min(WALL_SIZE as u8),
        pairs: pairs.min(MAX_PAIRS),
        pongs_kongs: (concealed_sets + melded_sets).min(MAX_PONGS),
        character_tiles: owned(TileKind::is_character).min(MAX_SUIT_TILES),
        wind_tiles: owned(TileKind::is_wind).min(MAX_SUIT_TILES),
    }
}

pub fn info_set_key(state: &GameState, player: PlayerId) -> InfoSetKey {
    encode(&extract_features(state, player)).expect("clamped features are in range")
}

/// Legality of `[Normal, PongPongHu, QiDui]` for `player`.
pub type ActionMask = [bool; 3];

pub fn legal_abstract_actions(state: &GameState, player: PlayerId) -> ActionMask {
    let melds = state.melds_of(player);
    [
        true,
        melds.iter().all(|m| m.kind != MeldKind::Chow),
        melds.is_empty(),
    ]
}

pub fn mask_count(mask: &ActionMask) -> usize {
    mask.iter().filter(|&&b| b).count()
}

pub fn mask_actions(mask: &ActionMask) -> impl Iterator<Item = AbstractAction> + '_ {
    AbstractAction::ALL.into_iter().filter(|a| mask[a.index()])
}

/// Turns (counted per player as front draws) at whose start the abstract
/// pattern is re-chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecisionSchedule {
    pub turns: [u8; 3],
}

impl Default for DecisionSchedule {
    fn default() -> Self {
        DecisionSchedule { turns: [1, 7, 13] }
    }
}

impl DecisionSchedule {
    pub fn new(turns: [u8; 3]) -> Result<Self> {
        if turns[0] == 0 || !(turns[0] < turns[1] && turns[1] < turns[2]) {
            return Err(Error::Config(format!(
                "decision turns must be increasing and positive, got {turns:?}"
            )));
        }
        Ok(DecisionSchedule { turns })
    }

    pub fn is_decision_point(&self, state: &GameState, player: PlayerId) -> bool {
        state.terminal.is_none()
            && state.to_act == player
            && state.phase == Phase::Draw
            && state.turn_start
            && self.turns.contains(&state.turns[player as usize])
    }
}

impl FromStr for DecisionSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u8>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Config(format!("bad decision turns `{s}`")))?;
        let turns: [u8; 3] = parts
            .try_into()
            .map_err(|_| Error::Config(format!("expected three decision turns, got `{s}`")))?;
        DecisionSchedule::new(turns)
    }
}

/// Decision point under the default `{1, 7, 13}` schedule.
pub fn is_decision_point(state: &GameState, player: PlayerId) -> bool {
    DecisionSchedule::default().is_decision_point(state, player)
}
