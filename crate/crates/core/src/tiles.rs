//! Tile universe for the two-player game: nine Characters, four Winds and
//! three Dragons, four copies each, 64 tiles in total.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const NUM_KINDS: usize = 16;
pub const COPIES: u8 = 4;
pub const NUM_TILES: usize = NUM_KINDS * COPIES as usize;
pub const HAND_SIZE: usize = 13;
pub const WALL_SIZE: usize = NUM_TILES - 2 * HAND_SIZE;

const NAMES: [&str; NUM_KINDS] = [
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "E", "S", "W", "N", "Rd", "Gn", "Wh",
];

/// One of the 16 tile kinds. Copies of a kind are indistinguishable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileKind(u8);

impl TileKind {
    pub const EAST: TileKind = TileKind(9);
    pub const SOUTH: TileKind = TileKind(10);
    pub const WEST: TileKind = TileKind(11);
    pub const NORTH: TileKind = TileKind(12);
    pub const RED: TileKind = TileKind(13);
    pub const GREEN: TileKind = TileKind(14);
    pub const WHITE: TileKind = TileKind(15);

    pub fn new(index: u8) -> Result<Self> {
        if (index as usize) < NUM_KINDS {
            Ok(TileKind(index))
        } else {
            Err(Error::MalformedDeal(format!("tile index {index} out of range")))
        }
    }

    /// Character tile with face value `1..=9`.
    pub fn character(value: u8) -> Self {
        assert!((1..=9).contains(&value), "character value {value}");
        TileKind(value - 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_character(self) -> bool {
        self.0 < 9
    }

    pub fn is_wind(self) -> bool {
        (9..13).contains(&self.0)
    }

    pub fn is_dragon(self) -> bool {
        self.0 >= 13
    }

    pub fn is_honor(self) -> bool {
        self.0 >= 9
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn all() -> impl Iterator<Item = TileKind> + Clone {
        (0..NUM_KINDS as u8).map(TileKind)
    }
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Concealed tiles as a multiset over kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Hand {
    counts: [u8; NUM_KINDS],
}

impl Hand {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: [u8; NUM_KINDS]) -> Result<Self> {
        if let Some(k) = counts.iter().position(|&c| c > COPIES) {
            return Err(Error::InconsistentHand(format!(
                "{} copies of {}",
                counts[k],
                TileKind(k as u8)
            )));
        }
        let total: u32 = counts.iter().map(|&c| c as u32).sum();
        if total > 14 {
            return Err(Error::InconsistentHand(format!("{total} tiles in hand")));
        }
        Ok(Hand { counts })
    }

    /// Builds a hand from `(kind, count)` pairs; panics on invalid input.
    pub fn from_pairs(pairs: &[(TileKind, u8)]) -> Self {
        let mut counts = [0u8; NUM_KINDS];
        for &(k, c) in pairs {
            counts[k.index()] += c;
        }
        Hand::from_counts(counts).expect("valid hand literal")
    }

    pub fn from_tiles(tiles: &[TileKind]) -> Result<Self> {
        let mut counts = [0u8; NUM_KINDS];
        for t in tiles {
            counts[t.index()] += 1;
        }
        Hand::from_counts(counts)
    }

    pub fn counts(&self) -> &[u8; NUM_KINDS] {
        &self.counts
    }

    pub fn count(&self, kind: TileKind) -> u8 {
        self.counts[kind.index()]
    }

    pub fn len(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn add(&mut self, kind: TileKind) {
        debug_assert!(self.counts[kind.index()] < COPIES);
        self.counts[kind.index()] += 1;
    }

    pub fn remove(&mut self, kind: TileKind, n: u8) -> bool {
        let c = &mut self.counts[kind.index()];
        if *c < n {
            return false;
        }
        *c -= n;
        true
    }

    pub fn with(&self, kind: TileKind) -> Hand {
        let mut h = *self;
        h.add(kind);
        h
    }

    pub fn without(&self, kind: TileKind) -> Hand {
        let mut h = *self;
        h.remove(kind, 1);
        h
    }

    /// Kinds with at least one tile, in index order.
    pub fn kinds(&self) -> impl Iterator<Item = TileKind> + '_ {
        TileKind::all().filter(move |k| self.count(*k) > 0)
    }

    /// Tiles in index order, repeated by count.
    pub fn tiles(&self) -> Vec<TileKind> {
        TileKind::all()
            .flat_map(|k| std::iter::repeat_n(k, self.count(k) as usize))
            .collect()
    }
}

impl fmt::Display for Hand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.tiles().iter().map(|t| t.name()).collect();
        f.pad(&names.join(" "))
    }
}

/// Undrawn tiles. Normal draws come from the front, Kong replacements from the back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wall {
    tiles: [TileKind; WALL_SIZE],
    front: u8,
    back: u8,
}

impl Wall {
    pub fn from_tiles(tiles: &[TileKind]) -> Result<Self> {
        if tiles.len() > WALL_SIZE {
            return Err(Error::MalformedDeal(format!(
                "wall of {} tiles exceeds {WALL_SIZE}",
                tiles.len()
            )));
        }
        let mut buf = [TileKind(0); WALL_SIZE];
        buf[..tiles.len()].copy_from_slice(tiles);
        Ok(Wall {
            tiles: buf,
            front: 0,
            back: tiles.len() as u8,
        })
    }

    pub fn len(&self) -> usize {
        (self.back - self.front) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.front == self.back
    }

    pub fn remaining(&self) -> &[TileKind] {
        &self.tiles[self.front as usize..self.back as usize]
    }

    pub fn draw_front(&mut self) -> Option<TileKind> {
        if self.is_empty() {
            return None;
        }
        let t = self.tiles[self.front as usize];
        self.front += 1;
        Some(t)
    }

    pub fn draw_back(&mut self) -> Option<TileKind> {
        if self.is_empty() {
            return None;
        }
        self.back -= 1;
        Some(self.tiles[self.back as usize])
    }
}

/// A shuffled 64-tile permutation together with the seed that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Deal {
    pub seed: u64,
    tiles: [TileKind; NUM_TILES],
}

/// Canonical kind-major ordering: four C1, four C2, ..., four White.
fn canonical_tiles() -> [TileKind; NUM_TILES] {
    let mut tiles = [TileKind(0); NUM_TILES];
    for (i, t) in tiles.iter_mut().enumerate() {
        *t = TileKind((i / COPIES as usize) as u8);
    }
    tiles
}

/// Uniform integer in `0..n` by rejection on raw 64-bit outputs.
fn bounded(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    let limit = (u64::MAX / n) * n;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % n;
        }
    }
}

/// Shuffles the 64-tile multiset.
///
/// Generator contract (v1): `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`,
/// then a Fisher-Yates pass over the canonical kind-major order for
/// `i = 63 down to 1`, swapping position `i` with `j = bounded(i + 1)`, where
/// `bounded(n)` draws `next_u64()` values until one is below
/// `floor(u64::MAX / n) * n` and returns it modulo `n`.
pub fn shuffle_deal(seed: u64) -> Deal {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tiles = canonical_tiles();
    for i in (1..NUM_TILES).rev() {
        let j = bounded(&mut rng, i as u64 + 1) as usize;
        tiles.swap(i, j);
    }
    Deal { seed, tiles }
}

impl Deal {
    pub fn new(seed: u64, tiles: &[TileKind]) -> Result<Self> {
        if tiles.len() != NUM_TILES {
            return Err(Error::MalformedDeal(format!(
                "expected {NUM_TILES} tiles, got {}",
                tiles.len()
            )));
        }
        let mut counts = [0u8; NUM_KINDS];
        for t in tiles {
            counts[t.index()] += 1;
        }
        if let Some(k) = counts.iter().position(|&c| c != COPIES) {
            return Err(Error::MalformedDeal(format!(
                "{} copies of {}",
                counts[k],
                TileKind(k as u8)
            )));
        }
        let mut buf = [TileKind(0); NUM_TILES];
        buf.copy_from_slice(tiles);
        Ok(Deal { seed, tiles: buf })
    }

    /// Builds a deal from two 13-tile hands and the wall order; used to pin
    /// specific scenarios.
    pub fn from_parts(seed: u64, hand0: &[TileKind], hand1: &[TileKind], wall: &[TileKind]) -> Result<Self> {
        if hand0.len() != HAND_SIZE || hand1.len() != HAND_SIZE {
            return Err(Error::MalformedDeal("hands must hold 13 tiles".into()));
        }
        let tiles: Vec<TileKind> = hand0.iter().chain(hand1).chain(wall).copied().collect();
        Deal::new(seed, &tiles)
    }

    pub fn tiles(&self) -> &[TileKind] {
        &self.tiles
    }

    pub fn histogram(&self) -> [u8; NUM_KINDS] {
        let mut counts = [0u8; NUM_KINDS];
        for t in &self.tiles {
            counts[t.index()] += 1;
        }
        counts
    }

    /// One line of 64 space-separated kind indices.
    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self.tiles.iter().map(|t| t.index().to_string()).collect();
        parts.join(" ")
    }

    pub fn parse_line(seed: u64, line: &str) -> Result<Self> {
        let tiles = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<u8>()
                    .map_err(|_| Error::MalformedDeal(format!("bad tile index `{tok}`")))
                    .and_then(TileKind::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Deal::new(seed, &tiles)
    }
}

impl FromStr for Deal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Deal::parse_line(0, s)
    }
}

/// First 13 tiles to player 0, next 13 to player 1, the remaining 38 form the wall.
pub fn deal_initial(deal: &Deal) -> Result<(Hand, Hand, Wall)> {
    let hand0 = Hand::from_tiles(&deal.tiles[..HAND_SIZE])?;
    let hand1 = Hand::from_tiles(&deal.tiles[HAND_SIZE..2 * HAND_SIZE])?;
    let wall = Wall::from_tiles(&deal.tiles[2 * HAND_SIZE..])?;
    Ok((hand0, hand1, wall))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityBounds {
    /// Distinct shuffles of the 64-tile multiset, `64! / (4!)^16`.
    pub deal_count: BigUint,
    /// Leaves of the all-Pass game tree, `14^38`.
    pub tree_leaves_lb: BigUint,
    /// Leaves with three abstract actions per round, `3^38`.
    pub abstract_leaves: BigUint,
}

pub fn complexity_bounds() -> ComplexityBounds {
    // Multinomial as a product of binomials: C(64,4) * C(60,4) * ... * C(4,4).
    let mut deal_count = BigUint::from(1u32);
    let mut remaining = NUM_TILES as u64;
    for _ in 0..NUM_KINDS {
        let n = remaining;
        let choose4 = n * (n - 1) * (n - 2) * (n - 3) / 24;
        deal_count *= BigUint::from(choose4);
        remaining -= COPIES as u64;
    }
    ComplexityBounds {
        deal_count,
        tree_leaves_lb: BigUint::from(14u32).pow(WALL_SIZE as u32),
        abstract_leaves: BigUint::from(3u32).pow(WALL_SIZE as u32),
    }
}
