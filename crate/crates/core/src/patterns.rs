//! Winning-hand recognition for the three scored patterns and the
//! pattern-distance metrics (shanten, acceptance) used by the heuristic
//! executors.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::policy::AbstractAction;
use crate::tiles::{Hand, TileKind, COPIES, NUM_KINDS};

/// Returned by [`shanten`] when the pattern can no longer be reached with
/// the current melds (QiDui after any meld, PongPongHu after a Chow).
pub const SHANTEN_IMPOSSIBLE: i32 = 99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeldKind {
    Chow,
    Pong,
    Kong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Meld {
    pub kind: MeldKind,
    /// Lowest tile of a Chow; the repeated tile otherwise.
    pub base: TileKind,
    pub exposed: bool,
}

impl Meld {
    pub fn chow(base: TileKind) -> Result<Self> {
        if base.index() > 6 {
            return Err(Error::InconsistentHand(format!("no chow starts at {base}")));
        }
        Ok(Meld {
            kind: MeldKind::Chow,
            base,
            exposed: true,
        })
    }

    pub fn pong(kind: TileKind) -> Self {
        Meld {
            kind: MeldKind::Pong,
            base: kind,
            exposed: true,
        }
    }

    pub fn kong(kind: TileKind, exposed: bool) -> Self {
        Meld {
            kind: MeldKind::Kong,
            base: kind,
            exposed,
        }
    }

    /// Number of tiles of `kind` locked in this meld.
    pub fn tiles_of(&self, kind: TileKind) -> u8 {
        match self.kind {
            MeldKind::Chow => {
                let b = self.base.index();
                u8::from((b..b + 3).contains(&kind.index()))
            }
            MeldKind::Pong if self.base == kind => 3,
            MeldKind::Kong if self.base == kind => 4,
            _ => 0,
        }
    }

    pub fn size(&self) -> usize {
        match self.kind {
            MeldKind::Kong => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for Meld {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MeldKind::Chow => {
                let b = self.base.index() as u8;
                write!(f, "[C{} C{} C{}]", b + 1, b + 2, b + 3)
            }
            MeldKind::Pong => write!(f, "[{0} {0} {0}]", self.base),
            MeldKind::Kong if self.exposed => write!(f, "[{0} {0} {0} {0}]", self.base),
            MeldKind::Kong => write!(f, "[{0} ## ## {0}]", self.base),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WinPattern {
    None,
    Normal,
    PongPongHu,
    QiDui,
}

impl WinPattern {
    pub fn points(self) -> i32 {
        match self {
            WinPattern::None => 0,
            WinPattern::Normal => 1,
            WinPattern::PongPongHu | WinPattern::QiDui => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WinPattern::None => "none",
            WinPattern::Normal => "normal",
            WinPattern::PongPongHu => "pongpong",
            WinPattern::QiDui => "qidui",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "none" => WinPattern::None,
            "normal" => WinPattern::Normal,
            "pongpong" => WinPattern::PongPongHu,
            "qidui" => WinPattern::QiDui,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WinResult {
    pub pattern: WinPattern,
    pub points: i32,
}

impl WinResult {
    pub fn none() -> Self {
        WinResult {
            pattern: WinPattern::None,
            points: 0,
        }
    }

    pub fn is_win(&self) -> bool {
        self.pattern != WinPattern::None
    }
}

/// Which of the three winning shapes a complete hand satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Satisfied {
    pub normal: bool,
    pub pongpong: bool,
    pub qidui: bool,
}

impl Satisfied {
    pub fn get(&self, pattern: AbstractAction) -> bool {
        match pattern {
            AbstractAction::Normal => self.normal,
            AbstractAction::PongPongHu => self.pongpong,
            AbstractAction::QiDui => self.qidui,
        }
    }
}

fn check_complete(hand: &Hand, melds: &[Meld]) -> Result<()> {
    let expected = 14usize.checked_sub(3 * melds.len());
    if melds.len() > 4 || expected != Some(hand.len()) {
        return Err(Error::InconsistentHand(format!(
            "{} concealed tiles with {} melds",
            hand.len(),
            melds.len()
        )));
    }
    Ok(())
}

/// Tests all three shapes on a complete hand.
pub fn win_shapes(hand: &Hand, melds: &[Meld]) -> Result<Satisfied> {
    check_complete(hand, melds)?;
    let counts = hand.counts();
    let qidui = melds.is_empty() && counts.iter().all(|c| c % 2 == 0);
    let pongpong = melds.iter().all(|m| m.kind != MeldKind::Chow)
        && counts.iter().filter(|&&c| c == 2).count() == 1
        && counts.iter().all(|&c| c == 0 || c == 2 || c == 3);
    let normal = pongpong || normal_decomposes(counts);
    Ok(Satisfied {
        normal,
        pongpong,
        qidui,
    })
}

/// Highest-scoring pattern of a complete hand; QiDui is preferred over
/// PongPongHu, which is preferred over Normal.
pub fn evaluate_win(hand: &Hand, melds: &[Meld]) -> Result<WinResult> {
    let s = win_shapes(hand, melds)?;
    let pattern = if s.qidui {
        WinPattern::QiDui
    } else if s.pongpong {
        WinPattern::PongPongHu
    } else if s.normal {
        WinPattern::Normal
    } else {
        WinPattern::None
    };
    Ok(WinResult {
        pattern,
        points: pattern.points(),
    })
}

fn normal_decomposes(counts: &[u8; NUM_KINDS]) -> bool {
    let mut c = *counts;
    for eye in 0..NUM_KINDS {
        if c[eye] >= 2 {
            c[eye] -= 2;
            let ok = melds_only(c);
            c[eye] += 2;
            if ok {
                return true;
            }
        }
    }
    false
}

/// Greedy: at the lowest remaining kind, a triple is always safe to take as
/// a Pong (three identical Chows are equivalent to three Pongs), the rest
/// must start Chows.
fn melds_only(mut c: [u8; NUM_KINDS]) -> bool {
    for i in 0..NUM_KINDS {
        if c[i] >= 3 {
            c[i] -= 3;
        }
        if c[i] > 0 {
            if i >= 7 {
                return false;
            }
            let n = c[i];
            if c[i + 1] < n || c[i + 2] < n {
                return false;
            }
            c[i] = 0;
            c[i + 1] -= n;
            c[i + 2] -= n;
        }
    }
    true
}

/// `best[m][p]`: the most partial blocks (pairs or two-tile runs) achievable
/// with `m` complete melds and `p` eyes, or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Blocks {
    best: [[i8; 2]; 5],
}

impl Blocks {
    const EMPTY: Blocks = Blocks {
        best: [[-1; 2]; 5],
    };

    fn zero() -> Self {
        let mut b = Self::EMPTY;
        b.best[0][0] = 0;
        b
    }

    fn record(&mut self, m: usize, t: i8, p: usize) {
        if m <= 4 {
            let slot = &mut self.best[m][p];
            *slot = (*slot).max(t.min(8));
        }
    }

    fn combine(&self, other: &Blocks) -> Blocks {
        let mut out = Blocks::EMPTY;
        for m1 in 0..5 {
            for p1 in 0..2 {
                let t1 = self.best[m1][p1];
                if t1 < 0 {
                    continue;
                }
                for m2 in 0..5 - m1 {
                    for p2 in 0..2 - p1 {
                        let t2 = other.best[m2][p2];
                        if t2 >= 0 {
                            out.record(m1 + m2, t1 + t2, p1 + p2);
                        }
                    }
                }
            }
        }
        out
    }

    fn shanten(&self, exposed: usize) -> i32 {
        let mut value = i32::MIN;
        for m in 0..5 {
            let total = m + exposed;
            if total > 4 {
                break;
            }
            for p in 0..2 {
                let t = self.best[m][p];
                if t >= 0 {
                    let partial = (t as i32).min(4 - total as i32);
                    value = value.max(2 * total as i32 + partial + p as i32);
                }
            }
        }
        8 - value
    }
}

/// Options for a kind that cannot form runs.
fn isolated_kind(count: u8) -> Blocks {
    let mut b = Blocks::zero();
    if count >= 2 {
        b.record(0, 1, 0);
        b.record(0, 0, 1);
    }
    if count >= 3 {
        b.record(1, 0, 0);
    }
    b
}

fn suit_search(c: &mut [u8; 9], mut i: usize, same_used: bool, m: usize, t: i8, p: usize, out: &mut Blocks) {
    let mut same_used = same_used;
    while i < 9 && c[i] == 0 {
        i += 1;
        same_used = false;
    }
    if i == 9 {
        out.record(m, t, p);
        return;
    }
    if m > 4 {
        return;
    }
    if !same_used && c[i] >= 3 {
        c[i] -= 3;
        suit_search(c, i, true, m + 1, t, p, out);
        c[i] += 3;
    }
    if i <= 6 && c[i + 1] > 0 && c[i + 2] > 0 {
        c[i] -= 1;
        c[i + 1] -= 1;
        c[i + 2] -= 1;
        suit_search(c, i, same_used, m + 1, t, p, out);
        c[i] += 1;
        c[i + 1] += 1;
        c[i + 2] += 1;
    }
    if !same_used && c[i] >= 2 {
        c[i] -= 2;
        if p == 0 {
            suit_search(c, i, true, m, t, 1, out);
        }
        suit_search(c, i, true, m, t + 1, p, out);
        c[i] += 2;
    }
    for gap in 1..=2 {
        if i + gap < 9 && c[i + gap] > 0 {
            c[i] -= 1;
            c[i + gap] -= 1;
            suit_search(c, i, same_used, m, t + 1, p, out);
            c[i] += 1;
            c[i + gap] += 1;
        }
    }
    c[i] -= 1;
    suit_search(c, i, same_used, m, t, p, out);
    c[i] += 1;
}

thread_local! {
    static SUIT_CACHE: RefCell<HashMap<u32, Blocks>> = RefCell::new(HashMap::new());
}

fn character_blocks(counts: &[u8; NUM_KINDS]) -> Blocks {
    let mut suit = [0u8; 9];
    suit.copy_from_slice(&counts[..9]);
    let key = suit.iter().fold(0u32, |acc, &c| acc * 5 + c as u32);
    SUIT_CACHE.with(|cache| {
        if let Some(b) = cache.borrow().get(&key) {
            return *b;
        }
        let mut out = Blocks::EMPTY;
        suit_search(&mut suit, 0, false, 0, 0, 0, &mut out);
        cache.borrow_mut().insert(key, out);
        out
    })
}

fn honor_blocks(counts: &[u8; NUM_KINDS], range: std::ops::Range<usize>) -> Blocks {
    range.fold(Blocks::zero(), |acc, k| {
        if counts[k] >= 2 {
            acc.combine(&isolated_kind(counts[k]))
        } else {
            acc
        }
    })
}

fn normal_shanten(hand: &Hand, melds: &[Meld]) -> i32 {
    let counts = hand.counts();
    character_blocks(counts)
        .combine(&honor_blocks(counts, 9..NUM_KINDS))
        .shanten(melds.len())
}

fn pongpong_shanten(hand: &Hand, melds: &[Meld]) -> i32 {
    if melds.iter().any(|m| m.kind == MeldKind::Chow) {
        return SHANTEN_IMPOSSIBLE;
    }
    honor_blocks(hand.counts(), 0..NUM_KINDS).shanten(melds.len())
}

fn qidui_shanten(hand: &Hand, melds: &[Meld]) -> i32 {
    if !melds.is_empty() {
        return SHANTEN_IMPOSSIBLE;
    }
    // A quad holds two pairs.
    let pairs: i32 = hand.counts().iter().map(|&c| (c / 2) as i32).sum();
    if pairs >= 7 {
        -1
    } else {
        6 - pairs
    }
}

/// Exchanges needed to reach a ready hand for `pattern`: -1 for a complete
/// hand, 0 for tenpai, [`SHANTEN_IMPOSSIBLE`] when the melds rule it out.
pub fn shanten(hand: &Hand, melds: &[Meld], pattern: AbstractAction) -> i32 {
    match pattern {
        AbstractAction::Normal => normal_shanten(hand, melds),
        AbstractAction::PongPongHu => pongpong_shanten(hand, melds),
        AbstractAction::QiDui => qidui_shanten(hand, melds),
    }
}

/// Number of distinct kinds whose draw strictly lowers [`shanten`] for
/// `pattern`. Kinds whose four copies are all in the player's own hand or
/// melds are not drawable and never count.
pub fn acceptance_count(hand: &Hand, melds: &[Meld], pattern: AbstractAction) -> usize {
    let base = shanten(hand, melds, pattern);
    if base < 0 || base >= SHANTEN_IMPOSSIBLE {
        return 0;
    }
    TileKind::all()
        .filter(|&k| {
            let owned = hand.count(k) + melds.iter().map(|m| m.tiles_of(k)).sum::<u8>();
            owned < COPIES && shanten(&hand.with(k), melds, pattern) < base
        })
        .count()
}
