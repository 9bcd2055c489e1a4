//! Counterfactual regret minimization over a three-pattern abstraction of
//! two-player Mahjong.
//!
//! The concrete game lives in [`tiles`], [`patterns`] and [`engine`].
//! [`policy`] turns a committed winning pattern into concrete moves, and
//! [`abstraction`] maps states to the 20-bit information-set keys used by
//! [`cfr`]. Stores, logs and benchmarks are plain text ([`persistence`]);
//! [`eval`] scores a store against the fixed-pattern opponents.

pub mod abstraction;
pub mod cfr;
pub mod cli;
pub mod engine;
pub mod error;
pub mod eval;
pub mod patterns;
pub mod persistence;
pub mod policy;
pub mod tiles;

pub use abstraction::{decode, encode, extract_features, info_set_key, DecisionSchedule, Features, InfoSetKey};
pub use cfr::{average_strategy, cfr_iteration, regret_match, rm_normal_form, train, CfrNode, MatrixGame, NodeStore, Strategy, TrainConfig};
pub use engine::{new_game, play_deal, playout, ConcreteAction, GameLog, GameState, Phase};
pub use error::{Error, Result};
pub use eval::{best_response_score, evaluate, EvalAgent, EvalMode, EvalOptions, EvalReport};
pub use patterns::{evaluate_win, shanten, Meld, WinPattern};
pub use policy::{choose_action, fixed_pattern_agent, AbstractAction};
pub use tiles::{complexity_bounds, shuffle_deal, Deal, Hand, TileKind};
