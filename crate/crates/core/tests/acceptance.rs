//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any failed.

mod common;

use std::collections::HashSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cfrp::abstraction::{decode, encode, DecisionSchedule, Features};
use cfrp::cfr::{cfr_iteration, derive_seed, rm_normal_form, train, MatrixGame, NodeStore, TrainConfig};
use cfrp::engine::{new_game, play_deal, GameState};
use cfrp::eval::{evaluate, EvalAgent, EvalMode, EvalOptions};
use cfrp::patterns::evaluate_win;
use cfrp::persistence::{
    format_benchmark, format_log, format_store, parse_benchmark, parse_log, parse_store, Benchmark,
};
use cfrp::policy::{choose_action, fixed_pattern_agent, AbstractAction};
use cfrp::tiles::{complexity_bounds, shuffle_deal, Deal, Hand, NUM_KINDS, WALL_SIZE};
use common::*;
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn encoding_fidelity() -> Outcome {
    let table = Features::new(1, 3, 2, 3, 11);
    let key = encode(&table).map_err(|e| e.to_string())?;
    ensure!(key.value() == 734401, "table node encodes to {}", key.value());
    ensure!(decode(key) == table, "decode({key}) = {:?}", decode(key));
    let mut n = 0;
    for round in 0..=38 {
        for pairs in 0..=6 {
            for pongs in 0..=4 {
                for ch in 0..=14 {
                    for wind in 0..=14 {
                        let f = Features::new(round, pairs, pongs, ch, wind);
                        let k = encode(&f).map_err(|e| e.to_string())?;
                        ensure!(decode(k) == f, "round trip failed for {f}");
                        n += 1;
                    }
                }
            }
        }
    }
    ensure!(n == 307_125, "visited {n} tuples");
    Ok(format!("734401 and {n} tuples round-trip"))
}

fn regret_matching_converges() -> Outcome {
    let s = rm_normal_form(&MatrixGame::rock_paper_scissors(), 100_000).map_err(|e| e.to_string())?;
    let dev = s.iter().flatten().map(|p| (p - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    ensure!(dev <= 0.02, "max deviation from uniform {dev}");
    // Weighted variant whose equilibrium (1/4, 1/2, 1/4) is not the start point.
    let weighted = MatrixGame::zero_sum(vec![
        vec![0.0, -1.0, 2.0],
        vec![1.0, 0.0, -1.0],
        vec![-2.0, 1.0, 0.0],
    ])
    .map_err(|e| e.to_string())?;
    let w = rm_normal_form(&weighted, 100_000).map_err(|e| e.to_string())?;
    let target = [0.25, 0.5, 0.25];
    let wdev = w.iter().flat_map(|s| s.iter().zip(&target).map(|(p, q)| (p - q).abs())).fold(0.0, f64::max);
    ensure!(wdev <= 0.02, "weighted variant off equilibrium by {wdev}");
    Ok(format!("max deviation {dev:.2e}; weighted variant {wdev:.2e}"))
}

fn random_hand(rng: &mut ChaCha8Rng) -> [u8; NUM_KINDS] {
    let mut tiles: Vec<usize> = (0..64).map(|i| i / 4).collect();
    tiles.shuffle(rng);
    let mut c = [0u8; NUM_KINDS];
    for &t in &tiles[..14] {
        c[t] += 1;
    }
    c
}

/// Eye plus four sets drawn at random; retried until copies fit.
fn built_hand(rng: &mut ChaCha8Rng, pongs_only: bool) -> [u8; NUM_KINDS] {
    loop {
        let mut c = [0u8; NUM_KINDS];
        c[rng.random_range(0..NUM_KINDS)] += 2;
        for _ in 0..4 {
            if pongs_only || rng.random_bool(0.5) {
                c[rng.random_range(0..NUM_KINDS)] += 3;
            } else {
                let b = rng.random_range(0..7);
                for k in b..b + 3 {
                    c[k] += 1;
                }
            }
        }
        if c.iter().all(|&n| n <= 4) {
            return c;
        }
    }
}

fn pairs_hand(rng: &mut ChaCha8Rng) -> [u8; NUM_KINDS] {
    loop {
        let mut c = [0u8; NUM_KINDS];
        for _ in 0..7 {
            c[rng.random_range(0..NUM_KINDS)] += 2;
        }
        if c.iter().all(|&n| n <= 4) {
            return c;
        }
    }
}

fn perturbed(rng: &mut ChaCha8Rng, mut c: [u8; NUM_KINDS]) -> [u8; NUM_KINDS] {
    loop {
        let from = rng.random_range(0..NUM_KINDS);
        let to = rng.random_range(0..NUM_KINDS);
        if c[from] > 0 && c[to] < 4 && from != to {
            c[from] -= 1;
            c[to] += 1;
            return c;
        }
    }
}

fn win_checker_agrees_with_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut wins = 0;
    for i in 0..10_000 {
        let counts = match i % 10 {
            0..=2 => random_hand(&mut rng),
            3 | 4 => built_hand(&mut rng, false),
            5 => built_hand(&mut rng, true),
            6 => pairs_hand(&mut rng),
            7 => {
                let h = built_hand(&mut rng, false);
                perturbed(&mut rng, h)
            }
            8 => {
                let h = pairs_hand(&mut rng);
                perturbed(&mut rng, h)
            }
            _ => {
                let h = built_hand(&mut rng, true);
                perturbed(&mut rng, h)
            }
        };
        let hand = Hand::from_counts(counts).map_err(|e| e.to_string())?;
        let got = evaluate_win(&hand, &[]).map_err(|e| e.to_string())?;
        let want = brute_force_win(&counts);
        ensure!(got.pattern == want, "hand {hand}: checker {:?}, oracle {want:?}", got.pattern);
        ensure!(got.points == want.points(), "hand {hand}: points {}", got.points);
        if got.is_win() {
            wins += 1;
        }
    }
    Ok(format!("10000 hands agree ({wins} wins)"))
}

fn check_transition(s: &GameState) -> Result<(), String> {
    ensure!(s.census() == [4u8; NUM_KINDS], "tile census broken: {}", s.snapshot());
    ensure!(s.round as usize + s.wall.len() == WALL_SIZE, "round/wall mismatch: {}", s.snapshot());
    if !s.is_terminal() {
        let legal = s.legal_actions().map_err(|e| e.to_string())?;
        ensure!(!legal.is_empty(), "no legal action: {}", s.snapshot());
    }
    Ok(())
}

fn engine_invariants_hold() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut decisive = 0;
    for game in 0..10_000u64 {
        let patterns = [0, 1].map(|_| AbstractAction::ALL[rng.random_range(0..3)]);
        let mut s = new_game(&shuffle_deal(game)).map_err(|e| e.to_string())?;
        check_transition(&s)?;
        let mut steps = 0;
        while !s.is_terminal() {
            let p = s.to_act;
            let a = choose_action(&s, p, patterns[p as usize]).map_err(|e| e.to_string())?;
            s.apply_mut(a).map_err(|e| e.to_string())?;
            check_transition(&s)?;
            steps += 1;
            ensure!(steps < 500, "game {game} does not terminate");
        }
        ensure!(s.round as usize <= WALL_SIZE, "more than 38 draws in game {game}");
        let u = s.terminal_utility().map_err(|e| e.to_string())?;
        ensure!(u[0] + u[1] == 0, "game {game} not zero-sum: {u:?}");
        if u[0] != 0 {
            decisive += 1;
        }
    }
    Ok(format!("10000 playouts clean ({decisive} decisive)"))
}

/// Fixed deal whose abstract game has a mixed minimax value.
const CONVERGENCE_DEAL: u64 = 61;

fn single_deal_cfr_converges() -> Outcome {
    let schedule = DecisionSchedule::default();
    let deal = shuffle_deal(CONVERGENCE_DEAL);
    let tree = abstract_tree(&deal, &schedule);
    ensure!(tree.has_perfect_recall(), "chosen deal lost perfect recall");
    ensure!(tree.leaves() <= 729, "{} leaves", tree.leaves());
    let matrix = payoff_matrix(&tree);
    let (value, _) = solve_zero_sum(&matrix);
    let mut store = NodeStore::new();
    for _ in 0..10_000 {
        cfr_iteration(&deal, &mut store, &schedule).map_err(|e| e.to_string())?;
    }
    let got = average_profile_value(&tree, &store);
    ensure!((got - value).abs() <= 0.01, "average profile {got:.5} vs minimax {value:.5}");
    Ok(format!(
        "minimax {value:.5}, average profile {got:.5} ({}x{} normal form, {} leaves)",
        matrix.len(),
        matrix[0].len(),
        tree.leaves()
    ))
}

const TRAIN_SEED: u64 = 20_191_209;
const BENCH_SEED: u64 = 3000;

fn exploitability_at(store: &NodeStore, bench: &[Deal]) -> Result<f64, String> {
    let opts = EvalOptions::default();
    evaluate(store, bench, &opts).map(|r| r.exploitability).map_err(|e| e.to_string())
}

/// Trains on one deal stream and records the store at 10, 2000 and 10000
/// iterations.
struct TrainingRun {
    early: f64,
    later: f64,
    nodes: usize,
}

fn training_run() -> Result<TrainingRun, String> {
    let bench = Benchmark::generate(200, BENCH_SEED).deals;
    let schedule = DecisionSchedule::default();
    let mut store = NodeStore::new();
    let mut done = 0u64;
    let mut advance = |store: &mut NodeStore, to: u64| -> Result<(), String> {
        while done < to {
            cfr_iteration(&shuffle_deal(derive_seed(TRAIN_SEED, done)), store, &schedule).map_err(|e| e.to_string())?;
            done += 1;
        }
        Ok(())
    };
    advance(&mut store, 10)?;
    let early = exploitability_at(&store, &bench)?;
    advance(&mut store, 2000)?;
    let later = exploitability_at(&store, &bench)?;
    advance(&mut store, 10_000)?;
    Ok(TrainingRun {
        early,
        later,
        nodes: store.len(),
    })
}

fn exploitability_trend(run: &TrainingRun) -> Outcome {
    ensure!(
        run.later < run.early,
        "exploitability after 2000 iterations {:.4} is not below {:.4} after 10",
        run.later,
        run.early
    );
    Ok(format!("{:.4} after 10 -> {:.4} after 2000", run.early, run.later))
}

fn store_scale(run: &TrainingRun) -> Outcome {
    ensure!((500..=8000).contains(&run.nodes), "{} nodes after 10000 iterations", run.nodes);
    Ok(format!("{} nodes after 10000 iterations", run.nodes))
}

fn complexity_constants() -> Outcome {
    let b = complexity_bounds();
    ensure!(
        b.abstract_leaves == BigUint::from(1_350_851_717_672_992_089u64),
        "3^38 = {}",
        b.abstract_leaves
    );
    ensure!(b.tree_leaves_lb > BigUint::from(10u32).pow(43), "14^38 = {}", b.tree_leaves_lb);
    let oracle = factorial(64) / factorial(4).pow(16);
    ensure!(b.deal_count == oracle, "{} != {}", b.deal_count, oracle);
    Ok(format!("64!/(4!)^16 = {} ({} digits)", oracle, oracle.to_string().len()))
}

fn random_real(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => loop {
            let v = f64::from_bits(rng.random::<u64>());
            if v.is_finite() {
                break v;
            }
        },
        1 => rng.random_range(-5.0..5.0),
        2 => rng.random_range(0..1000) as f64 / 8.0,
        _ => rng.random::<f64>() * 1e-9,
    }
}

fn persistence_round_trips() -> Outcome {
    use cfrp::abstraction::InfoSetKey;
    use cfrp::cfr::CfrNode;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let path = std::path::Path::new("random");
    for case in 0..1000 {
        let mut store = NodeStore::new();
        let mut keys = HashSet::new();
        for _ in 0..rng.random_range(0..20) {
            let key = rng.random_range(0..1u32 << 20);
            if !keys.insert(key) {
                continue;
            }
            let mut mask = [true, rng.random_bool(0.6), rng.random_bool(0.4)];
            if mask[2] {
                mask[1] = true;
            }
            let mut node = CfrNode::new(InfoSetKey::new(key).unwrap(), mask);
            for i in (0..3).filter(|&i| mask[i]) {
                node.regret_sum[i] = random_real(&mut rng);
                node.strategy_sum[i] = random_real(&mut rng).abs();
            }
            node.visits = rng.random_range(1..1_000_000);
            store.insert(node).unwrap();
        }
        let text = format_store(&store);
        let back = parse_store(&text, path).map_err(|e| e.to_string())?;
        ensure!(back == store, "store case {case} changed on reload");
        ensure!(format_store(&back) == text, "store case {case} not byte-identical");

        let deal = shuffle_deal(rng.random());
        let mut a = fixed_pattern_agent(AbstractAction::ALL[case % 3]);
        let mut b = fixed_pattern_agent(AbstractAction::ALL[(case / 3) % 3]);
        let (u, log) = play_deal(&deal, &mut a, &mut b).map_err(|e| e.to_string())?;
        let text = format_log(&log);
        let back = parse_log(&text, path).map_err(|e| e.to_string())?;
        ensure!(format_log(&back) == text, "log case {case} not byte-identical");
        ensure!(back.outcome().map(|o| o.utilities()) == Some(u), "log case {case} lost its outcome");

        let bench = Benchmark::generate(rng.random_range(0..6), rng.random());
        let text = format_benchmark(&bench);
        let back = parse_benchmark(&text, path).map_err(|e| e.to_string())?;
        ensure!(back == bench, "benchmark case {case} changed on reload");
        ensure!(format_benchmark(&back) == text, "benchmark case {case} not byte-identical");
    }
    Ok("1000 stores, logs and benchmarks round-trip".into())
}

fn determinism() -> Outcome {
    let bench = Benchmark::generate(20, BENCH_SEED).deals;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let config = TrainConfig {
            benchmark: bench.clone(),
            store_path: Some(dir.path().join("store.txt")),
            report_path: Some(dir.path().join("report.csv")),
            ..TrainConfig::new(300, 100, TRAIN_SEED)
        };
        let mut store = NodeStore::new();
        train(&config, &mut store).map_err(|e| e.to_string())?;
        let mut logs = String::new();
        for deal in &bench[..5] {
            let mut agent = EvalAgent::new(&store, EvalMode::Argmax, DecisionSchedule::default());
            let mut opp = fixed_pattern_agent(AbstractAction::PongPongHu);
            let (_, log) = play_deal(deal, &mut agent, &mut opp).map_err(|e| e.to_string())?;
            logs.push_str(&format_log(&log));
        }
        let read = |name: &str| fs::read(dir.path().join(name)).map_err(|e| e.to_string());
        outputs.push((read("store.txt")?, read("report.csv")?, logs));
    }
    ensure!(outputs[0].0 == outputs[1].0, "store files differ");
    ensure!(outputs[0].1 == outputs[1].1, "reports differ");
    ensure!(outputs[0].2 == outputs[1].2, "logs differ");
    Ok(format!(
        "store ({} bytes), report and logs identical across runs",
        outputs[0].0.len()
    ))
}

fn run(name: &str, f: impl FnOnce() -> Outcome, failures: &mut Vec<String>) {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let secs = Duration::as_secs_f64(&start.elapsed());
    match result {
        Ok(detail) => println!("PASS  {name:<34} {secs:>7.1}s  {detail}"),
        Err(why) => {
            println!("FAIL  {name:<34} {secs:>7.1}s  {why}");
            failures.push(name.to_string());
        }
    }
}

fn main() {
    let mut failures = Vec::new();
    run("encoding fidelity", encoding_fidelity, &mut failures);
    run("regret matching converges", regret_matching_converges, &mut failures);
    run("win checker matches oracle", win_checker_agrees_with_oracle, &mut failures);
    run("engine invariants", engine_invariants_hold, &mut failures);
    run("single-deal cfr convergence", single_deal_cfr_converges, &mut failures);
    let start = Instant::now();
    let training = training_run();
    println!("      (shared training run: {:.1}s)", start.elapsed().as_secs_f64());
    match &training {
        Ok(t) => {
            run("exploitability trend", || exploitability_trend(t), &mut failures);
            run("store scale", || store_scale(t), &mut failures);
        }
        Err(e) => {
            for name in ["exploitability trend", "store scale"] {
                println!("FAIL  {name:<34}  training failed: {e}");
                failures.push(name.to_string());
            }
        }
    }
    run("complexity constants", complexity_constants, &mut failures);
    run("persistence round trips", persistence_round_trips, &mut failures);
    run("determinism", determinism, &mut failures);
    if failures.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: {} failed: {}", failures.len(), failures.join(", "));
        std::process::exit(1);
    }
}
