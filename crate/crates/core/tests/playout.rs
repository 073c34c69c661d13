use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use playout_forge::bench::stats::chi_square_homogeneity;
use playout_forge::bench::{move_key, MoveKey};
use playout_forge::corpus::{bundled, BUNDLED};
use playout_forge::detect::StrategyKind;
use playout_forge::engine::{Game, GameState, Move, MoveKind, Player};
use playout_forge::playout::{
    filter_step, optimised_playout, playout, playout_observed, standard_playout, PlayoutConfig, PlayoutError,
    PlayoutOutcome,
};
use playout_forge::policy::{CentralityScorer, PolicySpec};

/// Exact (P1 win, P2 win, draw) of uniform random tic-tac-toe, by full
/// enumeration of the game tree on a plain array.
fn tictactoe_oracle() -> [f64; 3] {
    const LINES: [[usize; 3]; 8] = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];
    fn go(b: &mut [u8; 9], turn: u8) -> [f64; 3] {
        let empty: Vec<usize> = (0..9).filter(|&i| b[i] == 0).collect();
        if empty.is_empty() {
            return [0.0, 0.0, 1.0];
        }
        let mut acc = [0.0; 3];
        for &i in &empty {
            b[i] = turn;
            let won = LINES.iter().any(|l| l.iter().all(|&j| b[j] == turn));
            let r = if won {
                let mut r = [0.0; 3];
                r[turn as usize - 1] = 1.0;
                r
            } else {
                go(b, 3 - turn)
            };
            b[i] = 0;
            for k in 0..3 {
                acc[k] += r[k] / empty.len() as f64;
            }
        }
        acc
    }
    go(&mut [0; 9], 1)
}

fn outcome_frequencies(game: &Game, kind: StrategyKind, n: u64, seed: u64) -> [f64; 3] {
    let base = PlayoutConfig::for_game(game, seed);
    let s = game.initial_state();
    let mut counts = [0u64; 3];
    for i in 0..n {
        let r = playout(game, kind, &s, &base.clone().with_stream(i)).unwrap();
        let o = r.terminal_outcome().unwrap();
        counts[o.winner().map_or(2, |p| p.index() - 1)] += 1;
    }
    counts.map(|c| c as f64 / n as f64)
}

#[test]
fn tictactoe_matches_exact_oracle() {
    let oracle = tictactoe_oracle();
    assert!((oracle.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((oracle[0] - 0.5849).abs() < 1e-3 && (oracle[2] - 0.1270).abs() < 1e-3);
    let ttt = bundled("tictactoe").unwrap();
    for kind in [StrategyKind::Standard, StrategyKind::AddToEmpty] {
        let freq = outcome_frequencies(&ttt, kind, 100_000, 17);
        for k in 0..3 {
            assert!((freq[k] - oracle[k]).abs() <= 0.01, "{kind}: {freq:?} vs {oracle:?}");
        }
    }
}

#[test]
fn tictactoe_lengths_and_shrinking_list() {
    let ttt = bundled("tictactoe").unwrap();
    let s = ttt.initial_state();
    for i in 0..500 {
        let cfg = PlayoutConfig::for_game(&ttt, 2).with_stream(i);
        let mut empties = Vec::new();
        let r = playout_observed(&ttt, StrategyKind::AddToEmpty, &s, &cfg, &mut cfg.rng(), |e| {
            empties.push(e.state.empty_count())
        })
        .unwrap();
        assert!((5..=9).contains(&r.length));
        assert!(r.final_state.is_terminal());
        let expected: Vec<usize> = (0..r.length as usize).map(|k| 9 - k).collect();
        assert_eq!(empties, expected);
    }
}

#[test]
fn terminal_input_returns_immediately() {
    let ttt = bundled("tictactoe").unwrap();
    let s = ttt.state_from_text("1|DD./cc./...").unwrap();
    let m = ttt.legal_moves(&s).into_iter().find(|m| m.to == Some(2)).unwrap();
    let done = ttt.apply(&s, &m).unwrap();
    for kind in [StrategyKind::Standard, StrategyKind::AddToEmpty] {
        let r = playout(&ttt, kind, &done, &PlayoutConfig::for_game(&ttt, 0)).unwrap();
        assert_eq!(r.length, 0);
        assert_eq!(r.outcome, PlayoutOutcome::Terminal(done.outcome().unwrap().clone()));
    }
}

#[test]
fn truncation() {
    let ttt = bundled("tictactoe").unwrap();
    let cfg = PlayoutConfig {
        max_moves: 3,
        ..PlayoutConfig::for_game(&ttt, 0)
    };
    let r = optimised_playout(&ttt, &ttt.initial_state(), &cfg).unwrap();
    assert_eq!(r.outcome, PlayoutOutcome::Truncated);
    assert_eq!(r.length, 3);
    assert!(!r.final_state.is_terminal());
}

#[test]
fn strategy_mismatch() {
    let ttt = bundled("tictactoe").unwrap();
    let err = playout(&ttt, StrategyKind::Filter, &ttt.initial_state(), &PlayoutConfig::for_game(&ttt, 0)).unwrap_err();
    assert_eq!(
        err,
        PlayoutError::StrategyMismatch {
            requested: StrategyKind::Filter,
            detected: StrategyKind::AddToEmpty
        }
    );
}

#[test]
fn playouts_are_deterministic() {
    for (stem, _) in BUNDLED {
        let g = bundled(stem).unwrap();
        let cfg = PlayoutConfig::for_game(&g, 99).with_stream(4);
        for kind in [StrategyKind::Standard, g.strategy().kind()] {
            let trace = || {
                let mut moves = Vec::new();
                let r = playout_observed(&g, kind, &g.initial_state(), &cfg, &mut cfg.rng(), |e| moves.push(*e.chosen)).unwrap();
                (moves, r.final_state, r.length)
            };
            assert_eq!(trace(), trace(), "{stem} {kind}");
        }
    }
}

#[test]
fn hex_never_draws_and_offers_swap() {
    let hex = bundled("hex").unwrap();
    let s = hex.initial_state();
    let n = 10_000u64;
    let mut swaps = 0;
    for i in 0..n {
        let cfg = PlayoutConfig::for_game(&hex, 5).with_stream(i);
        let mut second = None;
        let r = playout_observed(&hex, StrategyKind::AddToEmpty, &s, &cfg, &mut cfg.rng(), |e| {
            if e.state.move_number() == 1 {
                second = Some(*e.chosen);
            }
        })
        .unwrap();
        assert!(r.terminal_outcome().unwrap().winner().is_some());
        if second.unwrap().kind == MoveKind::Swap {
            swaps += 1;
        }
    }
    // Swap is one of 25 options at the second step.
    let (p, nf) = (1.0 / 25.0, n as f64);
    let sd = (nf * p * (1.0 - p)).sqrt();
    assert!((swaps as f64 - nf * p).abs() < 4.0 * sd, "{swaps}");
}

/// Runs `n` playouts of the detected strategy and checks every applied move
/// against the exact legal moves of its state.
fn shadow_check(game: &Game, n: u64, seed: u64) {
    let s = game.initial_state();
    for i in 0..n {
        let cfg = PlayoutConfig::for_game(game, seed).with_stream(i);
        let mut bad: Vec<String> = Vec::new();
        playout_observed(game, game.strategy().kind(), &s, &cfg, &mut cfg.rng(), |e| {
            let legal = game.legal_moves(e.state);
            if !legal.contains(e.chosen) {
                bad.push(format!("applied {}", e.chosen));
            }
            if let Some(m) = e.rejected.iter().find(|m| legal.contains(m)) {
                bad.push(format!("rejected legal {m}"));
            }
        })
        .unwrap();
        assert!(bad.is_empty(), "{}: playout {i}: {bad:?}", game.name());
    }
}

#[test]
fn filter_applies_only_legal_moves() {
    shadow_check(&bundled("golite").unwrap(), 10_000, 8);
    shadow_check(&bundled("nogo").unwrap(), 500, 8);
    shadow_check(&bundled("promotion").unwrap(), 500, 8);
}

#[test]
fn no_repetition_applies_only_legal_moves() {
    shadow_check(&bundled("repetition").unwrap(), 10_000, 8);
}

#[test]
fn no_trajectory_repeats_a_position() {
    let g = bundled("repetition").unwrap();
    let s = g.initial_state();
    for i in 0..10_000 {
        let cfg = PlayoutConfig::for_game(&g, 21).with_stream(i);
        let mut first_rejections = None;
        let r = playout_observed(&g, StrategyKind::NoRepetition, &s, &cfg, &mut cfg.rng(), |e| {
            first_rejections.get_or_insert(e.rejected.len());
        })
        .unwrap();
        assert_eq!(first_rejections, Some(0));
        let h = r.final_state.hash_history();
        assert_eq!(h.iter().collect::<HashSet<_>>().len(), h.len(), "playout {i}");
    }
}

#[test]
fn suicide_point_rejected_one_time_in_k() {
    let go = bundled("golite").unwrap();
    let s = go.state_from_text("1|..s../.s.s./..s../...../.....").unwrap();
    let k = go.generate_unchecked(&s).len();
    assert_eq!(k, 22);
    let suicide = |m: &Move| m.to == Some(7);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let trials = 10_000;
    let mut rejected = 0;
    for _ in 0..trials {
        let step = filter_step(&go, &s, &PolicySpec::Uniform, &mut rng);
        assert!(!suicide(&step.chosen.unwrap()));
        assert!(step.rejected.len() <= 1);
        rejected += step.rejected.iter().filter(|m| suicide(m)).count();
    }
    let p = 1.0 / k as f64;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    assert!((rejected as f64 - trials as f64 * p).abs() <= 4.0 * sd, "{rejected}");
}

#[test]
fn reference_state_reaches_every_legal_move() {
    let go = bundled("golite").unwrap();
    let s = go.state_from_text("1|..s../.s.s./..s.S/...S./S....").unwrap();
    let legal: HashSet<Move> = go.legal_moves(&s).into_iter().collect();
    assert!(legal.len() < go.generate_unchecked(&s).len());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let applied: HashSet<Move> = (0..5_000)
        .map(|_| filter_step(&go, &s, &PolicySpec::Uniform, &mut rng).chosen.unwrap())
        .collect();
    assert_eq!(applied, legal);
}

#[test]
fn all_rejected_resolves_by_end_rules() {
    let nogo = bundled("nogo").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..50 {
        let cfg = PlayoutConfig::for_game(&nogo, 3).with_stream(i);
        let mut last = None;
        let r = playout_observed(&nogo, StrategyKind::Filter, &nogo.initial_state(), &cfg, &mut cfg.rng(), |e| {
            last = Some((e.state.clone(), *e.chosen))
        })
        .unwrap();
        let (before, m) = last.unwrap();
        let stuck = nogo.apply(&before, &m).unwrap();
        assert!(!stuck.is_terminal());
        assert!(nogo.legal_moves(&stuck).is_empty());
        assert!(!nogo.generate_unchecked(&stuck).is_empty());
        let step = filter_step(&nogo, &stuck, &PolicySpec::Uniform, &mut rng);
        assert!(step.chosen.is_none());
        assert_eq!(step.rejected.len(), nogo.generate_unchecked(&stuck).len());
        // The player left without a move loses.
        assert_eq!(r.terminal_outcome().unwrap().winner(), Some(Player(3 - stuck.mover().0)));
    }
}

fn first_move_counts(game: &Game, state: &GameState, kind: StrategyKind, policy: &PolicySpec, n: u64, seed: u64) -> BTreeMap<MoveKey, u64> {
    let mut counts = BTreeMap::new();
    for i in 0..n {
        let cfg = PlayoutConfig {
            max_moves: 1,
            ..PlayoutConfig::for_game(game, seed).with_stream(i).with_policy(policy.clone())
        };
        let r = playout(game, kind, state, &cfg).unwrap();
        *counts.entry(move_key(&r.first_move.unwrap())).or_default() += 1;
    }
    counts
}

#[test]
fn boltzmann_policy_survives_rejection() {
    // The top row holds suicide points, so the filter loop renormalises.
    let go = bundled("golite").unwrap();
    let s = go.state_from_text("1|.s.s./s.s.s/...../...../.....").unwrap();
    assert!(go.legal_moves(&s).len() < go.generate_unchecked(&s).len());
    let policy = PolicySpec::Boltzmann {
        tau: 0.5,
        scorer: Arc::new(CentralityScorer),
    };
    let a = first_move_counts(&go, &s, StrategyKind::Standard, &policy, 20_000, 1);
    let b = first_move_counts(&go, &s, StrategyKind::Filter, &policy, 20_000, 2);
    let keys: BTreeSet<&MoveKey> = a.keys().chain(b.keys()).collect();
    assert!(keys.len() >= 3);
    let xa: Vec<u64> = keys.iter().map(|k| *a.get(*k).unwrap_or(&0)).collect();
    let xb: Vec<u64> = keys.iter().map(|k| *b.get(*k).unwrap_or(&0)).collect();
    let chi = chi_square_homogeneity(&xa, &xb);
    assert!(chi.p_value >= 0.001, "{chi:?}");
}

#[test]
fn standard_playout_wrappers() {
    let g = bundled("breakthrough").unwrap();
    let r = standard_playout(&g, &g.initial_state(), &PlayoutConfig::for_game(&g, 1)).unwrap();
    assert!(r.final_state.is_terminal());
    assert_eq!(r.rejections, 0);
}
