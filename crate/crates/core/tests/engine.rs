use std::collections::HashSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use playout_forge::corpus::{self, bundled, BUNDLED};
use playout_forge::engine::{Game, GameState, IllegalMoveError, Move, MoveKind, Outcome, Player};

fn random_walk(game: &Game, seed: u64, max: usize) -> Vec<GameState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = game.initial_state();
    let mut out = vec![s.clone()];
    for _ in 0..max {
        if s.is_terminal() {
            break;
        }
        let moves = game.legal_moves(&s);
        if moves.is_empty() {
            break;
        }
        s = game.apply(&s, &moves[rng.gen_range(0..moves.len())]).unwrap();
        out.push(s.clone());
    }
    out
}

#[test]
fn initial_states() {
    let ttt = bundled("tictactoe").unwrap();
    let s = ttt.initial_state();
    assert_eq!(s.empty_count(), 9);
    assert_eq!(s.mover(), Player(1));
    assert_eq!(s.move_number(), 0);
    assert_eq!(ttt.legal_moves(&s).len(), 9);

    assert_eq!(bundled("hex").unwrap().initial_state().empty_count(), 25);

    let go = bundled("golite").unwrap();
    let s = go.initial_state();
    assert_eq!(s.empty_count(), 25);
    assert_eq!(s.hash_history(), &[s.hash()]);
    assert!(ttt.initial_state().hash_history().is_empty());
}

#[test]
fn add_at_centre_then_seven_moves() {
    let ttt = bundled("tictactoe").unwrap();
    let s0 = ttt.initial_state();
    let centre = ttt.legal_moves(&s0).into_iter().find(|m| m.to == Some(4)).unwrap();
    let s1 = ttt.apply(&s0, &centre).unwrap();
    assert_eq!(ttt.piece_names()[s1.piece_at(4).unwrap().0 as usize], "Disc");
    assert_eq!(s1.mover(), Player(2));
    let s2 = ttt.apply(&s1, &ttt.legal_moves(&s1)[0]).unwrap();
    assert_eq!(ttt.legal_moves(&s2).len(), 7);
}

#[test]
fn line_of_three_wins_for_mover() {
    let ttt = bundled("tictactoe").unwrap();
    let s = ttt.state_from_text("1|DD./cc./...").unwrap();
    assert_eq!(ttt.eval_end(&s), None);
    let win = ttt.legal_moves(&s).into_iter().find(|m| m.to == Some(2)).unwrap();
    let t = ttt.apply(&s, &win).unwrap();
    assert_eq!(t.outcome(), Some(&Outcome::win(2, Player(1))));
    assert_eq!(ttt.eval_end(&t), Some(Outcome::win(2, Player(1))));
    assert_eq!(ttt.eval_end(&ttt.initial_state()), None);
}

/// Every full board with five discs and four crosses and no line.
fn drawn_boards() -> Vec<[u8; 9]> {
    const LINES: [[usize; 3]; 8] = [[0, 1, 2], [3, 4, 5], [6, 7, 8], [0, 3, 6], [1, 4, 7], [2, 5, 8], [0, 4, 8], [2, 4, 6]];
    let mut out = Vec::new();
    for mask in 0u32..512 {
        if mask.count_ones() != 5 {
            continue;
        }
        let b: [u8; 9] = std::array::from_fn(|i| if mask >> i & 1 == 1 { 1 } else { 2 });
        if LINES.iter().all(|l| !(b[l[0]] == b[l[1]] && b[l[1]] == b[l[2]])) {
            out.push(b);
        }
    }
    out
}

#[test]
fn full_boards_without_line_are_draws() {
    let ttt = bundled("tictactoe").unwrap();
    let boards = drawn_boards();
    assert_eq!(boards.len(), 16);
    for b in boards {
        let text: String = b.iter().map(|&c| if c == 1 { 'D' } else { 'c' }).collect();
        let s = ttt.state_from_text(&format!("2|{text}")).unwrap();
        assert!(ttt.legal_moves(&s).is_empty());
        assert_eq!(ttt.eval_end(&s), Some(Outcome::draw(2)), "{text}");
    }
}

#[test]
fn hex_swap() {
    let hex = bundled("hex").unwrap();
    let s0 = hex.initial_state();
    assert!(!hex.legal_moves(&s0).iter().any(|m| m.kind == MoveKind::Swap));
    let first = hex.legal_moves(&s0)[7];
    let s1 = hex.apply(&s0, &first).unwrap();
    let moves = hex.legal_moves(&s1);
    assert_eq!(moves.len(), 25);
    assert_eq!(moves.iter().filter(|m| m.kind == MoveKind::Add).count(), 24);
    let swap = *moves.iter().find(|m| m.kind == MoveKind::Swap).unwrap();
    let s2 = hex.apply(&s1, &swap).unwrap();
    assert!(s2.swapped());
    assert_eq!(s2.mover(), Player(1));
    assert_eq!(hex.owner(&s2, first.to.unwrap()), Some(Player(2)));
    assert_eq!(s2.empty_count(), 24);
    assert!(!hex.legal_moves(&s2).iter().any(|m| m.kind == MoveKind::Swap));
    assert_eq!(s2.hash(), hex.recompute_hash(&s2));
}

#[test]
fn apply_errors() {
    let ttt = bundled("tictactoe").unwrap();
    let s = ttt.state_from_text("1|DD./cc./...").unwrap();
    let win = ttt.legal_moves(&s).into_iter().find(|m| m.to == Some(2)).unwrap();
    let done = ttt.apply(&s, &win).unwrap();
    assert!(done.is_terminal());
    let any = ttt.legal_moves(&ttt.initial_state())[5];
    assert_eq!(ttt.apply(&done, &any), Err(IllegalMoveError::Terminated));
    let occupied = Move { to: Some(0), ..win };
    assert!(matches!(ttt.apply(&s, &occupied), Err(IllegalMoveError::Inconsistent(..))));
    let wrong = Move { mover: Player(2), ..win };
    assert_eq!(ttt.apply(&s, &wrong), Err(IllegalMoveError::WrongMover(Player(2))));
}

#[test]
fn copies_are_independent() {
    // Runners that never step onto their far row, until 99 moves are played.
    let game = bundled("repetition").unwrap();
    let far = |m: &Move| match m.mover {
        Player(1) => m.to.unwrap() >= 20,
        _ => m.to.unwrap() < 5,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut s = game.initial_state();
    while s.hash_history().len() < 100 {
        let safe: Vec<Move> = game.legal_moves(&s).into_iter().filter(|m| !far(m)).collect();
        s = if safe.is_empty() {
            game.initial_state()
        } else {
            game.apply(&s, &safe[rng.gen_range(0..safe.len())]).unwrap()
        };
    }
    let copy = s.clone();
    assert_eq!(copy, s);
    assert_eq!(copy.hash_history().len(), 100);
    assert_eq!(copy.hash_history(), s.hash_history());
    let before = s.hash();
    let _ = game.apply(&copy, &game.legal_moves(&copy)[0]).unwrap();
    assert_eq!(s.hash(), before);
    assert_eq!(s, copy);
}

#[test]
fn history_tracks_moves() {
    let go = bundled("golite").unwrap();
    for s in random_walk(&go, 11, 60) {
        assert_eq!(s.hash_history().len(), s.move_number() as usize + 1);
        assert_eq!(*s.hash_history().last().unwrap(), s.hash());
    }
}

#[test]
fn suicide_point_is_generated_but_illegal() {
    let go = bundled("golite").unwrap();
    let s = go.state_from_text("1|..s../.s.s./..s../...../.....").unwrap();
    let suicide = |m: &Move| m.to == Some(7);
    assert!(go.generate_unchecked(&s).iter().any(suicide));
    let m = *go.generate_unchecked(&s).iter().find(|m| suicide(m)).unwrap();
    assert!(!go.check_postconditions(&s, &m));
    assert!(!go.legal_moves(&s).iter().any(suicide));
    assert!(!go.generate(&s).iter().any(suicide));
    assert_eq!(go.legal_moves(&s).iter().filter(|m| m.kind == MoveKind::Pass).count(), 1);
}

#[test]
fn capture_removes_group() {
    let go = bundled("golite").unwrap();
    let s = go.state_from_text("1|.S.../SsS../...../...../.....").unwrap();
    let m = go.legal_moves(&s).into_iter().find(|m| m.to == Some(11)).unwrap();
    let t = go.apply(&s, &m).unwrap();
    assert_eq!(t.piece_at(6), None);
    assert_eq!(t.hash(), go.recompute_hash(&t));
}

const TINY_RUNNERS: &str = r#"(game "Tiny"
    (players 2)
    (equipment { (board (square 2)) (piece "Runner" Each) })
    (rules
        (start { (place "Runner" P1 (sites {0})) (place "Runner" P2 (sites {3})) })
        (meta (noRepeat))
        (play (move Step Orthogonal to:Empty))
        (end (if (is In (last To) (sites {})) (result Mover Win)))
    )
)"#;

#[test]
fn repeating_only_move_leaves_no_legal_moves() {
    let game = corpus::game_from_text(TINY_RUNNERS).unwrap();
    let mut s = game.initial_state();
    let initial = s.hash();
    for (from, to) in [(0, 1), (3, 2), (1, 0)] {
        let m = game.legal_moves(&s).into_iter().find(|m| m.from == Some(from) && m.to == Some(to)).unwrap();
        s = game.apply(&s, &m).unwrap();
    }
    let only = game.generate_unchecked(&s);
    assert_eq!(only.len(), 1);
    assert!(!game.check_postconditions(&s, &only[0]));
    assert_eq!(game.apply(&s, &only[0]).unwrap().hash(), initial);
    assert!(game.legal_moves(&s).is_empty());
    assert_eq!(game.eval_end(&s), Some(Outcome::draw(2)));
}

#[test]
fn there_and_back_is_rejected() {
    let game = bundled("repetition").unwrap();
    let s0 = game.initial_state();
    let there = game.legal_moves(&s0).into_iter().find(|m| m.from == Some(1) && m.to == Some(6)).unwrap();
    let s1 = game.apply(&s0, &there).unwrap();
    let s2 = game.apply(&s1, &game.legal_moves(&s1).into_iter().find(|m| m.from == Some(21)).unwrap()).unwrap();
    let back = game.generate_unchecked(&s2).into_iter().find(|m| m.from == Some(6) && m.to == Some(1)).unwrap();
    assert!(game.check_postconditions(&s2, &back));
    let s3 = game.apply(&s2, &back).unwrap();
    let back2 = game.generate_unchecked(&s3).into_iter().find(|m| m.to == Some(21)).unwrap();
    assert!(!game.check_postconditions(&s3, &back2));
    assert_eq!(game.apply(&s3, &back2).unwrap().hash(), s0.hash());
}

#[test]
fn text_round_trip() {
    for (stem, _) in BUNDLED {
        let g = bundled(stem).unwrap();
        for s in random_walk(&g, 5, 20) {
            let text = g.state_to_text(&s);
            let back = g.state_from_text(&text).unwrap();
            assert_eq!(g.state_to_text(&back), text, "{stem}");
        }
    }
}

fn stems() -> impl Strategy<Value = &'static str> {
    proptest::sample::select(BUNDLED.iter().map(|(s, _)| *s).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_hash_matches_recomputed(stem in stems(), seed in any::<u64>()) {
        let g = bundled(stem).unwrap();
        for s in random_walk(&g, seed, 400) {
            prop_assert_eq!(s.hash(), g.recompute_hash(&s));
        }
    }

    #[test]
    fn apply_on_copy_leaves_original(stem in stems(), seed in any::<u64>(), depth in 0usize..40) {
        let g = bundled(stem).unwrap();
        let walk = random_walk(&g, seed, depth);
        let s = walk.last().unwrap();
        let moves = g.legal_moves(s);
        prop_assume!(!s.is_terminal() && !moves.is_empty());
        let snapshot = s.clone();
        let copy = s.clone();
        let m = moves[seed as usize % moves.len()];
        let next = g.apply(&copy, &m).unwrap();
        prop_assert_eq!(s, &snapshot);
        prop_assert_eq!(&copy, &snapshot);
        prop_assert_eq!(next.move_number(), s.move_number() + 1);
    }

    #[test]
    fn legal_moves_are_checked_candidates(
        stem in proptest::sample::select(vec!["golite", "nogo", "promotion", "repetition", "hex"]),
        seed in any::<u64>(),
        depth in 0usize..80,
    ) {
        let g = bundled(stem).unwrap();
        let walk = random_walk(&g, seed, depth);
        let s = walk.last().unwrap();
        prop_assume!(!s.is_terminal());
        let mut candidates = g.generate_unchecked(s);
        if g.swap_available(s) {
            candidates.push(Move::swap(s.mover()));
        }
        let expected: Vec<Move> = candidates.iter().copied().filter(|m| g.check_postconditions(s, m)).collect();
        prop_assert_eq!(g.legal_moves(s), expected);
        let unchecked: HashSet<Move> = g.generate_unchecked(s).into_iter().collect();
        let generated = g.generate(s);
        prop_assert_eq!(generated.iter().collect::<HashSet<_>>().len(), generated.len());
        prop_assert!(generated.iter().all(|m| unchecked.contains(m)));
    }
}
