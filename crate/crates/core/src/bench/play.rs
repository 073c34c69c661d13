//! Head-to-head matches between a uniform random agent and UCT agents.

use rand::Rng;
use serde::Serialize;

use super::BenchError;
use crate::detect::StrategyKind;
use crate::engine::{Game, GameState, Outcome, Player};
use crate::mcts::{search, DEFAULT_EXPLORATION};
use crate::playout::{default_max_moves, playout_with_rng, PlayoutConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Agent {
    Random,
    /// UCT with `iterations` rounds per move, using playouts of `kind`.
    Mcts { iterations: u32, kind: StrategyKind },
}

impl Agent {
    fn choose<R: Rng>(&self, game: &Game, state: &GameState, cfg: &PlayoutConfig, rng: &mut R) -> Result<crate::engine::Move, BenchError> {
        let moves = game.legal_moves(state);
        match *self {
            Agent::Random => Ok(moves[rng.gen_range(0..moves.len())]),
            Agent::Mcts { iterations, kind } => {
                let players = game.player_count();
                let mut err = None;
                let mut f = |s: &GameState| match playout_with_rng(game, kind, s, cfg, &mut *rng) {
                    Ok(r) => r.terminal_outcome().cloned().unwrap_or_else(|| Outcome::draw(players)),
                    Err(e) => {
                        err.get_or_insert(e);
                        Outcome::draw(players)
                    }
                };
                let m = search(game, state, iterations, &mut f, DEFAULT_EXPLORATION);
                if let Some(e) = err {
                    return Err(e.into());
                }
                Ok(m.expect("state has legal moves"))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MatchReport {
    pub games: u32,
    pub first_wins: u32,
    pub second_wins: u32,
    pub draws: u32,
}

impl MatchReport {
    /// Score of the first agent, counting draws as half a win.
    pub fn first_score(&self) -> f64 {
        if self.games == 0 {
            return 0.0;
        }
        (self.first_wins as f64 + 0.5 * self.draws as f64) / self.games as f64
    }
}

/// Plays `n_games` two-player games between `first` and `second`, swapping
/// seats every game. Games reaching the move cap count as draws.
pub fn play_match(game: &Game, first: Agent, second: Agent, n_games: u32, seed: u64) -> Result<MatchReport, BenchError> {
    if game.player_count() != 2 {
        return Err(BenchError::Config(format!("`{}` is not a two-player game", game.name())));
    }
    let mut report = MatchReport::default();
    let cap = default_max_moves(game);
    for g in 0..n_games {
        let cfg = PlayoutConfig::for_game(game, seed).with_stream(g as u64);
        let mut rng = cfg.rng();
        let first_seat = Player(1 + (g % 2) as u8);
        let mut state = game.initial_state();
        let mut plies = 0;
        let outcome = loop {
            if let Some(o) = state.outcome() {
                break Some(o.clone());
            }
            if plies >= cap {
                break None;
            }
            if game.legal_moves(&state).is_empty() {
                break Some(game.resolve_no_moves(&state));
            }
            let agent = if state.mover() == first_seat { &first } else { &second };
            let m = agent.choose(game, &state, &cfg, &mut rng)?;
            game.apply_in_place(&mut state, &m).map_err(crate::playout::PlayoutError::from)?;
            plies += 1;
        };
        report.games += 1;
        match outcome.and_then(|o| o.winner()) {
            Some(p) if p == first_seat => report.first_wins += 1,
            Some(_) => report.second_wins += 1,
            None => report.draws += 1,
        }
    }
    Ok(report)
}
