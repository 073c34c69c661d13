//! Playout implementations: the standard loop over exact legal moves, the
//! add-to-empty loop over a shrinking site list, and the rejection-sampling
//! loop shared by filter and no-repetition games.

use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::detect::StrategyKind;
use crate::engine::{Game, GameState, IllegalMoveError, Move, Outcome, Site};
use crate::policy::{PolicyError, PolicySpec, Selector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlayoutError {
    #[error("ongoing state without legal moves that no end rule resolves")]
    DeadEnd,
    #[error("{requested} playouts do not apply to a game detected as {detected}")]
    StrategyMismatch {
        requested: StrategyKind,
        detected: StrategyKind,
    },
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    IllegalMove(#[from] IllegalMoveError),
}

#[derive(Debug, Clone)]
pub struct PlayoutConfig {
    pub max_moves: u32,
    pub rng_seed: u64,
    /// ChaCha stream, so that playout `i` of a batch gets its own sequence.
    pub stream: u64,
    pub policy: PolicySpec,
}

impl PlayoutConfig {
    /// Uniform policy and a cap of 50 moves per board site.
    pub fn for_game(game: &Game, seed: u64) -> PlayoutConfig {
        PlayoutConfig {
            max_moves: default_max_moves(game),
            rng_seed: seed,
            stream: 0,
            policy: PolicySpec::Uniform,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> PlayoutConfig {
        self.stream = stream;
        self
    }

    pub fn with_policy(mut self, policy: PolicySpec) -> PlayoutConfig {
        self.policy = policy;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(self.stream);
        rng
    }
}

pub fn default_max_moves(game: &Game) -> u32 {
    50 * game.board().site_count() as u32
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlayoutOutcome {
    Terminal(Outcome),
    Truncated,
}

#[derive(Debug, Clone)]
pub struct PlayoutResult {
    pub final_state: GameState,
    pub outcome: PlayoutOutcome,
    pub length: u32,
    /// Sampled moves that failed their postcondition check.
    pub rejections: u32,
    pub first_move: Option<Move>,
}

impl PlayoutResult {
    pub fn terminal_outcome(&self) -> Option<&Outcome> {
        match &self.outcome {
            PlayoutOutcome::Terminal(o) => Some(o),
            PlayoutOutcome::Truncated => None,
        }
    }
}

/// One applied move, reported to an observer before it is applied.
#[derive(Debug)]
pub struct StepEvent<'a> {
    pub state: &'a GameState,
    pub chosen: &'a Move,
    /// Candidates sampled and rejected earlier in the same step.
    pub rejected: &'a [Move],
}

struct Run<'a, R: ?Sized, O> {
    game: &'a Game,
    cfg: &'a PlayoutConfig,
    rng: &'a mut R,
    observer: O,
    state: GameState,
    length: u32,
    rejections: u32,
    first_move: Option<Move>,
}

enum Next {
    Continue,
    Done(PlayoutOutcome),
}

impl<'a, R: Rng + ?Sized, O: FnMut(&StepEvent)> Run<'a, R, O> {
    fn new(game: &'a Game, state: &GameState, cfg: &'a PlayoutConfig, rng: &'a mut R, observer: O) -> Self {
        Run {
            game,
            cfg,
            rng,
            observer,
            state: state.clone(),
            length: 0,
            rejections: 0,
            first_move: None,
        }
    }

    fn check_end(&self) -> Next {
        if let Some(o) = self.state.outcome() {
            return Next::Done(PlayoutOutcome::Terminal(o.clone()));
        }
        if self.length >= self.cfg.max_moves {
            return Next::Done(PlayoutOutcome::Truncated);
        }
        Next::Continue
    }

    fn no_moves(&mut self) -> PlayoutOutcome {
        let outcome = self.game.resolve_no_moves(&self.state);
        self.state.terminate(outcome.clone());
        PlayoutOutcome::Terminal(outcome)
    }

    fn record(&mut self, m: &Move, rejected: &[Move]) {
        (self.observer)(&StepEvent {
            state: &self.state,
            chosen: m,
            rejected,
        });
        self.length += 1;
        self.first_move.get_or_insert(*m);
    }

    fn apply(&mut self, m: &Move) -> Result<(), PlayoutError> {
        self.record(m, &[]);
        self.game.apply_in_place(&mut self.state, m)?;
        Ok(())
    }

    fn finish(self, outcome: PlayoutOutcome) -> PlayoutResult {
        PlayoutResult {
            final_state: self.state,
            outcome,
            length: self.length,
            rejections: self.rejections,
            first_move: self.first_move,
        }
    }

    fn standard(mut self) -> Result<PlayoutResult, PlayoutError> {
        loop {
            if let Next::Done(o) = self.check_end() {
                return Ok(self.finish(o));
            }
            let moves = self.game.legal_moves(&self.state);
            if moves.is_empty() {
                let o = self.no_moves();
                return Ok(self.finish(o));
            }
            let i = Selector::new(&self.cfg.policy, self.game, &self.state, &moves).pick(moves.len(), self.rng);
            self.apply(&moves[i])?;
        }
    }

    fn add_to_empty(mut self) -> Result<PlayoutResult, PlayoutError> {
        let game = self.game;
        let mut sites: Vec<Site> = Vec::new();
        let mut leaf = 0;
        if !self.state.is_terminal() {
            for m in game.generate_unchecked(&self.state) {
                sites.push(m.to.expect("placement"));
                leaf = m.leaf.expect("generated");
            }
        }
        let uniform = matches!(self.cfg.policy, PolicySpec::Uniform);
        loop {
            if let Next::Done(o) = self.check_end() {
                return Ok(self.finish(o));
            }
            let swap = game.swap_available(&self.state);
            let n = sites.len() + usize::from(swap);
            if n == 0 {
                let o = self.no_moves();
                return Ok(self.finish(o));
            }
            let i = if uniform {
                self.rng.gen_range(0..n)
            } else {
                let mut moves: Vec<Move> = sites.iter().map(|&s| game.add_move(&self.state, s, leaf)).collect();
                if swap {
                    moves.push(Move::swap(self.state.mover()));
                }
                Selector::new(&self.cfg.policy, game, &self.state, &moves).pick(n, self.rng)
            };
            let m = if i == sites.len() {
                Move::swap(self.state.mover())
            } else {
                game.add_move(&self.state, sites.swap_remove(i), leaf)
            };
            self.apply(&m)?;
        }
    }

    fn rejection(mut self) -> Result<PlayoutResult, PlayoutError> {
        let game = self.game;
        let mut candidates: Vec<Move> = Vec::new();
        let mut rejected: Vec<Move> = Vec::new();
        loop {
            if let Next::Done(o) = self.check_end() {
                return Ok(self.finish(o));
            }
            candidates.clear();
            rejected.clear();
            game.generate_into(&self.state, &mut candidates);
            if game.swap_available(&self.state) {
                candidates.push(Move::swap(self.state.mover()));
            }
            let mut selector = Selector::new(&self.cfg.policy, game, &self.state, &candidates);
            let accepted = loop {
                if candidates.is_empty() {
                    break None;
                }
                let i = selector.pick(candidates.len(), self.rng);
                let m = candidates[i];
                if !game.has_postconditions(&m) {
                    break Some((m, None));
                }
                match game.checked_successor(&self.state, &m) {
                    Some(next) => break Some((m, Some(next))),
                    None => {
                        self.rejections += 1;
                        rejected.push(selector.remove(&mut candidates, i));
                    }
                }
            };
            match accepted {
                None => {
                    let o = self.no_moves();
                    return Ok(self.finish(o));
                }
                Some((m, None)) => {
                    self.record(&m, &rejected);
                    game.apply_in_place(&mut self.state, &m)?;
                }
                Some((m, Some(next))) => {
                    self.record(&m, &rejected);
                    self.state = next;
                }
            }
        }
    }
}

fn require(game: &Game, requested: StrategyKind) -> Result<(), PlayoutError> {
    let detected = game.strategy().kind();
    if requested != StrategyKind::Standard && requested != detected {
        return Err(PlayoutError::StrategyMismatch { requested, detected });
    }
    Ok(())
}

/// Runs a playout of the requested kind with an explicit generator and a
/// per-move observer.
pub fn playout_observed<R: Rng + ?Sized>(
    game: &Game,
    kind: StrategyKind,
    state: &GameState,
    cfg: &PlayoutConfig,
    rng: &mut R,
    observer: impl FnMut(&StepEvent),
) -> Result<PlayoutResult, PlayoutError> {
    require(game, kind)?;
    cfg.policy.validate()?;
    let run = Run::new(game, state, cfg, rng, observer);
    match kind {
        StrategyKind::Standard => run.standard(),
        StrategyKind::AddToEmpty => run.add_to_empty(),
        StrategyKind::Filter | StrategyKind::NoRepetition => run.rejection(),
    }
}

pub fn playout_with_rng<R: Rng + ?Sized>(
    game: &Game,
    kind: StrategyKind,
    state: &GameState,
    cfg: &PlayoutConfig,
    rng: &mut R,
) -> Result<PlayoutResult, PlayoutError> {
    playout_observed(game, kind, state, cfg, rng, |_| {})
}

/// Runs a playout of the requested kind, seeded from `cfg`.
pub fn playout(game: &Game, kind: StrategyKind, state: &GameState, cfg: &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> {
    playout_with_rng(game, kind, state, cfg, &mut cfg.rng())
}

pub fn standard_playout(game: &Game, state: &GameState, cfg: &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> {
    playout(game, StrategyKind::Standard, state, cfg)
}

pub fn add_to_empty_playout(game: &Game, state: &GameState, cfg: &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> {
    playout(game, StrategyKind::AddToEmpty, state, cfg)
}

pub fn filter_playout(game: &Game, state: &GameState, cfg: &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> {
    playout(game, StrategyKind::Filter, state, cfg)
}

pub fn no_repetition_playout(game: &Game, state: &GameState, cfg: &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> {
    playout(game, StrategyKind::NoRepetition, state, cfg)
}

/// Playout with the strategy detected for the game.
pub fn optimised_playout(game: &Game, state: &GameState, cfg: &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> {
    playout(game, game.strategy().kind(), state, cfg)
}

/// Result of a single rejection-sampling step.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterStep {
    /// Accepted move, or `None` when every candidate was rejected.
    pub chosen: Option<Move>,
    /// Rejected candidates in the order they were sampled.
    pub rejected: Vec<Move>,
}

/// One step of the rejection loop from `state`, without applying the move.
pub fn filter_step<R: Rng + ?Sized>(game: &Game, state: &GameState, policy: &PolicySpec, rng: &mut R) -> FilterStep {
    let mut candidates = game.generate_unchecked(state);
    if game.swap_available(state) {
        candidates.push(Move::swap(state.mover()));
    }
    let mut selector = Selector::new(policy, game, state, &candidates);
    let mut rejected = Vec::new();
    while !candidates.is_empty() {
        let i = selector.pick(candidates.len(), rng);
        if game.check_postconditions(state, &candidates[i]) {
            return FilterStep {
                chosen: Some(candidates[i]),
                rejected,
            };
        }
        rejected.push(selector.remove(&mut candidates, i));
    }
    FilterStep { chosen: None, rejected }
}
