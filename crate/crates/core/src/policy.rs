//! Move-selection policies and categorical distributions that survive
//! rejection of candidates.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::engine::{Game, GameState, Move, MoveKind, Site};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("invalid policy parameter: {0}")]
    Domain(String),
    #[error("rejected entry holds all remaining probability mass")]
    DegenerateDistribution,
}

/// Deterministic score `Q(m)` of a move in a state.
pub trait MoveScorer: Send + Sync + fmt::Debug {
    fn score(&self, game: &Game, state: &GameState, m: &Move) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroScorer;

impl MoveScorer for ZeroScorer {
    fn score(&self, _: &Game, _: &GameState, _: &Move) -> f64 {
        0.0
    }
}

/// Negative distance of the destination from the board centre. Moves
/// without a destination score below every placement.
#[derive(Debug, Clone, Copy, Default)]
pub struct CentralityScorer;

impl MoveScorer for CentralityScorer {
    fn score(&self, game: &Game, _: &GameState, m: &Move) -> f64 {
        match m.to {
            Some(t) => -game.board().distance_from_centre(t),
            None => -game.board().max_distance_from_centre() - 1.0,
        }
    }
}

/// Fixed scores keyed by (kind, from, to).
#[derive(Debug, Clone, Default)]
pub struct TableScorer {
    pub table: HashMap<(MoveKind, Option<Site>, Option<Site>), f64>,
    pub default: f64,
}

impl TableScorer {
    pub fn new(default: f64) -> TableScorer {
        TableScorer {
            table: HashMap::new(),
            default,
        }
    }

    pub fn with(mut self, kind: MoveKind, from: Option<Site>, to: Option<Site>, q: f64) -> TableScorer {
        self.table.insert((kind, from, to), q);
        self
    }
}

impl MoveScorer for TableScorer {
    fn score(&self, _: &Game, _: &GameState, m: &Move) -> f64 {
        *self.table.get(&(m.kind, m.from, m.to)).unwrap_or(&self.default)
    }
}

#[derive(Debug, Clone, Default)]
pub enum PolicySpec {
    #[default]
    Uniform,
    EpsilonGreedy { epsilon: f64, scorer: Arc<dyn MoveScorer> },
    Boltzmann { tau: f64, scorer: Arc<dyn MoveScorer> },
}

impl PolicySpec {
    pub fn validate(&self) -> Result<(), PolicyError> {
        match self {
            PolicySpec::Uniform => Ok(()),
            PolicySpec::EpsilonGreedy { epsilon, .. } => {
                if (0.0..=1.0).contains(epsilon) {
                    Ok(())
                } else {
                    Err(PolicyError::Domain(format!("epsilon {epsilon} outside [0, 1]")))
                }
            }
            PolicySpec::Boltzmann { tau, .. } => {
                if *tau > 0.0 && tau.is_finite() {
                    Ok(())
                } else {
                    Err(PolicyError::Domain(format!("temperature {tau} is not positive")))
                }
            }
        }
    }
}

/// `exp(Q_i / tau) / sum_j exp(Q_j / tau)`, shifted by the maximum first.
pub fn boltzmann(scores: &[f64], tau: f64) -> Result<Vec<f64>, PolicyError> {
    if scores.is_empty() {
        return Err(PolicyError::Domain("no scores".into()));
    }
    if tau.is_nan() || tau <= 0.0 {
        return Err(PolicyError::Domain(format!("temperature {tau} is not positive")));
    }
    Ok(softmax(&scores.iter().map(|q| q / tau).collect::<Vec<_>>()))
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}

/// Removes `rejected` and rescales the rest by `1 / (1 - p_rejected)`.
///
/// The remaining mass `1 - p_rejected` is taken as the sum of the survivors,
/// which avoids cancellation when the rejected entry held almost all of it.
pub fn renormalize_after_rejection(probs: &[f64], rejected: usize) -> Result<Vec<f64>, PolicyError> {
    if probs.len() < 2 || rejected >= probs.len() {
        return Err(PolicyError::Domain("need two entries and a valid index".into()));
    }
    let rest: f64 = probs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != rejected)
        .map(|(_, q)| q)
        .sum();
    if probs[rejected] >= 1.0 - 1e-12 || rest <= 1e-12 {
        return Err(PolicyError::DegenerateDistribution);
    }
    let scale = 1.0 / rest;
    Ok(probs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != rejected)
        .map(|(_, q)| q * scale)
        .collect())
}

/// Inverse-CDF draw over the stored order.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // Rounding left `u` above the total; fall back to the last entry with mass.
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Uniform with probability `epsilon`, otherwise an argmax of `scores` with
/// ties broken uniformly.
pub fn epsilon_greedy_index<R: Rng + ?Sized>(scores: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if rng.gen::<f64>() < epsilon {
        return rng.gen_range(0..scores.len());
    }
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties = scores.iter().filter(|&&q| q == best).count();
    let pick = rng.gen_range(0..ties);
    scores
        .iter()
        .enumerate()
        .filter(|(_, &q)| q == best)
        .nth(pick)
        .map(|(i, _)| i)
        .unwrap()
}

pub fn epsilon_greedy_select<R: Rng + ?Sized>(
    game: &Game,
    state: &GameState,
    moves: &[Move],
    epsilon: f64,
    scorer: &dyn MoveScorer,
    rng: &mut R,
) -> usize {
    let scores: Vec<f64> = moves.iter().map(|m| scorer.score(game, state, m)).collect();
    epsilon_greedy_index(&scores, epsilon, rng)
}

/// Incremental renormalisations allowed before recomputing from the logits.
pub const RECOMPUTE_EVERY: u32 = 32;

/// Candidate list with parallel probabilities. Built from logits (`Q / tau`)
/// it can recompute itself exactly over the survivors of any rejections.
#[derive(Debug, Clone)]
pub struct MoveDistribution<T> {
    moves: Vec<T>,
    probs: Vec<f64>,
    logits: Option<Vec<f64>>,
    renormalisations: u32,
}

impl<T> MoveDistribution<T> {
    pub fn uniform(moves: Vec<T>) -> MoveDistribution<T> {
        let p = 1.0 / moves.len() as f64;
        MoveDistribution {
            probs: vec![p; moves.len()],
            moves,
            logits: None,
            renormalisations: 0,
        }
    }

    pub fn boltzmann(moves: Vec<T>, scores: &[f64], tau: f64) -> Result<MoveDistribution<T>, PolicyError> {
        let probs = boltzmann(scores, tau)?;
        Ok(MoveDistribution {
            moves,
            probs,
            logits: Some(scores.iter().map(|q| q / tau).collect()),
            renormalisations: 0,
        })
    }

    pub fn from_probs(moves: Vec<T>, probs: Vec<f64>) -> MoveDistribution<T> {
        assert_eq!(moves.len(), probs.len());
        MoveDistribution {
            moves,
            probs,
            logits: None,
            renormalisations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn moves(&self) -> &[T] {
        &self.moves
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.probs, rng)
    }

    fn recompute(&mut self) {
        self.renormalisations = 0;
        self.probs = match &self.logits {
            Some(l) if !l.is_empty() => softmax(l),
            _ => vec![1.0 / self.moves.len().max(1) as f64; self.moves.len()],
        };
    }

    /// Removes entry `i` and renormalises the rest. Falls back to a fresh
    /// computation over the survivors when the update is degenerate, and
    /// every [`RECOMPUTE_EVERY`] updates.
    pub fn reject(&mut self, i: usize) -> T {
        let removed = self.moves.remove(i);
        if let Some(l) = &mut self.logits {
            l.remove(i);
        }
        if self.moves.is_empty() {
            self.probs.clear();
            return removed;
        }
        match renormalize_after_rejection(&self.probs, i) {
            Ok(p) => {
                self.probs = p;
                self.renormalisations += 1;
                if self.renormalisations >= RECOMPUTE_EVERY {
                    self.recompute();
                }
            }
            Err(_) => self.recompute(),
        }
        removed
    }
}

/// Per-step selection state over a candidate list that may shrink by
/// rejection. Removals keep the list and the sampler aligned.
pub(crate) enum Selector {
    Uniform,
    Greedy { epsilon: f64, scores: Vec<f64> },
    Boltzmann(MoveDistribution<()>),
}

impl Selector {
    pub fn new(policy: &PolicySpec, game: &Game, state: &GameState, moves: &[Move]) -> Selector {
        match policy {
            PolicySpec::Uniform => Selector::Uniform,
            PolicySpec::EpsilonGreedy { epsilon, scorer } => Selector::Greedy {
                epsilon: *epsilon,
                scores: moves.iter().map(|m| scorer.score(game, state, m)).collect(),
            },
            PolicySpec::Boltzmann { tau, scorer } => {
                let scores: Vec<f64> = moves.iter().map(|m| scorer.score(game, state, m)).collect();
                Selector::Boltzmann(
                    MoveDistribution::boltzmann(vec![(); moves.len()], &scores, *tau)
                        .expect("validated policy"),
                )
            }
        }
    }

    pub fn pick<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> usize {
        match self {
            Selector::Uniform => rng.gen_range(0..n),
            Selector::Greedy { epsilon, scores } => epsilon_greedy_index(scores, *epsilon, rng),
            Selector::Boltzmann(d) => d.sample(rng),
        }
    }

    pub fn remove<T>(&mut self, moves: &mut Vec<T>, i: usize) -> T {
        match self {
            Selector::Uniform => moves.swap_remove(i),
            Selector::Greedy { scores, .. } => {
                scores.remove(i);
                moves.remove(i)
            }
            Selector::Boltzmann(d) => {
                d.reject(i);
                moves.remove(i)
            }
        }
    }
}
