//! Throughput measurement, corpus comparison and equivalence checks between
//! standard and optimised playouts.

mod play;
mod report;
pub mod stats;

pub use play::{play_match, Agent, MatchReport};
pub use report::{plot_data, write_csv, write_json};

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::{self, CorpusEntry, LoadError};
use crate::detect::StrategyKind;
use crate::engine::{Game, GameState, Move, MoveKind, Site};
use crate::playout::{playout, PlayoutConfig, PlayoutError, PlayoutOutcome, PlayoutResult};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Playout(#[from] PlayoutError),
}

/// Salt separating warm-up playouts from measured ones.
const WARMUP_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    pub playouts_per_sec: f64,
    pub mean_length: f64,
    pub playout_count: u64,
    /// Rejected samples per sampled move.
    pub rejection_rate: f64,
}

fn check_kind(game: &Game, kind: StrategyKind) -> Result<(), BenchError> {
    let detected = game.strategy().kind();
    if kind != StrategyKind::Standard && kind != detected {
        return Err(BenchError::Config(format!(
            "{} was requested but `{}` is detected as {}",
            kind,
            game.name(),
            game.strategy().label()
        )));
    }
    Ok(())
}

/// Runs playouts from the initial state for `warmup_secs`, then counts the
/// playouts that finish within a `measure_secs` window.
pub fn measure(
    game: &Game,
    kind: StrategyKind,
    warmup_secs: f64,
    measure_secs: f64,
    seed: u64,
) -> Result<Measurement, BenchError> {
    check_kind(game, kind)?;
    if warmup_secs.is_nan() || warmup_secs < 0.0 || measure_secs.is_nan() || measure_secs <= 0.0 {
        return Err(BenchError::Config("warm-up must be >= 0 s and measurement > 0 s".into()));
    }
    let start = game.initial_state();
    let base = PlayoutConfig::for_game(game, seed);

    let warm = PlayoutConfig {
        rng_seed: seed ^ WARMUP_SALT,
        ..base.clone()
    };
    let t0 = Instant::now();
    let mut i = 0;
    while t0.elapsed().as_secs_f64() < warmup_secs {
        playout(game, kind, &start, &warm.clone().with_stream(i))?;
        i += 1;
    }

    let window = Duration::from_secs_f64(measure_secs);
    let (mut count, mut moves, mut rejections) = (0u64, 0u64, 0u64);
    let t0 = Instant::now();
    loop {
        let r = playout(game, kind, &start, &base.clone().with_stream(count))?;
        if t0.elapsed() > window {
            break;
        }
        count += 1;
        moves += r.length as u64;
        rejections += r.rejections as u64;
    }
    Ok(Measurement {
        playouts_per_sec: count as f64 / measure_secs,
        mean_length: if count == 0 { 0.0 } else { moves as f64 / count as f64 },
        playout_count: count,
        rejection_rate: if moves + rejections == 0 {
            0.0
        } else {
            rejections as f64 / (moves + rejections) as f64
        },
    })
}

/// One row of the comparison report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub game: String,
    pub strategy: String,
    pub pps_standard: f64,
    pub pps_optimised: f64,
    pub speedup: f64,
    pub mean_len_standard: f64,
    pub mean_len_optimised: f64,
    pub len_ratio: f64,
    pub n_standard: u64,
    pub n_optimised: u64,
    pub rejection_rate: f64,
}

impl BenchResult {
    pub fn from_measurements(game: &str, strategy: &str, standard: &Measurement, optimised: &Measurement) -> BenchResult {
        BenchResult {
            game: game.to_string(),
            strategy: strategy.to_string(),
            pps_standard: standard.playouts_per_sec,
            pps_optimised: optimised.playouts_per_sec,
            speedup: optimised.playouts_per_sec / standard.playouts_per_sec,
            mean_len_standard: standard.mean_length,
            mean_len_optimised: optimised.mean_length,
            len_ratio: optimised.mean_length / standard.mean_length,
            n_standard: standard.playout_count,
            n_optimised: optimised.playout_count,
            rejection_rate: optimised.rejection_rate,
        }
    }
}

/// Speedup summary over the games of one strategy family, or over all
/// games (`"All"`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub strategy: String,
    pub games: usize,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

pub fn aggregate(strategy: &str, speedups: &[f64]) -> Option<Aggregate> {
    if speedups.is_empty() {
        return None;
    }
    Some(Aggregate {
        strategy: strategy.to_string(),
        games: speedups.len(),
        min: speedups.iter().copied().fold(f64::INFINITY, f64::min),
        median: stats::median(speedups),
        mean: speedups.iter().sum::<f64>() / speedups.len() as f64,
        max: speedups.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Per-family rows in family order followed by the `"All"` row.
pub fn aggregates(results: &[BenchResult]) -> Vec<Aggregate> {
    let mut by_kind: BTreeMap<StrategyKind, Vec<f64>> = BTreeMap::new();
    for r in results {
        let kind = r
            .strategy
            .split('{')
            .next()
            .and_then(|k| k.parse().ok())
            .unwrap_or(StrategyKind::Standard);
        by_kind.entry(kind).or_default().push(r.speedup);
    }
    let mut out: Vec<Aggregate> = by_kind
        .iter()
        .filter_map(|(k, v)| aggregate(k.name(), v))
        .collect();
    let all: Vec<f64> = results.iter().map(|r| r.speedup).collect();
    out.extend(aggregate("All", &all));
    out
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub warmup_secs: f64,
    pub measure_secs: f64,
    pub seed: u64,
    /// Games measured concurrently; 1 keeps measurements strictly sequential.
    pub parallel_games: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            warmup_secs: 5.0,
            measure_secs: 30.0,
            seed: 1,
            parallel_games: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Skipped {
    pub game: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    pub warmup_secs: f64,
    pub measure_secs: f64,
    pub seed: u64,
    pub parallel_games: usize,
    /// Set when games were measured concurrently, so timings may interfere.
    pub timing_noise: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub metadata: ReportMetadata,
    pub results: Vec<BenchResult>,
    pub aggregates: Vec<Aggregate>,
    pub skipped: Vec<Skipped>,
    pub failures: Vec<Skipped>,
}

enum GameRun {
    Done(BenchResult),
    Skipped(Skipped),
    Failed(Skipped),
}

fn compare_one(path: &Path, game: Result<Game, LoadError>, cfg: &BenchConfig) -> GameRun {
    let label = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
    let game = match game {
        Ok(g) => g,
        Err(e) => {
            return GameRun::Failed(Skipped {
                game: label,
                reason: e.to_string(),
            })
        }
    };
    let kind = game.strategy().kind();
    if kind == StrategyKind::Standard {
        return GameRun::Skipped(Skipped {
            game: game.name().to_string(),
            reason: "no optimised strategy".into(),
        });
    }
    let run = || -> Result<BenchResult, BenchError> {
        let standard = measure(&game, StrategyKind::Standard, cfg.warmup_secs, cfg.measure_secs, cfg.seed)?;
        let optimised = measure(&game, kind, cfg.warmup_secs, cfg.measure_secs, cfg.seed)?;
        Ok(BenchResult::from_measurements(game.name(), &game.strategy().label(), &standard, &optimised))
    };
    match run() {
        Ok(r) => GameRun::Done(r),
        Err(e) => GameRun::Failed(Skipped {
            game: game.name().to_string(),
            reason: e.to_string(),
        }),
    }
}

/// Measures every game of `corpus_dir` under the standard playout and
/// under its detected strategy.
pub fn compare(corpus_dir: &Path, cfg: &BenchConfig) -> Result<CompareReport, BenchError> {
    let games = corpus::load_corpus(corpus_dir)?;
    compare_games(games, cfg)
}

pub fn compare_games(games: Vec<CorpusEntry>, cfg: &BenchConfig) -> Result<CompareReport, BenchError> {
    let runs: Vec<GameRun> = if cfg.parallel_games > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallel_games)
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        pool.install(|| {
            games
                .into_par_iter()
                .map(|(p, g)| compare_one(&p, g, cfg))
                .collect()
        })
    } else {
        games.into_iter().map(|(p, g)| compare_one(&p, g, cfg)).collect()
    };
    let mut report = CompareReport {
        metadata: ReportMetadata {
            warmup_secs: cfg.warmup_secs,
            measure_secs: cfg.measure_secs,
            seed: cfg.seed,
            parallel_games: cfg.parallel_games,
            timing_noise: cfg.parallel_games > 1,
        },
        results: Vec::new(),
        aggregates: Vec::new(),
        skipped: Vec::new(),
        failures: Vec::new(),
    };
    for run in runs {
        match run {
            GameRun::Done(r) => report.results.push(r),
            GameRun::Skipped(s) => report.skipped.push(s),
            GameRun::Failed(s) => report.failures.push(s),
        }
    }
    report.aggregates = aggregates(&report.results);
    Ok(report)
}

/// Move identity used for first-move frequencies.
pub type MoveKey = (MoveKind, Option<Site>, Option<Site>);

pub fn move_key(m: &Move) -> MoveKey {
    (m.kind, m.from, m.to)
}

/// Outcome category: winning player, 0 for no single winner, `u8::MAX` for
/// truncation.
fn outcome_key(r: &PlayoutResult) -> u8 {
    match &r.outcome {
        PlayoutOutcome::Terminal(o) => o.winner().map_or(0, |p| p.0),
        PlayoutOutcome::Truncated => u8::MAX,
    }
}

#[derive(Debug, Clone, Default)]
struct Sample {
    n: u64,
    total_length: u64,
    first_moves: BTreeMap<MoveKey, u64>,
    outcomes: BTreeMap<u8, u64>,
}

/// Length, first move and outcome category of one playout.
type Summary = (u32, Option<MoveKey>, u8);

fn collect<F>(game: &Game, n: u64, seed: u64, run: F) -> Result<Sample, PlayoutError>
where
    F: Fn(&Game, &GameState, &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> + Sync,
{
    let start = game.initial_state();
    let base = PlayoutConfig::for_game(game, seed);
    let results: Vec<Result<Summary, PlayoutError>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = run(game, &start, &base.clone().with_stream(i))?;
            Ok((r.length, r.first_move.as_ref().map(move_key), outcome_key(&r)))
        })
        .collect();
    let mut s = Sample::default();
    for r in results {
        let (len, first, outcome) = r?;
        s.n += 1;
        s.total_length += len as u64;
        if let Some(k) = first {
            *s.first_moves.entry(k).or_default() += 1;
        }
        *s.outcomes.entry(outcome).or_default() += 1;
    }
    Ok(s)
}

fn aligned<K: Ord + Clone>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> (Vec<u64>, Vec<u64>) {
    let mut keys: Vec<K> = a.keys().chain(b.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    (
        keys.iter().map(|k| *a.get(k).unwrap_or(&0)).collect(),
        keys.iter().map(|k| *b.get(k).unwrap_or(&0)).collect(),
    )
}

const OPTIMISED_SALT: u64 = 0x5851_f42d_4c95_7f2d;

pub const LEN_RATIO_RANGE: (f64, f64) = (0.95, 1.05);
pub const CHI_SQUARE_ALPHA: f64 = 0.001;
pub const LOW_SAMPLE: u64 = 1000;

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub game: String,
    pub strategy: String,
    pub n_playouts: u64,
    pub mean_len_standard: f64,
    pub mean_len_optimised: f64,
    pub len_ratio: f64,
    pub chi_square: f64,
    pub chi_square_df: usize,
    pub chi_square_p: f64,
    /// Total variation distance between outcome frequencies.
    pub outcome_distance: f64,
    pub warning: Option<String>,
    pub failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs `n_playouts` standard and `n_playouts` detected-strategy playouts
/// and compares lengths, first moves and outcomes.
pub fn verify_equivalence(game: &Game, n_playouts: u64, seed: u64) -> Result<EquivalenceReport, BenchError> {
    let kind = game.strategy().kind();
    if kind == StrategyKind::Standard {
        return Err(BenchError::Config(format!("`{}` has no optimised strategy", game.name())));
    }
    verify_equivalence_with(game, n_playouts, seed, |g, s, c| playout(g, kind, s, c))
}

/// As [`verify_equivalence`], with the optimised side supplied by the caller.
pub fn verify_equivalence_with<F>(game: &Game, n_playouts: u64, seed: u64, optimised: F) -> Result<EquivalenceReport, BenchError>
where
    F: Fn(&Game, &GameState, &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> + Sync,
{
    if n_playouts == 0 {
        return Err(BenchError::Config("need at least one playout".into()));
    }
    let std_sample = collect(game, n_playouts, seed, |g, s, c| playout(g, StrategyKind::Standard, s, c))?;
    // Independent streams: shared seeds would correlate the two samples.
    let opt_sample = collect(game, n_playouts, seed ^ OPTIMISED_SALT, optimised)?;
    let mean = |s: &Sample| s.total_length as f64 / s.n as f64;
    let (ms, mo) = (mean(&std_sample), mean(&opt_sample));
    let len_ratio = if ms == 0.0 && mo == 0.0 { 1.0 } else { mo / ms };
    let (a, b) = aligned(&std_sample.first_moves, &opt_sample.first_moves);
    let chi = stats::chi_square_homogeneity(&a, &b);
    let (oa, ob) = aligned(&std_sample.outcomes, &opt_sample.outcomes);

    let mut failures = Vec::new();
    if !(LEN_RATIO_RANGE.0..=LEN_RATIO_RANGE.1).contains(&len_ratio) {
        failures.push(format!("length ratio {len_ratio:.4} outside [0.95, 1.05]"));
    }
    if chi.p_value < CHI_SQUARE_ALPHA {
        failures.push(format!("first-move chi-square p = {:.3e} < 0.001", chi.p_value));
    }
    let warning = (n_playouts < LOW_SAMPLE).then(|| {
        format!("low sample size ({n_playouts} playouts per implementation); statistics are unreliable")
    });
    Ok(EquivalenceReport {
        game: game.name().to_string(),
        strategy: game.strategy().label(),
        n_playouts,
        mean_len_standard: ms,
        mean_len_optimised: mo,
        len_ratio,
        chi_square: chi.statistic,
        chi_square_df: chi.df,
        chi_square_p: chi.p_value,
        outcome_distance: stats::total_variation(&oa, &ob),
        warning,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(strategy: &str, speedup: f64) -> BenchResult {
        BenchResult {
            game: "g".into(),
            strategy: strategy.into(),
            pps_standard: 1.0,
            pps_optimised: speedup,
            speedup,
            mean_len_standard: 1.0,
            mean_len_optimised: 1.0,
            len_ratio: 1.0,
            n_standard: 1,
            n_optimised: 1,
            rejection_rate: 0.0,
        }
    }

    #[test]
    fn speedup_is_throughput_ratio() {
        let s = Measurement {
            playouts_per_sec: 500.0,
            mean_length: 10.0,
            playout_count: 5,
            rejection_rate: 0.0,
        };
        let o = Measurement {
            playouts_per_sec: 1000.0,
            mean_length: 11.0,
            ..s
        };
        let r = BenchResult::from_measurements("g", "Filter{pattern:1}", &s, &o);
        assert_eq!(r.speedup, 2.0);
        assert!((r.len_ratio - 1.1).abs() < 1e-12);
    }

    #[test]
    fn aggregate_rows_per_family_plus_all() {
        let rows = vec![
            row("AddToEmpty{swap:false}", 2.0),
            row("AddToEmpty{swap:true}", 4.0),
            row("Filter{pattern:3}", 10.0),
        ];
        let agg = aggregates(&rows);
        let names: Vec<&str> = agg.iter().map(|a| a.strategy.as_str()).collect();
        assert_eq!(names, ["AddToEmpty", "Filter", "All"]);
        assert_eq!(agg[0].median, 3.0);
        let all = &agg[2];
        assert!(all.min <= all.median && all.median <= all.max);
        assert!(all.min <= all.mean && all.mean <= all.max);
    }
}
