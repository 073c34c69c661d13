use std::fs;

use rand::Rng;

use playout_forge::bench::{
    self, compare, measure, verify_equivalence, verify_equivalence_with, BenchConfig, BenchError,
};
use playout_forge::corpus::{self, bundled};
use playout_forge::detect::StrategyKind;
use playout_forge::engine::{Game, GameState};
use playout_forge::playout::{optimised_playout, PlayoutConfig, PlayoutError, PlayoutResult};

const HEADER: &str =
    "game,strategy,pps_standard,pps_optimised,speedup,mean_len_standard,mean_len_optimised,len_ratio,n_standard,n_optimised,rejection_rate";

/// Add-to-empty playout that never opens on site 0.
fn skips_corner(game: &Game, state: &GameState, cfg: &PlayoutConfig) -> Result<PlayoutResult, PlayoutError> {
    let mut rng = cfg.rng();
    let moves: Vec<_> = game.legal_moves(state).into_iter().filter(|m| m.to != Some(0)).collect();
    let first = moves[rng.gen_range(0..moves.len())];
    let next = game.apply(state, &first)?;
    let mut r = optimised_playout(game, &next, cfg)?;
    r.length += 1;
    r.first_move = Some(first);
    Ok(r)
}

#[test]
fn broken_strategy_fails_chi_square() {
    let ttt = bundled("tictactoe").unwrap();
    let r = verify_equivalence_with(&ttt, 10_000, 1, skips_corner).unwrap();
    assert!(!r.passed());
    assert!(r.chi_square_p < 1e-6, "{r:?}");
    assert!(r.failures.iter().any(|f| f.contains("chi-square")));
}

#[test]
fn tictactoe_equivalence() {
    let ttt = bundled("tictactoe").unwrap();
    let r = verify_equivalence(&ttt, 100_000, 1).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!((0.99..=1.01).contains(&r.len_ratio), "{}", r.len_ratio);
    assert!(r.warning.is_none());
    assert_eq!(r.chi_square_df, 8);
}

#[test]
fn small_samples_are_flagged() {
    let nogo = bundled("nogo").unwrap();
    let r = verify_equivalence(&nogo, 100, 3).unwrap();
    assert!(r.warning.as_deref().unwrap().contains("low sample size"));
    let again = verify_equivalence(&nogo, 100, 3).unwrap();
    assert_eq!(format!("{r:?}"), format!("{again:?}"));
}

#[test]
fn standard_games_cannot_be_verified() {
    let g = bundled("breakthrough").unwrap();
    assert!(matches!(verify_equivalence(&g, 10, 1), Err(BenchError::Config(_))));
}

#[test]
fn measure_rejects_mismatch() {
    let ttt = bundled("tictactoe").unwrap();
    assert!(matches!(measure(&ttt, StrategyKind::Filter, 0.0, 1.0, 1), Err(BenchError::Config(_))));
    assert!(matches!(measure(&ttt, StrategyKind::AddToEmpty, 0.0, 0.0, 1), Err(BenchError::Config(_))));
}

#[test]
fn measure_counts_playouts() {
    let nogo = bundled("nogo").unwrap();
    let m = measure(&nogo, StrategyKind::Filter, 0.0, 5.0, 1).unwrap();
    assert!(m.playout_count >= 1);
    assert!((m.playouts_per_sec - m.playout_count as f64 / 5.0).abs() < 1e-9);
    assert!(m.rejection_rate > 0.0 && m.rejection_rate < 1.0);
    let hex = bundled("hex").unwrap();
    let m = measure(&hex, StrategyKind::AddToEmpty, 0.1, 0.5, 1).unwrap();
    assert_eq!(m.rejection_rate, 0.0);
}

#[test]
fn compare_reports_rows_skips_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    for stem in ["tictactoe", "breakthrough", "repetition"] {
        let src = corpus::bundled_dir().join(format!("{stem}.lud"));
        fs::copy(src, dir.path().join(format!("{stem}.lud"))).unwrap();
    }
    fs::write(dir.path().join("zzz.lud"), "(game").unwrap();
    let cfg = BenchConfig {
        warmup_secs: 0.05,
        measure_secs: 0.3,
        ..BenchConfig::default()
    };
    let report = compare(dir.path(), &cfg).unwrap();
    let games: Vec<&str> = report.results.iter().map(|r| r.game.as_str()).collect();
    assert_eq!(games, ["Runners", "Tic-Tac-Toe"]);
    assert_eq!(report.skipped.len(), 1);
    assert_eq!(report.skipped[0].reason, "no optimised strategy");
    assert_eq!(report.failures.len(), 1);
    assert!(!report.metadata.timing_noise);
    for r in &report.results {
        assert!((r.speedup - r.pps_optimised / r.pps_standard).abs() < 1e-12);
        assert!((r.len_ratio - r.mean_len_optimised / r.mean_len_standard).abs() < 1e-12);
    }
    let rows: Vec<&str> = report.aggregates.iter().map(|a| a.strategy.as_str()).collect();
    assert_eq!(rows, ["AddToEmpty", "NoRepetition", "All"]);

    let mut csv = Vec::new();
    bench::write_csv(&mut csv, &report.results).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(HEADER));
    assert_eq!(lines.count(), 2);

    let mut json = Vec::new();
    bench::write_json(&mut json, &report).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    assert_eq!(v["metadata"]["measure_secs"], 0.3);

    let mut plot = Vec::new();
    bench::plot_data(&mut plot, &report.results).unwrap();
    assert!(String::from_utf8(plot).unwrap().starts_with("game,strategy,speedup\n"));
}

#[test]
fn empty_csv_still_has_header() {
    let mut out = Vec::new();
    bench::write_csv(&mut out, &[]).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().trim_end(), HEADER);
}
