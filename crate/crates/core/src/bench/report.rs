use std::io::Write;

use serde::Serialize;

use super::{BenchResult, CompareReport};

/// Writes one CSV row per measured game.
pub fn write_csv<W: Write>(out: W, results: &[BenchResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if results.is_empty() {
        w.write_record([
            "game",
            "strategy",
            "pps_standard",
            "pps_optimised",
            "speedup",
            "mean_len_standard",
            "mean_len_optimised",
            "len_ratio",
            "n_standard",
            "n_optimised",
            "rejection_rate",
        ])?;
    }
    for r in results {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(out: W, report: &CompareReport) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, report)
}

#[derive(Serialize)]
struct PlotRow<'a> {
    game: &'a str,
    strategy: &'a str,
    speedup: f64,
}

/// Speedup per game, sorted ascending, as CSV suitable for a bar chart.
pub fn plot_data<W: Write>(out: W, results: &[BenchResult]) -> csv::Result<()> {
    let mut rows: Vec<PlotRow> = results
        .iter()
        .map(|r| PlotRow {
            game: &r.game,
            strategy: &r.strategy,
            speedup: r.speedup,
        })
        .collect();
    rows.sort_by(|a, b| a.speedup.total_cmp(&b.speedup));
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["game", "strategy", "speedup"])?;
    }
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
