use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use playout_forge::bench::{self, Agent, BenchConfig};
use playout_forge::corpus;
use playout_forge::engine::Game;

#[derive(Parser)]
#[command(name = "playout-forge", version, about = "Fast playouts for board games described in a ludeme language")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure standard and optimised playout throughput over a corpus.
    Bench {
        #[arg(long, default_value_os_t = corpus::bundled_dir())]
        corpus: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        warmup_secs: f64,
        #[arg(long, default_value_t = 30.0)]
        measure_secs: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        plot_data: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        parallel_games: usize,
    },
    /// Compare standard and optimised playouts statistically.
    Verify {
        #[arg(long)]
        game: String,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the playout strategy detected for a game.
    Detect {
        #[arg(long)]
        game: String,
    },
    /// Play a match between two agents.
    Play {
        #[arg(long)]
        game: String,
        /// `random` or `mcts:<iterations>`.
        #[arg(long, default_value = "mcts:1000")]
        agent: String,
        #[arg(long, default_value = "random")]
        vs: String,
        #[arg(long, default_value_t = 10)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// A `.lud` path, or the stem of a bundled game.
fn load(game: &str) -> Result<Game> {
    let path = Path::new(game);
    if path.exists() {
        return corpus::load_game(path).with_context(|| format!("loading {game}"));
    }
    corpus::bundled(game).ok_or_else(|| anyhow!("no file or bundled game named `{game}`"))
}

fn parse_agent(spec: &str, game: &Game) -> Result<Agent> {
    if spec == "random" {
        return Ok(Agent::Random);
    }
    if let Some(n) = spec.strip_prefix("mcts:") {
        let iterations = n.parse().with_context(|| format!("bad iteration count in `{spec}`"))?;
        return Ok(Agent::Mcts {
            iterations,
            kind: game.strategy().kind(),
        });
    }
    bail!("unknown agent `{spec}`; expected `random` or `mcts:<iterations>`")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// Returns `Ok(false)` when an equivalence check fails.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bench {
            corpus,
            warmup_secs,
            measure_secs,
            seed,
            out,
            json,
            plot_data,
            parallel_games,
        } => {
            let cfg = BenchConfig {
                warmup_secs,
                measure_secs,
                seed,
                parallel_games: parallel_games.max(1),
            };
            let report = bench::compare(&corpus, &cfg)?;
            match out {
                Some(p) => bench::write_csv(create(&p)?, &report.results)?,
                None => bench::write_csv(io::stdout().lock(), &report.results)?,
            }
            if let Some(p) = json {
                bench::write_json(create(&p)?, &report)?;
            }
            if let Some(p) = plot_data {
                bench::plot_data(create(&p)?, &report.results)?;
            }
            for a in &report.aggregates {
                eprintln!(
                    "{:<14} games={:<3} min={:.2} median={:.2} mean={:.2} max={:.2}",
                    a.strategy, a.games, a.min, a.median, a.mean, a.max
                );
            }
            for s in &report.skipped {
                eprintln!("skipped {}: {}", s.game, s.reason);
            }
            for s in &report.failures {
                eprintln!("failed {}: {}", s.game, s.reason);
            }
            if report.metadata.timing_noise {
                eprintln!("note: games were timed concurrently; throughput figures may interfere");
            }
            Ok(true)
        }
        Command::Verify { game, n, seed } => {
            let game = load(&game)?;
            let r = bench::verify_equivalence(&game, n, seed)?;
            println!("game          {}", r.game);
            println!("strategy      {}", r.strategy);
            println!("playouts      {} per implementation", r.n_playouts);
            println!("mean length   {:.3} standard, {:.3} optimised", r.mean_len_standard, r.mean_len_optimised);
            println!("length ratio  {:.4}", r.len_ratio);
            println!("first move    chi2={:.3} df={} p={:.4}", r.chi_square, r.chi_square_df, r.chi_square_p);
            println!("outcome TV    {:.4}", r.outcome_distance);
            if let Some(w) = &r.warning {
                eprintln!("warning: {w}");
            }
            for f in &r.failures {
                eprintln!("FAIL: {f}");
            }
            println!("{}", if r.passed() { "PASS" } else { "FAIL" });
            Ok(r.passed())
        }
        Command::Detect { game } => {
            let game = load(&game)?;
            println!("{}\t{}", game.name(), game.strategy().label());
            Ok(true)
        }
        Command::Play { game, agent, vs, n, seed } => {
            let game = load(&game)?;
            let a = parse_agent(&agent, &game)?;
            let b = parse_agent(&vs, &game)?;
            let r = bench::play_match(&game, a, b, n, seed)?;
            println!(
                "{agent} vs {vs}: {} wins, {} losses, {} draws over {} games (score {:.3})",
                r.first_wins,
                r.second_wins,
                r.draws,
                r.games,
                r.first_score()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
