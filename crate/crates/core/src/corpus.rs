//! Loading `.lud` files and the games bundled with the crate.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::engine::Game;
use crate::gdl::{self, GdlError};
use crate::ludemes::EvalError;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] GdlError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Bundled games by file stem.
pub const BUNDLED: &[(&str, &str)] = &[
    ("breakthrough", include_str!("../games/breakthrough.lud")),
    ("golite", include_str!("../games/golite.lud")),
    ("gomoku", include_str!("../games/gomoku.lud")),
    ("havannah", include_str!("../games/havannah.lud")),
    ("hex", include_str!("../games/hex.lud")),
    ("nogo", include_str!("../games/nogo.lud")),
    ("promotion", include_str!("../games/promotion.lud")),
    ("repetition", include_str!("../games/repetition.lud")),
    ("tictactoe", include_str!("../games/tictactoe.lud")),
    ("yavalath", include_str!("../games/yavalath.lud")),
];

/// Directory holding the bundled `.lud` files and their manifest.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("games")
}

pub fn game_from_text(text: &str) -> Result<Game, LoadError> {
    Ok(Game::new(gdl::parse(text)?)?)
}

/// A bundled game by file stem, e.g. `"hex"`.
pub fn bundled(stem: &str) -> Option<Game> {
    BUNDLED
        .iter()
        .find(|(s, _)| *s == stem)
        .map(|(_, text)| game_from_text(text).expect("bundled games are valid"))
}

pub fn load_game(path: &Path) -> Result<Game, LoadError> {
    let text = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    game_from_text(&text)
}

/// A corpus file and the result of loading it.
pub type CorpusEntry = (PathBuf, Result<Game, LoadError>);

/// Every `.lud` file of `dir`, sorted by file name, each loaded
/// independently so one broken file does not hide the others.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, LoadError> {
    let entries = fs::read_dir(dir).map_err(|source| LoadError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lud"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let game = load_game(&p);
            (p, game)
        })
        .collect())
}
