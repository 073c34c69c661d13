//! Compact text form of a position, `"<mover>|<cells>"`, used by fixtures.
//!
//! Each cell is `.` when empty or the initial of the piece name, upper case
//! for player 1 and lower case for player 2. `/` and whitespace are ignored,
//! so rows may be separated for readability.

use thiserror::Error;

use super::{Game, GameState, Player, Site};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("expected `<mover>|<cells>`")]
    Shape,
    #[error("invalid player to move `{0}`")]
    Mover(String),
    #[error("expected {expected} cells, found {found}")]
    Length { expected: usize, found: usize },
    #[error("no piece matches `{0}`")]
    Piece(char),
}

impl Game {
    /// Builds a state from its text form. The move counter starts at 0 and
    /// the repetition history holds only this position.
    pub fn state_from_text(&self, text: &str) -> Result<GameState, TextError> {
        let (mover, cells) = text.split_once('|').ok_or(TextError::Shape)?;
        let mover = match mover.trim().parse::<u8>() {
            Ok(p) if p >= 1 && p <= self.player_count() => Player(p),
            _ => return Err(TextError::Mover(mover.trim().to_string())),
        };
        let chars: Vec<char> = cells
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '/')
            .collect();
        let n = self.board().site_count();
        if chars.len() != n {
            return Err(TextError::Length {
                expected: n,
                found: chars.len(),
            });
        }
        let mut state = self.initial_state();
        for (s, &c) in chars.iter().enumerate() {
            state.cells[s] = match c {
                '.' => 0,
                c => {
                    let owner = Player(if c.is_uppercase() { 1 } else { 2 });
                    let initial = c.to_ascii_uppercase();
                    self.pieces()
                        .iter()
                        .position(|p| {
                            p.owner == owner && p.name.chars().next().map(|i| i.to_ascii_uppercase()) == Some(initial)
                        })
                        .ok_or(TextError::Piece(c))? as u8
                        + 1
                }
            };
        }
        state.mover = mover;
        state.move_number = 0;
        state.swapped = false;
        state.last_move = None;
        state.passes = 0;
        self.reset_derived(&mut state);
        Ok(state)
    }

    pub fn state_to_text(&self, state: &GameState) -> String {
        let mut out = format!("{}|", state.mover.0);
        for s in 0..self.board().site_count() {
            let c = match state.piece_at(s as Site) {
                None => '.',
                Some(p) => {
                    let def = &self.pieces()[p.0 as usize];
                    let c = def.name.chars().next().unwrap_or('?');
                    if def.owner == Player(1) {
                        c.to_ascii_uppercase()
                    } else {
                        c.to_ascii_lowercase()
                    }
                }
            };
            out.push(c);
        }
        out
    }
}
