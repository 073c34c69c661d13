//! Game description language: an S-expression ludeme format.
//!
//! ```text
//! (game "Tic-Tac-Toe"
//!     (players 2)
//!     (equipment { (board (square 3)) (piece "Disc" P1) (piece "Cross" P2) })
//!     (rules
//!         (play (move Add (to (sites Empty))))
//!         (end (if (is Line 3) (result Mover Win)))))
//! ```

mod sexpr;
mod vocab;

pub use sexpr::{parse_sexpr, pretty, Atom, SExpr};
pub use vocab::{is_supported, VOCABULARY};

use thiserror::Error;

pub const MAX_PLAYERS: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GdlError {
    #[error("syntax error at byte {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },
    #[error("unknown ludeme `{0}`")]
    UnknownLudeme(String),
    #[error("invalid game description: {0}")]
    Validation(String),
}

fn invalid(msg: impl Into<String>) -> GdlError {
    GdlError::Validation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoardSpec {
    Square(u16),
    Rectangle { rows: u16, cols: u16 },
    /// Rhombus of `n × n` hexagonal cells (Hex).
    HexDiamond(u16),
    /// Regular hexagon with `n` cells per side (Havannah, Yavalath).
    Hexagon(u16),
}

impl BoardSpec {
    pub fn site_count(&self) -> usize {
        match *self {
            BoardSpec::Square(n) | BoardSpec::HexDiamond(n) => n as usize * n as usize,
            BoardSpec::Rectangle { rows, cols } => rows as usize * cols as usize,
            BoardSpec::Hexagon(n) => {
                let n = n as usize;
                3 * n * (n - 1) + 1
            }
        }
    }

    fn to_sexpr(self) -> SExpr {
        let int = |v: u16| SExpr::int(v as i64);
        match self {
            BoardSpec::Square(n) => SExpr::list("square", vec![int(n)]),
            BoardSpec::Rectangle { rows, cols } => {
                SExpr::list("rectangle", vec![int(rows), int(cols)])
            }
            BoardSpec::HexDiamond(n) => SExpr::list("hex", vec![SExpr::ident("Diamond"), int(n)]),
            BoardSpec::Hexagon(n) => SExpr::list("hex", vec![int(n)]),
        }
    }

    fn from_sexpr(e: &SExpr) -> Result<Self, GdlError> {
        let size = |v: &SExpr| -> Result<u16, GdlError> {
            match v.as_int() {
                Some(n) if (1..=64).contains(&n) => Ok(n as u16),
                _ => Err(invalid(format!("board dimension must be 1..=64, got `{v}`"))),
            }
        };
        let args = e.positional();
        let spec = match (e.head(), args.as_slice()) {
            (Some("square"), [n]) => BoardSpec::Square(size(n)?),
            (Some("rectangle"), [r, c]) => BoardSpec::Rectangle {
                rows: size(r)?,
                cols: size(c)?,
            },
            (Some("hex"), [kind, n]) if kind.as_ident() == Some("Diamond") => {
                BoardSpec::HexDiamond(size(n)?)
            }
            (Some("hex"), [n]) => BoardSpec::Hexagon(size(n)?),
            _ => return Err(invalid(format!("unsupported board shape `{e}`"))),
        };
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Owner {
    Player(u8),
    Each,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PieceSpec {
    pub name: String,
    pub owner: Owner,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndRule {
    pub condition: SExpr,
    pub result: SExpr,
}

/// A validated game description. Rule bodies stay as S-expressions; they are
/// compiled into evaluable form by [`crate::engine::Game::new`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameDescription {
    pub name: String,
    pub player_count: u8,
    pub board: BoardSpec,
    pub pieces: Vec<PieceSpec>,
    pub start_rules: Vec<SExpr>,
    pub meta_rules: Vec<SExpr>,
    /// The full `(play ...)` form.
    pub play_rule: SExpr,
    pub end_rules: Vec<EndRule>,
}

impl GameDescription {
    pub fn has_meta(&self, name: &str) -> bool {
        self.meta_rules.iter().any(|m| m.is(name))
    }

    /// The generator inside `(play ...)`.
    pub fn play_body(&self) -> &SExpr {
        self.play_rule.positional()[0]
    }

    pub fn to_sexpr(&self) -> SExpr {
        let mut equipment = vec![SExpr::list("board", vec![self.board.to_sexpr()])];
        for p in &self.pieces {
            let owner = match p.owner {
                Owner::Player(n) => SExpr::ident(&format!("P{n}")),
                Owner::Each => SExpr::ident("Each"),
            };
            equipment.push(SExpr::list("piece", vec![SExpr::string(&p.name), owner]));
        }
        let group = |head: &str, items: &[SExpr]| {
            let inner = match items {
                [one] => one.clone(),
                many => SExpr::Seq(many.to_vec()),
            };
            SExpr::list(head, vec![inner])
        };
        let mut rules = Vec::new();
        if !self.start_rules.is_empty() {
            rules.push(group("start", &self.start_rules));
        }
        if !self.meta_rules.is_empty() {
            rules.push(group("meta", &self.meta_rules));
        }
        rules.push(self.play_rule.clone());
        if !self.end_rules.is_empty() {
            let ends: Vec<SExpr> = self
                .end_rules
                .iter()
                .map(|r| SExpr::list("if", vec![r.condition.clone(), r.result.clone()]))
                .collect();
            rules.push(group("end", &ends));
        }
        SExpr::list(
            "game",
            vec![
                SExpr::string(&self.name),
                SExpr::list("players", vec![SExpr::int(self.player_count as i64)]),
                SExpr::list("equipment", vec![SExpr::Seq(equipment)]),
                SExpr::list("rules", rules),
            ],
        )
    }
}

fn check_vocabulary(expr: &SExpr) -> Result<(), GdlError> {
    let mut unknown = None;
    expr.walk(&mut |e| {
        if unknown.is_some() {
            return;
        }
        let word = match e {
            SExpr::Atom(Atom::Ident(s)) => s.as_str(),
            SExpr::List { head, .. } => head.as_str(),
            _ => return,
        };
        if !is_supported(word) {
            unknown = Some(word.to_string());
        }
    });
    match unknown {
        Some(word) => Err(GdlError::UnknownLudeme(word)),
        None => Ok(()),
    }
}

fn parse_owner(e: &SExpr, players: u8) -> Result<Owner, GdlError> {
    match e.as_ident() {
        Some("Each") => Ok(Owner::Each),
        Some(s) if s.starts_with('P') => match s[1..].parse::<u8>() {
            Ok(n) if n >= 1 && n <= players => Ok(Owner::Player(n)),
            _ => Err(invalid(format!("piece owner `{s}` is not a player of this game"))),
        },
        _ => Err(invalid(format!("expected piece owner, got `{e}`"))),
    }
}

/// Parses and validates `.lud` text.
pub fn parse(text: &str) -> Result<GameDescription, GdlError> {
    let top = parse_sexpr(text)?;
    check_vocabulary(&top)?;
    from_sexpr(&top)
}

pub fn from_sexpr(top: &SExpr) -> Result<GameDescription, GdlError> {
    let Some(("game", args)) = top.as_list() else {
        return Err(invalid("top-level form must be `(game ...)`"));
    };
    let name = match args.first().and_then(SExpr::as_str) {
        Some(n) if !n.trim().is_empty() => n.to_string(),
        Some(_) => return Err(invalid("game name must not be empty")),
        None => return Err(invalid("game must start with a quoted name")),
    };

    let mut players = None;
    let mut equipment = None;
    let mut rules = None;
    for part in &args[1..] {
        let slot = match part.head() {
            Some("players") => &mut players,
            Some("equipment") => &mut equipment,
            Some("rules") => &mut rules,
            _ => return Err(invalid(format!("unexpected `{part}` in game"))),
        };
        if slot.replace(part).is_some() {
            return Err(invalid(format!("duplicate `{}` block", part.head().unwrap_or(""))));
        }
    }

    let players = players.ok_or_else(|| invalid("missing `(players n)`"))?;
    let player_count = match players.positional().as_slice() {
        [n] => match n.as_int() {
            Some(v) if v >= 1 && v <= MAX_PLAYERS as i64 => v as u8,
            Some(v) => return Err(invalid(format!("player count must be 1..={MAX_PLAYERS}, got {v}"))),
            None => return Err(invalid("player count must be an integer")),
        },
        _ => return Err(invalid("`players` takes exactly one integer")),
    };

    let equipment = equipment.ok_or_else(|| invalid("missing `(equipment ...)`"))?;
    let mut board = None;
    let mut pieces = Vec::new();
    for group in equipment.positional() {
        for item in group.items() {
            match item.head() {
                Some("board") => {
                    let [shape] = item.positional()[..] else {
                        return Err(invalid("`board` takes one shape"));
                    };
                    if board.replace(BoardSpec::from_sexpr(shape)?).is_some() {
                        return Err(invalid("more than one board"));
                    }
                }
                Some("piece") => match item.positional()[..] {
                    [name, owner] => {
                        let name = name
                            .as_str()
                            .filter(|n| !n.is_empty())
                            .ok_or_else(|| invalid("piece name must be a non-empty string"))?;
                        pieces.push(PieceSpec {
                            name: name.to_string(),
                            owner: parse_owner(owner, player_count)?,
                        });
                    }
                    _ => return Err(invalid(format!("malformed piece `{item}`"))),
                },
                _ => return Err(invalid(format!("unexpected equipment item `{item}`"))),
            }
        }
    }
    let board = board.ok_or_else(|| invalid("equipment has no board"))?;
    if board.site_count() == 0 {
        return Err(invalid("board has no sites"));
    }
    if pieces.is_empty() {
        return Err(invalid("equipment declares no pieces"));
    }

    let rules = rules.ok_or_else(|| invalid("missing `(rules ...)`"))?;
    let mut start_rules = Vec::new();
    let mut meta_rules = Vec::new();
    let mut play_rule = None;
    let mut end_rules = Vec::new();
    for block in rules.positional() {
        match block.head() {
            Some("start") | Some("meta") | Some("end") => {
                let [body] = block.positional()[..] else {
                    return Err(invalid(format!("`{}` takes one rule or a {{...}} list", block.head().unwrap())));
                };
                for item in body.items() {
                    match block.head() {
                        Some("start") => {
                            if !item.is("place") {
                                return Err(invalid(format!("start rules must be `place`, got `{item}`")));
                            }
                            start_rules.push(item.clone());
                        }
                        Some("meta") => {
                            if !(item.is("swap") || item.is("noRepeat")) {
                                return Err(invalid(format!("unsupported meta rule `{item}`")));
                            }
                            meta_rules.push(item.clone());
                        }
                        _ => match (item.head(), item.positional().as_slice()) {
                            (Some("if"), [condition, result]) => end_rules.push(EndRule {
                                condition: (*condition).clone(),
                                result: (*result).clone(),
                            }),
                            _ => return Err(invalid(format!("end rules must be `(if <cond> <result>)`, got `{item}`"))),
                        },
                    }
                }
            }
            Some("play") => {
                if block.positional().len() != 1 {
                    return Err(invalid("`play` takes exactly one move generator"));
                }
                if play_rule.replace(block.clone()).is_some() {
                    return Err(invalid("more than one play rule"));
                }
            }
            _ => return Err(invalid(format!("unexpected rules block `{block}`"))),
        }
    }
    let play_rule = play_rule.ok_or_else(|| invalid("rules contain no play rule"))?;

    Ok(GameDescription {
        name,
        player_count,
        board,
        pieces,
        start_rules,
        meta_rules,
        play_rule,
        end_rules,
    })
}

/// Canonical `.lud` rendering; re-parses to an equal description.
pub fn print(desc: &GameDescription) -> String {
    pretty(&desc.to_sexpr())
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const TIC_TAC_TOE: &str = r#"
    (game "Tic-Tac-Toe"
        (players 2)
        (equipment {
            (board (square 3))
            (piece "Disc" P1)
            (piece "Cross" P2)
        })
        (rules
            (play (move Add (to (sites Empty))))
            (end (if (is Line 3) (result Mover Win)))
        )
    )
    "#;

    #[test]
    fn parses_tic_tac_toe_verbatim() {
        let d = parse(TIC_TAC_TOE).unwrap();
        assert_eq!(d.name, "Tic-Tac-Toe");
        assert_eq!(d.player_count, 2);
        assert_eq!(d.board, BoardSpec::Square(3));
        assert_eq!(d.board.site_count(), 9);
        assert_eq!(
            d.play_rule,
            parse_sexpr("(play (move Add (to (sites Empty))))").unwrap()
        );
        assert_eq!(d.end_rules.len(), 1);
        assert_eq!(d.pieces[1].owner, Owner::Player(2));
        assert!(d.meta_rules.is_empty());
    }

    #[test]
    fn round_trip_is_identity() {
        let d = parse(TIC_TAC_TOE).unwrap();
        let printed = print(&d);
        assert_eq!(parse(&printed).unwrap(), d);
        assert_eq!(print(&parse(&printed).unwrap()), printed);
    }

    #[test]
    fn printing_keeps_colon_keywords() {
        let text = r#"(game "F" (players 2) (equipment { (board (square 5)) (piece "Stone" Each) })
            (rules (play (or (do (move Add (to (sites Empty))) ifAfterwards:(> (liberties (last To)) 0)) (move Pass)))))"#;
        let d = parse(text).unwrap();
        let printed = print(&d);
        assert!(printed.contains("ifAfterwards:(> (liberties (last To)) 0)"), "{printed}");
        assert_eq!(parse(&printed).unwrap(), d);
    }

    #[test]
    fn missing_play_rule_is_validation_error() {
        let text = r#"(game "X" (players 1) (equipment { (board (square 2)) (piece "A" P1) }) (rules))"#;
        assert!(matches!(parse(text), Err(GdlError::Validation(_))));
    }

    #[test]
    fn structural_errors() {
        let base = |players: &str, rules: &str| {
            format!(r#"(game "X" (players {players}) (equipment {{ (board (square 3)) (piece "A" P1) }}) (rules {rules}))"#)
        };
        let play = "(play (move Pass))";
        assert!(matches!(parse(&base("0", play)), Err(GdlError::Validation(_))));
        assert!(matches!(parse(&base("2", &format!("{play} {play}"))), Err(GdlError::Validation(_))));
        assert!(parse(&base("2", play)).is_ok());
        let empty_name = r#"(game "" (players 2) (equipment { (board (square 3)) (piece "A" P1) }) (rules (play (move Pass))))"#;
        assert!(matches!(parse(empty_name), Err(GdlError::Validation(_))));
    }

    #[test]
    fn unknown_ludeme_is_named() {
        let text = r#"(game "X" (players 2) (equipment { (board (square 3)) (piece "A" P1) }) (rules (play (move Hop))))"#;
        assert_eq!(parse(text), Err(GdlError::UnknownLudeme("Hop".into())));
        let text = r#"(game "X" (players 2) (equipment { (board (square 3)) (piece "A" P1) }) (rules (play (shuffle))))"#;
        assert_eq!(parse(text), Err(GdlError::UnknownLudeme("shuffle".into())));
    }

    #[test]
    fn unbalanced_text_is_syntax_error() {
        let text = &TIC_TAC_TOE.trim()[..TIC_TAC_TOE.trim().len() - 1];
        assert!(matches!(parse(text), Err(GdlError::Syntax { .. })));
    }

    #[test]
    fn parsing_is_deterministic() {
        assert_eq!(parse(TIC_TAC_TOE), parse(TIC_TAC_TOE));
    }
}
