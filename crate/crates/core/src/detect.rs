//! Syntactic detection of the playout strategy a game admits.
//!
//! Matching looks only at the shape of the play rule and the meta rules:
//!
//! | strategy       | play rule                                            |
//! |----------------|------------------------------------------------------|
//! | AddToEmpty     | `(move Add (to (sites Empty)))`                      |
//! | Filter 1       | `(do A ifAfterwards:B)`                              |
//! | Filter 2       | `(if A B (do C ifAfterwards:D))`                     |
//! | Filter 3       | `(or (do A ifAfterwards:B) (move Pass))`             |
//! | NoRepetition   | anything else, with `(noRepeat)` among meta rules    |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gdl::{GameDescription, SExpr};

/// Sub-rules captured by a filter template. Pattern 1 and 3 fill `a` and `b`
/// only; pattern 2 fills all four.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FilterPattern {
    pub pattern: u8,
    pub a: SExpr,
    pub b: SExpr,
    pub c: Option<SExpr>,
    pub d: Option<SExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlayoutStrategy {
    Standard,
    AddToEmpty { swap: bool },
    Filter(FilterPattern),
    NoRepetition { base: SExpr },
}

/// Strategy family without the captured sub-rules; used to request a
/// strategy and to group results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    Standard,
    AddToEmpty,
    Filter,
    NoRepetition,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Standard => "Standard",
            StrategyKind::AddToEmpty => "AddToEmpty",
            StrategyKind::Filter => "Filter",
            StrategyKind::NoRepetition => "NoRepetition",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(StrategyKind::Standard),
            "addtoempty" | "add-to-empty" => Ok(StrategyKind::AddToEmpty),
            "filter" => Ok(StrategyKind::Filter),
            "norepetition" | "no-repetition" => Ok(StrategyKind::NoRepetition),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

impl PlayoutStrategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            PlayoutStrategy::Standard => StrategyKind::Standard,
            PlayoutStrategy::AddToEmpty { .. } => StrategyKind::AddToEmpty,
            PlayoutStrategy::Filter(_) => StrategyKind::Filter,
            PlayoutStrategy::NoRepetition { .. } => StrategyKind::NoRepetition,
        }
    }

    /// Tag including the parameters, e.g. `Filter{pattern:3}`.
    pub fn label(&self) -> String {
        match self {
            PlayoutStrategy::Standard => "Standard".into(),
            PlayoutStrategy::AddToEmpty { swap } => format!("AddToEmpty{{swap:{swap}}}"),
            PlayoutStrategy::Filter(p) => format!("Filter{{pattern:{}}}", p.pattern),
            PlayoutStrategy::NoRepetition { .. } => "NoRepetition".into(),
        }
    }
}

impl fmt::Display for PlayoutStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn is_add_to_empty(body: &SExpr) -> bool {
    let Some(("move", args)) = body.as_list() else {
        return false;
    };
    let [kind, to] = args else { return false };
    if kind.as_ident() != Some("Add") {
        return false;
    }
    let Some(("to", [region])) = to.as_list() else {
        return false;
    };
    matches!(region.as_list(), Some(("sites", [w])) if w.as_ident() == Some("Empty"))
}

/// `(do X ifAfterwards:Y)` with nothing else in the list.
fn do_after(e: &SExpr) -> Option<(&SExpr, &SExpr)> {
    let ("do", args) = e.as_list()? else { return None };
    if args.len() != 3 {
        return None;
    }
    let body = e.positional();
    let post = e.named("ifAfterwards")?;
    match body.as_slice() {
        [body] => Some((body, post)),
        _ => None,
    }
}

fn is_pass(e: &SExpr) -> bool {
    matches!(e.as_list(), Some(("move", [w])) if w.as_ident() == Some("Pass"))
}

fn filter_pattern(body: &SExpr) -> Option<FilterPattern> {
    if let Some((a, b)) = do_after(body) {
        return Some(FilterPattern {
            pattern: 1,
            a: a.clone(),
            b: b.clone(),
            c: None,
            d: None,
        });
    }
    match body.as_list()? {
        ("if", [a, b, rest]) => {
            let (c, d) = do_after(rest)?;
            Some(FilterPattern {
                pattern: 2,
                a: a.clone(),
                b: b.clone(),
                c: Some(c.clone()),
                d: Some(d.clone()),
            })
        }
        ("or", [first, pass]) if is_pass(pass) => {
            let (a, b) = do_after(first)?;
            Some(FilterPattern {
                pattern: 3,
                a: a.clone(),
                b: b.clone(),
                c: None,
                d: None,
            })
        }
        _ => None,
    }
}

/// First matching strategy in the order AddToEmpty, Filter, NoRepetition,
/// Standard.
pub fn detect(desc: &GameDescription) -> PlayoutStrategy {
    let body = desc.play_body();
    if is_add_to_empty(body) {
        return PlayoutStrategy::AddToEmpty {
            swap: desc.has_meta("swap"),
        };
    }
    if let Some(p) = filter_pattern(body) {
        return PlayoutStrategy::Filter(p);
    }
    if desc.has_meta("noRepeat") {
        return PlayoutStrategy::NoRepetition { base: body.clone() };
    }
    PlayoutStrategy::Standard
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdl::{parse, parse_sexpr};

    fn with_play(play: &str, meta: &str) -> GameDescription {
        parse(&format!(
            r#"(game "T" (players 2) (equipment {{ (board (square 5)) (piece "Stone" Each) }})
               (rules {meta} (play {play}) (end (if (is Full) (result Mover Draw)))))"#
        ))
        .unwrap()
    }

    #[test]
    fn add_to_empty_and_swap() {
        let d = with_play("(move Add (to (sites Empty)))", "");
        assert_eq!(detect(&d), PlayoutStrategy::AddToEmpty { swap: false });
        let d = with_play("(move Add (to (sites Empty)))", "(meta (swap))");
        assert_eq!(detect(&d).label(), "AddToEmpty{swap:true}");
        let d = with_play("(move Add (to (sites Empty)))", "(meta { (swap) (noRepeat) })");
        assert_eq!(detect(&d).kind(), StrategyKind::AddToEmpty);
    }

    #[test]
    fn add_with_filter_is_not_add_to_empty() {
        let d = with_play("(move Add (to (sites Empty) if:(not (is Eye (to)))))", "");
        assert_eq!(detect(&d), PlayoutStrategy::Standard);
        let d = with_play("(move Add (to (sites Board)))", "");
        assert_eq!(detect(&d), PlayoutStrategy::Standard);
    }

    #[test]
    fn filter_patterns_capture_sub_rules() {
        let d = with_play(
            "(or (do (move Add (to (sites Empty) if:(not (is Eye (to))))) ifAfterwards:(> (liberties (last To)) 0)) (move Pass))",
            "(meta (noRepeat))",
        );
        let PlayoutStrategy::Filter(p) = detect(&d) else { panic!() };
        assert_eq!(p.pattern, 3);
        assert_eq!(p.a, parse_sexpr("(move Add (to (sites Empty) if:(not (is Eye (to)))))").unwrap());
        assert_eq!(p.b, parse_sexpr("(> (liberties (last To)) 0)").unwrap());

        let d = with_play("(do (move Add (to (sites Empty))) ifAfterwards:(is Full))", "");
        let PlayoutStrategy::Filter(p) = detect(&d) else { panic!() };
        assert_eq!((p.pattern, p.c), (1, None));

        let d = with_play(
            "(if (is Prev Mover) (move Pass) (do (move Step All) ifAfterwards:(is Full)))",
            "",
        );
        let PlayoutStrategy::Filter(p) = detect(&d) else { panic!() };
        assert_eq!(p.pattern, 2);
        assert_eq!(p.c.unwrap(), parse_sexpr("(move Step All)").unwrap());
        assert_eq!(p.d.unwrap(), parse_sexpr("(is Full)").unwrap());
    }

    #[test]
    fn templates_do_not_match_extra_structure() {
        let d = with_play("(or (do (move Step All) ifAfterwards:(is Full)) (move Pass) (move Pass))", "");
        assert_eq!(detect(&d), PlayoutStrategy::Standard);
        let d = with_play("(or (move Pass) (do (move Step All) ifAfterwards:(is Full)))", "");
        assert_eq!(detect(&d), PlayoutStrategy::Standard);
        let d = with_play("(if (is Full) (do (move Step All) ifAfterwards:(is Full)))", "");
        assert_eq!(detect(&d), PlayoutStrategy::Standard);
    }

    #[test]
    fn no_repetition_and_fallback() {
        let d = with_play("(move Step Orthogonal to:Empty)", "(meta (noRepeat))");
        assert_eq!(detect(&d).kind(), StrategyKind::NoRepetition);
        let d = with_play("(move Step Orthogonal to:Empty)", "");
        assert_eq!(detect(&d), PlayoutStrategy::Standard);
    }

    #[test]
    fn kind_parses_from_text() {
        assert_eq!("filter".parse::<StrategyKind>(), Ok(StrategyKind::Filter));
        assert!("fast".parse::<StrategyKind>().is_err());
    }
}
