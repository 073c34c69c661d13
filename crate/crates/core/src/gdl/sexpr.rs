use std::fmt;

use super::GdlError;

/// A leaf token of the description language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// Keyword or identifier. Named-argument keywords keep their trailing `:`.
    Ident(String),
    /// Quoted string, stored unescaped.
    Str(String),
    Int(i64),
}

/// Parsed S-expression.
///
/// `List` always carries an identifier head, so the "non-empty with an atom
/// head" invariant holds by construction. Brace groups `{ ... }` are plain
/// ordered sequences and may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SExpr {
    Atom(Atom),
    List { head: String, args: Vec<SExpr> },
    Seq(Vec<SExpr>),
}

impl SExpr {
    pub fn ident(name: &str) -> SExpr {
        SExpr::Atom(Atom::Ident(name.to_string()))
    }

    pub fn string(value: &str) -> SExpr {
        SExpr::Atom(Atom::Str(value.to_string()))
    }

    pub fn int(value: i64) -> SExpr {
        SExpr::Atom(Atom::Int(value))
    }

    pub fn list(head: &str, args: Vec<SExpr>) -> SExpr {
        SExpr::List {
            head: head.to_string(),
            args,
        }
    }

    pub fn as_ident(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Ident(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Str(s)) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            SExpr::Atom(Atom::Int(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<(&str, &[SExpr])> {
        match self {
            SExpr::List { head, args } => Some((head, args)),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        self.as_list().map(|(h, _)| h)
    }

    /// True for a list whose head is `head`.
    pub fn is(&self, head: &str) -> bool {
        self.head() == Some(head)
    }

    /// Value of a named argument (`key:` followed by a value) inside a list.
    pub fn named(&self, key: &str) -> Option<&SExpr> {
        let (_, args) = self.as_list()?;
        named_args(args).find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    /// Arguments of a list with every `key: value` pair removed.
    pub fn positional(&self) -> Vec<&SExpr> {
        match self {
            SExpr::List { args, .. } => positional_args(args),
            SExpr::Seq(items) => items.iter().collect(),
            SExpr::Atom(_) => Vec::new(),
        }
    }

    /// Items of a brace sequence, or the expression itself when it is not one.
    pub fn items(&self) -> Vec<&SExpr> {
        match self {
            SExpr::Seq(items) => items.iter().collect(),
            other => vec![other],
        }
    }

    /// Depth-first visit of every node, including `self`.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SExpr)) {
        f(self);
        match self {
            SExpr::Atom(_) => {}
            SExpr::List { args, .. } => args.iter().for_each(|a| a.walk(f)),
            SExpr::Seq(items) => items.iter().for_each(|a| a.walk(f)),
        }
    }
}

pub(crate) fn is_named_key(expr: &SExpr) -> bool {
    matches!(expr, SExpr::Atom(Atom::Ident(s)) if s.len() > 1 && s.ends_with(':'))
}

pub(crate) fn named_args(args: &[SExpr]) -> impl Iterator<Item = (&str, &SExpr)> {
    args.windows(2).filter_map(|w| {
        if is_named_key(&w[0]) {
            w[0].as_ident().map(|k| (k.trim_end_matches(':'), &w[1]))
        } else {
            None
        }
    })
}

pub(crate) fn positional_args(args: &[SExpr]) -> Vec<&SExpr> {
    let mut out = Vec::with_capacity(args.len());
    let mut i = 0;
    while i < args.len() {
        if is_named_key(&args[i]) {
            i += 2;
        } else {
            out.push(&args[i]);
            i += 1;
        }
    }
    out
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Ident(s) => f.write_str(s),
            Atom::Int(v) => write!(f, "{v}"),
            Atom::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[SExpr]) -> fmt::Result {
    let mut first = true;
    let mut glue_next = false;
    for item in items {
        if !first && !glue_next {
            f.write_str(" ")?;
        }
        first = false;
        glue_next = is_named_key(item);
        write!(f, "{item}")?;
    }
    Ok(())
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a) => write!(f, "{a}"),
            SExpr::List { head, args } => {
                write!(f, "({head}")?;
                if !args.is_empty() {
                    f.write_str(" ")?;
                    write_items(f, args)?;
                }
                f.write_str(")")
            }
            SExpr::Seq(items) => {
                f.write_str("{")?;
                if !items.is_empty() {
                    f.write_str(" ")?;
                    write_items(f, items)?;
                    f.write_str(" ")?;
                }
                f.write_str("}")
            }
        }
    }
}

const PRETTY_WIDTH: usize = 76;

/// Multi-line rendering in the layout of hand-written `.lud` files: short
/// forms stay on one line, long ones break their arguments onto indented lines.
pub fn pretty(expr: &SExpr) -> String {
    let mut out = String::new();
    pretty_into(expr, 0, &mut out);
    out.push('\n');
    out
}

fn pretty_into(expr: &SExpr, indent: usize, out: &mut String) {
    let flat = expr.to_string();
    let (open, head, items, close) = match expr {
        SExpr::List { head, args } if indent + flat.len() > PRETTY_WIDTH => {
            ("(", Some(head.as_str()), args.as_slice(), ")")
        }
        SExpr::Seq(items) if indent + flat.len() > PRETTY_WIDTH => ("{", None, items.as_slice(), "}"),
        _ => {
            out.push_str(&flat);
            return;
        }
    };
    out.push_str(open);
    let mut rest = items;
    if let Some(head) = head {
        out.push_str(head);
        // Keep leading atoms (`move Add`, `game "Hex"`) on the head line.
        while let Some((first, tail)) = rest.split_first() {
            if matches!(first, SExpr::Atom(_)) && !is_named_key(first) {
                out.push(' ');
                out.push_str(&first.to_string());
                rest = tail;
            } else {
                break;
            }
        }
    }
    let inner = indent + 4;
    let mut i = 0;
    while i < rest.len() {
        out.push('\n');
        out.push_str(&" ".repeat(inner));
        if is_named_key(&rest[i]) && i + 1 < rest.len() {
            out.push_str(&rest[i].to_string());
            pretty_into(&rest[i + 1], inner, out);
            i += 2;
        } else {
            pretty_into(&rest[i], inner, out);
            i += 1;
        }
    }
    out.push('\n');
    out.push_str(&" ".repeat(indent));
    out.push_str(close);
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    BraceOpen,
    BraceClose,
    Atom(Atom),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::BraceOpen => "`{`".into(),
            Tok::BraceClose => "`}`".into(),
            Tok::Atom(a) => format!("`{a}`"),
        }
    }
}

fn syntax(offset: usize, expected: &str, found: &str) -> GdlError {
    GdlError::Syntax {
        offset,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, GdlError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                toks.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::Close));
                i += 1;
            }
            b'{' => {
                toks.push((i, Tok::BraceOpen));
                i += 1;
            }
            b'}' => {
                toks.push((i, Tok::BraceClose));
                i += 1;
            }
            b'"' => {
                let start = i;
                i += 1;
                let mut value = String::new();
                loop {
                    let Some(ch) = text[i..].chars().next() else {
                        return Err(syntax(start, "closing `\"`", "end of input"));
                    };
                    i += ch.len_utf8();
                    match ch {
                        '"' => break,
                        '\\' => {
                            let Some(esc) = text[i..].chars().next() else {
                                return Err(syntax(i, "escape character", "end of input"));
                            };
                            i += esc.len_utf8();
                            value.push(match esc {
                                'n' => '\n',
                                't' => '\t',
                                other => other,
                            });
                        }
                        other => value.push(other),
                    }
                }
                toks.push((start, Tok::Atom(Atom::Str(value))));
            }
            _ => {
                let start = i;
                while i < bytes.len() {
                    let b = bytes[i];
                    if b.is_ascii_whitespace() || matches!(b, b'(' | b')' | b'{' | b'}' | b'"') {
                        break;
                    }
                    i += 1;
                    if b == b':' {
                        break;
                    }
                }
                let word = &text[start..i];
                let atom = match word.parse::<i64>() {
                    Ok(v) => Atom::Int(v),
                    Err(_) if word == ":" => return Err(syntax(start, "identifier", "`:`")),
                    Err(_) => Atom::Ident(word.to_string()),
                };
                toks.push((start, Tok::Atom(atom)));
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn found(&self) -> (usize, String) {
        match self.peek() {
            Some((off, tok)) => (*off, tok.describe()),
            None => (self.end, "end of input".to_string()),
        }
    }

    fn expr(&mut self) -> Result<SExpr, GdlError> {
        let Some((_, tok)) = self.peek().cloned() else {
            return Err(syntax(self.end, "expression", "end of input"));
        };
        match tok {
            Tok::Atom(a) => {
                self.pos += 1;
                Ok(SExpr::Atom(a))
            }
            Tok::Open => {
                self.pos += 1;
                let head = match self.peek().cloned() {
                    Some((_, Tok::Atom(Atom::Ident(h)))) if !h.ends_with(':') => {
                        self.pos += 1;
                        h
                    }
                    _ => {
                        let (off, found) = self.found();
                        return Err(syntax(off, "ludeme keyword after `(`", &found));
                    }
                };
                let args = self.items(Tok::Close, "`)`")?;
                Ok(SExpr::List { head, args })
            }
            Tok::BraceOpen => {
                self.pos += 1;
                Ok(SExpr::Seq(self.items(Tok::BraceClose, "`}`")?))
            }
            Tok::Close | Tok::BraceClose => {
                let (off, found) = self.found();
                Err(syntax(off, "expression", &found))
            }
        }
    }

    fn items(&mut self, close: Tok, close_name: &str) -> Result<Vec<SExpr>, GdlError> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some((_, t)) if *t == close => {
                    self.pos += 1;
                    return Ok(items);
                }
                Some((_, Tok::Close)) | Some((_, Tok::BraceClose)) | None => {
                    let (off, found) = self.found();
                    return Err(syntax(off, close_name, &found));
                }
                _ => {
                    let item = self.expr()?;
                    let keyed = is_named_key(&item);
                    items.push(item);
                    if keyed {
                        match self.peek() {
                            Some((_, Tok::Close)) | Some((_, Tok::BraceClose)) | None => {
                                let (off, found) = self.found();
                                return Err(syntax(off, "value for named argument", &found));
                            }
                            _ => items.push(self.expr()?),
                        }
                    }
                }
            }
        }
    }
}

/// Reads exactly one S-expression from `text`.
pub fn parse_sexpr(text: &str) -> Result<SExpr, GdlError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let expr = p.expr()?;
    if p.peek().is_some() {
        let (off, found) = p.found();
        return Err(syntax(off, "end of input", &found));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_named_arguments_glued_to_values() {
        let e = parse_sexpr("(play (do (move Pass) ifAfterwards:(is Full)))").unwrap();
        let inner = e.positional()[0];
        assert!(inner.is("do"));
        assert!(inner.named("ifAfterwards").unwrap().is("is"));
        assert_eq!(
            e.to_string(),
            "(play (do (move Pass) ifAfterwards:(is Full)))"
        );
    }

    #[test]
    fn spaced_named_argument_is_the_same_tree() {
        let a = parse_sexpr("(do A ifAfterwards:(B))").unwrap();
        let b = parse_sexpr("(do A ifAfterwards: (B))").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let text = "(game \"X\" (players 2)";
        match parse_sexpr(text) {
            Err(GdlError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, text.len());
                assert_eq!(expected, "`)`");
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse_sexpr("(a b))") {
            Err(GdlError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn list_head_must_be_keyword() {
        assert!(matches!(parse_sexpr("(\"x\")"), Err(GdlError::Syntax { .. })));
        assert!(matches!(parse_sexpr("()"), Err(GdlError::Syntax { .. })));
        assert!(matches!(parse_sexpr("(3 4)"), Err(GdlError::Syntax { .. })));
    }

    #[test]
    fn dangling_named_key_is_rejected() {
        assert!(matches!(
            parse_sexpr("(do A ifAfterwards:)"),
            Err(GdlError::Syntax { .. })
        ));
    }

    #[test]
    fn comments_and_strings() {
        let e = parse_sexpr("// header\n(piece \"A \\\"b\\\"\" P1) // trailing").unwrap();
        assert_eq!(e.positional()[0].as_str(), Some("A \"b\""));
        assert_eq!(parse_sexpr(&e.to_string()).unwrap(), e);
        assert_eq!(parse_sexpr("(x -3)").unwrap().positional()[0].as_int(), Some(-3));
    }

    #[test]
    fn braces_may_be_empty() {
        let e = parse_sexpr("(end {})").unwrap();
        assert_eq!(e.positional()[0], &SExpr::Seq(vec![]));
        assert_eq!(parse_sexpr(&e.to_string()).unwrap(), e);
    }
}
