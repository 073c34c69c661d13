use super::*;
use crate::engine::{Board, Geometry, PieceDef};
use crate::gdl::{GameDescription, SExpr};

#[derive(Debug, Clone)]
pub(crate) struct RuleSet {
    pub play: MoveRule,
    pub leaves: Vec<Leaf>,
    pub attacks: Vec<Attack>,
    pub end: Vec<CompiledEndRule>,
    /// (piece id, sites) placed before the first move.
    pub placements: Vec<(u8, Vec<Site>)>,
}

struct Compiler<'a> {
    board: &'a Board,
    players: u8,
    pieces: &'a [PieceDef],
    names: &'a [String],
    leaves: Vec<Leaf>,
    attacks: Vec<Attack>,
    post_stack: Vec<Condition>,
    effect_stack: Vec<Vec<Effect>>,
    piece_filter: Option<u8>,
}

fn err(expr: &SExpr, reason: impl Into<String>) -> EvalError {
    EvalError {
        expr: expr.to_string(),
        reason: reason.into(),
    }
}

pub(crate) fn compile(
    desc: &GameDescription,
    board: &Board,
    pieces: &[PieceDef],
    names: &[String],
) -> Result<RuleSet, EvalError> {
    let mut c = Compiler {
        board,
        players: desc.player_count,
        pieces,
        names,
        leaves: Vec::new(),
        attacks: Vec::new(),
        post_stack: Vec::new(),
        effect_stack: Vec::new(),
        piece_filter: None,
    };
    let play = c.moves(desc.play_body())?;
    let mut end = Vec::new();
    for rule in &desc.end_rules {
        let condition = c.condition(&rule.condition)?;
        end.push(CompiledEndRule {
            needs_no_moves: condition.mentions_no_moves(),
            result: c.result(&rule.result)?,
            condition,
        });
    }
    let mut placements = Vec::new();
    for place in &desc.start_rules {
        placements.push(c.placement(place)?);
    }
    Ok(RuleSet {
        play,
        leaves: c.leaves,
        attacks: c.attacks,
        end,
        placements,
    })
}

impl Compiler<'_> {
    fn name_id(&self, expr: &SExpr, name: &str) -> Result<u8, EvalError> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u8)
            .ok_or_else(|| err(expr, format!("no piece named \"{name}\"")))
    }

    fn player(&self, expr: &SExpr) -> Option<Player> {
        let s = expr.as_ident()?;
        let n: u8 = s.strip_prefix('P')?.parse().ok()?;
        (n >= 1 && n <= self.players).then_some(Player(n))
    }

    fn role(&self, expr: &SExpr) -> Result<Role, EvalError> {
        match expr.as_ident() {
            Some("Mover") => Ok(Role::Mover),
            Some("Next") => Ok(Role::Next),
            _ => self
                .player(expr)
                .map(Role::Player)
                .ok_or_else(|| err(expr, "expected Mover, Next or a player of this game")),
        }
    }

    fn count(&self, expr: &SExpr) -> Result<u32, EvalError> {
        match expr.as_int() {
            Some(v) if v >= 0 && v <= u32::MAX as i64 => Ok(v as u32),
            _ => Err(err(expr, "expected a non-negative integer")),
        }
    }

    fn site(&self, expr: &SExpr) -> Result<SiteExpr, EvalError> {
        if let Some(v) = expr.as_int() {
            if v < 0 || v as usize >= self.board.site_count() {
                return Err(err(expr, "site index outside the board"));
            }
            return Ok(SiteExpr::Literal(v as Site));
        }
        let args = expr.positional();
        match (expr.head(), args.as_slice()) {
            (Some("to"), []) => Ok(SiteExpr::To),
            (Some("last"), [w]) if w.as_ident() == Some("To") => Ok(SiteExpr::LastTo),
            (Some("last"), [w]) if w.as_ident() == Some("From") => Ok(SiteExpr::LastFrom),
            _ => Err(err(expr, "undefined site expression")),
        }
    }

    fn square_like(&self, expr: &SExpr) -> Result<(), EvalError> {
        match self.board.spec() {
            crate::gdl::BoardSpec::Hexagon(_) => {
                Err(err(expr, "rows and columns are undefined on a hexagon board"))
            }
            _ => Ok(()),
        }
    }

    fn region(&self, expr: &SExpr) -> Result<Region, EvalError> {
        if !expr.is("sites") {
            return Err(err(expr, "expected a `(sites ...)` region"));
        }
        let args = expr.positional();
        let region = match args.as_slice() {
            [w] if w.as_ident() == Some("Empty") => Region::Empty,
            [w] if w.as_ident() == Some("Board") => Region::Board,
            [w] if w.as_ident() == Some("LastRank") => {
                self.square_like(expr)?;
                if self.players > 2 {
                    return Err(err(expr, "LastRank is only defined for two players"));
                }
                Region::LastRank
            }
            [w, n] if w.as_ident() == Some("Row") => {
                self.square_like(expr)?;
                let r = self.count(n)? as i32;
                if r >= self.board.rows() {
                    return Err(err(expr, "row outside the board"));
                }
                Region::Row(r)
            }
            [w, n] if w.as_ident() == Some("Col") => {
                self.square_like(expr)?;
                let col = self.count(n)? as i32;
                if col >= self.board.cols() {
                    return Err(err(expr, "column outside the board"));
                }
                Region::Col(col)
            }
            [w, role] if w.as_ident() == Some("Occupied") => Region::Occupied(self.role(role)?),
            [SExpr::Seq(items)] => {
                let mut sites = Vec::new();
                for item in items {
                    match self.site(item)? {
                        SiteExpr::Literal(s) => sites.push(s),
                        _ => return Err(err(item, "site lists hold literal sites only")),
                    }
                }
                Region::Sites(sites)
            }
            _ => return Err(err(expr, "undefined region")),
        };
        Ok(region)
    }

    fn int(&self, expr: &SExpr) -> Result<IntExpr, EvalError> {
        if let Some(v) = expr.as_int() {
            return Ok(IntExpr::Literal(v));
        }
        let args = expr.positional();
        let words: Vec<Option<&str>> = args.iter().map(|a| a.as_ident()).collect();
        match (expr.head(), words.as_slice()) {
            (Some("liberties"), [_]) => Ok(IntExpr::Liberties(self.site(args[0])?)),
            (Some("count"), [Some("Groups"), Some("NoLiberty")]) => Ok(IntExpr::GroupsWithoutLiberty),
            (Some("count"), [Some("Pieces"), Some("All")]) => Ok(IntExpr::Pieces(None)),
            (Some("count"), [Some("Pieces"), _]) => Ok(IntExpr::Pieces(Some(self.role(args[1])?))),
            (Some("count"), [Some("Sites"), Some("Empty")]) => Ok(IntExpr::EmptySites),
            (Some("count"), [Some("Moves")]) => Ok(IntExpr::Moves),
            _ => Err(err(expr, "undefined integer expression")),
        }
    }

    fn conditions(&self, args: &[&SExpr]) -> Result<Vec<Condition>, EvalError> {
        let mut out = Vec::new();
        for a in args {
            for item in a.items() {
                out.push(self.condition(item)?);
            }
        }
        Ok(out)
    }

    fn condition(&self, expr: &SExpr) -> Result<Condition, EvalError> {
        let args = expr.positional();
        let word = |i: usize| args.get(i).and_then(|a| a.as_ident());
        let cond = match expr.head() {
            Some("is") => match (word(0), args.len()) {
                (Some("Line"), 2) => Condition::Line(self.count(args[1])?.max(1)),
                (Some("Connected"), 2) if word(1) == Some("Sides") => {
                    if self.players > 2 {
                        return Err(err(expr, "side connection is only defined for two players"));
                    }
                    if matches!(self.board.spec(), crate::gdl::BoardSpec::Hexagon(_)) {
                        return Err(err(expr, "hexagon boards have no player sides"));
                    }
                    Condition::ConnectedSides
                }
                (Some("Connected"), 3) => {
                    if !matches!(self.board.spec(), crate::gdl::BoardSpec::Hexagon(_)) {
                        return Err(err(expr, "corners and edges are defined on hexagon boards"));
                    }
                    let n = self.count(args[1])?;
                    match word(2) {
                        Some("Corners") => Condition::ConnectedCorners(n),
                        Some("Edges") => Condition::ConnectedEdges(n),
                        _ => return Err(err(expr, "expected Corners or Edges")),
                    }
                }
                (Some("Loop"), 1) => {
                    if self.board.geometry() != Geometry::Hex {
                        return Err(err(expr, "loops are detected on hex boards only"));
                    }
                    Condition::Loop
                }
                (Some("Full"), 1) => Condition::Full,
                (Some("Repeat"), 1) => Condition::Repeat,
                (Some("Threatened"), 2 | 3) => {
                    let name = args[1]
                        .as_str()
                        .ok_or_else(|| err(expr, "expected a piece name"))?;
                    let role = match args.get(2) {
                        Some(r) => self.role(r)?,
                        None => Role::Mover,
                    };
                    Condition::Threatened {
                        piece: self.name_id(expr, name)?,
                        role,
                    }
                }
                (Some("Eye"), 2) => Condition::Eye(self.site(args[1])?),
                (Some("Prev"), 2) if word(1) == Some("Mover") => Condition::PrevMover,
                (Some("Passed"), 2) => Condition::Passed(self.count(args[1])?),
                (Some("Empty"), 2) => Condition::IsEmpty(self.site(args[1])?),
                (Some("In"), 3) => Condition::In(self.site(args[1])?, self.region(args[2])?),
                _ => return Err(err(expr, "undefined `is` condition")),
            },
            Some("no") if args.len() == 1 && word(0) == Some("Moves") => Condition::NoMoves,
            Some("and") => Condition::And(self.conditions(&args)?),
            Some("or") => Condition::Or(self.conditions(&args)?),
            Some("not") if args.len() == 1 => Condition::Not(Box::new(self.condition(args[0])?)),
            Some(op @ ("=" | "!=" | "<" | ">" | "<=" | ">=")) if args.len() == 2 => {
                let op = match op {
                    "=" => CmpOp::Eq,
                    "!=" => CmpOp::Ne,
                    "<" => CmpOp::Lt,
                    ">" => CmpOp::Gt,
                    "<=" => CmpOp::Le,
                    _ => CmpOp::Ge,
                };
                Condition::Compare(op, self.int(args[0])?, self.int(args[1])?)
            }
            _ => return Err(err(expr, "undefined condition")),
        };
        Ok(cond)
    }

    fn effects(&self, expr: &SExpr) -> Result<Vec<Effect>, EvalError> {
        let mut out = Vec::new();
        for item in expr.items() {
            let args = item.positional();
            let effect = match (item.head(), args.as_slice()) {
                (Some("capture"), []) => Effect::Capture,
                (Some("moveAgain"), []) => Effect::MoveAgain,
                (Some("if"), [c, e]) => Effect::If(self.condition(c)?, self.effects(e)?),
                _ => return Err(err(item, "undefined consequence")),
            };
            out.push(effect);
        }
        Ok(out)
    }

    fn directions(&self, expr: &SExpr) -> Result<DirTable, EvalError> {
        if self.board.geometry() != Geometry::Square {
            return Err(err(expr, "named directions are defined on square boards only"));
        }
        use Direction::*;
        let mut table = vec![Vec::new(); self.players as usize + 1];
        for item in expr.items() {
            let name = item
                .as_ident()
                .ok_or_else(|| err(item, "expected a direction"))?;
            for p in 1..=self.players {
                let forward = if p == 1 { N } else { S };
                let dirs: Vec<Direction> = match name {
                    "Orthogonal" => vec![N, E, S, W],
                    "Diagonal" => vec![NE, SE, SW, NW],
                    "All" => Direction::ALL.to_vec(),
                    "Forward" | "Backward" | "ForwardDiagonal" | "Forwards" if self.players > 2 => {
                        return Err(err(item, "relative directions need a two-player game"))
                    }
                    "Forward" => vec![forward],
                    "Backward" => vec![forward.opposite()],
                    "ForwardDiagonal" => {
                        if p == 1 { vec![NW, NE] } else { vec![SW, SE] }
                    }
                    "Forwards" => {
                        if p == 1 { vec![NW, N, NE] } else { vec![SW, S, SE] }
                    }
                    other => vec![Direction::from_name(other)
                        .ok_or_else(|| err(item, "undefined direction"))?],
                };
                for d in dirs {
                    let i = d.index() as u8;
                    if !table[p as usize].contains(&i) {
                        table[p as usize].push(i);
                    }
                }
            }
        }
        Ok(DirTable(table))
    }

    fn target(&self, expr: Option<&SExpr>) -> Result<Target, EvalError> {
        match expr.map(|e| (e, e.as_ident())) {
            None => Ok(Target::Empty),
            Some((_, Some("Empty"))) => Ok(Target::Empty),
            Some((_, Some("Enemy"))) => Ok(Target::Enemy),
            Some((_, Some("EmptyOrEnemy"))) => Ok(Target::EmptyOrEnemy),
            Some((e, _)) => Err(err(e, "expected Empty, Enemy or EmptyOrEnemy")),
        }
    }

    fn new_leaf(&mut self, own_effects: Vec<Effect>) -> LeafId {
        let mut effects: Vec<Effect> = self.effect_stack.iter().flatten().cloned().collect();
        effects.extend(own_effects);
        self.leaves.push(Leaf {
            postconditions: self.post_stack.clone(),
            effects,
        });
        (self.leaves.len() - 1) as LeafId
    }

    fn trailing_then(&self, args: &[&SExpr]) -> Result<(Vec<Effect>, usize), EvalError> {
        match args.last() {
            Some(last) if last.is("then") => {
                let [body] = last.positional()[..] else {
                    return Err(err(last, "`then` takes one consequence or a list"));
                };
                Ok((self.effects(body)?, args.len() - 1))
            }
            _ => Ok((Vec::new(), args.len())),
        }
    }

    fn moves(&mut self, expr: &SExpr) -> Result<MoveRule, EvalError> {
        let args = expr.positional();
        match expr.head() {
            Some("move") => self.leaf_move(expr, &args),
            Some("or") => {
                let mut rules = Vec::new();
                for a in &args {
                    for item in a.items() {
                        rules.push(self.moves(item)?);
                    }
                }
                if rules.is_empty() {
                    return Err(err(expr, "`or` needs at least one generator"));
                }
                Ok(MoveRule::Or(rules))
            }
            Some("if") => match args.as_slice() {
                [c, t] | [c, t, _] => {
                    let cond = self.condition(c)?;
                    let then = Box::new(self.moves(t)?);
                    let otherwise = match args.get(2) {
                        Some(e) => Some(Box::new(self.moves(e)?)),
                        None => None,
                    };
                    Ok(MoveRule::If { cond, then, otherwise })
                }
                _ => Err(err(expr, "`if` takes a condition and one or two generators")),
            },
            Some("do") => {
                let post = expr
                    .named("ifAfterwards")
                    .ok_or_else(|| err(expr, "`do` needs an ifAfterwards: postcondition"))?;
                let [body] = args[..] else {
                    return Err(err(expr, "`do` takes exactly one generator"));
                };
                let post = self.condition(post)?;
                self.post_stack.push(post.clone());
                let body = self.moves(body);
                self.post_stack.pop();
                Ok(MoveRule::Do {
                    body: Box::new(body?),
                    post,
                })
            }
            Some("forEach") => {
                let (effects, n) = self.trailing_then(&args)?;
                match &args[..n] {
                    [kind, name, body] if kind.as_ident() == Some("Piece") => {
                        let name = name
                            .as_str()
                            .ok_or_else(|| err(expr, "expected a piece name"))?;
                        let id = self.name_id(expr, name)?;
                        let outer = self.piece_filter.replace(id);
                        self.effect_stack.push(effects);
                        let rule = self.moves(body);
                        self.effect_stack.pop();
                        self.piece_filter = outer;
                        rule
                    }
                    _ => Err(err(expr, "expected `(forEach Piece \"name\" <moves>)`")),
                }
            }
            _ => Err(err(expr, "undefined move generator")),
        }
    }

    fn leaf_move(&mut self, expr: &SExpr, args: &[&SExpr]) -> Result<MoveRule, EvalError> {
        let (effects, n) = self.trailing_then(args)?;
        let args = &args[..n];
        let kind = args.first().and_then(|a| a.as_ident());
        match (kind, args.len()) {
            (Some("Add"), 2) => {
                let to = args[1];
                let [region] = to.positional()[..] else {
                    return Err(err(to, "expected `(to <region> [if:<cond>])`"));
                };
                if !to.is("to") {
                    return Err(err(to, "expected `(to <region> [if:<cond>])`"));
                }
                let region = self.region(region)?;
                let filter = match to.named("if") {
                    Some(c) => Some(self.condition(c)?),
                    None => None,
                };
                Ok(MoveRule::Add {
                    region,
                    filter,
                    leaf: self.new_leaf(effects),
                })
            }
            (Some(k @ ("Step" | "Slide")), 2) => {
                let dirs = self.directions(args[1])?;
                let target = self.target(expr.named("to"))?;
                let piece = self.piece_filter;
                if target.allows_enemy() {
                    self.attacks.push(Attack {
                        piece,
                        dirs: dirs.clone(),
                        slide: k == "Slide",
                    });
                }
                let leaf = self.new_leaf(effects);
                Ok(if k == "Step" {
                    MoveRule::Step { piece, dirs, target, leaf }
                } else {
                    MoveRule::Slide { piece, dirs, target, leaf }
                })
            }
            (Some("Pass"), 1) => Ok(MoveRule::Pass {
                leaf: self.new_leaf(effects),
            }),
            (Some("Promote"), 3) => {
                let site = self.site(args[1])?;
                let name = args[2]
                    .as_str()
                    .ok_or_else(|| err(expr, "expected the promoted piece name"))?;
                Ok(MoveRule::Promote {
                    site,
                    piece: self.name_id(expr, name)?,
                    leaf: self.new_leaf(effects),
                })
            }
            _ => Err(err(expr, "undefined move")),
        }
    }

    fn result(&self, expr: &SExpr) -> Result<ResultSpec, EvalError> {
        let args = expr.positional();
        match (expr.head(), args.as_slice()) {
            (Some("byArea"), []) => {
                if self.players != 2 {
                    return Err(err(expr, "area scoring is defined for two players"));
                }
                Ok(ResultSpec::ByArea)
            }
            (Some("result"), [role, payoff]) => {
                let payoff = match payoff.as_ident() {
                    Some("Win") => Payoff::Win,
                    Some("Loss") => Payoff::Loss,
                    Some("Draw") => Payoff::Draw,
                    _ => return Err(err(expr, "expected Win, Loss or Draw")),
                };
                Ok(ResultSpec::Role(self.role(role)?, payoff))
            }
            _ => Err(err(expr, "undefined result")),
        }
    }

    fn placement(&self, expr: &SExpr) -> Result<(u8, Vec<Site>), EvalError> {
        let args = expr.positional();
        let [name, owner, region] = args[..] else {
            return Err(err(expr, "expected `(place \"name\" <player> <region>)`"));
        };
        let name = name.as_str().ok_or_else(|| err(expr, "expected a piece name"))?;
        let name_id = self.name_id(expr, name)?;
        let owner = self
            .player(owner)
            .ok_or_else(|| err(expr, "expected the owning player"))?;
        let piece = self
            .pieces
            .iter()
            .position(|p| p.name_id == name_id && p.owner == owner)
            .ok_or_else(|| err(expr, "that player owns no such piece"))?;
        let sites: Vec<Site> = match self.region(region)? {
            Region::Board => (0..self.board.site_count() as Site).collect(),
            Region::Row(r) => (0..self.board.site_count() as Site)
                .filter(|&s| self.board.row(s) == r)
                .collect(),
            Region::Col(c) => (0..self.board.site_count() as Site)
                .filter(|&s| self.board.col(s) == c)
                .collect(),
            Region::Sites(list) => list,
            _ => return Err(err(region, "start regions must be fixed sites, rows or columns")),
        };
        Ok((piece as u8, sites))
    }
}
