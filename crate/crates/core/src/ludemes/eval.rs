use super::groups;
use super::*;
use crate::engine::board::{SIDE_FIRST_COL, SIDE_FIRST_ROW, SIDE_LAST_COL, SIDE_LAST_ROW};
use crate::engine::{Game, GameState, Move, MoveKind, Outcome, PieceId};

/// Evaluation context: the state plus the players that `Mover` and `Next`
/// resolve to.
#[derive(Clone, Copy)]
pub(crate) struct Ctx<'a> {
    pub game: &'a Game,
    pub state: &'a GameState,
    pub mover: Player,
    pub next: Player,
    /// Candidate site bound by `(to ... if:...)`.
    pub to: Option<Site>,
    /// Known answer to `(no Moves)`, if any.
    pub no_moves: Option<bool>,
}

impl<'a> Ctx<'a> {
    /// Play rules: `Mover` is the player to move.
    pub fn play(game: &'a Game, state: &'a GameState) -> Ctx<'a> {
        Ctx {
            game,
            state,
            mover: state.mover,
            next: state.mover.following(game.player_count()),
            to: None,
            no_moves: None,
        }
    }

    /// Postconditions: `Mover` is the player who made the move.
    pub fn after(game: &'a Game, state: &'a GameState, mover: Player) -> Ctx<'a> {
        Ctx {
            game,
            state,
            mover,
            next: mover.following(game.player_count()),
            to: None,
            no_moves: None,
        }
    }

    /// End rules: `Mover` made the last move, `Next` is the player to move.
    pub fn end(game: &'a Game, state: &'a GameState, no_moves: Option<bool>) -> Ctx<'a> {
        let n = game.player_count();
        let mover = match state.last_move {
            Some(m) => m.mover,
            None => Player((state.mover.0 + n - 2) % n + 1),
        };
        Ctx {
            game,
            state,
            mover,
            next: state.mover,
            to: None,
            no_moves,
        }
    }

    fn role(&self, role: Role) -> Player {
        match role {
            Role::Mover => self.mover,
            Role::Next => self.next,
            Role::Player(p) => p,
        }
    }

    fn site(&self, e: SiteExpr) -> Option<Site> {
        match e {
            SiteExpr::Literal(s) => Some(s),
            SiteExpr::To => self.to,
            SiteExpr::LastTo => self.state.last_move.and_then(|m| m.to),
            SiteExpr::LastFrom => self.state.last_move.and_then(|m| m.from),
        }
    }

    fn owner(&self, s: Site) -> u8 {
        self.game.owner_of_value(self.state.cells[s as usize])
    }

    fn in_region(&self, s: Site, region: &Region) -> bool {
        let board = self.game.board();
        match region {
            Region::Empty => self.state.cells[s as usize] == 0,
            Region::Board => true,
            Region::Row(r) => board.row(s) == *r,
            Region::Col(c) => board.col(s) == *c,
            Region::LastRank => {
                let rank = if self.mover.0 == 1 { board.rows() - 1 } else { 0 };
                board.row(s) == rank
            }
            Region::Occupied(role) => self.owner(s) == self.role(*role).0,
            Region::Sites(list) => list.contains(&s),
        }
    }

    pub fn int(&self, e: &IntExpr) -> i64 {
        let state = self.state;
        match e {
            IntExpr::Literal(v) => *v,
            IntExpr::Liberties(site) => match self.site(*site) {
                Some(s) => groups::liberties(self.game, state, s) as i64,
                None => 0,
            },
            IntExpr::GroupsWithoutLiberty => groups::groups_without_liberty(self.game, state) as i64,
            IntExpr::Pieces(None) => state.cells.iter().filter(|&&c| c != 0).count() as i64,
            IntExpr::Pieces(Some(role)) => {
                let p = self.role(*role).0;
                state
                    .cells
                    .iter()
                    .filter(|&&c| c != 0 && self.game.owner_of_value(c) == p)
                    .count() as i64
            }
            IntExpr::EmptySites => state.cells.iter().filter(|&&c| c == 0).count() as i64,
            IntExpr::Moves => state.move_number as i64,
        }
    }

    pub fn cond(&self, c: &Condition) -> bool {
        let (game, state) = (self.game, self.state);
        match c {
            Condition::Line(n) => self.line(*n),
            Condition::ConnectedSides => {
                let sides = if self.mover.0 == 1 {
                    SIDE_FIRST_ROW | SIDE_LAST_ROW
                } else {
                    SIDE_FIRST_COL | SIDE_LAST_COL
                };
                groups::connects_sides(game, state, self.mover, sides)
            }
            Condition::ConnectedCorners(n) => groups::connects_corners(game, state, self.mover, *n),
            Condition::ConnectedEdges(n) => groups::connects_edges(game, state, self.mover, *n),
            Condition::Loop => groups::has_loop(game, state, self.mover),
            Condition::Full => state.cells.iter().all(|&c| c != 0),
            Condition::Threatened { piece, role } => self.threatened(*piece, self.role(*role)),
            Condition::Repeat => match state.history.split_last() {
                Some((last, earlier)) => earlier.contains(last),
                None => false,
            },
            Condition::Eye(site) => match self.site(*site) {
                Some(s) => {
                    state.cells[s as usize] == 0
                        && game
                            .board()
                            .adjacent(s)
                            .iter()
                            .all(|&t| self.owner(t) == self.mover.0)
                }
                None => false,
            },
            Condition::PrevMover => state.last_move.is_some_and(|m| m.mover == state.mover),
            Condition::Passed(n) => state.passes >= *n,
            Condition::IsEmpty(site) => self.site(*site).is_some_and(|s| state.cells[s as usize] == 0),
            Condition::In(site, region) => self.site(*site).is_some_and(|s| self.in_region(s, region)),
            Condition::NoMoves => match self.no_moves {
                Some(v) => v,
                None => game.legal_moves(state).is_empty(),
            },
            Condition::Compare(op, a, b) => {
                let (a, b) = (self.int(a), self.int(b));
                match op {
                    CmpOp::Eq => a == b,
                    CmpOp::Ne => a != b,
                    CmpOp::Lt => a < b,
                    CmpOp::Gt => a > b,
                    CmpOp::Le => a <= b,
                    CmpOp::Ge => a >= b,
                }
            }
            Condition::And(cs) => cs.iter().all(|c| self.cond(c)),
            Condition::Or(cs) => cs.iter().any(|c| self.cond(c)),
            Condition::Not(c) => !self.cond(c),
        }
    }

    /// `n` or more pieces of the mover in a row; only lines through the last
    /// destination are scanned when it holds a mover piece.
    fn line(&self, n: u32) -> bool {
        let p = self.mover.0;
        if let Some(to) = self.state.last_move.and_then(|m| m.to) {
            if self.owner(to) == p {
                return self.line_through(to, p, n);
            }
        }
        (0..self.game.board().site_count() as Site).any(|s| self.owner(s) == p && self.line_through(s, p, n))
    }

    fn line_through(&self, s: Site, p: u8, n: u32) -> bool {
        let board = self.game.board();
        board.line_axes().iter().any(|&(a, b)| {
            let mut len = 1;
            for dir in [a, b] {
                let mut cur = s;
                while let Some(t) = board.step_index(cur, dir) {
                    if self.owner(t) != p {
                        break;
                    }
                    len += 1;
                    cur = t;
                }
            }
            len >= n
        })
    }

    fn threatened(&self, name: u8, victim: Player) -> bool {
        let game = self.game;
        let cells = &self.state.cells;
        (0..cells.len() as Site).any(|s| {
            let v = cells[s as usize];
            v != 0
                && game.owner_of_value(v) == victim.0
                && game.name_of_value(v) == name
                && self.attacked(s, victim)
        })
    }

    fn attacked(&self, target: Site, victim: Player) -> bool {
        let game = self.game;
        let board = game.board();
        let cells = &self.state.cells;
        for attack in &game.rules.attacks {
            for a in 1..=game.player_count() {
                if a == victim.0 {
                    continue;
                }
                for &d in attack.dirs.for_player(Player(a)) {
                    let back = (d as usize + 4) % 8;
                    let mut cur = board.step_index(target, back);
                    while let Some(t) = cur {
                        let v = cells[t as usize];
                        if v != 0 {
                            if game.owner_of_value(v) == a
                                && attack.piece.is_none_or(|name| game.name_of_value(v) == name)
                            {
                                return true;
                            }
                            break;
                        }
                        if !attack.slide {
                            break;
                        }
                        cur = board.step_index(t, back);
                    }
                }
            }
        }
        false
    }

    pub fn result(&self, r: &ResultSpec) -> Outcome {
        let n = self.game.player_count();
        match r {
            ResultSpec::Role(role, Payoff::Win) => Outcome::win(n, self.role(*role)),
            ResultSpec::Role(role, Payoff::Loss) => Outcome::loss(n, self.role(*role)),
            ResultSpec::Role(_, Payoff::Draw) => Outcome::draw(n),
            ResultSpec::ByArea => {
                let [a, b] = groups::area_scores(self.game, self.state);
                match a.cmp(&b) {
                    std::cmp::Ordering::Greater => Outcome::win(n, Player(1)),
                    std::cmp::Ordering::Less => Outcome::win(n, Player(2)),
                    std::cmp::Ordering::Equal => Outcome::draw(n),
                }
            }
        }
    }

    pub fn generate(&self, rule: &MoveRule, out: &mut Vec<Move>) {
        let (game, state) = (self.game, self.state);
        let board = game.board();
        match rule {
            MoveRule::Add { region, filter, leaf } => {
                if game.add_value(self.mover) == 0 {
                    return;
                }
                let mut push = |s: Site| {
                    if state.cells[s as usize] != 0 {
                        return;
                    }
                    if let Some(f) = filter {
                        let ctx = Ctx { to: Some(s), ..*self };
                        if !ctx.cond(f) {
                            return;
                        }
                    }
                    out.push(game.add_move(state, s, *leaf));
                };
                match region {
                    Region::Sites(list) => list.iter().for_each(|&s| push(s)),
                    region => {
                        for s in 0..board.site_count() as Site {
                            if self.in_region(s, region) {
                                push(s);
                            }
                        }
                    }
                }
            }
            MoveRule::Step { piece, dirs, target, leaf } | MoveRule::Slide { piece, dirs, target, leaf } => {
                let slide = matches!(rule, MoveRule::Slide { .. });
                let p = self.mover;
                for from in 0..board.site_count() as Site {
                    let v = state.cells[from as usize];
                    if v == 0 || game.owner_of_value(v) != p.0 {
                        continue;
                    }
                    if piece.is_some_and(|name| game.name_of_value(v) != name) {
                        continue;
                    }
                    for &d in dirs.for_player(p) {
                        let mut cur = board.step_index(from, d as usize);
                        while let Some(to) = cur {
                            let owner = self.owner(to);
                            let ok = if owner == 0 {
                                target.allows_empty()
                            } else {
                                owner != p.0 && target.allows_enemy()
                            };
                            if ok {
                                out.push(Move {
                                    kind: MoveKind::Step,
                                    from: Some(from),
                                    to: Some(to),
                                    mover: p,
                                    piece: Some(PieceId(v - 1)),
                                    leaf: Some(*leaf),
                                });
                            }
                            if owner != 0 || !slide {
                                break;
                            }
                            cur = board.step_index(to, d as usize);
                        }
                    }
                }
            }
            MoveRule::Pass { leaf } => out.push(Move {
                leaf: Some(*leaf),
                ..Move::pass(self.mover)
            }),
            MoveRule::Promote { site, piece, leaf } => {
                let Some(s) = self.site(*site) else { return };
                if self.owner(s) != self.mover.0 {
                    return;
                }
                if let Some(v) = game.piece_value(*piece, self.mover) {
                    if v != state.cells[s as usize] {
                        out.push(Move {
                            kind: MoveKind::Promote,
                            from: None,
                            to: Some(s),
                            mover: self.mover,
                            piece: Some(PieceId(v - 1)),
                            leaf: Some(*leaf),
                        });
                    }
                }
            }
            MoveRule::Or(rules) => rules.iter().for_each(|r| self.generate(r, out)),
            MoveRule::If { cond, then, otherwise } => {
                if self.cond(cond) {
                    self.generate(then, out);
                } else if let Some(e) = otherwise {
                    self.generate(e, out);
                }
            }
            MoveRule::Do { body, .. } => self.generate(body, out),
        }
    }

    /// Applies consequences of a move to `state`; returns true when the
    /// mover moves again.
    pub fn effects(game: &Game, state: &mut GameState, mover: Player, effects: &[Effect]) -> bool {
        let mut again = false;
        for e in effects {
            match e {
                Effect::Capture => {
                    if let Some(to) = state.last_move.and_then(|m| m.to) {
                        groups::capture_around(game, state, to, mover);
                    }
                }
                Effect::MoveAgain => again = true,
                Effect::If(c, inner) => {
                    if Ctx::after(game, state, mover).cond(c) {
                        again |= Ctx::effects(game, state, mover, inner);
                    }
                }
            }
        }
        again
    }
}
