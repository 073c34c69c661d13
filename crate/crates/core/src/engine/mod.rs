//! Game state and forward model.
//!
//! A [`Game`] is built once from a [`GameDescription`] and owns the compiled
//! rules, the board graph and the hashing keys. [`GameState`] is a plain value:
//! applying a move returns a new state and never touches the original.

pub(crate) mod board;
mod text;
mod zobrist;

pub use board::{Board, Direction, Geometry, Site};
pub use text::TextError;

use std::fmt;

use thiserror::Error;

use crate::detect::{detect, PlayoutStrategy};
use crate::gdl::{GameDescription, Owner};
use crate::ludemes::{self, Ctx, EvalError, LeafId, RuleSet};
use zobrist::Zobrist;

/// 1-based player number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Player(pub u8);

impl Player {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn following(self, players: u8) -> Player {
        Player(self.0 % players + 1)
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// Index into [`Game::pieces`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PieceId(pub u8);

/// A piece type with a single owner. `(piece "Pawn" Each)` expands to one
/// definition per player; all of them share a `name_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceDef {
    pub name: String,
    pub name_id: u8,
    pub owner: Player,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Add,
    Step,
    Pass,
    Swap,
    Promote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub from: Option<Site>,
    pub to: Option<Site>,
    pub mover: Player,
    /// Piece placed (Add, Promote) or moved (Step).
    pub piece: Option<PieceId>,
    /// Generator that produced the move; carries its postconditions.
    pub leaf: Option<LeafId>,
}

impl Move {
    pub fn pass(mover: Player) -> Move {
        Move {
            kind: MoveKind::Pass,
            from: None,
            to: None,
            mover,
            piece: None,
            leaf: None,
        }
    }

    pub fn swap(mover: Player) -> Move {
        Move {
            kind: MoveKind::Swap,
            ..Move::pass(mover)
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.from, self.to) {
            (MoveKind::Add, _, Some(t)) => write!(f, "{} add {t}", self.mover),
            (MoveKind::Step, Some(s), Some(t)) => write!(f, "{} step {s}-{t}", self.mover),
            (MoveKind::Promote, _, Some(t)) => write!(f, "{} promote {t}", self.mover),
            (MoveKind::Pass, ..) => write!(f, "{} pass", self.mover),
            (MoveKind::Swap, ..) => write!(f, "{} swap", self.mover),
            _ => write!(f, "{} {:?}", self.mover, self.kind),
        }
    }
}

/// Per-player utilities: 1 win, -1 loss, 0 draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub utilities: Vec<f64>,
}

impl Outcome {
    pub fn win(players: u8, winner: Player) -> Outcome {
        let utilities = (1..=players)
            .map(|p| if p == winner.0 { 1.0 } else { -1.0 })
            .collect();
        Outcome { utilities }
    }

    /// In games with more than two players the others score 0.
    pub fn loss(players: u8, loser: Player) -> Outcome {
        let other = if players == 2 { 1.0 } else { 0.0 };
        let utilities = (1..=players)
            .map(|p| if p == loser.0 { -1.0 } else { other })
            .collect();
        Outcome { utilities }
    }

    pub fn draw(players: u8) -> Outcome {
        Outcome {
            utilities: vec![0.0; players as usize],
        }
    }

    pub fn utility(&self, p: Player) -> f64 {
        self.utilities[p.index() - 1]
    }

    /// The single player scoring 1, if any.
    pub fn winner(&self) -> Option<Player> {
        let mut winners = self.utilities.iter().enumerate().filter(|(_, &u)| u == 1.0);
        match (winners.next(), winners.next()) {
            (Some((i, _)), None) => Some(Player(i as u8 + 1)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ongoing,
    Terminated(Outcome),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IllegalMoveError {
    #[error("the game is already over")]
    Terminated,
    #[error("{0} is not the player to move")]
    WrongMover(Player),
    #[error("move {0} does not fit the board: {1}")]
    Inconsistent(Move, &'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    /// 0 for empty, otherwise piece index + 1.
    pub(crate) cells: Vec<u8>,
    pub(crate) mover: Player,
    pub(crate) move_number: u32,
    pub(crate) hash: u64,
    pub(crate) history: Vec<u64>,
    pub(crate) swapped: bool,
    pub(crate) status: Status,
    pub(crate) last_move: Option<Move>,
    /// Consecutive passes ending at the last move.
    pub(crate) passes: u32,
}

impl GameState {
    pub fn mover(&self) -> Player {
        self.mover
    }

    pub fn move_number(&self) -> u32 {
        self.move_number
    }

    pub fn hash(&self) -> u64 {
        self.hash
    }

    /// Hashes of every position reached so far, current one included. Empty
    /// unless the game has `(noRepeat)`.
    pub fn hash_history(&self) -> &[u64] {
        &self.history
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self.status, Status::Terminated(_))
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        match &self.status {
            Status::Terminated(o) => Some(o),
            Status::Ongoing => None,
        }
    }

    pub fn last_move(&self) -> Option<&Move> {
        self.last_move.as_ref()
    }

    pub fn piece_at(&self, site: Site) -> Option<PieceId> {
        match self.cells[site as usize] {
            0 => None,
            v => Some(PieceId(v - 1)),
        }
    }

    pub fn empty_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 0).count()
    }

    pub(crate) fn terminate(&mut self, outcome: Outcome) {
        self.status = Status::Terminated(outcome);
    }
}

/// A compiled game: board, pieces, rules and hashing keys.
#[derive(Debug, Clone)]
pub struct Game {
    desc: GameDescription,
    board: Board,
    pieces: Vec<PieceDef>,
    names: Vec<String>,
    /// Owner per cell value (index 0 is empty).
    owners: Vec<u8>,
    name_ids: Vec<u8>,
    /// Cell value placed by Add, per player.
    add_value: Vec<u8>,
    pub(crate) rules: RuleSet,
    zobrist: Zobrist,
    swap_rule: bool,
    no_repeat: bool,
    strategy: PlayoutStrategy,
    initial: GameState,
}

impl Game {
    pub fn new(desc: GameDescription) -> Result<Game, EvalError> {
        let board = Board::new(desc.board);
        let mut names: Vec<String> = Vec::new();
        let mut pieces = Vec::new();
        for spec in &desc.pieces {
            let name_id = match names.iter().position(|n| *n == spec.name) {
                Some(i) => i,
                None => {
                    names.push(spec.name.clone());
                    names.len() - 1
                }
            } as u8;
            let owners: Vec<u8> = match spec.owner {
                Owner::Player(p) => vec![p],
                Owner::Each => (1..=desc.player_count).collect(),
            };
            for p in owners {
                pieces.push(PieceDef {
                    name: spec.name.clone(),
                    name_id,
                    owner: Player(p),
                });
            }
        }
        if pieces.len() > 250 {
            return Err(EvalError {
                expr: "equipment".into(),
                reason: "too many piece types".into(),
            });
        }
        let mut owners = vec![0u8];
        owners.extend(pieces.iter().map(|p| p.owner.0));
        let mut name_ids = vec![u8::MAX];
        name_ids.extend(pieces.iter().map(|p| p.name_id));
        let add_value = (0..=desc.player_count)
            .map(|p| {
                pieces
                    .iter()
                    .position(|d| d.owner.0 == p)
                    .map_or(0, |i| i as u8 + 1)
            })
            .collect();
        let rules = ludemes::compile(&desc, &board, &pieces, &names)?;
        let zobrist = Zobrist::new(&desc.name, board.site_count(), pieces.len(), desc.player_count);
        let swap_rule = desc.has_meta("swap");
        let no_repeat = desc.has_meta("noRepeat");
        let strategy = detect(&desc);

        let mut cells = vec![0u8; board.site_count()];
        for (piece, sites) in &rules.placements {
            for &s in sites {
                cells[s as usize] = piece + 1;
            }
        }
        let mut game = Game {
            desc,
            board,
            pieces,
            names,
            owners,
            name_ids,
            add_value,
            rules,
            zobrist,
            swap_rule,
            no_repeat,
            strategy,
            initial: GameState {
                cells,
                mover: Player(1),
                move_number: 0,
                hash: 0,
                history: Vec::new(),
                swapped: false,
                status: Status::Ongoing,
                last_move: None,
                passes: 0,
            },
        };
        let mut initial = game.initial.clone();
        game.reset_derived(&mut initial);
        game.initial = initial;
        Ok(game)
    }

    /// Recomputes hash, history and status for a state whose cells and mover
    /// were set directly.
    pub(crate) fn reset_derived(&self, state: &mut GameState) {
        state.hash = self.zobrist.full(state);
        state.history.clear();
        if self.no_repeat {
            state.history.push(state.hash);
        }
        state.status = Status::Ongoing;
        if let Some(outcome) = self.end_outcome(state) {
            state.status = Status::Terminated(outcome);
        }
    }

    pub fn description(&self) -> &GameDescription {
        &self.desc
    }

    pub fn name(&self) -> &str {
        &self.desc.name
    }

    pub fn player_count(&self) -> u8 {
        self.desc.player_count
    }

    pub fn board(&self) -> &Board {
        &self.board
    }

    pub fn pieces(&self) -> &[PieceDef] {
        &self.pieces
    }

    pub fn piece_names(&self) -> &[String] {
        &self.names
    }

    pub fn has_swap_rule(&self) -> bool {
        self.swap_rule
    }

    pub fn has_no_repeat(&self) -> bool {
        self.no_repeat
    }

    /// Playout strategy detected from the description.
    pub fn strategy(&self) -> &PlayoutStrategy {
        &self.strategy
    }

    pub fn leaf(&self, id: LeafId) -> &ludemes::Leaf {
        &self.rules.leaves[id as usize]
    }

    pub fn initial_state(&self) -> GameState {
        self.initial.clone()
    }

    /// Owner of the piece on a site.
    #[inline]
    pub fn owner(&self, state: &GameState, site: Site) -> Option<Player> {
        match self.owners[state.cells[site as usize] as usize] {
            0 => None,
            p => Some(Player(p)),
        }
    }

    #[inline]
    pub(crate) fn owner_of_value(&self, value: u8) -> u8 {
        self.owners[value as usize]
    }

    #[inline]
    pub(crate) fn name_of_value(&self, value: u8) -> u8 {
        self.name_ids[value as usize]
    }

    pub(crate) fn piece_value(&self, name_id: u8, owner: Player) -> Option<u8> {
        self.pieces
            .iter()
            .position(|p| p.name_id == name_id && p.owner == owner)
            .map(|i| i as u8 + 1)
    }

    /// The Add move for `site` in `state`, as produced by the play rule.
    pub(crate) fn add_move(&self, state: &GameState, site: Site, leaf: LeafId) -> Move {
        Move {
            kind: MoveKind::Add,
            from: None,
            to: Some(site),
            mover: state.mover,
            piece: Some(PieceId(self.add_value[state.mover.index()] - 1)),
            leaf: Some(leaf),
        }
    }

    pub(crate) fn add_value(&self, p: Player) -> u8 {
        self.add_value[p.index()]
    }

    pub fn swap_available(&self, state: &GameState) -> bool {
        self.swap_rule && !state.swapped && state.move_number == 1 && state.mover == Player(2)
    }

    /// Every move the play rule yields, ignoring `ifAfterwards:` and
    /// `(noRepeat)`. Swap is not included.
    pub fn generate_unchecked(&self, state: &GameState) -> Vec<Move> {
        let mut out = Vec::new();
        if state.is_terminal() {
            return out;
        }
        self.generate_into(state, &mut out);
        out
    }

    pub(crate) fn generate_into(&self, state: &GameState, out: &mut Vec<Move>) {
        let ctx = Ctx::play(self, state);
        ctx.generate(&self.rules.play, out);
    }

    /// Moves of the play rule whose `ifAfterwards:` conditions hold.
    pub fn generate(&self, state: &GameState) -> Vec<Move> {
        let mut moves = self.generate_unchecked(state);
        moves.retain(|m| self.leaf_postconditions_hold(state, m));
        moves
    }

    fn leaf_postconditions_hold(&self, state: &GameState, m: &Move) -> bool {
        let Some(leaf) = m.leaf else { return true };
        let posts = &self.rules.leaves[leaf as usize].postconditions;
        if posts.is_empty() {
            return true;
        }
        match self.apply(state, m) {
            Ok(next) => self.postconditions_hold_in(posts, state, &next, m),
            Err(_) => false,
        }
    }

    fn postconditions_hold_in(
        &self,
        posts: &[ludemes::Condition],
        _before: &GameState,
        after: &GameState,
        m: &Move,
    ) -> bool {
        let ctx = Ctx::after(self, after, m.mover);
        posts.iter().all(|c| ctx.cond(c))
    }

    fn needs_successor(&self, m: &Move) -> bool {
        let posts = m
            .leaf
            .is_some_and(|l| !self.rules.leaves[l as usize].postconditions.is_empty());
        posts || (self.no_repeat && !matches!(m.kind, MoveKind::Pass | MoveKind::Swap))
    }

    /// Copy-and-apply check of every postcondition attached to `m`, plus the
    /// repetition restriction when `(noRepeat)` is active. Returns the
    /// successor when it is legal.
    pub fn checked_successor(&self, state: &GameState, m: &Move) -> Option<GameState> {
        let next = self.apply(state, m).ok()?;
        if let Some(leaf) = m.leaf {
            let posts = &self.rules.leaves[leaf as usize].postconditions;
            if !posts.is_empty() && !self.postconditions_hold_in(posts, state, &next, m) {
                return None;
            }
        }
        if self.no_repeat
            && !matches!(m.kind, MoveKind::Pass | MoveKind::Swap)
            && state.history.contains(&next.hash)
        {
            return None;
        }
        Some(next)
    }

    pub fn check_postconditions(&self, state: &GameState, m: &Move) -> bool {
        if !self.needs_successor(m) {
            return self.validate(state, m).is_ok();
        }
        self.checked_successor(state, m).is_some()
    }

    /// True when some move of `unchecked` may fail `check_postconditions`.
    pub(crate) fn has_postconditions(&self, m: &Move) -> bool {
        self.needs_successor(m)
    }

    /// Exact legal moves: generated moves, the swap option and the
    /// repetition restriction.
    pub fn legal_moves(&self, state: &GameState) -> Vec<Move> {
        if state.is_terminal() {
            return Vec::new();
        }
        let mut moves = self.generate_unchecked(state);
        if self.swap_available(state) {
            moves.push(Move::swap(state.mover));
        }
        moves.retain(|m| self.check_postconditions(state, m));
        moves
    }

    fn validate(&self, state: &GameState, m: &Move) -> Result<(), IllegalMoveError> {
        use IllegalMoveError::*;
        if state.is_terminal() {
            return Err(Terminated);
        }
        if m.mover != state.mover {
            return Err(WrongMover(m.mover));
        }
        let n = self.board.site_count();
        let on_board = |s: Option<Site>| s.filter(|&s| (s as usize) < n);
        match m.kind {
            MoveKind::Add => {
                let to = on_board(m.to).ok_or(Inconsistent(*m, "missing destination"))?;
                if m.from.is_some() {
                    return Err(Inconsistent(*m, "placement has a source site"));
                }
                if state.cells[to as usize] != 0 {
                    return Err(Inconsistent(*m, "destination is occupied"));
                }
                match m.piece {
                    Some(PieceId(p)) if self.pieces.get(p as usize).is_some_and(|d| d.owner == m.mover) => {}
                    _ => return Err(Inconsistent(*m, "piece is not the mover's")),
                }
            }
            MoveKind::Step => {
                let from = on_board(m.from).ok_or(Inconsistent(*m, "missing source"))?;
                let to = on_board(m.to).ok_or(Inconsistent(*m, "missing destination"))?;
                if self.owner(state, from) != Some(m.mover) {
                    return Err(Inconsistent(*m, "source does not hold a piece of the mover"));
                }
                if from == to || self.owner(state, to) == Some(m.mover) {
                    return Err(Inconsistent(*m, "destination holds a piece of the mover"));
                }
            }
            MoveKind::Promote => {
                let to = on_board(m.to).ok_or(Inconsistent(*m, "missing destination"))?;
                if self.owner(state, to) != Some(m.mover) {
                    return Err(Inconsistent(*m, "promoted site does not hold a piece of the mover"));
                }
                match m.piece {
                    Some(PieceId(p)) if self.pieces.get(p as usize).is_some_and(|d| d.owner == m.mover) => {}
                    _ => return Err(Inconsistent(*m, "piece is not the mover's")),
                }
            }
            MoveKind::Pass => {
                if m.from.is_some() || m.to.is_some() {
                    return Err(Inconsistent(*m, "pass has sites"));
                }
            }
            MoveKind::Swap => {
                if !self.swap_available(state) {
                    return Err(Inconsistent(*m, "swap is only legal as the second player's first move"));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn set_cell(&self, state: &mut GameState, site: Site, value: u8) {
        let old = state.cells[site as usize];
        state.hash ^= self.zobrist.cell(site, old) ^ self.zobrist.cell(site, value);
        state.cells[site as usize] = value;
    }

    /// Returns the successor of `state` after `m`; `state` is not modified.
    pub fn apply(&self, state: &GameState, m: &Move) -> Result<GameState, IllegalMoveError> {
        let mut next = state.clone();
        self.apply_in_place(&mut next, m)?;
        Ok(next)
    }

    pub(crate) fn apply_in_place(&self, state: &mut GameState, m: &Move) -> Result<(), IllegalMoveError> {
        self.validate(state, m)?;
        match m.kind {
            MoveKind::Add | MoveKind::Promote => {
                let value = m.piece.map_or(0, |p| p.0 + 1);
                self.set_cell(state, m.to.unwrap(), value);
            }
            MoveKind::Step => {
                let (from, to) = (m.from.unwrap(), m.to.unwrap());
                let value = state.cells[from as usize];
                self.set_cell(state, from, 0);
                self.set_cell(state, to, value);
            }
            MoveKind::Pass => {}
            MoveKind::Swap => {
                for s in 0..state.cells.len() {
                    let v = state.cells[s];
                    if self.owners[v as usize] == 1 {
                        let flipped = self
                            .piece_value(self.name_ids[v as usize], Player(2))
                            .unwrap_or(self.add_value[2]);
                        self.set_cell(state, s as Site, flipped);
                    }
                }
                state.swapped = true;
            }
        }
        state.last_move = Some(*m);
        state.passes = if m.kind == MoveKind::Pass { state.passes + 1 } else { 0 };

        let mut again = false;
        if let Some(leaf) = m.leaf {
            let effects = &self.rules.leaves[leaf as usize].effects;
            if !effects.is_empty() {
                again = Ctx::effects(self, state, m.mover, effects);
            }
        }

        state.move_number += 1;
        let next = if again { m.mover } else { m.mover.following(self.desc.player_count) };
        if next != state.mover {
            state.hash ^= self.zobrist.mover(state.mover) ^ self.zobrist.mover(next);
            state.mover = next;
        }
        if self.no_repeat {
            state.history.push(state.hash);
        }
        if let Some(outcome) = self.end_outcome(state) {
            state.status = Status::Terminated(outcome);
        }
        Ok(())
    }

    /// First end rule that fires, not counting rules that need the absence
    /// of legal moves.
    fn end_outcome(&self, state: &GameState) -> Option<Outcome> {
        let ctx = Ctx::end(self, state, None);
        self.rules
            .end
            .iter()
            .filter(|r| !r.needs_no_moves)
            .find(|r| ctx.cond(&r.condition))
            .map(|r| ctx.result(&r.result))
    }

    /// Outcome of a state whose player to move has no legal move: the first
    /// `(no Moves)` rule that fires, or a draw.
    pub fn resolve_no_moves(&self, state: &GameState) -> Outcome {
        let ctx = Ctx::end(self, state, Some(true));
        self.rules
            .end
            .iter()
            .filter(|r| r.needs_no_moves)
            .find(|r| ctx.cond(&r.condition))
            .map(|r| ctx.result(&r.result))
            .unwrap_or_else(|| Outcome::draw(self.desc.player_count))
    }

    /// Outcome of `state` if the game is over in it.
    pub fn eval_end(&self, state: &GameState) -> Option<Outcome> {
        if let Status::Terminated(o) = &state.status {
            return Some(o.clone());
        }
        if let Some(o) = self.end_outcome(state) {
            return Some(o);
        }
        self.legal_moves(state)
            .is_empty()
            .then(|| self.resolve_no_moves(state))
    }

    /// Position hash computed from scratch.
    pub fn recompute_hash(&self, state: &GameState) -> u64 {
        self.zobrist.full(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdl;

    fn ttt() -> Game {
        Game::new(gdl::parse(gdl::tests::TIC_TAC_TOE).unwrap()).unwrap()
    }

    #[test]
    fn initial_tic_tac_toe() {
        let g = ttt();
        let s = g.initial_state();
        assert_eq!(s.empty_count(), 9);
        assert_eq!(s.mover(), Player(1));
        assert_eq!(s.move_number(), 0);
        assert!(s.hash_history().is_empty());
        assert_eq!(g.legal_moves(&s).len(), 9);
    }

    #[test]
    fn add_at_centre() {
        let g = ttt();
        let s = g.initial_state();
        let m = g.legal_moves(&s).into_iter().find(|m| m.to == Some(4)).unwrap();
        let t = g.apply(&s, &m).unwrap();
        assert_eq!(g.pieces()[t.piece_at(4).unwrap().0 as usize].name, "Disc");
        assert_eq!(t.mover(), Player(2));
        assert_eq!(s.empty_count(), 9);
        assert_eq!(t.hash(), g.recompute_hash(&t));
        assert!(g.apply(&t, &m).is_err());
    }

    #[test]
    fn outcomes() {
        let w = Outcome::win(2, Player(2));
        assert_eq!(w.utilities, vec![-1.0, 1.0]);
        assert_eq!(w.winner(), Some(Player(2)));
        assert_eq!(Outcome::loss(2, Player(2)).winner(), Some(Player(1)));
        assert_eq!(Outcome::loss(3, Player(1)).utilities, vec![-1.0, 0.0, 0.0]);
        assert_eq!(Outcome::draw(2).winner(), None);
    }
}
