//! Rule evaluation: compiles the S-expression rule bodies of a
//! [`GameDescription`](crate::gdl::GameDescription) into typed trees and
//! evaluates them over game states (move generators, conditions, effects,
//! end rules).

mod compile;
mod eval;
mod groups;

pub(crate) use compile::{compile, RuleSet};
pub(crate) use eval::Ctx;

use thiserror::Error;

use crate::engine::{Direction, Player, Site};

/// Raised when a rule references a region, direction, piece or role that does
/// not exist for the game it appears in.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot evaluate `{expr}`: {reason}")]
pub struct EvalError {
    pub expr: String,
    pub reason: String,
}

pub type LeafId = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Mover,
    Next,
    Player(Player),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Empty,
    Board,
    Row(i32),
    Col(i32),
    /// Far row from the bound mover's point of view.
    LastRank,
    Occupied(Role),
    Sites(Vec<Site>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiteExpr {
    Literal(Site),
    /// Candidate destination inside a `(to ... if:...)` filter.
    To,
    LastTo,
    LastFrom,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IntExpr {
    Literal(i64),
    Liberties(SiteExpr),
    GroupsWithoutLiberty,
    Pieces(Option<Role>),
    EmptySites,
    Moves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Line(u32),
    ConnectedSides,
    ConnectedCorners(u32),
    ConnectedEdges(u32),
    Loop,
    Full,
    Threatened { piece: u8, role: Role },
    Repeat,
    Eye(SiteExpr),
    PrevMover,
    Passed(u32),
    IsEmpty(SiteExpr),
    In(SiteExpr, Region),
    NoMoves,
    Compare(CmpOp, IntExpr, IntExpr),
    And(Vec<Condition>),
    Or(Vec<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    pub(crate) fn mentions_no_moves(&self) -> bool {
        match self {
            Condition::NoMoves => true,
            Condition::And(cs) | Condition::Or(cs) => cs.iter().any(Condition::mentions_no_moves),
            Condition::Not(c) => c.mentions_no_moves(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    /// Removes enemy groups adjacent to the destination that have no liberties.
    Capture,
    MoveAgain,
    If(Condition, Vec<Effect>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Empty,
    Enemy,
    EmptyOrEnemy,
}

impl Target {
    pub(crate) fn allows_empty(self) -> bool {
        matches!(self, Target::Empty | Target::EmptyOrEnemy)
    }

    pub(crate) fn allows_enemy(self) -> bool {
        matches!(self, Target::Enemy | Target::EmptyOrEnemy)
    }
}

/// Direction indices per player (index 0 unused), so relative directions
/// like `Forward` resolve without branching at generation time.
#[derive(Debug, Clone, PartialEq)]
pub struct DirTable(pub(crate) Vec<Vec<u8>>);

impl DirTable {
    pub(crate) fn for_player(&self, p: Player) -> &[u8] {
        &self.0[p.index()]
    }

    pub fn directions(&self, p: Player) -> Vec<Direction> {
        self.for_player(p)
            .iter()
            .map(|&i| Direction::ALL[i as usize])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MoveRule {
    Add {
        region: Region,
        filter: Option<Condition>,
        leaf: LeafId,
    },
    Step {
        piece: Option<u8>,
        dirs: DirTable,
        target: Target,
        leaf: LeafId,
    },
    Slide {
        piece: Option<u8>,
        dirs: DirTable,
        target: Target,
        leaf: LeafId,
    },
    Pass {
        leaf: LeafId,
    },
    Promote {
        site: SiteExpr,
        piece: u8,
        leaf: LeafId,
    },
    Or(Vec<MoveRule>),
    If {
        cond: Condition,
        then: Box<MoveRule>,
        otherwise: Option<Box<MoveRule>>,
    },
    /// Generator whose moves are filtered by a postcondition on the successor.
    Do {
        body: Box<MoveRule>,
        post: Condition,
    },
}

/// Per-generator data attached to every move it yields: the postconditions of
/// all enclosing `do ... ifAfterwards:` forms and the `then` consequences.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Leaf {
    pub postconditions: Vec<Condition>,
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payoff {
    Win,
    Loss,
    Draw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResultSpec {
    Role(Role, Payoff),
    ByArea,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledEndRule {
    pub condition: Condition,
    pub result: ResultSpec,
    /// Rules mentioning `(no Moves)` only fire once the player to move is
    /// known to have no legal move.
    pub needs_no_moves: bool,
}

/// A step or slide generator that can capture, used for threat detection.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Attack {
    pub piece: Option<u8>,
    pub dirs: DirTable,
    pub slide: bool,
}
