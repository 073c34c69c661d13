//! Supported ludeme vocabulary. Any identifier outside this list is rejected
//! at parse time so that rule shapes the engine does not understand can never
//! silently change what a game means.

pub const VOCABULARY: &[&str] = &[
    // structure
    "game", "players", "equipment", "board", "square", "rectangle", "hex", "Diamond", "piece",
    "rules", "start", "place", "meta", "swap", "noRepeat", "play", "end",
    // roles
    "P1", "P2", "P3", "P4", "Each", "Mover", "Next", "All", "Enemy",
    // move generators
    "move", "Add", "Step", "Slide", "Pass", "Promote", "to", "to:", "if:", "do", "ifAfterwards:",
    "or", "if", "forEach", "Piece", "then", "capture", "moveAgain",
    // step targets and directions
    "Empty", "EmptyOrEnemy", "N", "S", "E", "W", "NE", "NW", "SE", "SW", "Orthogonal",
    "Diagonal", "Forward", "Backward", "ForwardDiagonal", "Forwards",
    // regions and sites
    "sites", "Board", "Row", "Col", "LastRank", "Occupied", "last", "To", "From",
    // conditions
    "is", "Line", "Connected", "Sides", "Corners", "Edges", "Loop", "Full", "Threatened",
    "Repeat", "Eye", "Prev", "Passed", "In", "no", "Moves", "and", "not", "=", "!=", "<", ">",
    "<=", ">=", "liberties", "count", "Groups", "NoLiberty", "Pieces", "Sites",
    // results
    "result", "Win", "Loss", "Draw", "byArea",
];

pub fn is_supported(ident: &str) -> bool {
    VOCABULARY.contains(&ident)
}
