//! UCT search with an injected playout function.

use crate::engine::{Game, GameState, Move, Outcome, Player};

pub const DEFAULT_EXPLORATION: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub state: GameState,
    /// Exact legal moves of `state`, in generation order.
    pub moves: Vec<Move>,
    /// Children for the first `children.len()` moves.
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    pub visits: u32,
    /// Sum of backed-up utilities, indexed by player - 1.
    pub total_value: Vec<f64>,
    /// Set when the game is over at this node.
    pub outcome: Option<Outcome>,
}

impl SearchNode {
    fn new(game: &Game, state: GameState, parent: Option<usize>) -> SearchNode {
        let moves = game.legal_moves(&state);
        let outcome = match state.outcome() {
            Some(o) => Some(o.clone()),
            None if moves.is_empty() => Some(game.resolve_no_moves(&state)),
            None => None,
        };
        SearchNode {
            total_value: vec![0.0; game.player_count() as usize],
            state,
            moves,
            children: Vec::new(),
            parent,
            visits: 0,
            outcome,
        }
    }

    pub fn mean_value(&self, p: Player) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.total_value[p.index() - 1] / self.visits as f64
        }
    }
}

/// Search tree stored in an arena; node 0 is the root.
#[derive(Debug, Clone)]
pub struct Tree {
    pub nodes: Vec<SearchNode>,
}

impl Tree {
    pub fn root(&self) -> &SearchNode {
        &self.nodes[0]
    }

    /// Most visited root move, lowest index on ties.
    pub fn best_move(&self) -> Option<Move> {
        let root = self.root();
        let mut best: Option<(usize, u32)> = None;
        for (i, &c) in root.children.iter().enumerate() {
            let v = self.nodes[c].visits;
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| root.moves[i])
    }
}

fn select_child(tree: &Tree, node: usize, c: f64) -> usize {
    let n = &tree.nodes[node];
    let mover = n.state.mover();
    let ln_n = (n.visits.max(1) as f64).ln();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &child) in n.children.iter().enumerate() {
        let ch = &tree.nodes[child];
        let ucb = ch.mean_value(mover) + c * (ln_n / ch.visits as f64).sqrt();
        if ucb > best.1 {
            best = (i, ucb);
        }
    }
    n.children[best.0]
}

/// Runs `iterations` rounds of selection, expansion, playout and
/// backpropagation from `root` and returns the tree.
pub fn search_tree(
    game: &Game,
    root: &GameState,
    iterations: u32,
    playout: &mut dyn FnMut(&GameState) -> Outcome,
    exploration: f64,
) -> Tree {
    let mut tree = Tree {
        nodes: vec![SearchNode::new(game, root.clone(), None)],
    };
    for _ in 0..iterations.max(1) {
        let mut node = 0;
        while tree.nodes[node].outcome.is_none() && tree.nodes[node].children.len() == tree.nodes[node].moves.len() {
            node = select_child(&tree, node, exploration);
        }
        if tree.nodes[node].outcome.is_none() {
            let parent = &tree.nodes[node];
            let m = parent.moves[parent.children.len()];
            let state = game
                .apply(&parent.state, &m)
                .expect("tree moves come from legal_moves");
            tree.nodes.push(SearchNode::new(game, state, Some(node)));
            let child = tree.nodes.len() - 1;
            tree.nodes[node].children.push(child);
            node = child;
        }
        let outcome = match &tree.nodes[node].outcome {
            Some(o) => o.clone(),
            None => playout(&tree.nodes[node].state),
        };
        let mut cur = Some(node);
        while let Some(i) = cur {
            let n = &mut tree.nodes[i];
            n.visits += 1;
            for (v, u) in n.total_value.iter_mut().zip(&outcome.utilities) {
                *v += u;
            }
            cur = n.parent;
        }
    }
    tree
}

/// Most visited root move after `iterations` UCT rounds, or `None` when the
/// root has no legal move.
pub fn search(
    game: &Game,
    root: &GameState,
    iterations: u32,
    playout: &mut dyn FnMut(&GameState) -> Outcome,
    exploration: f64,
) -> Option<Move> {
    search_tree(game, root, iterations, playout, exploration).best_move()
}
