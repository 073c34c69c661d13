//! Flood fills over same-owner groups: liberties, captures, connections,
//! territory and loops.

use crate::engine::{Board, Game, GameState, Player, Site};

/// Sites of the group containing `start` (same owner, adjacency of the
/// board), or empty when `start` is empty.
pub(crate) fn group(game: &Game, state: &GameState, start: Site) -> Vec<Site> {
    let owner = game.owner_of_value(state.cells[start as usize]);
    if owner == 0 {
        return Vec::new();
    }
    flood(game.board(), start, |s| {
        game.owner_of_value(state.cells[s as usize]) == owner
    })
}

pub(crate) fn flood(board: &Board, start: Site, member: impl Fn(Site) -> bool) -> Vec<Site> {
    let mut seen = vec![false; board.site_count()];
    let mut out = vec![start];
    seen[start as usize] = true;
    let mut i = 0;
    while i < out.len() {
        let s = out[i];
        i += 1;
        for &t in board.adjacent(s) {
            if !seen[t as usize] && member(t) {
                seen[t as usize] = true;
                out.push(t);
            }
        }
    }
    out
}

pub(crate) fn liberties(game: &Game, state: &GameState, site: Site) -> usize {
    let stones = group(game, state, site);
    let mut libs: Vec<Site> = Vec::new();
    for &s in &stones {
        for &t in game.board().adjacent(s) {
            if state.cells[t as usize] == 0 && !libs.contains(&t) {
                libs.push(t);
            }
        }
    }
    libs.len()
}

fn has_liberty(game: &Game, state: &GameState, stones: &[Site]) -> bool {
    stones.iter().any(|&s| {
        game.board()
            .adjacent(s)
            .iter()
            .any(|&t| state.cells[t as usize] == 0)
    })
}

pub(crate) fn groups_without_liberty(game: &Game, state: &GameState) -> usize {
    let n = game.board().site_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n as Site {
        if seen[s as usize] || state.cells[s as usize] == 0 {
            continue;
        }
        let stones = group(game, state, s);
        for &t in &stones {
            seen[t as usize] = true;
        }
        if !has_liberty(game, state, &stones) {
            count += 1;
        }
    }
    count
}

/// Removes enemy groups next to `site` left without liberties.
pub(crate) fn capture_around(game: &Game, state: &mut GameState, site: Site, mover: Player) {
    for &a in game.board().adjacent(site) {
        let owner = game.owner_of_value(state.cells[a as usize]);
        if owner == 0 || owner == mover.0 {
            continue;
        }
        let stones = group(game, state, a);
        if !has_liberty(game, state, &stones) {
            for s in stones {
                game.set_cell(state, s, 0);
            }
        }
    }
}

/// Stones plus empty regions bordered only by that player, for players 1
/// and 2.
pub(crate) fn area_scores(game: &Game, state: &GameState) -> [usize; 2] {
    let n = game.board().site_count();
    let mut score = [0usize; 2];
    let mut seen = vec![false; n];
    for s in 0..n as Site {
        match game.owner_of_value(state.cells[s as usize]) {
            1 => score[0] += 1,
            2 => score[1] += 1,
            0 if !seen[s as usize] => {
                let region = flood(game.board(), s, |t| state.cells[t as usize] == 0);
                let mut borders = 0u8;
                for &r in &region {
                    seen[r as usize] = true;
                    for &t in game.board().adjacent(r) {
                        match game.owner_of_value(state.cells[t as usize]) {
                            1 => borders |= 1,
                            2 => borders |= 2,
                            _ => {}
                        }
                    }
                }
                match borders {
                    1 => score[0] += region.len(),
                    2 => score[1] += region.len(),
                    _ => {}
                }
            }
            _ => {}
        }
    }
    score
}

/// Starting sites for connection checks: the last destination when it holds
/// a piece of `p`, otherwise every piece of `p`.
fn seeds(game: &Game, state: &GameState, p: Player) -> Vec<Site> {
    if let Some(to) = state.last_move.and_then(|m| m.to) {
        if game.owner(state, to) == Some(p) {
            return vec![to];
        }
    }
    (0..game.board().site_count() as Site)
        .filter(|&s| game.owner(state, s) == Some(p))
        .collect()
}

/// True when some group of `p` satisfies `test`, given its sites.
fn any_group(game: &Game, state: &GameState, p: Player, test: impl Fn(&[Site]) -> bool) -> bool {
    let mut seen = vec![false; game.board().site_count()];
    for s in seeds(game, state, p) {
        if seen[s as usize] {
            continue;
        }
        let stones = group(game, state, s);
        for &t in &stones {
            seen[t as usize] = true;
        }
        if test(&stones) {
            return true;
        }
    }
    false
}

pub(crate) fn connects_sides(game: &Game, state: &GameState, p: Player, sides: u8) -> bool {
    let board = game.board();
    any_group(game, state, p, |stones| {
        let mask = stones.iter().fold(0u8, |m, &s| m | board.side_mask(s));
        mask & sides == sides
    })
}

pub(crate) fn connects_corners(game: &Game, state: &GameState, p: Player, n: u32) -> bool {
    let board = game.board();
    any_group(game, state, p, |stones| {
        stones.iter().filter(|&&s| board.is_corner(s)).count() as u32 >= n
    })
}

pub(crate) fn connects_edges(game: &Game, state: &GameState, p: Player, n: u32) -> bool {
    let board = game.board();
    any_group(game, state, p, |stones| {
        let mask = stones
            .iter()
            .filter_map(|&s| board.edge(s))
            .fold(0u8, |m, e| m | (1 << e));
        mask.count_ones() >= n
    })
}

/// A ring of `p` pieces enclosing at least one cell: either some cell not
/// owned by `p` is cut off from the boundary, or some piece of `p` has all
/// six neighbours owned by `p`.
pub(crate) fn has_loop(game: &Game, state: &GameState, p: Player) -> bool {
    let board = game.board();
    let n = board.site_count();
    let mine = |s: Site| game.owner(state, s) == Some(p);
    for s in 0..n as Site {
        if mine(s) && !board.is_boundary(s) && board.adjacent(s).iter().all(|&t| mine(t)) {
            return true;
        }
    }
    let mut seen = vec![false; n];
    let mut stack: Vec<Site> = Vec::new();
    for s in 0..n as Site {
        if board.is_boundary(s) && !mine(s) {
            seen[s as usize] = true;
            stack.push(s);
        }
    }
    while let Some(s) = stack.pop() {
        for &t in board.adjacent(s) {
            if !seen[t as usize] && !mine(t) {
                seen[t as usize] = true;
                stack.push(t);
            }
        }
    }
    (0..n as Site).any(|s| !mine(s) && !seen[s as usize])
}
