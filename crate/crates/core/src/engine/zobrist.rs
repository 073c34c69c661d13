use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GameState, Player, Site};

/// One key per (site, cell value) and one per player to move.
#[derive(Debug, Clone)]
pub(crate) struct Zobrist {
    cells: Vec<u64>,
    values: usize,
    movers: Vec<u64>,
}

// 64-bit FNV-1a, so that the seed depends only on the game name.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl Zobrist {
    pub fn new(name: &str, sites: usize, pieces: usize, players: u8) -> Zobrist {
        let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(name.as_bytes()));
        let values = pieces + 1;
        let mut cells = vec![0u64; sites * values];
        for s in 0..sites {
            for v in 1..values {
                cells[s * values + v] = rng.gen();
            }
        }
        let movers = (0..=players).map(|_| rng.gen()).collect();
        Zobrist {
            cells,
            values,
            movers,
        }
    }

    #[inline]
    pub fn cell(&self, site: Site, value: u8) -> u64 {
        self.cells[site as usize * self.values + value as usize]
    }

    #[inline]
    pub fn mover(&self, p: Player) -> u64 {
        self.movers[p.index()]
    }

    pub fn full(&self, state: &GameState) -> u64 {
        let mut h = self.mover(state.mover);
        for (s, &v) in state.cells.iter().enumerate() {
            h ^= self.cell(s as Site, v);
        }
        h
    }
}
