use crate::gdl::BoardSpec;

pub type Site = u16;

pub(crate) const OFF_BOARD: Site = Site::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Square,
    Hex,
}

/// Compass directions on square boards, in clockwise order from north.
/// Row 0 is the bottom row, so `N` increases the row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn opposite(self) -> Direction {
        Direction::ALL[(self.index() + 4) % 8]
    }

    fn delta(self) -> (i32, i32) {
        match self {
            Direction::N => (1, 0),
            Direction::NE => (1, 1),
            Direction::E => (0, 1),
            Direction::SE => (-1, 1),
            Direction::S => (-1, 0),
            Direction::SW => (-1, -1),
            Direction::W => (0, -1),
            Direction::NW => (1, -1),
        }
    }

    pub fn from_name(name: &str) -> Option<Direction> {
        Some(match name {
            "N" => Direction::N,
            "NE" => Direction::NE,
            "E" => Direction::E,
            "SE" => Direction::SE,
            "S" => Direction::S,
            "SW" => Direction::SW,
            "W" => Direction::W,
            "NW" => Direction::NW,
            _ => return None,
        })
    }
}

// Axial neighbour offsets (dq, dr); entry i + 3 is the opposite of entry i.
const HEX_DELTAS: [(i32, i32); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

pub(crate) const SIDE_FIRST_ROW: u8 = 1;
pub(crate) const SIDE_LAST_ROW: u8 = 2;
pub(crate) const SIDE_FIRST_COL: u8 = 4;
pub(crate) const SIDE_LAST_COL: u8 = 8;

pub(crate) const NO_EDGE: u8 = u8::MAX;

/// Site graph of a board: coordinates, adjacency, directional steps and the
/// boundary features used by connection and line conditions.
#[derive(Debug, Clone)]
pub struct Board {
    spec: BoardSpec,
    geometry: Geometry,
    rows: i32,
    cols: i32,
    /// (row, col) on square boards, axial (r, q) on hex boards.
    coords: Vec<(i32, i32)>,
    xy: Vec<(f64, f64)>,
    centre: (f64, f64),
    steps: Vec<[Site; 8]>,
    adjacent: Vec<Vec<Site>>,
    boundary: Vec<bool>,
    corner: Vec<bool>,
    edge: Vec<u8>,
    sides: Vec<u8>,
}

impl Board {
    pub fn new(spec: BoardSpec) -> Board {
        let (geometry, cells, rows, cols) = match spec {
            BoardSpec::Square(n) => (Geometry::Square, grid(n, n), n as i32, n as i32),
            BoardSpec::Rectangle { rows, cols } => {
                (Geometry::Square, grid(rows, cols), rows as i32, cols as i32)
            }
            BoardSpec::HexDiamond(n) => (Geometry::Hex, grid(n, n), n as i32, n as i32),
            BoardSpec::Hexagon(n) => {
                let k = n as i32 - 1;
                let mut cells = Vec::new();
                for r in -k..=k {
                    for q in -k..=k {
                        if (q + r).abs() <= k {
                            cells.push((r, q));
                        }
                    }
                }
                (Geometry::Hex, cells, 2 * k + 1, 2 * k + 1)
            }
        };
        let index_of = |c: (i32, i32)| cells.iter().position(|&x| x == c);
        let n = cells.len();

        let mut steps = vec![[OFF_BOARD; 8]; n];
        for (s, &(a, b)) in cells.iter().enumerate() {
            match geometry {
                Geometry::Square => {
                    for d in Direction::ALL {
                        let (dr, dc) = d.delta();
                        if let Some(t) = index_of((a + dr, b + dc)) {
                            steps[s][d.index()] = t as Site;
                        }
                    }
                }
                Geometry::Hex => {
                    for (i, (dq, dr)) in HEX_DELTAS.iter().enumerate() {
                        if let Some(t) = index_of((a + dr, b + dq)) {
                            steps[s][i] = t as Site;
                        }
                    }
                }
            }
        }

        let full = match geometry {
            Geometry::Square => 4,
            Geometry::Hex => 6,
        };
        let adjacent: Vec<Vec<Site>> = steps
            .iter()
            .map(|st| match geometry {
                Geometry::Square => [0, 2, 4, 6]
                    .iter()
                    .map(|&i| st[i])
                    .filter(|&t| t != OFF_BOARD)
                    .collect(),
                Geometry::Hex => st[..6].iter().copied().filter(|&t| t != OFF_BOARD).collect(),
            })
            .collect();
        let boundary = adjacent.iter().map(|a| a.len() < full).collect();

        let xy: Vec<(f64, f64)> = cells
            .iter()
            .map(|&(a, b)| match geometry {
                Geometry::Square => (b as f64, a as f64),
                Geometry::Hex => (b as f64 + a as f64 / 2.0, a as f64 * 3f64.sqrt() / 2.0),
            })
            .collect();
        let centre = {
            let (sx, sy) = xy.iter().fold((0.0, 0.0), |(x, y), p| (x + p.0, y + p.1));
            (sx / n as f64, sy / n as f64)
        };

        let mut corner = vec![false; n];
        let mut edge = vec![NO_EDGE; n];
        let mut sides = vec![0u8; n];
        for (s, &(a, b)) in cells.iter().enumerate() {
            match spec {
                BoardSpec::Hexagon(size) => {
                    let k = size as i32 - 1;
                    let (q, r) = (b, a);
                    let cube = [q, r, -q - r];
                    let extremes = cube.iter().filter(|v| v.abs() == k).count();
                    if k == 0 || extremes >= 2 {
                        corner[s] = true;
                    } else if extremes == 1 {
                        let axis = cube.iter().position(|v| v.abs() == k).unwrap();
                        edge[s] = (axis * 2 + usize::from(cube[axis] < 0)) as u8;
                    }
                }
                _ => {
                    let mut m = 0;
                    if a == 0 {
                        m |= SIDE_FIRST_ROW;
                    }
                    if a == rows - 1 {
                        m |= SIDE_LAST_ROW;
                    }
                    if b == 0 {
                        m |= SIDE_FIRST_COL;
                    }
                    if b == cols - 1 {
                        m |= SIDE_LAST_COL;
                    }
                    sides[s] = m;
                }
            }
        }

        Board {
            spec,
            geometry,
            rows,
            cols,
            coords: cells,
            xy,
            centre,
            steps,
            adjacent,
            boundary,
            corner,
            edge,
            sides,
        }
    }

    pub fn spec(&self) -> BoardSpec {
        self.spec
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn site_count(&self) -> usize {
        self.coords.len()
    }

    pub fn rows(&self) -> i32 {
        self.rows
    }

    pub fn cols(&self) -> i32 {
        self.cols
    }

    /// Row index on square and diamond boards (0 = bottom).
    pub fn row(&self, site: Site) -> i32 {
        self.coords[site as usize].0
    }

    pub fn col(&self, site: Site) -> i32 {
        self.coords[site as usize].1
    }

    pub fn site_at(&self, row: i32, col: i32) -> Option<Site> {
        self.coords
            .iter()
            .position(|&c| c == (row, col))
            .map(|s| s as Site)
    }

    /// Neighbour used for liberties, groups and connections.
    pub fn adjacent(&self, site: Site) -> &[Site] {
        &self.adjacent[site as usize]
    }

    pub fn step(&self, site: Site, dir: Direction) -> Option<Site> {
        self.step_index(site, dir.index())
    }

    pub(crate) fn step_index(&self, site: Site, dir: usize) -> Option<Site> {
        let t = self.steps[site as usize][dir];
        (t != OFF_BOARD).then_some(t)
    }

    /// Number of directional axes scanned by line conditions (4 on square
    /// boards, 3 on hex boards). Axis `i` runs along direction `i` and its
    /// opposite.
    pub(crate) fn line_axes(&self) -> &'static [(usize, usize)] {
        match self.geometry {
            Geometry::Square => &[(0, 4), (1, 5), (2, 6), (3, 7)],
            Geometry::Hex => &[(0, 3), (1, 4), (2, 5)],
        }
    }

    pub fn is_boundary(&self, site: Site) -> bool {
        self.boundary[site as usize]
    }

    pub fn is_corner(&self, site: Site) -> bool {
        self.corner[site as usize]
    }

    /// Edge index (0..6) of a non-corner boundary cell on a hexagon board.
    pub fn edge(&self, site: Site) -> Option<u8> {
        let e = self.edge[site as usize];
        (e != NO_EDGE).then_some(e)
    }

    pub(crate) fn side_mask(&self, site: Site) -> u8 {
        self.sides[site as usize]
    }

    pub fn position(&self, site: Site) -> (f64, f64) {
        self.xy[site as usize]
    }

    pub fn distance_from_centre(&self, site: Site) -> f64 {
        let (x, y) = self.xy[site as usize];
        ((x - self.centre.0).powi(2) + (y - self.centre.1).powi(2)).sqrt()
    }

    pub fn max_distance_from_centre(&self) -> f64 {
        (0..self.site_count() as Site)
            .map(|s| self.distance_from_centre(s))
            .fold(0.0, f64::max)
    }
}

fn grid(rows: u16, cols: u16) -> Vec<(i32, i32)> {
    let mut cells = Vec::with_capacity(rows as usize * cols as usize);
    for r in 0..rows as i32 {
        for c in 0..cols as i32 {
            cells.push((r, c));
        }
    }
    cells
}
