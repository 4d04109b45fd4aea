//! Wang tile sets, torus tilings and a bounded periodic-tiling search.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Edge indices into a tile.
pub const N: usize = 0;
pub const E: usize = 1;
pub const S: usize = 2;
pub const W: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileSet {
    pub colors: u32,
    /// `[N, E, S, W]` colors, each in `1..=colors`.
    pub tiles: Vec<[u32; 4]>,
}

impl TileSet {
    pub fn new(colors: u32, tiles: Vec<[u32; 4]>) -> Result<Self> {
        let ts = TileSet { colors, tiles };
        ts.validate()?;
        Ok(ts)
    }

    pub fn validate(&self) -> Result<()> {
        if self.colors == 0 {
            return Err(Error::InvalidTileSet("no colors".into()));
        }
        if self.tiles.is_empty() {
            return Err(Error::InvalidTileSet("no tiles".into()));
        }
        let mut seen = HashSet::new();
        for t in &self.tiles {
            if t.iter().any(|&c| c == 0 || c > self.colors) {
                return Err(Error::InvalidTileSet(format!("tile {t:?} uses a color outside 1..={}", self.colors)));
            }
            if !seen.insert(*t) {
                return Err(Error::InvalidTileSet(format!("duplicate tile {t:?}")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ts: TileSet = serde_json::from_str(text)?;
        ts.validate()?;
        Ok(ts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tile sets serialize") + "\n"
    }
}

/// A tiling of the torus `Z_a × Z_b`; `grid[u][v]` is the tile at column `u`
/// and row `v`, with `v + 1` to the north and `u + 1` to the east.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicTiling {
    pub a: usize,
    pub b: usize,
    pub grid: Vec<Vec<usize>>,
}

impl PeriodicTiling {
    pub fn at(&self, u: usize, v: usize) -> usize {
        self.grid[u % self.a][v % self.b]
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tilings serialize") + "\n"
    }

    /// Rows from north to south, tiles as indices.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in (0..self.b).rev() {
            let row: Vec<String> = (0..self.a).map(|u| self.grid[u][v].to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn check_shape(ts: &TileSet, til: &PeriodicTiling) -> Result<()> {
    if til.a == 0 || til.b == 0 || til.grid.len() != til.a || til.grid.iter().any(|c| c.len() != til.b) {
        return Err(Error::InvalidTiling(format!("grid does not have shape {}x{}", til.a, til.b)));
    }
    for col in &til.grid {
        for &t in col {
            if t >= ts.tiles.len() {
                return Err(Error::InvalidTiling(format!("tile index {t} out of range")));
            }
        }
    }
    Ok(())
}

/// Checks every east/west and north/south contact, wrapping around.
pub fn validate_tiling(ts: &TileSet, til: &PeriodicTiling) -> Result<bool> {
    check_shape(ts, til)?;
    for u in 0..til.a {
        for v in 0..til.b {
            let here = &ts.tiles[til.at(u, v)];
            if here[E] != ts.tiles[til.at(u + 1, v)][W] || here[N] != ts.tiles[til.at(u, v + 1)][S] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Depth-first fill of an `a × b` torus, cells in row order (`u` fastest).
fn search(ts: &TileSet, a: usize, b: usize) -> Option<PeriodicTiling> {
    let cells = a * b;
    let mut placed = vec![0usize; cells];
    let fits = |placed: &[usize], idx: usize, t: usize| {
        let (u, v) = (idx % a, idx / a);
        let tile = &ts.tiles[t];
        let tile_at = |uu: usize, vv: usize| {
            if uu == u && vv == v {
                tile
            } else {
                &ts.tiles[placed[vv * a + uu]]
            }
        };
        if u > 0 && tile_at(u - 1, v)[E] != tile[W] {
            return false;
        }
        if u == a - 1 && tile[E] != tile_at(0, v)[W] {
            return false;
        }
        if v > 0 && tile_at(u, v - 1)[N] != tile[S] {
            return false;
        }
        if v == b - 1 && tile[N] != tile_at(u, 0)[S] {
            return false;
        }
        true
    };
    let mut idx = 0usize;
    let mut next = vec![0usize; cells];
    loop {
        if idx == cells {
            let grid = (0..a).map(|u| (0..b).map(|v| placed[v * a + u]).collect()).collect();
            return Some(PeriodicTiling { a, b, grid });
        }
        let mut found = false;
        while next[idx] < ts.tiles.len() {
            let t = next[idx];
            next[idx] += 1;
            if fits(&placed, idx, t) {
                placed[idx] = t;
                found = true;
                break;
            }
        }
        if found {
            idx += 1;
            if idx < cells {
                next[idx] = 0;
            }
        } else {
            if idx == 0 {
                return None;
            }
            idx -= 1;
        }
    }
}

/// Smallest `(a, b)` in lexicographic order with a valid tiling, both at most
/// `max_period`. Candidates are searched in parallel but the reported result
/// does not depend on scheduling.
pub fn find_periodic_tiling(ts: &TileSet, max_period: usize) -> Option<PeriodicTiling> {
    let pairs: Vec<(usize, usize)> = (1..=max_period).flat_map(|a| (1..=max_period).map(move |b| (a, b))).collect();
    pairs.par_iter().find_map_first(|&(a, b)| search(ts, a, b))
}
