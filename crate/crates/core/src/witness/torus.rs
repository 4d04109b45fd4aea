//! Colored tori built from a periodic tiling.
//!
//! The torus is `Z_{2L} × Z_{2L}` with `L = lcm(a, b)` (at least 2). A unit
//! face with lower corner `(i, j)`, `i + j` even, carries the tile at
//! `((i − j)/2, (−i − j)/2) mod L`; faces with `i, j` even are of type 11 and
//! faces with `i, j` odd of type 22.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::tiling::{validate_tiling, PeriodicTiling, TileSet, E, N, S, W};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredTorus {
    /// Side length `2L`.
    pub side: usize,
    /// `+1` or `−1`; every vertex color carries this sign.
    pub sign: i32,
    colors: Vec<i32>,
}

impl ColoredTorus {
    pub fn color(&self, i: usize, j: usize) -> i32 {
        self.colors[(i % self.side) * self.side + j % self.side]
    }

    /// Parity group of a vertex: (even, even) 1, (odd, even) 2, (odd, odd) 3, (even, odd) 4.
    pub fn group(i: usize, j: usize) -> u32 {
        match (i % 2, j % 2) {
            (0, 0) => 1,
            (1, 0) => 2,
            (1, 1) => 3,
            _ => 4,
        }
    }

    /// Absolute vertex colors of the face with lower corner `(i, j)`, listed
    /// as `(i, j), (i+1, j), (i+1, j+1), (i, j+1)`.
    pub fn face(&self, i: usize, j: usize) -> [u32; 4] {
        [self.color(i, j).unsigned_abs(), self.color(i + 1, j).unsigned_abs(), self.color(i + 1, j + 1).unsigned_abs(), self.color(i, j + 1).unsigned_abs()]
    }
}

/// Half-side `L` used for a tiling with periods `a × b`.
pub fn half_side(til: &PeriodicTiling) -> usize {
    til.a.lcm(&til.b).max(2)
}

/// Tile index on the face with lower corner `(i, j)`; `i + j` must be even.
pub fn face_tile(til: &PeriodicTiling, l: usize, i: usize, j: usize) -> usize {
    let (i, j, l) = (i as i64, j as i64, l as i64);
    let u = ((i - j) / 2).rem_euclid(l);
    let v = ((-i - j) / 2).rem_euclid(l);
    til.at(u as usize, v as usize)
}

/// The positive and negative colored tori of a valid tiling, with vertex
/// colors in `1..k`.
pub fn tiling_to_colored_tori(ts: &TileSet, til: &PeriodicTiling, k: u32) -> Result<[ColoredTorus; 2]> {
    ts.validate()?;
    if 4 * ts.colors >= k {
        return Err(Error::InvalidTileSet(format!("{} colors do not fit below k = {k}", ts.colors)));
    }
    if !validate_tiling(ts, til)? {
        return Err(Error::InvalidTiling("adjacent tiles disagree".into()));
    }
    let l = half_side(til);
    let side = 2 * l;
    let mut colors = vec![0i32; side * side];
    let mut put = |i: usize, j: usize, c: u32| -> Result<()> {
        let slot = &mut colors[(i % side) * side + j % side];
        if *slot != 0 && *slot != c as i32 {
            return Err(Error::InvalidTiling(format!("vertex ({i}, {j}) gets colors {slot} and {c}")));
        }
        *slot = c as i32;
        Ok(())
    };
    for i in 0..side {
        for j in 0..side {
            if (i + j) % 2 == 1 {
                continue;
            }
            let c = ts.tiles[face_tile(til, l, i, j)];
            let q = if i % 2 == 0 { [4 * c[N] - 3, 4 * c[E] - 2, 4 * c[S] - 1, 4 * c[W]] } else { [4 * c[N] - 1, 4 * c[E], 4 * c[S] - 3, 4 * c[W] - 2] };
            put(i, j, q[0])?;
            put(i + 1, j, q[1])?;
            put(i + 1, j + 1, q[2])?;
            put(i, j + 1, q[3])?;
        }
    }
    let neg = colors.iter().map(|c| -c).collect();
    Ok([ColoredTorus { side, sign: 1, colors }, ColoredTorus { side, sign: -1, colors: neg }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::catalog::{face_sets_11, face_sets_22};

    fn sorted(mut q: [u32; 4]) -> [u32; 4] {
        q.sort_unstable();
        q
    }

    #[test]
    fn faces_carry_their_tiles() {
        let ts = TileSet::new(2, vec![[1, 1, 1, 2], [1, 2, 1, 1]]).unwrap();
        let til = PeriodicTiling { a: 2, b: 1, grid: vec![vec![0], vec![1]] };
        let [pos, neg] = tiling_to_colored_tori(&ts, &til, 9).unwrap();
        assert_eq!(pos.side, 4);
        let f11 = face_sets_11(&ts.tiles);
        let f22 = face_sets_22(&ts.tiles);
        for i in 0..pos.side {
            for j in 0..pos.side {
                assert_eq!(pos.color(i, j), -neg.color(i, j));
                let c = pos.color(i, j) as u32;
                assert_eq!((c - 1) % 4 + 1, ColoredTorus::group(i, j));
                if (i + j) % 2 == 0 {
                    let set = if i % 2 == 0 { &f11 } else { &f22 };
                    assert!(set.contains(&sorted(pos.face(i, j))));
                }
            }
        }
    }

    #[test]
    fn rejects_broken_tiling() {
        let ts = TileSet::new(2, vec![[1, 1, 1, 2], [1, 2, 1, 1]]).unwrap();
        let til = PeriodicTiling { a: 1, b: 1, grid: vec![vec![0]] };
        assert!(tiling_to_colored_tori(&ts, &til, 9).is_err());
    }
}
