//! Environment generators.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{classify, EnvError, Environment, Region};
use crate::grid::Cell;

/// Full `k`×`k` square with lower-left corner at the origin.
pub fn gen_square(k: u32, source: Cell) -> Result<Environment, EnvError> {
    if k == 0 {
        return Err(EnvError::BadParams("k must be positive"));
    }
    let region = Region::rectangle(Cell::new(0, 0), k, k);
    if !region.contains(source) {
        return Err(EnvError::SourceOutOfBounds(source));
    }
    Environment::new(region, source)
}

/// Straight horizontal path of `n` cells with the source at the left end.
pub fn gen_path(n: u32) -> Result<Environment, EnvError> {
    if n == 0 {
        return Err(EnvError::BadParams("n must be positive"));
    }
    Environment::new(Region::rectangle(Cell::new(0, 0), n, 1), Cell::new(0, 0))
}

/// Border of a `w`×`h` rectangle, source at the lower-left corner.
pub fn gen_ring(w: u32, h: u32) -> Result<Environment, EnvError> {
    if w < 3 || h < 3 {
        return Err(EnvError::BadParams("ring needs both sides at least 3"));
    }
    let mut region = Region::rectangle(Cell::new(0, 0), w, h);
    for y in 1..h as i32 - 1 {
        for x in 1..w as i32 - 1 {
            region.remove(Cell::new(x, y));
        }
    }
    Environment::new(region, Cell::new(0, 0))
}

/// A uniformly random free cell, deterministic in `seed`.
pub fn random_cell(region: &Region, seed: u64) -> Cell {
    let cells: Vec<Cell> = region.cells().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cells[rng.random_range(0..cells.len())]
}

/// `k`×`k` square with a uniform source, then `removals` times a uniformly
/// chosen corner other than the source is deleted.
pub fn gen_carved(k: u32, removals: u32, seed: u64) -> Result<Environment, EnvError> {
    if k == 0 || removals as u64 >= k as u64 * k as u64 {
        return Err(EnvError::BadParams("need k > 0 and removals < k*k"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut region = Region::rectangle(Cell::new(0, 0), k, k);
    let source = Cell::new(rng.random_range(0..k as i32), rng.random_range(0..k as i32));
    for _ in 0..removals {
        let corners: Vec<Cell> = region
            .cells()
            .filter(|&c| c != source && classify(&region, c).unwrap().is_corner())
            .collect();
        if corners.is_empty() {
            return Err(EnvError::NoCornerAvailable);
        }
        region.remove(corners[rng.random_range(0..corners.len())]);
    }
    Environment::new(region, source)
}

/// Comb of `10r` unit-width columns spaced `2r` apart on a bottom row of
/// length `20r²`. Columns 1 and `k` reach a top row; the others stop one cell
/// short of it. The source is the bottom-left cell.
pub fn gen_gkr(k: u32, r: u32) -> Result<Environment, EnvError> {
    if r == 0 || k == 0 || k > 10 * r {
        return Err(EnvError::BadParams("need r >= 1 and 1 <= k <= 10r"));
    }
    let width = (20 * r * r) as i32;
    let tall = (30 * r * r) as i32;
    let mut cells = Vec::new();
    for x in 0..width {
        cells.push(Cell::new(x, 0));
        cells.push(Cell::new(x, tall + 2));
    }
    for j in 1..=10 * r {
        let x = ((j - 1) * 2 * r) as i32;
        let h = if j == 1 || j == k { tall + 1 } else { tall };
        for y in 1..=h {
            cells.push(Cell::new(x, y));
        }
    }
    Environment::new(Region::from_cells(cells), Cell::new(0, 0))
}
