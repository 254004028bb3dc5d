//! Shared instance generators for the integration suites. Everything is
//! deterministic from an explicit seed.
#![allow(dead_code)] // each test target uses its own subset

use necklace_core::geometry::Hyperplane;
use necklace_core::model::{ColorId, Cuboid, DiscreteNecklace, GridColoring};
use necklace_core::rat::Rat;
use necklace_core::seed::MasterSeed;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    MasterSeed(seed).stream(label, index)
}

/// Random rational with the given denominator.
pub fn random_rat(rng: &mut ChaCha8Rng, denom: i64, lo: i64, hi: i64) -> Rat {
    Rat::frac(rng.random_range(lo * denom..=hi * denom), denom)
}

/// Random grid coloring of `[0,1]^d` with at most `max_cells` cells per axis
/// and breakpoint denominators up to `denom`.
pub fn random_grid(
    rng: &mut ChaCha8Rng,
    d: usize,
    k: u32,
    max_cells: usize,
    denom: i64,
) -> GridColoring {
    let mut breakpoints = Vec::with_capacity(d);
    for _ in 0..d {
        let cells = rng.random_range(1..=max_cells);
        let mut cuts: Vec<i64> = Vec::new();
        while cuts.len() < cells - 1 {
            let v = rng.random_range(1..denom);
            if !cuts.contains(&v) {
                cuts.push(v);
            }
        }
        cuts.sort_unstable();
        let mut bp = vec![Rat::zero()];
        bp.extend(cuts.into_iter().map(|v| Rat::frac(v, denom)));
        bp.push(Rat::one());
        breakpoints.push(bp);
    }
    let total: usize = breakpoints.iter().map(|bp| bp.len() - 1).product();
    let cells: Vec<ColorId> = (0..total).map(|_| ColorId(rng.random_range(1..=k))).collect();
    GridColoring::new(breakpoints, cells, k).unwrap()
}

/// Random valid discrete necklace: sides multiply to at most `max_cells`,
/// every color count divisible by `q` (rejection sampling).
pub fn random_necklace(
    rng: &mut ChaCha8Rng,
    d: usize,
    k: u32,
    q: u32,
    max_cells: usize,
) -> DiscreteNecklace {
    loop {
        let mut sides = Vec::with_capacity(d);
        let mut budget = max_cells;
        for a in 0..d {
            let remaining_axes = d - a - 1;
            let cap = (budget >> remaining_axes).max(1);
            let side = rng.random_range(1..=cap.min(8)) as u32;
            budget /= side as usize;
            sides.push(side);
        }
        let total: usize = sides.iter().map(|&s| s as usize).product();
        let cells: Vec<ColorId> = (0..total).map(|_| ColorId(rng.random_range(1..=k))).collect();
        if let Ok(n) = DiscreteNecklace::new(sides, cells, k, q) {
            return n;
        }
    }
}

/// Random rational hyperplane crossing the unit cube in `d` dimensions.
pub fn random_hyperplane(rng: &mut ChaCha8Rng, d: usize, denom: i64) -> Hyperplane {
    loop {
        let normal: Vec<Rat> = (0..d)
            .map(|_| Rat::frac(rng.random_range(-denom..=denom), denom))
            .collect();
        if normal.iter().all(Rat::is_zero) {
            continue;
        }
        // Offset chosen so the hyperplane passes near the cube's center.
        let center_value: Rat = normal.iter().sum::<Rat>() / Rat::from_int(2);
        let jitter = Rat::frac(rng.random_range(-denom / 2..=denom / 2), denom * 2);
        if let Ok(h) = Hyperplane::new(normal, center_value + jitter) {
            return h;
        }
    }
}

pub fn unit_cube(d: usize) -> Cuboid {
    Cuboid::new(vec![Rat::zero(); d], vec![Rat::one(); d]).unwrap()
}
