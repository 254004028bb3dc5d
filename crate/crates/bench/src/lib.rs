//! Deterministic instance builders shared by the benchmark targets.

use necklace_core::geometry::Hyperplane;
use necklace_core::model::{ColorId, DiscreteNecklace, GridColoring};
use necklace_core::rat::Rat;
use necklace_core::seed::MasterSeed;
use rand::Rng;

/// A k-pairs line necklace: the worst case for 2-splitting.
pub fn k_pairs(k: u32) -> DiscreteNecklace {
    let cells: Vec<ColorId> = (0..k).flat_map(|i| [ColorId(i + 1), ColorId(i + 1)]).collect();
    DiscreteNecklace::new(vec![2 * k], cells, k, 2).unwrap()
}

/// A random valid line necklace of the given length.
pub fn random_line(seed: u64, len: usize, k: u32) -> DiscreteNecklace {
    let master = MasterSeed(seed);
    for attempt in 0..10_000 {
        let mut rng = master.stream("bench-line", attempt);
        let cells: Vec<ColorId> = (0..len).map(|_| ColorId(rng.random_range(1..=k))).collect();
        if let Ok(n) = DiscreteNecklace::new(vec![len as u32], cells, k, 2) {
            return n;
        }
    }
    unreachable!("a valid coloring exists at every even length");
}

/// A random valid 2-D necklace with the given sides.
pub fn random_square(seed: u64, side: u32, k: u32) -> DiscreteNecklace {
    let master = MasterSeed(seed);
    let total = (side * side) as usize;
    for attempt in 0..10_000 {
        let mut rng = master.stream("bench-square", attempt);
        let cells: Vec<ColorId> = (0..total).map(|_| ColorId(rng.random_range(1..=k))).collect();
        if let Ok(n) = DiscreteNecklace::new(vec![side, side], cells, k, 2) {
            return n;
        }
    }
    unreachable!("a valid coloring exists for even cell counts");
}

/// A random rational hyperplane through the middle of the unit cube.
pub fn random_cube_hyperplane(seed: u64, d: usize) -> Hyperplane {
    let mut rng = MasterSeed(seed).stream("bench-hyperplane", 0);
    loop {
        let normal: Vec<Rat> =
            (0..d).map(|_| Rat::frac(rng.random_range(-8..=8i64), 8)).collect();
        if normal.iter().all(Rat::is_zero) {
            continue;
        }
        let offset = normal.iter().sum::<Rat>() / Rat::from_int(2);
        if let Ok(h) = Hyperplane::new(normal, offset) {
            return h;
        }
    }
}

/// Alternating stripes on the unit interval: a dense 1-D coloring for the
/// exact solver.
pub fn striped_coloring(cells: usize, k: u32) -> GridColoring {
    let runs: Vec<(Rat, ColorId)> = (0..cells)
        .map(|i| (Rat::frac(1, cells as i64), ColorId((i as u32 % k) + 1)))
        .collect();
    GridColoring::from_runs_1d(Rat::zero(), &runs, k).unwrap()
}
