//! Counting experiments behind the discrete lower bound: how many subsets of
//! a small integer cube admit a fair q-splitting with few axis cuts, the
//! exact double-counting estimate that dominates them, hard-subset search,
//! and the multicolor composition that multiplies hardness by `k - 1`.

use crate::error::{Error, Result};
use crate::model::{ColorId, DiscreteNecklace};
use crate::splitter1d;
use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Serialize big integers as decimal strings.
mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::from_str(&s).map_err(de::Error::custom)
    }
}

/// Hard limit on `n^d` for subset enumerations.
const MAX_CELLS: u32 = 16;

/// All cut configurations with at most `t` cuts: for each, the piece index
/// of every cell of the `{1..n}^d` cube.
struct CutConfigs {
    /// (piece_of_cell, piece_count) per configuration.
    configs: Vec<(Vec<u8>, usize)>,
}

fn cube_sides(n: u32, d: usize) -> Vec<u32> {
    vec![n; d]
}

fn total_cells(n: u32, d: usize) -> Result<u32> {
    let mut total: u64 = 1;
    for _ in 0..d {
        total *= n as u64;
        if total > MAX_CELLS as u64 {
            return Err(Error::SizeGuard(format!(
                "n^d = {}^{} exceeds the enumeration limit {}",
                n, d, MAX_CELLS
            )));
        }
    }
    Ok(total as u32)
}

impl CutConfigs {
    fn build(n: u32, d: usize, t: usize) -> Result<Self> {
        let cells = total_cells(n, d)? as usize;
        let sides = cube_sides(n, d);
        // Global cut positions (axis, slot) in lex order.
        let mut positions = Vec::new();
        for a in 0..d {
            for s in 1..n as usize {
                positions.push((a, s));
            }
        }
        let mut configs = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        // All subsets of positions with size <= t, lexicographic.
        fn rec(
            positions: &[(usize, usize)],
            t: usize,
            start: usize,
            chosen: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            out.push(chosen.clone());
            if chosen.len() == t {
                return;
            }
            for i in start..positions.len() {
                chosen.push(i);
                rec(positions, t, i + 1, chosen, out);
                chosen.pop();
            }
        }
        let mut subsets = Vec::new();
        rec(&positions, t, 0, &mut chosen, &mut subsets);
        if subsets.len() > 200_000 {
            return Err(Error::SizeGuard(format!("{} cut configurations", subsets.len())));
        }
        for subset in subsets {
            let mut slots: Vec<Vec<usize>> = vec![Vec::new(); d];
            for &i in &subset {
                let (a, s) = positions[i];
                slots[a].push(s);
            }
            let slabs: Vec<usize> = slots.iter().map(|l| l.len() + 1).collect();
            let piece_count: usize = slabs.iter().product();
            let mut piece_of_cell = vec![0u8; cells];
            for (flat, p) in piece_of_cell.iter_mut().enumerate() {
                let mut rem = flat;
                let mut coords = vec![0u32; d];
                for a in (0..d).rev() {
                    coords[a] = (rem % sides[a] as usize) as u32 + 1;
                    rem /= sides[a] as usize;
                }
                let mut piece = 0usize;
                for a in 0..d {
                    let slab = slots[a].iter().filter(|&&s| (s as u32) < coords[a]).count();
                    piece = piece * slabs[a] + slab;
                }
                *p = piece as u8;
            }
            configs.push((piece_of_cell, piece_count));
        }
        Ok(CutConfigs { configs })
    }

    /// Whether the subset (bitmask over cells) splits fairly into `q` parts
    /// under some configuration and labeling.
    fn splittable(&self, mask: u32, size: u32, q: u32) -> bool {
        if size % q != 0 {
            return false;
        }
        let target = size / q;
        let targets = vec![target];
        for (piece_of_cell, piece_count) in &self.configs {
            let mut counts = vec![0u32; *piece_count];
            let mut bits = mask;
            while bits != 0 {
                let cell = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                counts[piece_of_cell[cell] as usize] += 1;
            }
            let pieces: Vec<Vec<u32>> = counts.into_iter().map(|c| vec![c]).collect();
            let mut labels = Vec::new();
            let mut sums = vec![vec![0u32; 1]; q as usize];
            if splitter1d::assign_labels(&pieces, &targets, q as usize, 0, 0, &mut labels, &mut sums)
            {
                return true;
            }
        }
        false
    }
}

/// Exact count of subsets of `{1..n}^d` (cardinality divisible by `q`) that
/// admit a fair q-splitting with at most `t` axis cuts, against the total
/// number of subsets `2^(n^d)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubsetCount {
    pub n: u32,
    pub d: usize,
    pub q: u32,
    pub t: usize,
    pub splittable: u64,
    pub divisible: u64,
    #[serde(with = "biguint_string")]
    pub total: BigUint,
}

pub fn count_splittable_subsets(n: u32, d: usize, q: u32, t: usize) -> Result<SubsetCount> {
    let cells = total_cells(n, d)?;
    let configs = CutConfigs::build(n, d, t)?;
    // Masks are sharded across workers; the integer sums merge associatively,
    // so the count is independent of the worker count.
    let (splittable, divisible) = (0u32..(1u32 << cells))
        .into_par_iter()
        .map(|mask| {
            let size = mask.count_ones();
            if size % q != 0 {
                (0u64, 0u64)
            } else if configs.splittable(mask, size, q) {
                (1, 1)
            } else {
                (0, 1)
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SubsetCount {
        n,
        d,
        q,
        t,
        splittable,
        divisible,
        total: BigUint::one() << cells,
    })
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    num / den
}

/// Number of subsets for which one fixed splitting with part sizes `parts`
/// is fair: `sum_i prod_r C(parts_r, i)`.
pub fn fair_subset_count(parts: &[u64]) -> BigUint {
    let max_i = parts.iter().copied().min().unwrap_or(0);
    let mut total = BigUint::ZERO;
    for i in 0..=max_i {
        let mut term = BigUint::one();
        for &a in parts {
            term *= binomial(a, i);
        }
        total += term;
    }
    total
}

/// The exact double-counting estimate against the exact subset total.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u32,
    pub d: usize,
    pub q: u32,
    pub t: usize,
    /// `(d n)^t`: ways to choose the cuts.
    #[serde(with = "biguint_string")]
    pub cut_choices: BigUint,
    /// `q^((t+1)^d)`: ways to label the pieces.
    #[serde(with = "biguint_string")]
    pub labelings: BigUint,
    /// `max over part-size splits of sum_i prod_r C(a_r, i)`.
    #[serde(with = "biguint_string")]
    pub max_fair_subsets: BigUint,
    /// The maximizing part sizes.
    pub argmax: Vec<u64>,
    /// Product of the three factors.
    #[serde(with = "biguint_string")]
    pub estimate: BigUint,
    /// `2^(n^d)`.
    #[serde(with = "biguint_string")]
    pub total: BigUint,
    /// Whether the estimate covers the total (no contradiction at these
    /// parameters).
    pub estimate_exceeds_total: bool,
}

pub fn counting_bound_report(n: u32, d: usize, q: u32, t: usize) -> Result<BoundReport> {
    let cells = total_cells(n, d)? as u64;
    let cut_choices = BigUint::from((d as u64) * n as u64).pow(t as u32);
    let pieces = (t as u64 + 1).pow(d as u32);
    if pieces > 64 {
        return Err(Error::SizeGuard(format!("{pieces} pieces in the labeling exponent")));
    }
    let labelings = BigUint::from(q as u64).pow(pieces as u32);
    // Maximize over all compositions of n^d into q nonnegative parts.
    let mut best = BigUint::ZERO;
    let mut argmax = Vec::new();
    let mut parts = vec![0u64; q as usize];
    fn rec(
        remaining: u64,
        idx: usize,
        parts: &mut Vec<u64>,
        best: &mut BigUint,
        argmax: &mut Vec<u64>,
    ) {
        if idx == parts.len() - 1 {
            parts[idx] = remaining;
            let value = fair_subset_count(parts);
            if value > *best {
                *best = value;
                *argmax = parts.clone();
            }
            return;
        }
        for v in 0..=remaining {
            parts[idx] = v;
            rec(remaining - v, idx + 1, parts, best, argmax);
        }
    }
    rec(cells, 0, &mut parts, &mut best, &mut argmax);
    let estimate = &cut_choices * &labelings * &best;
    let total = BigUint::one() << cells;
    Ok(BoundReport {
        n,
        d,
        q,
        t,
        cut_choices,
        labelings,
        max_fair_subsets: best,
        argmax,
        estimate_exceeds_total: estimate >= total,
        estimate,
        total,
    })
}

/// A subset of the cube that provably needs at least `ceil(d q / 2)` cuts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardSubset {
    pub n: u32,
    pub d: usize,
    pub q: u32,
    /// Flat cell indices (lex order over `{1..n}^d`).
    pub cells: Vec<u32>,
    /// The bound it meets: no fair q-splitting with fewer cuts exists.
    pub min_cuts_at_least: usize,
}

/// First subset (by size, then lexicographic mask order) whose exact minimum
/// cut count reaches `ceil(d q / 2)`, if any at this `n`.
pub fn find_hard_subset(n: u32, d: usize, q: u32) -> Result<Option<HardSubset>> {
    let cells = total_cells(n, d)?;
    let bound = (d as u32 * q).div_ceil(2) as usize;
    // Splittable with at most bound-1 cuts means not hard.
    let configs = CutConfigs::build(n, d, bound.saturating_sub(1))?;
    for size in (0..=cells).step_by(q as usize) {
        for mask in 0u32..(1u32 << cells) {
            if mask.count_ones() != size {
                continue;
            }
            if !configs.splittable(mask, size, q) {
                let members = (0..cells).filter(|&c| mask >> c & 1 == 1).collect();
                return Ok(Some(HardSubset {
                    n,
                    d,
                    q,
                    cells: members,
                    min_cuts_at_least: bound,
                }));
            }
        }
    }
    Ok(None)
}

/// Places `k - 1` copies of a hard subset along the diagonal of the cube of
/// side `(k-1) n`, colored `2..=k`, with everything else white.
///
/// Errors if the white remainder is not divisible by `q` (the composition
/// only controls divisibility of the copied colors).
pub fn compose_multicolor_hard_instance(hard: &HardSubset, k: u32) -> Result<DiscreteNecklace> {
    if k < 2 {
        return Err(Error::Input("need k >= 2 to place k - 1 copies".into()));
    }
    let d = hard.d;
    let n0 = hard.n;
    let side = (k - 1) * n0;
    let total: usize = (side as usize).pow(d as u32);
    let mut cells = vec![ColorId::WHITE; total];
    // Member coordinates of the hard subset (1-based in {1..n0}^d).
    let member_coords: Vec<Vec<u32>> = hard
        .cells
        .iter()
        .map(|&flat| {
            let mut rem = flat as usize;
            let mut coords = vec![0u32; d];
            for a in (0..d).rev() {
                coords[a] = (rem % n0 as usize) as u32 + 1;
                rem /= n0 as usize;
            }
            coords
        })
        .collect();
    for copy in 0..k - 1 {
        let offset = copy * n0;
        for coords in &member_coords {
            let mut flat = 0usize;
            for (a, &x) in coords.iter().enumerate() {
                let _ = a;
                flat = flat * side as usize + (x + offset - 1) as usize;
            }
            cells[flat] = ColorId(copy + 2);
        }
    }
    DiscreteNecklace::new(vec![side; d], cells, k, hard.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splittermd::min_cuts_discrete_md;

    #[test]
    fn tiny_line_counts() {
        // n=2, d=1, q=2, t=1: the empty set and {1,2} split; {1} and {2}
        // have odd size.
        let c = count_splittable_subsets(2, 1, 2, 1).unwrap();
        assert_eq!(c.splittable, 2);
        assert_eq!(c.divisible, 2); // {} and {1,2}; {1},{2} have odd size
        assert_eq!(c.total, BigUint::from(4u32));

        // t=0: only the empty set.
        let c = count_splittable_subsets(2, 1, 2, 0).unwrap();
        assert_eq!(c.splittable, 1);
    }

    #[test]
    fn square_has_hard_subsets() {
        // n=3, d=2, q=2, t=1: strictly fewer splittable than even subsets.
        let c = count_splittable_subsets(3, 2, 2, 1).unwrap();
        assert!(c.splittable < c.divisible);
    }

    #[test]
    fn size_guard_fires() {
        assert!(matches!(
            count_splittable_subsets(5, 2, 2, 1),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn vandermonde_identity_for_two_parts() {
        // sum_i C(a,i) C(b,i) = C(a+b, a)
        for (a, b) in [(3u64, 5u64), (4, 4), (7, 2), (0, 6)] {
            assert_eq!(fair_subset_count(&[a, b]), binomial(a + b, a), "a={a} b={b}");
        }
    }

    #[test]
    fn maximizer_is_balanced() {
        // Exhaustively verified by the report itself; check the returned
        // argmax is a balanced split for a few parameter sets.
        for (n, d, q, t) in [(2u32, 2usize, 2u32, 1usize), (3, 1, 3, 2), (2, 3, 2, 1)] {
            let report = counting_bound_report(n, d, q, t).unwrap();
            let cells = (n as u64).pow(d as u32);
            let lo = cells / q as u64;
            let hi = cells.div_ceil(q as u64);
            assert!(
                report.argmax.iter().all(|&a| a == lo || a == hi),
                "argmax {:?} not balanced for cells={cells} q={q}",
                report.argmax
            );
        }
    }

    #[test]
    fn estimate_dominates_exact_count() {
        for (n, d, q, t) in [(2u32, 1usize, 2u32, 1usize), (3, 1, 2, 1), (2, 2, 2, 1), (3, 2, 2, 1)]
        {
            let count = count_splittable_subsets(n, d, q, t).unwrap();
            let report = counting_bound_report(n, d, q, t).unwrap();
            assert!(
                report.estimate >= BigUint::from(count.splittable),
                "estimate {} < exact {} at n={n} d={d} q={q} t={t}",
                report.estimate,
                count.splittable
            );
        }
    }

    #[test]
    fn line_estimate_exceeds_total_when_cuts_ample() {
        // d=1 with t >= q-1 large: no contradiction possible.
        let report = counting_bound_report(3, 1, 2, 2).unwrap();
        assert!(report.estimate_exceeds_total);
    }

    #[test]
    fn hard_pair_on_the_line() {
        // d=1, q=2: {1,2} needs one cut, which meets ceil(d q / 2) = 1.
        let hard = find_hard_subset(2, 1, 2).unwrap().expect("exists");
        assert_eq!(hard.cells, vec![0, 1]);
        assert_eq!(hard.min_cuts_at_least, 1);
    }

    #[test]
    fn square_hard_subset_needs_two_cuts() {
        let hard = find_hard_subset(3, 2, 2).unwrap().expect("exists");
        assert_eq!(hard.min_cuts_at_least, 2);
    }

    #[test]
    fn empty_subset_is_not_hard() {
        // The scan starts at size 0 and must skip it: zero cuts suffice.
        let hard = find_hard_subset(2, 1, 2).unwrap().unwrap();
        assert!(!hard.cells.is_empty());
    }

    #[test]
    fn composition_line_example() {
        // k=3, d=1, q=2, N0={1,2}: big cube {1..4}, copies {1,2} color 2 and
        // {3,4} color 3, no white left; at least 2 cuts needed.
        let hard = HardSubset { n: 2, d: 1, q: 2, cells: vec![0, 1], min_cuts_at_least: 1 };
        let composed = compose_multicolor_hard_instance(&hard, 3).unwrap();
        assert_eq!(composed.sides(), &[4]);
        assert_eq!(
            composed.cells().iter().map(|c| c.0).collect::<Vec<_>>(),
            vec![2, 2, 3, 3]
        );
        let t_min = min_cuts_discrete_md(&composed, 6, None)
            .unwrap()
            .t_min()
            .expect("splittable");
        assert!(t_min >= 2, "t_min = {t_min}");

        // Single copy keeps the single-copy bound.
        let single = compose_multicolor_hard_instance(&hard, 2).unwrap();
        let t_single = min_cuts_discrete_md(&single, 6, None).unwrap().t_min().unwrap();
        assert!(t_single >= 1);
        assert!(t_min >= t_single);
    }

    #[test]
    fn lift_split_on_composed_instance_stays_within_bound() {
        let hard = HardSubset { n: 2, d: 1, q: 2, cells: vec![0, 1], min_cuts_at_least: 1 };
        let composed = compose_multicolor_hard_instance(&hard, 3).unwrap();
        let w = crate::splittermd::split_via_lift(&composed).unwrap();
        let bound =
            (2 * composed.dim() - 1) * composed.k() as usize * (composed.q() as usize - 1);
        assert!(w.num_cuts() <= bound);
    }

    #[test]
    fn composition_checks_divisibility() {
        // d=2, n0=3, k=2, q=2: the white remainder is 9 - |N0| which is odd
        // for even |N0|, so construction must fail.
        let hard = HardSubset { n: 3, d: 2, q: 2, cells: vec![0, 1], min_cuts_at_least: 2 };
        assert!(compose_multicolor_hard_instance(&hard, 2).is_err());
    }
}
