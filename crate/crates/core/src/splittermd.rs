//! Multidimensional splitters: the constructive lexicographic-lift splitter,
//! an exact minimum-cut oracle for small discrete d-dimensional necklaces,
//! and a numerical continuous search for d >= 2.
//!
//! Discrete witnesses use the lattice frame: cell `(x_0..x_{d-1})` occupies
//! the unit box around the integer point `x`, the region is
//! `[1/2, n_a + 1/2]` per axis, and cuts sit at half-integer coordinates.

use crate::error::{Error, Result};
use crate::model::{
    discrete_to_grid, granularity_axis, part_measures, AxisCut, Cuboid, DiscreteNecklace,
    GridColoring, Splitting,
};
use crate::numeric::{self, CompiledColoring};
use crate::rat::{rat, Rat};
use crate::seed::MasterSeed;
use crate::splitter1d::{self, DiscreteSearch};
use rand::Rng;
use rayon::prelude::*;

/// A discrete necklace stretched onto a line in lexicographic order.
///
/// The flat cell index in the source *is* the 0-based line position, because
/// cells are stored lexicographically with the first axis most significant.
#[derive(Clone, Debug)]
pub struct LexLift {
    source: DiscreteNecklace,
    line: DiscreteNecklace,
}

impl LexLift {
    pub fn source(&self) -> &DiscreteNecklace {
        &self.source
    }

    pub fn line(&self) -> &DiscreteNecklace {
        &self.line
    }

    /// Lattice coordinates of the cell at a 0-based line position.
    pub fn cell_at(&self, position: usize) -> Vec<u32> {
        self.source.coords(position)
    }

    /// 0-based line position of a cell.
    pub fn position_of(&self, cell: &[u32]) -> usize {
        self.source.flat_index(cell)
    }
}

/// Stretches a discrete necklace onto a line according to the lexicographic
/// order. Color counts are preserved.
pub fn lex_lift(n: &DiscreteNecklace) -> LexLift {
    let line = DiscreteNecklace::new(
        vec![n.len() as u32],
        n.cells().to_vec(),
        n.k(),
        n.q(),
    )
    .expect("lift preserves color counts");
    LexLift { source: n.clone(), line }
}

/// The lex successor of `x` inside the given sides, if any.
fn lex_successor(sides: &[u32], x: &[u32]) -> Option<Vec<u32>> {
    let mut y = x.to_vec();
    for a in (0..sides.len()).rev() {
        if y[a] < sides[a] {
            y[a] += 1;
            return Some(y);
        }
        y[a] = 1;
    }
    None
}

/// Realizes the 1-D cut between lex-consecutive cells `x < y` as axis-aligned
/// hyperplanes in the lattice frame.
///
/// With `j` the first axis where they differ (0-based), the cuts are the
/// fences `z_a = x_a - 1/2` and `z_a = x_a + 1/2` for every `a < j`, plus the
/// separating cut `z_j = (x_j + y_j) / 2`: exactly `2j + 1` hyperplanes, and
/// together they separate the lex-prefix ending at `x` from the suffix
/// starting at `y`.
pub fn realize_cut(sides: &[u32], x: &[u32], y: &[u32]) -> Result<Vec<AxisCut>> {
    if x.len() != sides.len() || y.len() != sides.len() {
        return Err(Error::Input("cell dimension mismatch".into()));
    }
    let expected = lex_successor(sides, x)
        .ok_or_else(|| Error::Input("cell has no lex successor".into()))?;
    if expected != y {
        return Err(Error::Input("cells are not lex-consecutive".into()));
    }
    let j = (0..x.len()).find(|&a| x[a] != y[a]).expect("successor differs somewhere");
    let mut cuts = Vec::with_capacity(2 * j + 1);
    for (a, &xa) in x.iter().enumerate().take(j) {
        cuts.push(AxisCut::new(a, rat(2 * xa as i64 - 1, 2)));
        cuts.push(AxisCut::new(a, rat(2 * xa as i64 + 1, 2)));
    }
    cuts.push(AxisCut::new(j, rat((x[j] + y[j]) as i64, 2)));
    Ok(cuts)
}

/// Lattice-frame region of a discrete necklace: `[1/2, n_a + 1/2]` per axis.
pub fn lattice_region(n: &DiscreteNecklace) -> Cuboid {
    Cuboid::new(
        n.sides().iter().map(|_| rat(1, 2)).collect(),
        n.sides().iter().map(|&s| rat(2 * s as i64 + 1, 2)).collect(),
    )
    .expect("sides are positive")
}

/// Block index (0-based) of a 1-based bead position among sorted cut slots.
fn block_of(slots: &[usize], bead: usize) -> usize {
    slots.iter().take_while(|&&s| s < bead).count()
}

/// Fair splitting of a discrete d-dimensional necklace through the
/// lexicographic lift: solve the lifted line exactly, realize each line cut
/// as at most `2d - 1` hyperplanes, deduplicate, and reassemble the labeling
/// from the lex blocks. Uses at most `(2d-1) k (q-1)` cuts and the output is
/// verified exactly fair before being returned.
pub fn split_via_lift(n: &DiscreteNecklace) -> Result<Splitting> {
    let lift = lex_lift(n);
    let line_witness = splitter1d::solve_discrete_1d(lift.line())?;
    // Recover cut slots: coordinate s + 1/2 -> slot s.
    let slots: Vec<usize> = line_witness.cuts_per_axis()[0]
        .iter()
        .map(|c| {
            let v = c - rat(1, 2);
            v.numer().try_into().expect("slot is a small nonneg integer")
        })
        .collect();
    let block_labels = line_witness.labels().to_vec();

    // Realize every line cut and deduplicate hyperplanes.
    let mut cuts: Vec<AxisCut> = Vec::new();
    for &s in &slots {
        let x = lift.cell_at(s - 1);
        let y = lift.cell_at(s);
        for cut in realize_cut(n.sides(), &x, &y)? {
            if !cuts.contains(&cut) {
                cuts.push(cut);
            }
        }
    }

    // Group per axis, sorted, to index pieces.
    let d = n.dim();
    let mut per_axis: Vec<Vec<Rat>> = vec![Vec::new(); d];
    for c in &cuts {
        per_axis[c.axis].push(c.coordinate.clone());
    }
    for list in &mut per_axis {
        list.sort();
    }
    let region = lattice_region(n);
    let slabs: Vec<usize> = per_axis.iter().map(|l| l.len() + 1).collect();
    let total_pieces: usize = slabs.iter().product();

    // Label each piece by the lex block of any cell it contains; pieces are
    // never split across blocks by construction. Empty pieces get part 0.
    let mut labels = vec![0u32; total_pieces];
    for flat in 0..total_pieces {
        let mut rem = flat;
        let mut slab = vec![0usize; d];
        for a in (0..d).rev() {
            slab[a] = rem % slabs[a];
            rem /= slabs[a];
        }
        // Integer coordinate range of this piece per axis.
        let mut cell = Vec::with_capacity(d);
        let mut empty = false;
        let mut spans = Vec::with_capacity(d);
        for a in 0..d {
            let lo = if slab[a] == 0 { rat(1, 2) } else { per_axis[a][slab[a] - 1].clone() };
            let hi = if slab[a] == slabs[a] - 1 {
                rat(2 * n.sides()[a] as i64 + 1, 2)
            } else {
                per_axis[a][slab[a]].clone()
            };
            // Smallest integer strictly above lo (cuts are half-integers).
            let first = (&lo + rat(1, 2)).numer().clone();
            let last = (&hi - rat(1, 2)).numer().clone();
            if first > last {
                empty = true;
                break;
            }
            let first: i64 = (&first).try_into().expect("desk-scale coordinate");
            let last: i64 = (&last).try_into().expect("desk-scale coordinate");
            cell.push(first as u32);
            spans.push((first as u32, last as u32));
        }
        if empty {
            continue;
        }
        let base_block = block_of(&slots, lift.position_of(&cell) + 1);
        labels[flat] = block_labels[base_block];
        // Construction invariant: every cell of the piece is in one block.
        debug_assert!(piece_in_single_block(&lift, &slots, &spans, base_block));
    }

    let witness = Splitting::new(region, cuts, labels, n.q())?;
    // Exact verification against the unit-cell embedding.
    let grid = discrete_to_grid(n);
    let shift: Vec<Rat> = vec![rat(-1, 2); d];
    let pm = part_measures(&grid, &witness.translated(&shift))?;
    if !pm.is_fair() {
        return Err(Error::Pattern("lift splitting failed exact fairness verification".into()));
    }
    Ok(witness)
}

fn piece_in_single_block(
    lift: &LexLift,
    slots: &[usize],
    spans: &[(u32, u32)],
    expected: usize,
) -> bool {
    let mut cell: Vec<u32> = spans.iter().map(|&(lo, _)| lo).collect();
    loop {
        if block_of(slots, lift.position_of(&cell) + 1) != expected {
            return false;
        }
        let mut a = spans.len();
        loop {
            if a == 0 {
                return true;
            }
            a -= 1;
            if cell[a] < spans[a].1 {
                cell[a] += 1;
                break;
            }
            cell[a] = spans[a].0;
        }
    }
}

/// Exhaustive minimum-cut oracle for small discrete d-dimensional necklaces.
///
/// Cut positions are the half-integers between layers; `per_axis_budget`
/// optionally caps the number of cuts aligned to each axis. Exact minimum,
/// deterministic witness (lexicographically least position set and labeling).
pub fn min_cuts_discrete_md(
    n: &DiscreteNecklace,
    t_cap: usize,
    per_axis_budget: Option<&[usize]>,
) -> Result<DiscreteSearch> {
    let d = n.dim();
    if let Some(budget) = per_axis_budget {
        if budget.len() != d {
            return Err(Error::Input("per-axis budget arity mismatch".into()));
        }
    }
    // Global position list in (axis, slot) lex order.
    let mut positions: Vec<(usize, usize)> = Vec::new();
    for (a, &side) in n.sides().iter().enumerate() {
        for s in 1..side as usize {
            positions.push((a, s));
        }
    }
    let q = n.q() as usize;
    let targets: Vec<u32> = n.color_counts().iter().map(|&c| (c / n.q() as u64) as u32).collect();

    for t in 0..=t_cap.min(positions.len()) {
        // Position subtrees run in parallel, keyed by the first chosen
        // position; find_map_first keeps the merge lexicographic, so the
        // result is the same at any worker count.
        let found = if t == 0 {
            let mut chosen = Vec::new();
            choose_positions(n, &positions, per_axis_budget, &targets, q, t, &mut chosen, 0, 0)
        } else {
            (0..positions.len()).into_par_iter().find_map_first(|first| {
                let mut chosen = vec![0usize; t];
                chosen[0] = first;
                choose_positions(
                    n,
                    &positions,
                    per_axis_budget,
                    &targets,
                    q,
                    t,
                    &mut chosen,
                    1,
                    first + 1,
                )
            })
        };
        if let Some((subset, labels)) = found {
            let cuts: Vec<AxisCut> = subset
                .iter()
                .map(|&(a, s)| AxisCut::new(a, rat(2 * s as i64 + 1, 2)))
                .collect();
            let witness = Splitting::new(lattice_region(n), cuts, labels, n.q())?;
            return Ok(DiscreteSearch::Found { t_min: t, witness });
        }
    }
    Ok(DiscreteSearch::NoneWithin { t_cap })
}

#[allow(clippy::too_many_arguments)]
fn choose_positions(
    n: &DiscreteNecklace,
    positions: &[(usize, usize)],
    budget: Option<&[usize]>,
    targets: &[u32],
    q: usize,
    t: usize,
    chosen: &mut Vec<usize>,
    depth: usize,
    start: usize,
) -> Option<(Vec<(usize, usize)>, Vec<u32>)> {
    if depth == t {
        let subset: Vec<(usize, usize)> = chosen.iter().map(|&i| positions[i]).collect();
        if let Some(b) = budget {
            let mut counts = vec![0usize; n.dim()];
            for &(a, _) in &subset {
                counts[a] += 1;
            }
            if counts.iter().zip(b).any(|(c, cap)| c > cap) {
                return None;
            }
        }
        let labels = labeling_for_subset(n, &subset, targets, q)?;
        return Some((subset, labels));
    }
    for i in start..positions.len() {
        if positions.len() - i < t - depth {
            break;
        }
        chosen[depth] = i;
        if let Some(found) =
            choose_positions(n, positions, budget, targets, q, t, chosen, depth + 1, i + 1)
        {
            return Some(found);
        }
    }
    None
}

/// Piece color counts for a cut position subset, then canonical labeling
/// search. Pieces are indexed lexicographically (first axis most
/// significant).
fn labeling_for_subset(
    n: &DiscreteNecklace,
    subset: &[(usize, usize)],
    targets: &[u32],
    q: usize,
) -> Option<Vec<u32>> {
    let d = n.dim();
    let k = n.k() as usize;
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); d];
    for &(a, s) in subset {
        slots[a].push(s);
    }
    for list in &mut slots {
        list.sort_unstable();
    }
    let slabs: Vec<usize> = slots.iter().map(|l| l.len() + 1).collect();
    let total: usize = slabs.iter().product();
    let mut pieces = vec![vec![0u32; k]; total];
    for (flat, color) in n.cells().iter().enumerate() {
        let coords = n.coords(flat);
        let mut piece = 0usize;
        for a in 0..d {
            let slab = slots[a].iter().take_while(|&&s| (s as u32) < coords[a]).count();
            piece = piece * slabs[a] + slab;
        }
        pieces[piece][color.index()] += 1;
    }
    let mut labels = Vec::with_capacity(total);
    let mut sums = vec![vec![0u32; k]; q];
    if splitter1d::assign_labels(&pieces, targets, q, 0, 0, &mut labels, &mut sums) {
        Some(labels)
    } else {
        None
    }
}

/// Iteration budget of the numerical grid search.
#[derive(Clone, Copy, Debug)]
pub struct MdBudget {
    pub max_patterns: usize,
    pub seeds_per_pattern: u32,
    pub max_iters: u32,
}

impl Default for MdBudget {
    fn default() -> Self {
        MdBudget { max_patterns: 2000, seeds_per_pattern: 4, max_iters: 60 }
    }
}

/// Outcome of the numerical axis-cut search. `witness: None` is a budget
/// report, not a certificate.
#[derive(Clone, Debug)]
pub struct MdSearch {
    pub witness: Option<Splitting>,
    pub patterns_explored: usize,
    pub seeds_run: usize,
    pub best_residual: f64,
}

/// Numerical fair-splitting search for grid colorings in d >= 2: enumerates
/// per-axis cut patterns and labelings, runs damped least-squares iteration
/// from multistart seeds, snaps candidates to rationals (denominators up to
/// 2^48) and revalidates them exactly. Residual tolerance 1e-12. Any witness
/// returned is exactly fair with granularity at least `gamma`.
pub fn solve_grid_axis_cuts_md(
    coloring: &GridColoring,
    region: &Cuboid,
    q: u32,
    t: usize,
    gamma: &Rat,
    budget: MdBudget,
    seed: MasterSeed,
) -> Result<MdSearch> {
    let d = coloring.dim();
    if d < 2 {
        return Err(Error::Input("solve_grid_axis_cuts_md needs d >= 2".into()));
    }
    if !coloring.bounding().contains_box(region) {
        return Err(Error::Domain("region outside coloring domain".into()));
    }
    let compiled = CompiledColoring::new(coloring);
    let mut search = MdSearch {
        witness: None,
        patterns_explored: 0,
        seeds_run: 0,
        best_residual: f64::INFINITY,
    };

    // Eligible cells (per axis) for cut coordinates inside the region.
    let eligible: Vec<Vec<usize>> = (0..d)
        .map(|a| {
            let bp = &coloring.breakpoints()[a];
            (0..bp.len() - 1)
                .filter(|&c| bp[c] <= region.hi[a] && bp[c + 1] >= region.lo[a])
                .collect()
        })
        .collect();

    // Patterns are generated in lexicographic order (composition, then
    // per-axis assignments); generation stops at the budget.
    let mut patterns = Vec::new();
    compositions(t, d, &mut vec![0; d], 0, &mut |comp| {
        if patterns.len() >= budget.max_patterns {
            return;
        }
        let mut axis_assignments: Vec<Vec<Vec<usize>>> = Vec::with_capacity(d);
        for a in 0..d {
            let mut acc = Vec::new();
            nondecreasing(&eligible[a], comp[a], &mut vec![0; comp[a]], 0, 0, &mut |cells| {
                acc.push(cells.to_vec());
            });
            if acc.is_empty() {
                return; // an axis got more cuts than it has room for
            }
            axis_assignments.push(acc);
        }
        // Cartesian product of per-axis assignments.
        let mut idx = vec![0usize; d];
        loop {
            let assignment: Vec<Vec<usize>> =
                (0..d).map(|a| axis_assignments[a][idx[a]].clone()).collect();
            patterns.push(assignment);
            if patterns.len() >= budget.max_patterns {
                return;
            }
            let mut a = d;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < axis_assignments[a].len() {
                    break;
                }
                idx[a] = 0;
            }
        }
    });

    for (pattern_index, assignment) in patterns.iter().enumerate() {
        if search.patterns_explored >= budget.max_patterns {
            break;
        }
        search.patterns_explored += 1;
        if let Some(witness) = run_pattern(
            coloring,
            &compiled,
            region,
            q,
            gamma,
            assignment,
            budget,
            seed,
            pattern_index as u64,
            &mut search,
        )? {
            search.witness = Some(witness);
            break;
        }
    }
    Ok(search)
}

/// All compositions of `t` into `d` nonnegative parts, lexicographically.
fn compositions(t: usize, d: usize, buf: &mut Vec<usize>, axis: usize, f: &mut impl FnMut(&[usize])) {
    if axis == d - 1 {
        buf[axis] = t;
        f(buf);
        return;
    }
    for v in 0..=t {
        buf[axis] = v;
        compositions(t - v, d, buf, axis + 1, f);
    }
}

fn nondecreasing(
    eligible: &[usize],
    t: usize,
    buf: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == t {
        f(buf);
        return;
    }
    for i in start..eligible.len() {
        buf[depth] = eligible[i];
        nondecreasing(eligible, t, buf, depth + 1, i, f);
    }
}

#[allow(clippy::too_many_arguments)]
fn run_pattern(
    coloring: &GridColoring,
    compiled: &CompiledColoring,
    region: &Cuboid,
    q: u32,
    gamma: &Rat,
    assignment: &[Vec<usize>],
    budget: MdBudget,
    seed: MasterSeed,
    pattern_index: u64,
    search: &mut MdSearch,
) -> Result<Option<Splitting>> {
    let k = compiled.k();
    let slabs: Vec<usize> = assignment.iter().map(|cells| cells.len() + 1).collect();
    let pieces: usize = slabs.iter().product();

    // Variable bounds: each cut confined to its cell clipped to the region.
    let mut bounds: Vec<(f64, f64)> = Vec::new();
    let mut axis_of: Vec<usize> = Vec::new();
    for (a, cells) in assignment.iter().enumerate() {
        let bp = &coloring.breakpoints()[a];
        for &c in cells {
            let lo = bp[c].clone().max(region.lo[a].clone());
            let hi = bp[c + 1].clone().min(region.hi[a].clone());
            if lo > hi {
                return Ok(None); // cell does not reach into the region
            }
            bounds.push((lo.to_f64(), hi.to_f64()));
            axis_of.push(a);
        }
    }
    let region_lo: Vec<f64> = region.lo.iter().map(Rat::to_f64).collect();
    let region_hi: Vec<f64> = region.hi.iter().map(Rat::to_f64).collect();

    let mut labels_buf = vec![0u32];
    let budget_copy = budget;
    let outcome = splitter1d::enumerate_rgs(pieces, q, &mut labels_buf, 0, &mut |labels| {
        let mut rng = seed.stream("md-pattern", pattern_index ^ (labels_key(labels) << 20));
        for seed_idx in 0..budget_copy.seeds_per_pattern {
            search.seeds_run += 1;
            let mut x: Vec<f64> = match seed_idx {
                // Midpoints, then lower cell boundaries, then random.
                0 => bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect(),
                1 => bounds.iter().map(|(lo, _)| *lo).collect(),
                _ => bounds
                    .iter()
                    .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                    .collect(),
            };
            project(&mut x, &bounds, &axis_of);
            let residual = refine(
                compiled,
                (&region_lo, &region_hi),
                labels,
                q as usize,
                k,
                &mut x,
                &bounds,
                &axis_of,
                budget_copy.max_iters,
            );
            search.best_residual = search.best_residual.min(residual);
            if residual < 1e-12 {
                if let Some(witness) =
                    snap_and_verify(coloring, region, labels, q, gamma, &x, &axis_of)?
                {
                    return Ok(Some(witness));
                }
            }
        }
        Ok(None)
    })?;
    Ok(outcome)
}

fn labels_key(labels: &[u32]) -> u64 {
    let mut key = 0u64;
    for &l in labels {
        key = key.wrapping_mul(31).wrapping_add(l as u64 + 1);
    }
    key
}

/// Clamp into bounds and restore per-axis ordering.
fn project(x: &mut [f64], bounds: &[(f64, f64)], axis_of: &[usize]) {
    for (v, (lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(*lo, *hi);
    }
    // cuts of one axis appear consecutively and their cells are
    // nondecreasing, so sorting within the axis keeps cell containment sound
    let mut i = 0;
    while i < x.len() {
        let mut j = i;
        while j < x.len() && axis_of[j] == axis_of[i] {
            j += 1;
        }
        x[i..j].sort_by(|a, b| a.partial_cmp(b).unwrap());
        i = j;
    }
}

/// Residuals: per color, parts 1.. minus part 0.
fn residuals(
    compiled: &CompiledColoring,
    region: (&[f64], &[f64]),
    labels: &[u32],
    q: usize,
    k: usize,
    x: &[f64],
    axis_of: &[usize],
) -> Vec<f64> {
    let d = compiled.dim();
    let mut cuts: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (v, &a) in x.iter().zip(axis_of) {
        cuts[a].push(*v);
    }
    let parts = numeric::part_measures_f64(compiled, region, &cuts, labels, q);
    let mut out = Vec::with_capacity((q - 1) * k);
    for part in parts.iter().skip(1) {
        for j in 0..k {
            out.push(part[j] - parts[0][j]);
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn refine(
    compiled: &CompiledColoring,
    region: (&[f64], &[f64]),
    labels: &[u32],
    q: usize,
    k: usize,
    x: &mut Vec<f64>,
    bounds: &[(f64, f64)],
    axis_of: &[usize],
    max_iters: u32,
) -> f64 {
    let n = x.len();
    let mut r = residuals(compiled, region, labels, q, k, x, axis_of);
    let mut best = max_abs(&r);
    if n == 0 {
        return best;
    }
    let mut lambda = 1e-8;
    for _ in 0..max_iters {
        if best < 1e-13 {
            break;
        }
        // Central-difference Jacobian (exact for multilinear measures).
        let m = r.len();
        let mut jac = vec![vec![0.0; n]; m];
        for v in 0..n {
            let h = 1e-7 * (bounds[v].1 - bounds[v].0).max(1e-3);
            let mut xp = x.clone();
            xp[v] += h;
            let mut xm = x.clone();
            xm[v] -= h;
            let rp = residuals(compiled, region, labels, q, k, &xp, axis_of);
            let rm = residuals(compiled, region, labels, q, k, &xm, axis_of);
            for i in 0..m {
                jac[i][v] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        // Solve (J^T J + lambda I) delta = -J^T r.
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for i in 0..m {
            for a in 0..n {
                jtr[a] += jac[i][a] * r[i];
                for b in 0..n {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        for a in 0..n {
            jtj[a][a] += lambda;
        }
        let Some(delta) = numeric::solve_dense(jtj, jtr.iter().map(|v| -v).collect()) else {
            break;
        };
        let mut candidate: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
        project(&mut candidate, bounds, axis_of);
        let cr = residuals(compiled, region, labels, q, k, &candidate, axis_of);
        let cbest = max_abs(&cr);
        if cbest < best {
            *x = candidate;
            r = cr;
            best = cbest;
            lambda = (lambda * 0.3).max(1e-12);
        } else {
            lambda *= 10.0;
            if lambda > 1e8 {
                break;
            }
        }
    }
    best
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Snap a numeric candidate to rationals and settle it exactly.
fn snap_and_verify(
    coloring: &GridColoring,
    region: &Cuboid,
    labels: &[u32],
    q: u32,
    gamma: &Rat,
    x: &[f64],
    axis_of: &[usize],
) -> Result<Option<Splitting>> {
    let cuts: Vec<AxisCut> = x
        .iter()
        .zip(axis_of)
        .map(|(&v, &a)| AxisCut::new(a, numeric::snap_to_rational(v, 1u64 << 48)))
        .collect();
    if cuts
        .iter()
        .any(|c| c.coordinate < region.lo[c.axis] || c.coordinate > region.hi[c.axis])
    {
        return Ok(None);
    }
    let witness = Splitting::new(region.clone(), cuts, labels.to_vec(), q)?;
    if &granularity_axis(&witness) < gamma {
        return Ok(None);
    }
    let pm = part_measures(coloring, &witness)?;
    if pm.is_fair() {
        Ok(Some(witness))
    } else {
        Ok(None)
    }
}
