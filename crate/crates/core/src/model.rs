//! Exact domain types for necklaces, colorings, cuts and splittings, and the
//! fairness evaluation that everything else is checked against.
//!
//! Conventions used throughout the crate:
//!
//! * axes are numbered from `0`;
//! * part labels are numbered from `0` (`0..q`);
//! * colors are numbered from `1` ([`ColorId`]), color `1` being the
//!   distinguished "white" of adversarial constructions;
//! * multidimensional cell arrays are stored in lexicographic order with the
//!   first axis most significant (the last axis varies fastest);
//! * colorings are constant on half-open grid cells, so cell measures are
//!   unambiguous and boundary assignment never affects any output.

use crate::error::{Error, Result};
use crate::rat::Rat;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A color index in `{1..k}`. Color `1` is "white".
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorId(pub u32);

impl ColorId {
    pub const WHITE: ColorId = ColorId(1);

    /// Zero-based index into per-color arrays.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl fmt::Debug for ColorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// An axis-aligned cuboid `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Cuboid {
    pub lo: Vec<Rat>,
    pub hi: Vec<Rat>,
}

impl Cuboid {
    pub fn new(lo: Vec<Rat>, hi: Vec<Rat>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::Input("cuboid bounds must have equal positive dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::Input("cuboid has lo > hi".into()));
        }
        Ok(Cuboid { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn side(&self, axis: usize) -> Rat {
        &self.hi[axis] - &self.lo[axis]
    }

    pub fn volume(&self) -> Rat {
        (0..self.dim()).map(|a| self.side(a)).fold(Rat::one(), |acc, s| acc * s)
    }

    pub fn contains_box(&self, other: &Cuboid) -> bool {
        self.dim() == other.dim()
            && self
                .lo
                .iter()
                .zip(&self.hi)
                .zip(other.lo.iter().zip(&other.hi))
                .all(|((sl, sh), (ol, oh))| sl <= ol && oh <= sh)
    }

    pub fn contains_point(&self, p: &[Rat]) -> bool {
        p.len() == self.dim()
            && self
                .lo
                .iter()
                .zip(&self.hi)
                .zip(p)
                .all(|((l, h), x)| l <= x && x <= h)
    }

    /// Intersection, or `None` when empty (zero-volume touchings count as
    /// intersections with zero volume).
    pub fn intersect(&self, other: &Cuboid) -> Option<Cuboid> {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let l = if self.lo[a] >= other.lo[a] { self.lo[a].clone() } else { other.lo[a].clone() };
            let h = if self.hi[a] <= other.hi[a] { self.hi[a].clone() } else { other.hi[a].clone() };
            if l > h {
                return None;
            }
            lo.push(l);
            hi.push(h);
        }
        Some(Cuboid { lo, hi })
    }
}

/// A nontrivial axis-aligned cube: corner plus one shared side length.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NecklaceBox {
    pub corner: Vec<Rat>,
    pub side: Rat,
}

impl NecklaceBox {
    pub fn new(corner: Vec<Rat>, side: Rat) -> Result<Self> {
        if corner.is_empty() {
            return Err(Error::Input("necklace box needs dimension >= 1".into()));
        }
        if !side.is_positive() {
            return Err(Error::Input("necklace box side must be positive".into()));
        }
        Ok(NecklaceBox { corner, side })
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn to_cuboid(&self) -> Cuboid {
        Cuboid {
            lo: self.corner.clone(),
            hi: self.corner.iter().map(|c| c + &self.side).collect(),
        }
    }
}

/// A colored integer cuboid: the discrete necklace.
///
/// Cells are the lattice points `{1..n_0} x ... x {1..n_{d-1}}`, stored in
/// lexicographic order. Every color class must have cardinality divisible by
/// the intended part count `q`; this is checked on construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiscreteNecklace {
    sides: Vec<u32>,
    cells: Vec<ColorId>,
    k: u32,
    q: u32,
}

impl DiscreteNecklace {
    pub fn new(sides: Vec<u32>, cells: Vec<ColorId>, k: u32, q: u32) -> Result<Self> {
        if sides.is_empty() || sides.iter().any(|&n| n == 0) {
            return Err(Error::Input("necklace sides must be positive".into()));
        }
        if k == 0 || q < 2 {
            return Err(Error::Input("need k >= 1 colors and q >= 2 parts".into()));
        }
        let total: usize = sides.iter().map(|&n| n as usize).product();
        if cells.len() != total {
            return Err(Error::Input(format!(
                "expected {} cells, got {}",
                total,
                cells.len()
            )));
        }
        if cells.iter().any(|c| c.0 == 0 || c.0 > k) {
            return Err(Error::Input("cell color out of range".into()));
        }
        let necklace = DiscreteNecklace { sides, cells, k, q };
        for (j, count) in necklace.color_counts().iter().enumerate() {
            if count % (q as u64) != 0 {
                return Err(Error::Input(format!(
                    "color {} has cardinality {} not divisible by q={}",
                    j + 1,
                    count,
                    q
                )));
            }
        }
        Ok(necklace)
    }

    /// One-dimensional necklace from letters, `'A'` mapping to color 1.
    pub fn from_letters(letters: &str, q: u32) -> Result<Self> {
        let cells: Vec<ColorId> = letters
            .chars()
            .map(|ch| {
                let v = (ch as u32).wrapping_sub('A' as u32);
                if v >= 26 {
                    Err(Error::Input(format!("bad bead letter {ch:?}")))
                } else {
                    Ok(ColorId(v + 1))
                }
            })
            .collect::<Result<_>>()?;
        let k = cells.iter().map(|c| c.0).max().unwrap_or(1);
        DiscreteNecklace::new(vec![cells.len() as u32], cells, k, q)
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[u32] {
        &self.sides
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[ColorId] {
        &self.cells
    }

    pub fn color_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.k as usize];
        for c in &self.cells {
            counts[c.index()] += 1;
        }
        counts
    }

    /// Number of colors that actually occur.
    pub fn effective_k(&self) -> u32 {
        self.color_counts().iter().filter(|&&c| c > 0).count() as u32
    }

    /// Lattice coordinates (1-based) of the cell at a flat index.
    pub fn coords(&self, mut index: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.sides[a] as usize;
            out[a] = (index % n) as u32 + 1;
            index /= n;
        }
        out
    }

    /// Flat index of 1-based lattice coordinates.
    pub fn flat_index(&self, coords: &[u32]) -> usize {
        let mut idx = 0usize;
        for (a, &x) in coords.iter().enumerate() {
            idx = idx * self.sides[a] as usize + (x as usize - 1);
        }
        idx
    }

    pub fn color_at(&self, coords: &[u32]) -> ColorId {
        self.cells[self.flat_index(coords)]
    }
}

/// A piecewise-constant coloring of a box grid: the universal continuous
/// representation. Breakpoints are strictly increasing per axis; cell colors
/// are stored in lexicographic order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridColoring {
    breakpoints: Vec<Vec<Rat>>,
    cells: Vec<ColorId>,
    k: u32,
}

impl GridColoring {
    pub fn new(breakpoints: Vec<Vec<Rat>>, cells: Vec<ColorId>, k: u32) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Input("grid needs dimension >= 1".into()));
        }
        for bp in &breakpoints {
            if bp.len() < 2 {
                return Err(Error::Input("each axis needs at least two breakpoints".into()));
            }
            if bp.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Input("breakpoints must be strictly increasing".into()));
            }
        }
        let total: usize = breakpoints.iter().map(|bp| bp.len() - 1).product();
        if cells.len() != total {
            return Err(Error::Input(format!(
                "expected {} grid cells, got {}",
                total,
                cells.len()
            )));
        }
        if k == 0 || cells.iter().any(|c| c.0 == 0 || c.0 > k) {
            return Err(Error::Input("grid cell color out of range".into()));
        }
        Ok(GridColoring { breakpoints, cells, k })
    }

    /// Single-axis coloring from (width, color) runs starting at `origin`.
    pub fn from_runs_1d(origin: Rat, runs: &[(Rat, ColorId)], k: u32) -> Result<Self> {
        let mut bp = vec![origin];
        let mut cells = Vec::with_capacity(runs.len());
        for (width, color) in runs {
            if !width.is_positive() {
                return Err(Error::Input("run widths must be positive".into()));
            }
            let next = bp.last().unwrap() + width;
            bp.push(next);
            cells.push(*color);
        }
        GridColoring::new(vec![bp], cells, k)
    }

    pub fn dim(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn breakpoints(&self) -> &[Vec<Rat>] {
        &self.breakpoints
    }

    pub fn cells(&self) -> &[ColorId] {
        &self.cells
    }

    pub fn cells_per_axis(&self) -> Vec<usize> {
        self.breakpoints.iter().map(|bp| bp.len() - 1).collect()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn bounding(&self) -> Cuboid {
        Cuboid {
            lo: self.breakpoints.iter().map(|bp| bp[0].clone()).collect(),
            hi: self.breakpoints.iter().map(|bp| bp.last().unwrap().clone()).collect(),
        }
    }

    /// The closed cuboid of the cell with the given per-axis indices.
    pub fn cell_box(&self, cell: &[usize]) -> Cuboid {
        Cuboid {
            lo: cell
                .iter()
                .enumerate()
                .map(|(a, &i)| self.breakpoints[a][i].clone())
                .collect(),
            hi: cell
                .iter()
                .enumerate()
                .map(|(a, &i)| self.breakpoints[a][i + 1].clone())
                .collect(),
        }
    }

    pub fn cell_color(&self, cell: &[usize]) -> ColorId {
        let mut idx = 0usize;
        for (a, &i) in cell.iter().enumerate() {
            idx = idx * (self.breakpoints[a].len() - 1) + i;
        }
        self.cells[idx]
    }

    /// Iterates `(flat index, per-axis cell indices)` in lexicographic order.
    pub fn cell_indices(&self) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
        let dims = self.cells_per_axis();
        let total = self.num_cells();
        (0..total).map(move |flat| {
            let mut rem = flat;
            let mut idx = vec![0usize; dims.len()];
            for a in (0..dims.len()).rev() {
                idx[a] = rem % dims[a];
                rem /= dims[a];
            }
            (flat, idx)
        })
    }

    /// Exact Lebesgue measure of every color inside `query`.
    ///
    /// Entry `j` is the measure of color `j+1`; entries sum to the volume of
    /// `query`. Errors if `query` is not contained in the bounding box.
    pub fn measure_vector(&self, query: &Cuboid) -> Result<Vec<Rat>> {
        if query.dim() != self.dim() {
            return Err(Error::Domain("query dimension mismatch".into()));
        }
        if !self.bounding().contains_box(query) {
            return Err(Error::Domain("query box outside coloring domain".into()));
        }
        let mut out = vec![Rat::zero(); self.k as usize];
        self.accumulate_measures(query, &mut out);
        Ok(out)
    }

    /// Adds the per-color measures of `query` (assumed inside the domain)
    /// into `acc`.
    pub(crate) fn accumulate_measures(&self, query: &Cuboid, acc: &mut [Rat]) {
        // Per-axis ranges of cells overlapping the query, with clipped widths.
        let mut axis_overlaps: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let bp = &self.breakpoints[a];
            let mut overlaps = Vec::new();
            // First cell whose upper breakpoint exceeds query.lo.
            let start = match bp.binary_search(&query.lo[a]) {
                Ok(i) => i,
                Err(i) => i.saturating_sub(1),
            };
            for i in start..bp.len() - 1 {
                if bp[i] >= query.hi[a] {
                    break;
                }
                let lo = if bp[i] >= query.lo[a] { bp[i].clone() } else { query.lo[a].clone() };
                let hi = if bp[i + 1] <= query.hi[a] {
                    bp[i + 1].clone()
                } else {
                    query.hi[a].clone()
                };
                if hi > lo {
                    overlaps.push((i, hi - lo));
                }
            }
            if overlaps.is_empty() {
                return; // zero-volume query
            }
            axis_overlaps.push(overlaps);
        }
        // Walk the product of overlapping cells.
        let mut state = vec![0usize; self.dim()];
        loop {
            let mut width = Rat::one();
            let mut cell = Vec::with_capacity(self.dim());
            for (a, &s) in state.iter().enumerate() {
                let (i, w) = &axis_overlaps[a][s];
                cell.push(*i);
                width *= w;
            }
            acc[self.cell_color(&cell).index()] += width;
            // advance odometer
            let mut a = self.dim();
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                state[a] += 1;
                if state[a] < axis_overlaps[a].len() {
                    break;
                }
                state[a] = 0;
            }
        }
    }
}

/// An axis-aligned hyperplane cut: `x_axis = coordinate`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AxisCut {
    pub axis: usize,
    pub coordinate: Rat,
}

impl AxisCut {
    pub fn new(axis: usize, coordinate: Rat) -> Self {
        AxisCut { axis, coordinate }
    }
}

/// A division of a box by axis-aligned cuts plus a labeling of the induced
/// cuboid pieces by parts `0..q`.
///
/// Pieces are indexed lexicographically by per-axis slab index (first axis
/// most significant). Cuts may coincide with each other or with the box
/// boundary; the resulting zero-width pieces carry zero measure and any
/// positive granularity requirement excludes them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Splitting {
    region: Cuboid,
    /// Cut coordinates grouped per axis, each list sorted.
    per_axis: Vec<Vec<Rat>>,
    labels: Vec<u32>,
    q: u32,
}

impl Splitting {
    pub fn new(region: Cuboid, cuts: Vec<AxisCut>, labels: Vec<u32>, q: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::Input("need q >= 2 parts".into()));
        }
        let d = region.dim();
        let mut per_axis: Vec<Vec<Rat>> = vec![Vec::new(); d];
        for cut in cuts {
            if cut.axis >= d {
                return Err(Error::Input(format!("cut axis {} out of range", cut.axis)));
            }
            if cut.coordinate < region.lo[cut.axis] || cut.coordinate > region.hi[cut.axis] {
                return Err(Error::Input("cut coordinate outside the box".into()));
            }
            per_axis[cut.axis].push(cut.coordinate);
        }
        for list in &mut per_axis {
            list.sort();
        }
        let pieces: usize = per_axis.iter().map(|l| l.len() + 1).product();
        if labels.len() != pieces {
            return Err(Error::Input(format!(
                "expected {} piece labels, got {}",
                pieces,
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l >= q) {
            return Err(Error::Input("piece label out of range".into()));
        }
        Ok(Splitting { region, per_axis, labels, q })
    }

    pub fn region(&self) -> &Cuboid {
        &self.region
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn cuts_per_axis(&self) -> &[Vec<Rat>] {
        &self.per_axis
    }

    pub fn cuts(&self) -> Vec<AxisCut> {
        let mut out = Vec::new();
        for (axis, list) in self.per_axis.iter().enumerate() {
            for c in list {
                out.push(AxisCut::new(axis, c.clone()));
            }
        }
        out
    }

    pub fn num_cuts(&self) -> usize {
        self.per_axis.iter().map(|l| l.len()).sum()
    }

    /// Per-axis slab boundaries including the box faces.
    fn axis_boundaries(&self, axis: usize) -> Vec<Rat> {
        let mut b = Vec::with_capacity(self.per_axis[axis].len() + 2);
        b.push(self.region.lo[axis].clone());
        b.extend(self.per_axis[axis].iter().cloned());
        b.push(self.region.hi[axis].clone());
        b
    }

    /// Iterates `(piece index, piece cuboid, part label)` in lexicographic
    /// order of per-axis slab indices.
    pub fn pieces(&self) -> Vec<(usize, Cuboid, u32)> {
        let d = self.region.dim();
        let boundaries: Vec<Vec<Rat>> = (0..d).map(|a| self.axis_boundaries(a)).collect();
        let slabs: Vec<usize> = boundaries.iter().map(|b| b.len() - 1).collect();
        let total: usize = slabs.iter().product();
        let mut out = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut lo = vec![Rat::zero(); d];
            let mut hi = vec![Rat::zero(); d];
            for a in (0..d).rev() {
                let s = rem % slabs[a];
                rem /= slabs[a];
                lo[a] = boundaries[a][s].clone();
                hi[a] = boundaries[a][s + 1].clone();
            }
            out.push((flat, Cuboid { lo, hi }, self.labels[flat]));
        }
        out
    }

    /// The same splitting translated by `delta` (used to move between the
    /// lattice frame of discrete witnesses and grid embeddings).
    pub fn translated(&self, delta: &[Rat]) -> Splitting {
        let region = Cuboid {
            lo: self.region.lo.iter().zip(delta).map(|(x, d)| x + d).collect(),
            hi: self.region.hi.iter().zip(delta).map(|(x, d)| x + d).collect(),
        };
        let per_axis = self
            .per_axis
            .iter()
            .enumerate()
            .map(|(a, list)| list.iter().map(|c| c + &delta[a]).collect())
            .collect();
        Splitting { region, per_axis, labels: self.labels.clone(), q: self.q }
    }
}

/// Exact amount of each color captured by each part: a `q x k` matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartMeasures {
    entries: Vec<Vec<Rat>>,
}

impl PartMeasures {
    pub fn new(entries: Vec<Vec<Rat>>) -> Self {
        PartMeasures { entries }
    }

    pub fn q(&self) -> usize {
        self.entries.len()
    }

    pub fn k(&self) -> usize {
        self.entries.first().map_or(0, |row| row.len())
    }

    pub fn entries(&self) -> &[Vec<Rat>] {
        &self.entries
    }

    pub fn column_totals(&self) -> Vec<Rat> {
        let mut totals = vec![Rat::zero(); self.k()];
        for row in &self.entries {
            for (t, v) in totals.iter_mut().zip(row) {
                *t += v;
            }
        }
        totals
    }

    /// True iff every part captures exactly `1/q` of every color.
    pub fn is_fair(&self) -> bool {
        let q = Rat::from_int(self.q() as i64);
        let totals = self.column_totals();
        self.entries
            .iter()
            .all(|row| row.iter().zip(&totals).all(|(v, t)| &(v * &q) == t))
    }
}

/// Exact per-part per-color measures of a splitting of `coloring`.
///
/// Summing the rows recovers `coloring.measure_vector(splitting.region())`.
pub fn part_measures(coloring: &GridColoring, splitting: &Splitting) -> Result<PartMeasures> {
    if !coloring.bounding().contains_box(splitting.region()) {
        return Err(Error::Domain("splitting box outside coloring domain".into()));
    }
    let k = coloring.k() as usize;
    let mut entries = vec![vec![Rat::zero(); k]; splitting.q() as usize];
    for (_, piece, label) in splitting.pieces() {
        coloring.accumulate_measures(&piece, &mut entries[label as usize]);
    }
    Ok(PartMeasures::new(entries))
}

/// Shortest gap between consecutive cut coordinates, including the box faces,
/// over all axes.
pub fn granularity_axis(splitting: &Splitting) -> Rat {
    let d = splitting.region().dim();
    let mut best: Option<Rat> = None;
    for a in 0..d {
        let mut prev = splitting.region().lo[a].clone();
        for c in splitting.cuts_per_axis()[a].iter().chain(std::iter::once(&splitting.region().hi[a])) {
            let gap = c - &prev;
            prev = c.clone();
            best = Some(match best.take() {
                None => gap,
                Some(b) => b.min(gap),
            });
        }
    }
    best.expect("splitting has dimension >= 1")
}

/// Embeds a discrete necklace as a unit-cell grid coloring: lattice cell
/// `(x_0..x_{d-1})` becomes the half-open unit box with corners `x_i - 1` and
/// `x_i`, so the grid spans `[0, n_i]` per axis and the measure of each color
/// equals its cardinality.
pub fn discrete_to_grid(n: &DiscreteNecklace) -> GridColoring {
    let breakpoints = n
        .sides()
        .iter()
        .map(|&s| (0..=s).map(|i| Rat::from_int(i as i64)).collect())
        .collect();
    GridColoring::new(breakpoints, n.cells().to_vec(), n.k())
        .expect("discrete necklace always embeds")
}
