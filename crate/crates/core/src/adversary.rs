//! Adversarial colorings, degrees-of-freedom audits, fairness equation
//! systems, and no-splitting certificates.
//!
//! The generator plants, inside each cell of a fine background grid, a tiny
//! cube per non-white color whose side length is a random rational with a
//! fixed numerator bit length. Those side lengths play the role of generic
//! parameters: a fair splitting would force exact polynomial relations among
//! them, which counting degrees of freedom rules out when the color count is
//! large enough. The audit evaluates those counting inequalities exactly; the
//! 1-D certifier replaces the counting argument with an exhaustive, exact
//! refutation of every cut pattern.

use crate::error::{Error, Result};
use crate::linprog::Constraint;
use crate::model::{ColorId, Cuboid, GridColoring, Splitting};
use crate::numeric;
use crate::rat::{rat, Rat};
use crate::seed::MasterSeed;
use crate::splitter1d::{self, InfeasibilityCertificate};
use crate::splittermd::{solve_grid_axis_cuts_md, MdBudget, MdSearch};
use crate::affine::PointSpec;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Parameters of the adversarial construction on the window `[-n, n]^d`.
///
/// Invariants (checked exactly): `N > 4 n^2`, `delta^d < epsilon / (2 N^d)`,
/// `delta^d < (2n / N)^d`, and positive resolution and bit length.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdversaryParams {
    pub d: usize,
    pub k: u32,
    pub q: u32,
    pub t: usize,
    /// Window half-extent.
    pub n: u32,
    /// Background grid resolution per axis.
    pub big_n: u32,
    /// Side of the planted cube that hosts the colored subcubes.
    pub delta: Rat,
    /// Closeness budget to the all-white coloring.
    pub epsilon: Rat,
    /// Bit length of the random numerators for subcube sides.
    pub bit_length: u32,
    pub seed: u64,
}

impl AdversaryParams {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 || self.big_n == 0 || self.bit_length == 0 {
            return Err(Error::Input("d, n, N, B must be positive".into()));
        }
        if self.k < 2 || self.q < 2 {
            return Err(Error::Input("need k >= 2 and q >= 2".into()));
        }
        if self.big_n as u64 <= 4 * (self.n as u64) * (self.n as u64) {
            return Err(Error::Input(format!(
                "resolution too coarse: N = {} must exceed 4n^2 = {}",
                self.big_n,
                4 * self.n * self.n
            )));
        }
        if !self.delta.is_positive() || !self.epsilon.is_positive() {
            return Err(Error::Input("delta and epsilon must be positive".into()));
        }
        let delta_d = self.delta.pow(self.d as u32);
        let n_d = Rat::from_int(self.big_n as i64).pow(self.d as u32);
        let cell = self.cell_width();
        if delta_d >= &self.epsilon / &(Rat::from_int(2) * &n_d) {
            return Err(Error::Input("delta^d must stay below epsilon / (2 N^d)".into()));
        }
        if delta_d >= cell.pow(self.d as u32) {
            return Err(Error::Input("delta^d must stay below the cell volume".into()));
        }
        Ok(())
    }

    /// Background cell width `2n / N`.
    pub fn cell_width(&self) -> Rat {
        rat(2 * self.n as i64, self.big_n as i64)
    }

    pub fn window(&self) -> Cuboid {
        Cuboid::new(
            vec![Rat::from_int(-(self.n as i64)); self.d],
            vec![Rat::from_int(self.n as i64); self.d],
        )
        .expect("n > 0")
    }

    /// Standard parameters: minimal admissible resolution, `epsilon = 1/4`,
    /// 32-bit numerators, and the largest power-of-two fraction of the cell
    /// width that satisfies the volume bounds.
    pub fn standard(d: usize, k: u32, q: u32, t: usize, n: u32, seed: u64) -> Result<Self> {
        let big_n = 4 * n * n + 1;
        let epsilon = rat(1, 4);
        let mut params = AdversaryParams {
            d,
            k,
            q,
            t,
            n,
            big_n,
            delta: rat(1, 1),
            epsilon,
            bit_length: 32,
            seed,
        };
        let cell = params.cell_width();
        let mut delta = &cell / Rat::from_int(2);
        for _ in 0..200 {
            params.delta = delta.clone();
            if params.validate().is_ok() {
                return Ok(params);
            }
            delta = &delta / Rat::from_int(2);
        }
        Err(Error::Input("could not fit delta below the volume bounds".into()))
    }
}

/// A random rational in `[0, 1)` with `bits` uniform numerator bits.
fn random_unit(rng: &mut impl Rng, bits: u32) -> Rat {
    let denom = Rat::from_int(2).pow(bits);
    let numer = if bits >= 64 {
        rng.random::<u64>()
    } else {
        rng.random::<u64>() >> (64 - bits)
    };
    Rat::from_int(numer as i64) / denom
}

/// Builds the adversarial coloring for the given parameters.
///
/// The window is divided into `N^d` background cells. Each cell receives a
/// `delta`-cube at a random rational corner; inside it, colors `2..=k` get
/// disjoint axis-aligned cubes placed along the diagonal, with side lengths
/// `x_j` drawn as random rationals with `bit_length`-bit numerators. All
/// remaining points are white. Deterministic from the seed.
pub fn generate(params: &AdversaryParams) -> Result<GridColoring> {
    params.validate()?;
    let d = params.d;
    let k = params.k as usize;
    let master = MasterSeed(params.seed);
    let w = params.cell_width();
    let n = Rat::from_int(params.n as i64);
    let slot = &params.delta / Rat::from_int(k as i64 - 1);

    let cells_total = (params.big_n as usize).pow(d as u32);
    // Planted cubes: (corner, side, color) per background cell.
    let mut planted: Vec<(Vec<Rat>, Rat, ColorId)> = Vec::with_capacity(cells_total * (k - 1));
    let mut cell_idx = vec![0usize; d];
    for flat in 0..cells_total {
        let mut rem = flat;
        for a in (0..d).rev() {
            cell_idx[a] = rem % params.big_n as usize;
            rem /= params.big_n as usize;
        }
        let mut rng = master.stream("adversary-cell", flat as u64);
        // Corner of the delta-cube, uniform in the admissible range.
        let room = &w - &params.delta;
        let d_corner: Vec<Rat> = (0..d)
            .map(|a| {
                let base = -&n + Rat::from_int(cell_idx[a] as i64) * &w;
                base + random_unit(&mut rng, params.bit_length) * &room
            })
            .collect();
        for j in 2..=k {
            // Side in [slot/2, slot): numerator gets exactly `bit_length` bits.
            let side = {
                let half = &slot / Rat::from_int(2);
                half + random_unit(&mut rng, params.bit_length - 1) * (&slot / Rat::from_int(2))
            };
            let corner: Vec<Rat> = d_corner
                .iter()
                .map(|c| c + Rat::from_int(j as i64 - 2) * &slot)
                .collect();
            planted.push((corner, side, ColorId(j as u32)));
        }
    }

    // Tensor grid: all planted boundaries on every axis.
    let mut breakpoints: Vec<Vec<Rat>> = Vec::with_capacity(d);
    for a in 0..d {
        let mut bp: Vec<Rat> = (0..=params.big_n)
            .map(|i| -&n + Rat::from_int(i as i64) * &w)
            .collect();
        for (corner, side, _) in &planted {
            bp.push(corner[a].clone());
            bp.push(&corner[a] + side);
        }
        bp.sort();
        bp.dedup();
        breakpoints.push(bp);
    }

    // Every planted boundary is a grid breakpoint, so each cube covers an
    // exact per-axis range of grid cells; classification is pure index
    // arithmetic. Planted cubes are grouped by background cell, so a grid
    // cell is checked against at most k - 1 of them.
    let per_cell = k - 1;
    let dims: Vec<usize> = breakpoints.iter().map(|bp| bp.len() - 1).collect();
    let total: usize = dims.iter().product();

    // Per axis: the background cell of each grid cell (cells never straddle
    // a coarse boundary because those boundaries are breakpoints).
    let coarse: Vec<Rat> =
        (0..=params.big_n).map(|i| -&n + Rat::from_int(i as i64) * &w).collect();
    let bg_of_cell: Vec<Vec<usize>> = (0..d)
        .map(|a| {
            let bp = &breakpoints[a];
            (0..dims[a])
                .map(|i| match coarse.binary_search(&bp[i]) {
                    Ok(j) => j.min(params.big_n as usize - 1),
                    Err(j) => j - 1,
                })
                .collect()
        })
        .collect();
    // Per planted cube and axis: the half-open grid cell index range it
    // covers (its boundaries are breakpoints by construction).
    let cube_ranges: Vec<Vec<(usize, usize)>> = planted
        .iter()
        .map(|(corner, side, _)| {
            (0..d)
                .map(|a| {
                    let bp = &breakpoints[a];
                    let start = bp.binary_search(&corner[a]).expect("corner is a breakpoint");
                    let end = bp
                        .binary_search(&(&corner[a] + side))
                        .expect("upper face is a breakpoint");
                    (start, end)
                })
                .collect()
        })
        .collect();

    let mut colors = vec![ColorId::WHITE; total];
    let mut idx = vec![0usize; d];
    for (flat, color) in colors.iter_mut().enumerate() {
        let mut rem = flat;
        for a in (0..d).rev() {
            idx[a] = rem % dims[a];
            rem /= dims[a];
        }
        let mut bg_flat = 0usize;
        for a in 0..d {
            bg_flat = bg_flat * params.big_n as usize + bg_of_cell[a][idx[a]];
        }
        for p in bg_flat * per_cell..(bg_flat + 1) * per_cell {
            let ranges = &cube_ranges[p];
            if (0..d).all(|a| ranges[a].0 <= idx[a] && idx[a] < ranges[a].1) {
                *color = planted[p].2;
                break;
            }
        }
    }
    GridColoring::new(breakpoints, colors, params.k)
}

/// Which cut family an audit is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutFamily {
    Axis,
    Arbitrary,
}

/// Whether the necklace floats inside a window or is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditTarget {
    Window,
    FixedNecklace,
}

/// The degrees-of-freedom ledger behind a threshold verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DofAudit {
    pub d: usize,
    pub k: u32,
    pub q: u32,
    pub t: usize,
    pub cut_family: CutFamily,
    pub target: AuditTarget,
    /// Real unknowns of a necklace-plus-splitting configuration.
    pub unknowns: u64,
    /// Independent color-comparison equations `(k-1)(q-1)`.
    pub color_equations: u64,
    /// Volume-comparison equations `q-1`.
    pub volume_equations: u64,
    /// Guaranteed dependency count among the unknowns (`q-1` in the 1-D
    /// axis-aligned window case, `1` otherwise).
    pub dependency_allowance: u64,
    /// Right-hand side of the threshold inequality `k(q-1) > threshold`.
    pub threshold: u64,
    /// True iff the inequality holds: enough colors to defeat all splittings.
    pub exceeds: bool,
}

/// Evaluates the exact threshold inequality for the selected regime and
/// returns the verdict together with the unknown/equation ledger.
pub fn audit_dof(d: usize, k: u32, q: u32, t: usize, family: CutFamily, target: AuditTarget) -> DofAudit {
    let (d64, k64, q64, t64) = (d as u64, k as u64, q as u64, t as u64);
    let unknowns = match (family, target) {
        (CutFamily::Axis, AuditTarget::Window) => t64 + d64 + 1,
        (CutFamily::Axis, AuditTarget::FixedNecklace) => t64,
        (CutFamily::Arbitrary, AuditTarget::Window) => d64 * t64 + d64 + 1,
        (CutFamily::Arbitrary, AuditTarget::FixedNecklace) => d64 * t64,
    };
    let dependency_allowance =
        if family == CutFamily::Axis && target == AuditTarget::Window && d == 1 {
            q64 - 1
        } else {
            1
        };
    let threshold = match (family, target) {
        (CutFamily::Axis, AuditTarget::Window) => {
            if d == 1 {
                t64 + 2
            } else {
                t64 + d64 + q64 - 1
            }
        }
        (CutFamily::Axis, AuditTarget::FixedNecklace) => t64 + q64 - 2,
        (CutFamily::Arbitrary, AuditTarget::Window) => d64 * t64 + d64 + q64 - 1,
        (CutFamily::Arbitrary, AuditTarget::FixedNecklace) => d64 * t64 + q64 - 2,
    };
    let exceeds = k64 * (q64 - 1) > threshold;
    // The ledger reading gives the same verdict: more independent color
    // equations than unknowns can absorb.
    debug_assert_eq!(
        exceeds,
        (k64 - 1) * (q64 - 1) > unknowns - dependency_allowance.min(unknowns)
    );
    DofAudit {
        d,
        k,
        q,
        t,
        cut_family: family,
        target,
        unknowns,
        color_equations: (k64 - 1) * (q64 - 1),
        volume_equations: q64 - 1,
        dependency_allowance,
        threshold,
        exceeds,
    }
}

/// Whether the necklace box of an equation system is fixed or floats as a
/// cube inside a window (side and corner become unknowns).
#[derive(Clone, Debug)]
pub enum BoxSpec {
    Fixed(Cuboid),
    FreeCube { window: Cuboid },
}

/// A combinatorial pattern for a d-dimensional fairness system: cell
/// assignment of every cut per axis, plus a piece labeling.
#[derive(Clone, Debug)]
pub struct MdPattern {
    pub box_spec: BoxSpec,
    /// Per axis, the grid cell index of each cut, nondecreasing.
    pub cut_cells: Vec<Vec<usize>>,
    pub labels: Vec<u32>,
}

/// Which residuals the system exposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualMode {
    /// Color comparisons for colors `2..=k` plus volume comparisons:
    /// dimension `(k-1)(q-1) + (q-1)`.
    Full,
    /// Volume comparisons only: dimension `q-1`.
    VolumeOnly,
}

/// The fairness equation system of one pattern: exact residual and Jacobian
/// evaluators over the configuration unknowns.
///
/// Unknown layout: for a fixed box, the cut coordinates in axis order; for a
/// free cube, `[side, corner_0..corner_{d-1}]` followed by the cuts.
#[derive(Clone, Debug)]
pub struct EquationSystem {
    coloring: GridColoring,
    pattern: MdPattern,
    q: u32,
    mode: ResidualMode,
}

impl EquationSystem {
    /// Full fairness system of a pattern over a coloring.
    pub fn build(coloring: &GridColoring, pattern: MdPattern, q: u32) -> Result<Self> {
        Self::new(coloring, pattern, q, ResidualMode::Full)
    }

    /// Volume-only system over a box divided by one pattern of cuts.
    pub fn volume_system(region: Cuboid, cuts_per_axis: &[usize], labels: Vec<u32>, q: u32) -> Result<Self> {
        let d = region.dim();
        let breakpoints = (0..d)
            .map(|a| vec![region.lo[a].clone(), region.hi[a].clone()])
            .collect();
        let coloring = GridColoring::new(breakpoints, vec![ColorId::WHITE], 1)?;
        let pattern = MdPattern {
            box_spec: BoxSpec::Fixed(region),
            cut_cells: cuts_per_axis.iter().map(|&t| vec![0; t]).collect(),
            labels,
        };
        Self::new(&coloring, pattern, q, ResidualMode::VolumeOnly)
    }

    fn new(coloring: &GridColoring, pattern: MdPattern, q: u32, mode: ResidualMode) -> Result<Self> {
        if q < 2 {
            return Err(Error::Input("need q >= 2".into()));
        }
        let d = coloring.dim();
        if pattern.cut_cells.len() != d {
            return Err(Error::Pattern("cut cell arity must match dimension".into()));
        }
        for (a, cells) in pattern.cut_cells.iter().enumerate() {
            let max = coloring.cells_per_axis()[a];
            if cells.iter().any(|&c| c >= max) {
                return Err(Error::Pattern(format!("cut cell out of range on axis {a}")));
            }
            if cells.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Pattern("cut cells must be nondecreasing".into()));
            }
        }
        let pieces: usize = pattern.cut_cells.iter().map(|c| c.len() + 1).product();
        if pattern.labels.len() != pieces {
            return Err(Error::Pattern(format!(
                "expected {} piece labels, got {}",
                pieces,
                pattern.labels.len()
            )));
        }
        if pattern.labels.iter().any(|&l| l >= q) {
            return Err(Error::Pattern("piece label out of range".into()));
        }
        if let BoxSpec::Fixed(region) = &pattern.box_spec {
            if !coloring.bounding().contains_box(region) {
                return Err(Error::Domain("fixed box outside coloring domain".into()));
            }
        }
        Ok(EquationSystem { coloring: coloring.clone(), pattern, q, mode })
    }

    pub fn dim(&self) -> usize {
        self.coloring.dim()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn pattern(&self) -> &MdPattern {
        &self.pattern
    }

    fn num_cuts(&self) -> usize {
        self.pattern.cut_cells.iter().map(|c| c.len()).sum()
    }

    pub fn n_unknowns(&self) -> usize {
        match self.pattern.box_spec {
            BoxSpec::Fixed(_) => self.num_cuts(),
            BoxSpec::FreeCube { .. } => 1 + self.dim() + self.num_cuts(),
        }
    }

    pub fn residual_dim(&self) -> usize {
        let k = self.coloring.k() as usize;
        let q = self.q as usize;
        match self.mode {
            ResidualMode::Full => (k - 1) * (q - 1) + (q - 1),
            ResidualMode::VolumeOnly => q - 1,
        }
    }

    /// Splits a point into (box, per-axis sorted cut coordinates), verifying
    /// the pattern's validity region.
    fn decode(&self, point: &[Rat]) -> Result<(Cuboid, Vec<Vec<Rat>>)> {
        if point.len() != self.n_unknowns() {
            return Err(Error::Pattern("point arity mismatch".into()));
        }
        let d = self.dim();
        let (region, cut_values) = match &self.pattern.box_spec {
            BoxSpec::Fixed(region) => (region.clone(), &point[..]),
            BoxSpec::FreeCube { window } => {
                let side = &point[0];
                if !side.is_positive() {
                    return Err(Error::OutsideRegion);
                }
                let corner = &point[1..=d];
                let region = Cuboid::new(
                    corner.to_vec(),
                    corner.iter().map(|c| c + side).collect(),
                )?;
                if !window.contains_box(&region) {
                    return Err(Error::OutsideRegion);
                }
                (region, &point[d + 1..])
            }
        };
        let mut cuts: Vec<Vec<Rat>> = Vec::with_capacity(d);
        let mut offset = 0;
        for a in 0..d {
            let cells = &self.pattern.cut_cells[a];
            let bp = &self.coloring.breakpoints()[a];
            let vals = &cut_values[offset..offset + cells.len()];
            offset += cells.len();
            for (v, &c) in vals.iter().zip(cells) {
                if v < &bp[c] || v > &bp[c + 1] {
                    return Err(Error::OutsideRegion);
                }
                if v < &region.lo[a] || v > &region.hi[a] {
                    return Err(Error::OutsideRegion);
                }
            }
            if vals.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::OutsideRegion);
            }
            cuts.push(vals.to_vec());
        }
        Ok((region, cuts))
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        self.decode(point).is_ok()
    }

    fn splitting_at(&self, point: &[Rat]) -> Result<Splitting> {
        let (region, cuts) = self.decode(point)?;
        let mut axis_cuts = Vec::new();
        for (a, vals) in cuts.into_iter().enumerate() {
            for v in vals {
                axis_cuts.push(crate::model::AxisCut::new(a, v));
            }
        }
        Splitting::new(region, axis_cuts, self.pattern.labels.clone(), self.q)
    }

    /// Amount of color `j` (1-based) captured by part `l` at the point: the
    /// fairness polynomial for that color/part pair, evaluated exactly.
    pub fn w_value(&self, color: ColorId, part: u32, point: &[Rat]) -> Result<Rat> {
        let splitting = self.splitting_at(point)?;
        let pm = crate::model::part_measures(&self.coloring, &splitting)?;
        Ok(pm.entries()[part as usize][color.index()].clone())
    }

    /// Exact residual vector at a rational point inside the validity region.
    ///
    /// Order: for every part `l = 1..q`, colors `2..=k` compared against part
    /// 0, then the `q-1` volume comparisons. Zero exactly at fair witnesses.
    pub fn eval_exact(&self, point: &[Rat]) -> Result<Vec<Rat>> {
        let splitting = self.splitting_at(point)?;
        let q = self.q as usize;
        let mut out = Vec::with_capacity(self.residual_dim());
        if self.mode == ResidualMode::Full {
            let pm = crate::model::part_measures(&self.coloring, &splitting)?;
            let k = self.coloring.k() as usize;
            for l in 1..q {
                for j in 1..k {
                    out.push(&pm.entries()[l][j] - &pm.entries()[0][j]);
                }
            }
        }
        let mut volumes = vec![Rat::zero(); q];
        for (_, piece, label) in splitting.pieces() {
            volumes[label as usize] += piece.volume();
        }
        for l in 1..q {
            out.push(&volumes[l] - &volumes[0]);
        }
        Ok(out)
    }

    /// Residuals at a float point (converted exactly).
    pub fn eval_f64(&self, point: &[f64]) -> Result<Vec<f64>> {
        let exact: Vec<Rat> = point
            .iter()
            .map(|&v| Rat::from_f64_exact(v).ok_or(Error::OutsideRegion))
            .collect::<Result<_>>()?;
        Ok(self.eval_exact(&exact)?.iter().map(Rat::to_f64).collect())
    }

    /// Exact Jacobian of the residuals at an interior rational point, by
    /// central divided differences on a stencil wide enough for the
    /// polynomial degree (measures have degree at most `d` per variable).
    pub fn jacobian_exact(&self, point: &[Rat]) -> Result<Vec<Vec<Rat>>> {
        let n = self.n_unknowns();
        let m = self.residual_dim();
        let d = self.dim();
        let stencil_half = (d / 2 + 1).max(2); // 2m+1 nodes differentiate degree <= 2m
        let mut jac = vec![vec![Rat::zero(); n]; m];
        for v in 0..n {
            // Exactness only needs all stencil nodes inside the region;
            // derivative_column shrinks the step until they are.
            let h = rat(1, 1 << 16);
            let column = self.derivative_column(point, v, &h, stencil_half)?;
            for (row, val) in jac.iter_mut().zip(column) {
                row[v] = val;
            }
        }
        Ok(jac)
    }

    fn derivative_column(
        &self,
        point: &[Rat],
        v: usize,
        h0: &Rat,
        m: usize,
    ) -> Result<Vec<Rat>> {
        let nodes = 2 * m + 1;
        let mut h = h0.clone();
        'shrink: for _ in 0..40 {
            // Evaluate on the stencil; shrink on any region violation.
            let mut values: Vec<Vec<Rat>> = Vec::with_capacity(nodes);
            for i in 0..nodes {
                let offset = Rat::from_int(i as i64 - m as i64) * &h;
                let mut p = point.to_vec();
                p[v] = &p[v] + &offset;
                match self.eval_exact(&p) {
                    Ok(r) => values.push(r),
                    Err(Error::OutsideRegion) | Err(Error::Input(_)) => {
                        h = &h / Rat::from_int(4);
                        continue 'shrink;
                    }
                    Err(e) => return Err(e),
                }
            }
            // Differentiation weights: w_i such that sum w_i f(x + (i-m) h)
            // equals f'(x) for polynomials of degree <= 2m.
            let weights = differentiation_weights(m, &h);
            let dim = values[0].len();
            let mut out = vec![Rat::zero(); dim];
            for (w, vals) in weights.iter().zip(&values) {
                if w.is_zero() {
                    continue;
                }
                for (acc, val) in out.iter_mut().zip(vals) {
                    *acc += w * val;
                }
            }
            return Ok(out);
        }
        Err(Error::OutsideRegion)
    }
}

/// Exact finite-difference weights for the first derivative on the nodes
/// `(i - m) h`, `i = 0..2m`, solving the Vandermonde moment system.
fn differentiation_weights(m: usize, h: &Rat) -> Vec<Rat> {
    let nodes = 2 * m + 1;
    let xs: Vec<Rat> = (0..nodes).map(|i| Rat::from_int(i as i64 - m as i64) * h).collect();
    // Solve sum_i w_i xs_i^p = [p == 1] for p = 0..nodes-1.
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(nodes);
    let mut rhs = Vec::with_capacity(nodes);
    for p in 0..nodes {
        rows.push(xs.iter().map(|x| x.pow(p as u32)).collect());
        rhs.push(if p == 1 { Rat::one() } else { Rat::zero() });
    }
    let refs: Vec<&[Rat]> = rows.iter().map(|r| r.as_slice()).collect();
    crate::geometry::solve_square(&refs, &rhs).expect("Vandermonde nodes are distinct")
}

/// Report of a numeric rank check over an equation system's Jacobian.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankReport {
    pub rank_at_point: usize,
    pub max_rank: usize,
    pub trials: u32,
    pub cutoff: f64,
}

/// Singular-value cutoff used by rank checks.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Numeric rank of the residual Jacobian at the given point, and the maximum
/// over `trials` random points of the validity region (a generic-rank lower
/// bound). The Jacobian itself is computed exactly; only the singular value
/// decomposition is floating point.
pub fn jacobian_rank_check(
    es: &EquationSystem,
    point: &[Rat],
    trials: u32,
    seed: MasterSeed,
) -> Result<RankReport> {
    let rank_at_point = rank_at(es, point)?;
    let mut max_rank = rank_at_point;
    for trial in 0..trials {
        let mut rng = seed.stream("rank-trial", trial as u64);
        if let Some(p) = sample_point(es, &mut rng) {
            max_rank = max_rank.max(rank_at(es, &p)?);
        }
    }
    Ok(RankReport { rank_at_point, max_rank, trials, cutoff: RANK_CUTOFF })
}

fn rank_at(es: &EquationSystem, point: &[Rat]) -> Result<usize> {
    if !es.contains(point) {
        return Err(Error::OutsideRegion);
    }
    let jac = es.jacobian_exact(point)?;
    let jac_f64: Vec<Vec<f64>> = jac
        .iter()
        .map(|row| row.iter().map(Rat::to_f64).collect())
        .collect();
    Ok(numeric::numeric_rank(&jac_f64, RANK_CUTOFF))
}

/// A random interior point of the validity region (rejection sampling).
fn sample_point(es: &EquationSystem, rng: &mut impl Rng) -> Option<Vec<Rat>> {
    let d = es.dim();
    let bp = es.coloring.breakpoints();
    for _ in 0..200 {
        let mut point = Vec::with_capacity(es.n_unknowns());
        let region = match &es.pattern.box_spec {
            BoxSpec::Fixed(region) => {
                region.clone()
            }
            BoxSpec::FreeCube { window } => {
                let max_side = (0..d)
                    .map(|a| &window.hi[a] - &window.lo[a])
                    .min()
                    .unwrap();
                let side = &max_side * (rat(1, 4) + rat(3, 4) * random_unit(rng, 24));
                let corner: Vec<Rat> = (0..d)
                    .map(|a| {
                        let room = &window.hi[a] - &window.lo[a] - &side;
                        &window.lo[a] + random_unit(rng, 24) * room
                    })
                    .collect();
                let region = Cuboid::new(
                    corner.clone(),
                    corner.iter().map(|c| c + &side).collect(),
                )
                .ok()?;
                point.push(side);
                point.extend(corner);
                region
            }
        };
        for a in 0..d {
            let mut vals: Vec<Rat> = Vec::new();
            for &c in &es.pattern.cut_cells[a] {
                let lo = bp[a][c].clone().max(region.lo[a].clone());
                let hi = bp[a][c + 1].clone().min(region.hi[a].clone());
                if lo >= hi {
                    vals.clear();
                    break;
                }
                let span = &hi - &lo;
                vals.push(lo + random_unit(rng, 24) * span);
            }
            if vals.len() != es.pattern.cut_cells[a].len() {
                point.clear();
                break;
            }
            vals.sort();
            point.extend(vals);
        }
        if point.len() == es.n_unknowns() && es.contains(&point) {
            return Some(point);
        }
    }
    None
}

/// Outcome of the exact 1-D no-splitting certification.
#[derive(Clone, Debug)]
pub enum Certify1d {
    /// Every pattern for every cut count `0..=t` is exactly infeasible.
    Certified(NoSplitCertificate),
    /// A concrete fair splitting of a concrete necklace inside the window.
    Counterexample { necklace: Cuboid, witness: Splitting },
}

impl Certify1d {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certify1d::Certified(_))
    }
}

/// The full exact refutation: one entry per pattern/labeling system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoSplitCertificate {
    pub q: u32,
    pub t: usize,
    pub gamma: Rat,
    pub window_lo: Rat,
    pub window_hi: Rat,
    pub systems_refuted: u64,
    pub certificate: InfeasibilityCertificate,
}

/// Certifies that no necklace `[L, R]` inside the window has a fair
/// q-splitting with at most `t` cuts and granularity at least `gamma`, or
/// produces a counterexample.
///
/// Both endpoints and all cut positions are unknowns; every assignment of
/// them to grid cells, together with every canonical labeling, becomes one
/// exact linear feasibility problem.
pub fn certify_no_split_1d(
    coloring: &GridColoring,
    q: u32,
    t: usize,
    gamma: &Rat,
    window_lo: &Rat,
    window_hi: &Rat,
) -> Result<Certify1d> {
    if coloring.dim() != 1 {
        return Err(Error::Input("certify_no_split_1d needs a 1-D coloring".into()));
    }
    if !gamma.is_positive() {
        return Err(Error::Input(
            "granularity must be positive: a zero-size necklace is trivially fair".into(),
        ));
    }
    if q < 2 {
        return Err(Error::Input("need q >= 2".into()));
    }
    let bounds = coloring.bounding();
    let lo_cap = if window_lo >= &bounds.lo[0] { window_lo.clone() } else { bounds.lo[0].clone() };
    let hi_cap = if window_hi <= &bounds.hi[0] { window_hi.clone() } else { bounds.hi[0].clone() };
    if lo_cap >= hi_cap {
        return Err(Error::Domain("window does not intersect the coloring".into()));
    }
    let bp = &coloring.breakpoints()[0];
    let eligible: Vec<usize> = (0..bp.len() - 1)
        .filter(|&c| bp[c] <= hi_cap && bp[c + 1] >= lo_cap)
        .collect();

    let mut cert = InfeasibilityCertificate::default();
    for sub_t in 0..=t {
        let n_vars = sub_t + 2;
        // Window bounds as explicit constraints on L and R.
        let mut lo_row = vec![Rat::zero(); n_vars];
        lo_row[0] = Rat::one();
        let mut hi_row = vec![Rat::zero(); n_vars];
        hi_row[n_vars - 1] = Rat::one();
        let extra = vec![
            Constraint::ge(lo_row, lo_cap.clone()),
            Constraint::le(hi_row, hi_cap.clone()),
        ];
        let mut tuple = vec![0usize; n_vars];
        let found = enumerate_nondecreasing_tuples(&eligible, n_vars, &mut tuple, 0, 0, &mut |cells| {
            let points: Vec<PointSpec> = cells
                .iter()
                .enumerate()
                .map(|(i, &c)| PointSpec::Var { var: i, cell: c })
                .collect();
            splitter1d::try_pattern(
                coloring,
                &points,
                n_vars,
                q,
                gamma,
                &extra,
                Some((cells[0], cells[n_vars - 1])),
                &cells[1..n_vars - 1],
                &mut cert,
            )
        })?;
        if let Some(witness) = found {
            let necklace = witness.region().clone();
            return Ok(Certify1d::Counterexample { necklace, witness });
        }
    }
    Ok(Certify1d::Certified(NoSplitCertificate {
        q,
        t,
        gamma: gamma.clone(),
        window_lo: lo_cap,
        window_hi: hi_cap,
        systems_refuted: cert.systems_refuted,
        certificate: cert,
    }))
}

fn enumerate_nondecreasing_tuples(
    eligible: &[usize],
    len: usize,
    buf: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]) -> Result<Option<Splitting>>,
) -> Result<Option<Splitting>> {
    if depth == len {
        return f(buf);
    }
    for i in start..eligible.len() {
        buf[depth] = eligible[i];
        if let Some(w) = enumerate_nondecreasing_tuples(eligible, len, buf, depth + 1, i, f)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Budget of the stochastic d >= 2 probe.
#[derive(Clone, Copy, Debug)]
pub struct ProbeBudget {
    /// Number of random necklace boxes to try.
    pub boxes: usize,
    pub md: MdBudget,
}

impl Default for ProbeBudget {
    fn default() -> Self {
        ProbeBudget { boxes: 8, md: MdBudget::default() }
    }
}

/// Report of a stochastic no-splitting probe. Explicitly not a certificate.
#[derive(Clone, Debug)]
pub struct ProbeReport {
    pub attempts: usize,
    pub patterns_explored: usize,
    pub seeds_run: usize,
    pub best_residual: f64,
    pub found: Option<(Cuboid, Splitting)>,
}

/// Randomized search for a fair splitting of some necklace cube inside the
/// window: random boxes, then the numerical axis-cut search on each. The
/// attempt stream is prefix-stable in the budget, so the best residual can
/// only improve as the budget grows.
pub fn probe_no_split_md(
    coloring: &GridColoring,
    q: u32,
    t: usize,
    gamma: &Rat,
    window: &Cuboid,
    budget: ProbeBudget,
    seed: MasterSeed,
) -> Result<ProbeReport> {
    let d = coloring.dim();
    if d < 2 {
        return Err(Error::Input("probe_no_split_md needs d >= 2".into()));
    }
    let mut report = ProbeReport {
        attempts: 0,
        patterns_explored: 0,
        seeds_run: 0,
        best_residual: f64::INFINITY,
        found: None,
    };
    let max_side: Rat = (0..d).map(|a| window.side(a)).min().unwrap();
    for attempt in 0..budget.boxes {
        report.attempts += 1;
        let region = if attempt == 0 {
            // The full window cube first.
            let side = max_side.clone();
            Cuboid::new(window.lo.clone(), window.lo.iter().map(|l| l + &side).collect())?
        } else {
            let mut rng = seed.stream("probe-box", attempt as u64);
            let side = &max_side * (rat(1, 2) + rat(1, 2) * random_unit(&mut rng, 20));
            let corner: Vec<Rat> = (0..d)
                .map(|a| {
                    let room = window.side(a) - &side;
                    &window.lo[a] + random_unit(&mut rng, 20) * room
                })
                .collect();
            Cuboid::new(corner.clone(), corner.iter().map(|c| c + &side).collect())?
        };
        let MdSearch { witness, patterns_explored, seeds_run, best_residual } =
            solve_grid_axis_cuts_md(coloring, &region, q, t, gamma, budget.md, seed)?;
        report.patterns_explored += patterns_explored;
        report.seeds_run += seeds_run;
        report.best_residual = report.best_residual.min(best_residual);
        if let Some(w) = witness {
            report.found = Some((region, w));
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::part_measures;

    #[test]
    fn params_invariants_enforced() {
        let p = AdversaryParams::standard(1, 4, 2, 1, 1, 7).unwrap();
        assert!(p.big_n > 4 * p.n * p.n);
        assert!(p.validate().is_ok());
        let mut bad = p.clone();
        bad.big_n = 4;
        assert!(bad.validate().is_err());
        let mut bad = p.clone();
        bad.delta = rat(10, 1);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn explicit_desk_scale_parameters() {
        // d=1, k=4, n=1, N=5, delta=1/25: five background cells, three tiny
        // colored intervals planted in each.
        let p = AdversaryParams {
            d: 1,
            k: 4,
            q: 2,
            t: 1,
            n: 1,
            big_n: 5,
            delta: rat(1, 25),
            epsilon: Rat::one(),
            bit_length: 16,
            seed: 5,
        };
        p.validate().unwrap();
        let g = generate(&p).unwrap();
        let colored_cells = g
            .cells()
            .iter()
            .filter(|c| **c != ColorId::WHITE)
            .count();
        assert_eq!(colored_cells, 5 * 3);
        let mv = g.measure_vector(&g.bounding()).unwrap();
        for j in 1..4 {
            assert!(mv[j].is_positive());
        }
    }

    #[test]
    fn generated_coloring_is_deterministic_and_close_to_white() {
        let p = AdversaryParams::standard(1, 4, 2, 1, 1, 7).unwrap();
        let g1 = generate(&p).unwrap();
        let g2 = generate(&p).unwrap();
        assert_eq!(g1, g2);

        // Every color present with positive measure.
        let mv = g1.measure_vector(&g1.bounding()).unwrap();
        for (j, m) in mv.iter().enumerate() {
            assert!(m.is_positive(), "color {} empty", j + 1);
        }
        // Distance to all-white is below epsilon / 2.
        let nonwhite: Rat = mv.iter().skip(1).sum();
        assert!(nonwhite < &p.epsilon / Rat::from_int(2));
        // And below the coarse bound N^d * delta^d.
        let coarse = Rat::from_int(p.big_n as i64).pow(p.d as u32) * p.delta.pow(p.d as u32);
        assert!(nonwhite <= coarse);
    }

    #[test]
    fn audit_threshold_table_rows() {
        // 1-D window: k(q-1) > t + 2.
        let a = audit_dof(1, 5, 2, 2, CutFamily::Axis, AuditTarget::Window);
        assert!(a.exceeds);
        assert_eq!(a.threshold, 4);
        // General window: k(q-1) > t + d + q - 1.
        let a = audit_dof(2, 6, 2, 2, CutFamily::Axis, AuditTarget::Window);
        assert!(a.exceeds);
        assert_eq!(a.threshold, 5);
        // Arbitrary cuts raise the threshold: 6 > 2*2 + 2 + 1 fails.
        let a = audit_dof(2, 6, 2, 2, CutFamily::Arbitrary, AuditTarget::Window);
        assert!(!a.exceeds);
        assert_eq!(a.threshold, 7);
        // Fixed necklace, axis cuts: k(q-1) > t + q - 2.
        let a = audit_dof(3, 4, 2, 2, CutFamily::Axis, AuditTarget::FixedNecklace);
        assert!(a.exceeds);
        assert_eq!(a.threshold, 2);
        // Fixed necklace, arbitrary cuts: k(q-1) > dt + q - 2.
        let a = audit_dof(3, 4, 2, 2, CutFamily::Arbitrary, AuditTarget::FixedNecklace);
        assert!(!a.exceeds);
        assert_eq!(a.threshold, 6);
    }

    fn ab_coloring() -> GridColoring {
        GridColoring::from_runs_1d(
            Rat::zero(),
            &[(rat(1, 2), ColorId(1)), (rat(1, 2), ColorId(2))],
            2,
        )
        .unwrap()
    }

    #[test]
    fn residual_zero_at_fair_witness() {
        let coloring = ab_coloring();
        let pattern = MdPattern {
            box_spec: BoxSpec::Fixed(coloring.bounding()),
            cut_cells: vec![vec![0, 1]],
            labels: vec![0, 1, 0],
        };
        let es = EquationSystem::build(&coloring, pattern, 2).unwrap();
        assert_eq!(es.residual_dim(), 1 + 1); // (k-1)(q-1) + (q-1)
        let fair = vec![rat(1, 4), rat(3, 4)];
        let r = es.eval_exact(&fair).unwrap();
        assert!(r.iter().all(Rat::is_zero));
        // Perturbing one cut breaks fairness.
        let off = vec![rat(1, 4), rat(7, 10)];
        let r = es.eval_exact(&off).unwrap();
        assert!(r.iter().any(|v| !v.is_zero()));
        // W values are the part measures themselves.
        let w = es.w_value(ColorId(1), 0, &fair).unwrap();
        assert_eq!(w, rat(1, 4));
    }

    #[test]
    fn residual_dimension_example() {
        // k = 3, q = 2: 2 color equations + 1 volume equation.
        let coloring = GridColoring::from_runs_1d(
            Rat::zero(),
            &[
                (rat(1, 3), ColorId(1)),
                (rat(1, 3), ColorId(2)),
                (rat(1, 3), ColorId(3)),
            ],
            3,
        )
        .unwrap();
        let pattern = MdPattern {
            box_spec: BoxSpec::Fixed(coloring.bounding()),
            cut_cells: vec![vec![0]],
            labels: vec![0, 1],
        };
        let es = EquationSystem::build(&coloring, pattern, 2).unwrap();
        assert_eq!(es.residual_dim(), 3);
    }

    #[test]
    fn volume_rank_degeneracy_d2_q4() {
        // One cut per axis on a fixed square, each piece its own part:
        // three volume equations but only rank 2.
        let region = Cuboid::new(vec![rat(0, 1); 2], vec![rat(1, 1); 2]).unwrap();
        let es = EquationSystem::volume_system(region, &[1, 1], vec![0, 1, 2, 3], 4).unwrap();
        assert_eq!(es.residual_dim(), 3);
        assert_eq!(es.n_unknowns(), 2);
        let point = vec![rat(1, 3), rat(2, 5)];
        let report = jacobian_rank_check(&es, &point, 20, MasterSeed(3)).unwrap();
        assert_eq!(report.rank_at_point, 2);
        assert_eq!(report.max_rank, 2);
    }

    #[test]
    fn volume_rank_full_in_1d() {
        for q in 2..=5u32 {
            let region = Cuboid::new(vec![rat(0, 1)], vec![rat(1, 1)]).unwrap();
            let labels: Vec<u32> = (0..q).collect();
            let es =
                EquationSystem::volume_system(region, &[(q - 1) as usize], labels, q).unwrap();
            let point: Vec<Rat> = (1..q).map(|i| rat(i as i64, q as i64)).collect();
            let report = jacobian_rank_check(&es, &point, 10, MasterSeed(9)).unwrap();
            assert_eq!(report.max_rank, (q - 1) as usize, "q = {q}");
        }
    }

    #[test]
    fn free_cube_system_over_a_window() {
        // Necklace endpoints as unknowns: layout [side, corner, cut].
        let coloring = ab_coloring();
        let window = coloring.bounding();
        let pattern = MdPattern {
            box_spec: BoxSpec::FreeCube { window },
            cut_cells: vec![vec![0]],
            labels: vec![0, 1],
        };
        let es = EquationSystem::build(&coloring, pattern, 2).unwrap();
        assert_eq!(es.n_unknowns(), 3);
        assert_eq!(es.residual_dim(), 2);
        // Necklace [1/8, 3/8] inside the first cell, cut in the middle: fair,
        // and strictly interior to the validity region.
        let fair = vec![rat(1, 4), rat(1, 8), rat(1, 4)];
        assert!(es.contains(&fair));
        let r = es.eval_exact(&fair).unwrap();
        assert!(r.iter().all(Rat::is_zero));
        // Shrinking the box below the cut leaves the region.
        let outside = vec![rat(1, 16), rat(1, 8), rat(1, 4)];
        assert!(!es.contains(&outside));
        // Exact Jacobian exists at interior points and respects dimensions.
        let report = jacobian_rank_check(&es, &fair, 10, MasterSeed(4)).unwrap();
        assert!(report.max_rank <= 2);
        assert!(report.rank_at_point >= 1);
    }

    #[test]
    fn rank_never_exceeds_dimensions() {
        let region = Cuboid::new(vec![rat(0, 1)], vec![rat(1, 1)]).unwrap();
        let es = EquationSystem::volume_system(region, &[1], vec![0, 1], 2).unwrap();
        let report = jacobian_rank_check(&es, &[rat(1, 2)], 5, MasterSeed(1)).unwrap();
        assert!(report.max_rank <= 1);
    }

    #[test]
    fn certify_refuses_zero_granularity() {
        let c = ab_coloring();
        assert!(certify_no_split_1d(&c, 2, 1, &Rat::zero(), &rat(0, 1), &rat(1, 1)).is_err());
    }

    #[test]
    fn certify_t0_single_piece() {
        let c = ab_coloring();
        let out = certify_no_split_1d(&c, 2, 0, &rat(1, 8), &rat(0, 1), &rat(1, 1)).unwrap();
        assert!(out.is_certified());
    }

    #[test]
    fn certify_finds_counterexample_for_ab() {
        let c = ab_coloring();
        let out = certify_no_split_1d(&c, 2, 2, &rat(1, 8), &rat(0, 1), &rat(1, 1)).unwrap();
        match out {
            Certify1d::Counterexample { necklace, witness } => {
                assert!(necklace.side(0).is_positive());
                let pm = part_measures(&c, &witness).unwrap();
                assert!(pm.is_fair());
            }
            Certify1d::Certified(_) => panic!("AB coloring splits with two cuts"),
        }
    }

    #[test]
    fn adversarial_coloring_certified_no_split() {
        // k = 4 > t + 2 = 3 regime at desk scale.
        let p = AdversaryParams::standard(1, 4, 2, 1, 1, 41).unwrap();
        let g = generate(&p).unwrap();
        let out = certify_no_split_1d(
            &g,
            2,
            1,
            &Rat::one(),
            &Rat::from_int(-1),
            &Rat::one(),
        )
        .unwrap();
        match out {
            Certify1d::Certified(cert) => {
                assert!(cert.systems_refuted > 0);
            }
            Certify1d::Counterexample { witness, .. } => {
                panic!("unexpected fair splitting {witness:?}")
            }
        }
    }
}
