//! Exact polytope geometry: halfspace intersections, vertex enumeration,
//! volumes, inscribed cubes, and verification of arbitrary-hyperplane
//! splittings.
//!
//! All computations are exact over [`Rat`]. Volumes come from a recursive
//! facet-pyramid decomposition (an exact simplicial decomposition in
//! disguise); inscribed cubes come from an exact linear program.

use crate::error::{Error, Result};
use crate::linprog::{self, Constraint, LpOutcome};
use crate::model::{Cuboid, GridColoring, PartMeasures};
use crate::rat::Rat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// The halfspace `normal . x <= offset`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        dot(&self.normal, point) <= self.offset
    }
}

/// An oriented hyperplane `normal . x = offset` in canonical form: the first
/// nonzero normal entry equals one, which makes serialized parameters unique.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Hyperplane {
    normal: Vec<Rat>,
    offset: Rat,
}

impl Hyperplane {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Result<Self> {
        let lead = normal
            .iter()
            .find(|v| !v.is_zero())
            .cloned()
            .ok_or_else(|| Error::Input("hyperplane normal must be nonzero".into()))?;
        let normal = normal.iter().map(|v| v / &lead).collect();
        Ok(Hyperplane { normal, offset: &offset / &lead })
    }

    /// Axis-aligned hyperplane `x_axis = coordinate`.
    pub fn axis_aligned(d: usize, axis: usize, coordinate: Rat) -> Self {
        let mut normal = vec![Rat::zero(); d];
        normal[axis] = Rat::one();
        Hyperplane { normal, offset: coordinate }
    }

    pub fn normal(&self) -> &[Rat] {
        &self.normal
    }

    pub fn offset(&self) -> &Rat {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// The side `normal . x <= offset`.
    pub fn below(&self) -> Halfspace {
        Halfspace::new(self.normal.clone(), self.offset.clone())
    }

    /// The side `normal . x >= offset`.
    pub fn above(&self) -> Halfspace {
        Halfspace::new(self.normal.iter().map(|v| -v).collect(), -&self.offset)
    }
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A convex polytope given as an intersection of halfspaces, with a lazily
/// computed exact vertex list.
#[derive(Debug)]
pub struct Polytope {
    halfspaces: Vec<Halfspace>,
    vertices: OnceLock<Result<Vec<Vec<Rat>>>>,
}

impl Clone for Polytope {
    fn clone(&self) -> Self {
        Polytope { halfspaces: self.halfspaces.clone(), vertices: OnceLock::new() }
    }
}

impl Polytope {
    pub fn from_halfspaces(halfspaces: Vec<Halfspace>) -> Self {
        Polytope { halfspaces, vertices: OnceLock::new() }
    }

    pub fn from_box(b: &Cuboid) -> Self {
        Self::from_halfspaces(box_halfspaces(b))
    }

    /// This polytope further cut by more halfspaces.
    pub fn intersect_halfspaces(&self, more: &[Halfspace]) -> Polytope {
        let mut hs = self.halfspaces.clone();
        hs.extend_from_slice(more);
        Polytope::from_halfspaces(hs)
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn dim(&self) -> usize {
        self.halfspaces.first().map_or(0, Halfspace::dim)
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        self.halfspaces.iter().all(|h| h.contains(point))
    }

    /// Exact vertex list, sorted lexicographically. Empty iff the polytope is
    /// empty. Errors with [`Error::Unbounded`] on unbounded input.
    pub fn vertices(&self) -> Result<&[Vec<Rat>]> {
        self.vertices
            .get_or_init(|| self.compute_vertices())
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.vertices()?.is_empty())
    }

    /// Axis-aligned bounding box of the vertex set, `None` when empty.
    pub fn bounding_box(&self) -> Result<Option<Cuboid>> {
        let verts = self.vertices()?;
        let Some(first) = verts.first() else { return Ok(None) };
        let mut lo = first.clone();
        let mut hi = first.clone();
        for v in verts.iter().skip(1) {
            for a in 0..v.len() {
                if v[a] < lo[a] {
                    lo[a] = v[a].clone();
                }
                if v[a] > hi[a] {
                    hi[a] = v[a].clone();
                }
            }
        }
        Ok(Some(Cuboid { lo, hi }))
    }

    /// Exact volume. Lower-dimensional (degenerate) polytopes have volume 0.
    pub fn volume(&self) -> Result<Rat> {
        let verts = self.vertices()?;
        Ok(hull_volume(verts, self.dim()))
    }

    /// Side length of the largest axis-aligned cube contained in the
    /// polytope, as the exact optimum of a linear program over the cube's
    /// center and side. Errors on an empty polytope.
    pub fn inscribed_cube_side(&self) -> Result<Rat> {
        let d = self.dim();
        // Variables: center c_0..c_{d-1}, side g.
        let mut cons = Vec::with_capacity(self.halfspaces.len() + 1);
        for h in &self.halfspaces {
            let l1: Rat = h.normal.iter().map(Rat::abs).sum();
            let mut coeffs = h.normal.clone();
            coeffs.push(l1 / Rat::from_int(2));
            cons.push(Constraint::le(coeffs, h.offset.clone()));
        }
        let mut g_row = vec![Rat::zero(); d + 1];
        g_row[d] = Rat::one();
        cons.push(Constraint::ge(g_row.clone(), Rat::zero()));
        match linprog::maximize(d + 1, &g_row, &cons) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Err(Error::EmptyPolytope),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    fn compute_vertices(&self) -> Result<Vec<Vec<Rat>>> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::Input("polytope needs dimension >= 1".into()));
        }
        let hs = &self.halfspaces;
        let mut verts: Vec<Vec<Rat>> = Vec::new();
        let mut subset = vec![0usize; d];
        enumerate_combinations(hs.len(), d, &mut subset, 0, 0, &mut |chosen| {
            let mat: Vec<&[Rat]> = chosen.iter().map(|&i| hs[i].normal.as_slice()).collect();
            let rhs: Vec<Rat> = chosen.iter().map(|&i| hs[i].offset.clone()).collect();
            if let Some(x) = solve_square(&mat, &rhs) {
                if hs.iter().all(|h| h.contains(&x)) && !verts.contains(&x) {
                    verts.push(x);
                }
            }
        });
        verts.sort();
        if verts.is_empty() {
            // No basic feasible point: either empty, or feasible-but-pointed
            // in no direction, which means it contains a line: unbounded.
            return if linprog::feasible_point(d, &halfspace_constraints(hs)).is_some() {
                Err(Error::Unbounded)
            } else {
                Ok(verts)
            };
        }
        if !self.obviously_bounded() && self.recession_direction_exists() {
            return Err(Error::Unbounded);
        }
        Ok(verts)
    }

    /// Cheap syntactic boundedness: every axis is capped from both sides by a
    /// single-axis halfspace. True for every box-clipped polytope this crate
    /// builds, which keeps the LP check off the hot path.
    fn obviously_bounded(&self) -> bool {
        let d = self.dim();
        (0..d).all(|a| {
            let mut above = false;
            let mut below = false;
            for h in &self.halfspaces {
                if h.normal.iter().enumerate().all(|(i, v)| (i == a) != v.is_zero()) {
                    if h.normal[a].is_positive() {
                        above = true;
                    } else {
                        below = true;
                    }
                }
            }
            above && below
        })
    }

    fn recession_direction_exists(&self) -> bool {
        let d = self.dim();
        let cone: Vec<Constraint> = self
            .halfspaces
            .iter()
            .map(|h| Constraint::le(h.normal.clone(), Rat::zero()))
            .collect();
        for a in 0..d {
            for sign in [1i64, -1] {
                let mut obj = vec![Rat::zero(); d];
                obj[a] = Rat::from_int(sign);
                let mut cons = cone.clone();
                cons.push(Constraint::le(obj.clone(), Rat::one()));
                match linprog::maximize(d, &obj, &cons) {
                    LpOutcome::Optimal { value, .. } if value.is_positive() => return true,
                    LpOutcome::Unbounded => return true,
                    _ => {}
                }
            }
        }
        false
    }
}

fn halfspace_constraints(hs: &[Halfspace]) -> Vec<Constraint> {
    hs.iter()
        .map(|h| Constraint::le(h.normal.clone(), h.offset.clone()))
        .collect()
}

/// The `2d` halfspaces of an axis-aligned box.
pub fn box_halfspaces(b: &Cuboid) -> Vec<Halfspace> {
    let d = b.dim();
    let mut out = Vec::with_capacity(2 * d);
    for a in 0..d {
        let mut up = vec![Rat::zero(); d];
        up[a] = Rat::one();
        out.push(Halfspace::new(up, b.hi[a].clone()));
        let mut down = vec![Rat::zero(); d];
        down[a] = -Rat::one();
        out.push(Halfspace::new(down, -&b.lo[a]));
    }
    out
}

fn enumerate_combinations(
    n: usize,
    k: usize,
    buf: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if depth == k {
        f(buf);
        return;
    }
    for i in start..n {
        if n - i < k - depth {
            break;
        }
        buf[depth] = i;
        enumerate_combinations(n, k, buf, depth + 1, i + 1, f);
    }
}

/// Solves a square rational system by Gaussian elimination.
/// `None` when singular.
pub(crate) fn solve_square(rows: &[&[Rat]], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row: Vec<Rat> = r.to_vec();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

fn det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut out = Rat::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rat::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            out = -out;
        }
        let p = m[col][col].clone();
        out *= p.clone();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &p;
                for c in col..n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    out
}

/// Exact volume of the convex hull of a point set in `dim` ambient
/// dimensions. Degenerate hulls have volume zero.
pub fn hull_volume(points: &[Vec<Rat>], dim: usize) -> Rat {
    let mut pts: Vec<Vec<Rat>> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < dim + 1 {
        return Rat::zero();
    }
    if dim == 1 {
        let min = pts.iter().map(|p| p[0].clone()).min().unwrap();
        let max = pts.iter().map(|p| p[0].clone()).max().unwrap();
        return max - min;
    }
    if pts.len() == dim + 1 {
        return simplex_volume(&pts, dim);
    }

    // Centroid as the pyramid apex.
    let n = Rat::from_int(pts.len() as i64);
    let centroid: Vec<Rat> = (0..dim)
        .map(|a| pts.iter().map(|p| p[a].clone()).sum::<Rat>() / n.clone())
        .collect();

    // Candidate facet hyperplanes through every dim-subset of points.
    let mut seen: BTreeMap<(Vec<Rat>, Rat), ()> = BTreeMap::new();
    let mut total = Rat::zero();
    let mut subset = vec![0usize; dim];
    let mut facets: Vec<(Vec<Rat>, Rat)> = Vec::new();
    enumerate_combinations(pts.len(), dim, &mut subset, 0, 0, &mut |chosen| {
        if let Some((normal, offset)) = hyperplane_through(&pts, chosen) {
            if seen.insert((normal.clone(), offset.clone()), ()).is_none() {
                facets.push((normal, offset));
            }
        }
    });
    for (mut normal, mut offset) in facets {
        // Orient so all points are on the <= side; skip if points straddle.
        let mut above = false;
        let mut below = false;
        for p in &pts {
            let v = dot(&normal, p);
            if v > offset {
                above = true;
            } else if v < offset {
                below = true;
            }
            if above && below {
                break;
            }
        }
        if above && below {
            continue;
        }
        if above {
            normal = normal.iter().map(|v| -v).collect();
            offset = -offset;
        }
        let height = (dot(&normal, &centroid) - &offset).abs();
        if height.is_zero() {
            continue;
        }
        let support: Vec<Vec<Rat>> = pts
            .iter()
            .filter(|p| dot(&normal, p) == offset)
            .cloned()
            .collect();
        let drop = (0..dim)
            .max_by(|&i, &j| normal[i].abs().cmp(&normal[j].abs()))
            .unwrap();
        let projected: Vec<Vec<Rat>> = support
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let base = hull_volume(&projected, dim - 1);
        total += height * base / normal[drop].abs();
    }
    total / Rat::from_int(dim as i64)
}

/// Normalized hyperplane through the chosen points, `None` when they do not
/// span an affine hyperplane.
fn hyperplane_through(pts: &[Vec<Rat>], chosen: &[usize]) -> Option<(Vec<Rat>, Rat)> {
    let dim = pts[chosen[0]].len();
    let base = &pts[chosen[0]];
    let rows: Vec<Vec<Rat>> = chosen[1..]
        .iter()
        .map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    // Normal via cofactors of the (dim-1) x dim difference matrix.
    let mut normal = vec![Rat::zero(); dim];
    for j in 0..dim {
        let minor: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { Rat::one() } else { -Rat::one() };
        normal[j] = sign * det(minor);
    }
    let lead = normal.iter().find(|v| !v.is_zero())?.clone();
    let normal: Vec<Rat> = normal.iter().map(|v| v / &lead).collect();
    let offset = dot(&normal, base);
    Some((normal, offset))
}

/// Volume of a `dim`-simplex given `dim + 1` vertices.
fn simplex_volume(pts: &[Vec<Rat>], dim: usize) -> Rat {
    let rows: Vec<Vec<Rat>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    let mut fact = Rat::one();
    for i in 2..=dim as i64 {
        fact *= Rat::from_int(i);
    }
    det(rows).abs() / fact
}

/// Exact per-color measures of `coloring` inside the polytope. Entries sum to
/// the polytope volume.
pub fn box_polytope_color_measures(coloring: &GridColoring, p: &Polytope) -> Result<Vec<Rat>> {
    let verts = p.vertices()?;
    let mut out = vec![Rat::zero(); coloring.k() as usize];
    let Some(bbox) = p.bounding_box()? else { return Ok(out) };
    if !coloring.bounding().contains_box(&bbox) {
        return Err(Error::Domain("polytope outside coloring domain".into()));
    }
    if verts.len() < coloring.dim() + 1 {
        return Ok(out); // degenerate: zero measure
    }
    for (_, cell) in coloring.cell_indices() {
        let cell_box = coloring.cell_box(&cell);
        if cell_box.intersect(&bbox).is_none() {
            continue;
        }
        let piece = p.intersect_halfspaces(&box_halfspaces(&cell_box));
        let v = piece.volume()?;
        if !v.is_zero() {
            out[coloring.cell_color(&cell).index()] += v;
        }
    }
    Ok(out)
}

/// A division of a box by arbitrary hyperplanes plus a part labeling of the
/// nonempty arrangement cells, identified by sign vector. Sign `false` is the
/// `normal . x <= offset` side; cells are enumerated in lexicographic sign
/// order with `false < true`.
#[derive(Clone, Debug)]
pub struct ArbitrarySplitting {
    pub region: Cuboid,
    pub hyperplanes: Vec<Hyperplane>,
    /// Map sign vector -> part label in `0..q`.
    pub labels: BTreeMap<Vec<bool>, u32>,
    pub q: u32,
}

impl ArbitrarySplitting {
    pub fn new(
        region: Cuboid,
        hyperplanes: Vec<Hyperplane>,
        labels: BTreeMap<Vec<bool>, u32>,
        q: u32,
    ) -> Result<Self> {
        if q < 2 {
            return Err(Error::Input("need q >= 2 parts".into()));
        }
        let d = region.dim();
        if hyperplanes.iter().any(|h| h.dim() != d) {
            return Err(Error::Input("hyperplane dimension mismatch".into()));
        }
        if labels.keys().any(|s| s.len() != hyperplanes.len()) {
            return Err(Error::Input("sign vector length mismatch".into()));
        }
        if labels.values().any(|&l| l >= q) {
            return Err(Error::Input("cell label out of range".into()));
        }
        Ok(ArbitrarySplitting { region, hyperplanes, labels, q })
    }

    /// The polytope of one arrangement cell.
    pub fn cell_polytope(&self, signs: &[bool]) -> Polytope {
        let mut hs = box_halfspaces(&self.region);
        for (h, &side) in self.hyperplanes.iter().zip(signs) {
            hs.push(if side { h.above() } else { h.below() });
        }
        Polytope::from_halfspaces(hs)
    }

    /// All sign vectors in canonical order.
    pub fn sign_vectors(&self) -> Vec<Vec<bool>> {
        let t = self.hyperplanes.len();
        (0..1usize << t)
            .map(|mask| (0..t).map(|i| mask >> (t - 1 - i) & 1 == 1).collect())
            .collect()
    }
}

/// Report of an exact verification of an arbitrary-hyperplane splitting.
#[derive(Clone, Debug)]
pub struct ArbitraryVerification {
    pub measures: PartMeasures,
    /// Largest side such that every positive-volume piece contains an
    /// axis-aligned cube of that side.
    pub granularity: Rat,
    pub fair: bool,
}

/// Exact part measures, granularity and fairness of an arbitrary-hyperplane
/// splitting. Zero-measure cells are ignored; a positive-volume cell without
/// a label is an input error.
pub fn verify_arbitrary_splitting(
    coloring: &GridColoring,
    s: &ArbitrarySplitting,
) -> Result<ArbitraryVerification> {
    if !coloring.bounding().contains_box(&s.region) {
        return Err(Error::Domain("splitting box outside coloring domain".into()));
    }
    let k = coloring.k() as usize;
    let mut entries = vec![vec![Rat::zero(); k]; s.q as usize];
    let mut granularity: Option<Rat> = None;
    for signs in s.sign_vectors() {
        let cell = s.cell_polytope(&signs);
        let volume = cell.volume()?;
        if volume.is_zero() {
            continue;
        }
        let Some(&label) = s.labels.get(&signs) else {
            return Err(Error::Input(format!("unlabeled nonempty cell {signs:?}")));
        };
        let measures = box_polytope_color_measures(coloring, &cell)?;
        for (acc, m) in entries[label as usize].iter_mut().zip(measures) {
            *acc += m;
        }
        let side = cell.inscribed_cube_side()?;
        granularity = Some(match granularity.take() {
            None => side,
            Some(g) => g.min(side),
        });
    }
    let measures = PartMeasures::new(entries);
    let fair = measures.is_fair();
    Ok(ArbitraryVerification {
        measures,
        granularity: granularity.unwrap_or_else(Rat::zero),
        fair,
    })
}
