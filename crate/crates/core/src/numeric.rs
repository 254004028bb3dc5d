//! Floating-point helpers for the numerical *search* paths: a compiled sparse
//! view of grid colorings, small dense linear algebra, singular values for
//! numeric rank, and rational snapping.
//!
//! Nothing in here is ever reported as a result: every numeric candidate is
//! snapped to rationals and re-validated by the exact code paths before it
//! leaves the crate.

use crate::model::GridColoring;
use crate::rat::Rat;
use num_bigint::BigInt;

/// A grid coloring compiled for fast approximate measure queries.
///
/// Cells of the most frequent color are implicit: only the other cells are
/// stored (merged into runs along the last axis), and the dominant color's
/// measure is recovered as volume minus the rest. Adversarial colorings are
/// almost entirely white, so this turns million-cell grids into a few hundred
/// boxes.
#[derive(Clone, Debug)]
pub struct CompiledColoring {
    k: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    dominant: usize,
    /// (box lo, box hi, color index) for non-dominant cells.
    boxes: Vec<(Vec<f64>, Vec<f64>, usize)>,
}

impl CompiledColoring {
    pub fn new(coloring: &GridColoring) -> Self {
        let k = coloring.k() as usize;
        let d = coloring.dim();
        let bounds = coloring.bounding();
        let mut counts = vec![0usize; k];
        for c in coloring.cells() {
            counts[c.index()] += 1;
        }
        let dominant = (0..k).max_by_key(|&j| counts[j]).unwrap_or(0);
        let bp: Vec<Vec<f64>> = coloring
            .breakpoints()
            .iter()
            .map(|axis| axis.iter().map(Rat::to_f64).collect())
            .collect();
        let mut boxes = Vec::new();
        let mut run: Option<(Vec<usize>, usize, usize, usize)> = None; // (cell, start, end, color)
        for (_, cell) in coloring.cell_indices() {
            let color = coloring.cell_color(&cell).index();
            // flush a run that cannot extend to this cell
            let extends = match &run {
                Some((rc, _, end, rcolor)) => {
                    *rcolor == color
                        && cell[d - 1] == *end
                        && rc[..d - 1] == cell[..d - 1]
                }
                None => false,
            };
            if extends {
                if let Some((_, _, end, _)) = run.as_mut() {
                    *end += 1;
                }
            } else {
                if let Some((rc, start, end, rcolor)) = run.take() {
                    boxes.push(Self::run_box(&bp, &rc, start, end, rcolor));
                }
                if color != dominant {
                    run = Some((cell.clone(), cell[d - 1], cell[d - 1] + 1, color));
                }
            }
        }
        if let Some((rc, start, end, rcolor)) = run.take() {
            boxes.push(Self::run_box(&bp, &rc, start, end, rcolor));
        }
        CompiledColoring {
            k,
            lo: bounds.lo.iter().map(Rat::to_f64).collect(),
            hi: bounds.hi.iter().map(Rat::to_f64).collect(),
            dominant,
            boxes,
        }
    }

    fn run_box(
        bp: &[Vec<f64>],
        cell: &[usize],
        start: usize,
        end: usize,
        color: usize,
    ) -> (Vec<f64>, Vec<f64>, usize) {
        let d = cell.len();
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for a in 0..d - 1 {
            lo.push(bp[a][cell[a]]);
            hi.push(bp[a][cell[a] + 1]);
        }
        lo.push(bp[d - 1][start]);
        hi.push(bp[d - 1][end]);
        (lo, hi, color)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    /// Approximate per-color measures inside `[lo, hi]`.
    pub fn measures(&self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        let mut volume = 1.0;
        for a in 0..self.dim() {
            volume *= (hi[a] - lo[a]).max(0.0);
        }
        let mut rest = 0.0;
        for (blo, bhi, color) in &self.boxes {
            let mut v = 1.0;
            for a in 0..self.dim() {
                let l = lo[a].max(blo[a]);
                let h = hi[a].min(bhi[a]);
                if h <= l {
                    v = 0.0;
                    break;
                }
                v *= h - l;
            }
            if v > 0.0 {
                out[*color] += v;
                rest += v;
            }
        }
        out[self.dominant] = (volume - rest).max(0.0);
        out
    }
}

/// Measures of every color captured by every part of an axis-cut splitting
/// of `region`, evaluated approximately. `cuts[a]` must be sorted; `labels`
/// index pieces lexicographically (first axis most significant).
pub fn part_measures_f64(
    coloring: &CompiledColoring,
    region: (&[f64], &[f64]),
    cuts: &[Vec<f64>],
    labels: &[u32],
    q: usize,
) -> Vec<Vec<f64>> {
    let d = coloring.dim();
    let boundaries: Vec<Vec<f64>> = (0..d)
        .map(|a| {
            let mut b = Vec::with_capacity(cuts[a].len() + 2);
            b.push(region.0[a]);
            b.extend_from_slice(&cuts[a]);
            b.push(region.1[a]);
            b
        })
        .collect();
    let slabs: Vec<usize> = boundaries.iter().map(|b| b.len() - 1).collect();
    let total: usize = slabs.iter().product();
    let mut parts = vec![vec![0.0; coloring.k()]; q];
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    for flat in 0..total {
        let mut rem = flat;
        for a in (0..d).rev() {
            let s = rem % slabs[a];
            rem /= slabs[a];
            lo[a] = boundaries[a][s];
            hi[a] = boundaries[a][s + 1];
        }
        let m = coloring.measures(&lo, &hi);
        let row = &mut parts[labels[flat] as usize];
        for (acc, v) in row.iter_mut().zip(m) {
            *acc += v;
        }
    }
    parts
}

/// Solves a small dense linear system in place; `None` when near-singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Singular values of a small dense matrix by one-sided Jacobi, descending.
pub fn singular_values(matrix: &[Vec<f64>]) -> Vec<f64> {
    let m = matrix.len();
    if m == 0 {
        return vec![];
    }
    let n = matrix[0].len();
    // Work on columns.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| matrix[i][j]).collect()).collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let app: f64 = cols[p].iter().map(|v| v * v).sum();
                let aqq: f64 = cols[q].iter().map(|v| v * v).sum();
                let apq: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if apq.abs() <= 1e-30 * (app * aqq).sqrt().max(1e-300) {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Numeric rank: number of singular values above the cutoff.
pub fn numeric_rank(matrix: &[Vec<f64>], cutoff: f64) -> usize {
    singular_values(matrix).into_iter().filter(|&s| s > cutoff).count()
}

/// Best rational approximation of `x` with denominator at most `max_denom`,
/// by continued fractions. Exact inputs with small denominators snap to
/// themselves.
pub fn snap_to_rational(x: f64, max_denom: u64) -> Rat {
    if !x.is_finite() {
        return Rat::zero();
    }
    let negative = x < 0.0;
    let mut x = x.abs();
    // Convergents p/q of the continued fraction expansion.
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e30 {
            break;
        }
        let ai = a as u128;
        let p2 = ai.saturating_mul(p1).saturating_add(p0);
        let q2 = ai.saturating_mul(q1).saturating_add(q0);
        if q2 > max_denom as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1 == 0 {
        return Rat::zero();
    }
    let mut num = BigInt::from(p1);
    if negative {
        num = -num;
    }
    Rat::from_bigint(num, BigInt::from(q1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ColorId, Cuboid};
    use crate::rat::rat;

    #[test]
    fn compiled_coloring_agrees_with_exact() {
        let bp = vec![
            vec![rat(0, 1), rat(1, 4), rat(1, 2), rat(1, 1)],
            vec![rat(0, 1), rat(1, 3), rat(1, 1)],
        ];
        let cells = vec![
            ColorId(1),
            ColorId(2),
            ColorId(1),
            ColorId(1),
            ColorId(3),
            ColorId(1),
        ];
        let g = GridColoring::new(bp, cells, 3).unwrap();
        let c = CompiledColoring::new(&g);
        let query = Cuboid::new(vec![rat(1, 8), rat(0, 1)], vec![rat(3, 4), rat(1, 2)]).unwrap();
        let exact = g.measure_vector(&query).unwrap();
        let approx = c.measures(
            &query.lo.iter().map(Rat::to_f64).collect::<Vec<_>>(),
            &query.hi.iter().map(Rat::to_f64).collect::<Vec<_>>(),
        );
        for (e, a) in exact.iter().zip(&approx) {
            assert!((e.to_f64() - a).abs() < 1e-12, "{e} vs {a}");
        }
    }

    #[test]
    fn rank_of_rank_deficient_matrix() {
        let m = vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![1.0, 0.0, 1.0],
        ];
        assert_eq!(numeric_rank(&m, 1e-8), 2);
        let id = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        assert_eq!(numeric_rank(&id, 1e-8), 3);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = vec![vec![3.0, 0.0], vec![0.0, 4.0], vec![0.0, 0.0]];
        let sv = singular_values(&m);
        assert!((sv[0] - 4.0).abs() < 1e-12);
        assert!((sv[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn snapping_recovers_small_fractions() {
        assert_eq!(snap_to_rational(0.5, 1 << 24), rat(1, 2));
        assert_eq!(snap_to_rational(1.0 / 3.0, 1 << 24), rat(1, 3));
        assert_eq!(snap_to_rational(-7.0 / 12.0, 1 << 24), rat(-7, 12));
        assert_eq!(snap_to_rational(2.0, 1 << 24), rat(2, 1));
        assert_eq!(snap_to_rational(0.0, 1 << 24), rat(0, 1));
    }

    #[test]
    fn dense_solve() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_dense(a, vec![5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }
}
