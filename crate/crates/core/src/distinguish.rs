//! Searches for pairs of axis-aligned cubes that a coloring fails to
//! distinguish (identical color-measure vectors), and the color-count audit
//! for when distinguishing colorings are guaranteed to exist.
//!
//! In one dimension the search is exact: endpoint patterns plus exact linear
//! systems over the four endpoint unknowns. In higher dimensions it is a
//! numerical multistart search whose candidates are snapped to rationals and
//! re-verified exactly; "not found" is a budget report, not a certificate.

use crate::affine::{self, PointSpec};
use crate::error::{Error, Result};
use crate::linprog;
use crate::model::{Cuboid, GridColoring, NecklaceBox};
use crate::numeric::{self, CompiledColoring};
use crate::rat::Rat;
use crate::seed::MasterSeed;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A pair of cubes with identical color-measure vectors, and the vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EqualCubePair {
    pub first: NecklaceBox,
    pub second: NecklaceBox,
    pub measures: Vec<Rat>,
}

/// Exact check that a pair qualifies: equal measure vectors and the
/// separation requirement (the first cube minus the second contains an
/// axis-aligned cube of side `sigma`).
pub fn verify_pair(coloring: &GridColoring, pair: &EqualCubePair, sigma: &Rat) -> Result<bool> {
    let a = pair.first.to_cuboid();
    let b = pair.second.to_cuboid();
    let ma = coloring.measure_vector(&a)?;
    let mb = coloring.measure_vector(&b)?;
    Ok(ma == mb && ma == pair.measures && &cube_in_difference(&a, &b) >= sigma)
}

/// Side of the largest axis-aligned cube inside `a \ b`.
///
/// The difference of two boxes is a union of (up to) 2d slabs of `a`, one per
/// face of `b`; the best inscribed cube of a slab is limited by the slab
/// width and the sides of `a`.
pub fn cube_in_difference(a: &Cuboid, b: &Cuboid) -> Rat {
    let d = a.dim();
    if a.intersect(b).is_none() {
        return (0..d).map(|x| a.side(x)).min().unwrap();
    }
    let min_side: Rat = (0..d).map(|x| a.side(x)).min().unwrap();
    let mut best = Rat::zero();
    for axis in 0..d {
        // Slab of `a` to the left of `b`, and to the right.
        let left = (&b.lo[axis] - &a.lo[axis]).min(a.side(axis)).max(Rat::zero());
        let right = (&a.hi[axis] - &b.hi[axis]).min(a.side(axis)).max(Rat::zero());
        for width in [left, right] {
            let cube = width.min(min_side.clone());
            if cube > best {
                best = cube;
            }
        }
    }
    best
}

/// Search outcome for equal-measure cube pairs.
#[derive(Clone, Debug)]
pub enum EqualCubes {
    Found(EqualCubePair),
    /// Exhausted the search (exact for d = 1, budget-limited for d >= 2).
    NotFound { exhaustive: bool, attempts: usize },
}

impl EqualCubes {
    pub fn pair(&self) -> Option<&EqualCubePair> {
        match self {
            EqualCubes::Found(p) => Some(p),
            EqualCubes::NotFound { .. } => None,
        }
    }
}

/// Finds two axis-aligned cubes inside the window with exactly equal
/// color-measure vectors and `A \ B` containing a `sigma`-cube.
pub fn find_equal_cubes(
    coloring: &GridColoring,
    window: &Cuboid,
    sigma: &Rat,
    seed: MasterSeed,
) -> Result<EqualCubes> {
    if !coloring.bounding().contains_box(window) {
        return Err(Error::Domain("window outside coloring domain".into()));
    }
    if !sigma.is_positive() {
        return Err(Error::Input("separation must be positive".into()));
    }
    if coloring.dim() == 1 {
        find_equal_intervals(coloring, window, sigma)
    } else {
        find_equal_cubes_md(coloring, window, sigma, seed)
    }
}

/// Exact 1-D search: every assignment of the four endpoints to grid cells,
/// every separation case, each an exact linear feasibility problem.
///
/// Unknowns: `a, A, b, B` with intervals `[a, A]` and `[b, B]`. Measure
/// equality per color; `[a, A] \ [b, B]` must contain a `sigma`-interval.
fn find_equal_intervals(
    coloring: &GridColoring,
    window: &Cuboid,
    sigma: &Rat,
) -> Result<EqualCubes> {
    let bp = &coloring.breakpoints()[0];
    let (wlo, whi) = (&window.lo[0], &window.hi[0]);
    let eligible: Vec<usize> = (0..bp.len() - 1)
        .filter(|&c| &bp[c] <= whi && &bp[c + 1] >= wlo)
        .collect();
    let n_vars = 4; // a, A, b, B
    let mut attempts = 0usize;

    for (ia, &ca) in eligible.iter().enumerate() {
        for &ca2 in &eligible[ia..] {
            let first_pts = vec![
                PointSpec::Var { var: 0, cell: ca },
                PointSpec::Var { var: 1, cell: ca2 },
            ];
            let first_measures = affine::piece_measures_affine(coloring, &first_pts, n_vars)?;
            for (ib, &cb) in eligible.iter().enumerate() {
                for &cb2 in &eligible[ib..] {
                    let second_pts = vec![
                        PointSpec::Var { var: 2, cell: cb },
                        PointSpec::Var { var: 3, cell: cb2 },
                    ];
                    let second_measures =
                        affine::piece_measures_affine(coloring, &second_pts, n_vars)?;
                    attempts += 1;
                    if let Some(pair) = try_interval_pattern(
                        coloring,
                        window,
                        sigma,
                        &first_pts,
                        &second_pts,
                        &first_measures[0],
                        &second_measures[0],
                    )? {
                        return Ok(EqualCubes::Found(pair));
                    }
                }
            }
        }
    }
    Ok(EqualCubes::NotFound { exhaustive: true, attempts })
}

fn try_interval_pattern(
    coloring: &GridColoring,
    window: &Cuboid,
    sigma: &Rat,
    first_pts: &[PointSpec],
    second_pts: &[PointSpec],
    first_measures: &[affine::AffineForm],
    second_measures: &[affine::AffineForm],
) -> Result<Option<EqualCubePair>> {
    let n_vars = 4;
    let zero = Rat::zero();
    let mut base = Vec::new();
    for pts in [first_pts, second_pts] {
        base.extend(affine::pattern_constraints(coloring, pts, n_vars, &zero));
    }
    // Window bounds on all four endpoints.
    for var in 0..4 {
        let f = affine::AffineForm::var(n_vars, var);
        base.push(f.ge(&window.lo[0]));
        base.push(f.le(&window.hi[0]));
    }
    // Equal measures per color. The interval-bound prefilter mirrors the
    // 1-D splitting search.
    let var_bounds: Vec<(Rat, Rat)> = {
        let mut all = first_pts.to_vec();
        all.extend_from_slice(second_pts);
        affine::var_cell_bounds(coloring, &all, n_vars)
    };
    let mut diffs = Vec::new();
    for (fa, fb) in first_measures.iter().zip(second_measures) {
        let diff = fa.sub(fb);
        let (lo, hi) = diff.range(&var_bounds);
        if lo.is_positive() || hi.is_negative() {
            return Ok(None);
        }
        diffs.push(diff);
    }
    for diff in &diffs {
        base.push(diff.eq_zero());
    }

    let a = affine::AffineForm::var(n_vars, 0);
    let a2 = affine::AffineForm::var(n_vars, 1);
    let b = affine::AffineForm::var(n_vars, 2);
    let b2 = affine::AffineForm::var(n_vars, 3);
    // Separation cases: a sigma-interval inside [a, A] \ [b, B]. Either the
    // left spare part [a, min(A, b)] or the right spare part [max(a, B), A]
    // is long enough; resolve each min/max by an explicit case constraint.
    let cases: [(affine::AffineForm, affine::AffineForm); 4] = [
        // b >= A: the whole first interval is spare.
        (a2.sub(&a), b.sub(&a2)),
        // b <= A: left spare [a, b].
        (b.sub(&a), a2.sub(&b)),
        // B <= a: whole interval spare.
        (a2.sub(&a), a.sub(&b2)),
        // B >= a: right spare [B, A].
        (a2.sub(&b2), b2.sub(&a)),
    ];
    for (spare, case_guard) in cases {
        let mut cons = base.clone();
        cons.push(spare.ge(sigma));
        cons.push(case_guard.ge(&Rat::zero()));
        if let Some(point) = linprog::feasible_point(n_vars, &cons) {
            let pair = pair_from_point(coloring, &point)?;
            if verify_pair(coloring, &pair, sigma)? {
                return Ok(Some(pair));
            }
        }
    }
    Ok(None)
}

fn pair_from_point(coloring: &GridColoring, point: &[Rat]) -> Result<EqualCubePair> {
    let first = NecklaceBox::new(vec![point[0].clone()], &point[1] - &point[0])?;
    let second = NecklaceBox::new(vec![point[2].clone()], &point[3] - &point[2])?;
    let measures = coloring.measure_vector(&first.to_cuboid())?;
    Ok(EqualCubePair { first, second, measures })
}

/// Numerical d >= 2 search: multistart least squares over the two cubes'
/// corners and sides, exact snap validation.
fn find_equal_cubes_md(
    coloring: &GridColoring,
    window: &Cuboid,
    sigma: &Rat,
    seed: MasterSeed,
) -> Result<EqualCubes> {
    let d = coloring.dim();
    let compiled = CompiledColoring::new(coloring);
    let wlo: Vec<f64> = window.lo.iter().map(Rat::to_f64).collect();
    let whi: Vec<f64> = window.hi.iter().map(Rat::to_f64).collect();
    let max_side: f64 = (0..d).map(|a| whi[a] - wlo[a]).fold(f64::INFINITY, f64::min);
    let sigma_f = sigma.to_f64();
    let attempts = 400usize;

    for attempt in 0..attempts {
        let mut rng = seed.stream("equal-cubes", attempt as u64);
        // Unknowns: corner_a (d), side_a, corner_b (d), side_b.
        let mut x = vec![0.0f64; 2 * d + 2];
        let init = |rng: &mut rand_chacha::ChaCha8Rng, lo: &[f64], hi: &[f64], s: f64| {
            let mut v = Vec::with_capacity(d + 1);
            for a in 0..d {
                v.push(lo[a] + (hi[a] - lo[a] - s) * rng.random::<f64>());
            }
            v.push(s);
            v
        };
        let sa = max_side * (0.2 + 0.5 * rng.random::<f64>());
        let sb = max_side * (0.2 + 0.5 * rng.random::<f64>());
        x[..d + 1].copy_from_slice(&init(&mut rng, &wlo, &whi, sa));
        x[d + 1..].copy_from_slice(&init(&mut rng, &wlo, &whi, sb));

        let residual = |x: &[f64]| -> Vec<f64> {
            let (alo, ahi): (Vec<f64>, Vec<f64>) =
                (x[..d].to_vec(), x[..d].iter().map(|v| v + x[d]).collect());
            let (blo, bhi): (Vec<f64>, Vec<f64>) = (
                x[d + 1..2 * d + 1].to_vec(),
                x[d + 1..2 * d + 1].iter().map(|v| v + x[2 * d + 1]).collect(),
            );
            let ma = compiled.measures(&alo, &ahi);
            let mb = compiled.measures(&blo, &bhi);
            ma.iter().zip(&mb).map(|(a, b)| a - b).collect()
        };
        let project = |x: &mut [f64]| {
            x[d] = x[d].clamp(sigma_f, max_side);
            x[2 * d + 1] = x[2 * d + 1].clamp(1e-6, max_side);
            for a in 0..d {
                x[a] = x[a].clamp(wlo[a], whi[a] - x[d]);
                x[d + 1 + a] = x[d + 1 + a].clamp(wlo[a], whi[a] - x[2 * d + 1]);
            }
        };
        project(&mut x);
        let mut r = residual(&x);
        let mut best = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut lambda = 1e-8;
        for _ in 0..80 {
            if best < 1e-13 {
                break;
            }
            let n = x.len();
            let m = r.len();
            let mut jac = vec![vec![0.0; n]; m];
            for v in 0..n {
                let h = 1e-6 * max_side.max(1.0);
                let mut xp = x.clone();
                xp[v] += h;
                let mut xm = x.clone();
                xm[v] -= h;
                let rp = residual(&xp);
                let rm = residual(&xm);
                for i in 0..m {
                    jac[i][v] = (rp[i] - rm[i]) / (2.0 * h);
                }
            }
            let mut jtj = vec![vec![0.0; n]; n];
            let mut jtr = vec![0.0; n];
            for i in 0..m {
                for p in 0..n {
                    jtr[p] += jac[i][p] * r[i];
                    for s in 0..n {
                        jtj[p][s] += jac[i][p] * jac[i][s];
                    }
                }
            }
            for p in 0..n {
                jtj[p][p] += lambda;
            }
            let Some(delta) = numeric::solve_dense(jtj, jtr.iter().map(|v| -v).collect()) else {
                break;
            };
            let mut cand: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
            project(&mut cand);
            let cr = residual(&cand);
            let cbest = cr.iter().fold(0.0f64, |mx, v| mx.max(v.abs()));
            if cbest < best {
                x = cand;
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
        if best < 1e-12 {
            // Snap and verify exactly.
            let snap = |v: f64| numeric::snap_to_rational(v, 1u64 << 48);
            let first = NecklaceBox::new(x[..d].iter().map(|&v| snap(v)).collect(), snap(x[d]))?;
            let second = NecklaceBox::new(
                x[d + 1..2 * d + 1].iter().map(|&v| snap(v)).collect(),
                snap(x[2 * d + 1]),
            )?;
            let fa = first.to_cuboid();
            let fb = second.to_cuboid();
            if window.contains_box(&fa) && window.contains_box(&fb) {
                let ma = coloring.measure_vector(&fa)?;
                let mb = coloring.measure_vector(&fb)?;
                if ma == mb && &cube_in_difference(&fa, &fb) >= sigma {
                    return Ok(EqualCubes::Found(EqualCubePair {
                        first,
                        second,
                        measures: ma,
                    }));
                }
            }
        }
    }
    Ok(EqualCubes::NotFound { exhaustive: false, attempts })
}

/// The distinguishing-color audit: how many colors guarantee a coloring that
/// distinguishes axis-aligned cubes (or cuboids), and the unknown/equation
/// ledger behind it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Cube,
    Cuboid,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistinguishAudit {
    pub d: usize,
    pub k: u32,
    pub shape: Shape,
    /// Unknowns of a cube pair: `2(d+1)`; of a cuboid pair: `4d`.
    pub pair_unknowns: u64,
    /// Equations: one per color.
    pub equations: u64,
    /// Colors needed for the guarantee: `2d+3` (cubes), `4d+1` (cuboids).
    pub required: u64,
    /// True iff a distinguishing coloring is guaranteed to exist.
    pub guaranteed: bool,
}

pub fn audit_distinguish(d: usize, k: u32, shape: Shape) -> DistinguishAudit {
    let required = match shape {
        Shape::Cube => 2 * d as u64 + 3,
        Shape::Cuboid => 4 * d as u64 + 1,
    };
    let pair_unknowns = match shape {
        Shape::Cube => 2 * (d as u64 + 1),
        Shape::Cuboid => 4 * d as u64,
    };
    DistinguishAudit {
        d,
        k,
        shape,
        pair_unknowns,
        equations: k as u64,
        required,
        guaranteed: k as u64 >= required,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ColorId;
    use crate::rat::rat;

    fn ab_coloring() -> GridColoring {
        GridColoring::from_runs_1d(
            Rat::zero(),
            &[(rat(1, 2), ColorId(1)), (rat(1, 2), ColorId(2))],
            2,
        )
        .unwrap()
    }

    #[test]
    fn two_intervals_inside_one_color() {
        let c = ab_coloring();
        let window = c.bounding();
        let out = find_equal_cubes(&c, &window, &rat(1, 8), MasterSeed(3)).unwrap();
        let pair = out.pair().expect("a 2-coloring never distinguishes intervals");
        assert!(verify_pair(&c, pair, &rat(1, 8)).unwrap());
        // Equal vectors force equal lengths on a fully colored domain.
        assert_eq!(pair.first.side, pair.second.side);
    }

    #[test]
    fn single_color_any_two_cubes() {
        let c = GridColoring::from_runs_1d(Rat::zero(), &[(Rat::one(), ColorId(1))], 1).unwrap();
        let out = find_equal_cubes(&c, &c.bounding(), &rat(1, 4), MasterSeed(3)).unwrap();
        let pair = out.pair().expect("k = 1 never distinguishes");
        assert!(verify_pair(&c, pair, &rat(1, 4)).unwrap());
    }

    #[test]
    fn known_pair_verifies() {
        // A on [0,1/2), B on [1/2,1]: [0,1/5] and [1/4,9/20] both measure
        // (1/5, 0).
        let c = ab_coloring();
        let pair = EqualCubePair {
            first: NecklaceBox::new(vec![rat(0, 1)], rat(1, 5)).unwrap(),
            second: NecklaceBox::new(vec![rat(1, 4)], rat(1, 5)).unwrap(),
            measures: vec![rat(1, 5), rat(0, 1)],
        };
        assert!(verify_pair(&c, &pair, &rat(1, 8)).unwrap());
    }

    #[test]
    fn cube_in_difference_cases() {
        let a = Cuboid::new(vec![rat(0, 1); 2], vec![rat(1, 1); 2]).unwrap();
        // Disjoint: the whole cube is spare.
        let b = Cuboid::new(vec![rat(2, 1); 2], vec![rat(3, 1); 2]).unwrap();
        assert_eq!(cube_in_difference(&a, &b), rat(1, 1));
        // Overlapping half: a 1/2-wide slab remains.
        let b = Cuboid::new(vec![rat(1, 2), rat(0, 1)], vec![rat(2, 1), rat(1, 1)]).unwrap();
        assert_eq!(cube_in_difference(&a, &b), rat(1, 2));
        // b covers a: nothing remains.
        let b = Cuboid::new(vec![rat(-1, 1); 2], vec![rat(2, 1); 2]).unwrap();
        assert_eq!(cube_in_difference(&a, &b), rat(0, 1));
    }

    #[test]
    fn audit_thresholds() {
        assert!(audit_distinguish(1, 5, Shape::Cube).guaranteed);
        assert!(!audit_distinguish(1, 4, Shape::Cube).guaranteed);
        assert!(audit_distinguish(2, 7, Shape::Cube).guaranteed);
        assert!(!audit_distinguish(2, 6, Shape::Cube).guaranteed);
        assert!(audit_distinguish(2, 9, Shape::Cuboid).guaranteed);
        assert!(!audit_distinguish(2, 8, Shape::Cuboid).guaranteed);
        let a = audit_distinguish(2, 7, Shape::Cube);
        assert_eq!(a.pair_unknowns, 6);
    }

    #[test]
    fn md_search_on_two_colors() {
        // Vertical half split of the unit square: plenty of equal pairs.
        let bp = vec![
            vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1)],
        ];
        let c = GridColoring::new(bp, vec![ColorId(1), ColorId(2)], 2).unwrap();
        let out = find_equal_cubes(&c, &c.bounding(), &rat(1, 16), MasterSeed(5)).unwrap();
        if let Some(pair) = out.pair() {
            assert!(verify_pair(&c, pair, &rat(1, 16)).unwrap());
        }
    }
}
