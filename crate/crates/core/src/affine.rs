//! Affine forms over the unknowns of a 1-D cut pattern.
//!
//! Once every variable point (cut or interval endpoint) is assigned to a grid
//! cell, the amount of each color inside each piece is an affine function of
//! the points. These forms feed the exact LP solver, and their interval
//! ranges give a cheap sound prefilter that refutes most patterns without
//! running the simplex.

use crate::error::{Error, Result};
use crate::linprog::{Constraint, Rel};
use crate::model::GridColoring;
use crate::rat::Rat;

/// `constant + coeffs . x` over a fixed number of unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct AffineForm {
    pub constant: Rat,
    pub coeffs: Vec<Rat>,
}

impl AffineForm {
    pub fn zero(n_vars: usize) -> Self {
        AffineForm { constant: Rat::zero(), coeffs: vec![Rat::zero(); n_vars] }
    }

    pub fn constant(n_vars: usize, c: Rat) -> Self {
        AffineForm { constant: c, coeffs: vec![Rat::zero(); n_vars] }
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut f = Self::zero(n_vars);
        f.coeffs[i] = Rat::one();
        f
    }

    pub fn add_assign(&mut self, other: &AffineForm) {
        self.constant += &other.constant;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn sub(&self, other: &AffineForm) -> AffineForm {
        AffineForm {
            constant: &self.constant - &other.constant,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    #[cfg(test)]
    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut out = self.constant.clone();
        for (c, v) in self.coeffs.iter().zip(x) {
            out += c * v;
        }
        out
    }

    /// Range of the form when each variable moves freely in its own interval.
    pub fn range(&self, var_bounds: &[(Rat, Rat)]) -> (Rat, Rat) {
        let mut lo = self.constant.clone();
        let mut hi = self.constant.clone();
        for (c, (blo, bhi)) in self.coeffs.iter().zip(var_bounds) {
            if c.is_positive() {
                lo += c * blo;
                hi += c * bhi;
            } else if c.is_negative() {
                lo += c * bhi;
                hi += c * blo;
            }
        }
        (lo, hi)
    }

    /// Constraint `self = 0`.
    pub fn eq_zero(&self) -> Constraint {
        Constraint::new(self.coeffs.clone(), Rel::Eq, -&self.constant)
    }

    /// Constraint `self >= rhs`.
    pub fn ge(&self, rhs: &Rat) -> Constraint {
        Constraint::new(self.coeffs.clone(), Rel::Ge, rhs - &self.constant)
    }

    /// Constraint `self <= rhs`.
    pub fn le(&self, rhs: &Rat) -> Constraint {
        Constraint::new(self.coeffs.clone(), Rel::Le, rhs - &self.constant)
    }
}

/// A boundary point of a 1-D pattern: either a fixed coordinate or an
/// unknown confined to a grid cell.
#[derive(Clone, Debug)]
pub(crate) enum PointSpec {
    Const(Rat),
    Var { var: usize, cell: usize },
}

impl PointSpec {
    pub fn form(&self, n_vars: usize) -> AffineForm {
        match self {
            PointSpec::Const(c) => AffineForm::constant(n_vars, c.clone()),
            PointSpec::Var { var, .. } => AffineForm::var(n_vars, *var),
        }
    }
}

/// Index of a cell whose closed interval contains `x` (the leftmost one).
pub(crate) fn cell_of(coloring: &GridColoring, x: &Rat) -> Result<usize> {
    let bp = &coloring.breakpoints()[0];
    if x < &bp[0] || x > bp.last().unwrap() {
        return Err(Error::Domain(format!("coordinate {x} outside grid")));
    }
    // leftmost cell with bp[i] <= x <= bp[i+1]
    let i = match bp.binary_search(x) {
        Ok(i) => i.min(bp.len() - 2),
        Err(i) => i - 1,
    };
    Ok(if i > 0 && &bp[i] == x { i - 1 } else { i })
}

fn spec_cell(coloring: &GridColoring, spec: &PointSpec) -> Result<usize> {
    match spec {
        PointSpec::Const(c) => cell_of(coloring, c),
        PointSpec::Var { cell, .. } => Ok(*cell),
    }
}

/// Per-piece per-color measures as affine forms, for consecutive point pairs.
///
/// Requires a 1-D coloring and nondecreasing cell assignments.
pub(crate) fn piece_measures_affine(
    coloring: &GridColoring,
    points: &[PointSpec],
    n_vars: usize,
) -> Result<Vec<Vec<AffineForm>>> {
    if coloring.dim() != 1 {
        return Err(Error::Input("affine piece measures need a 1-D coloring".into()));
    }
    let bp = &coloring.breakpoints()[0];
    let k = coloring.k() as usize;
    let mut out = Vec::with_capacity(points.len().saturating_sub(1));
    for w in points.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let clo = spec_cell(coloring, lo)?;
        let chi = spec_cell(coloring, hi)?;
        if clo > chi {
            return Err(Error::Pattern("cell assignments must be nondecreasing".into()));
        }
        let mut forms = vec![AffineForm::zero(n_vars); k];
        let lo_form = lo.form(n_vars);
        let hi_form = hi.form(n_vars);
        let color =
            |cell: usize| coloring.cell_color(&[cell]).index();
        if clo == chi {
            forms[color(clo)] = hi_form.sub(&lo_form);
        } else {
            // partial left cell: bp[clo + 1] - lo
            let left = AffineForm::constant(n_vars, bp[clo + 1].clone()).sub(&lo_form);
            forms[color(clo)].add_assign(&left);
            // full interior cells
            for c in clo + 1..chi {
                let width = &bp[c + 1] - &bp[c];
                forms[color(c)].add_assign(&AffineForm::constant(n_vars, width));
            }
            // partial right cell: hi - bp[chi]
            let right = hi_form.sub(&AffineForm::constant(n_vars, bp[chi].clone()));
            forms[color(chi)].add_assign(&right);
        }
        out.push(forms);
    }
    Ok(out)
}

/// Per-variable closed bounds induced by the cell assignments.
pub(crate) fn var_cell_bounds(
    coloring: &GridColoring,
    points: &[PointSpec],
    n_vars: usize,
) -> Vec<(Rat, Rat)> {
    let bp = &coloring.breakpoints()[0];
    let mut bounds = vec![(Rat::zero(), Rat::zero()); n_vars];
    for p in points {
        if let PointSpec::Var { var, cell } = p {
            bounds[*var] = (bp[*cell].clone(), bp[*cell + 1].clone());
        }
    }
    bounds
}

/// Constraints tying each variable into its assigned cell, ordering
/// consecutive points, and enforcing a minimum gap (granularity).
pub(crate) fn pattern_constraints(
    coloring: &GridColoring,
    points: &[PointSpec],
    n_vars: usize,
    min_gap: &Rat,
) -> Vec<Constraint> {
    let bp = &coloring.breakpoints()[0];
    let mut cons = Vec::new();
    for p in points {
        if let PointSpec::Var { var, cell } = p {
            let f = AffineForm::var(n_vars, *var);
            cons.push(f.ge(&bp[*cell]));
            cons.push(f.le(&bp[*cell + 1]));
        }
    }
    for w in points.windows(2) {
        let gap = w[1].form(n_vars).sub(&w[0].form(n_vars));
        cons.push(gap.ge(min_gap));
    }
    cons
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ColorId;
    use crate::rat::rat;

    fn coloring() -> GridColoring {
        GridColoring::from_runs_1d(
            Rat::zero(),
            &[(rat(1, 2), ColorId(1)), (rat(1, 2), ColorId(2))],
            2,
        )
        .unwrap()
    }

    #[test]
    fn cell_lookup() {
        let c = coloring();
        assert_eq!(cell_of(&c, &rat(1, 4)).unwrap(), 0);
        assert_eq!(cell_of(&c, &rat(3, 4)).unwrap(), 1);
        // boundary points resolve to the leftmost containing cell
        assert_eq!(cell_of(&c, &rat(1, 2)).unwrap(), 0);
        assert_eq!(cell_of(&c, &rat(0, 1)).unwrap(), 0);
        assert_eq!(cell_of(&c, &rat(1, 1)).unwrap(), 1);
        assert!(cell_of(&c, &rat(2, 1)).is_err());
    }

    #[test]
    fn forms_evaluate_to_exact_measures() {
        let c = coloring();
        // piece [x, 3/4] with x in cell 0: color A gets 1/2 - x, B gets 1/4
        let points = vec![
            PointSpec::Var { var: 0, cell: 0 },
            PointSpec::Const(rat(3, 4)),
        ];
        let forms = piece_measures_affine(&c, &points, 1).unwrap();
        let at = vec![rat(1, 8)];
        assert_eq!(forms[0][0].eval(&at), rat(3, 8));
        assert_eq!(forms[0][1].eval(&at), rat(1, 4));
    }

    #[test]
    fn range_is_sound() {
        let c = coloring();
        let points = vec![
            PointSpec::Const(rat(0, 1)),
            PointSpec::Var { var: 0, cell: 0 },
        ];
        let forms = piece_measures_affine(&c, &points, 1).unwrap();
        let bounds = var_cell_bounds(&c, &points, 1);
        let (lo, hi) = forms[0][0].range(&bounds);
        assert_eq!((lo, hi), (rat(0, 1), rat(1, 2)));
    }
}
