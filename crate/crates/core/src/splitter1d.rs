//! Exact fair-splitting solvers for one-dimensional necklaces.
//!
//! The discrete solver is a brute-force minimum-cut oracle: it tries every
//! cut-slot subset and every canonical piece labeling, smallest cut count
//! first, with branch-and-bound pruning on partial color sums. The continuous
//! solver enumerates cut patterns (cell assignments) and settles each one by
//! an exact rational linear feasibility problem, so its "infeasible" answer
//! is an exhaustive certificate, not a search failure.
//!
//! Discrete witnesses use the lattice frame: beads sit at integer points, the
//! box is `[1/2, len + 1/2]`, and a cut after bead `i` has coordinate
//! `i + 1/2`.

use crate::affine::{self, AffineForm, PointSpec};
use crate::error::{Error, Result};
use crate::linprog::{self, Constraint};
use crate::model::{AxisCut, Cuboid, DiscreteNecklace, GridColoring, Splitting};
use crate::rat::{rat, Rat};
use crate::seed::fnv1a;
use serde::{Deserialize, Serialize};

/// Cell indices containing each of the `t` cuts of a 1-D pattern, in
/// nondecreasing order. Within one pattern the color amounts of every piece
/// are affine in the cut coordinates, so each pattern reduces to an exact
/// linear feasibility problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutPattern1D {
    pub cells: Vec<usize>,
}

impl CutPattern1D {
    pub fn new(cells: Vec<usize>) -> Self {
        CutPattern1D { cells }
    }
}

/// Result of an exhaustive minimum-cut search.
#[derive(Clone, Debug)]
pub enum DiscreteSearch {
    Found { t_min: usize, witness: Splitting },
    NoneWithin { t_cap: usize },
}

impl DiscreteSearch {
    pub fn witness(&self) -> Option<&Splitting> {
        match self {
            DiscreteSearch::Found { witness, .. } => Some(witness),
            DiscreteSearch::NoneWithin { .. } => None,
        }
    }

    pub fn t_min(&self) -> Option<usize> {
        match self {
            DiscreteSearch::Found { t_min, .. } => Some(*t_min),
            DiscreteSearch::NoneWithin { .. } => None,
        }
    }
}

/// How one pattern/labeling combination was refuted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefutationKind {
    /// Interval-bound relaxation already empty (a strictly weaker system is
    /// exactly infeasible, so the full one is too).
    IntervalBound,
    /// The full linear system is exactly infeasible (simplex certificate).
    LinearSystem,
}

/// One refuted pattern/labeling combination of an exhaustive search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RefutedPattern {
    /// Cell assignment of interval endpoints, when they were unknowns.
    pub endpoint_cells: Option<(usize, usize)>,
    pub pattern: CutPattern1D,
    pub labeling: Vec<u32>,
    pub refutation: RefutationKind,
    /// FNV-1a hash of the canonical serialization of the refuted system.
    pub system_hash: u64,
}

/// An exhaustive infeasibility certificate: every combinatorial pattern,
/// refuted by an exact infeasible linear system (or a sound relaxation).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct InfeasibilityCertificate {
    pub systems_refuted: u64,
    pub refuted: Vec<RefutedPattern>,
}

/// Outcome of the exact continuous 1-D solver.
#[derive(Clone, Debug)]
pub enum Continuous1d {
    Feasible(Splitting),
    Infeasible(InfeasibilityCertificate),
}

impl Continuous1d {
    pub fn witness(&self) -> Option<&Splitting> {
        match self {
            Continuous1d::Feasible(w) => Some(w),
            Continuous1d::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Continuous1d::Feasible(_))
    }
}

/// Smallest `t <= t_cap` for which the 1-D discrete necklace has a fair
/// q-splitting with `t` cuts, with a witness; or `NoneWithin`.
///
/// Deterministic tie-breaking: lexicographically least cut slot set, then
/// least canonical labeling.
pub fn min_cuts_discrete_1d(n: &DiscreteNecklace, t_cap: usize) -> Result<DiscreteSearch> {
    if n.dim() != 1 {
        return Err(Error::Input("min_cuts_discrete_1d needs a 1-D necklace".into()));
    }
    let len = n.len();
    let q = n.q() as usize;
    let k = n.k() as usize;
    let colors: Vec<usize> = n.cells().iter().map(|c| c.index()).collect();
    // prefix[i][j] = beads of color j among the first i beads
    let mut prefix: Vec<Vec<u32>> = Vec::with_capacity(len + 1);
    prefix.push(vec![0u32; k]);
    for &c in &colors {
        let mut next = prefix.last().unwrap().clone();
        next[c] += 1;
        prefix.push(next);
    }
    let targets: Vec<u32> = prefix[len].iter().map(|&c| c / q as u32).collect();

    // Distinct slots suffice: duplicate cut positions only create zero-size
    // pieces, so anything feasible with duplicates is feasible earlier.
    for t in 0..=t_cap.min(len.saturating_sub(1)) {
        let mut slots = vec![0usize; t];
        if let Some((cuts, labels)) =
            search_slots(&prefix, &targets, len, q, t, &mut slots, 0, 1)
        {
            let witness = lattice_witness(len, q as u32, &cuts, &labels)?;
            return Ok(DiscreteSearch::Found { t_min: t, witness });
        }
    }
    Ok(DiscreteSearch::NoneWithin { t_cap })
}

/// Fair splitting with at most `k(q-1)` cuts (smallest possible cut count,
/// deterministic witness). Always succeeds on valid instances.
pub fn solve_discrete_1d(n: &DiscreteNecklace) -> Result<Splitting> {
    let cap = (n.k() as usize) * (n.q() as usize - 1);
    match min_cuts_discrete_1d(n, cap)? {
        DiscreteSearch::Found { witness, .. } => Ok(witness),
        DiscreteSearch::NoneWithin { .. } => Err(Error::Input(
            "no fair splitting within the k(q-1) cap; instance violates divisibility".into(),
        )),
    }
}

/// Recursive enumeration of cut slots `1..len` (cut after bead `slot`),
/// lexicographic; inside each slot set, canonical labelings are searched
/// with partial-sum pruning.
fn search_slots(
    prefix: &[Vec<u32>],
    targets: &[u32],
    len: usize,
    q: usize,
    t: usize,
    slots: &mut Vec<usize>,
    depth: usize,
    start: usize,
) -> Option<(Vec<usize>, Vec<u32>)> {
    if depth == t {
        let boundaries: Vec<usize> = std::iter::once(0)
            .chain(slots.iter().copied())
            .chain(std::iter::once(len))
            .collect();
        let pieces: Vec<Vec<u32>> = boundaries
            .windows(2)
            .map(|w| {
                prefix[w[1]]
                    .iter()
                    .zip(&prefix[w[0]])
                    .map(|(b, a)| b - a)
                    .collect()
            })
            .collect();
        let mut labels = Vec::with_capacity(pieces.len());
        let mut sums = vec![vec![0u32; targets.len()]; q];
        if assign_labels(&pieces, targets, q, 0, 0, &mut labels, &mut sums) {
            return Some((slots.clone(), labels));
        }
        return None;
    }
    for s in start..len {
        if len - s < t - depth {
            break;
        }
        slots[depth] = s;
        if let Some(found) = search_slots(prefix, targets, len, q, t, slots, depth + 1, s + 1) {
            return Some(found);
        }
    }
    None
}

/// Depth-first canonical labeling search (restricted growth strings), pruned
/// by partial color sums. Because all parts must hit the same target and the
/// totals add up, "every partial sum <= target" at the end implies equality.
pub(crate) fn assign_labels(
    pieces: &[Vec<u32>],
    targets: &[u32],
    q: usize,
    piece: usize,
    max_used: usize,
    labels: &mut Vec<u32>,
    sums: &mut Vec<Vec<u32>>,
) -> bool {
    if piece == pieces.len() {
        return true;
    }
    // Canonical form: a new label may only be the next unused one.
    let limit = (max_used + 1).min(q - 1);
    for label in 0..=limit {
        let ok = pieces[piece]
            .iter()
            .zip(sums[label].iter())
            .zip(targets)
            .all(|((p, s), t)| p + s <= *t);
        if !ok {
            continue;
        }
        for (s, p) in sums[label].iter_mut().zip(&pieces[piece]) {
            *s += p;
        }
        labels.push(label as u32);
        if assign_labels(pieces, targets, q, piece + 1, max_used.max(label), labels, sums) {
            return true;
        }
        labels.pop();
        for (s, p) in sums[label].iter_mut().zip(&pieces[piece]) {
            *s -= p;
        }
    }
    false
}

/// Builds the lattice-frame witness: box `[1/2, len + 1/2]`, cut after bead
/// `slot` at coordinate `slot + 1/2`.
fn lattice_witness(len: usize, q: u32, slots: &[usize], labels: &[u32]) -> Result<Splitting> {
    let region = Cuboid::new(vec![rat(1, 2)], vec![rat(2 * len as i64 + 1, 2)])?;
    let cuts = slots
        .iter()
        .map(|&s| AxisCut::new(0, rat(2 * s as i64 + 1, 2)))
        .collect();
    Splitting::new(region, cuts, labels.to_vec(), q)
}

/// Exact continuous 1-D solver: fair q-splitting of `[box_lo, box_hi]` under
/// `coloring` using exactly `t` cuts with granularity at least `gamma`.
///
/// Enumerates every cut pattern (assignment of cuts to grid cells) and every
/// canonical labeling; each combination is an exact linear feasibility
/// problem. Returns a rational witness or an exhaustive infeasibility
/// certificate.
pub fn solve_continuous_1d(
    coloring: &GridColoring,
    box_lo: &Rat,
    box_hi: &Rat,
    q: u32,
    t: usize,
    gamma: &Rat,
) -> Result<Continuous1d> {
    if coloring.dim() != 1 {
        return Err(Error::Input("solve_continuous_1d needs a 1-D coloring".into()));
    }
    if q < 2 {
        return Err(Error::Input("need q >= 2".into()));
    }
    let bounds = coloring.bounding();
    if box_lo < &bounds.lo[0] || box_hi > &bounds.hi[0] || box_lo >= box_hi {
        return Err(Error::Domain("box outside coloring domain".into()));
    }
    if gamma.is_negative() {
        return Err(Error::Input("granularity must be nonnegative".into()));
    }

    let bp = &coloring.breakpoints()[0];
    let eligible: Vec<usize> = (0..bp.len() - 1)
        .filter(|&c| &bp[c] <= box_hi && &bp[c + 1] >= box_lo)
        .collect();

    let mut cert = InfeasibilityCertificate::default();
    let mut pattern = vec![0usize; t];
    let outcome = enumerate_patterns(&eligible, t, &mut pattern, 0, 0, &mut |cells| {
        let mut points = Vec::with_capacity(t + 2);
        points.push(PointSpec::Const(box_lo.clone()));
        for (i, &c) in cells.iter().enumerate() {
            points.push(PointSpec::Var { var: i, cell: c });
        }
        points.push(PointSpec::Const(box_hi.clone()));
        try_pattern(coloring, &points, t, q, gamma, &[], None, cells, &mut cert)
    })?;

    match outcome {
        Some(witness) => Ok(Continuous1d::Feasible(witness)),
        None => Ok(Continuous1d::Infeasible(cert)),
    }
}

/// Enumerates nondecreasing assignments of `t` cuts to eligible cells.
fn enumerate_patterns(
    eligible: &[usize],
    t: usize,
    buf: &mut Vec<usize>,
    depth: usize,
    start: usize,
    f: &mut impl FnMut(&[usize]) -> Result<Option<Splitting>>,
) -> Result<Option<Splitting>> {
    if depth == t {
        return f(buf);
    }
    for i in start..eligible.len() {
        buf[depth] = eligible[i];
        if let Some(found) = enumerate_patterns(eligible, t, buf, depth + 1, i, f)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Tries every canonical labeling of one cut pattern; returns the witness of
/// the first exactly feasible system. Every refuted system is recorded.
#[allow(clippy::too_many_arguments)]
pub(crate) fn try_pattern(
    coloring: &GridColoring,
    points: &[PointSpec],
    n_vars: usize,
    q: u32,
    gamma: &Rat,
    extra_cons: &[Constraint],
    endpoint_cells: Option<(usize, usize)>,
    cut_cells: &[usize],
    cert: &mut InfeasibilityCertificate,
) -> Result<Option<Splitting>> {
    let piece_forms = affine::piece_measures_affine(coloring, points, n_vars)?;
    let var_bounds = affine::var_cell_bounds(coloring, points, n_vars);
    let mut base_cons = affine::pattern_constraints(coloring, points, n_vars, gamma);
    base_cons.extend_from_slice(extra_cons);
    let pieces = piece_forms.len();

    // Canonical labelings: restricted growth strings starting at part 0.
    let mut labels: Vec<u32> = vec![0];
    enumerate_rgs(pieces, q, &mut labels, 0, &mut |labels| {
        try_labeling(
            coloring,
            points,
            n_vars,
            q,
            &piece_forms,
            &var_bounds,
            &base_cons,
            labels,
            endpoint_cells,
            cut_cells,
            cert,
        )
    })
}

/// Enumerates restricted growth strings of the given length in lexicographic
/// order; the buffer must be seeded with the leading `0`.
pub(crate) fn enumerate_rgs(
    len: usize,
    q: u32,
    buf: &mut Vec<u32>,
    max_used: u32,
    f: &mut impl FnMut(&[u32]) -> Result<Option<Splitting>>,
) -> Result<Option<Splitting>> {
    if buf.len() == len {
        return f(buf);
    }
    let limit = (max_used + 1).min(q - 1);
    for label in 0..=limit {
        buf.push(label);
        if let Some(w) = enumerate_rgs(len, q, buf, max_used.max(label), f)? {
            return Ok(Some(w));
        }
        buf.pop();
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn try_labeling(
    coloring: &GridColoring,
    points: &[PointSpec],
    n_vars: usize,
    q: u32,
    piece_forms: &[Vec<AffineForm>],
    var_bounds: &[(Rat, Rat)],
    base_cons: &[Constraint],
    labels: &[u32],
    endpoint_cells: Option<(usize, usize)>,
    cut_cells: &[usize],
    cert: &mut InfeasibilityCertificate,
) -> Result<Option<Splitting>> {
    let k = coloring.k() as usize;
    // Part measure forms.
    let mut parts: Vec<Vec<AffineForm>> = vec![vec![AffineForm::zero(n_vars); k]; q as usize];
    for (forms, &label) in piece_forms.iter().zip(labels) {
        for (acc, f) in parts[label as usize].iter_mut().zip(forms) {
            acc.add_assign(f);
        }
    }
    // Fairness equations: part l equals part 0, every color.
    let mut fairness = Vec::with_capacity((q as usize - 1) * k);
    for l in 1..q as usize {
        for j in 0..k {
            fairness.push(parts[l][j].sub(&parts[0][j]));
        }
    }
    let record = |cert: &mut InfeasibilityCertificate, kind: RefutationKind| {
        let hash = system_hash(base_cons, &fairness);
        cert.systems_refuted += 1;
        cert.refuted.push(RefutedPattern {
            endpoint_cells,
            pattern: CutPattern1D::new(cut_cells.to_vec()),
            labeling: labels.to_vec(),
            refutation: kind,
            system_hash: hash,
        });
    };
    // Interval-bound prefilter: each difference must be able to reach zero.
    for diff in &fairness {
        let (lo, hi) = diff.range(var_bounds);
        if lo.is_positive() || hi.is_negative() {
            record(cert, RefutationKind::IntervalBound);
            return Ok(None);
        }
    }
    let mut cons = base_cons.to_vec();
    for diff in &fairness {
        cons.push(diff.eq_zero());
    }
    match linprog::feasible_point(n_vars, &cons) {
        Some(point) => {
            let witness = witness_from_point(coloring, points, labels, q, &point)?;
            Ok(Some(witness))
        }
        None => {
            record(cert, RefutationKind::LinearSystem);
            Ok(None)
        }
    }
}

/// Canonical hash of a linear system, stable across runs.
fn system_hash(cons: &[Constraint], fairness: &[AffineForm]) -> u64 {
    let mut text = String::new();
    for c in cons {
        text.push_str(&format!("{:?}|{:?}|{};", c.coeffs, c.rel, c.rhs));
    }
    for f in fairness {
        text.push_str(&format!("{:?}|{}=0;", f.coeffs, f.constant));
    }
    fnv1a(text.as_bytes())
}

/// Rebuilds the exact linear system of a refuted pattern and renders it as
/// human-readable constraint lines (verbose certificate mode).
///
/// Entries with endpoint cells use unknown endpoints confined to the given
/// window; entries without them need the fixed box the search ran over.
pub fn render_refuted_system(
    coloring: &GridColoring,
    entry: &RefutedPattern,
    q: u32,
    gamma: &Rat,
    fixed_box: Option<(&Rat, &Rat)>,
    window: Option<(&Rat, &Rat)>,
) -> Result<Vec<String>> {
    let mut points = Vec::new();
    let n_vars;
    match (entry.endpoint_cells, fixed_box) {
        (Some((cl, cr)), _) => {
            n_vars = entry.pattern.cells.len() + 2;
            points.push(PointSpec::Var { var: 0, cell: cl });
            for (i, &c) in entry.pattern.cells.iter().enumerate() {
                points.push(PointSpec::Var { var: i + 1, cell: c });
            }
            points.push(PointSpec::Var { var: n_vars - 1, cell: cr });
        }
        (None, Some((lo, hi))) => {
            n_vars = entry.pattern.cells.len();
            points.push(PointSpec::Const(lo.clone()));
            for (i, &c) in entry.pattern.cells.iter().enumerate() {
                points.push(PointSpec::Var { var: i, cell: c });
            }
            points.push(PointSpec::Const(hi.clone()));
        }
        (None, None) => {
            return Err(Error::Input("entry needs either endpoints or a fixed box".into()));
        }
    }
    let piece_forms = affine::piece_measures_affine(coloring, &points, n_vars)?;
    let mut cons = affine::pattern_constraints(coloring, &points, n_vars, gamma);
    if let (Some((wlo, whi)), Some(_)) = (window, entry.endpoint_cells) {
        let first = points[0].form(n_vars);
        let last = points[points.len() - 1].form(n_vars);
        cons.push(first.ge(wlo));
        cons.push(last.le(whi));
    }
    let k = coloring.k() as usize;
    let mut parts: Vec<Vec<AffineForm>> = vec![vec![AffineForm::zero(n_vars); k]; q as usize];
    for (forms, &label) in piece_forms.iter().zip(&entry.labeling) {
        for (acc, f) in parts[label as usize].iter_mut().zip(forms) {
            acc.add_assign(f);
        }
    }
    for l in 1..q as usize {
        for j in 0..k {
            cons.push(parts[l][j].sub(&parts[0][j]).eq_zero());
        }
    }
    Ok(cons.iter().map(render_constraint).collect())
}

fn render_constraint(c: &Constraint) -> String {
    let mut terms = Vec::new();
    for (i, a) in c.coeffs.iter().enumerate() {
        if !a.is_zero() {
            terms.push(format!("{a}*x{i}"));
        }
    }
    let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
    let rel = match c.rel {
        crate::linprog::Rel::Le => "<=",
        crate::linprog::Rel::Ge => ">=",
        crate::linprog::Rel::Eq => "=",
    };
    format!("{lhs} {rel} {}", c.rhs)
}

fn witness_from_point(
    coloring: &GridColoring,
    points: &[PointSpec],
    labels: &[u32],
    q: u32,
    point: &[Rat],
) -> Result<Splitting> {
    let resolve = |spec: &PointSpec| match spec {
        PointSpec::Const(c) => c.clone(),
        PointSpec::Var { var, .. } => point[*var].clone(),
    };
    let lo = resolve(&points[0]);
    let hi = resolve(points.last().unwrap());
    let cuts: Vec<AxisCut> = points[1..points.len() - 1]
        .iter()
        .map(|p| AxisCut::new(0, resolve(p)))
        .collect();
    let region = Cuboid::new(vec![lo], vec![hi])?;
    let witness = Splitting::new(region, cuts, labels.to_vec(), q)?;
    // Exact revalidation: any reported witness must pass is_fair.
    let pm = crate::model::part_measures(coloring, &witness)?;
    if !pm.is_fair() {
        return Err(Error::Pattern("LP point failed exact fairness revalidation".into()));
    }
    Ok(witness)
}
