//! Command implementations and artifact plumbing.

use crate::{Command, Common, CutsArg, Format, ShapeArg, TargetArg};
use necklace_core::adversary::{
    self, AdversaryParams, AuditTarget, Certify1d, CutFamily, ProbeBudget,
};
use necklace_core::discrete_bounds;
use necklace_core::distinguish::{self, EqualCubes, Shape};
use necklace_core::format::Document;
use necklace_core::seed::MasterSeed;
use necklace_core::splitter1d::{self, Continuous1d, DiscreteSearch, RefutedPattern};
use necklace_core::splittermd::{self, MdBudget};
use necklace_core::{
    discrete_to_grid, granularity_axis, part_measures, DiscreteNecklace, GridColoring, Rat,
    Splitting,
};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Display;
use std::path::{Path, PathBuf};


/// Writes to stdout, exiting quietly if the reader has gone away
/// (e.g. the output is piped into `head`).
fn say(text: std::fmt::Arguments) {
    use std::io::Write;
    let mut out = std::io::stdout();
    if out.write_fmt(text).is_err() || out.write_all(b"\n").is_err() {
        std::process::exit(0);
    }
}

macro_rules! say {
    ($($arg:tt)*) => { say(format_args!($($arg)*)) };
}

pub fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Solve1d { common, instance, q, t, gamma, box_lo, box_hi } => {
            solve_1d(common, instance, q, t, gamma, box_lo, box_hi)
        }
        Command::SolveMd {
            common,
            instance,
            q,
            t,
            gamma,
            budget_patterns,
            budget_seeds,
            budget_iters,
        } => solve_md(
            common,
            instance,
            q,
            t,
            gamma,
            MdBudget {
                max_patterns: budget_patterns,
                seeds_per_pattern: budget_seeds,
                max_iters: budget_iters,
            },
        ),
        Command::LiftSplit { common, instance } => lift_split(common, instance),
        Command::MinCuts { common, instance, q, t_cap, per_axis } => {
            min_cuts(common, instance, q, t_cap, per_axis)
        }
        Command::GenAdversary { common, d, k, q, t, n } => gen_adversary(common, d, k, q, t, n),
        Command::Certify1d { common, k, q, t, n, gamma, instance } => {
            certify_1d(common, k, q, t, n, gamma, instance)
        }
        Command::ProbeMd {
            common,
            instance,
            d,
            k,
            q,
            t,
            n,
            gamma,
            boxes,
            budget_patterns,
            budget_seeds,
            budget_iters,
        } => probe_md(
            common,
            instance,
            d,
            k,
            q,
            t,
            n,
            gamma,
            ProbeBudget {
                boxes,
                md: MdBudget {
                    max_patterns: budget_patterns,
                    seeds_per_pattern: budget_seeds,
                    max_iters: budget_iters,
                },
            },
        ),
        Command::AuditDof { common, d, k, q, t, cuts, target } => {
            audit_dof(common, d, k, q, t, cuts, target)
        }
        Command::Distinguish { common, instance, sigma, audit, d, k, shape } => {
            run_distinguish(common, instance, sigma, audit, d, k, shape)
        }
        Command::CountDiscrete { common, n, d, q, t, hard } => {
            count_discrete(common, n, d, q, t, hard)
        }
        Command::Bench { common } => bench(common),
    }
}

fn init_jobs(common: &Common) {
    if let Some(jobs) = common.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
}

fn fail(e: impl Display) -> String {
    e.to_string()
}

fn load_document(path: &Path) -> Result<Document, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Document::parse(&text).map_err(fail)
}

fn load_grid(path: &Path) -> Result<GridColoring, String> {
    load_document(path)?.into_grid().map_err(fail)
}

fn load_discrete(path: &Path) -> Result<DiscreteNecklace, String> {
    load_document(path)?.into_discrete().map_err(fail)
}

/// A flat table used for CSV output.
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn single(pairs: &[(&str, String)]) -> Table {
        Table {
            header: pairs.iter().map(|(k, _)| k.to_string()).collect(),
            rows: vec![pairs.iter().map(|(_, v)| v.clone()).collect()],
        }
    }

    fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes the artifact to `--out` (or stdout) in the selected format.
fn emit(common: &Common, artifact: &Value, table: Table) -> Result<(), String> {
    let payload = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string(artifact).map_err(fail)?;
            s.push('\n');
            s
        }
        Format::Csv => table.render(),
    };
    match &common.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            say!("{}", payload.trim_end_matches('\n'));
            Ok(())
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, String> {
    serde_json::to_value(v).map_err(fail)
}

/// Witness artifact, revalidated against the coloring before writing.
fn witness_artifact(coloring: &GridColoring, witness: &Splitting) -> Result<Value, String> {
    let pm = part_measures(coloring, witness).map_err(fail)?;
    if !pm.is_fair() {
        return Err("internal error: witness failed exact fairness revalidation".into());
    }
    Ok(json!({
        "witness": to_value(&Document::from_splitting(witness))?,
        "cuts": witness.num_cuts(),
        "granularity": granularity_axis(witness).to_string(),
        "fair": true,
    }))
}

fn solve_1d(
    common: Common,
    instance: PathBuf,
    q: u32,
    t: usize,
    gamma: Rat,
    box_lo: Option<Rat>,
    box_hi: Option<Rat>,
) -> Result<u8, String> {
    init_jobs(&common);
    let coloring = load_grid(&instance)?;
    let bounds = coloring.bounding();
    let lo = box_lo.unwrap_or_else(|| bounds.lo[0].clone());
    let hi = box_hi.unwrap_or_else(|| bounds.hi[0].clone());
    match splitter1d::solve_continuous_1d(&coloring, &lo, &hi, q, t, &gamma).map_err(fail)? {
        Continuous1d::Feasible(witness) => {
            let artifact = witness_artifact(&coloring, &witness)?;
            say!("feasible: {} cuts", witness.num_cuts());
            emit(
                &common,
                &artifact,
                Table::single(&[
                    ("status", "feasible".into()),
                    ("cuts", witness.num_cuts().to_string()),
                ]),
            )?;
            Ok(0)
        }
        Continuous1d::Infeasible(cert) => {
            let mut artifact = json!({
                "status": "infeasible",
                "systems_refuted": cert.systems_refuted,
                "refuted": to_value(&cert.refuted)?,
            });
            if common.verbose {
                artifact["systems"] =
                    rendered_systems(&coloring, &cert.refuted, q, &gamma, Some((&lo, &hi)), None)?;
            }
            say!("infeasible: {} systems refuted", cert.systems_refuted);
            emit(
                &common,
                &artifact,
                Table::single(&[
                    ("status", "infeasible".into()),
                    ("systems_refuted", cert.systems_refuted.to_string()),
                ]),
            )?;
            Ok(2)
        }
    }
}

fn rendered_systems(
    coloring: &GridColoring,
    refuted: &[RefutedPattern],
    q: u32,
    gamma: &Rat,
    fixed_box: Option<(&Rat, &Rat)>,
    window: Option<(&Rat, &Rat)>,
) -> Result<Value, String> {
    let mut out = Vec::with_capacity(refuted.len());
    for entry in refuted {
        let lines = splitter1d::render_refuted_system(coloring, entry, q, gamma, fixed_box, window)
            .map_err(fail)?;
        out.push(json!({
            "system_hash": entry.system_hash,
            "constraints": lines,
        }));
    }
    Ok(Value::Array(out))
}

fn solve_md(
    common: Common,
    instance: PathBuf,
    q: u32,
    t: usize,
    gamma: Rat,
    budget: MdBudget,
) -> Result<u8, String> {
    init_jobs(&common);
    let coloring = load_grid(&instance)?;
    let region = coloring.bounding();
    let seed = MasterSeed(common.effective_seed());
    let search = splittermd::solve_grid_axis_cuts_md(&coloring, &region, q, t, &gamma, budget, seed)
        .map_err(fail)?;
    let report = json!({
        "patterns_explored": search.patterns_explored,
        "seeds_run": search.seeds_run,
        "best_residual": search.best_residual,
    });
    match search.witness {
        Some(witness) => {
            let mut artifact = witness_artifact(&coloring, &witness)?;
            artifact["search"] = report;
            say!("found: {} cuts", witness.num_cuts());
            emit(
                &common,
                &artifact,
                Table::single(&[
                    ("status", "found".into()),
                    ("cuts", witness.num_cuts().to_string()),
                ]),
            )?;
            Ok(0)
        }
        None => {
            let artifact = json!({ "status": "not-found", "search": report });
            say!(
                "not found: {} patterns, {} seeds, best residual {:.3e} (not a certificate)",
                search.patterns_explored, search.seeds_run, search.best_residual
            );
            emit(
                &common,
                &artifact,
                Table::single(&[
                    ("status", "not-found".into()),
                    ("patterns_explored", search.patterns_explored.to_string()),
                    ("best_residual", format!("{:.3e}", search.best_residual)),
                ]),
            )?;
            Ok(4)
        }
    }
}

fn lift_split(common: Common, instance: PathBuf) -> Result<u8, String> {
    init_jobs(&common);
    let necklace = load_discrete(&instance)?;
    let witness = splittermd::split_via_lift(&necklace).map_err(fail)?;
    let bound = (2 * necklace.dim() - 1) * necklace.k() as usize * (necklace.q() as usize - 1);
    let grid = discrete_to_grid(&necklace);
    let shift: Vec<Rat> = vec![Rat::frac(-1, 2); necklace.dim()];
    let shifted = witness.translated(&shift);
    let artifact = witness_artifact(&grid, &shifted)?;
    let mut artifact = artifact;
    artifact["witness"] = to_value(&Document::from_splitting(&witness))?;
    artifact["cut_bound"] = json!(bound);
    say!("lift split: {} cuts (bound {bound})", witness.num_cuts());
    emit(
        &common,
        &artifact,
        Table::single(&[
            ("cuts", witness.num_cuts().to_string()),
            ("bound", bound.to_string()),
        ]),
    )?;
    Ok(0)
}

fn min_cuts(
    common: Common,
    instance: PathBuf,
    q: Option<u32>,
    t_cap: Option<usize>,
    per_axis: Option<Vec<usize>>,
) -> Result<u8, String> {
    init_jobs(&common);
    let mut necklace = load_discrete(&instance)?;
    if let Some(q) = q {
        necklace =
            DiscreteNecklace::new(necklace.sides().to_vec(), necklace.cells().to_vec(), necklace.k(), q)
                .map_err(fail)?;
    }
    let d = necklace.dim();
    let cap = t_cap.unwrap_or((2 * d - 1) * necklace.k() as usize * (necklace.q() as usize - 1));
    let search = if d == 1 && per_axis.is_none() {
        splitter1d::min_cuts_discrete_1d(&necklace, cap).map_err(fail)?
    } else {
        splittermd::min_cuts_discrete_md(&necklace, cap, per_axis.as_deref()).map_err(fail)?
    };
    match search {
        DiscreteSearch::Found { t_min, witness } => {
            let grid = discrete_to_grid(&necklace);
            let shift: Vec<Rat> = vec![Rat::frac(-1, 2); d];
            let mut artifact = witness_artifact(&grid, &witness.translated(&shift))?;
            artifact["witness"] = to_value(&Document::from_splitting(&witness))?;
            artifact["t_min"] = json!(t_min);
            say!("{t_min}");
            emit(&common, &artifact, Table::single(&[("t_min", t_min.to_string())]))?;
            Ok(0)
        }
        DiscreteSearch::NoneWithin { t_cap } => {
            let artifact = json!({ "status": "none", "t_cap": t_cap });
            say!("none within {t_cap} cuts");
            emit(
                &common,
                &artifact,
                Table::single(&[("status", "none".into()), ("t_cap", t_cap.to_string())]),
            )?;
            Ok(2)
        }
    }
}

fn gen_adversary(common: Common, d: usize, k: u32, q: u32, t: usize, n: u32) -> Result<u8, String> {
    let params =
        AdversaryParams::standard(d, k, q, t, n, common.effective_seed()).map_err(fail)?;
    let coloring = adversary::generate(&params).map_err(fail)?;
    let doc = Document::from_grid(&coloring);
    let artifact = to_value(&doc)?;
    eprintln!(
        "adversarial coloring: d={d} k={k} window [-{n}, {n}]^{d}, {} grid cells",
        coloring.num_cells()
    );
    emit(
        &common,
        &artifact,
        Table::single(&[("d", d.to_string()), ("k", k.to_string()), ("cells", coloring.num_cells().to_string())]),
    )?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn certify_1d(
    common: Common,
    k: u32,
    q: u32,
    t: usize,
    n: u32,
    gamma: Option<Rat>,
    instance: Option<PathBuf>,
) -> Result<u8, String> {
    init_jobs(&common);
    let mut params_echo = None;
    let coloring = match &instance {
        Some(path) => load_grid(path)?,
        None => {
            let params =
                AdversaryParams::standard(1, k, q, t, n, common.effective_seed()).map_err(fail)?;
            let coloring = adversary::generate(&params).map_err(fail)?;
            params_echo = Some(params);
            coloring
        }
    };
    let gamma = gamma.unwrap_or_else(|| Rat::frac(1, n as i64));
    let window_lo = Rat::from_int(-(n as i64));
    let window_hi = Rat::from_int(n as i64);
    match adversary::certify_no_split_1d(&coloring, q, t, &gamma, &window_lo, &window_hi)
        .map_err(fail)?
    {
        Certify1d::Certified(cert) => {
            let mut artifact = to_value(&cert)?;
            if let Some(params) = &params_echo {
                artifact["params"] = to_value(params)?;
            }
            if common.verbose {
                artifact["systems"] = rendered_systems(
                    &coloring,
                    &cert.certificate.refuted,
                    q,
                    &gamma,
                    None,
                    Some((&window_lo, &window_hi)),
                )?;
            }
            say!(
                "certified: no fair {q}-splitting with at most {t} cuts and granularity >= {gamma} ({} systems refuted)",
                cert.systems_refuted
            );
            emit(
                &common,
                &artifact,
                Table::single(&[
                    ("status", "certified".into()),
                    ("systems_refuted", cert.systems_refuted.to_string()),
                ]),
            )?;
            Ok(2)
        }
        Certify1d::Counterexample { necklace, witness } => {
            let pm = part_measures(&coloring, &witness).map_err(fail)?;
            if !pm.is_fair() {
                return Err("internal error: counterexample failed revalidation".into());
            }
            let artifact = json!({
                "status": "counterexample",
                "necklace_lo": necklace.lo[0].to_string(),
                "necklace_hi": necklace.hi[0].to_string(),
                "witness": to_value(&Document::from_splitting(&witness))?,
            });
            say!("counterexample: fair splitting of [{}, {}]", necklace.lo[0], necklace.hi[0]);
            emit(
                &common,
                &artifact,
                Table::single(&[("status", "counterexample".into())]),
            )?;
            Ok(0)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn probe_md(
    common: Common,
    instance: Option<PathBuf>,
    d: usize,
    k: Option<u32>,
    q: u32,
    t: usize,
    n: u32,
    gamma: Option<Rat>,
    budget: ProbeBudget,
) -> Result<u8, String> {
    init_jobs(&common);
    let seed = MasterSeed(common.effective_seed());
    let coloring = match &instance {
        Some(path) => load_grid(path)?,
        None => {
            let k = k.ok_or("need --k to generate an adversarial instance")?;
            let params =
                AdversaryParams::standard(d, k, q, t, n, common.effective_seed()).map_err(fail)?;
            adversary::generate(&params).map_err(fail)?
        }
    };
    let gamma = gamma.unwrap_or_else(|| Rat::frac(1, n as i64));
    let window = coloring.bounding();
    let report =
        adversary::probe_no_split_md(&coloring, q, t, &gamma, &window, budget, seed).map_err(fail)?;
    let found = report.found.is_some();
    let mut artifact = json!({
        "attempts": report.attempts,
        "patterns_explored": report.patterns_explored,
        "seeds_run": report.seeds_run,
        "best_residual": report.best_residual,
        "certificate": false,
        "budget": {
            "boxes": budget.boxes,
            "patterns": budget.md.max_patterns,
            "seeds_per_pattern": budget.md.seeds_per_pattern,
            "iters": budget.md.max_iters,
        },
    });
    if let Some((region, witness)) = &report.found {
        artifact["found"] = json!({
            "box_lo": region.lo.iter().map(Rat::to_string).collect::<Vec<_>>(),
            "box_hi": region.hi.iter().map(Rat::to_string).collect::<Vec<_>>(),
            "witness": to_value(&Document::from_splitting(witness))?,
        });
        say!("witness found after {} attempts", report.attempts);
    } else {
        say!(
            "no witness in budget: {} boxes, {} patterns, best residual {:.3e} (not a certificate)",
            report.attempts, report.patterns_explored, report.best_residual
        );
    }
    emit(
        &common,
        &artifact,
        Table::single(&[
            ("found", found.to_string()),
            ("attempts", report.attempts.to_string()),
            ("patterns_explored", report.patterns_explored.to_string()),
            ("best_residual", format!("{:.3e}", report.best_residual)),
        ]),
    )?;
    Ok(if found { 0 } else { 4 })
}

fn audit_dof(
    common: Common,
    d: usize,
    k: u32,
    q: u32,
    t: usize,
    cuts: CutsArg,
    target: TargetArg,
) -> Result<u8, String> {
    let family = match cuts {
        CutsArg::Axis => CutFamily::Axis,
        CutsArg::Arbitrary => CutFamily::Arbitrary,
    };
    let target = match target {
        TargetArg::Window => AuditTarget::Window,
        TargetArg::Fixed => AuditTarget::FixedNecklace,
    };
    let audit = adversary::audit_dof(d, k, q, t, family, target);
    say!(
        "verdict: {} (k(q-1) = {} {} threshold {})",
        if audit.exceeds { "yes" } else { "no" },
        k as u64 * (q as u64 - 1),
        if audit.exceeds { ">" } else { "<=" },
        audit.threshold
    );
    let artifact = to_value(&audit)?;
    emit(
        &common,
        &artifact,
        Table::single(&[
            ("d", d.to_string()),
            ("k", k.to_string()),
            ("q", q.to_string()),
            ("t", t.to_string()),
            ("unknowns", audit.unknowns.to_string()),
            ("threshold", audit.threshold.to_string()),
            ("verdict", if audit.exceeds { "yes".into() } else { "no".into() }),
        ]),
    )?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_distinguish(
    common: Common,
    instance: Option<PathBuf>,
    sigma: Rat,
    audit: bool,
    d: Option<usize>,
    k: Option<u32>,
    shape: ShapeArg,
) -> Result<u8, String> {
    init_jobs(&common);
    if audit {
        let d = d.ok_or("audit mode needs --d")?;
        let k = k.ok_or("audit mode needs --k")?;
        let shape = match shape {
            ShapeArg::Cube => Shape::Cube,
            ShapeArg::Cuboid => Shape::Cuboid,
        };
        let audit = distinguish::audit_distinguish(d, k, shape);
        say!(
            "verdict: {} (k = {k}, required {})",
            if audit.guaranteed { "yes" } else { "no guarantee" },
            audit.required
        );
        let artifact = to_value(&audit)?;
        emit(
            &common,
            &artifact,
            Table::single(&[
                ("d", d.to_string()),
                ("k", k.to_string()),
                ("required", audit.required.to_string()),
                ("guaranteed", audit.guaranteed.to_string()),
            ]),
        )?;
        return Ok(0);
    }
    let path = instance.ok_or("search mode needs --instance")?;
    let coloring = load_grid(&path)?;
    let window = coloring.bounding();
    let seed = MasterSeed(common.effective_seed());
    match distinguish::find_equal_cubes(&coloring, &window, &sigma, seed).map_err(fail)? {
        EqualCubes::Found(pair) => {
            if !distinguish::verify_pair(&coloring, &pair, &sigma).map_err(fail)? {
                return Err("internal error: pair failed exact revalidation".into());
            }
            let artifact = to_value(&pair)?;
            say!(
                "equal pair: [{}] side {} and [{}] side {}",
                pair.first.corner[0], pair.first.side, pair.second.corner[0], pair.second.side
            );
            emit(
                &common,
                &artifact,
                Table::single(&[
                    ("status", "found".into()),
                    ("side_a", pair.first.side.to_string()),
                    ("side_b", pair.second.side.to_string()),
                ]),
            )?;
            Ok(0)
        }
        EqualCubes::NotFound { exhaustive, attempts } => {
            let artifact = json!({
                "status": "not-found",
                "exhaustive": exhaustive,
                "attempts": attempts,
            });
            say!(
                "no pair found ({} after {attempts} patterns)",
                if exhaustive { "exhaustive" } else { "budget exhausted" }
            );
            emit(
                &common,
                &artifact,
                Table::single(&[
                    ("status", "not-found".into()),
                    ("exhaustive", exhaustive.to_string()),
                ]),
            )?;
            Ok(if exhaustive { 2 } else { 4 })
        }
    }
}

fn count_discrete(
    common: Common,
    n: u32,
    d: usize,
    q: u32,
    t: usize,
    hard: bool,
) -> Result<u8, String> {
    init_jobs(&common);
    let count = discrete_bounds::count_splittable_subsets(n, d, q, t).map_err(fail)?;
    let bound = discrete_bounds::counting_bound_report(n, d, q, t).map_err(fail)?;
    let mut artifact = json!({
        "count": to_value(&count)?,
        "bound": to_value(&bound)?,
    });
    let mut pairs = vec![
        ("n", n.to_string()),
        ("d", d.to_string()),
        ("q", q.to_string()),
        ("t", t.to_string()),
        ("splittable", count.splittable.to_string()),
        ("divisible", count.divisible.to_string()),
        ("total", count.total.to_string()),
        ("estimate", bound.estimate.to_string()),
        ("estimate_exceeds_total", bound.estimate_exceeds_total.to_string()),
    ];
    if hard {
        let found = discrete_bounds::find_hard_subset(n, d, q).map_err(fail)?;
        artifact["hard"] = to_value(&found)?;
        pairs.push((
            "hard_subset",
            found.as_ref().map_or("none".into(), |h| format!("{:?}", h.cells)),
        ));
    }
    say!(
        "splittable {} of {} divisible subsets (total 2^(n^d) = {}); estimate {}",
        count.splittable, count.divisible, count.total, bound.estimate
    );
    let pairs_ref: Vec<(&str, String)> = pairs.iter().map(|(k, v)| (*k, v.clone())).collect();
    emit(&common, &artifact, Table::single(&pairs_ref))?;
    Ok(0)
}

/// Small deterministic experiment suite. Timings are printed to stderr so the
/// artifact stays byte-identical across runs.
fn bench(common: Common) -> Result<u8, String> {
    init_jobs(&common);
    let seed = MasterSeed(common.effective_seed());
    let started = std::time::Instant::now();

    // 1-D solves over a deterministic random corpus.
    let mut line_results = Vec::new();
    for i in 0..20u64 {
        let necklace = random_line_necklace(seed, i);
        let witness = splitter1d::solve_discrete_1d(&necklace).map_err(fail)?;
        line_results.push(json!({
            "len": necklace.len(),
            "k": necklace.k(),
            "cuts": witness.num_cuts(),
        }));
    }
    let line_elapsed = started.elapsed();

    // Lift splits on random 2-D necklaces.
    let mid = std::time::Instant::now();
    let mut lift_results = Vec::new();
    for i in 0..10u64 {
        let necklace = random_md_necklace(seed, i);
        let witness = splittermd::split_via_lift(&necklace).map_err(fail)?;
        lift_results.push(json!({
            "sides": necklace.sides(),
            "cuts": witness.num_cuts(),
        }));
    }
    let lift_elapsed = mid.elapsed();

    eprintln!(
        "bench timings: 1-D solves {:.2?}, lift splits {:.2?}",
        line_elapsed, lift_elapsed
    );
    let artifact = json!({
        "line_solves": line_results,
        "lift_splits": lift_results,
    });
    let table = Table {
        header: vec!["experiment".into(), "cases".into()],
        rows: vec![
            vec!["line_solves".into(), "20".into()],
            vec!["lift_splits".into(), "10".into()],
        ],
    };
    emit(&common, &artifact, table)?;
    Ok(0)
}

fn random_line_necklace(seed: MasterSeed, index: u64) -> DiscreteNecklace {
    use rand::Rng;
    let mut rng = seed.stream("bench-line", index);
    loop {
        let len = 2 * rng.random_range(2..6usize);
        let k = rng.random_range(1..4u32);
        let cells: Vec<necklace_core::ColorId> =
            (0..len).map(|_| necklace_core::ColorId(rng.random_range(1..=k))).collect();
        if let Ok(n) = DiscreteNecklace::new(vec![len as u32], cells, k, 2) {
            return n;
        }
    }
}

fn random_md_necklace(seed: MasterSeed, index: u64) -> DiscreteNecklace {
    use rand::Rng;
    let mut rng = seed.stream("bench-md", index);
    loop {
        let sides = vec![rng.random_range(2..4u32), rng.random_range(2..4u32)];
        let total: usize = sides.iter().map(|&s| s as usize).product();
        let k = rng.random_range(1..4u32);
        let cells: Vec<necklace_core::ColorId> =
            (0..total).map(|_| necklace_core::ColorId(rng.random_range(1..=k))).collect();
        if let Ok(n) = DiscreteNecklace::new(sides, cells, k, 2) {
            return n;
        }
    }
}
