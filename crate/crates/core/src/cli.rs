//! Command-line front end.
//!
//! Every command produces a [`RunReport`]. A text summary goes to standard
//! output and, with `--json FILE`, the report is written as JSON (`-` for
//! standard output). Exit codes: 0 definitive, 2 unknown within budget,
//! 1 invalid input.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bm::{check_connectivity, CheckOptions, Verdict};
use crate::cusped::{compute_constants, export_ball, ConstantsLedger, CuspedSpace, CuspedVertex};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{ball, distance, estimate_delta};
use crate::horoball::{horoball_distance, horoball_geodesic, is_normal_form, sibling_point, HoroballVertex, LatticeGraph};
use crate::presentations::{LatticePoint, RelativeStructure};
use crate::splittings::{
    check_multi_ended, connectivity_decision, dunwoody_decomposition, exists_finite_splitting, grushko_decomposition,
    Budgets, Decomposition, LeafStatus, TietzeBudget,
};

#[derive(Parser, Debug)]
#[command(name = "relhyp", version, about = "Cusped spaces and splitting search for relatively hyperbolic groups")]
struct Cli {
    /// Relative structure file (JSON).
    #[arg(long, global = true)]
    structure: Option<PathBuf>,
    /// Write the JSON report here; `-` for standard output.
    #[arg(long, global = true)]
    json: Option<String>,
    /// Replace the computed constants by a toy ledger file.
    #[arg(long = "toy-constants", global = true)]
    toy_constants: Option<PathBuf>,
    /// Seed for sampling commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Disable data parallelism.
    #[arg(long, global = true)]
    sequential: bool,
    /// Include wall-clock time in the JSON report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the constants ledger for a hyperbolicity constant.
    Constants {
        #[arg(long)]
        delta: u64,
        /// Isoperimetric constant, for the K1 bound.
        #[arg(long)]
        iso: Option<u64>,
    },
    /// Materialize a ball of the cusped space.
    Ball {
        #[arg(long)]
        radius: u32,
        #[arg(long, default_value = "1")]
        center: String,
        #[arg(long, default_value_t = 200_000)]
        max_vertices: usize,
        /// Also scan quadruples for a four-point estimate.
        #[arg(long)]
        four_point: bool,
        /// Sample this many basepoints instead of scanning all.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Distance between two vertices of the cusped space.
    Dist {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 64)]
        bound: u32,
        #[arg(long, default_value_t = 1_000_000)]
        max_vertices: usize,
    },
    /// Standalone horoballs over small abelian lattices.
    Horoball {
        #[command(subcommand)]
        command: HoroballCommand,
    },
    /// Run the connectivity check on the cusped space.
    CheckConnectivity {
        #[arg(long, default_value = "1")]
        center: String,
        #[arg(long)]
        n_start: Option<u64>,
        #[arg(long, default_value_t = 4)]
        n_budget: u64,
        #[arg(long, default_value_t = 2_000_000)]
        max_vertices: usize,
    },
    /// Search for a splitting over a finite group.
    FindSplitting {
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Decide whether the group splits over a finite group relative to its parabolics.
    DecideConnectivity {
        #[command(flatten)]
        budgets: BudgetArgs,
        /// Skip the admissibility check on the structure.
        #[arg(long)]
        no_admissibility_check: bool,
    },
    /// Refine by splittings over finite groups.
    Dunwoody {
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Free-product decomposition.
    Grushko {
        #[command(flatten)]
        budgets: BudgetArgs,
    },
}

#[derive(Subcommand, Debug)]
enum HoroballCommand {
    /// Distance, geodesic and optionally a sibling point.
    Probe {
        /// `z`, `z2`, or `z-z4`.
        #[arg(long, default_value = "z2")]
        base: String,
        /// Vertex `x,y@depth` (torsion as `/t`).
        #[arg(long)]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        /// Compute the sibling point of `from` and `to` at this level.
        #[arg(long)]
        sibling: Option<u32>,
        /// Random pairs with coordinates in `[-span, span]` instead of `from`/`to`.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 10)]
        span: i64,
        #[arg(long, default_value_t = 6)]
        max_depth: u32,
    },
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    #[arg(long, default_value_t = 1)]
    tietze_moves: usize,
    #[arg(long, default_value_t = 2)]
    word_length: usize,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 64)]
    closure: usize,
    #[arg(long, default_value_t = 2)]
    conjugator: u32,
    #[arg(long, default_value_t = 3)]
    membership: u32,
    #[arg(long)]
    n_start: Option<u64>,
    #[arg(long, default_value_t = 4)]
    n_budget: u64,
    #[arg(long, default_value_t = 1_000_000)]
    max_vertices: usize,
    #[arg(long, default_value_t = 4)]
    recursion: u32,
}

impl BudgetArgs {
    fn budgets(&self, exec: Exec) -> Budgets {
        Budgets {
            tietze: TietzeBudget { moves: self.tietze_moves, word_length: self.word_length, count: self.count },
            closure: self.closure,
            conjugator: self.conjugator,
            membership: self.membership,
            n_start: self.n_start,
            n_budget: self.n_budget,
            ball_vertices: self.max_vertices,
            recursion: self.recursion,
            exec,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Arguments, without the JSON destination.
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<ConstantsLedger>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub result: Value,
    pub resources: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u128>,
}

/// Exit code, report and text summary of one invocation.
pub struct Outcome {
    pub code: i32,
    pub report: RunReport,
    pub text: String,
}

struct Ctx {
    structure: Option<PathBuf>,
    toy: Option<PathBuf>,
    seed: u64,
    exec: Exec,
}

impl Ctx {
    fn structure(&self) -> Result<RelativeStructure> {
        let path = self.structure.as_ref().ok_or_else(|| Error::validation("--structure is required"))?;
        let text = std::fs::read_to_string(path)?;
        RelativeStructure::from_json(&text)
    }

    fn ledger(&self, s: &RelativeStructure, notes: &mut Vec<String>) -> Result<ConstantsLedger> {
        if let Some(path) = &self.toy {
            return ConstantsLedger::toy_from_json(&std::fs::read_to_string(path)?);
        }
        if let Some(d) = s.delta {
            return compute_constants(d, s.isoperimetric_k, true);
        }
        let x = CuspedSpace::assemble(s);
        let est = estimate_delta(&x, &x.origin(), 2, None, 50_000, self.exec)?;
        let d = u64::try_from((est.delta.0 + 1) / 2).unwrap_or(0).max(1);
        notes.push(format!("delta estimated as {} from a radius-2 scan; constants are not certified", est.delta));
        compute_constants(d, s.isoperimetric_k, false)
    }
}

fn echo(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--json" {
            it.next();
        } else if !a.starts_with("--json=") {
            out.push(a.clone());
        }
    }
    out
}

fn parse_point(text: &str) -> Result<HoroballVertex<LatticePoint>> {
    let bad = || Error::parse(format!("horoball vertex '{text}': expected x,y@depth"));
    let (coords, depth) = text.split_once('@').unwrap_or((text, "0"));
    let (free, tors) = coords.split_once('/').unwrap_or((coords, "0"));
    let free = free.split(',').map(|c| c.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
    let tors = tors.trim().parse::<u32>().map_err(|_| bad())?;
    let depth = depth.trim().parse::<u32>().map_err(|_| bad())?;
    Ok(HoroballVertex::new(LatticePoint::new(free, tors), depth))
}

fn render_point(v: &HoroballVertex<LatticePoint>) -> String {
    let coords: Vec<String> = v.base.free.iter().map(|c| c.to_string()).collect();
    let tors = if v.base.tors == 0 { String::new() } else { format!("/{}", v.base.tors) };
    format!("{}{}@{}", coords.join(","), tors, v.depth)
}

fn lattice(base: &str) -> Result<LatticeGraph> {
    match base {
        "z" => LatticeGraph::standard(1, &[]),
        "z2" => LatticeGraph::standard(2, &[]),
        "z-z4" => LatticeGraph::standard(1, &[4]),
        other => Err(Error::validation(format!("--base: unknown lattice '{other}'"))),
    }
}

fn verdict_code(v: &Verdict) -> i32 {
    if v.is_unknown() {
        2
    } else {
        0
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Connected { n, certified } => format!(
            "verdict: connected (n = {}, {})",
            n.map_or("-".to_string(), |n| n.to_string()),
            if *certified { "certified" } else { "not certified" }
        ),
        Verdict::Disconnected { witness } => format!("verdict: disconnected\nwitness: {}", witness.summary()),
        Verdict::Unknown { report } => format!("verdict: unknown ({report})"),
    }
}

fn decomposition_text(d: &Decomposition) -> String {
    let mut t = format!("graph: {}\nedge orders: {:?}\n", d.graph.summary(), d.edge_orders);
    for l in &d.leaves {
        t += &format!("vertex {}: {:?}\n", l.vertex, l.status);
    }
    for f in &d.factors {
        t += &format!("factor: {} -> [{}]\n", f.presentation, f.embedding.join(", "));
    }
    t + if d.complete { "complete" } else { "incomplete" }
}

fn execute(cli: Cli, report: &mut RunReport) -> Result<(i32, String)> {
    let ctx = Ctx {
        structure: cli.structure,
        toy: cli.toy_constants,
        seed: cli.seed,
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let mut notes = Vec::new();
    let out = match cli.command {
        Command::Constants { delta, iso } => {
            let l = match &ctx.toy {
                Some(p) => ConstantsLedger::toy_from_json(&std::fs::read_to_string(p)?)?,
                None => compute_constants(delta, iso, true)?,
            };
            let mut t = format!(
                "delta = {}\nC = {}\nM = {}\nk = {}\nK = 3·2^{}+{} = {}\nR(n) = {}n+{}",
                l.delta,
                l.c,
                l.m,
                l.k,
                &l.m * 2u32 + 3u32,
                &l.m + 3u32,
                l.big_k,
                l.r.slope,
                l.r.intercept
            );
            if let Some(k1) = &l.k1 {
                t += &format!("\nK1 = {k1}");
            }
            report.certified = l.certified && !l.toy;
            report.result = serde_json::to_value(&l)?;
            report.ledger = Some(l);
            (0, t)
        }
        Command::Ball { radius, center, max_vertices, four_point, samples } => {
            let s = ctx.structure()?;
            let x = CuspedSpace::assemble(&s);
            let c = x.parse_vertex(&center)?;
            let b = ball(&x, &c, radius, max_vertices, ctx.exec)?;
            let sizes: Vec<usize> = (0..=radius).map(|r| b.count_within(r)).collect();
            let mut t = format!("ball of radius {radius} at {}: {} vertices\ncumulative sizes: {sizes:?}", x.render(&c), b.len());
            let mut result = json!({ "ball": export_ball(&x, &b), "cumulative_sizes": sizes });
            if four_point {
                let est = estimate_delta(&x, &c, radius, samples.map(|n| (n, ctx.seed)), max_vertices, ctx.exec)?;
                t += &format!("\nfour-point estimate: {} over {} quadruples", est.delta, est.quadruples);
                result["four_point"] = serde_json::to_value(&est)?;
            }
            report.certified = true;
            report.result = result;
            report.resources = json!({ "ball_vertices": b.len() });
            (0, t)
        }
        Command::Dist { from, to, bound, max_vertices } => {
            let s = ctx.structure()?;
            let x = CuspedSpace::assemble(&s);
            let (a, b) = (x.parse_vertex(&from)?, x.parse_vertex(&to)?);
            let d = distance(&x, &a, &b, bound, max_vertices)?;
            report.certified = true;
            report.result = json!({ "from": x.render(&a), "to": x.render(&b), "distance": d, "bound": bound });
            match d {
                Some(d) => (0, format!("d({}, {}) = {d}", x.render(&a), x.render(&b))),
                None => (2, format!("d({}, {}) > {bound}", x.render(&a), x.render(&b))),
            }
        }
        Command::Horoball { command: HoroballCommand::Probe { base, from, to, sibling, samples, span, max_depth } } => {
            let g = lattice(&base)?;
            let pairs = match (samples, from, to) {
                (Some(n), _, _) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
                    let rank = g.lattice().rank();
                    let orders = g.lattice().torsion().order() as u32;
                    let point = |rng: &mut ChaCha8Rng| {
                        let free = (0..rank).map(|_| rng.gen_range(-span..=span)).collect();
                        let tors = if orders > 1 { rng.gen_range(0..orders) } else { 0 };
                        HoroballVertex::new(LatticePoint::new(free, tors), rng.gen_range(0..=max_depth))
                    };
                    (0..n).map(|_| (point(&mut rng), point(&mut rng))).collect()
                }
                (None, Some(f), Some(t)) => vec![(parse_point(&f)?, parse_point(&t)?)],
                _ => return Err(Error::validation("horoball probe needs --from and --to, or --samples")),
            };
            let mut rows = Vec::new();
            let mut text = Vec::new();
            for (a, b) in &pairs {
                let d = horoball_distance(a, b, &g)?;
                let path = horoball_geodesic(a, b, &g)?;
                let normal = is_normal_form(&path, &g)?;
                let mut row = json!({
                    "from": render_point(a),
                    "to": render_point(b),
                    "distance": d,
                    "geodesic": path.iter().map(render_point).collect::<Vec<_>>(),
                    "normal_form": normal,
                });
                text.push(format!("d({}, {}) = {d}", render_point(a), render_point(b)));
                if let Some(k) = sibling {
                    let p2 = sibling_point(a, b, k, &g)?;
                    row["sibling"] = json!(render_point(&p2));
                    text.push(format!("sibling at level {k}: {}", render_point(&p2)));
                }
                rows.push(row);
            }
            report.certified = true;
            report.result = json!({ "base": base, "pairs": rows });
            (0, text.join("\n"))
        }
        Command::CheckConnectivity { center, n_start, n_budget, max_vertices } => {
            let s = ctx.structure()?;
            let ledger = ctx.ledger(&s, &mut notes)?;
            let x = CuspedSpace::assemble(&s);
            let c = x.parse_vertex(&center)?;
            let start = match n_start {
                Some(n) => n,
                None => ledger.big_k_small().unwrap_or(u64::MAX),
            };
            let run = check_connectivity(&x, &c, &ledger, start, n_budget, CheckOptions { max_vertices, exec: ctx.exec })?;
            let violating = run.violating.as_ref().map(|(a, b, da, db): &(CuspedVertex, CuspedVertex, u32, u32)| {
                json!({ "x": x.render(a), "y": x.render(b), "dist_x": da, "dist_y": db })
            });
            let mut t = verdict_text(&run.verdict);
            if let Some(v) = &violating {
                t += &format!("\nviolating pair: {} and {}", v["x"], v["y"]);
            }
            report.certified = matches!(run.verdict, Verdict::Connected { certified: true, .. });
            report.resources = json!({ "rounds": run.rounds, "n_start": start, "n_budget": n_budget });
            report.result = json!({ "violating": violating });
            let code = verdict_code(&run.verdict);
            report.verdict = Some(run.verdict);
            report.ledger = Some(ledger);
            (code, t)
        }
        Command::FindSplitting { budgets } => {
            let s = ctx.structure()?;
            let (v, log) = check_multi_ended(&s.ambient, &s.oracle, &budgets.budgets(ctx.exec))?;
            report.certified = matches!(v, Verdict::Disconnected { .. });
            report.resources = serde_json::to_value(&log)?;
            let code = verdict_code(&v);
            let t = verdict_text(&v);
            report.verdict = Some(v);
            (code, t)
        }
        Command::DecideConnectivity { budgets, no_admissibility_check } => {
            let s = ctx.structure()?;
            let ledger = ctx.ledger(&s, &mut notes)?;
            let b = budgets.budgets(ctx.exec);
            let (v, log) = if no_admissibility_check {
                connectivity_decision(&s, &ledger, &b)?
            } else {
                exists_finite_splitting(&s, &ledger, &b)?
            };
            report.certified = match &v {
                Verdict::Connected { certified, .. } => *certified,
                Verdict::Disconnected { .. } => true,
                Verdict::Unknown { .. } => false,
            };
            report.resources = serde_json::to_value(&log)?;
            let code = verdict_code(&v);
            let t = verdict_text(&v);
            report.verdict = Some(v);
            report.ledger = Some(ledger);
            (code, t)
        }
        Command::Dunwoody { budgets } => decomposition(&ctx, &budgets, false, report, &mut notes)?,
        Command::Grushko { budgets } => decomposition(&ctx, &budgets, true, report, &mut notes)?,
    };
    if !notes.is_empty() {
        if report.resources.is_null() {
            report.resources = json!({});
        }
        report.resources["notes"] = json!(notes);
    }
    Ok(out)
}

fn decomposition(
    ctx: &Ctx,
    budgets: &BudgetArgs,
    grushko: bool,
    report: &mut RunReport,
    notes: &mut Vec<String>,
) -> Result<(i32, String)> {
    let s = ctx.structure()?;
    let ledger = ctx.ledger(&s, notes)?;
    let b = budgets.budgets(ctx.exec);
    let (d, log) = if grushko { grushko_decomposition(&s, &ledger, &b)? } else { dunwoody_decomposition(&s, &ledger, &b)? };
    let connected_leaf = d.leaves.iter().any(|l| l.status == LeafStatus::Connected);
    report.certified = d.complete && (!connected_leaf || (ledger.certified && !ledger.toy));
    report.resources = serde_json::to_value(&log)?;
    let text = decomposition_text(&d);
    let code = if d.complete { 0 } else { 2 };
    report.verdict = Some(d.verdict.clone());
    report.result = serde_json::to_value(&d)?;
    report.ledger = Some(ledger);
    Ok((code, text))
}

/// Parses and runs one invocation without touching standard output.
pub fn evaluate(argv: &[String]) -> Outcome {
    let started = Instant::now();
    let mut report = RunReport { command: echo(argv), ..RunReport::default() };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            report.error = Some(e.to_string());
            return Outcome { code, report, text: e.to_string() };
        }
    };
    let timing = cli.timing;
    let (code, text) = match execute(cli, &mut report) {
        Ok(r) => r,
        Err(e) => {
            report.certified = false;
            report.error = Some(e.to_string());
            (1, format!("error: {e}"))
        }
    };
    if timing {
        report.wall_clock_ms = Some(started.elapsed().as_millis());
    }
    Outcome { code, report, text }
}

/// Runs one invocation, printing the summary and writing the JSON report.
pub fn run(argv: &[String]) -> (i32, RunReport) {
    let started = Instant::now();
    let out = evaluate(argv);
    let parsed = Cli::try_parse_from(argv);
    if matches!(&parsed, Err(e) if !e.use_stderr()) {
        print!("{}", out.text);
        return (out.code, out.report);
    }
    let json_to = parsed.ok().and_then(|c| c.json);
    let mut code = out.code;
    let json = serde_json::to_string_pretty(&out.report).expect("reports serialize") + "\n";
    let summary = format!("{}\n({} ms)", out.text, started.elapsed().as_millis());
    match (json_to.as_deref(), code) {
        (_, 1) => eprintln!("{}", out.text),
        (Some("-"), _) => {}
        _ => println!("{summary}"),
    }
    match json_to.as_deref() {
        Some("-") => print!("{json}"),
        Some(path) => {
            if let Err(e) = std::fs::write(path, json) {
                eprintln!("error: cannot write {path}: {e}");
                code = 1;
            }
        }
        None => {}
    }
    (code, out.report)
}
