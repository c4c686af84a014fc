//! Command-line front end.
//!
//! Subcommands: `gen`, `cover`, `cover-check`, `spanner`, `expander-check`,
//! `attack`, `eval`, `suite`. Every subcommand is deterministic given
//! `--seed`; outputs are written atomically. Exit codes: 0 success, 1
//! validation failure (violations found), 2 usage or input error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::attack::{AttackKind, AttackSpec, ExperimentConfig};
use crate::compose::{build_reliable, constructive_damage, verify_residual, BuildParams, Parity};
use crate::cover::{planar_cover, ramsey_cover, tree_cover, validate_cover};
use crate::error::{Error, Result};
use crate::hst::hst_from_ultrametric;
use crate::instance::{gen_instance, GenKind, GenParams, Instance};
use crate::io;
use crate::metric::{shortest_path_metric, FiniteMetric};
use crate::uniform::{permutation_regular_graph, select_degree, ConstantsMode};
use crate::util::init_threads;

#[derive(Parser)]
#[command(
    name = "relspan",
    about = "Reliable spanners for finite metrics: generators, covers, spanners, expander checks, and attack experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance (metric, tree, grid, planar triangulation).
    Gen(GenArgs),
    /// Build a cover for an instance.
    Cover(CoverArgs),
    /// Validate a cover against an instance.
    CoverCheck(CoverCheckArgs),
    /// Build a reliable spanner for an instance.
    Spanner(SpannerArgs),
    /// Sample a permutation-model expander and certify its properties.
    ExpanderCheck(ExpanderCheckArgs),
    /// Run one attack against a spanner and verify the residual.
    Attack(AttackArgs),
    /// Batch attack experiments with a CSV report.
    Eval(EvalArgs),
    /// Run a named battery: smoke or acceptance.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct GenArgs {
    /// uniform | random_tree | grid | random_planar | layered
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Groups of the layered metric (must divide n).
    #[arg(long, default_value_t = 4)]
    h: usize,
    /// Base stretch of the layered metric.
    #[arg(long, default_value_t = 2.0)]
    t: f64,
    /// Gap parameter of the layered metric.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct CoverArgs {
    /// hst | tree | planar | ramsey
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Quality parameter of the ramsey cover.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instance file (metric JSON for hst/ramsey, graph text for tree,
    /// plane-graph JSON for planar).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct CoverCheckArgs {
    /// Cover quality to check against; defaults to the cover's own value.
    #[arg(long)]
    t: Option<f64>,
    /// Instance file followed by the cover file.
    #[arg(long = "in", value_name = "FILE", num_args = 2)]
    input: Vec<PathBuf>,
}

#[derive(Args)]
struct SpannerArgs {
    /// uniform | ultrametric | tree | planar | general
    #[arg(long)]
    family: String,
    /// oblivious | deterministic
    #[arg(long, default_value = "oblivious")]
    model: String,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// paper | practical constants for the expander degree formula.
    #[arg(long, default_value = "practical")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct ExpanderCheckArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    /// Expansion parameter for the property checks.
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// Sampling budget per check.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value = "practical")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    /// random | high_degree | center_targeted | cluster_targeted
    #[arg(long, default_value = "random")]
    kind: String,
    /// Attack size (vertex count) where the kind takes one.
    #[arg(long, default_value_t = 10)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Spanner file followed by the instance it was built from.
    #[arg(long = "in", value_name = "FILE", num_args = 2)]
    input: Vec<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "oblivious")]
    model: String,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    #[arg(long, default_value_t = 2)]
    t: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value = "random")]
    kind: String,
    /// Attack size per trial.
    #[arg(long, default_value_t = 10)]
    size: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Also compute the greedy damaged-set upper bound per trial.
    #[arg(long, default_value_t = false)]
    greedy: bool,
    #[arg(long, default_value = "practical")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    /// smoke | acceptance
    name: String,
}

/// Run the CLI; returns the process exit code.
pub fn dispatch(args: &[String]) -> i32 {
    init_threads();
    let mut argv = vec!["relspan".to_string()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/usage text
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Cover(a) => cmd_cover(a),
        Cmd::CoverCheck(a) => cmd_cover_check(a),
        Cmd::Spanner(a) => cmd_spanner(a),
        Cmd::ExpanderCheck(a) => cmd_expander_check(a),
        Cmd::Attack(a) => cmd_attack(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Suite(a) => cmd_suite(a),
    }
}

/// Read an instance file by sniffing its format: metric JSON, plane-graph
/// JSON, then graph text.
fn read_instance(path: &PathBuf) -> Result<Instance> {
    if let Ok(m) = io::read_metric(path) {
        return Ok(Instance::Metric(m));
    }
    if let Ok(pg) = io::read_plane(path) {
        return Ok(Instance::Plane(pg));
    }
    io::read_graph(path).map(Instance::Graph)
}

fn instance_metric(inst: &Instance) -> Result<FiniteMetric> {
    match inst {
        Instance::Metric(m) => Ok(m.clone()),
        Instance::Graph(g) => shortest_path_metric(g),
        Instance::Plane(pg) => shortest_path_metric(pg.graph()),
    }
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let kind: GenKind = a.kind.parse()?;
    let params = GenParams {
        n: a.n,
        h: a.h,
        t: a.t,
        eps: a.eps,
    };
    match gen_instance(kind, &params, a.seed)? {
        Instance::Metric(m) => io::write_metric(&a.out, &m)?,
        Instance::Graph(g) => io::write_graph(&a.out, &g)?,
        Instance::Plane(pg) => io::write_plane(&a.out, &pg)?,
    }
    println!("wrote {} instance to {}", a.kind, a.out.display());
    Ok(0)
}

fn cmd_cover(a: CoverArgs) -> Result<i32> {
    let (cover, metric) = match a.method.as_str() {
        "hst" => {
            let m = io::read_metric(&a.input)?;
            let hst = hst_from_ultrametric(&m, 1.0)?;
            (crate::cover::hst_cover(&m, &hst, a.eps)?, m)
        }
        "tree" => {
            let g = io::read_graph(&a.input)?;
            let m = shortest_path_metric(&g)?;
            (tree_cover(&g, a.eps)?, m)
        }
        "planar" => {
            let pg = io::read_plane(&a.input)?;
            let m = shortest_path_metric(pg.graph())?;
            (planar_cover(&pg, a.eps)?, m)
        }
        "ramsey" => {
            let m = io::read_metric(&a.input)?;
            let (c, info) = ramsey_cover(&m, a.k, a.seed)?;
            println!(
                "measured t = {:.3} ({:.2} x k), attempts {}",
                info.measured_t, info.constant, info.attempts
            );
            (c, m)
        }
        other => {
            return Err(Error::Usage(format!("unknown cover method {other:?}")));
        }
    };
    let _ = metric;
    io::write_cover(&a.out, &cover)?;
    println!(
        "cover: {} clusters, size {}, depth {}, t = {}",
        cover.clusters.len(),
        cover.size,
        cover.depth,
        cover.advertised_t
    );
    Ok(0)
}

fn cmd_cover_check(a: CoverCheckArgs) -> Result<i32> {
    let [inst_path, cover_path] = a.input.as_slice() else {
        return Err(Error::Usage(
            "cover-check needs --in <instance> <cover>".into(),
        ));
    };
    let inst = read_instance(inst_path)?;
    let metric = instance_metric(&inst)?;
    let cover = io::read_cover(cover_path, &metric)?;
    let t = a.t.unwrap_or(cover.advertised_t);
    let v = validate_cover(&metric, &cover, t)?;
    if v.is_valid() {
        println!(
            "valid {t}-cover: {} pairs checked, worst ratio {:.4}",
            v.pairs_checked, v.worst_ratio
        );
        Ok(0)
    } else {
        println!(
            "INVALID at t = {t}: {} uncovered pairs of {}",
            v.uncovered_count, v.pairs_checked
        );
        for &(p, q) in v.uncovered.iter().take(20) {
            println!("  uncovered: ({p}, {q}) at distance {}", metric.dist(p, q));
        }
        Ok(1)
    }
}

fn build_params(
    theta: f64,
    eps: f64,
    t: usize,
    k: usize,
    mode: &str,
    seed: u64,
) -> Result<BuildParams> {
    Ok(BuildParams {
        theta,
        eps,
        t,
        k,
        parity: Parity::Odd,
        constants: mode.parse::<ConstantsMode>()?,
        seed,
    })
}

fn cmd_spanner(a: SpannerArgs) -> Result<i32> {
    let inst = read_instance(&a.input)?;
    let params = build_params(a.theta, a.eps, a.t, a.k, &a.mode, a.seed)?;
    let out = build_reliable(&inst, a.family.parse()?, a.model.parse()?, &params)?;
    io::write_reliable_spanner(&a.out, &out.spanner)?;
    println!(
        "spanner: {} edges over {} points, cover t = {:.3} depth {}, stretch bound {:.3} within {} hops{}",
        out.spanner.num_edges(),
        out.spanner.n,
        out.spanner.cover_t,
        out.spanner.cover_depth,
        out.spanner.improved_bound,
        out.spanner.hop_adv,
        if out.spanner.complete_fallbacks > 0 {
            format!(
                " ({} clusters fell back to complete graphs)",
                out.spanner.complete_fallbacks
            )
        } else {
            String::new()
        }
    );
    Ok(0)
}

fn cmd_expander_check(a: ExpanderCheckArgs) -> Result<i32> {
    let constants: ConstantsMode = a.mode.parse()?;
    let choice = select_degree(a.n, a.t, a.theta, constants);
    let g = permutation_regular_graph(a.n, choice.d, a.seed)?;
    let report = crate::lab::expander_report(&g, a.delta, constants, a.trials, a.seed)?;
    println!(
        "n={} d={} ({}clamped), lambda = {:.4} vs {:.4} bound: {}",
        report.n,
        report.d,
        if choice.clamped { "" } else { "not " },
        report.lambda,
        report.lambda_bound,
        if report.lambda_ok { "ok" } else { "VIOLATED" }
    );
    println!(
        "expansion: p1 {}/{} failures, p2 {}/{} failures; mixing worst {:.3} with {} violations",
        report.expansion.p1_failures,
        report.expansion.p1_checked,
        report.expansion.p2_failures,
        report.expansion.p2_checked,
        report.mixing.worst_ratio,
        report.mixing.violations.len()
    );
    if let Some(se) = &report.self_edges {
        println!(
            "self edges: {} failures in {} samples, worst ratio {:.3}",
            se.failures, se.samples, se.worst_ratio
        );
    }
    if let Some(path) = a.out {
        let json = expander_report_json(&report);
        io::atomic_write(&path, &json)?;
    }
    let ok = report.lambda_ok
        && report.expansion.all_pass()
        && report.mixing.violations.is_empty()
        && report.self_edges.as_ref().map_or(true, |s| s.failures == 0);
    Ok(if ok { 0 } else { 1 })
}

fn expander_report_json(r: &crate::lab::ExpanderReport) -> String {
    serde_json::json!({
        "n": r.n,
        "d": r.d,
        "lambda": r.lambda,
        "lambda_bound": r.lambda_bound,
        "lambda_ok": r.lambda_ok,
        "constants": r.constants.to_string(),
        "seed": r.seed,
        "expansion": {
            "delta": r.expansion.delta,
            "p1_threshold": r.expansion.p1_threshold,
            "p1_checked": r.expansion.p1_checked,
            "p1_failures": r.expansion.p1_failures,
            "p1_witness": r.expansion.p1_witness,
            "p2_threshold": r.expansion.p2_threshold,
            "p2_checked": r.expansion.p2_checked,
            "p2_failures": r.expansion.p2_failures,
            "p2_worst_ratio": if r.expansion.p2_worst_ratio.is_finite() { Some(r.expansion.p2_worst_ratio) } else { None },
            "p2_witness": r.expansion.p2_witness,
        },
        "mixing": {
            "samples": r.mixing.samples,
            "violations": r.mixing.violations.len(),
            "worst_ratio": r.mixing.worst_ratio,
        },
        "self_edges": r.self_edges.as_ref().map(|s| serde_json::json!({
            "eps": s.eps,
            "eta": s.eta,
            "samples": s.samples,
            "failures": s.failures,
            "worst_ratio": s.worst_ratio,
            "witness": s.witness,
        })),
    })
    .to_string()
}

fn cmd_attack(a: AttackArgs) -> Result<i32> {
    let [spanner_path, inst_path] = a.input.as_slice() else {
        return Err(Error::Usage(
            "attack needs --in <spanner> <instance>".into(),
        ));
    };
    let rs = io::read_reliable_spanner(spanner_path)?;
    let inst = read_instance(inst_path)?;
    let metric = instance_metric(&inst)?;
    if metric.n() != rs.n {
        return Err(Error::Usage(format!(
            "instance has {} points but spanner has {}",
            metric.n(),
            rs.n
        )));
    }
    let kind = parse_attack_kind(&a.kind, a.size)?;
    let spec = AttackSpec { kind, seed: a.seed };
    let b = crate::attack::make_attack(&spec, &rs)?;
    let dmg = constructive_damage(&rs, &b)?;
    let rep = verify_residual(&rs, &metric, &b, &dmg.b_hat, rs.improved_bound, rs.hop_adv);
    println!(
        "attack {}: |B| = {}, |B^| = {}, loss {:.4}",
        a.kind,
        b.len(),
        dmg.b_hat.len(),
        dmg.loss
    );
    println!(
        "residual: {} pairs checked, worst stretch {:.4} (bound {:.4}), worst hops {} (bound {}), {} violations",
        rep.pairs_checked,
        rep.worst_stretch,
        rs.improved_bound,
        rep.worst_hops,
        rs.hop_adv,
        rep.violation_count
    );
    if let Some(path) = a.out {
        let json = serde_json::json!({
            "kind": a.kind,
            "seed": a.seed,
            "b": b,
            "b_hat": dmg.b_hat,
            "loss": dmg.loss,
            "worst_stretch": rep.worst_stretch,
            "worst_hops": rep.worst_hops,
            "violations": rep.violation_count,
            "stretch_bound": rs.improved_bound,
            "hop_bound": rs.hop_adv,
        });
        io::atomic_write(&path, &json.to_string())?;
    }
    Ok(if rep.passed() { 0 } else { 1 })
}

fn parse_attack_kind(kind: &str, size: usize) -> Result<AttackKind> {
    match kind {
        "random" => Ok(AttackKind::Random { size }),
        "high_degree" => Ok(AttackKind::HighDegree { delta: None }),
        "center_targeted" => Ok(AttackKind::CenterTargeted { size }),
        "cluster_targeted" => Ok(AttackKind::ClusterTargeted { size }),
        other => Err(Error::Usage(format!("unknown attack kind {other:?}"))),
    }
}

fn cmd_eval(a: EvalArgs) -> Result<i32> {
    let inst = read_instance(&a.input)?;
    let params = build_params(a.theta, a.eps, a.t, a.k, &a.mode, a.seed)?;
    let kind = parse_attack_kind(&a.kind, a.size)?;
    let report = crate::attack::run_experiment(
        &inst,
        a.family.parse()?,
        a.model.parse()?,
        &params,
        &[AttackSpec {
            kind,
            seed: crate::util::derive_seed(a.seed, 0xa77),
        }],
        &ExperimentConfig {
            trials: a.trials,
            base_seed: a.seed,
            run_greedy: a.greedy,
        },
    )?;
    io::atomic_write(&a.out, &report.csv())?;
    let config_path = a.out.with_extension("config.json");
    io::atomic_write(&config_path, &report.config)?;
    println!(
        "{} trials: mean loss {:.4}, max loss {:.4}, worst stretch {:.4}, worst hops {}, {} violations",
        report.rows.len(),
        report.mean_loss_constructive,
        report.max_loss_constructive,
        report.worst_stretch,
        report.worst_hops,
        report.total_violations
    );
    println!("wrote {} and {}", a.out.display(), config_path.display());
    Ok(if report.total_violations == 0 { 0 } else { 1 })
}

fn cmd_suite(a: SuiteArgs) -> Result<i32> {
    let results = match a.name.as_str() {
        "smoke" => crate::suite::smoke(),
        "acceptance" => crate::suite::acceptance(),
        other => return Err(Error::Usage(format!("unknown suite {other:?}"))),
    };
    Ok(if crate::suite::report(&results) { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(|p| p.to_string()).collect()
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(dispatch(&args("bogus-subcommand")), 2);
        assert_eq!(dispatch(&args("gen --kind nosuch --n 4 --out /tmp/x")), 2);
    }

    #[test]
    fn gen_cover_check_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let g = dir.path().join("g.json");
        let c = dir.path().join("c.json");
        let code = dispatch(&args(&format!(
            "gen --kind grid --n 16 --out {}",
            g.display()
        )));
        assert_eq!(code, 0);
        let code = dispatch(&args(&format!(
            "cover --method planar --eps 0.5 --in {} --out {}",
            g.display(),
            c.display()
        )));
        assert_eq!(code, 0);
        let code = dispatch(&args(&format!(
            "cover-check --t 2.5 --in {} {}",
            g.display(),
            c.display()
        )));
        assert_eq!(code, 0);
        // a deliberately too-strict t is a validation failure
        let code = dispatch(&args(&format!(
            "cover-check --t 1.01 --in {} {}",
            g.display(),
            c.display()
        )));
        assert_eq!(code, 1);
    }

    #[test]
    fn spanner_attack_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let g = dir.path().join("t.txt");
        let s = dir.path().join("s.json");
        let rep = dir.path().join("attack.json");
        assert_eq!(
            dispatch(&args(&format!(
                "gen --kind random_tree --n 32 --seed 5 --out {}",
                g.display()
            ))),
            0
        );
        assert_eq!(
            dispatch(&args(&format!(
                "spanner --family tree --model oblivious --theta 0.25 --eps 0.5 --seed 3 --in {} --out {}",
                g.display(),
                s.display()
            ))),
            0
        );
        assert_eq!(
            dispatch(&args(&format!(
                "attack --kind random --size 3 --seed 9 --in {} {} --out {}",
                s.display(),
                g.display(),
                rep.display()
            ))),
            0
        );
        assert!(rep.exists());
    }
}
