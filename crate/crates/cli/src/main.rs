use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypercolor_core::bounds::{
    self, check_theorem4, find_min_k_condition3, omega_max, BoundId, BoundInputs, BoundReport, Condition3,
    OmegaRule, Theorem4Report,
};
use hypercolor_core::hypergraph::{read_hypergraph, write_hypergraph};
use hypercolor_core::model::{expected_edge_count, sample, ModelError, ModelParams};
use hypercolor_core::oracle::{
    chromatic_number, is_list_colorable, is_r_choosable_over_palette, is_r_colorable, ChromaticNumber, Choosability,
    Decision, OracleError, OracleLimits,
};
use hypercolor_core::recolor::{color, color_from_lists, color_par, derive_params, RecoloringParams};
use hypercolor_core::sweep::{run_sweep, write_csv, Method, PGrid, SweepConfig};
use hypercolor_core::{Coloring, Hypergraph, ListAssignment, LogValue};

const EXIT_NO: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "hypercolor", version, about = "Random hypergraph coloring toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample H(n, k, p) and write it in the text format.
    Gen(GenArgs),
    /// Structural statistics of a hypergraph file.
    Analyze(AnalyzeArgs),
    /// Run the randomized recoloring colorer.
    Color(ColorArgs),
    /// Exact colorability, chromatic number or choosability.
    Oracle(OracleArgs),
    /// Evaluate a named bound, the recoloring theorem's conditions, or the smallest k satisfying them.
    Bounds(BoundsArgs),
    /// Monte Carlo sweep over edge probabilities, written as CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Intersection size for the l-simplicity check.
    #[arg(long, default_value_t = 2)]
    l: usize,
    /// Triangle budget per edge; defaults to floor(sqrt(ln k / ln ln k)), at least 1.
    #[arg(long)]
    omega: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ColorerFlags {
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 4.0)]
    b: f64,
    #[arg(long)]
    omega: Option<u64>,
    /// Override the derived q.
    #[arg(long)]
    q: Option<f64>,
    /// Override the derived t.
    #[arg(long)]
    t: Option<u64>,
}

#[derive(Args)]
struct ColorArgs {
    file: PathBuf,
    #[arg(long, short)]
    r: usize,
    #[arg(long, default_value_t = 100)]
    max_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Color from lists: one line per vertex holding r distinct colors.
    #[arg(long)]
    lists: Option<PathBuf>,
    /// Run trials on all cores (same result as the serial run).
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    flags: ColorerFlags,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OracleArgs {
    file: PathBuf,
    #[arg(long, short, required_unless_present = "chromatic")]
    r: Option<usize>,
    /// Compute the chromatic number instead of deciding r-colorability.
    #[arg(long, conflicts_with_all = ["lists", "palette"])]
    chromatic: bool,
    /// Decide colorability from these lists.
    #[arg(long, conflicts_with = "palette")]
    lists: Option<PathBuf>,
    /// Decide r-choosability over lists drawn from {1, ..., palette}.
    #[arg(long)]
    palette: Option<usize>,
    #[arg(long, default_value_t = OracleLimits::default().max_vertices)]
    max_vertices: usize,
    /// Search nodes per colorability query.
    #[arg(long, default_value_t = OracleLimits::default().max_assignments)]
    budget: u64,
    #[arg(long, default_value_t = OracleLimits::default().max_list_assignments)]
    max_list_assignments: u64,
}

#[derive(Args)]
struct BoundsArgs {
    /// Bound identifier, e.g. thm2 or erdlov_lower.
    #[arg(value_parser = parse_bound_id, required_unless_present_any = ["check_theorem4", "min_k", "list"])]
    id: Option<BoundId>,
    /// Evaluate the recoloring theorem's conditions at (k, r, omega, alpha, b, d).
    #[arg(long, conflicts_with_all = ["id", "min_k"])]
    check_theorem4: bool,
    /// Smallest k in [k-lo, k-hi] at which the summand condition holds.
    #[arg(long, conflicts_with = "id")]
    min_k: bool,
    /// List the known bound identifiers.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_parser = parse_count)]
    k: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Edge probability to compare against a threshold bound.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    omega: Option<u64>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 4.0)]
    b: f64,
    /// Edge-degree bound; defaults to the largest admissible value.
    #[arg(long, value_parser = parse_count)]
    d: Option<u64>,
    #[arg(long, value_parser = parse_count, default_value = "3")]
    k_lo: u64,
    #[arg(long, value_parser = parse_count, default_value = "1e15")]
    k_hi: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with the sweep configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// Comma-separated edge probabilities.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["p_from", "p_to", "p_steps"])]
    p: Option<Vec<f64>>,
    #[arg(long, requires_all = ["p_to", "p_steps"])]
    p_from: Option<f64>,
    #[arg(long)]
    p_to: Option<f64>,
    #[arg(long)]
    p_steps: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    method: Option<Method>,
    #[arg(long)]
    max_trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    omega: Option<u64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn parse_bound_id(s: &str) -> Result<BoundId, String> {
    s.parse().map_err(|_| {
        let known: Vec<&str> = BoundId::ALL.iter().map(|b| b.name()).collect();
        format!("unknown bound {s:?}; known: {}", known.join(", "))
    })
}

/// Accepts plain integers and exact scientific forms such as `1e13`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 {
        Ok(v as u64)
    } else {
        Err(format!("not a nonnegative integer: {s:?}"))
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn usage(message: impl std::fmt::Display) -> Failure {
    fail(EXIT_USAGE, message.to_string())
}

fn io_err(path: &Path, e: io::Error) -> Failure {
    fail(EXIT_UNKNOWN, format!("{}: {e}", path.display()))
}

fn model_err(e: ModelError) -> Failure {
    match e {
        ModelError::Capacity { .. } | ModelError::CoupledCapacity { .. } => fail(EXIT_UNKNOWN, e.to_string()),
        _ => usage(e),
    }
}

fn oracle_err(e: OracleError) -> Failure {
    match e {
        OracleError::Params(_) => usage(e),
        _ => fail(EXIT_UNKNOWN, e.to_string()),
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Color(a) => cmd_color(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn load(path: &Path) -> Result<Hypergraph, Failure> {
    read_hypergraph(&read_file(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_lists(path: &Path, h: &Hypergraph) -> Result<ListAssignment, Failure> {
    let text = read_file(path)?;
    let mut lists = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let list = line
            .split_whitespace()
            .map(|t| t.parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| usage(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        lists.push(list);
    }
    if lists.len() != h.n() {
        return Err(usage(format!("{}: {} lists for {} vertices", path.display(), lists.len(), h.n())));
    }
    let r = lists[0].len();
    ListAssignment::new(r, lists).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn print_pairs<K: std::fmt::Display, V: std::fmt::Display>(pairs: impl IntoIterator<Item = (K, V)>) {
    for (k, v) in pairs {
        println!("{k}={v}");
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
}

fn coloring_string(c: &Coloring) -> String {
    c.as_slice().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let params = ModelParams::new(a.n, a.k, a.p, a.seed).map_err(model_err)?;
    let h = sample(&params).map_err(model_err)?;
    let text = write_hypergraph(&h);
    let expected = expected_edge_count(&params);
    match &a.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| io_err(path, e))?;
            println!("m={}", h.m());
            println!("expected_m={expected}");
        }
        None => {
            print!("{text}");
            eprintln!("m={} expected_m={expected}", h.m());
        }
    }
    Ok(0)
}

fn cmd_analyze(a: AnalyzeArgs) -> Outcome {
    let h = load(&a.file)?;
    if a.l == 0 || a.l > h.k() {
        return Err(usage(format!("l must lie in 1..={}, got {}", h.k(), a.l)));
    }
    let omega = a.omega.unwrap_or_else(|| omega_max(h.k() as f64) as usize);
    let report = h.structural_report(omega);
    let mut pairs = report.to_key_values();
    pairs.push(("l", a.l.to_string()));
    pairs.push(("l_simple", h.is_l_simple(a.l).to_string()));
    if a.json {
        let map: serde_json::Map<String, serde_json::Value> = pairs
            .into_iter()
            .map(|(k, v)| {
                let value = serde_json::from_str(&v).unwrap_or(serde_json::Value::String(v));
                (k.to_string(), value)
            })
            .collect();
        print_json(&map);
    } else {
        print_pairs(pairs);
    }
    Ok(0)
}

fn colorer_params(h: &Hypergraph, r: usize, f: &ColorerFlags) -> Result<RecoloringParams, Failure> {
    let k = h.k();
    let omega = f.omega.unwrap_or_else(|| omega_max(k as f64));
    let mut params = derive_params(k, r, f.alpha, f.b, omega).map_err(usage)?;
    if let Some(t) = f.t {
        params = params.with_t(t);
    }
    if let Some(q) = f.q {
        params = params.with_q(q).map_err(usage)?;
    }
    Ok(params)
}

fn cmd_color(a: ColorArgs) -> Outcome {
    let h = load(&a.file)?;
    if a.max_trials == 0 {
        return Err(usage("max-trials must be at least 1"));
    }
    let params = colorer_params(&h, a.r, &a.flags)?;
    let outcome = match &a.lists {
        Some(path) => {
            let lists = load_lists(path, &h)?;
            color_from_lists(&h, &lists, &params, a.max_trials, a.seed)
        }
        None if a.parallel => color_par(&h, &params, a.max_trials, a.seed),
        None => color(&h, &params, a.max_trials, a.seed),
    }
    .map_err(usage)?;
    if a.json {
        print_json(&outcome);
    } else {
        println!("success={}", outcome.success);
        println!("trials={}", outcome.trials_used);
        println!("t={} q={} p_recolor={} omega={}", params.t, params.q, params.p_recolor, params.omega);
        let flags = outcome.flags;
        println!("condition1={} condition2={} q_capped={}", flags.condition1, flags.condition2, flags.q_capped);
        if let Some(c) = &outcome.coloring {
            println!("recolored={}", outcome.recolored_count.unwrap_or(0));
            println!("coloring={}", coloring_string(c));
        }
    }
    Ok(if outcome.success { 0 } else { EXIT_NO })
}

fn decision_exit(d: &Decision) -> u8 {
    match d {
        Decision::Colorable(_) => 0,
        Decision::NotColorable => EXIT_NO,
        Decision::Unknown => EXIT_UNKNOWN,
    }
}

fn print_decision(d: &Decision) {
    match d {
        Decision::Colorable(c) => {
            println!("colorable=true");
            println!("coloring={}", coloring_string(c));
        }
        Decision::NotColorable => println!("colorable=false"),
        Decision::Unknown => println!("colorable=unknown"),
    }
}

fn cmd_oracle(a: OracleArgs) -> Outcome {
    let h = load(&a.file)?;
    let limits =
        OracleLimits { max_vertices: a.max_vertices, max_assignments: a.budget, max_list_assignments: a.max_list_assignments };
    if a.chromatic {
        return match chromatic_number(&h, &limits).map_err(oracle_err)? {
            ChromaticNumber::Exact { chi, witness } => {
                println!("chi={chi}");
                println!("coloring={}", coloring_string(&witness));
                Ok(0)
            }
            ChromaticNumber::Unknown { at_least } => {
                println!("chi=unknown");
                println!("chi_at_least={at_least}");
                Ok(EXIT_UNKNOWN)
            }
        };
    }
    let r = a.r.expect("clap requires r without --chromatic");
    if let Some(path) = &a.lists {
        let lists = load_lists(path, &h)?;
        let d = is_list_colorable(&h, &lists, &limits).map_err(oracle_err)?;
        print_decision(&d);
        return Ok(decision_exit(&d));
    }
    if let Some(palette) = a.palette {
        return match is_r_choosable_over_palette(&h, r, palette, &limits).map_err(oracle_err)? {
            Choosability::ChoosableOverPalette => {
                println!("choosable=true");
                Ok(0)
            }
            Choosability::NotChoosable(lists) => {
                println!("choosable=false");
                for v in 1..=lists.len() {
                    let shown: Vec<String> = lists.list(v).iter().map(u32::to_string).collect();
                    println!("list.{v}={}", shown.join(" "));
                }
                Ok(EXIT_NO)
            }
            Choosability::Unknown => {
                println!("choosable=unknown");
                Ok(EXIT_UNKNOWN)
            }
        };
    }
    let d = is_r_colorable(&h, r, &limits).map_err(oracle_err)?;
    print_decision(&d);
    Ok(decision_exit(&d))
}

fn log_pairs(name: &str, v: LogValue) -> Vec<(String, String)> {
    let mut out = vec![(format!("{name}.ln"), v.ln().to_string())];
    if let Some(x) = v.representable() {
        out.push((name.to_string(), x.to_string()));
    }
    out
}

fn condition3_pairs(c: &Condition3) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (i, s) in c.summands.iter().enumerate() {
        match s {
            Some(v) => out.extend(log_pairs(&format!("summand{}", i + 1), *v)),
            None => out.push((format!("summand{}", i + 1), "undefined".into())),
        }
    }
    match c.total {
        Some(v) => out.extend(log_pairs("condition3_total", v)),
        None => out.push(("condition3_total".into(), "undefined".into())),
    }
    out.push(("dominant_summand".into(), c.dominant().to_string()));
    out.push(("condition3".into(), c.holds.to_string()));
    out
}

fn theorem4_pairs(rep: &Theorem4Report) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vec![
        ("k".into(), rep.k.to_string()),
        ("r".into(), rep.r.to_string()),
        ("omega".into(), rep.omega.to_string()),
        ("alpha".into(), rep.alpha.to_string()),
        ("b".into(), rep.b.to_string()),
        ("d".into(), rep.d.to_string()),
        ("t".into(), rep.t.to_string()),
        ("q".into(), rep.q.to_string()),
        ("p_recolor".into(), rep.p_recolor.to_string()),
        ("condition1".into(), rep.condition1.to_string()),
        ("condition2".into(), rep.condition2.to_string()),
    ];
    out.extend(condition3_pairs(&rep.condition3));
    out.extend(log_pairs("d_max", rep.d_max));
    out.push(("d_admissible".into(), rep.d_admissible.to_string()));
    match &rep.w {
        Some(w) => {
            out.extend(log_pairs("w", w.value));
            out.push(("w_within_quarter".into(), w.within_quarter.to_string()));
        }
        None => out.push(("w".into(), "undefined".into())),
    }
    out.push(("guarantees_colorable".into(), rep.guarantees_colorable.to_string()));
    out
}

fn cmd_bounds(a: BoundsArgs) -> Outcome {
    if a.list {
        for id in BoundId::ALL {
            println!("{}\t{:?}", id.name(), id.kind());
        }
        return Ok(0);
    }
    if a.check_theorem4 {
        let k = a.k.ok_or_else(|| usage("--check-theorem4 needs --k"))?;
        let r = a.r.unwrap_or(2);
        let omega = a.omega.unwrap_or_else(|| omega_max(k as f64));
        let d = match a.d {
            Some(d) => d,
            None => {
                let probe = check_theorem4(k, r, omega, a.alpha, a.b, 0).map_err(usage)?;
                let ln = probe.d_max.ln();
                if ln < 62.0 * std::f64::consts::LN_2 { probe.d_max.value().floor().max(0.0) as u64 } else { 1 << 62 }
            }
        };
        let rep = check_theorem4(k, r, omega, a.alpha, a.b, d).map_err(usage)?;
        if a.json {
            print_json(&rep);
        } else {
            print_pairs(theorem4_pairs(&rep));
        }
        return Ok(if rep.guarantees_colorable { 0 } else { EXIT_NO });
    }
    if a.min_k {
        let rule = a.omega.map_or(OmegaRule::LogRatio, OmegaRule::Constant);
        let found = find_min_k_condition3(rule, a.alpha, a.b, a.k_lo, a.k_hi).map_err(usage)?;
        return Ok(match found {
            Some(k) => {
                println!("min_k={k}");
                let c = bounds::condition3(k, rule.omega(k), a.alpha, a.b).map_err(usage)?;
                print_pairs(condition3_pairs(&c));
                0
            }
            None => {
                println!("min_k=none");
                EXIT_NO
            }
        });
    }
    let id = a.id.expect("clap requires an id");
    let inputs = BoundInputs { n: a.n, k: a.k, r: a.r, eps: a.eps, c: a.c, delta: a.delta, p: a.p };
    let rep = BoundReport::evaluate(id, &inputs).map_err(usage)?;
    if a.json {
        print_json(&rep);
    } else {
        println!("bound={}", rep.bound_id);
        println!("kind={:?}", rep.kind);
        print_pairs(log_pairs("value", rep.value));
        if let Some(s) = rep.satisfied {
            println!("satisfied={s}");
        }
    }
    Ok(match rep.satisfied {
        Some(false) => EXIT_NO,
        _ => 0,
    })
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut value = match &a.config {
        Some(path) => serde_json::from_str::<serde_json::Value>(&read_file(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        None => serde_json::json!({}),
    };
    let obj = value.as_object_mut().ok_or_else(|| usage("sweep config must be a JSON object"))?;
    let mut set = |key: &str, v: Option<serde_json::Value>| {
        if let Some(v) = v {
            obj.insert(key.to_string(), v);
        }
    };
    use serde_json::json;
    set("n", a.n.map(|v| json!(v)));
    set("k", a.k.map(|v| json!(v)));
    set("r", a.r.map(|v| json!(v)));
    set("p_grid", a.p.as_ref().map(|v| json!(v)));
    if let (Some(from), Some(to), Some(steps)) = (a.p_from, a.p_to, a.p_steps) {
        set("p_grid", Some(serde_json::to_value(PGrid::Linear { from, to, steps }).expect("plain data")));
    }
    set("samples_per_point", a.samples.map(|v| json!(v)));
    set("method", a.method.map(|v| serde_json::to_value(v).expect("plain data")));
    set("max_trials", a.max_trials.map(|v| json!(v)));
    set("seed", a.seed.map(|v| json!(v)));
    set("alpha", a.alpha.map(|v| json!(v)));
    set("b", a.b.map(|v| json!(v)));
    set("omega", a.omega.map(|v| json!(v)));
    set("q", a.q.map(|v| json!(v)));
    set("threads", a.threads.map(|v| json!(v)));
    serde_json::from_value(value).map_err(|e| usage(format!("sweep config: {e}")))
}

fn cmd_sweep(a: SweepArgs) -> Outcome {
    let config = sweep_config(&a)?;
    let records = run_sweep(&config).map_err(usage)?;
    let mut buf = Vec::new();
    write_csv(&records, &mut buf).map_err(|e| fail(EXIT_UNKNOWN, e.to_string()))?;
    match &a.out {
        Some(path) => fs::write(path, &buf).map_err(|e| io_err(path, e))?,
        None => io::stdout().write_all(&buf).map_err(|e| fail(EXIT_UNKNOWN, e.to_string()))?,
    }
    let unknown: usize = records.iter().map(|r| r.unknown).sum();
    if unknown > 0 {
        eprintln!("warning: {unknown} samples without a verdict");
    }
    Ok(0)
}
