//! Command-line front end: solve, exact, check, gen, bench.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use ufpp::gen::{gen_random, GenParams, ProfitMode};
use ufpp::hardness::{brooks_coloring, mis_brute, parse_graph, reduce, uniformize};
use ufpp::its::{max_its, rect_of};
use ufpp::medium::DEFAULT_STATE_BUDGET;
use ufpp::model::{edge_loads, emit_instance, parse_instance, Instance, Solution};
use ufpp::oracle::{brute_force_capped, exact_sweep, BRUTE_FORCE_CAP};
use ufpp::pipeline::{solve, Algorithm, SolveConfig};
use ufpp::{Error, Result};

#[derive(Parser)]
#[command(name = "ufpp", version, about = "Unsplittable flow on a path: solvers, oracles, generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an approximation algorithm and emit a solution document
    Solve(SolveArgs),
    /// Run a ground-truth solver
    Exact(ExactArgs),
    /// Validate a solution document against an instance
    Check(CheckArgs),
    /// Generate instances
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run algorithms over a directory of instances and write a CSV
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Main,
    Fast,
    Large,
    Small,
    Ra,
}

impl AlgoArg {
    fn name(self) -> &'static str {
        match self {
            AlgoArg::Main => "main",
            AlgoArg::Fast => "fast",
            AlgoArg::Large => "large",
            AlgoArg::Small => "small",
            AlgoArg::Ra => "ra",
        }
    }
    fn algorithm(self) -> Algorithm {
        match self {
            AlgoArg::Main => Algorithm::Main,
            AlgoArg::Fast => Algorithm::Fast,
            AlgoArg::Large => Algorithm::Large,
            AlgoArg::Small => Algorithm::Small,
            AlgoArg::Ra => Algorithm::Ra,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// accuracy parameter; rationals accept "1", "1/2" or "0.25"
    #[arg(long, default_value = "1")]
    eps: String,
    /// small-task threshold: demands up to (1 - gamma) of the bottleneck
    #[arg(long, default_value = "1/2")]
    gamma: String,
    /// largeness parameter for --algo large
    #[arg(long, default_value_t = 2)]
    k: i64,
    /// capacity overshoot budget for --algo ra
    #[arg(long = "beta-aug", default_value = "1/2")]
    beta_aug: String,
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// write the solution document here instead of stdout
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// write task rectangles and the capacity profile for plotting
    #[arg(long = "dump-rects")]
    dump_rects: Option<PathBuf>,
    /// report repair-sweep activations on stderr
    #[arg(long = "log-repairs")]
    log_repairs: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactMethod {
    /// exhaustive subset search
    Brute,
    /// exact dynamic program over edge states
    Sweep,
    /// independent-task-set optimum (corner dynamic program)
    Its,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long, value_enum)]
    method: ExactMethod,
    #[arg(short = 'i', long)]
    input: PathBuf,
    /// task-count cutoff for the exhaustive subset search
    #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
    cap: usize,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(short = 'i', long)]
    input: PathBuf,
    #[arg(short = 's', long)]
    solution: PathBuf,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random feasible instance, deterministic in the seed
    Random(GenRandomArgs),
    /// Instance with a certified optimum derived from a graph
    Hardness(GenHardnessArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfitStyle {
    Uniform,
    Proportional,
}

#[derive(Args)]
struct GenRandomArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    maxcap: i64,
    #[arg(long)]
    maxdemand: i64,
    #[arg(long = "profit-style", value_enum, default_value = "uniform")]
    profit_style: ProfitStyle,
    #[arg(long)]
    seed: u64,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenHardnessArgs {
    /// graph file in the `graph v1` format
    #[arg(long)]
    graph: PathBuf,
    /// raise all capacities to the maximum with mandatory dummy tasks
    #[arg(long)]
    uniform: bool,
    /// instance file; the certificate lands next to it with `.cert` appended
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// directory of *.ufpp instances
    #[arg(long)]
    dir: PathBuf,
    /// comma-separated list: main,fast,large,small
    #[arg(long)]
    algos: String,
    #[arg(long, default_value = "1")]
    eps: String,
    #[arg(long)]
    csv: PathBuf,
}

/// On-disk solution document.
#[derive(Serialize, Deserialize)]
struct SolutionDoc {
    schema: String,
    algorithm: String,
    profit: i64,
    selected: Vec<usize>,
    feasible: bool,
    /// allowed capacity overshoot for augmentation runs
    #[serde(skip_serializing_if = "Option::is_none")]
    augmented: Option<AugmentedDoc>,
}

#[derive(Serialize, Deserialize)]
struct AugmentedDoc {
    numerator: String,
    denominator: String,
}

const SOLUTION_SCHEMA: &str = "ufpp.solution.v1";

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.exit_code() == 0 { 0 } else { 1 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Budget { .. } => 3,
                _ => 2,
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Check(args) => cmd_check(args),
        Command::Gen(GenCommand::Random(args)) => cmd_gen_random(args),
        Command::Gen(GenCommand::Hardness(args)) => cmd_gen_hardness(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content)
        .map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_to_string(path)?)
}

/// DP state budget, overridable through UFPP_STATE_BUDGET.
fn state_budget() -> Result<usize> {
    match std::env::var("UFPP_STATE_BUDGET") {
        Ok(raw) => raw
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad UFPP_STATE_BUDGET '{raw}'"))),
        Err(_) => Ok(DEFAULT_STATE_BUDGET),
    }
}

/// Accepts "a/b", plain integers, and decimal notation.
fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let fail = || Error::Invalid(format!("cannot parse rational '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| fail())?;
        let d: BigInt = d.trim().parse().map_err(|_| fail())?;
        if d.is_zero() {
            return Err(Error::Invalid(format!("zero denominator in '{s}'")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail());
        }
        let negative = int.starts_with('-');
        let whole = int.trim_start_matches(['-', '+']);
        if !whole.is_empty() && !whole.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail());
        }
        let whole: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().map_err(|_| fail())? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| fail())?;
        let magnitude = whole * &scale + frac;
        let num = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| fail())?;
    Ok(BigRational::from(n))
}

fn emit_solution(doc: &SolutionDoc, output: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::Internal(format!("serialize: {e}")))?;
    text.push('\n');
    match output {
        Some(path) => write_file(path, &text)?,
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
        }
    }
    Ok(())
}

fn solution_doc(inst: &Instance, solution: &Solution, augmented: Option<(BigInt, BigInt)>) -> Result<SolutionDoc> {
    let feasible = match &augmented {
        None => ufpp::model::check_feasible(inst, &solution.selected)?.feasible,
        Some(_) => true, // certified against the inflated capacities upstream
    };
    Ok(SolutionDoc {
        schema: SOLUTION_SCHEMA.into(),
        algorithm: solution.algorithm_tag.clone(),
        profit: solution.profit,
        selected: solution.selected.clone(),
        feasible,
        augmented: augmented.map(|(n, d)| AugmentedDoc {
            numerator: n.to_string(),
            denominator: d.to_string(),
        }),
    })
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let inst = load_instance(&args.input)?;
    let config = SolveConfig {
        algorithm: args.algo.algorithm(),
        eps: parse_rational(&args.eps)?,
        gamma: parse_rational(&args.gamma)?,
        k_large: args.k,
        beta_aug: parse_rational(&args.beta_aug)?,
        budget: state_budget()?,
    };
    let report = solve(&inst, &config)?;
    if args.log_repairs {
        eprintln!("repair sweeps: {}", report.repairs);
    }
    if let Some(path) = &args.dump_rects {
        write_file(path, &render_rects(&inst))?;
    }
    let doc = solution_doc(&inst, &report.solution, report.augmented)?;
    emit_solution(&doc, args.output.as_deref())?;
    Ok(0)
}

/// Rectangle geometry and the capacity step profile, for plotting.
fn render_rects(inst: &Instance) -> String {
    let mut out = String::from("# task rectangles: id x1 y1 x2 y2 (y1 top, y2 bottom)\n");
    for task in &inst.tasks {
        let r = rect_of(inst, task);
        out.push_str(&format!("rect {} {} {} {} {}\n", task.id, r.x1, r.y1, r.x2, r.y2));
    }
    out.push_str("# capacity profile polyline: x y\n");
    for (e, &u) in inst.capacities.iter().enumerate() {
        out.push_str(&format!("profile {e} {u}\nprofile {} {u}\n", e + 1));
    }
    out
}

fn cmd_exact(args: ExactArgs) -> Result<i32> {
    let inst = load_instance(&args.input)?;
    let all: Vec<usize> = (0..inst.tasks.len()).collect();
    let solution = match args.method {
        ExactMethod::Brute => brute_force_capped(&inst, &all, args.cap)?,
        ExactMethod::Sweep => exact_sweep(&inst, &all, state_budget()?)?,
        ExactMethod::Its => max_its(&inst)?.solution,
    };
    let doc = solution_doc(&inst, &solution, None)?;
    emit_solution(&doc, args.output.as_deref())?;
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let inst = load_instance(&args.input)?;
    let raw = read_to_string(&args.solution)?;
    let doc: SolutionDoc = serde_json::from_str(&raw)
        .map_err(|e| Error::Invalid(format!("bad solution document: {e}")))?;
    if doc.schema != SOLUTION_SCHEMA {
        return Err(Error::Invalid(format!("unsupported schema '{}'", doc.schema)));
    }
    // recomputes profit and validates ids
    let solution = Solution::new(&inst, doc.selected.clone(), "check")?;
    if solution.profit != doc.profit {
        println!(
            "profit mismatch: document says {}, selection is worth {}",
            doc.profit, solution.profit
        );
        return Ok(2);
    }
    let loads = edge_loads(&inst, &solution.selected)?;
    let bound = doc
        .augmented
        .as_ref()
        .map(|a| -> Result<(BigInt, BigInt)> {
            let num: BigInt = a.numerator.parse().map_err(|_| Error::Invalid("bad augmentation numerator".into()))?;
            let den: BigInt = a.denominator.parse().map_err(|_| Error::Invalid("bad augmentation denominator".into()))?;
            if !num.is_positive() || !den.is_positive() {
                return Err(Error::Invalid("augmentation factor must be positive".into()));
            }
            Ok((num, den))
        })
        .transpose()?;
    let mut violations = 0usize;
    for (e, (&load, &u)) in loads.iter().zip(&inst.capacities).enumerate() {
        let ok = match &bound {
            None => load <= u,
            Some((num, den)) => BigInt::from(load) * den <= BigInt::from(u) * num,
        };
        if !ok {
            println!("edge {e}: load {load} exceeds capacity {u}");
            violations += 1;
        }
    }
    if violations > 0 {
        println!("infeasible: {violations} edge(s) over capacity");
        return Ok(2);
    }
    println!("ok: profit {} with {} task(s)", solution.profit, solution.selected.len());
    Ok(0)
}

fn cmd_gen_random(args: GenRandomArgs) -> Result<i32> {
    let params = GenParams {
        n: args.n,
        m: args.m,
        cap_max: args.maxcap,
        demand_max: args.maxdemand,
        profit: match args.profit_style {
            ProfitStyle::Uniform => ProfitMode::Uniform,
            ProfitStyle::Proportional => ProfitMode::Proportional,
        },
        seed: args.seed,
    };
    let inst = gen_random(&params)?;
    let text = emit_instance(&inst);
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_gen_hardness(args: GenHardnessArgs) -> Result<i32> {
    let graph = parse_graph(&read_to_string(&args.graph)?)?;
    let alpha = brooks_coloring(&graph)?;
    let reduction = reduce(&graph, &alpha)?;
    let (instance, shift) = if args.uniform {
        uniformize(&reduction.instance)?
    } else {
        (reduction.instance.clone(), 0)
    };
    write_file(&args.output, &emit_instance(&instance))?;

    let cert = match mis_brute(&graph) {
        Ok(mis) => {
            let opt = reduction
                .expected_opt(mis)?
                .checked_add(shift)
                .ok_or(Error::Overflow("certificate profit"))?;
            format!("expected_opt = {opt}\n")
        }
        Err(Error::Precondition(_)) => "expected_opt = UNKNOWN\n".to_string(),
        Err(other) => return Err(other),
    };
    let mut cert_path = args.output.into_os_string();
    cert_path.push(".cert");
    write_file(Path::new(&cert_path), &cert)?;
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let mut algos = Vec::new();
    for name in args.algos.split(',') {
        let name = name.trim();
        let algo = match name {
            "main" => AlgoArg::Main,
            "fast" => AlgoArg::Fast,
            "large" => AlgoArg::Large,
            "small" => AlgoArg::Small,
            // augmented runs may overshoot the strict optimum, which would
            // break the ratio <= 1 contract of the CSV
            "ra" => return Err(Error::Invalid(
                "ra overshoots capacities and cannot be ranked against strict optima; use solve".into(),
            )),
            other => return Err(Error::Invalid(format!("unknown algorithm '{other}'"))),
        };
        algos.push(algo);
    }
    if algos.is_empty() {
        return Err(Error::Invalid("empty algorithm list".into()));
    }
    let eps = parse_rational(&args.eps)?;
    let budget = state_budget()?;

    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", args.dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "ufpp"))
        .collect();
    files.sort();

    let mut csv = String::from("version,instance,n,m,algorithm,profit,opt,ratio,wall_ms\n");
    for path in &files {
        let inst = load_instance(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let all: Vec<usize> = (0..inst.tasks.len()).collect();
        let opt = match exact_sweep(&inst, &all, budget) {
            Ok(sol) => Some(sol.profit),
            Err(Error::Budget { .. }) => {
                eprintln!("opt skipped (budget): {name}");
                None
            }
            Err(other) => return Err(other),
        };
        for algo in &algos {
            let config = SolveConfig {
                algorithm: algo.algorithm(),
                eps: eps.clone(),
                budget,
                ..SolveConfig::default()
            };
            let start = Instant::now();
            let report = solve(&inst, &config)?;
            let wall_ms = start.elapsed().as_millis();
            let (opt_col, ratio_col) = match opt {
                Some(0) => ("0".to_string(), "1.000000".to_string()),
                Some(best) => (
                    best.to_string(),
                    format!("{:.6}", report.solution.profit as f64 / best as f64),
                ),
                None => (String::new(), String::new()),
            };
            csv.push_str(&format!(
                "1,{name},{},{},{},{},{opt_col},{ratio_col},{wall_ms}\n",
                inst.tasks.len(),
                inst.m,
                algo.name(),
                report.solution.profit,
            ));
        }
    }
    write_file(&args.csv, &csv)?;
    Ok(0)
}
