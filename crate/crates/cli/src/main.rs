mod bench;
mod load;
mod report;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chainforge::bmc::BmcConfig;
use chainforge::engine::{generate_chain, Config, EngineError};
use chainforge::optimizer::AtspBackend;
use chainforge::reachgraph::{build_prop_kreach_graph, extend_graph, GraphError, ReachGraph};
use chainforge::sat::{dimacs, Backend, Cdcl, SatSolver, SolveResult};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_NO_CHAIN: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser)]
#[command(name = "chainforge", version, about = "Test case chain generation for reactive models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a test case chain covering every property.
    Generate(GenerateArgs),
    /// Print the K-reachability graph between property triggers.
    Graph(GraphArgs),
    /// Run a benchmark suite and compare against expected values.
    Bench {
        suite: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve a DIMACS CNF file (stdin when omitted or `-`).
    Sat { file: Option<PathBuf> },
}

#[derive(Args)]
struct ProblemArgs {
    model: PathBuf,
    props: PathBuf,
    /// Initial state set; defaults to the model's declared initial values.
    #[arg(long)]
    init: Option<String>,
    /// Final state set; defaults to the initial set.
    #[arg(long = "final")]
    fin: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Atsp {
    Exact,
    Heuristic,
    Auto,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 50)]
    k_max: usize,
    #[arg(long, value_enum, default_value_t = Atsp::Auto)]
    atsp: Atsp,
    /// Fail instead of splitting the properties over several chains.
    #[arg(long)]
    no_multi: bool,
    #[arg(long)]
    no_repair: bool,
    #[arg(long)]
    no_refine: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Wall-clock limit in seconds.
    #[arg(long, value_parser = positive_seconds)]
    timeout: Option<f64>,
    /// Check a JSON report against the model instead of generating.
    #[arg(long, value_name = "REPORT")]
    replay: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Enumerate every edge of weight at most K.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Format::Dot)]
    format: Format,
}

fn positive_seconds(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("`{s}` is not a positive number of seconds")),
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn backend() -> Result<Backend, ExitCode> {
    Backend::from_env().map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", Backend::ENV_VAR)))
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Graph(a) => graph(a),
        Command::Bench { suite, seed } => run_bench(&suite, seed),
        Command::Sat { file } => sat(file.as_deref()),
    }
}

fn generate(a: GenerateArgs) -> ExitCode {
    let p = match load::load(&a.problem.model, &a.problem.props, a.problem.init.as_deref(), a.problem.fin.as_deref()) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    if let Some(path) = &a.replay {
        let text = match load::read(path) {
            Ok(t) => t,
            Err(e) => return fail(EXIT_PARSE, e),
        };
        let rep: report::Report = match serde_json::from_str(&text) {
            Ok(r) => r,
            Err(e) => return fail(EXIT_PARSE, format!("{}: {e}", path.display())),
        };
        return match report::replay(&p, &rep) {
            Ok(lines) => {
                for l in lines {
                    println!("{l}");
                }
                println!("replay: ok");
                ExitCode::SUCCESS
            }
            Err(e) => fail(EXIT_NO_CHAIN, format!("replay: {e}")),
        };
    }
    let backend = match backend() {
        Ok(b) => b,
        Err(code) => return code,
    };
    let cfg = Config {
        k_max: a.k_max,
        atsp: match a.atsp {
            Atsp::Exact => AtspBackend::Exact,
            Atsp::Heuristic => AtspBackend::Heuristic,
            Atsp::Auto => AtspBackend::Auto,
        },
        seed: a.seed,
        repair: !a.no_repair,
        refine: !a.no_refine,
        multi_chain: !a.no_multi,
        backend,
        timeout: a.timeout.map(Duration::from_secs_f64),
        ..Config::default()
    };
    let started = Instant::now();
    let result = generate_chain(&p.model, &p.props, &p.init, &p.fin, &cfg);
    let seconds = started.elapsed().as_secs_f64();
    let r = match result {
        Ok(r) => r,
        Err(e) => return engine_failure(&p, e),
    };
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let rep = report::build(&p, &r);
    match a.format {
        Format::Text => {
            print!("{}", report::render_text(&rep));
            println!("{}", report::summary_line(&rep, seconds));
        }
        Format::Json => {
            println!("{}", serde_json::to_string_pretty(&rep).expect("report serialises"));
            eprintln!("{}", report::summary_line(&rep, seconds));
        }
        Format::Dot => {
            print!("{}", r.graph.to_dot());
            eprintln!("{}", report::summary_line(&rep, seconds));
        }
    }
    ExitCode::SUCCESS
}

fn engine_failure(p: &load::Problem, e: EngineError) -> ExitCode {
    let code = match &e {
        EngineError::Timeout => EXIT_TIMEOUT,
        EngineError::NoChainAtBound { .. }
        | EngineError::NoSingleChain { .. }
        | EngineError::Unchainable { .. }
        | EngineError::Violation { .. }
        | EngineError::EmptySet { .. } => EXIT_NO_CHAIN,
        _ => 1,
    };
    if let EngineError::Violation { trace, .. } = &e {
        eprintln!("counterexample:");
        for (k, s) in trace.states.iter().enumerate() {
            eprintln!("  {k:>4}  {}", p.model.format_state(s));
            if let Some(i) = trace.inputs.get(k) {
                eprintln!("        {}", p.model.format_input(i));
            }
        }
    }
    fail(code, e)
}

fn graph(a: GraphArgs) -> ExitCode {
    let p = match load::load(&a.problem.model, &a.problem.props, a.problem.init.as_deref(), a.problem.fin.as_deref()) {
        Ok(p) => p,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    let backend = match backend() {
        Ok(b) => b,
        Err(code) => return code,
    };
    let mut u = chainforge::bmc::Unrolling::new(&p.model, BmcConfig { backend, ..BmcConfig::default() });
    let g = ReachGraph::for_properties(&p.props, &p.init, &p.fin);
    let (mut g, note) = match build_prop_kreach_graph(&mut u, g, a.k) {
        Ok(g) => (g, None),
        Err(GraphError::NoChainAtBound { graph, .. } | GraphError::NoSingleChain { graph }) => {
            (*graph, Some("no covering path in this graph"))
        }
        Err(e) => return fail(1, e),
    };
    if extend_graph(&mut u, &mut g, a.k).is_err() {
        return fail(EXIT_TIMEOUT, "time limit reached");
    }
    match a.format {
        Format::Dot => print!("{}", g.to_dot()),
        Format::Text | Format::Json => {
            for (&(x, y), &w) in g.edges() {
                println!("{} -> {} : {w}", g.name(x), g.name(y));
            }
        }
    }
    if let Some(n) = note {
        eprintln!("note: {n}");
    }
    ExitCode::SUCCESS
}

fn run_bench(suite: &Path, seed: u64) -> ExitCode {
    let dirs = match bench::discover(suite) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_PARSE, format!("{}: {e}", suite.display())),
    };
    let rows: Vec<bench::Row> = dirs.iter().map(|d| bench::run_one(d, seed)).collect();
    print!("{}", bench::render(&rows));
    let bad = rows.iter().filter(|r| !r.ok()).count();
    if bad > 0 {
        eprintln!("{bad} of {} benchmarks violate their expectations", rows.len());
        return ExitCode::from(EXIT_NO_CHAIN);
    }
    ExitCode::SUCCESS
}

/// Exit 10 on SAT and 20 on UNSAT, as DIMACS solvers conventionally do.
fn sat(file: Option<&Path>) -> ExitCode {
    let text = match file {
        Some(p) if p != Path::new("-") => match load::read(p) {
            Ok(t) => t,
            Err(e) => return fail(EXIT_PARSE, e),
        },
        _ => {
            let mut s = String::new();
            if let Err(e) = std::io::stdin().read_to_string(&mut s) {
                return fail(EXIT_PARSE, e);
            }
            s
        }
    };
    let cnf = match dimacs::parse(&text) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_PARSE, e),
    };
    let mut solver = Cdcl::from_cnf(&cnf);
    let (out, code) = match solver.solve(&[]) {
        SolveResult::Sat(m) => (dimacs::SolverOutput::Sat(m), 10),
        SolveResult::Unsat(_) => (dimacs::SolverOutput::Unsat, 20),
        SolveResult::Unknown => (dimacs::SolverOutput::Unknown, 0),
    };
    print!("{}", dimacs::format_output(&out));
    ExitCode::from(code)
}
