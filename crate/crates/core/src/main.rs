use clap::{Args, Parser, Subcommand};
use posskb::classical::Oracle;
use posskb::concept::parse_concept;
use posskb::kb::{parse_kb, parse_query};
use posskb::possibilistic::PossKb;
use posskb::query::{run_query, Command, QueryError, QueryResult};
use posskb::tableau::{Limits, Reasoner};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

const EXIT_ERROR: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

/// Reasoning with possibility and necessity degrees over propositional and
/// terminological knowledge bases.
#[derive(Parser)]
#[command(name = "posskb", version)]
struct Cli {
    /// Print {verdict, degree:{num,den}, calls, millis} as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Classical consistency of the formulas with positive necessity.
    Check { file: PathBuf },
    /// Inconsistency degree of the knowledge base.
    Incons { file: PathBuf },
    /// Whether a weighted statement is entailed.
    Entail(QueryArgs),
    /// Largest necessity degree of a statement.
    Maxn(QueryArgs),
    /// Largest possibility degree of a statement.
    Maxpi(QueryArgs),
    /// Whether the terminology entails `SUB => SUP`.
    Subsumes {
        file: PathBuf,
        #[arg(long)]
        sub: String,
        #[arg(long)]
        sup: String,
    },
    /// Cross-check the algorithms against the semantic reference on fuzzed
    /// propositional knowledge bases.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

#[derive(Args)]
struct QueryArgs {
    file: PathBuf,
    /// A statement such as `assert Tom : golfer @ P 0.7`.
    #[arg(long, required_unless_present = "queries", conflicts_with = "queries")]
    query: Option<String>,
    /// One query per line, evaluated concurrently; results keep input order.
    #[arg(long)]
    queries: Option<PathBuf>,
}

/// Rendered line or error message, with the exit code of one batch query.
type Outcome = Result<(String, u8), (String, u8)>;

#[derive(Clone, Copy)]
enum Kind {
    Entail,
    Maxn,
    Maxpi,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    let oracle = Oracle::with_reasoner(Reasoner::new(limits_from_env()?));
    match &cli.command {
        Sub::Check { file } => single(cli, &oracle, &load(file)?, Command::Check),
        Sub::Incons { file } => single(cli, &oracle, &load(file)?, Command::Incons),
        Sub::Entail(args) => query_command(cli, &oracle, args, Kind::Entail),
        Sub::Maxn(args) => query_command(cli, &oracle, args, Kind::Maxn),
        Sub::Maxpi(args) => query_command(cli, &oracle, args, Kind::Maxpi),
        Sub::Subsumes { file, sub, sup } => {
            let sub = parse_concept(sub).map_err(|e| format!("--sub: {e}"))?;
            let sup = parse_concept(sup).map_err(|e| format!("--sup: {e}"))?;
            single(cli, &oracle, &load(file)?, Command::Subsumes { sub, sup })
        }
        Sub::OracleCheck { seed, cases } => Ok(oracle_check(cli, *seed, *cases)),
    }
}

fn limits_from_env() -> Result<Limits, String> {
    let mut limits = Limits::default();
    if let Ok(cap) = std::env::var("POSSKB_NODE_CAP") {
        limits.max_nodes_per_branch = cap
            .trim()
            .parse()
            .map_err(|_| format!("POSSKB_NODE_CAP=`{cap}` is not a node count"))?;
    }
    Ok(limits)
}

fn load(file: &Path) -> Result<PossKb, String> {
    let text = std::fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    parse_kb(&text).map_err(|d| {
        d.0.iter()
            .map(|e| format!("{}:{e}", file.display()))
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn command_for(kind: Kind, text: &str) -> Result<Command, String> {
    let q = parse_query(text).map_err(|e| format!("query: {e}"))?;
    Ok(match kind {
        Kind::Entail => Command::Entail(q.weighted().map_err(|e| format!("query: {e}"))?),
        Kind::Maxn => Command::MaxNecessity(q.statement),
        Kind::Maxpi => Command::MaxPossibility(q.statement),
    })
}

fn query_command(cli: &Cli, oracle: &Oracle, args: &QueryArgs, kind: Kind) -> Result<u8, String> {
    let kb = load(&args.file)?;
    match (&args.query, &args.queries) {
        (Some(text), _) => single(cli, oracle, &kb, command_for(kind, text)?),
        (None, Some(path)) => batch(cli, oracle, &kb, kind, path),
        (None, None) => unreachable!("clap requires --query or --queries"),
    }
}

fn error_code(e: &QueryError) -> u8 {
    if e.is_resource_limit() {
        EXIT_RESOURCE
    } else {
        EXIT_ERROR
    }
}

fn render(cli: &Cli, result: &QueryResult, command: &Command) -> String {
    if cli.json {
        serde_json::to_string(&result.json()).expect("plain data serializes")
    } else {
        result.human(command)
    }
}

fn single(cli: &Cli, oracle: &Oracle, kb: &PossKb, command: Command) -> Result<u8, String> {
    match run_query(oracle, kb, &command) {
        Ok(result) => {
            println!("{}", render(cli, &result, &command));
            Ok(result.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(error_code(&e))
        }
    }
}

/// Prints one line per query in input order; the exit code is the largest
/// of the per-query codes.
fn batch(cli: &Cli, oracle: &Oracle, kb: &PossKb, kind: Kind, path: &Path) -> Result<u8, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let outcomes: Vec<Mutex<Option<Outcome>>> = lines.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(lines.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(line_no, query)) = lines.get(i) else { break };
                let outcome = match command_for(kind, query) {
                    Err(e) => Err((format!("{}:{line_no}: {e}", path.display()), EXIT_ERROR)),
                    Ok(command) => match run_query(oracle, kb, &command) {
                        Ok(r) => Ok((render(cli, &r, &command), r.exit_code() as u8)),
                        Err(e) => Err((format!("{}:{line_no}: {e}", path.display()), error_code(&e))),
                    },
                };
                *outcomes[i].lock().expect("no worker panics while holding a slot") = Some(outcome);
            });
        }
    });
    let mut code = 0;
    for ((_, query), slot) in lines.iter().zip(outcomes) {
        match slot.into_inner().expect("workers joined").expect("every slot is filled") {
            Ok((out, c)) => {
                if cli.json {
                    println!("{out}");
                } else {
                    println!("{out}\t{query}");
                }
                code = code.max(c);
            }
            Err((message, c)) => {
                eprintln!("error: {message}");
                code = code.max(c);
            }
        }
    }
    Ok(code)
}

fn oracle_check(cli: &Cli, seed: u64, cases: usize) -> u8 {
    let report = posskb::fuzz::cross_check(seed, cases);
    if cli.json {
        println!("{}", serde_json::to_string(&report).expect("plain data serializes"));
    } else {
        println!("seed {}", report.seed);
        println!("necessity queries: {}", report.necessity_cases);
        println!("resolution knowledge bases: {}", report.resolution_cases);
        println!("round-trip knowledge bases: {}", report.round_trip_cases);
        for d in &report.discrepancies {
            println!("discrepancy: {d}");
        }
        println!("discrepancies: {}", report.discrepancies.len());
        for v in &report.call_bound_violations {
            println!("call bound exceeded: {v}");
        }
        println!("call bound violations: {}", report.call_bound_violations.len());
    }
    u8::from(!report.discrepancies.is_empty())
}
