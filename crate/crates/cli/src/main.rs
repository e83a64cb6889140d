//! `tcc`: build, close, inspect and search coherent configurations.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use tcc_core::fusion::{SearchBudget, DEFAULT_NODE_LIMIT};
use tcc_core::pipeline::{self, EnumerationJob, Report, BUDGET_ENV};
use tcc_core::schur::{enumerate_schur_partitions, PartitionJson, SchurVerdict};
use tcc_core::tensor::ConfigJson;
use tcc_core::{Carrier, Error, GroupSpec, TensorConfig};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tcc", version, about = "Coherent configurations on small point sets")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Wall-clock limit for searches, in seconds.
    #[arg(long, global = true, env = BUDGET_ENV)]
    budget_seconds: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orbit configuration of a group on m-tuples.
    Orb {
        #[arg(long)]
        group: GroupSpec,
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weisfeiler-Leman closure of a configuration file.
    WlClose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Projection to a set of coordinates (1-based).
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        coords: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residue at fixed values of some coordinates (1-based coordinates).
    Residue {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        coords: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Automorphism group of a configuration.
    Aut(Source),
    /// Whether a configuration is the orbit configuration of its
    /// automorphism group.
    Schurian(Source),
    /// Coherent fusions of a base configuration.
    Enumerate {
        #[command(flatten)]
        source: BaseSource,
        #[arg(long)]
        ast_only: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Directory receiving one configuration file per result.
        #[arg(long)]
        save_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Schur partition tools.
    #[command(subcommand)]
    Schur(SchurCommand),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SourceChoice {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    group: Option<GroupSpec>,
}

#[derive(Args, Debug)]
struct Source {
    #[command(flatten)]
    choice: SourceChoice,
    /// Arity used with --group.
    #[arg(long, default_value_t = 3)]
    arity: usize,
}

#[derive(Args, Debug)]
struct BaseSource {
    /// Group whose orbit configuration is the base.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    base: Option<GroupSpec>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    arity: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// lemma41, lemma42, quadratic, starred, lemma61, wl3, galois, thm11,
    /// thm51 or exception-probe.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    max_p: Option<u64>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    group: Option<GroupSpec>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    node_limit: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum SchurCommand {
    /// Test a partition file.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
    /// All Schur partitions of a carrier such as zmod:6 or fstar:7.
    Enumerate {
        #[arg(long)]
        carrier: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radical or decomposition structure of a Schur partition.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Orbits of a subgroup of power automorphisms.
    Cyclotomic {
        #[arg(long)]
        carrier: String,
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExhausted { .. } => EXIT_BUDGET,
            Error::Anomaly(_) => EXIT_VERIFY,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CliResult = std::result::Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_INPUT);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {}", e);
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn budget(cli: &Cli, node_limit: u64) -> std::result::Result<SearchBudget, Failure> {
    let time_limit = match cli.budget_seconds {
        None => None,
        Some(s) if s > 0.0 && s.is_finite() => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(input_error(format!("budget of {} seconds is not positive", s))),
    };
    Ok(SearchBudget {
        node_limit,
        time_limit,
    })
}

fn read_config(path: &Path) -> std::result::Result<TensorConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {}", path.display(), e)))?;
    let json: ConfigJson =
        serde_json::from_str(&text).map_err(|e| input_error(format!("{}: parse error: {}", path.display(), e)))?;
    Ok(TensorConfig::from_json(&json)?)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| input_error(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| input_error(format!("{}: {}", path.display(), e)))
}

fn write_config(path: Option<&Path>, cfg: &TensorConfig, meta: Map<String, Value>) -> std::result::Result<(), Failure> {
    match path {
        Some(p) => write_json(p, &cfg.to_json(meta)),
        None => Ok(()),
    }
}

fn emit_report(report: &Report, out: Option<&Path>) -> std::result::Result<(), Failure> {
    match out {
        Some(p) => write_json(p, report),
        None => {
            println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
            Ok(())
        }
    }
}

fn meta(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn ast_suffix(cfg: &TensorConfig) -> std::result::Result<String, Failure> {
    Ok(if cfg.m() == 3 {
        format!(", AST: {}", cfg.is_ast()?)
    } else {
        String::new()
    })
}

fn zero_based(coords: &[usize], m: usize) -> std::result::Result<Vec<usize>, Failure> {
    coords
        .iter()
        .map(|&c| {
            if c == 0 || c > m {
                Err(input_error(format!("coordinate {} is outside 1..={}", c, m)))
            } else {
                Ok(c - 1)
            }
        })
        .collect()
}

fn load_source(choice: &SourceChoice, arity: usize) -> std::result::Result<TensorConfig, Failure> {
    match (&choice.input, &choice.group) {
        (Some(path), _) => read_config(path),
        (None, Some(spec)) => Ok(TensorConfig::orbit_coloring(&spec.build()?, arity)?),
        (None, None) => Err(input_error("one of --input or --group is required")),
    }
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Orb { group, arity, out } => {
            let cfg = TensorConfig::orbit_coloring(&group.build()?, *arity)?;
            write_config(out.as_deref(), &cfg, meta(&[("group", json!(group.to_string()))]))?;
            println!("{} classes{}", cfg.class_count(), ast_suffix(&cfg)?);
            Ok(0)
        }
        Command::WlClose { input, out } => {
            let cfg = read_config(input)?;
            let (closed, stats) = cfg.wl_close_with_stats();
            write_config(
                out.as_deref(),
                &closed,
                meta(&[
                    ("refining_rounds", json!(stats.refining_rounds)),
                    ("alternations", json!(stats.alternations)),
                ]),
            )?;
            println!(
                "{} classes, {} refining rounds, stable after {} alternations",
                closed.class_count(),
                stats.refining_rounds,
                stats.alternations
            );
            Ok(0)
        }
        Command::Project { input, coords, out } => {
            let cfg = read_config(input)?;
            let projected = cfg.project(&zero_based(coords, cfg.m())?)?;
            write_config(out.as_deref(), &projected, meta(&[("coords", json!(coords))]))?;
            println!("{} classes", projected.class_count());
            Ok(0)
        }
        Command::Residue {
            input,
            coords,
            values,
            out,
        } => {
            let cfg = read_config(input)?;
            let res = cfg.residue(&zero_based(coords, cfg.m())?, values)?;
            write_config(
                out.as_deref(),
                &res,
                meta(&[("coords", json!(coords)), ("values", json!(values))]),
            )?;
            println!("{} classes", res.class_count());
            Ok(0)
        }
        Command::Aut(source) => {
            let cfg = load_source(&source.choice, source.arity)?;
            let group = pipeline::automorphism_group(&cfg)?;
            println!("order: {}", group.order());
            println!(
                "matches: {}",
                pipeline::catalog_match(&group).unwrap_or_else(|| "none".to_string())
            );
            for g in group.generators() {
                println!("generator: {}", g);
            }
            Ok(0)
        }
        Command::Schurian(source) => {
            let cfg = load_source(&source.choice, source.arity)?;
            let verdict = pipeline::is_schurian(&cfg)?;
            println!("schurian: {}, aut order {}", verdict.schurian, verdict.group.order());
            Ok(0)
        }
        Command::Enumerate {
            source,
            ast_only,
            node_limit,
            save_dir,
            out,
        } => cmd_enumerate(cli, source, *ast_only, *node_limit, save_dir.as_deref(), out.as_deref()),
        Command::Verify(args) => cmd_verify(cli, args),
        Command::Schur(cmd) => cmd_schur(cmd),
    }
}

fn cmd_enumerate(
    cli: &Cli,
    source: &BaseSource,
    ast_only: bool,
    node_limit: u64,
    save_dir: Option<&Path>,
    out: Option<&Path>,
) -> CliResult {
    let (base, label) = match (&source.base, &source.input) {
        (Some(spec), _) => (
            TensorConfig::orbit_coloring(&spec.build()?, source.arity)?,
            spec.to_string(),
        ),
        (None, Some(path)) => (read_config(path)?, path.display().to_string()),
        (None, None) => return Err(input_error("one of --base or --input is required")),
    };
    let job = EnumerationJob {
        base,
        ast_only,
        budget: budget(cli, node_limit)?,
    };
    let outcome = pipeline::enumerate_fusions(&job)?;
    let mut entries = Vec::new();
    for cfg in &outcome.results {
        entries.push(pipeline::describe(cfg)?);
    }
    if let Some(dir) = save_dir {
        fs::create_dir_all(dir).map_err(|e| input_error(format!("{}: {}", dir.display(), e)))?;
        for (i, cfg) in outcome.results.iter().enumerate() {
            write_config(
                Some(&dir.join(format!("fusion-{:03}.json", i))),
                cfg,
                meta(&[("base", json!(label))]),
            )?;
        }
    }
    let p = Some(job.base.n() as u64);
    let report = Report::new(
        "enumerate",
        p,
        outcome.complete,
        outcome.complete,
        entries,
        json!({ "base": label, "ast_only": ast_only, "nodes": outcome.nodes, "fusions": outcome.results.len() }),
    );
    emit_report(&report, out)?;
    eprintln!(
        "{} results, {}",
        outcome.results.len(),
        if outcome.complete { "complete" } else { "partial" }
    );
    Ok(if outcome.complete { 0 } else { EXIT_BUDGET })
}

fn require<T: Copy>(value: Option<T>, flag: &str, suite: &str) -> std::result::Result<T, Failure> {
    value.ok_or_else(|| input_error(format!("suite {} needs --{}", suite, flag)))
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> CliResult {
    let suite = args.suite.as_str();
    let report = match suite {
        "lemma41" => pipeline::suite_lemma41(args.max_p.unwrap_or(10_000))?,
        "quadratic" => pipeline::suite_quadratic(args.max_p.unwrap_or(10_000))?,
        "lemma42" => pipeline::suite_lemma42(args.samples, args.max_p.unwrap_or(61), args.seed)?,
        "lemma61" => pipeline::suite_lemma61(args.max_p.unwrap_or(31))?,
        "wl3" => pipeline::suite_wl3(args.max_p.unwrap_or(13))?,
        "galois" => pipeline::suite_galois(args.max_n.unwrap_or(7))?,
        "starred" => {
            let spec = args
                .group
                .clone()
                .ok_or_else(|| input_error("suite starred needs --group"))?;
            let report = pipeline::suite_starred(&spec)?;
            println!("starred classes: {}", report.details["starred_classes"]);
            report
        }
        "thm11" | "thm51" | "exception-probe" => {
            let p = require(args.p, "p", suite)?;
            let report = pipeline::theorem_checks(p, suite, &budget(cli, args.node_limit)?)?;
            if suite == "thm51" {
                println!("{} configurations", report.details["fusions"]);
            }
            report
        }
        other => return Err(input_error(format!("unknown suite `{}`", other))),
    };
    emit_report(&report, args.out.as_deref())?;
    eprintln!("{}", report.verdict);
    Ok(if !report.complete {
        EXIT_BUDGET
    } else if report.passed() {
        0
    } else {
        EXIT_VERIFY
    })
}

fn read_partition(path: &Path) -> std::result::Result<PartitionJson, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("{}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: parse error: {}", path.display(), e)))
}

fn cmd_schur(cmd: &SchurCommand) -> CliResult {
    match cmd {
        SchurCommand::Check { input } => match read_partition(input)?.check()? {
            SchurVerdict::Accepted(part) => {
                println!("Schur partition with {} classes", part.classes().len());
                Ok(0)
            }
            SchurVerdict::Rejected(reason) => {
                println!("not a Schur partition: {}", reason);
                Ok(EXIT_VERIFY)
            }
        },
        SchurCommand::Enumerate { carrier, out } => {
            let carrier = Carrier::parse(carrier)?;
            let all = enumerate_schur_partitions(&carrier)?;
            let jsons: Vec<PartitionJson> = all.iter().map(|p| p.to_json()).collect();
            match out {
                Some(path) => write_json(path, &jsons)?,
                None => {
                    for j in &jsons {
                        println!("{}", serde_json::to_string(&j.classes).expect("serializes"));
                    }
                }
            }
            println!("{} Schur partitions of {}", all.len(), carrier);
            Ok(0)
        }
        SchurCommand::Classify { input } => match read_partition(input)?.check()? {
            SchurVerdict::Accepted(part) => {
                let verdict = part.classify_lemma33()?;
                println!("{}", serde_json::to_string_pretty(&verdict).expect("serializes"));
                Ok(0)
            }
            SchurVerdict::Rejected(reason) => Err(input_error(format!("not a Schur partition: {}", reason))),
        },
        SchurCommand::Cyclotomic {
            carrier,
            exponents,
            out,
        } => {
            let carrier = Carrier::parse(carrier)?;
            let part = tcc_core::schur::cyclotomic_partition(&carrier, exponents)?;
            if let Some(path) = out {
                write_json(path, &part.to_json())?;
            }
            println!("{}", serde_json::to_string(part.classes()).expect("serializes"));
            Ok(0)
        }
    }
}

