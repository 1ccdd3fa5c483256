use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polygraph::computads::Computad;
use polygraph::freecat::Bounds;
use polygraph::limitlab::computad_topos_gate;
use polygraph::operads::{slice_of_strict, Presentation};
use polygraph::report::{eval_report, free_report, regular_report, trees_report, Report};
use polygraph::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "polygraph", version, about = "Free n-categories on computads, slices and pullback experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Bound on the number of top-dimensional generators in a cell.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    bound: u64,
    /// Maximum number of saturation rounds per dimension.
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    rounds: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tabular)]
    format: Format,
    /// Seed for sampled cross-checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tabular,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Saturate the free algebra on a computad file.
    Free {
        file: PathBuf,
        /// Cells listed per dimension.
        #[arg(long, default_value_t = 20)]
        cells: usize,
    },
    /// Cells of the k-th slice on a number of generators, against the oracle.
    Slice { k: usize, generators: usize },
    /// Check a presentation for strong regularity.
    Regular { file: PathBuf },
    /// Run the topos-gate experiment for n-computads.
    Gate { n: usize },
    /// Enumerate plane trees.
    Trees {
        #[arg(long, default_value_t = 2)]
        height: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
    },
    /// Evaluate a term in the free algebra on a computad, optionally comparing it with another.
    Eval { file: PathBuf, term: String, other: Option<String> },
}

/// A command failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Soundness(_)) { 2 } else { 1 };
        Failure { code, message: e.to_string() }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure { code: 1, message: format!("{}: {e}", path.display()) })
}

struct Output {
    json: String,
    table: String,
    /// Exit code after a successful run: 2 flags an oracle mismatch.
    code: u8,
}

fn output<T: Serialize>(cli: &Cli, name: &str, bounds: Bounds, result: T, table: String, code: u8) -> Output {
    Output { json: Report::new(name, bounds, cli.seed, result).to_json(), table, code }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    let bounds = Bounds { size: cli.bound as usize, max_rounds: cli.rounds as usize, ..Bounds::default() };
    match &cli.command {
        Command::Free { file, cells } => {
            let c = Computad::parse(&read(file)?, bounds)?;
            let r = free_report(&c, *cells);
            let mut t = String::new();
            let _ = writeln!(t, "dim  generators  classes  fixed point  partial");
            for d in &r.dimensions {
                let fp = d.report.fixed_point_at.map_or("-".to_string(), |r| format!("round {r}"));
                let partial = if d.partial { format!("up to size {}", d.size_bound) } else { "no".into() };
                let _ = writeln!(t, "{:<4} {:<11} {:<8} {:<12} {}", d.dim, d.generators, d.classes, fp, partial);
            }
            let _ = writeln!(t, "\ncells (at most {cells} per dimension):");
            for cell in &r.cells {
                let _ = writeln!(t, "  {}#{}  {}", cell.dim, cell.class, cell.representative);
            }
            let _ = writeln!(
                t,
                "\naudit: {} axiom instances, {} violations",
                r.audit.instances,
                r.audit.multiset_violations + r.audit.boundary_violations
            );
            let code = if r.audit.is_clean() { 0 } else { 2 };
            Ok(output(cli, "free", bounds, r, t, code))
        }
        Command::Slice { k, generators } => {
            let r = slice_of_strict(*k, *generators, bounds)?;
            let mut t = String::new();
            let _ = writeln!(t, "size  classes  {}", r.oracle_name);
            for (s, (c, o)) in r.counts_by_size.iter().zip(&r.oracle).enumerate() {
                let _ = writeln!(t, "{s:<5} {c:<8} {o}");
            }
            let _ = writeln!(t, "unknown pairs: {}", r.unknown_pairs);
            if r.partial {
                let _ = writeln!(t, "partial up to size {}", r.size_bound);
            }
            let _ = writeln!(t, "{}", if r.matches_oracle { "MATCH" } else { "MISMATCH" });
            let code = if r.matches_oracle { 0 } else { 2 };
            Ok(output(cli, "slice", bounds, r, t, code))
        }
        Command::Regular { file } => {
            let p = Presentation::parse(&read(file)?)?;
            let r = regular_report(&p);
            let mut t = format!("{}\n", r.label);
            if let Some(w) = &r.verdict.witness {
                let _ = writeln!(t, "{:?} in equation {}: {}", w.kind, w.equation + 1, w.text);
            }
            let _ = writeln!(t, "note: {}", r.note);
            Ok(output(cli, "regular", bounds, r, t, 0))
        }
        Command::Gate { n } => {
            let r = computad_topos_gate(*n, bounds, cli.seed)?;
            let mut t = format!("{}\n{}\n", r.verdict.label(), r.statement);
            let _ = writeln!(t, "functor: {}", r.functor);
            let _ = writeln!(t, "cospans checked: {}, failures: {}", r.cases, r.failures);
            if let Some(c) = &r.witness_cospan {
                let _ = writeln!(t, "cospan: {c}");
            }
            if let Some(w) = &r.witness {
                let _ = writeln!(t, "witness: {}", serde_json::to_string(w).unwrap_or_default());
            }
            if let Some(ok) = r.oracle_replay {
                let _ = writeln!(t, "oracle replay: {}", yes_no(ok));
            }
            let _ = writeln!(t, "engine cross-check: {}/{}", r.engine_agreed, r.engine_checked);
            let code = match r.oracle_replay {
                Some(false) => 2,
                _ if r.engine_agreed != r.engine_checked => 2,
                _ => 0,
            };
            Ok(output(cli, "gate", bounds, r, t, code))
        }
        Command::Trees { height, width } => {
            let r = trees_report(*height, *width);
            let mut t = format!("{} trees (height <= {height}, width <= {width})\n", r.count);
            let _ = writeln!(t, "by height: {:?}", r.by_height);
            for tree in &r.trees {
                let _ = writeln!(t, "  {tree}");
            }
            Ok(output(cli, "trees", bounds, r, t, 0))
        }
        Command::Eval { file, term, other } => {
            let c = Computad::parse(&read(file)?, bounds)?;
            let r = eval_report(&c, term, other.as_deref())?;
            let mut t = format!("{} : dimension {}\n", r.term, r.dim);
            match (&r.class, &r.representative) {
                (Some(k), Some(rep)) => {
                    let _ = writeln!(t, "class {k}, representative {rep}");
                }
                _ => {
                    let _ = writeln!(t, "outside the saturated bound");
                }
            }
            if let (Some(o), Some(v)) = (&r.compared_with, &r.verdict) {
                let _ = writeln!(t, "versus {o}: {v}");
                if let Some(n) = r.certificate_steps {
                    let _ = writeln!(t, "certificate: {n} steps, replayed: {}", yes_no(r.certificate_replayed == Some(true)));
                }
                if let Some(d) = &r.detail {
                    let _ = writeln!(t, "detail: {d}");
                }
            }
            let code = if r.certificate_replayed == Some(false) { 2 } else { 0 };
            Ok(output(cli, "eval", bounds, r, t, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            let mut text = if cli.format == Format::Json { out.json } else { out.table };
            if !text.ends_with('\n') {
                text.push('\n');
            }
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
