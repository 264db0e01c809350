use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use haefliger_cli::batch::{run_batch, write_atomic};
use haefliger_cli::{parse_job, render_table, run_job, JobKind};

/// Exact characteristic classes and Lefschetz numbers for foliations.
#[derive(Parser)]
#[command(name = "haefliger", version)]
struct Cli {
    /// Job config file, read before the inline arguments.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Write the JSON report here (`-` for stdout); for batch, the output directory.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Series truncation order (genus) or q-order (Bott–Taubes).
    #[arg(long, global = true, value_name = "N")]
    truncation: Option<usize>,
    /// Size for the identity verifiers.
    #[arg(long, global = true, value_name = "N")]
    max_n: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JobArgs {
    /// Target and `key=value` settings, e.g. `cp q=2 genus=ahat`.
    args: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Genus of a tangent or declared bundle.
    Genus(JobArgs),
    /// Lefschetz numbers over fixed components.
    Lefschetz(JobArgs),
    /// The Â obstruction to isometric actions.
    Rigidity(JobArgs),
    /// Series and genus identities.
    Verify(JobArgs),
    /// Bott–Taubes coefficient pairings.
    BottTaubes(JobArgs),
    /// Cyclotomic integrality of characteristic numbers and Lefschetz values.
    Integrality(JobArgs),
    /// Run every `*.job` file in a directory.
    Batch {
        dir: PathBuf,
    },
}

fn job(cli: &Cli, kind: JobKind, args: &[String]) -> u8 {
    let (text, origin) = match &cli.config {
        Some(p) => match fs::read_to_string(p) {
            Ok(t) => (t, p.display().to_string()),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return 2;
            }
        },
        None => (String::new(), "<args>".to_string()),
    };
    let cfg = match parse_job(&text, Some(kind), args) {
        Ok(c) => c.with_overrides(cli.truncation, cli.max_n),
        Err(d) => {
            eprintln!("error: {origin}:{d}");
            return 2;
        }
    };
    let report = match run_job(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match &cli.json {
        Some(p) if p == Path::new("-") => print!("{}", report.to_json()),
        Some(p) => {
            if let Err(e) = write_atomic(p, &report.to_json()) {
                eprintln!("error: {}: {e}", p.display());
                return 2;
            }
            print!("{}", render_table(&report));
        }
        None => print!("{}", render_table(&report)),
    }
    report.exit_code() as u8
}

fn batch(cli: &Cli, dir: &Path) -> u8 {
    let out = cli.json.clone().unwrap_or_else(|| dir.join("reports"));
    let entries = match run_batch(dir, &out) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {}: {e}", dir.display());
            return 2;
        }
    };
    for e in &entries {
        let status = match e.code {
            0 => "ok",
            1 => "FAILED",
            _ => "ERROR",
        };
        println!("{:<32} {:<7} {}", e.name, status, e.summary);
    }
    println!("{} jobs, reports in {}", entries.len(), out.display());
    entries.iter().map(|e| e.code).max().unwrap_or(0) as u8
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Genus(a) => job(&cli, JobKind::Genus, &a.args),
        Command::Lefschetz(a) => job(&cli, JobKind::Lefschetz, &a.args),
        Command::Rigidity(a) => job(&cli, JobKind::Rigidity, &a.args),
        Command::Verify(a) => job(&cli, JobKind::Verify, &a.args),
        Command::BottTaubes(a) => job(&cli, JobKind::BottTaubes, &a.args),
        Command::Integrality(a) => job(&cli, JobKind::Integrality, &a.args),
        Command::Batch { dir } => batch(&cli, dir),
    };
    ExitCode::from(code)
}
