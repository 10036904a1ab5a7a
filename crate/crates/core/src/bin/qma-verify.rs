use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qma::error::Error;
use qma::field::parse_rational;
use qma::parse::write_matrix;
use qma::rmatrix::{builtin, Family};
use qma::verifier::{run_suite, CheckKind, Mode, PairSource, SuiteConfig};

#[derive(Parser)]
#[command(name = "qma-verify", version, about = "Exact verification of Cayley-Hamilton-Newton identities for quantum matrix algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a pair and run identity checks, writing a JSON report.
    Check(CheckArgs),
    /// List the built-in families.
    Families,
    /// Describe a built-in family and print its matrices.
    Describe {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Built-in family name.
    #[arg(long, conflicts_with_all = ["r_matrix", "f_matrix"], required_unless_present_all = ["r_matrix", "f_matrix"])]
    family: Option<String>,
    /// R matrix file.
    #[arg(long, requires = "f_matrix")]
    r_matrix: Option<PathBuf>,
    /// F matrix file.
    #[arg(long, requires = "r_matrix")]
    f_matrix: Option<PathBuf>,
    /// Dimension N.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Highest degree checked; defaults to the height.
    #[arg(long)]
    kmax: Option<usize>,
    /// exact or fast.
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Seed for fast-mode sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sample points in fast mode.
    #[arg(long, default_value_t = 5)]
    samples: usize,
    /// Comma-separated checks, or `all`.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Pin q to a rational such as `1` or `3/2`.
    #[arg(long)]
    q: Option<String>,
    /// Record elapsed times in the report.
    #[arg(long)]
    timings: bool,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(args: &CheckArgs) -> Result<SuiteConfig, Error> {
    let source = match (&args.family, &args.r_matrix, &args.f_matrix) {
        (Some(name), _, _) => PairSource::Family(Family::parse(name)?),
        (None, Some(r), Some(f)) => PairSource::Files {
            r: r.clone(),
            f: f.clone(),
        },
        _ => return Err(Error::Input("give --family or both --r-matrix and --f-matrix".into())),
    };
    let q = match &args.q {
        Some(s) => Some(parse_rational(s).ok_or_else(|| Error::Input(format!("bad rational {s:?}")))?),
        None => None,
    };
    Ok(SuiteConfig {
        source,
        n: args.n,
        kmax: args.kmax,
        checks: CheckKind::parse_list(&args.checks)?,
        mode: args.mode.parse::<Mode>()?,
        seed: args.seed,
        samples: args.samples,
        q,
        timings: args.timings,
        dropped_relations: Vec::new(),
    })
}

fn check(args: CheckArgs) -> Result<i32, Error> {
    let report = run_suite(&config(&args)?)?;
    let json = report.to_json();
    match &args.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    if let Some(err) = &report.preflight.error {
        eprintln!("preflight rejected the pair: {err}");
    }
    eprintln!(
        "{}: {} passed, {} failed, {} errors",
        report.aggregate.status, report.aggregate.passed, report.aggregate.failed, report.aggregate.errors
    );
    Ok(report.exit_code())
}

fn describe(name: &str, n: usize) -> Result<(), Error> {
    let family = Family::parse(name)?;
    println!("{}: {}", family.name(), family.description());
    if let Some(q) = family.required_q() {
        println!("evaluated at q = {q}");
    }
    let pair = builtin(family, n)?;
    println!("\n# R\n{}", write_matrix(&pair.r)?);
    println!("# F\n{}", write_matrix(&pair.f)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Families => {
            for f in Family::BUILTIN {
                println!("{:<24} {}", f.name(), f.description());
            }
            Ok(0)
        }
        Command::Describe { family, n } => describe(&family, n).map(|_| 0),
        Command::Check(args) => check(args),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
