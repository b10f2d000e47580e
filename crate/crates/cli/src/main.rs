use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geofix::verify::Suite;
use geofix_cli::config::read;
use geofix_cli::{run_bench, run_experiment, BenchConfig, CliError, ExperimentConfig, EXIT_USAGE};

const DEFAULT_OUT: &str = "geofix-out";

#[derive(Parser)]
#[command(
    name = "geofix",
    version,
    about = "Fixed-point iterations and rate checks on CAT(0) model spaces"
)]
struct Cli {
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true, env = "GEOFIX_OUT")]
    out: Option<PathBuf>,
    /// Seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Horizon override.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and check its bounds.
    Run { config: PathBuf },
    /// Run a bundled property suite.
    Verify { suite: String },
    /// Optimizer benchmarks.
    Bench {
        #[command(subcommand)]
        kind: BenchKind,
    },
}

#[derive(Subcommand)]
enum BenchKind {
    /// HalpernGD against RSGD on a Fréchet mean problem.
    Frechet { config: PathBuf },
}

fn out_dir(flag: &Option<PathBuf>, config: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| config.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn run(cli: &Cli, path: &Path) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_file(path)?.with_overrides(cli.seed, cli.horizon);
    let dir = out_dir(&cli.out, &cfg.output);
    let outcome = run_experiment(&cfg, &dir)?;
    println!(
        "{} run, horizon {}, seed {}",
        outcome.method, outcome.horizon, outcome.seed
    );
    for c in &outcome.checks {
        println!(
            "  {} {} samples={} worst_margin={:.3e}",
            if c.violated { "FAIL" } else { "PASS" },
            c.name,
            c.samples,
            c.worst_margin
        );
    }
    println!("wrote {}", dir.display());
    if outcome.violated {
        return Err(CliError::Violation(format!(
            "bound violated, report at {}",
            outcome.report_path().display()
        )));
    }
    Ok(())
}

fn verify(cli: &Cli, name: &str) -> Result<(), CliError> {
    let suite: Suite = name.parse()?;
    let reports = suite.run()?;
    for r in &reports {
        print!("{r}");
    }
    let pass = reports.iter().all(|r| r.pass());
    let report_path = cli
        .out
        .as_ref()
        .map(|dir| dir.join(format!("verify_{}.json", suite.name())));
    if let Some(path) = &report_path {
        std::fs::create_dir_all(path.parent().expect("joined path"))?;
        std::fs::write(
            path,
            serde_json::to_string_pretty(&reports).expect("reports serialize"),
        )?;
    }
    println!("{}: {}", suite.name(), if pass { "PASS" } else { "FAIL" });
    if !pass {
        return Err(CliError::Violation(format!("suite {} failed", suite.name())));
    }
    Ok(())
}

fn bench(cli: &Cli, path: &Path) -> Result<(), CliError> {
    let mut cfg: BenchConfig = read(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(h) = cli.horizon {
        cfg.horizon = h;
    }
    let dir = out_dir(&cli.out, &cfg.output);
    let o = run_bench(&cfg, &dir)?;
    println!(
        "halpern_gd: distance to oracle {:.3e}, max k*residual {:.4e}, growth ratio {:.4}",
        o.halpern_gd.final_dist, o.max_k_residual, o.growth_ratio
    );
    println!(
        "rsgd:       distance to oracle {:.3e}, first within 1e-6 at {:?}",
        o.rsgd.final_dist, o.rsgd.first_within
    );
    println!("wrote {}", dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Run { config } => run(&cli, config),
        Command::Verify { suite } => verify(&cli, suite),
        Command::Bench {
            kind: BenchKind::Frechet { config },
        } => bench(&cli, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
