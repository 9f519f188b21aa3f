use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stableforce_cli::config::{Overrides, Resolved, RunConfig};
use stableforce_cli::run::{self, DEFAULT_TABLE_NS};
use stableforce_cli::{CliError, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "stableforce", version, about = "Stable limit laws of power-law resultant forces")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    replicas: Option<u64>,
    #[arg(long, global = true)]
    particles: Option<u64>,
    /// z-grid, e.g. "tensor:5:21+radial:5:20" or "list:0.5,0;1,1".
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample renormalized resultant forces; writes forces.csv and summary.csv.
    Simulate,
    /// Compare the empirical CF with the predicted limit; exit 1 on failure.
    Verify,
    /// Write ln Φ on the z-grid to limits.csv.
    Limits,
    /// Write (N, a_N, κ_N, L_N, σ_N) to renorm_table.csv.
    RenormTable {
        /// Comma-separated particle numbers.
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u64>>,
    },
    /// Check the closed-form tail integral against quadrature.
    Oracle {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        cutoff: f64,
        #[arg(long, default_value_t = 10.0)]
        z_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
}

fn load(g: &GlobalArgs) -> Result<Resolved, CliError> {
    let path = g.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    cfg.apply(&Overrides {
        seed: g.seed,
        out: g.out.clone(),
        replicas: g.replicas,
        particles: g.particles,
        grid: g.grid.clone(),
        threads: g.threads,
    });
    let res = cfg.resolve()?;
    if let Some(t) = res.config.run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    eprintln!("alpha = {}, regime {}", res.alpha, res.regime.label());
    Ok(res)
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Simulate => {
            let s = run::simulate(&load(g)?)?;
            println!("{}", serde_json::to_string(&s).expect("serializable"));
            Ok(EXIT_PASS)
        }
        Command::Verify => {
            let v = run::verify(&load(g)?)?;
            println!("{}", serde_json::to_string(&v).expect("serializable"));
            Ok(if v.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Limits => {
            let n = run::limits(&load(g)?)?;
            println!("wrote {n} grid points");
            Ok(EXIT_PASS)
        }
        Command::RenormTable { ns } => {
            let ns = ns.clone().unwrap_or_else(|| DEFAULT_TABLE_NS.to_vec());
            let rows = run::renorm_table(&load(g)?, &ns)?;
            println!("wrote {} rows", rows.len());
            Ok(EXIT_PASS)
        }
        Command::Oracle { alpha, cutoff, z_max, points } => {
            if let Some(t) = g.threads {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            let out = g.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let r = run::oracle(*alpha, *cutoff, *z_max, *points, &out)?;
            println!("{}", serde_json::to_string(&r).expect("serializable"));
            Ok(if r.pass { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let record = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
