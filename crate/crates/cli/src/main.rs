use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use heis_cli::{execute, plan, summary, CliError, Command, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "heis", version, about = "Symbol calculus and magnetic Laplacian spectral checks")]
struct Args {
    /// star-check, model-symbols, torus or all
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration; defaults are used for missing fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; results go to <out>/<config hash>/
    #[arg(long)]
    out: Option<String>,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
    /// Print the plan without computing
    #[arg(long)]
    dry_run: bool,
    #[arg(long)]
    seed: Option<u64>,
}

fn load(args: &Args) -> Result<RunConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    config.command = args.command;
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        config.jobs = jobs;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn run(args: &Args) -> Result<i32, CliError> {
    let config = load(args)?;
    if args.dry_run {
        for line in plan(&config)? {
            println!("{line}");
        }
        return Ok(0);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| CliError::Resource(e.to_string()))?;
    let outcome = pool.install(|| execute(&config))?;
    print!("{}", summary(&outcome.report));
    println!("results in {} ({} cached spectra reused)", outcome.dir.display(), outcome.cache_hits);
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
