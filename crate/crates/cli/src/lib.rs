//! Command-line pipelines: star-product property checks, model-symbol
//! oracles, torus spectral sweeps and report generation.

use std::path::{Path, PathBuf};

use heis_core::verify::{emit_report, Report, ReportFormat};
use serde::{Deserialize, Serialize};

pub mod config;
pub mod pipeline;

pub use config::{Command, RunConfig};
pub use pipeline::torus::Spectrum;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error(transparent)]
    Core(#[from] heis_core::Error),
}

impl CliError {
    /// 2 for usage and parameter errors, 3 for resource and convergence failures.
    pub fn exit_code(&self) -> i32 {
        use heis_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Core(E::NotConverged { .. } | E::TooManyEigenvalues { .. } | E::InsufficientDepth { .. } | E::Io(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpectraFile {
    schema: String,
    spectra: Vec<Spectrum>,
}

const SPECTRA_SCHEMA: &str = "heis-spectra/1";

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub report: Report,
    pub cache_hits: usize,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }
}

/// Result directory for a configuration: `<out>/<config hash>`.
pub fn cache_dir(config: &RunConfig) -> PathBuf {
    Path::new(&config.out).join(config.hash())
}

fn load_spectra(dir: &Path) -> Vec<Spectrum> {
    std::fs::read_to_string(dir.join("spectra.json"))
        .ok()
        .and_then(|s| serde_json::from_str::<SpectraFile>(&s).ok())
        .filter(|f| f.schema == SPECTRA_SCHEMA)
        .map(|f| f.spectra)
        .unwrap_or_default()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Core(heis_core::Error::Io(e.to_string())))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Human-readable plan for `--dry-run`.
pub fn plan(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let mut lines = vec![format!("command {} -> {}", config.command.name(), cache_dir(config).display())];
    let c = config.command;
    if matches!(c, Command::StarCheck | Command::All) {
        lines.push(format!(
            "star-check: {} random instances, n <= {}, degree <= {}",
            config.star.instances, config.star.max_vars, config.star.max_degree
        ));
    }
    if matches!(c, Command::ModelSymbols | Command::All) {
        pipeline::symbols::check_caps(config)?;
        let m = &config.models;
        lines.push(format!(
            "model-symbols: Hermite N = {}, R = {}, M = {}; {} projector cases; {} contour nodes; {} inverse checks",
            config.quantize.levels,
            config.quantize.halfwidth,
            config.quantize.points,
            m.projectors.len(),
            m.contour_nodes,
            m.inverse_z.len()
        ));
    }
    if matches!(c, Command::Torus | Command::All) {
        for j in pipeline::torus::plan(config)? {
            lines.push(format!("torus solve: k = {}, N = {}, v = {}, at least {} eigenvalues", j.k, j.n, j.v, j.count));
        }
    }
    Ok(lines)
}

/// Runs `config.command`, writing `inputs.json`, `spectra.json` (torus runs) and
/// `report.{json,csv,svg}` into the cache directory.
pub fn execute(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let dir = cache_dir(config);
    std::fs::create_dir_all(&dir)?;
    write_json(&dir.join("inputs.json"), config)?;
    let c = config.command;
    let mut report = Report::new(c.name());
    let mut cache_hits = 0;
    if matches!(c, Command::StarCheck | Command::All) {
        report.merge(pipeline::star::run(config)?);
    }
    if matches!(c, Command::ModelSymbols | Command::All) {
        report.merge(pipeline::symbols::run(config)?);
    }
    if matches!(c, Command::Torus | Command::All) {
        let cached = load_spectra(&dir);
        let (spectra, hits) = pipeline::torus::spectra(config, &cached)?;
        cache_hits = hits;
        write_json(&dir.join("spectra.json"), &SpectraFile { schema: SPECTRA_SCHEMA.into(), spectra: spectra.clone() })?;
        report.merge(pipeline::torus::report(config, &spectra)?);
    }
    emit_report(&report, &dir, &ReportFormat::ALL)?;
    Ok(RunOutcome { dir, report, cache_hits })
}

fn with_command(config: &RunConfig, command: Command) -> RunConfig {
    RunConfig { command, ..config.clone() }
}

pub fn cmd_star_check(config: &RunConfig) -> Result<RunOutcome, CliError> {
    execute(&with_command(config, Command::StarCheck))
}

pub fn cmd_model_symbols(config: &RunConfig) -> Result<RunOutcome, CliError> {
    execute(&with_command(config, Command::ModelSymbols))
}

pub fn cmd_torus(config: &RunConfig) -> Result<RunOutcome, CliError> {
    execute(&with_command(config, Command::Torus))
}

pub fn cmd_all(config: &RunConfig) -> Result<RunOutcome, CliError> {
    execute(&with_command(config, Command::All))
}

/// Summary table, one line per check.
pub fn summary(report: &Report) -> String {
    let mut out = String::new();
    for c in &report.checks {
        out.push_str(&format!(
            "{}  {:<60} {:>12.3e}  (tol {:.1e})  {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance,
            c.detail
        ));
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", report.checks.len(), failed));
    out
}
