use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use capax::config::Artifact;
use capax::{
    check, configure_threads, parse_config, parse_map, repro, run, JobConfig, RunOutput, EXIT_USAGE,
};
use clap::{Args, Parser, Subcommand};

/// Certified analytic capacity brackets for {|R(z)| >= 1}.
#[derive(Parser)]
#[command(name = "capax", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether the map is n-good.
    Check(JobArgs),
    /// Capacity bounds for k = 1..kmax as CSV.
    Bounds(JobArgs),
    /// Boundary nodes as CSV.
    Trace(JobArgs),
    /// Bounds followed by the Ahlfors verdict.
    Verdict(JobArgs),
    /// Rerun a reference example (1 to 6) against its published table.
    Repro(ReproArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Map expression, e.g. "0.3/(z+1)+0.2/(z-1)".
    #[arg(long, value_name = "STR")]
    map: Option<String>,
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "INT")]
    kmax: Option<usize>,
    #[arg(long, value_name = "INT")]
    nodes: Option<usize>,
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Write the main artifact here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    #[arg(value_name = "EXAMPLE")]
    id: usize,
    /// Use k = 1..kmax instead of the published orders.
    #[arg(long, value_name = "INT")]
    kmax: Option<usize>,
    #[arg(long, value_name = "INT")]
    nodes: Option<usize>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

fn job_from_args(args: &JobArgs) -> Result<JobConfig, String> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Default::default(),
    };
    let map = match &args.map {
        Some(expr) => parse_map(expr).map_err(|e| e.to_string())?,
        None => file
            .map()
            .map_err(|e| e.to_string())?
            .ok_or_else(|| capax::ConfigError::MissingMap.to_string())?,
    };
    let mut job = JobConfig::new(map);
    job.kmax = args.kmax.or(file.kmax).unwrap_or(job.kmax);
    job.nodes = args.nodes.or(file.nodes).unwrap_or(job.nodes);
    job.tol = args.tol.or(file.tol).unwrap_or(job.tol);
    job.outputs = file.outputs;
    job.validate().map_err(|e| e.to_string())?;
    Ok(job)
}

fn emit(output: &RunOutput, destinations: &[(Artifact, Option<PathBuf>)]) -> Result<(), String> {
    for (artifact, dest) in destinations {
        let Some(text) = output.artifacts.get(artifact) else {
            continue;
        };
        match dest {
            Some(path) => write_file(path, text)?,
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| format!("stdout: {e}"))?,
        }
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn execute(cli: Cli) -> Result<i32, String> {
    let (primary, args) = match &cli.command {
        Command::Repro(r) => {
            let output = repro(r.id, r.kmax, r.nodes, r.svg.is_some());
            let mut dests = vec![(Artifact::BoundsCsv, r.out.clone())];
            if let Some(svg) = &r.svg {
                dests.push((Artifact::BoundarySvg, Some(svg.clone())));
            }
            emit(&output, &dests)?;
            if let Some(text) = output.artifacts.get(&Artifact::VerdictText) {
                eprint!("{text}");
            }
            for line in &output.diagnostics {
                eprintln!("{line}");
            }
            return Ok(output.code);
        }
        Command::Check(a) => (Artifact::VerdictText, a),
        Command::Bounds(a) => (Artifact::BoundsCsv, a),
        Command::Trace(a) => (Artifact::BoundaryCsv, a),
        Command::Verdict(a) => (Artifact::VerdictText, a),
    };
    let mut job = job_from_args(args)?;
    let output = if matches!(cli.command, Command::Check(_)) {
        check(&job.map)
    } else {
        job.outputs.insert(primary, args.out.clone());
        if let Some(svg) = &args.svg {
            job.outputs.insert(Artifact::BoundarySvg, Some(svg.clone()));
        }
        run(&job)
    };
    let mut dests: Vec<(Artifact, Option<PathBuf>)> = job.outputs.clone().into_iter().collect();
    if matches!(cli.command, Command::Check(_)) {
        dests = vec![(primary, args.out.clone())];
    }
    emit(&output, &dests)?;
    for line in &output.diagnostics {
        eprintln!("{line}");
    }
    Ok(output.code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
