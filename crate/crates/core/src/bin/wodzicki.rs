use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wodzicki::cli::{run_task, RunConfig, Task, TaskOutput, EXIT_ERROR, EXIT_USAGE};
use wodzicki::Error;

/// Wodzicki residues on tori and SU(2) via weak-ℓ¹ norms and zeta traces.
#[derive(Parser)]
#[command(name = "wodzicki", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Residue of a (possibly x-dependent) symbol of order -n.
    Residue(Common),
    /// Weak-ℓ¹ norm as the slope of partial sums against log N.
    Weakl1(Common),
    /// Residue of the zeta trace at z = 0.
    Zeta(Common),
    /// Partial-sum series as CSV.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads; 0 or absent uses all cores.
    #[arg(long, env = "RESIDUE_THREADS", value_name = "N")]
    threads: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn series_path(config: &RunConfig, out: Option<&Path>) -> Option<PathBuf> {
    config
        .output
        .series
        .as_ref()
        .map(PathBuf::from)
        .or_else(|| out.map(|p| p.with_extension("csv")))
}

fn execute(task: Task, args: &Common) -> Result<i32, Error> {
    let mut config = RunConfig::load(&args.config)?.with_task(task)?;
    let csv_path = (task == Task::Sweep).then(|| series_path(&config, args.out.as_deref())).flatten();
    if let Some(p) = &csv_path {
        config.output.series = Some(p.display().to_string());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start thread pool: {e}")))?;
    let TaskOutput { report, csv } = pool.install(|| run_task(&config))?;

    if let Some(csv) = &csv {
        match &csv_path {
            Some(p) => std::fs::write(p, csv)?,
            None => print!("{csv}"),
        }
    }
    let json = report.to_json();
    match &args.out {
        Some(p) => std::fs::write(p, &json)?,
        None if csv.is_none() || csv_path.is_some() => print!("{json}"),
        None => {}
    }
    if args.verbose {
        if let Some(v) = report.value {
            eprintln!("value: {} + {}i", v.re, v.im);
        }
        if let Some(e) = report.error_bar {
            eprintln!("error bar: {e}");
        }
        if let Some(e) = &report.error {
            eprintln!("error: {e}");
        }
        let flags: Vec<&str> = report.flags.iter().map(|f| f.as_str()).collect();
        eprintln!("flags: [{}]", flags.join(", "));
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let (task, args) = match &cli.command {
        Command::Residue(a) => (Task::Residue, a),
        Command::Weakl1(a) => (Task::Weakl1, a),
        Command::Zeta(a) => (Task::Zeta, a),
        Command::Sweep(a) => (Task::Sweep, a),
    };
    let code = match execute(task, args) {
        Ok(code) => code,
        Err(e @ Error::Config(_)) => {
            eprintln!("wodzicki: {e}");
            eprintln!("usage: wodzicki <residue|weakl1|zeta|sweep> --config PATH [--out PATH] [--threads N] [--verbose]");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("wodzicki: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
