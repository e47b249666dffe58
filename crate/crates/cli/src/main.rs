use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use concave_skew::maps::check_hypotheses;

mod commands;
mod config;
mod output;

use commands::{CliError, Command};
use config::RunConfig;

const WORKERS_ENV: &str = "CONCAVE_SKEW_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "concave-skew", version, about = "Concave skew products over the full shift")]
struct Cli {
    /// INI run configuration; defaults to the reference pair.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit a JSON envelope instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Run even if the configured pair fails the hypothesis check.
    #[arg(long, global = true)]
    force: bool,
    /// Overrides `[run] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `[run] output`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.output {
        cfg.output = Some(out.clone());
    }
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        let n: usize = raw.trim().parse().with_context(|| format!("{WORKERS_ENV}={raw} is not a worker count"))?;
        anyhow::ensure!(n > 0, "{WORKERS_ENV} must be positive");
        cfg.workers = Some(n);
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    let cfg = load_config(cli).map_err(Failure::Config)?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.into()))?;
    }
    let pair = cfg.pair().map_err(|e| Failure::Config(e.into()))?;
    let mut warnings = Vec::new();
    if cli.command.needs_valid_pair() {
        let report = check_hypotheses(&pair, 1000).map_err(|e| Failure::Config(e.into()))?;
        if !(report.h1_ok && report.h2_ok && report.h2plus_ok) {
            let msg = match &report.worst_violation {
                Some(v) => format!("hypothesis {} fails at x = {} by {}", v.clause, v.location, v.magnitude),
                None => "hypotheses fail".to_string(),
            };
            if !cli.force {
                return Err(Failure::Config(anyhow::anyhow!("{msg} (use --force to run anyway)")));
            }
            warnings.push(format!("--force: {msg}"));
        }
    }

    let mut outcome = commands::run(&cli.command, &cfg, &pair).map_err(|e| match e {
        CliError::Config(e) => Failure::Config(e.into()),
        CliError::Compute(e) => Failure::Config(anyhow::Error::new(e).context(cli.command.name())),
    })?;
    warnings.append(&mut outcome.table.warnings);
    outcome.table.warnings = warnings;

    let sink: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(File::create(path).with_context(|| format!("creating {}", path.display())).map_err(Failure::Runtime)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let written = if cli.json {
        let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        let env = outcome.table.envelope(cli.command.name(), &cfg.hash(), &stamp);
        serde_json::to_writer_pretty(&mut sink, &env).map_err(anyhow::Error::from).and_then(|_| Ok(writeln!(sink)?))
    } else {
        for w in &outcome.table.warnings {
            eprintln!("warning: {w}");
        }
        outcome.table.write_csv(&mut sink).map_err(anyhow::Error::from)
    };
    written.and_then(|_| Ok(sink.flush()?)).map_err(Failure::Runtime)?;
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
