mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use commands::{Ctx, Failure};
use config::{Cli, Format, RunArgs, RunConfig, SCHEMA};
use output::Emitter;

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)?;
    let cfg: RunConfig =
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {}", path.display(), e.message())))?;
    if cfg.schema != SCHEMA {
        return Err(Failure::Usage(format!(
            "config {}: field `schema` is {:?}, expected {SCHEMA:?}",
            path.display(),
            cfg.schema
        )));
    }
    Ok(cfg)
}

/// Command-line run flags that differ from their defaults override the config file.
fn overlay(file: RunArgs, cli: RunArgs) -> RunArgs {
    let d = RunArgs::default();
    RunArgs {
        format: if cli.format != d.format { cli.format } else { file.format },
        threads: cli.threads.or(file.threads),
        seed: if cli.seed != d.seed { cli.seed } else { file.seed },
        enum_cap: cli.enum_cap.or(file.enum_cap),
        output: cli.output.or(file.output),
    }
}

fn resolve(cli: Cli) -> Result<(RunConfig, bool), Failure> {
    let cfg = match (&cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(Failure::Usage("--config cannot be combined with a subcommand".into())),
        (Some(path), None) => {
            let file = load_config(path)?;
            RunConfig {
                run: overlay(file.run, cli.run),
                ..file
            }
        }
        (None, Some(command)) => RunConfig {
            schema: SCHEMA.into(),
            run: cli.run,
            command,
        },
        (None, None) => {
            Cli::command().print_help()?;
            return Err(Failure::Usage("no subcommand given".into()));
        }
    };
    Ok((cfg, cli.emit_config))
}

fn execute(cfg: &RunConfig) -> Result<Option<bool>, Failure> {
    if let Some(n) = cfg.run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let out: Box<dyn Write> = match &cfg.run.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut em = Emitter::new(cfg.run.format, out);
    match cfg.run.format {
        Format::Jsonl => em.record("config", cfg)?,
        Format::Csv => eprint!("{}", toml::to_string(cfg).map_err(|e| Failure::Usage(e.to_string()))?),
    }
    let ctx = Ctx {
        seed: cfg.run.seed,
        enum_cap: cfg.run.enum_cap,
    };
    let verdict = commands::run(&cfg.command, &ctx, &mut em);
    em.flush()?;
    verdict
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(cli).and_then(|(cfg, emit)| {
        if emit {
            let text = toml::to_string(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
            print!("{text}");
            return Ok(None);
        }
        execute(&cfg)
    });
    match result {
        Ok(Some(false)) => {
            eprintln!("verdict: fail");
            ExitCode::from(1)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
