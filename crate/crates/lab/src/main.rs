use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orlicz_lab::config::{self, Format};
use orlicz_lab::report::{export_tables, Report};
use orlicz_lab::{runner, LabError};

#[derive(Parser)]
#[command(name = "orlicz-lab", version, about = "Run Orlicz-space probe suites from a TOML config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every suite in a config and write report.json plus tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; falls back to `output.dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the tables of an existing report next to it.
    Export {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
    },
}

fn main() -> ExitCode {
    match try_main(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("orlicz-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn try_main(cli: Cli) -> Result<u8, LabError> {
    match cli.command {
        Command::Run { config, out, format, seed } => {
            let loaded = config::load(&config)?;
            let out = out
                .or_else(|| loaded.config.output.dir.as_ref().map(PathBuf::from))
                .ok_or_else(|| LabError::Config("no output directory: pass --out or set output.dir".into()))?;
            let format = format.or(loaded.config.output.format).unwrap_or_default();
            let report = runner::run(&loaded, seed.unwrap_or(loaded.config.seed));
            std::fs::create_dir_all(&out).map_err(|source| LabError::Io { path: out.clone(), source })?;
            let path = out.join("report.json");
            std::fs::write(&path, report.to_json()).map_err(|source| LabError::Io { path: path.clone(), source })?;
            export_tables(&report, &out, format)?;
            for s in &report.suites {
                let passed = s.checks.iter().filter(|c| c.passed).count();
                println!("suite {:>2} {:<18} {:<8} {}/{} checks", s.index, s.kind, s.function, passed, s.checks.len());
            }
            match &report.first_failure {
                None => {
                    println!("all assertions passed; report at {}", path.display());
                    Ok(0)
                }
                Some(f) => {
                    eprintln!("assertion failed: {f}");
                    Ok(1)
                }
            }
        }
        Command::Export { report, format } => {
            let r = Report::read(&report)?;
            let dir = match report.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            for p in export_tables(&r, &dir, format)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
    }
}
