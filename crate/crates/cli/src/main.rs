//! `resonate`: run one task from a config file, write `<id>.kv` and `<id>.csv`.

mod commands;
mod config;
mod output;

use clap::{Parser, ValueEnum};
use commands::Failure;
use config::RunConfig;
use output::Record;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    PairSpectrum,
    PairResonances,
    Loci,
    SheetMap,
    ThreeBound,
    ThreeResonances,
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "resonate", version, about = "Two- and three-body resonances from physical-sheet data")]
struct Cli {
    command: Command,
    /// config file (section.key = value)
    #[arg(long)]
    config: Option<PathBuf>,
    /// output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// worker threads for region scans
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    verbose: bool,
}

fn command_name(c: Command) -> String {
    c.to_possible_value().unwrap().get_name().to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(cli.command);
    let src = match &cli.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("cannot read {}: {e}", p.display());
                return ExitCode::from(1);
            }
        },
        None => String::new(),
    };
    let cfg = match RunConfig::parse(&src, &name) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config: {e}");
            return ExitCode::from(1);
        }
    };
    if cli.workers == 0 {
        eprintln!("--workers must be at least 1");
        return ExitCode::from(1);
    }
    // a second global build only fails if a pool already exists
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global();
    if cli.verbose {
        eprintln!("{name}: id {}, {} worker(s)", cfg.id, cli.workers);
    }

    let mut head = Record::default();
    head.put("task.id", cfg.id.clone());
    head.put("task.command", name.clone());
    head.put("provenance.version", env!("CARGO_PKG_VERSION"));
    head.put("provenance.nodes", cfg.nodes.to_string());
    head.num("provenance.theta", cfg.theta);
    for (k, v) in cfg.echo() {
        head.put(format!("config.{k}"), v);
    }

    let (code, body, tab) = match commands::run(&cfg, cli.verbose) {
        Ok(r) => {
            let code = r.verdict.as_ref().map_or(0, Failure::code);
            if let Some(f) = &r.verdict {
                eprintln!("{f}");
                head.put("status.error", f.to_string());
            }
            (code, Some(r.rec), r.tab)
        }
        Err(f) => {
            eprintln!("{f}");
            head.put("status.error", f.to_string());
            (f.code(), None, output::Table::new(&["error"]))
        }
    };
    head.put("status.exit_code", code.to_string());
    if let Some(b) = body {
        head.put("status.ok", (code == 0).to_string());
        let text = b.render();
        for line in text.lines() {
            if let Some((k, v)) = line.split_once(" = ") {
                head.put(format!("result.{k}"), v.to_string());
            }
        }
    } else {
        head.put("status.ok", "false");
    }
    if let Err(e) = output::write(&cli.out, &cfg.id, &head, &tab) {
        eprintln!("cannot write results: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
