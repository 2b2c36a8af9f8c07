use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use decowave::cli::{self, Reference, UnknownKeys};
use decowave::front::DEFAULT_THRESHOLD;
use decowave::Error;

#[derive(Parser)]
#[command(name = "decowave", version, about = "Decoherence waves after a local number measurement in a condensate")]
struct Cli {
    /// Warn about unknown config keys instead of rejecting them.
    #[arg(long, global = true)]
    lenient: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured system and write the CSV table and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the configured system against an analytic or exact reference.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        reference: RefArg,
    },
    /// Fit the speed of the density front.
    FrontSpeed {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefArg {
    Analytic,
    Oracle,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let unknown = if cli.lenient { UnknownKeys::Warn } else { UnknownKeys::Reject };
    match execute(cli.command, unknown) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command, unknown: UnknownKeys) -> Result<u8, Error> {
    match command {
        Command::Run { config } => {
            let cfg = cli::load_config(&config, unknown)?;
            for w in &cfg.warnings {
                eprintln!("warning: {w}");
            }
            let out = cli::run(&cfg).map_err(|e| {
                eprintln!("run failed for {} system", cfg.kind.name());
                e
            })?;
            println!("wrote {}", out.csv_path.display());
            println!("wrote {}", out.manifest_path.display());
            Ok(0)
        }
        Command::Compare { config, reference } => {
            let cfg = cli::load_config(&config, unknown)?;
            let reference = match reference {
                RefArg::Analytic => Reference::Analytic,
                RefArg::Oracle => Reference::Oracle,
            };
            let report = cli::compare(&cfg, reference)?;
            for s in &report.sections {
                let verdict = if s.passed { "pass" } else { "FAIL" };
                let tag = if s.enforced { "" } else { " (informational)" };
                println!(
                    "{verdict} {}{tag}: max abs {:.3e}, mean abs {:.3e}, max rel {:.3e}, tolerance {:.1e}",
                    s.name, s.max_abs, s.mean_abs, s.max_rel, s.tolerance
                );
            }
            for row in &report.scaling {
                println!("M = {:>4}  dim = {:>6}  max deviation {:.3e}", row.particles, row.hilbert_dimension, row.max_deviation);
            }
            std::fs::create_dir_all(&cfg.output.directory)?;
            let name = match reference {
                Reference::Analytic => "compare_analytic",
                Reference::Oracle => "compare_oracle",
            };
            let path = cfg.output.directory.join(format!("{}_{name}.json", cfg.output.prefix));
            std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            println!("wrote {}", path.display());
            Ok(if report.passed { 0 } else { 2 })
        }
        Command::FrontSpeed { config, threshold } => {
            let cfg = cli::load_config(&config, unknown)?;
            let report = cli::front_speed(&cfg, threshold)?;
            println!("front speed {:.6} (residual {:.3e}, {} arrivals)", report.fit.speed, report.fit.residual, report.fit.arrivals.len());
            if let Some(c) = report.sound_speed {
                println!("sound speed {c:.6}");
            }
            Ok(0)
        }
        Command::Selftest => {
            let lines = cli::selftest()?;
            let mut ok = true;
            for l in &lines {
                ok &= l.passed;
                println!("{} {:<28} {:.3e} (tolerance {:.1e})", if l.passed { "pass" } else { "FAIL" }, l.name, l.value, l.tolerance);
            }
            Ok(if ok { 0 } else { 2 })
        }
    }
}
