use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rifslab::{
    corpus, load_config, parse_config, resolve_budget, run, RunError, RunOptions, BUDGET_ENV,
};

#[derive(Parser)]
#[command(
    name = "rifslab",
    version,
    about = "Experiments on random iterated function systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a config. `corpus:NAME` selects a bundled config.
    Run {
        config: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Maximum number of cylinders in any cover.
        #[arg(long)]
        budget: Option<u64>,
        /// Suppress the run log.
        #[arg(long, short)]
        quiet: bool,
    },
    /// Check a config without running it.
    Validate { config: String },
    /// Bundled example configs.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List bundled configs.
    List,
    /// Print a bundled config.
    Show { name: String },
}

fn load(spec: &str) -> Result<rifslab::ExperimentConfig, RunError> {
    match spec.strip_prefix("corpus:") {
        Some(name) => {
            let text = corpus::lookup(name).ok_or_else(|| {
                RunError::Config(rifslab::ConfigError::Schema {
                    field: String::new(),
                    message: format!("no bundled config named {name:?}"),
                })
            })?;
            Ok(parse_config(text)?)
        }
        None => Ok(load_config(spec.as_ref())?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            budget,
            quiet,
        } => {
            let budget = match resolve_budget(budget, std::env::var(BUDGET_ENV).ok().as_deref()) {
                Ok(b) => b,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    return ExitCode::from(1);
                }
            };
            let opts = RunOptions {
                out_dir: out,
                seed,
                budget,
                verbose: !quiet,
            };
            load(&config).and_then(|cfg| run(&cfg, &opts)).map(|_| ())
        }
        Command::Validate { config } => load(&config).map(|cfg| {
            println!(
                "{}: ok ({} systems, {} tasks)",
                cfg.name(),
                cfg.rifs.len(),
                cfg.tasks().len()
            );
        }),
        Command::Corpus { action } => match action {
            CorpusAction::List => {
                for name in corpus::names() {
                    let cfg = parse_config(corpus::lookup(name).expect("listed name"))
                        .expect("bundled configs are valid");
                    println!("{name}\t{}", cfg.file.description);
                }
                Ok(())
            }
            CorpusAction::Show { name } => match corpus::lookup(&name) {
                Some(text) => {
                    print!("{text}");
                    Ok(())
                }
                None => {
                    eprintln!("error: no bundled config named {name:?}");
                    return ExitCode::from(1);
                }
            },
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
