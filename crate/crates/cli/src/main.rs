use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spde_inverse_cli::{
    emit_plot_data, run_convergence, run_pipeline, with_threads, ExperimentConfig, Result, Study,
};

#[derive(Parser)]
#[command(
    name = "spde-inverse",
    version,
    about = "Recover q^2(t) in du = Lap u dt + q u dB from point observations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Heat,
    Spde,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate, reconstruct and write a result bundle.
    Pipeline {
        config: PathBuf,
        /// Bundle directory (default: `<config stem>-out` next to the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a refinement rate table.
    Convergence {
        kind: Kind,
        config: PathBuf,
        /// Output CSV (default: `convergence-<kind>.csv` next to the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate plot CSVs and metrics.json from an existing bundle.
    Emit { bundle: PathBuf },
}

fn sibling(config: &std::path::Path, name: String) -> PathBuf {
    config
        .parent()
        .map_or_else(|| PathBuf::from(&name), |d| d.join(&name))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Pipeline { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let stem = config
                .file_stem()
                .map_or("run".into(), |s| s.to_string_lossy().into_owned());
            let out = out.unwrap_or_else(|| sibling(&config, format!("{stem}-out")));
            let m = with_threads(cfg.threads, || run_pipeline(&cfg, &out))??;
            println!(
                "{}: trimmed rel. l2 error {:.4e}, discarded {}/{}",
                out.display(),
                m.rel_l2_error_trimmed,
                m.discarded_paths,
                m.paths
            );
        }
        Command::Convergence { kind, config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (study, name) = match kind {
                Kind::Heat => (Study::Heat, "heat"),
                Kind::Spde => (Study::Spde, "spde"),
            };
            let out = out.unwrap_or_else(|| sibling(&config, format!("convergence-{name}.csv")));
            let tables = with_threads(cfg.threads, || run_convergence(study, &cfg, &out))??;
            for t in tables {
                println!("{}: fitted order {:.3}", t.study, t.fitted_order);
            }
        }
        Command::Emit { bundle } => {
            emit_plot_data(&bundle)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
