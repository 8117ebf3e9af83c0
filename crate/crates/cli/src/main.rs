//! `plap`: simulation and verification driver for the 1D strongly damped
//! wave equation with p-Laplacian diffusion.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::Context;
use plap_core::dynamics::Scheme;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "plap",
    version,
    about = "Implicit solver and verification battery for u_tt - u_txx - (|u_x|^{p-2} u_x)_x + f(u) = g on (0,1)"
)]
struct Cli {
    /// Run configuration file (flat key = value; defaults fill missing keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV artifacts and the manifest.
    #[arg(long, default_value = "plap-out", global = true)]
    out: PathBuf,

    /// Master seed; recorded in every artifact header.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,

    /// Worker threads for parallel sections (0 = library default).
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,

    /// Time scheme: be (backward Euler) or mp (midpoint).
    #[arg(long, default_value = "be", global = true)]
    scheme: String,

    /// Proceed even when the growth condition on f fails.
    #[arg(long, global = true)]
    override_growth_check: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the equation and write trajectory, ledger and forcing CSVs.
    Simulate,
    /// Multistart approximation of the stationary set.
    Stationary {
        /// Number of Newton starts.
        #[arg(long, default_value_t = 16)]
        starts: usize,
    },
    /// Long-horizon ensemble runs with distances to the stationary set.
    OmegaLimit {
        #[arg(long, default_value_t = 8)]
        members: usize,
        /// Integration horizon.
        #[arg(long, default_value_t = 40.0)]
        t_long: f64,
        /// H1 amplitude cap for the random ensemble.
        #[arg(long, default_value_t = 2.0)]
        amplitude: f64,
        /// Repeat on 2x and 4x refined grids and write the slope-drift report.
        #[arg(long)]
        refine: bool,
    },
    /// Minimized L^p Rayleigh quotient (the Poincare-type constant).
    Poincare {
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
    },
    /// Fit and verify the heat-propagator decay envelope.
    VerifyDecay {
        /// Grid size.
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Sup-norm embedding constant across grid refinements.
    VerifyEmbedding {
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
    },
    /// Randomized differential-inequality campaign.
    VerifyLemmaA2 {
        #[arg(long, default_value_t = 10_000)]
        cases: usize,
        #[arg(long, default_value_t = 1e-4)]
        dt: f64,
    },
    /// Run the full verification battery and write all artifacts.
    Suite {
        /// Campaign size inside the battery (>= 10000 for the full run).
        #[arg(long, default_value_t = 10_000)]
        campaign_cases: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("PLAP_LOG", "warn")).init();
    let started = Instant::now();
    let cli = Cli::parse();

    let scheme = match Scheme::parse(&cli.scheme) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::EXIT_BAD_CONFIG);
        }
    };

    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    #[cfg(not(feature = "parallel"))]
    if cli.threads > 1 {
        log::warn!("built without the 'parallel' feature; --threads ignored");
    }

    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create output directory {}: {e}", cli.out.display());
        return ExitCode::from(commands::EXIT_BAD_CONFIG);
    }

    let ctx = Context {
        out: cli.out.clone(),
        seed: cli.seed,
        scheme,
        threads: cli.threads,
        override_growth_check: cli.override_growth_check,
        config_path: cli.config.clone(),
        started,
    };

    // Model-driven commands parse the config up front; exit 2 on any
    // config problem with a line-precise message.
    let needs_model = matches!(
        cli.command,
        Command::Simulate | Command::Stationary { .. } | Command::OmegaLimit { .. }
    );
    let run_cfg = if needs_model {
        match &cli.config {
            Some(path) => match config::parse_config(path) {
                Ok(c) => Some(c),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(commands::EXIT_BAD_CONFIG);
                }
            },
            None => Some(config::default_config()),
        }
    } else {
        None
    };

    let code = match cli.command {
        Command::Simulate => commands::simulate(&ctx, run_cfg.as_ref().unwrap()),
        Command::Stationary { starts } => {
            commands::stationary_cmd(&ctx, run_cfg.as_ref().unwrap(), starts)
        }
        Command::OmegaLimit {
            members,
            t_long,
            amplitude,
            refine,
        } => commands::omega_limit(&ctx, run_cfg.as_ref().unwrap(), members, t_long, amplitude, refine),
        Command::Poincare { p, resolution } => commands::poincare(&ctx, p, resolution),
        Command::VerifyDecay { n } => commands::verify_decay(&ctx, n),
        Command::VerifyEmbedding { epsilon } => commands::verify_embedding(&ctx, epsilon),
        Command::VerifyLemmaA2 { cases, dt } => commands::verify_lemma_a2(&ctx, cases, dt),
        Command::Suite { campaign_cases } => commands::suite(&ctx, campaign_cases),
    };
    ExitCode::from(code)
}
