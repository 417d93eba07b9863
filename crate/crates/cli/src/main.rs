//! `heisenlab` — configuration-driven experiment runner.
//!
//! Subcommands: `entropic | tv-curve | typdist | ball | verify | word-stats`.
//! Every run writes CSV tables plus a JSON sidecar embedding the resolved
//! config and seed; re-running with the same config and seed reproduces the
//! CSV rows byte for byte.
//!
//! Exit codes: 0 success, 2 config error, 3 dense cap exceeded,
//! 4 verification failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{apply_env, load_config, parse_list};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Cap(String),
    Verification(String),
    Other(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Cap(m) => write!(f, "cap exceeded: {m}"),
            CliError::Verification(m) => write!(f, "verification failure: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<heisenlab::Error> for CliError {
    fn from(e: heisenlab::Error) -> Self {
        match e {
            heisenlab::Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            heisenlab::Error::NotPrime(_)
            | heisenlab::Error::DimensionTooSmall(_)
            | heisenlab::Error::ModulusTooLarge(_)
            | heisenlab::Error::LetterOutOfRange { .. }
            | heisenlab::Error::EntryOutOfRange { .. }
            | heisenlab::Error::EntryCount { .. }
            | heisenlab::Error::InvalidArgument(_) => CliError::Config(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "heisenlab",
    version,
    about = "Random Cayley graph laboratory for Heisenberg groups"
)]
struct Cli {
    /// TOML config file (env: HEISENLAB_CONFIG)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base RNG seed (env: HEISENLAB_SEED)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (env: HEISENLAB_OUT)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; 0 keeps the rayon default (env: HEISENLAB_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Dense cap for exact evolution and BFS (env: HEISENLAB_CAP)
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropic, diameter and window times over a k grid
    Entropic {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<u32>,
        /// Comma-separated k values
        #[arg(long)]
        k: Option<String>,
        /// Comma-separated window parameters
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Exact TV/L2/support curves of the walk (trajectory collisions beyond
    /// the cap)
    #[command(name = "tv-curve")]
    TvCurve {
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        replicas: Option<u64>,
        /// discrete | poissonized
        #[arg(long, value_name = "MODEL")]
        time_model: Option<String>,
        /// exact | trajectories
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        t_points: Option<usize>,
        /// Also write the replica-averaged curve
        #[arg(long)]
        average: bool,
        /// Paired trajectories per time point (trajectories mode)
        #[arg(long)]
        pairs: Option<u64>,
    },
    /// BFS distance histograms, typical-distance quantiles and radii
    Typdist {
        /// Comma-separated p schedule
        #[arg(long, value_name = "PS")]
        p_schedule: Option<String>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated beta quantiles
        #[arg(long)]
        beta: Option<String>,
        #[arg(long)]
        replicas: Option<u64>,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Lattice-ball volumes, radii and uniform samples
    Ball {
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        radius: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Cross-module invariant suites with counterexample dumps
    Verify {
        #[arg(long)]
        trials: Option<u64>,
        /// Fault injection hook (testing): cij-transpose
        #[arg(long)]
        inject: Option<String>,
    },
    /// Letter counts and ordered pair counts of a word
    #[command(name = "word-stats")]
    WordStats {
        /// Comma-separated letters in 1..=k
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        k: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut file = load_config(cli.config.as_deref())?;
    apply_env(&mut file.common)?;
    if let Some(seed) = cli.seed {
        file.common.seed = seed;
    }
    if let Some(out) = cli.out {
        file.common.out = out;
    }
    if let Some(threads) = cli.threads {
        file.common.threads = threads;
    }
    if let Some(cap) = cli.cap {
        file.common.cap = cap;
    }
    if file.common.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(file.common.threads)
            .build_global()
            .map_err(|e| CliError::Other(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::Entropic { p, d, k, alpha } => {
            let mut cfg = file.entropic;
            if let Some(p) = p {
                cfg.p = p;
            }
            if let Some(d) = d {
                cfg.d = d;
            }
            if let Some(k) = k {
                cfg.k = parse_list(&k, "k")?;
            }
            if let Some(alpha) = alpha {
                cfg.alpha = parse_list(&alpha, "alpha")?;
            }
            commands::run_entropic(&file.common, &cfg)
        }
        Command::TvCurve {
            p,
            d,
            k,
            replicas,
            time_model,
            mode,
            t_max,
            t_points,
            average,
            pairs,
        } => {
            let mut cfg = file.tv_curve;
            if let Some(p) = p {
                cfg.p = p;
            }
            if let Some(d) = d {
                cfg.d = d;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(replicas) = replicas {
                cfg.replicas = replicas;
            }
            if let Some(time_model) = time_model {
                cfg.time_model = time_model;
            }
            if let Some(mode) = mode {
                cfg.mode = mode;
            }
            if let Some(t_max) = t_max {
                cfg.t_max = t_max;
            }
            if let Some(t_points) = t_points {
                cfg.t_points = t_points;
            }
            if average {
                cfg.average = true;
            }
            if let Some(pairs) = pairs {
                cfg.pairs = pairs;
            }
            commands::run_tv_curve(&file.common, &cfg)
        }
        Command::Typdist {
            p_schedule,
            d,
            k,
            beta,
            replicas,
            omega,
        } => {
            let mut cfg = file.typdist;
            if let Some(ps) = p_schedule {
                cfg.p_schedule = parse_list(&ps, "p-schedule")?;
            }
            if let Some(d) = d {
                cfg.d = d;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            if let Some(beta) = beta {
                cfg.beta = parse_list(&beta, "beta")?;
            }
            if let Some(replicas) = replicas {
                cfg.replicas = replicas;
            }
            if omega.is_some() {
                cfg.omega = omega;
            }
            commands::run_typdist(&file.common, &cfg)
        }
        Command::Ball {
            k,
            radius,
            p,
            d,
            omega,
            samples,
        } => {
            let mut cfg = file.ball;
            if let Some(k) = k {
                cfg.k = k;
            }
            if radius.is_some() {
                cfg.radius = radius;
            }
            if p.is_some() {
                cfg.p = p;
            }
            if d.is_some() {
                cfg.d = d;
            }
            if omega.is_some() {
                cfg.omega = omega;
            }
            if let Some(samples) = samples {
                cfg.samples = samples;
            }
            commands::run_ball(&file.common, &cfg)
        }
        Command::Verify { trials, inject } => {
            let mut cfg = file.verify;
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            if let Some(inject) = inject {
                cfg.inject = inject;
            }
            commands::run_verify(&file.common, &cfg)
        }
        Command::WordStats { word, k } => {
            let mut cfg = file.word_stats;
            if let Some(word) = word {
                cfg.word = parse_list(&word, "word")?;
            }
            if let Some(k) = k {
                cfg.k = k;
            }
            commands::run_word_stats(&file.common, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
