use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hfi::commands::{self, Outcome};
use hfi::config::{self, Overrides, RunConfig};
use hfi::CliError;

/// High-frequency instability analysis of small-amplitude periodic traveling
/// waves. Settings come from `--config` first; flags override the file.
#[derive(Parser)]
#[command(name = "hfi", version, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Built-in model id
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true)]
    h: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Bifurcation index: waves of period 2π/N
    #[arg(long = "N", global = true)]
    n: Option<u32>,
    /// Largest |n| in the collision search
    #[arg(long = "n-max", global = true)]
    n_max: Option<u32>,
    /// Output directory; without it the primary artifact goes to stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Full six-step analysis with Krein-signature verdicts
    #[command(allow_negative_numbers = true)]
    Analyze {
        /// direct, first-row, second-row, even-first-row or even-second-row
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        branch: Option<u8>,
    },
    /// Zero-amplitude eigenvalue collisions
    #[command(allow_negative_numbers = true)]
    Collide,
    /// Small-amplitude traveling wave by Newton continuation
    #[command(allow_negative_numbers = true)]
    Wave(WaveArgs),
    /// Fourier-Floquet-Hill spectrum and instability bubbles
    #[command(allow_negative_numbers = true)]
    Spectrum {
        /// Wave JSON from `hfi wave`; built from the wave settings if absent
        #[arg(long)]
        wave: Option<PathBuf>,
        #[command(flatten)]
        wave_args: WaveArgs,
        #[arg(long = "mu-count")]
        mu_count: Option<usize>,
        /// Fourier truncation |n| <= M
        #[arg(long = "M")]
        m: Option<usize>,
        /// Skip refinement around predicted collisions
        #[arg(long = "no-refine")]
        no_refine: bool,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Curves Ω(k + n) and, for water waves, the first collision versus depth
    #[command(allow_negative_numbers = true)]
    Curves,
}

#[derive(Args)]
struct WaveArgs {
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    mean: Option<f64>,
    /// Proceed with ill-posed negative-average Boussinesq-Whitham waves
    #[arg(long)]
    force: bool,
}

impl WaveArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let w = &mut cfg.wave;
        w.amplitude = self.amplitude.or(w.amplitude);
        w.modes = self.modes.or(w.modes);
        w.steps = self.steps.or(w.steps);
        w.mean = self.mean.or(w.mean);
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => config::load(path)?,
        None => RunConfig::default(),
    };
    let params = [
        ("g", cli.g),
        ("h", cli.h),
        ("alpha", cli.alpha),
        ("beta", cli.beta),
        ("sigma", cli.sigma),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k, v)))
    .collect();
    cfg.apply(&Overrides {
        model: cli.model.clone(),
        params,
        n: cli.n,
        n_max: cli.n_max,
        out: cli.out.clone(),
        threads: cli.threads,
    });
    let outcome: Outcome = match &cli.command {
        Command::Analyze { formula, branch } => {
            if formula.is_some() {
                cfg.formula.clone_from(formula);
            }
            cfg.branch = branch.or(cfg.branch);
            commands::with_threads(cfg.threads, || commands::analyze(&cfg))?
        }
        Command::Collide => commands::with_threads(cfg.threads, || commands::collide(&cfg))?,
        Command::Wave(args) => {
            args.apply(&mut cfg);
            commands::with_threads(cfg.threads, || commands::wave(&cfg, args.force))?
        }
        Command::Spectrum {
            wave,
            wave_args,
            mu_count,
            m,
            no_refine,
            threshold,
        } => {
            wave_args.apply(&mut cfg);
            let h = &mut cfg.hill;
            h.mu_count = mu_count.or(h.mu_count);
            h.m = m.or(h.m);
            h.threshold = threshold.or(h.threshold);
            if *no_refine {
                h.refine = Some(false);
            }
            commands::with_threads(cfg.threads, || {
                commands::spectrum(&cfg, wave.as_deref(), wave_args.force)
            })?
        }
        Command::Curves => commands::with_threads(cfg.threads, || commands::curves(&cfg))?,
    };
    for note in &outcome.notes {
        eprintln!("{note}");
    }
    commands::emit(&outcome, cfg.out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
