//! The five commands. Each returns its artifacts; the first one is primary
//! and goes to stdout when no output directory is set.

use std::path::Path;

use hfi_core::collision::{log_grid, secant_curve_data, trace_first_collision_vs_depth, CollisionSearch};
use hfi_core::hill::{self, detect_bubbles, MuGrid, SpectrumSet, DEFAULT_BUBBLE_THRESHOLD};
use hfi_core::krein::{run_pipeline_using, PipelineOptions};
use hfi_core::linalg::hausdorff;
use hfi_core::waves::{bw_flat_state_analysis, solve_wave, WaveOptions};
use hfi_core::{CollisionEvent, ModelSpec, PoissonKind, TravelingWave};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::{output, CliError};

pub struct Artifact {
    pub name: &'static str,
    pub contents: String,
}

#[derive(Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// Warnings and summaries for stderr.
    pub notes: Vec<String>,
}

impl Outcome {
    fn push(&mut self, name: &'static str, contents: String) {
        self.artifacts.push(Artifact { name, contents });
    }
}

fn search_parallel(
    search: &CollisionSearch<'_>,
) -> Result<Vec<CollisionEvent>, hfi_core::collision::CollisionError> {
    let parts = search
        .pairs()
        .into_par_iter()
        .map(|p| search.search_pair(p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(search.finalize(parts.into_iter().flatten().collect()))
}

fn collisions_at(
    model: &ModelSpec,
    c: f64,
    cfg: &RunConfig,
) -> Result<Vec<CollisionEvent>, CliError> {
    let search = CollisionSearch::new(model, c, cfg.n_max(), cfg.collision_options())?;
    Ok(search_parallel(&search)?)
}

pub fn analyze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let opts = PipelineOptions {
        branch: cfg.branch(),
        collision: cfg.collision_options(),
        formula: cfg.formula()?,
    };
    let report = run_pipeline_using(&model, cfg.n()?, cfg.n_max(), &opts, search_parallel)?;
    let mut out = Outcome::default();
    out.notes.push(format!(
        "{}: {} events, {} with opposite signatures: {}",
        report.model, report.counts.events, report.counts.potential_instability, report.overall
    ));
    out.push("report.json", output::pretty(&output::report(&report)));
    Ok(out)
}

pub fn collide(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let n = cfg.n()?;
    let c = model.bifurcation_speed(cfg.branch(), n)?;
    let events = collisions_at(&model, c, cfg)?;
    let mut out = Outcome::default();
    out.push(
        "collisions.json",
        output::pretty(&output::collisions(&model.id, n, c, &events)),
    );
    Ok(out)
}

fn wave_options(cfg: &RunConfig) -> WaveOptions {
    let d = WaveOptions::default();
    WaveOptions {
        modes: cfg.wave.modes.unwrap_or(d.modes),
        steps: cfg.wave.steps.unwrap_or(d.steps),
        mean: cfg.wave.mean.unwrap_or(d.mean),
        ..d
    }
}

fn build_wave(model: &ModelSpec, cfg: &RunConfig, force: bool, notes: &mut Vec<String>) -> Result<TravelingWave, CliError> {
    if model.kind == PoissonKind::Canonical {
        return Err(CliError::Config(format!(
            "model `{}`: traveling waves of canonical two-component models are not supported",
            model.id
        )));
    }
    let opts = wave_options(cfg);
    if model.kind == PoissonKind::NoncanonicalBw && opts.mean < 0.0 {
        let flat = bw_flat_state_analysis(model, opts.mean)?;
        let msg = format!(
            "Boussinesq-Whitham waves of negative average {} are ill-posed: the flat state \
             grows without bound above k = {}",
            opts.mean,
            flat.cutoff_k.map_or("?".into(), output::float)
        );
        if !force {
            return Err(CliError::Config(format!("{msg}; pass --force to continue")));
        }
        notes.push(format!("warning: {msg}"));
    }
    let amplitude = cfg.wave.amplitude.unwrap_or(0.01);
    let w = solve_wave(model, amplitude, &opts)?;
    if let Some(t) = hill::truncation_warning(&w) {
        notes.push(format!(
            "warning: wave tail {t:e} exceeds {:e}; increase modes",
            hill::TRUNCATION_TOL
        ));
    }
    Ok(w)
}

pub fn wave(cfg: &RunConfig, force: bool) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let mut out = Outcome::default();
    let w = build_wave(&model, cfg, force, &mut out.notes)?;
    out.notes.push(format!(
        "{}: c = {}, a1 = {}, residual {:e}",
        w.model,
        output::float(w.speed),
        output::float(w.amplitude),
        w.residual
    ));
    out.push("wave.json", output::pretty(&output::wave(&w)));
    Ok(out)
}

pub fn spectrum(cfg: &RunConfig, wave_file: Option<&Path>, force: bool) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    if model.kind == PoissonKind::Canonical {
        return Err(CliError::Config(format!(
            "model `{}`: no spectrum path for canonical two-component models \
             (finite-amplitude waves are out of scope)",
            model.id
        )));
    }
    let mut out = Outcome::default();
    let w = match wave_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read wave file {}: {e}", path.display()))
            })?;
            let w = output::parse_wave(&text)?;
            if w.model != model.id {
                return Err(CliError::Config(format!(
                    "wave file is for `{}` but the model is `{}`",
                    w.model, model.id
                )));
            }
            if let Some(t) = hill::truncation_warning(&w) {
                out.notes.push(format!("warning: wave tail {t:e} exceeds {:e}", hill::TRUNCATION_TOL));
            }
            w
        }
        None => build_wave(&model, cfg, force, &mut out.notes)?,
    };
    let m = cfg.hill.m.unwrap_or(64);
    let c0 = model.bifurcation_speed(cfg.branch(), cfg.n()?)?;
    let predictions: Vec<CollisionEvent> = collisions_at(&model, c0, cfg)?
        .into_iter()
        .filter(|e| !e.at_origin)
        .collect();
    let count = cfg.hill.mu_count.unwrap_or(500);
    let grid = if cfg.hill.refine.unwrap_or(true) {
        MuGrid::refined(count, &predictions)
    } else {
        MuGrid::uniform(count)
    };
    let entries = grid
        .values()
        .into_par_iter()
        .map(|mu| hill::spectrum_at(&model, &w, mu, m).map(|s| (mu, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SpectrumSet::from_entries(&model.id, m, entries);
    let zero_dev = if w.coefficients.iter().all(|&a| a == 0.0) {
        let mut worst = 0.0f64;
        for (mu, values) in &spec.entries {
            let exact = hill::closed_form_spectrum(&model, w.speed, *mu, m)?;
            worst = worst.max(hausdorff(values, &exact));
        }
        out.notes.push(format!("zero-amplitude check: max deviation {worst:e}"));
        Some(worst)
    } else {
        None
    };
    let threshold = cfg.hill.threshold.unwrap_or(DEFAULT_BUBBLE_THRESHOLD);
    let bubbles = detect_bubbles(&spec, threshold, &predictions);
    out.notes.push(format!(
        "{} mu values, {} bubbles, max Re {:e}",
        spec.entries.len(),
        bubbles.len(),
        spec.max_real()
    ));
    out.push("spectrum.csv", output::spectrum_csv(&spec));
    out.push(
        "bubbles.json",
        output::pretty(&output::bubbles(&output::BubbleReport {
            spectrum: &spec,
            bubbles: &bubbles,
            predictions: &predictions,
            threshold,
            zero_amplitude_deviation: zero_dev,
            truncation_tail: w.tail_magnitude(),
        })),
    );
    Ok(out)
}

pub fn curves(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let model = cfg.model_spec()?;
    let c = model.bifurcation_speed(cfg.branch(), cfg.n()?)?;
    let n_max = cfg.n_max() as i64;
    let k_grid: Vec<f64> = (0..=400).map(|i| -0.5 + i as f64 / 400.0).collect();
    let points = secant_curve_data(&model, c, -n_max..=n_max, &k_grid)?;
    let mut out = Outcome::default();
    out.push("curves.csv", output::curves_csv(&points));
    if model.id == "water-waves" {
        let g = model.params.require("g").map_err(|e| CliError::Config(e.to_string()))?;
        let trace = trace_first_collision_vs_depth(g, &log_grid(0.5, 100.0, 40), cfg.n_max())?;
        out.push("depth_trace.csv", output::depth_csv(&trace));
    }
    Ok(out)
}

/// Writes every artifact into `dir`, or the primary one to stdout.
pub fn emit(outcome: &Outcome, dir: Option<&Path>) -> Result<(), CliError> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for a in &outcome.artifacts {
                std::fs::write(dir.join(a.name), &a.contents)?;
            }
        }
        None => {
            if let Some(a) = outcome.artifacts.first() {
                use std::io::Write;
                std::io::stdout().write_all(a.contents.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// Runs `f` on a pool of `threads` workers (the global pool when `None`).
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    match threads {
        None => f(),
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?
            .install(f),
    }
}
