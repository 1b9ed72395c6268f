//! Small-amplitude periodic traveling waves: Stokes seeds and Newton
//! continuation in cosine space.
//!
//! Scalar models solve the integrated traveling-wave equation
//! `−cU + σU^{p+1}/(p+1) + K U = B`, where `K` has symbol `ω(k)/k`.
//! Boussinesq–Whitham solves `−c²Q + αQ² + K Q = −A`, where `K` has symbol
//! `c²(k)`. Profiles are even, `U = Σ a_j cos(jx)`, which removes the
//! translation degeneracy; `a_0` (the mean) and `a_1` (the amplitude) are
//! pinned and the remaining coefficients are solved for together with the speed.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dispersion::{ModelError, ModelSpec, Nonlinearity, PoissonKind};
use crate::linalg::{self, LinalgError};
use crate::math::{cos, pow, powi, sqrt, PI};

#[derive(Clone, Debug, PartialEq)]
pub struct TravelingWave {
    pub model: String,
    pub speed: f64,
    /// Cosine coefficients `a_0..a_M` of the `2π`-periodic profile.
    pub coefficients: Vec<f64>,
    /// `a_1`.
    pub amplitude: f64,
    /// `B` for scalar models, `A` for Boussinesq–Whitham.
    pub integration_constant: f64,
    pub residual: f64,
}

impl TravelingWave {
    pub fn zero(model: &str, speed: f64, modes: usize) -> Self {
        TravelingWave {
            model: model.to_string(),
            speed,
            coefficients: vec![0.0; modes + 1],
            amplitude: 0.0,
            integration_constant: 0.0,
            residual: 0.0,
        }
    }

    /// Highest harmonic `M`.
    pub fn modes(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn mean(&self) -> f64 {
        self.coefficients.first().copied().unwrap_or(0.0)
    }

    pub fn profile(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, a)| a * cos(j as f64 * x))
            .sum()
    }

    /// Largest coefficient magnitude in the last quarter of the harmonics; a
    /// resolved wave has this below `1e-12`.
    pub fn tail_magnitude(&self) -> f64 {
        let m = self.modes();
        if m < 4 {
            return 0.0;
        }
        self.coefficients[m - m / 4..]
            .iter()
            .fold(0.0f64, |s, a| s.max(a.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().skip(1).all(|&a| a == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WaveError {
    Unsupported(String),
    Resonance { harmonic: usize, denominator: f64 },
    NoConvergence { step: usize, iterations: usize, residual: f64 },
    Invalid(String),
    Model(ModelError),
    Linalg(LinalgError),
}

impl fmt::Display for WaveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WaveError::Unsupported(msg) => write!(f, "unsupported: {msg}"),
            WaveError::Resonance { harmonic, denominator } => write!(
                f,
                "resonance at harmonic {harmonic}: Stokes denominator {denominator:e}"
            ),
            WaveError::NoConvergence {
                step,
                iterations,
                residual,
            } => write!(
                f,
                "Newton iteration did not converge at continuation step {step} after \
                 {iterations} iterations (residual {residual:e})"
            ),
            WaveError::Invalid(msg) => f.write_str(msg),
            WaveError::Model(e) => e.fmt(f),
            WaveError::Linalg(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for WaveError {}

impl From<ModelError> for WaveError {
    fn from(e: ModelError) -> Self {
        WaveError::Model(e)
    }
}

impl From<LinalgError> for WaveError {
    fn from(e: LinalgError) -> Self {
        WaveError::Linalg(e)
    }
}

/// Symbol of the linear operator `K` at integer wavenumbers `0..=M`
/// (`ω(k)/k` for scalar models, `c²(k)` for Boussinesq–Whitham). The symbol is
/// even, so `at(-j) = at(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    values: Vec<f64>,
}

impl Kernel {
    pub fn for_model(model: &ModelSpec, modes: usize) -> Result<Self, WaveError> {
        let values = (0..=modes)
            .map(|j| match model.kind {
                PoissonKind::Scalar => model.phase_speed(j as f64),
                PoissonKind::NoncanonicalBw => model.c_squared(j as f64),
                PoissonKind::Canonical => Err(ModelError::Invalid(
                    "canonical models have no traveling-wave kernel".into(),
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Kernel { values })
    }

    pub fn at(&self, j: i64) -> f64 {
        self.values[j.unsigned_abs() as usize]
    }

    pub fn modes(&self) -> usize {
        self.values.len() - 1
    }
}

/// Cosine coefficients `a_0..a_modes` of an even function sampled at the
/// midpoints `x_i = π(i + 1/2)/P` of `[0, π]`.
pub fn cosine_coefficients(values: &[f64], modes: usize) -> Vec<f64> {
    let p = values.len();
    (0..=modes)
        .map(|j| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(i, v)| v * cos(j as f64 * PI * (i as f64 + 0.5) / p as f64))
                .sum();
            if j == 0 {
                s / p as f64
            } else {
                2.0 * s / p as f64
            }
        })
        .collect()
}

fn nonlinearity(model: &ModelSpec) -> Result<Nonlinearity, WaveError> {
    match (model.kind, model.nonlinearity) {
        (PoissonKind::Canonical, _) => Err(WaveError::Unsupported(alloc::format!(
            "traveling waves of canonical model `{}` are not constructed",
            model.id
        ))),
        (_, Some(n)) => Ok(n),
        (_, None) => Err(WaveError::Unsupported(alloc::format!(
            "model `{}` has no nonlinearity (set `sigma`)",
            model.id
        ))),
    }
}

/// `N(u)`, `N'(u)` and the Taylor coefficients `N^{(r)}(m)/r!`.
impl Nonlinearity {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Nonlinearity::Scalar { sigma, power } => {
                sigma * powi(u, power as i32 + 1) / (power + 1) as f64
            }
            Nonlinearity::Bw { alpha } => alpha * u * u,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Nonlinearity::Scalar { sigma, power } => sigma * powi(u, power as i32),
            Nonlinearity::Bw { alpha } => 2.0 * alpha * u,
        }
    }

    fn taylor(&self, r: u32, m: f64) -> f64 {
        match *self {
            Nonlinearity::Scalar { sigma, power } => {
                if r > power + 1 {
                    return 0.0;
                }
                let mut falling = 1.0;
                for i in 0..r.saturating_sub(1) {
                    falling *= (power - i) as f64;
                }
                let mut fact = 1.0;
                for i in 2..=r {
                    fact *= i as f64;
                }
                sigma * falling * pow(m, (power + 1 - r) as f64) / fact
            }
            Nonlinearity::Bw { alpha } => match r {
                1 => 2.0 * alpha * m,
                2 => alpha,
                _ => 0.0,
            },
        }
    }
}

fn speed_from_variable(model: &ModelSpec, s: f64) -> Result<f64, WaveError> {
    match model.kind {
        PoissonKind::NoncanonicalBw => {
            if s < 0.0 {
                Err(WaveError::Invalid(alloc::format!(
                    "negative squared speed {s} for a Boussinesq-Whitham wave"
                )))
            } else {
                Ok(sqrt(s))
            }
        }
        _ => Ok(s),
    }
}

fn speed_variable(model: &ModelSpec, c: f64) -> f64 {
    match model.kind {
        PoissonKind::NoncanonicalBw => c * c,
        _ => c,
    }
}

/// Stokes wave with zero mean; see [`stokes_wave_with_mean`].
pub fn stokes_wave(model: &ModelSpec, epsilon: f64, order: u32) -> Result<TravelingWave, WaveError> {
    stokes_wave_with_mean(model, epsilon, order, 0.0)
}

/// Stokes expansion `U = m + ε cos x + ε² a₂ cos 2x + ε³ a₃ cos 3x` about the
/// constant state `m`, truncated at `order ∈ {1, 2, 3}` harmonics, with speed
/// corrected at `O(ε²)` for `order ≥ 2`.
pub fn stokes_wave_with_mean(
    model: &ModelSpec,
    epsilon: f64,
    order: u32,
    mean: f64,
) -> Result<TravelingWave, WaveError> {
    if !(1..=3).contains(&order) {
        return Err(WaveError::Invalid(alloc::format!(
            "Stokes order must be 1, 2 or 3, got {order}"
        )));
    }
    let nl = nonlinearity(model)?;
    let kernel = Kernel::for_model(model, 3)?;
    let d = |j: i64| kernel.at(j) + nl.taylor(1, mean);
    let s0 = d(1);
    for j in 2..=order as i64 {
        let den = d(j) - s0;
        if den.abs() < 1e-10 {
            return Err(WaveError::Resonance {
                harmonic: j as usize,
                denominator: den,
            });
        }
    }
    let q2 = nl.taylor(2, mean);
    let q3 = nl.taylor(3, mean);
    let mut coefficients = vec![0.0; order as usize + 1];
    coefficients[0] = mean;
    coefficients[1] = epsilon;
    let mut s = s0;
    if order >= 2 {
        let a2 = -(q2 / 2.0) / (d(2) - s0);
        coefficients[2] = a2 * epsilon * epsilon;
        s += (q2 * a2 + 0.75 * q3) * epsilon * epsilon;
        if order >= 3 {
            let a3 = -(q2 * a2 + q3 / 4.0) / (d(3) - s0);
            coefficients[3] = a3 * epsilon * epsilon * epsilon;
        }
    }
    let speed = speed_from_variable(model, s)?;
    finish(model, speed, coefficients)
}

fn finish(model: &ModelSpec, speed: f64, coefficients: Vec<f64>) -> Result<TravelingWave, WaveError> {
    let mut wave = TravelingWave {
        model: model.id.clone(),
        speed,
        amplitude: coefficients.get(1).copied().unwrap_or(0.0),
        coefficients,
        integration_constant: 0.0,
        residual: 0.0,
    };
    let (constant, residual) = residual_parts(model, &wave)?;
    wave.integration_constant = match model.kind {
        PoissonKind::NoncanonicalBw => -constant,
        _ => constant,
    };
    wave.residual = residual;
    Ok(wave)
}

/// Collocation grid on `[0, π]` with a cosine table for harmonics `0..=modes`.
struct Grid {
    points: usize,
    cos: Vec<f64>,
}

impl Grid {
    fn new(modes: usize, points: usize) -> Self {
        let mut cos_table = vec![0.0; (modes + 1) * points];
        for j in 0..=modes {
            for i in 0..points {
                cos_table[j * points + i] = cos(j as f64 * PI * (i as f64 + 0.5) / points as f64);
            }
        }
        Grid {
            points,
            cos: cos_table,
        }
    }

    fn c(&self, j: usize, i: usize) -> f64 {
        self.cos[j * self.points + i]
    }

    fn synth(&self, a: &[f64], i: usize) -> f64 {
        a.iter().enumerate().map(|(j, v)| v * self.c(j, i)).sum()
    }

    fn project(&self, f: &[f64], j: usize) -> f64 {
        let s: f64 = f.iter().enumerate().map(|(i, v)| v * self.c(j, i)).sum();
        if j == 0 {
            s / self.points as f64
        } else {
            2.0 * s / self.points as f64
        }
    }
}

/// Pointwise left-hand side `−sU + N(U) + KU` at the collocation points and
/// its mean; returns `(mean, max deviation from mean)`.
fn residual_parts(model: &ModelSpec, wave: &TravelingWave) -> Result<(f64, f64), WaveError> {
    let nl = nonlinearity(model)?;
    let m = wave.modes().max(1);
    let kernel = Kernel::for_model(model, m)?;
    let grid = Grid::new(m, 4 * m.max(16));
    let s = speed_variable(model, wave.speed);
    let ka: Vec<f64> = wave
        .coefficients
        .iter()
        .enumerate()
        .map(|(j, a)| kernel.at(j as i64) * a)
        .collect();
    let lhs: Vec<f64> = (0..grid.points)
        .map(|i| {
            let u = grid.synth(&wave.coefficients, i);
            -s * u + nl.value(u) + grid.synth(&ka, i)
        })
        .collect();
    let mean = grid.project(&lhs, 0);
    let dev = lhs.iter().fold(0.0f64, |w, v| w.max((v - mean).abs()));
    Ok((mean, dev))
}

/// Max over `4M` collocation points of the deviation of the integrated
/// traveling-wave equation's left-hand side from its mean.
pub fn wave_residual(model: &ModelSpec, wave: &TravelingWave) -> Result<f64, WaveError> {
    Ok(residual_parts(model, wave)?.1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveOptions {
    pub modes: usize,
    pub steps: usize,
    /// Pinned mean `a_0`.
    pub mean: f64,
    pub max_newton: usize,
    pub tol: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        WaveOptions {
            modes: 64,
            steps: 10,
            mean: 0.0,
            max_newton: 50,
            tol: 1e-10,
        }
    }
}

/// Newton continuation with default options apart from `modes` and `steps`.
pub fn solve_wave_collocation(
    model: &ModelSpec,
    target_amplitude: f64,
    modes: usize,
    steps: usize,
) -> Result<TravelingWave, WaveError> {
    solve_wave(
        model,
        target_amplitude,
        &WaveOptions {
            modes,
            steps,
            ..WaveOptions::default()
        },
    )
}

/// Continues from the Stokes seed in `opts.steps` equal amplitude increments
/// up to `a_1 = target_amplitude`, solving each step by Newton's method.
pub fn solve_wave(
    model: &ModelSpec,
    target_amplitude: f64,
    opts: &WaveOptions,
) -> Result<TravelingWave, WaveError> {
    let nl = nonlinearity(model)?;
    let m = opts.modes;
    if m < 16 {
        return Err(WaveError::Invalid(alloc::format!(
            "at least 16 modes required, got {m}"
        )));
    }
    if opts.steps == 0 {
        return Err(WaveError::Invalid("continuation needs at least one step".into()));
    }
    if !target_amplitude.is_finite() || !opts.mean.is_finite() {
        return Err(WaveError::Invalid("amplitude and mean must be finite".into()));
    }
    let kernel = Kernel::for_model(model, m)?;
    let grid = Grid::new(m, 4 * m);
    let s0 = kernel.at(1) + nl.taylor(1, opts.mean);
    if target_amplitude == 0.0 {
        let mut coefficients = vec![0.0; m + 1];
        coefficients[0] = opts.mean;
        return finish(model, speed_from_variable(model, s0)?, coefficients);
    }

    // State: a[0..=m] and the speed variable s.
    let mut history: Vec<(Vec<f64>, f64)> = Vec::new();
    for step in 1..=opts.steps {
        let amp = target_amplitude * step as f64 / opts.steps as f64;
        let (mut a, mut s) = match history.len() {
            0 => {
                let seed = stokes_wave_with_mean(model, amp, 3, opts.mean)?;
                let mut a = vec![0.0; m + 1];
                a[..seed.coefficients.len()].copy_from_slice(&seed.coefficients);
                (a, speed_variable(model, seed.speed))
            }
            1 => history[0].clone(),
            n => {
                let (a1, s1) = &history[n - 1];
                let (a0, s0) = &history[n - 2];
                let a = a1.iter().zip(a0).map(|(x, y)| 2.0 * x - y).collect();
                (a, 2.0 * s1 - s0)
            }
        };
        a[0] = opts.mean;
        a[1] = amp;
        newton(&kernel, &grid, nl, &mut a, &mut s, opts, step)?;
        history.push((a, s));
    }
    let (a, s) = history.pop().expect("at least one continuation step");
    finish(model, speed_from_variable(model, s)?, a)
}

fn equations(kernel: &Kernel, grid: &Grid, nl: Nonlinearity, a: &[f64], s: f64) -> (Vec<f64>, Vec<f64>) {
    let u: Vec<f64> = (0..grid.points).map(|i| grid.synth(a, i)).collect();
    let nu: Vec<f64> = u.iter().map(|&v| nl.value(v)).collect();
    let m = a.len() - 1;
    let e = (1..=m)
        .map(|j| (kernel.at(j as i64) - s) * a[j] + grid.project(&nu, j))
        .collect();
    (e, u)
}

fn newton(
    kernel: &Kernel,
    grid: &Grid,
    nl: Nonlinearity,
    a: &mut [f64],
    s: &mut f64,
    opts: &WaveOptions,
    step: usize,
) -> Result<(), WaveError> {
    let m = a.len() - 1;
    let mut residual = f64::INFINITY;
    for it in 0..=opts.max_newton {
        let (e, u) = equations(kernel, grid, nl, a, *s);
        residual = e.iter().fold(0.0f64, |w, v| w.max(v.abs()));
        if !residual.is_finite() {
            break;
        }
        if residual <= opts.tol {
            return Ok(());
        }
        if it == opts.max_newton {
            break;
        }
        // Unknowns: a_2..a_m (columns 0..m-2) and s (column m-1).
        let dn: Vec<f64> = u.iter().map(|&v| nl.derivative(v)).collect();
        let mut jac = vec![0.0; m * m];
        let mut weighted = vec![0.0; grid.points];
        for j in 2..=m {
            for (i, w) in weighted.iter_mut().enumerate() {
                *w = dn[i] * grid.c(j, i);
            }
            for row in 1..=m {
                let mut v = grid.project(&weighted, row);
                if row == j {
                    v += kernel.at(j as i64) - *s;
                }
                jac[(row - 1) * m + (j - 2)] = v;
            }
        }
        for row in 1..=m {
            jac[(row - 1) * m + (m - 1)] = -a[row];
        }
        let rhs: Vec<f64> = e.iter().map(|v| -v).collect();
        let delta = linalg::solve_real(&jac, &rhs)?;
        for j in 2..=m {
            a[j] += delta[j - 2];
        }
        *s += delta[m - 1];
    }
    Err(WaveError::NoConvergence {
        step,
        iterations: opts.max_newton,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatState {
    pub wellposed: bool,
    /// Smallest `k > 0` beyond which `ω²(k) < 0`; `None` when well-posed.
    pub cutoff_k: Option<f64>,
}

/// Linearization of Boussinesq–Whitham about the constant state `q = a`:
/// `ω² = k²(2αa + c²(k))`. With `c²` decreasing to zero, a negative background
/// makes `ω` imaginary above a cutoff wavenumber, with unbounded growth rates.
pub fn bw_flat_state_analysis(model: &ModelSpec, a: f64) -> Result<FlatState, WaveError> {
    let alpha = match model.nonlinearity {
        Some(Nonlinearity::Bw { alpha }) if model.kind == PoissonKind::NoncanonicalBw => alpha,
        _ => {
            return Err(WaveError::Unsupported(alloc::format!(
                "flat-state analysis needs a Boussinesq-Whitham model, got `{}`",
                model.id
            )))
        }
    };
    let f = |k: f64| -> Result<f64, WaveError> { Ok(2.0 * alpha * a + model.c_squared(k)?) };
    if alpha * a >= 0.0 {
        return Ok(FlatState {
            wellposed: true,
            cutoff_k: None,
        });
    }
    if f(0.0)? < 0.0 {
        return Ok(FlatState {
            wellposed: false,
            cutoff_k: Some(0.0),
        });
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while f(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Ok(FlatState {
                wellposed: true,
                cutoff_k: None,
            });
        }
    }
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(FlatState {
        wellposed: false,
        cutoff_k: Some(hi),
    })
}
