//! Fourier–Floquet–Hill spectra of the linearization about a traveling wave.
//!
//! Perturbations `e^{λt} Σ_n v_n e^{i(n+μ)x}` truncated to `|n| ≤ M` turn the
//! linearized operator into a dense matrix per Floquet exponent `μ`. Scalar
//! models give `A_nm = −iΩ(n+μ)δ_nm − i(n+μ)·(N'(U))^_{n−m}`; two-component
//! models interleave `(q_n, p_n)` in 2×2 blocks.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::collision::CollisionEvent;
use crate::dispersion::{ModelError, ModelSpec, PoissonKind};
use crate::krein::{j_hessian, KreinError};
use crate::linalg::{self, CMatrix, LinalgError};
use crate::math::PI;
use crate::waves::{cosine_coefficients, TravelingWave};

/// Golden-ratio offset keeping the default μ grid off rational points.
const GRID_OFFSET: f64 = 0.618_033_988_749_894_8;

/// Tail size above which a wave is considered under-resolved.
pub const TRUNCATION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum HillError {
    Unsupported(String),
    Model(ModelError),
    Eigen { mu: f64, error: LinalgError },
}

impl fmt::Display for HillError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HillError::Unsupported(s) => f.write_str(s),
            HillError::Model(e) => e.fmt(f),
            HillError::Eigen { mu, error } => write!(f, "eigensolver failed at mu = {mu}: {error}"),
        }
    }
}

impl core::error::Error for HillError {}

impl From<ModelError> for HillError {
    fn from(e: ModelError) -> Self {
        HillError::Model(e)
    }
}

impl From<KreinError> for HillError {
    fn from(e: KreinError) -> Self {
        match e {
            KreinError::Model(m) => HillError::Model(m),
            other => HillError::Unsupported(alloc::format!("{other}")),
        }
    }
}

/// Full Fourier coefficients `ĉ_d`, `|d| ≤ 2M`, of the linearized
/// coefficient `N'(U(x))`; `None` when it vanishes identically.
fn coefficient_series(
    model: &ModelSpec,
    wave: &TravelingWave,
    m: usize,
) -> Result<Option<Vec<f64>>, HillError> {
    if wave.coefficients.iter().all(|&a| a == 0.0) {
        return Ok(None);
    }
    let nl = model.nonlinearity.ok_or_else(|| {
        HillError::Unsupported(alloc::format!(
            "model `{}` has no nonlinearity to linearize about a nonzero wave",
            model.id
        ))
    })?;
    let power = match nl {
        crate::dispersion::Nonlinearity::Scalar { power, .. } => power as usize,
        crate::dispersion::Nonlinearity::Bw { .. } => 1,
    };
    let degree = power * wave.modes() + 2 * m;
    let points = degree + 16;
    let samples: Vec<f64> = (0..points)
        .map(|i| nl.derivative(wave.profile(PI * (i as f64 + 0.5) / points as f64)))
        .collect();
    let mut c = cosine_coefficients(&samples, 2 * m);
    for v in c.iter_mut().skip(1) {
        *v *= 0.5;
    }
    Ok(Some(c))
}

fn check_wave(model: &ModelSpec, wave: &TravelingWave) -> Result<(), HillError> {
    if wave.model != model.id {
        return Err(HillError::Unsupported(alloc::format!(
            "wave belongs to `{}`, not `{}`",
            wave.model,
            model.id
        )));
    }
    Ok(())
}

/// `Some(tail)` when the wave's last quarter of coefficients exceeds
/// [`TRUNCATION_TOL`].
pub fn truncation_warning(wave: &TravelingWave) -> Option<f64> {
    let t = wave.tail_magnitude();
    (t > TRUNCATION_TOL).then_some(t)
}

/// Hill matrix for Floquet exponent `mu` and truncation `|n| ≤ m`.
pub fn assemble(
    model: &ModelSpec,
    wave: &TravelingWave,
    mu: f64,
    m: usize,
) -> Result<CMatrix, HillError> {
    assemble_shifted(model, wave, mu, m, 0.0)
}

/// [`assemble`] with `shift` added to every diagonal entry; used to check
/// that the zero-amplitude comparison detects a corrupted symbol.
pub fn assemble_shifted(
    model: &ModelSpec,
    wave: &TravelingWave,
    mu: f64,
    m: usize,
    shift: f64,
) -> Result<CMatrix, HillError> {
    check_wave(model, wave)?;
    let c = wave.speed;
    let size = 2 * m + 1;
    let kappa = |i: usize| i as f64 - m as f64 + mu;
    let conv = coefficient_series(model, wave, m)?;
    let coef = |d: i64| -> f64 {
        conv.as_ref()
            .map_or(0.0, |c| c[d.unsigned_abs() as usize])
    };
    match model.kind {
        PoissonKind::Scalar => {
            let mut a = CMatrix::zeros(size);
            for i in 0..size {
                let k = kappa(i);
                a[(i, i)] = Complex64::new(shift, -model.frame_omega(1, k, c)?);
                if conv.is_some() {
                    for j in 0..size {
                        let w = coef(i as i64 - j as i64);
                        a[(i, j)] += Complex64::new(0.0, -k * w);
                    }
                }
            }
            Ok(a)
        }
        PoissonKind::Canonical => {
            if conv.is_some() {
                return Err(HillError::Unsupported(alloc::format!(
                    "finite-amplitude waves of canonical model `{}` are not supported",
                    model.id
                )));
            }
            let mut a = CMatrix::zeros(2 * size);
            for i in 0..size {
                let b = j_hessian(model, kappa(i), c)?;
                for r in 0..2 {
                    for s in 0..2 {
                        a[(2 * i + r, 2 * i + s)] = b[r][s];
                    }
                }
                a[(2 * i, 2 * i)] += shift;
                a[(2 * i + 1, 2 * i + 1)] += shift;
            }
            Ok(a)
        }
        PoissonKind::NoncanonicalBw => {
            let mut a = CMatrix::zeros(2 * size);
            for i in 0..size {
                let k = kappa(i);
                let ik = Complex64::new(0.0, k);
                let c2 = model.c_squared(k)?;
                a[(2 * i, 2 * i)] = ik * c + shift;
                a[(2 * i, 2 * i + 1)] = ik;
                a[(2 * i + 1, 2 * i)] = ik * c2;
                a[(2 * i + 1, 2 * i + 1)] = ik * c + shift;
                if conv.is_some() {
                    for j in 0..size {
                        let w = coef(i as i64 - j as i64);
                        a[(2 * i + 1, 2 * j)] += ik * w;
                    }
                }
            }
            Ok(a)
        }
    }
}

/// Eigenvalues of the Hill matrix, sorted by `(Im, Re)`.
pub fn spectrum_at(
    model: &ModelSpec,
    wave: &TravelingWave,
    mu: f64,
    m: usize,
) -> Result<Vec<Complex64>, HillError> {
    let a = assemble(model, wave, mu, m)?;
    linalg::eigenvalues(&a).map_err(|error| HillError::Eigen { mu, error })
}

/// Floquet exponents: `count` offset uniform points in `(−1/2, 1/2]` plus
/// `density`-times-finer windows of half-width `half_width` around `windows`.
#[derive(Clone, Debug, PartialEq)]
pub struct MuGrid {
    pub count: usize,
    pub windows: Vec<f64>,
    pub half_width: f64,
    pub density: usize,
}

impl MuGrid {
    pub fn uniform(count: usize) -> Self {
        MuGrid {
            count,
            windows: Vec::new(),
            half_width: 5e-3,
            density: 10,
        }
    }

    /// Refinement windows around `±μ` of every non-origin prediction; the
    /// conjugate Floquet class carries the mirrored bubble.
    pub fn refined(count: usize, predictions: &[CollisionEvent]) -> Self {
        let mut g = Self::uniform(count);
        g.windows = predictions
            .iter()
            .filter(|e| !e.at_origin)
            .flat_map(|e| [e.mu, -e.mu])
            .collect();
        g
    }

    pub fn values(&self) -> Vec<f64> {
        let wrap = |x: f64| {
            let mut y = x;
            while y <= -0.5 {
                y += 1.0;
            }
            while y > 0.5 {
                y -= 1.0;
            }
            y
        };
        let mut out: Vec<f64> = (0..self.count)
            .map(|i| wrap(-0.5 + (i as f64 + GRID_OFFSET) / self.count as f64))
            .collect();
        if self.count > 0 && self.density > 0 {
            let step = 1.0 / (self.count * self.density) as f64;
            let per = libm::ceil(2.0 * self.half_width / step) as usize;
            for &center in &self.windows {
                let start = center - self.half_width;
                out.extend((0..per).map(|i| wrap(start + (i as f64 + GRID_OFFSET) * step)));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSet {
    pub model: String,
    pub modes: usize,
    /// `(μ, eigenvalues sorted by (Im, Re))`, sorted by `μ`.
    pub entries: Vec<(f64, Vec<Complex64>)>,
}

impl SpectrumSet {
    pub fn from_entries(model: &str, modes: usize, mut entries: Vec<(f64, Vec<Complex64>)>) -> Self {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        SpectrumSet {
            model: model.into(),
            modes,
            entries,
        }
    }

    pub fn max_real(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|(_, l)| l.iter())
            .fold(f64::NEG_INFINITY, |m, z| m.max(z.re))
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, l)| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Hill spectra over every `μ` of `grid`.
pub fn full_spectrum(
    model: &ModelSpec,
    wave: &TravelingWave,
    grid: &MuGrid,
    m: usize,
) -> Result<SpectrumSet, HillError> {
    let entries = grid
        .values()
        .into_iter()
        .map(|mu| spectrum_at(model, wave, mu, m).map(|s| (mu, s)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpectrumSet::from_entries(&model.id, m, entries))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bubble {
    /// On the imaginary axis, at the middle of the cluster's `Im λ` range.
    pub center: Complex64,
    pub max_growth: f64,
    pub mu_support: (f64, f64),
    /// Index into the predictions passed to [`detect_bubbles`].
    pub nearest_collision: Option<usize>,
    pub points: usize,
}

pub const DEFAULT_BUBBLE_THRESHOLD: f64 = 1e-7;
/// Single-linkage gap in `Im λ`.
pub const BUBBLE_GAP: f64 = 1e-2;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Clusters eigenvalues with `Re λ > threshold`: two points link when their
/// `μ` entries are equal or adjacent and their `Im λ` differ by at most
/// [`BUBBLE_GAP`]. Bubbles come back sorted by center.
pub fn detect_bubbles(
    spec: &SpectrumSet,
    threshold: f64,
    predictions: &[CollisionEvent],
) -> Vec<Bubble> {
    // (entry index, mu, lambda)
    let pts: Vec<(usize, f64, Complex64)> = spec
        .entries
        .iter()
        .enumerate()
        .flat_map(|(i, (mu, l))| {
            l.iter()
                .filter(|z| z.re > threshold)
                .map(move |&z| (i, *mu, z))
        })
        .collect();
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if pts[b].0 > pts[a].0 + 1 {
                break;
            }
            if (pts[a].2.im - pts[b].2.im).abs() <= BUBBLE_GAP {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..pts.len() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(i),
            None => groups.push((r, alloc::vec![i])),
        }
    }
    let mut out: Vec<Bubble> = groups
        .into_iter()
        .map(|(_, members)| {
            let mut im = (f64::INFINITY, f64::NEG_INFINITY);
            let mut mu = (f64::INFINITY, f64::NEG_INFINITY);
            let mut growth = f64::NEG_INFINITY;
            for &i in &members {
                let (_, m, z) = pts[i];
                im = (im.0.min(z.im), im.1.max(z.im));
                mu = (mu.0.min(m), mu.1.max(m));
                growth = growth.max(z.re);
            }
            let center = Complex64::new(0.0, 0.5 * (im.0 + im.1));
            let nearest_collision = predictions
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    let d = (center.im - e.lambda.im)
                        .abs()
                        .min((center.im + e.lambda.im).abs());
                    (j, d)
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(j, _)| j);
            Bubble {
                center,
                max_growth: growth,
                mu_support: mu,
                nearest_collision,
                points: members.len(),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.center
            .im
            .total_cmp(&b.center.im)
            .then(a.mu_support.0.total_cmp(&b.mu_support.0))
    });
    out
}

/// Distance from a bubble center to the ordinate of its linked prediction.
pub fn bubble_offset(b: &Bubble, predictions: &[CollisionEvent]) -> Option<f64> {
    let e = predictions.get(b.nearest_collision?)?;
    Some(
        (b.center.im - e.lambda.im)
            .abs()
            .min((b.center.im + e.lambda.im).abs()),
    )
}

/// Closed-form zero-amplitude eigenvalues `−iΩ_l(n+μ)`, `|n| ≤ m`.
pub fn closed_form_spectrum(
    model: &ModelSpec,
    c: f64,
    mu: f64,
    m: usize,
) -> Result<Vec<Complex64>, HillError> {
    let mut v: Vec<Complex64> = model
        .spectrum_slice(c, mu, -(m as i64)..=m as i64)?
        .into_iter()
        .map(|(_, l)| l)
        .collect();
    linalg::sort_spectrum(&mut v);
    Ok(v)
}

/// Largest Hausdorff distance, over `mu_count` grid points, between the Hill
/// spectrum of the zero wave and the closed-form eigenvalues.
pub fn zero_amplitude_check(
    model: &ModelSpec,
    c: f64,
    mu_count: usize,
    m: usize,
) -> Result<f64, HillError> {
    zero_amplitude_check_shifted(model, c, mu_count, m, 0.0)
}

/// [`zero_amplitude_check`] against a Hill matrix whose diagonal is shifted
/// by `shift`.
pub fn zero_amplitude_check_shifted(
    model: &ModelSpec,
    c: f64,
    mu_count: usize,
    m: usize,
    shift: f64,
) -> Result<f64, HillError> {
    let wave = TravelingWave::zero(&model.id, c, 0);
    let mut worst = 0.0f64;
    for mu in MuGrid::uniform(mu_count).values() {
        let a = assemble_shifted(model, &wave, mu, m, shift)?;
        let hill = linalg::eigenvalues(&a).map_err(|error| HillError::Eigen { mu, error })?;
        let exact = closed_form_spectrum(model, c, mu, m)?;
        if hill.len() != exact.len() {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(linalg::hausdorff(&hill, &exact));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;
    use crate::params::ModelParams;

    fn model(id: &str) -> ModelSpec {
        builtin(id, &ModelParams::new()).unwrap()
    }

    #[test]
    fn zero_wave_scalar_matrix_is_the_symbol() {
        let m = model("kdv");
        let wave = TravelingWave::zero("kdv", -1.0, 8);
        let a = assemble(&m, &wave, 0.3, 6).unwrap();
        assert!(a.is_diagonal());
        for i in 0..13 {
            let k = i as f64 - 6.0 + 0.3;
            let want = m.zero_amp_eigenvalue(crate::ModeIndex::new(i - 6, 0.3, 1).unwrap(), -1.0);
            assert_eq!(a[(i as usize, i as usize)], want.unwrap(), "k={k}");
        }
    }

    #[test]
    fn grid_is_sorted_inside_the_floquet_interval() {
        let mut g = MuGrid::uniform(50);
        g.windows = alloc::vec![0.499, -0.2];
        let v = g.values();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v.iter().all(|&m| m > -0.5 && m <= 0.5));
        assert_eq!(v.len(), 50 + 2 * 5);
    }

    #[test]
    fn shifted_symbol_is_detected() {
        let m = model("whitham");
        let c = m.bifurcation_speed(1, 1).unwrap();
        assert!(zero_amplitude_check(&m, c, 4, 16).unwrap() < 1e-10);
        let d = zero_amplitude_check_shifted(&m, c, 4, 16, 1e-3).unwrap();
        assert!(d >= 0.5e-3, "{d}");
    }
}
