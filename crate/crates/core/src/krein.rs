//! Krein signatures of colliding zero-amplitude eigenvalues and the full
//! necessary-condition pipeline.
//!
//! Two colliding eigenvalues can leave the imaginary axis only if their Krein
//! signatures differ. Signatures are computed from closed-form eigenvectors of
//! the 2×2 symbols, never from a numerical eigensolver.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::collision::{
    CollisionError, CollisionEvent, CollisionOptions, CollisionSearch, Verdict,
};
use crate::dispersion::{symmetric_grid, ModeIndex, ModelError, ModelSpec, PoissonKind};
use crate::math::{sign, sqrt};

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub enum KreinError {
    /// The scalar signature divides by `n + μ`.
    ZeroWavenumber,
    WrongKind { expected: &'static str, got: PoissonKind },
    EigenvectorNotFound { residual: f64 },
    NotEvenSystem,
    Model(ModelError),
    Collision(CollisionError),
}

impl fmt::Display for KreinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KreinError::ZeroWavenumber => f.write_str("signature undefined at n + mu = 0"),
            KreinError::WrongKind { expected, got } => {
                write!(f, "expected a {expected} model, got {}", got.name())
            }
            KreinError::EigenvectorNotFound { residual } => write!(
                f,
                "no eigenvector of J*S for the requested eigenvalue (residual {residual:e})"
            ),
            KreinError::NotEvenSystem => {
                f.write_str("the even-system formulas need omega_2 = -omega_1")
            }
            KreinError::Model(e) => e.fmt(f),
            KreinError::Collision(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for KreinError {}

impl From<ModelError> for KreinError {
    fn from(e: ModelError) -> Self {
        KreinError::Model(e)
    }
}

impl From<CollisionError> for KreinError {
    fn from(e: CollisionError) -> Self {
        KreinError::Collision(e)
    }
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Sign of `−Ω(n+μ)/(n+μ)`; `0` exactly when `Ω(n+μ) = 0`.
pub fn scalar_signature(model: &ModelSpec, idx: ModeIndex, c: f64) -> Result<i8, KreinError> {
    Ok(sign(scalar_signature_value(model, idx, c)?) as i8)
}

fn scalar_signature_value(model: &ModelSpec, idx: ModeIndex, c: f64) -> Result<f64, KreinError> {
    if model.kind != PoissonKind::Scalar {
        return Err(KreinError::WrongKind {
            expected: "scalar",
            got: model.kind,
        });
    }
    let k = idx.k();
    if k == 0.0 {
        return Err(KreinError::ZeroWavenumber);
    }
    Ok(-model.frame_omega(idx.l, k, c)? / k)
}

/// Opposite scalar signatures: `(n₁+μ)(n₂+μ) < 0`.
pub fn scalar_opposite(event: &CollisionEvent) -> bool {
    event.idx1.k() * event.idx2.k() < 0.0
}

/// Hessian symbol at wavenumber `k` in the frame moving with speed `c`:
/// `[[C, −ick + A(−k)], [ick + A(k), B]]` for canonical models and
/// `[[c²(k), c], [c, 1]]` for Boussinesq–Whitham.
pub fn hessian_symbol(model: &ModelSpec, k: f64, c: f64) -> Result<Matrix2, KreinError> {
    match model.kind {
        PoissonKind::Canonical => {
            let [ae, ao, b, cc] = model.canonical_symbols(k)?;
            Ok([
                [cx(cc, 0.0), cx(ae, -c * k - ao)],
                [cx(ae, c * k + ao), cx(b, 0.0)],
            ])
        }
        PoissonKind::NoncanonicalBw => {
            let c2 = model.c_squared(k)?;
            Ok([[cx(c2, 0.0), cx(c, 0.0)], [cx(c, 0.0), cx(1.0, 0.0)]])
        }
        PoissonKind::Scalar => Err(KreinError::WrongKind {
            expected: "two-component",
            got: model.kind,
        }),
    }
}

/// `J Ŝ(k)` with `J = [[0, 1], [−1, 0]]` (canonical) or the symbol
/// `[[0, ik], [ik, 0]]` of the Boussinesq–Whitham operator.
pub fn j_hessian(model: &ModelSpec, k: f64, c: f64) -> Result<Matrix2, KreinError> {
    let s = hessian_symbol(model, k, c)?;
    Ok(match model.kind {
        PoissonKind::Canonical => [[s[1][0], s[1][1]], [-s[0][0], -s[0][1]]],
        _ => {
            let ik = cx(0.0, k);
            [[ik * s[1][0], ik * s[1][1]], [ik * s[0][0], ik * s[0][1]]]
        }
    })
}

fn quad_form(s: &Matrix2, v: &[Complex64; 2]) -> Complex64 {
    let sv = [
        s[0][0] * v[0] + s[0][1] * v[1],
        s[1][0] * v[0] + s[1][1] * v[1],
    ];
    v[0].conj() * sv[0] + v[1].conj() * sv[1]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenMode {
    pub mode: ModeIndex,
    pub lambda: Complex64,
    /// `(Q, P)`, absent for scalar models.
    pub components: Option<[Complex64; 2]>,
}

/// Zero-amplitude eigenmode `(n, μ, l)`. Two-component eigenvectors come from
/// the null space of `J Ŝ − λ`: canonical models use whichever row of the
/// symbol gives the larger vector; Boussinesq–Whitham uses `(ik, λ − ikc)`.
pub fn eigen_mode(model: &ModelSpec, idx: ModeIndex, c: f64) -> Result<EigenMode, KreinError> {
    let lambda = model.zero_amp_eigenvalue(idx, c)?;
    let k = idx.k();
    let components = match model.kind {
        PoissonKind::Scalar => None,
        PoissonKind::Canonical => {
            let [ae, ao, b, cc] = model.canonical_symbols(k)?;
            let w = model.omega(idx.l, k)? + ao;
            let row1 = [cx(b, 0.0), cx(-ae, -w)];
            let row2 = [cx(-ae, w), cx(cc, 0.0)];
            let n1 = row1[0].norm_sqr() + row1[1].norm_sqr();
            let n2 = row2[0].norm_sqr() + row2[1].norm_sqr();
            let (v, n) = if n1 >= n2 { (row1, n1) } else { (row2, n2) };
            if n == 0.0 {
                return Err(KreinError::EigenvectorNotFound { residual: f64::NAN });
            }
            let s = sqrt(n);
            Some([v[0] / s, v[1] / s])
        }
        PoissonKind::NoncanonicalBw => {
            let v = [cx(0.0, k), lambda - cx(0.0, k * c)];
            let s = sqrt(v[0].norm_sqr() + v[1].norm_sqr());
            if s == 0.0 {
                return Err(KreinError::EigenvectorNotFound { residual: f64::NAN });
            }
            Some([v[0] / s, v[1] / s])
        }
    };
    if let Some(v) = components {
        let m = j_hessian(model, k, c)?;
        let scale = m.iter().flatten().fold(1.0f64, |s, z| s.max(z.norm()));
        let r0 = m[0][0] * v[0] + m[0][1] * v[1] - lambda * v[0];
        let r1 = m[1][0] * v[0] + m[1][1] * v[1] - lambda * v[1];
        let residual = sqrt(r0.norm_sqr() + r1.norm_sqr());
        if residual > 1e-10 * scale {
            return Err(KreinError::EigenvectorNotFound { residual });
        }
    }
    Ok(EigenMode {
        mode: idx,
        lambda,
        components,
    })
}

/// `v†Ŝv` for the eigenvector of `em`; its sign is the Krein signature.
pub fn canonical_signature(model: &ModelSpec, em: &EigenMode, c: f64) -> Result<f64, KreinError> {
    if model.kind == PoissonKind::Scalar {
        return Err(KreinError::WrongKind {
            expected: "two-component",
            got: model.kind,
        });
    }
    let v = em
        .components
        .ok_or(KreinError::EigenvectorNotFound { residual: f64::NAN })?;
    let s = hessian_symbol(model, em.mode.k(), c)?;
    Ok(quad_form(&s, &v).re)
}

/// Which expression to use for a two-component signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KreinFormula {
    /// `v†Ŝv` with the computed eigenvector.
    #[default]
    Direct,
    /// `C(k)·(ω + a_odd(k))`, from the first row of the symbol.
    FirstRow,
    /// `B(k)·(ω + a_odd(k))`, from the second row.
    SecondRow,
    /// Even systems: `ω(k)·C(k)`.
    EvenFirstRow,
    /// Even systems: `ω(k)·B(k)`.
    EvenSecondRow,
}

impl KreinFormula {
    pub const ALL: [KreinFormula; 5] = [
        KreinFormula::Direct,
        KreinFormula::FirstRow,
        KreinFormula::SecondRow,
        KreinFormula::EvenFirstRow,
        KreinFormula::EvenSecondRow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KreinFormula::Direct => "direct",
            KreinFormula::FirstRow => "first-row",
            KreinFormula::SecondRow => "second-row",
            KreinFormula::EvenFirstRow => "even-first-row",
            KreinFormula::EvenSecondRow => "even-second-row",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Per-mode factor of a canonical signature product under `formula`.
pub fn canonical_factor(
    model: &ModelSpec,
    idx: ModeIndex,
    c: f64,
    formula: KreinFormula,
) -> Result<f64, KreinError> {
    if model.kind != PoissonKind::Canonical {
        return Err(KreinError::WrongKind {
            expected: "canonical",
            got: model.kind,
        });
    }
    let k = idx.k();
    let [_, ao, b, cc] = model.canonical_symbols(k)?;
    let w = model.omega(idx.l, k)?;
    match formula {
        KreinFormula::Direct => canonical_signature(model, &eigen_mode(model, idx, c)?, c),
        KreinFormula::FirstRow => Ok(cc * (w + ao)),
        KreinFormula::SecondRow => Ok(b * (w + ao)),
        KreinFormula::EvenFirstRow | KreinFormula::EvenSecondRow => {
            if !model.even_system {
                return Err(KreinError::NotEvenSystem);
            }
            Ok(w * if formula == KreinFormula::EvenFirstRow { cc } else { b })
        }
    }
}

/// Opposite signatures at a canonical collision under `formula`.
pub fn canonical_opposite(
    model: &ModelSpec,
    event: &CollisionEvent,
    c: f64,
    formula: KreinFormula,
) -> Result<bool, KreinError> {
    Ok(canonical_product(model, event, c, formula)? < 0.0)
}

fn canonical_product(
    model: &ModelSpec,
    event: &CollisionEvent,
    c: f64,
    formula: KreinFormula,
) -> Result<f64, KreinError> {
    Ok(canonical_factor(model, event.idx1, c, formula)?
        * canonical_factor(model, event.idx2, c, formula)?)
}

/// `2ω(ω − kV)` at `k = n + μ` for the Boussinesq–Whitham model.
pub fn bw_signature(model: &ModelSpec, mode: ModeIndex, v: f64) -> Result<f64, KreinError> {
    if model.kind != PoissonKind::NoncanonicalBw {
        return Err(KreinError::WrongKind {
            expected: "noncanonical-bw",
            got: model.kind,
        });
    }
    let k = mode.k();
    let w = model.omega(mode.l, k)?;
    Ok(2.0 * w * (w - k * v))
}

/// Product of the two signature values of a non-origin event.
pub fn signature_product(
    model: &ModelSpec,
    event: &CollisionEvent,
    c: f64,
    formula: KreinFormula,
) -> Result<f64, KreinError> {
    match model.kind {
        PoissonKind::Scalar => Ok(scalar_signature_value(model, event.idx1, c)?
            * scalar_signature_value(model, event.idx2, c)?),
        PoissonKind::Canonical => canonical_product(model, event, c, formula),
        PoissonKind::NoncanonicalBw => {
            Ok(bw_signature(model, event.idx1, c)? * bw_signature(model, event.idx2, c)?)
        }
    }
}

/// Products below this magnitude count as zero signature.
pub const SIGNATURE_ZERO: f64 = 1e-12;

pub fn verdict_for(event: &CollisionEvent, product: Option<f64>) -> Verdict {
    match product {
        _ if event.at_origin => Verdict::IndeterminateOrigin,
        Some(p) if p.abs() < SIGNATURE_ZERO => Verdict::IndeterminateOrigin,
        Some(p) if p < 0.0 => Verdict::PotentialInstability,
        Some(_) => Verdict::NoInstabilityPossible,
        None => Verdict::IndeterminateOrigin,
    }
}

/// Fills `signature_product` and `verdict` of each event.
pub fn classify(
    model: &ModelSpec,
    events: &mut [CollisionEvent],
    c: f64,
    formula: KreinFormula,
) -> Result<(), KreinError> {
    for e in events.iter_mut() {
        let product = if e.at_origin || e.idx1.k() == 0.0 || e.idx2.k() == 0.0 {
            None
        } else {
            Some(signature_product(model, e, c, formula)?)
        };
        e.signature_product = product;
        e.verdict = Some(verdict_for(e, product));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverallVerdict {
    HfInstabilityPossible,
    HfInstabilityExcluded,
}

impl OverallVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            OverallVerdict::HfInstabilityPossible => "HF-instability-possible",
            OverallVerdict::HfInstabilityExcluded => "HF-instability-excluded",
        }
    }
}

impl fmt::Display for OverallVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Branch whose bifurcation speed sets the frame.
    pub branch: u8,
    pub collision: CollisionOptions,
    pub formula: KreinFormula,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            branch: 1,
            collision: CollisionOptions::default(),
            formula: KreinFormula::Direct,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub events: usize,
    pub origin: usize,
    pub potential_instability: usize,
    pub no_instability: usize,
    pub indeterminate: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// Largest `|ω_l(k) + ω_l'(-k)|` on the validation grid.
    pub pairing_violation: f64,
    /// Largest `|Re λ|` in the zero-amplitude slice at `μ = 0`.
    pub slice_max_re: f64,
    /// Number of eigenvalues in that slice.
    pub slice_len: usize,
    pub n_max: u32,
    pub grid_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisReport {
    pub model: String,
    pub n: u32,
    pub branch: u8,
    pub speed: f64,
    pub events: Vec<CollisionEvent>,
    pub overall: OverallVerdict,
    pub counts: Counts,
    pub diagnostics: Diagnostics,
}

/// Runs the six steps with a sequential collision search.
pub fn run_pipeline(
    model: &ModelSpec,
    n: u32,
    n_max: u32,
    opts: &PipelineOptions,
) -> Result<AnalysisReport, KreinError> {
    run_pipeline_using(model, n, n_max, opts, |search| {
        let mut events = Vec::new();
        for p in search.pairs() {
            events.extend(search.search_pair(p)?);
        }
        Ok(search.finalize(events))
    })
}

/// Runs the six steps, delegating the collision search over all mode pairs
/// to `search_all` (which must return finalized events).
pub fn run_pipeline_using<F>(
    model: &ModelSpec,
    n: u32,
    n_max: u32,
    opts: &PipelineOptions,
    search_all: F,
) -> Result<AnalysisReport, KreinError>
where
    F: FnOnce(&CollisionSearch<'_>) -> Result<Vec<CollisionEvent>, CollisionError>,
{
    // Steps 1-2: the model must be dispersive, with its k -> -k pairing.
    let reach = (n_max as f64 + 1.0).max(n as f64 + 1.0);
    let pairing_violation = model.validate_dispersive(&symmetric_grid(reach, 400))?;
    // Step 3: bifurcation speed.
    let speed = model.bifurcation_speed(opts.branch, n)?;
    // Step 4: zero-amplitude spectrum.
    let slice = model.spectrum_slice(speed, 0.5, -(n_max as i64)..=n_max as i64)?;
    let slice_max_re = slice.iter().fold(0.0f64, |m, (_, l)| m.max(l.re.abs()));
    // Step 5: collisions.
    let search = CollisionSearch::new(model, speed, n_max, opts.collision)?;
    let mut events = search_all(&search)?;
    // Step 6: signatures.
    classify(model, &mut events, speed, opts.formula)?;

    let mut counts = Counts {
        events: events.len(),
        ..Counts::default()
    };
    for e in &events {
        if e.at_origin {
            counts.origin += 1;
        }
        match e.verdict {
            Some(Verdict::PotentialInstability) => counts.potential_instability += 1,
            Some(Verdict::NoInstabilityPossible) => counts.no_instability += 1,
            _ => counts.indeterminate += 1,
        }
    }
    let overall = if counts.potential_instability > 0 {
        OverallVerdict::HfInstabilityPossible
    } else {
        OverallVerdict::HfInstabilityExcluded
    };
    Ok(AnalysisReport {
        model: model.id.clone(),
        n,
        branch: opts.branch,
        speed,
        events,
        overall,
        counts,
        diagnostics: Diagnostics {
            pairing_violation,
            slice_max_re,
            slice_len: slice.len(),
            n_max,
            grid_points: opts.collision.grid_points,
        },
    })
}
