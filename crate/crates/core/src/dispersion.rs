//! Models, dispersion branches and the closed-form zero-amplitude spectrum.
//!
//! All waves are `2π`-periodic. A model in a frame moving with speed `c` has
//! the frame dispersion relation `Ω_l(k) = ω_l(k) - c k`; the zero-amplitude
//! stability eigenvalue of Floquet mode `(n, μ, l)` is `λ = -i Ω_l(n + μ)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::dsl::{EvalError, Expr, ParseError};
use crate::params::{ModelParams, ParamError};

pub type NativeFn = fn(f64, &ModelParams) -> f64;

/// A real function of the wavenumber: a dispersion branch, a phase-speed
/// symbol or one entry of a Hessian symbol.
#[derive(Clone, Debug)]
pub enum Symbol {
    Zero,
    Native(NativeFn),
    /// Parameter-bound expression in `k`. `at_zero` overrides the value at `k = 0`.
    Expr { expr: Expr, at_zero: Option<f64> },
}

impl Symbol {
    pub fn eval(&self, k: f64, params: &ModelParams) -> Result<f64, EvalError> {
        match self {
            Symbol::Zero => Ok(0.0),
            Symbol::Native(f) => {
                let v = f(k, params);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::NonFinite)
                }
            }
            Symbol::Expr { expr, at_zero } => match at_zero {
                Some(v) if k == 0.0 => Ok(*v),
                _ => expr.eval_k(k),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoissonKind {
    /// `J = ∂ₓ`, one branch.
    Scalar,
    /// `J = [[0, 1], [-1, 0]]`, two branches.
    Canonical,
    /// Boussinesq–Whitham `J = [[0, ∂ₓ], [∂ₓ, 0]]`, two branches.
    NoncanonicalBw,
}

impl PoissonKind {
    pub fn name(self) -> &'static str {
        match self {
            PoissonKind::Scalar => "scalar",
            PoissonKind::Canonical => "canonical",
            PoissonKind::NoncanonicalBw => "noncanonical-bw",
        }
    }

    pub fn components(self) -> usize {
        match self {
            PoissonKind::Scalar => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    General,
}

/// How branches pair up under `k -> -k`: `ω_l(-k) = -ω_{l'}(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchMirror {
    /// `l' = l`: every branch is odd.
    Same,
    /// `l' = 3 - l`: the branches swap (e.g. Sine-Gordon).
    Swap,
}

impl BranchMirror {
    pub fn partner(self, l: u8) -> u8 {
        match self {
            BranchMirror::Same => l,
            BranchMirror::Swap => 3 - l,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DispersionBranch {
    pub index: u8,
    pub parity: Parity,
    pub omega: Symbol,
}

/// Coefficient data of the quadratic Hamiltonian, stored as symbols of `k`.
#[derive(Clone, Debug)]
pub enum HamiltonianData {
    /// Scalar model; `phase_speed` is `ω(k)/k`, the symbol of the nonlocal
    /// operator `K` in the integrated traveling-wave equation.
    Scalar { phase_speed: Symbol },
    /// Canonical two-component model with `A(k) = a_even(k) + i a_odd(k)`,
    /// `B(k) = Σ bₙ k²ⁿ`, `C(k) = Σ cₙ k²ⁿ`.
    Canonical {
        a_even: Symbol,
        a_odd: Symbol,
        b: Symbol,
        c: Symbol,
    },
    /// Boussinesq–Whitham: `c²(k)`.
    Bw { c_squared: Symbol },
}

/// Nonlinear term used when constructing waves and linearizing about them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Nonlinearity {
    /// `u_t + σ uᵖ uₓ + ... = 0`.
    Scalar { sigma: f64, power: u32 },
    /// `q_tt = ∂ₓ²(α q² + K q)`.
    Bw { alpha: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelError {
    UnknownModel(String),
    InvalidBranch(u8),
    NotDispersive { branch: u8, k: f64, reason: String },
    Eval(EvalError),
    Param(ParamError),
    Parse { field: &'static str, error: ParseError },
    Invalid(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::UnknownModel(id) => write!(f, "unknown model `{id}`"),
            ModelError::InvalidBranch(l) => write!(f, "invalid branch index {l}"),
            ModelError::NotDispersive { branch, k, reason } => {
                write!(f, "model not dispersive: branch {branch} at k = {k}: {reason}")
            }
            ModelError::Eval(e) => write!(f, "evaluation failed: {e}"),
            ModelError::Param(e) => e.fmt(f),
            ModelError::Parse { field, error } => write!(f, "in `{field}`: {error}"),
            ModelError::Invalid(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for ModelError {}

impl From<ParamError> for ModelError {
    fn from(e: ParamError) -> Self {
        ModelError::Param(e)
    }
}

/// Floquet mode label: Fourier index `n`, exponent `μ ∈ (-1/2, 1/2]`, branch `l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeIndex {
    pub n: i64,
    pub mu: f64,
    pub l: u8,
}

impl ModeIndex {
    pub fn new(n: i64, mu: f64, l: u8) -> Result<Self, ModelError> {
        if !(mu > -0.5 && mu <= 0.5) {
            return Err(ModelError::Invalid(alloc::format!(
                "Floquet exponent {mu} outside (-1/2, 1/2]"
            )));
        }
        Ok(ModeIndex { n, mu, l })
    }

    /// The wavenumber `n + μ`.
    pub fn k(&self) -> f64 {
        self.n as f64 + self.mu
    }
}

/// Maps any real `μ` into `(-1/2, 1/2]`, returning the integer shift absorbed
/// into `n` (so that `n + μ` is unchanged when `n` is increased by the shift).
pub fn normalize_mu(mu: f64) -> (f64, i64) {
    let shift = libm::floor(0.5 - mu);
    let mut m = mu + shift;
    let mut s = shift as i64;
    if m <= -0.5 {
        m += 1.0;
        s += 1;
    }
    (m, -s)
}

#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub id: String,
    pub kind: PoissonKind,
    pub params: ModelParams,
    pub branches: Vec<DispersionBranch>,
    pub hamiltonian: HamiltonianData,
    pub even_system: bool,
    pub mirror: BranchMirror,
    pub nonlinearity: Option<Nonlinearity>,
}

impl ModelSpec {
    pub fn branch_count(&self) -> u8 {
        self.branches.len() as u8
    }

    pub fn branch_indices(&self) -> impl Iterator<Item = u8> {
        1..=self.branch_count()
    }

    fn branch(&self, l: u8) -> Result<&DispersionBranch, ModelError> {
        if l == 0 {
            return Err(ModelError::InvalidBranch(l));
        }
        self.branches
            .get(l as usize - 1)
            .ok_or(ModelError::InvalidBranch(l))
    }

    /// `ω_l(k)`. A non-finite value means the model is not dispersive.
    pub fn omega(&self, l: u8, k: f64) -> Result<f64, ModelError> {
        let branch = self.branch(l)?;
        branch
            .omega
            .eval(k, &self.params)
            .map_err(|e| ModelError::NotDispersive {
                branch: l,
                k,
                reason: alloc::format!("{e}"),
            })
    }

    /// Frame dispersion relation `Ω_l(k) = ω_l(k) - c k`.
    pub fn frame_omega(&self, l: u8, k: f64, c: f64) -> Result<f64, ModelError> {
        Ok(self.omega(l, k)? - c * k)
    }

    /// Speed `ω_l(N)/N` at which `2π/N`-periodic waves bifurcate from zero.
    pub fn bifurcation_speed(&self, l: u8, n: u32) -> Result<f64, ModelError> {
        if n == 0 {
            return Err(ModelError::Invalid("bifurcation index N must be >= 1".into()));
        }
        Ok(self.omega(l, n as f64)? / n as f64)
    }

    /// `λ = -i Ω_l(n + μ)`; purely imaginary.
    pub fn zero_amp_eigenvalue(&self, idx: ModeIndex, c: f64) -> Result<Complex64, ModelError> {
        Ok(Complex64::new(0.0, -self.frame_omega(idx.l, idx.k(), c)?))
    }

    /// All zero-amplitude eigenvalues of one Floquet class for `n` in `n_range`,
    /// sorted by imaginary part (ties by `n`, then branch).
    pub fn spectrum_slice(
        &self,
        c: f64,
        mu: f64,
        n_range: core::ops::RangeInclusive<i64>,
    ) -> Result<Vec<(ModeIndex, Complex64)>, ModelError> {
        let mut out = Vec::new();
        for n in n_range {
            for l in self.branch_indices() {
                let idx = ModeIndex::new(n, mu, l)?;
                out.push((idx, self.zero_amp_eigenvalue(idx, c)?));
            }
        }
        out.sort_by(|a, b| {
            a.1.im
                .total_cmp(&b.1.im)
                .then(a.0.n.cmp(&b.0.n))
                .then(a.0.l.cmp(&b.0.l))
        });
        Ok(out)
    }

    /// Phase-speed symbol `ω(k)/k` of a scalar model.
    pub fn phase_speed(&self, k: f64) -> Result<f64, ModelError> {
        match &self.hamiltonian {
            HamiltonianData::Scalar { phase_speed } => {
                phase_speed.eval(k, &self.params).map_err(ModelError::Eval)
            }
            _ => Err(ModelError::Invalid(alloc::format!(
                "model `{}` is not scalar",
                self.id
            ))),
        }
    }

    /// `c²(k)` of a Boussinesq–Whitham model.
    pub fn c_squared(&self, k: f64) -> Result<f64, ModelError> {
        match &self.hamiltonian {
            HamiltonianData::Bw { c_squared } => {
                c_squared.eval(k, &self.params).map_err(ModelError::Eval)
            }
            _ => Err(ModelError::Invalid(alloc::format!(
                "model `{}` is not of Boussinesq-Whitham type",
                self.id
            ))),
        }
    }

    /// Canonical symbol entries `(a_even, a_odd, B, C)` at `k`.
    pub fn canonical_symbols(&self, k: f64) -> Result<[f64; 4], ModelError> {
        match &self.hamiltonian {
            HamiltonianData::Canonical {
                a_even,
                a_odd,
                b,
                c,
            } => {
                let p = &self.params;
                let e = |s: &Symbol| s.eval(k, p).map_err(ModelError::Eval);
                Ok([e(a_even)?, e(a_odd)?, e(b)?, e(c)?])
            }
            _ => Err(ModelError::Invalid(alloc::format!(
                "model `{}` is not canonical",
                self.id
            ))),
        }
    }

    /// Checks reality/finiteness of every branch and the `k -> -k` pairing
    /// on `grid`. Returns the largest pairing violation.
    pub fn validate_dispersive(&self, grid: &[f64]) -> Result<f64, ModelError> {
        const TOL: f64 = 1e-10;
        let mut worst = 0.0f64;
        for &k in grid {
            for l in self.branch_indices() {
                let w = self.omega(l, k)?;
                let partner = self.omega(self.mirror.partner(l), -k)?;
                let v = (w + partner).abs();
                worst = worst.max(v);
                if v > TOL * (1.0 + w.abs()) {
                    return Err(ModelError::NotDispersive {
                        branch: l,
                        k,
                        reason: alloc::format!(
                            "spectrum not symmetric under k -> -k (violation {v:e})"
                        ),
                    });
                }
            }
            if self.even_system {
                let v = (self.omega(1, k)? + self.omega(2, k)?).abs();
                worst = worst.max(v);
                if v > TOL * (1.0 + v) {
                    return Err(ModelError::Invalid(alloc::format!(
                        "model flagged even but ω₁ + ω₂ = {v:e} at k = {k}"
                    )));
                }
            }
        }
        Ok(worst)
    }
}

/// Symmetric sample grid `-k_max..=k_max` with `2 n + 1` points.
pub fn symmetric_grid(k_max: f64, n: usize) -> Vec<f64> {
    (0..=2 * n)
        .map(|i| k_max * (i as f64 - n as f64) / n as f64)
        .collect()
}
