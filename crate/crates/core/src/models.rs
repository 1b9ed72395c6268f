//! Built-in models and user-defined models from dispersion expressions.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::dispersion::{
    symmetric_grid, BranchMirror, DispersionBranch, HamiltonianData, ModelError, ModelSpec,
    Nonlinearity, Parity, PoissonKind, Symbol,
};
use crate::dsl::{self, BinOp, Expr};
use crate::math::{sign, sqrt, tanh};
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinModel {
    Gkdv,
    Kdv,
    MkdvFocusing,
    MkdvDefocusing,
    Whitham,
    SineGordon,
    WaterWaves,
    WaterWavesDeep,
    BoussinesqWhitham,
    FifthOrderScalar,
}

impl BuiltinModel {
    pub const ALL: [BuiltinModel; 10] = [
        BuiltinModel::Gkdv,
        BuiltinModel::Kdv,
        BuiltinModel::MkdvFocusing,
        BuiltinModel::MkdvDefocusing,
        BuiltinModel::Whitham,
        BuiltinModel::SineGordon,
        BuiltinModel::WaterWaves,
        BuiltinModel::WaterWavesDeep,
        BuiltinModel::BoussinesqWhitham,
        BuiltinModel::FifthOrderScalar,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BuiltinModel::Gkdv => "gkdv",
            BuiltinModel::Kdv => "kdv",
            BuiltinModel::MkdvFocusing => "mkdv-focusing",
            BuiltinModel::MkdvDefocusing => "mkdv-defocusing",
            BuiltinModel::Whitham => "whitham",
            BuiltinModel::SineGordon => "sine-gordon",
            BuiltinModel::WaterWaves => "water-waves",
            BuiltinModel::WaterWavesDeep => "water-waves-deep",
            BuiltinModel::BoussinesqWhitham => "boussinesq-whitham",
            BuiltinModel::FifthOrderScalar => "fifth-order-scalar",
        }
    }

    pub fn from_id(id: &str) -> Option<BuiltinModel> {
        BuiltinModel::ALL.into_iter().find(|m| m.id() == id)
    }

    /// Parameters the model reads, with their defaults.
    pub fn default_params(self) -> &'static [(&'static str, f64)] {
        match self {
            BuiltinModel::Gkdv => &[("sigma", 1.0), ("power", 1.0)],
            BuiltinModel::Kdv => &[("sigma", 1.0)],
            BuiltinModel::MkdvFocusing => &[("sigma", 3.0)],
            BuiltinModel::MkdvDefocusing => &[("sigma", -3.0)],
            BuiltinModel::Whitham => &[("g", 1.0), ("h", 1.0), ("sigma", 1.5)],
            BuiltinModel::SineGordon => &[],
            BuiltinModel::WaterWaves => &[("g", 1.0), ("h", 1.0)],
            BuiltinModel::WaterWavesDeep => &[("g", 1.0)],
            BuiltinModel::BoussinesqWhitham => &[("g", 1.0), ("h", 1.0), ("alpha", 1.0)],
            BuiltinModel::FifthOrderScalar => &[("alpha", 1.0), ("beta", 0.25), ("sigma", 1.0)],
        }
    }

    /// Builds the model, overriding defaults with `overrides`. Names the model
    /// does not use are rejected.
    pub fn build(self, overrides: &ModelParams) -> Result<ModelSpec, ModelError> {
        let mut params = ModelParams::new();
        for &(name, value) in self.default_params() {
            params.set(name, value)?;
        }
        for (name, value) in overrides.iter() {
            if params.get(name).is_none() {
                return Err(ModelError::Invalid(format!(
                    "model `{}` has no parameter `{name}`",
                    self.id()
                )));
            }
            params.set(name, value)?;
        }
        let spec = match self {
            BuiltinModel::Gkdv | BuiltinModel::Kdv => {
                let power = params.get("power").unwrap_or(1.0);
                scalar_spec(self, params, gkdv_omega, gkdv_speed, power)?
            }
            BuiltinModel::MkdvFocusing | BuiltinModel::MkdvDefocusing => {
                scalar_spec(self, params, gkdv_omega, gkdv_speed, 2.0)?
            }
            BuiltinModel::Whitham => scalar_spec(self, params, whitham_omega, whitham_speed, 1.0)?,
            BuiltinModel::FifthOrderScalar => {
                scalar_spec(self, params, fifth_omega, fifth_speed, 1.0)?
            }
            BuiltinModel::SineGordon => two_branch_spec(
                self,
                params,
                PoissonKind::Canonical,
                [sg_omega1, sg_omega2],
                BranchMirror::Swap,
                HamiltonianData::Canonical {
                    a_even: Symbol::Zero,
                    a_odd: Symbol::Zero,
                    b: Symbol::Native(one),
                    c: Symbol::Native(sg_c),
                },
                None,
            ),
            BuiltinModel::WaterWaves => two_branch_spec(
                self,
                params,
                PoissonKind::Canonical,
                [ww_omega1, ww_omega2],
                BranchMirror::Same,
                HamiltonianData::Canonical {
                    a_even: Symbol::Zero,
                    a_odd: Symbol::Zero,
                    b: Symbol::Native(ww_dtn),
                    c: Symbol::Native(gravity),
                },
                None,
            ),
            BuiltinModel::WaterWavesDeep => two_branch_spec(
                self,
                params,
                PoissonKind::Canonical,
                [deep_omega1, deep_omega2],
                BranchMirror::Same,
                HamiltonianData::Canonical {
                    a_even: Symbol::Zero,
                    a_odd: Symbol::Zero,
                    b: Symbol::Native(deep_dtn),
                    c: Symbol::Native(gravity),
                },
                None,
            ),
            BuiltinModel::BoussinesqWhitham => {
                let alpha = params.at("alpha");
                two_branch_spec(
                    self,
                    params,
                    PoissonKind::NoncanonicalBw,
                    [ww_omega1, ww_omega2],
                    BranchMirror::Same,
                    HamiltonianData::Bw {
                        c_squared: Symbol::Native(bw_c_squared),
                    },
                    Some(Nonlinearity::Bw { alpha }),
                )
            }
        };
        Ok(spec)
    }
}

/// Looks up a built-in model by identifier.
pub fn builtin(id: &str, overrides: &ModelParams) -> Result<ModelSpec, ModelError> {
    BuiltinModel::from_id(id)
        .ok_or_else(|| ModelError::UnknownModel(id.to_string()))?
        .build(overrides)
}

fn integer_power(p: f64) -> Result<u32, ModelError> {
    if (1.0..=16.0).contains(&p) && p == libm::floor(p) {
        Ok(p as u32)
    } else {
        Err(ModelError::Invalid(format!(
            "nonlinearity power must be an integer in 1..=16, got {p}"
        )))
    }
}

fn scalar_spec(
    model: BuiltinModel,
    params: ModelParams,
    omega: fn(f64, &ModelParams) -> f64,
    speed: fn(f64, &ModelParams) -> f64,
    power: f64,
) -> Result<ModelSpec, ModelError> {
    let sigma = params.at("sigma");
    Ok(ModelSpec {
        id: model.id().to_string(),
        kind: PoissonKind::Scalar,
        params,
        branches: vec![DispersionBranch {
            index: 1,
            parity: Parity::Odd,
            omega: Symbol::Native(omega),
        }],
        hamiltonian: HamiltonianData::Scalar {
            phase_speed: Symbol::Native(speed),
        },
        even_system: false,
        mirror: BranchMirror::Same,
        nonlinearity: Some(Nonlinearity::Scalar {
            sigma,
            power: integer_power(power)?,
        }),
    })
}

fn two_branch_spec(
    model: BuiltinModel,
    params: ModelParams,
    kind: PoissonKind,
    omegas: [fn(f64, &ModelParams) -> f64; 2],
    mirror: BranchMirror,
    hamiltonian: HamiltonianData,
    nonlinearity: Option<Nonlinearity>,
) -> ModelSpec {
    let parity = match mirror {
        BranchMirror::Same => Parity::Odd,
        BranchMirror::Swap => Parity::General,
    };
    ModelSpec {
        id: model.id().to_string(),
        kind,
        params,
        branches: vec![
            DispersionBranch {
                index: 1,
                parity,
                omega: Symbol::Native(omegas[0]),
            },
            DispersionBranch {
                index: 2,
                parity,
                omega: Symbol::Native(omegas[1]),
            },
        ],
        hamiltonian,
        even_system: true,
        mirror,
        nonlinearity,
    }
}

fn one(_: f64, _: &ModelParams) -> f64 {
    1.0
}

fn gravity(_: f64, p: &ModelParams) -> f64 {
    p.at("g")
}

fn gkdv_omega(k: f64, _: &ModelParams) -> f64 {
    -k * k * k
}

fn gkdv_speed(k: f64, _: &ModelParams) -> f64 {
    -k * k
}

fn fifth_omega(k: f64, p: &ModelParams) -> f64 {
    let k2 = k * k;
    k * k2 * (p.at("alpha") - p.at("beta") * k2)
}

fn fifth_speed(k: f64, p: &ModelParams) -> f64 {
    let k2 = k * k;
    k2 * (p.at("alpha") - p.at("beta") * k2)
}

/// `g tanh(|k| h)/|k|`, continued by `g h` at `k = 0`.
fn bw_c_squared(k: f64, p: &ModelParams) -> f64 {
    let (g, h) = (p.at("g"), p.at("h"));
    let a = k.abs();
    if a * h < 1e-8 {
        g * h * (1.0 - (a * h) * (a * h) / 3.0)
    } else {
        g * tanh(a * h) / a
    }
}

fn whitham_speed(k: f64, p: &ModelParams) -> f64 {
    sqrt(bw_c_squared(k, p))
}

fn whitham_omega(k: f64, p: &ModelParams) -> f64 {
    sign(k) * sqrt(p.at("g") * k.abs() * tanh(k.abs() * p.at("h")))
}

fn ww_omega1(k: f64, p: &ModelParams) -> f64 {
    whitham_omega(k, p)
}

fn ww_omega2(k: f64, p: &ModelParams) -> f64 {
    -whitham_omega(k, p)
}

fn ww_dtn(k: f64, p: &ModelParams) -> f64 {
    k * tanh(k * p.at("h"))
}

fn deep_omega1(k: f64, p: &ModelParams) -> f64 {
    sign(k) * sqrt(p.at("g") * k.abs())
}

fn deep_omega2(k: f64, p: &ModelParams) -> f64 {
    -deep_omega1(k, p)
}

fn deep_dtn(k: f64, _: &ModelParams) -> f64 {
    k.abs()
}

fn sg_omega1(k: f64, _: &ModelParams) -> f64 {
    sqrt(1.0 + k * k)
}

fn sg_omega2(k: f64, _: &ModelParams) -> f64 {
    -sqrt(1.0 + k * k)
}

fn sg_c(k: f64, _: &ModelParams) -> f64 {
    1.0 + k * k
}

/// User-supplied model description, as read from a config file.
#[derive(Clone, Debug, Default)]
pub struct CustomModel {
    pub kind: String,
    pub omega1: Option<String>,
    pub omega2: Option<String>,
    pub c_squared: Option<String>,
    pub params: ModelParams,
    /// Value of the `k = 0`-singular symbol (`c_squared`, or `omega1/k` for
    /// scalar models) at `k = 0`.
    pub at_zero: Option<f64>,
}

const CUSTOM_ID: &str = "custom";

fn parse_field(field: &'static str, text: &Option<String>) -> Result<Expr, ModelError> {
    let text = text
        .as_deref()
        .ok_or_else(|| ModelError::Invalid(format!("custom model requires `{field}`")))?;
    dsl::parse(text).map_err(|error| ModelError::Parse { field, error })
}

fn bound(field: &'static str, text: &Option<String>, params: &ModelParams) -> Result<Expr, ModelError> {
    parse_field(field, text)?
        .bind(params)
        .map_err(ModelError::Eval)
}

fn expr_symbol(expr: Expr, at_zero: Option<f64>) -> Symbol {
    Symbol::Expr { expr, at_zero }
}

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn reject_extra(custom: &CustomModel, fields: &[(&str, bool)]) -> Result<(), ModelError> {
    for &(name, present) in fields {
        if present {
            return Err(ModelError::Invalid(format!(
                "field `{name}` is not used by custom models of kind `{}`",
                custom.kind
            )));
        }
    }
    Ok(())
}

fn detect_mirror(spec: &ModelSpec, grid: &[f64]) -> Result<BranchMirror, ModelError> {
    for mirror in [BranchMirror::Same, BranchMirror::Swap] {
        if spec.branch_count() == 1 && mirror == BranchMirror::Swap {
            break;
        }
        let candidate = ModelSpec {
            mirror,
            ..spec.clone()
        };
        if candidate.validate_dispersive(grid).is_ok() {
            return Ok(mirror);
        }
    }
    // Surface the underlying failure (non-real branch or broken symmetry).
    spec.validate_dispersive(grid)?;
    unreachable!("validation succeeded after both pairings failed")
}

impl CustomModel {
    pub fn build(&self) -> Result<ModelSpec, ModelError> {
        let params = &self.params;
        let grid = symmetric_grid(20.0, 200);
        match self.kind.as_str() {
            "scalar" => {
                reject_extra(
                    self,
                    &[("omega2", self.omega2.is_some()), ("c_squared", self.c_squared.is_some())],
                )?;
                let omega = bound("omega1", &self.omega1, params)?;
                // Phase-speed symbol ω(k)/k; its k = 0 value falls back to a
                // centered difference when no limit is configured.
                let speed = Expr::binary(BinOp::Div, omega.clone(), Expr::Var("k".into()));
                let at_zero = match self.at_zero {
                    Some(v) => v,
                    None => {
                        let d = 1e-6;
                        (omega.eval_k(d).map_err(ModelError::Eval)?
                            - omega.eval_k(-d).map_err(ModelError::Eval)?)
                            / (2.0 * d)
                    }
                };
                let nonlinearity = match params.get("sigma") {
                    Some(sigma) => Some(Nonlinearity::Scalar {
                        sigma,
                        power: integer_power(params.get("power").unwrap_or(1.0))?,
                    }),
                    None => None,
                };
                let spec = ModelSpec {
                    id: CUSTOM_ID.to_string(),
                    kind: PoissonKind::Scalar,
                    params: params.clone(),
                    branches: vec![DispersionBranch {
                        index: 1,
                        parity: Parity::Odd,
                        omega: expr_symbol(omega, None),
                    }],
                    hamiltonian: HamiltonianData::Scalar {
                        phase_speed: expr_symbol(speed, Some(at_zero)),
                    },
                    even_system: false,
                    mirror: BranchMirror::Same,
                    nonlinearity,
                };
                spec.validate_dispersive(&grid)?;
                Ok(spec)
            }
            "canonical" => {
                reject_extra(self, &[("c_squared", self.c_squared.is_some())])?;
                let w1 = bound("omega1", &self.omega1, params)?;
                let w2 = bound("omega2", &self.omega2, params)?;
                let half_sum = Expr::binary(
                    BinOp::Div,
                    Expr::binary(BinOp::Add, w1.clone(), w2.clone()),
                    num(2.0),
                );
                let half_diff = Expr::binary(
                    BinOp::Div,
                    Expr::binary(BinOp::Sub, w1.clone(), w2.clone()),
                    num(2.0),
                );
                let mut spec = ModelSpec {
                    id: CUSTOM_ID.to_string(),
                    kind: PoissonKind::Canonical,
                    params: params.clone(),
                    branches: vec![
                        DispersionBranch {
                            index: 1,
                            parity: Parity::General,
                            omega: expr_symbol(w1, None),
                        },
                        DispersionBranch {
                            index: 2,
                            parity: Parity::General,
                            omega: expr_symbol(w2, None),
                        },
                    ],
                    hamiltonian: HamiltonianData::Canonical {
                        a_even: Symbol::Zero,
                        a_odd: expr_symbol(Expr::neg(half_sum), None),
                        b: expr_symbol(Expr::binary(BinOp::Pow, half_diff, num(2.0)), None),
                        c: expr_symbol(num(1.0), None),
                    },
                    even_system: false,
                    mirror: BranchMirror::Same,
                    nonlinearity: None,
                };
                spec.mirror = detect_mirror(&spec, &grid)?;
                if spec.mirror == BranchMirror::Same {
                    for b in &mut spec.branches {
                        b.parity = Parity::Odd;
                    }
                }
                spec.even_system = grid.iter().all(|&k| {
                    match (spec.omega(1, k), spec.omega(2, k)) {
                        (Ok(a), Ok(b)) => (a + b).abs() <= 1e-12 * (1.0 + a.abs()),
                        _ => false,
                    }
                });
                Ok(spec)
            }
            "noncanonical-bw" => {
                reject_extra(
                    self,
                    &[("omega1", self.omega1.is_some()), ("omega2", self.omega2.is_some())],
                )?;
                let c2 = bound("c_squared", &self.c_squared, params)?;
                let alpha = params.get("alpha").unwrap_or(1.0);
                // ω₁ = k·sqrt(c²(k)); the factor k makes the k = 0 value 0.
                let w1 = Expr::binary(
                    BinOp::Mul,
                    Expr::Var("k".into()),
                    Expr::call(dsl::Func::Sqrt, c2.clone()),
                );
                let w2 = Expr::neg(w1.clone());
                let spec = ModelSpec {
                    id: CUSTOM_ID.to_string(),
                    kind: PoissonKind::NoncanonicalBw,
                    params: params.clone(),
                    branches: vec![
                        DispersionBranch {
                            index: 1,
                            parity: Parity::Odd,
                            omega: expr_symbol(w1, Some(0.0)),
                        },
                        DispersionBranch {
                            index: 2,
                            parity: Parity::Odd,
                            omega: expr_symbol(w2, Some(0.0)),
                        },
                    ],
                    hamiltonian: HamiltonianData::Bw {
                        c_squared: expr_symbol(c2, self.at_zero),
                    },
                    even_system: true,
                    mirror: BranchMirror::Same,
                    nonlinearity: Some(Nonlinearity::Bw { alpha }),
                };
                spec.validate_dispersive(&grid)?;
                Ok(spec)
            }
            other => Err(ModelError::Invalid(format!(
                "unknown custom model kind `{other}` (expected scalar, canonical or noncanonical-bw)"
            ))),
        }
    }
}

/// Names of all built-in models, in a fixed order.
pub fn builtin_ids() -> Vec<&'static str> {
    BuiltinModel::ALL.iter().map(|m| m.id()).collect()
}
