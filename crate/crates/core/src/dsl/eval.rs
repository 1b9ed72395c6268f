use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use super::{BinOp, Expr, Func};
use crate::math;
use crate::params::ModelParams;

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    UnboundVariable(String),
    /// `sqrt` of a negative number, or a power with no real value.
    Domain { op: &'static str, arg: f64 },
    DivisionByZero,
    NonFinite,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundVariable(name) => write!(f, "unbound variable `{name}`"),
            EvalError::Domain { op, arg } => write!(f, "domain error: {op} of {arg}"),
            EvalError::DivisionByZero => f.write_str("division by zero"),
            EvalError::NonFinite => f.write_str("non-finite result"),
        }
    }
}

impl core::error::Error for EvalError {}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn power(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exponent < 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    let v = math::pow(base, exponent);
    if v.is_nan() {
        return Err(EvalError::Domain {
            op: "power",
            arg: base,
        });
    }
    finite(v)
}

fn apply(func: Func, x: f64) -> Result<f64, EvalError> {
    let v = match func {
        Func::Sqrt => {
            if x < 0.0 {
                return Err(EvalError::Domain { op: "sqrt", arg: x });
            }
            math::sqrt(x)
        }
        Func::Tanh => math::tanh(x),
        Func::Sign => math::sign(x),
        Func::Abs => x.abs(),
        Func::Sin => math::sin(x),
        Func::Cos => math::cos(x),
        Func::Exp => math::exp(x),
    };
    finite(v)
}

impl Expr {
    /// Evaluates with `k` and parameter bindings. `pi` is a built-in constant.
    pub fn evaluate(&self, k: f64, params: &ModelParams) -> Result<f64, EvalError> {
        self.eval_with(&|name: &str| match name {
            "k" => Some(k),
            "pi" => Some(math::PI),
            _ => params.get(name),
        })
    }

    fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => finite(*v),
            Expr::Var(name) => lookup(name).ok_or_else(|| EvalError::UnboundVariable(name.clone())),
            Expr::Neg(inner) => Ok(-inner.eval_with(lookup)?),
            Expr::Call(func, arg) => apply(*func, arg.eval_with(lookup)?),
            Expr::Binary(op, lhs, rhs) => {
                let a = lhs.eval_with(lookup)?;
                let b = rhs.eval_with(lookup)?;
                match op {
                    BinOp::Add => finite(a + b),
                    BinOp::Sub => finite(a - b),
                    BinOp::Mul => finite(a * b),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(EvalError::DivisionByZero)
                        } else {
                            finite(a / b)
                        }
                    }
                    BinOp::Pow => power(a, b),
                }
            }
        }
    }

    /// Replaces every parameter (and `pi`) by its value, leaving `k` as the only
    /// free variable. Fails on the first unbound name.
    pub fn bind(&self, params: &ModelParams) -> Result<Expr, EvalError> {
        Ok(match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var(name) if name == "k" => Expr::Var(name.clone()),
            Expr::Var(name) if name == "pi" => Expr::Num(math::PI),
            Expr::Var(name) => Expr::Num(
                params
                    .get(name)
                    .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?,
            ),
            Expr::Neg(inner) => Expr::Neg(Box::new(inner.bind(params)?)),
            Expr::Call(func, arg) => Expr::Call(*func, Box::new(arg.bind(params)?)),
            Expr::Binary(op, lhs, rhs) => {
                Expr::Binary(*op, Box::new(lhs.bind(params)?), Box::new(rhs.bind(params)?))
            }
        })
    }

    /// Evaluates an expression whose only free variable is `k` (see [`Expr::bind`]).
    pub fn eval_k(&self, k: f64) -> Result<f64, EvalError> {
        self.eval_with(&|name: &str| if name == "k" { Some(k) } else { None })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OddnessReport {
    pub is_odd: bool,
    pub max_violation: f64,
}

/// Checks `|w(k) + w(-k)| <= 1e-10` at every grid point.
pub fn validate_oddness(
    ast: &Expr,
    params: &ModelParams,
    grid: &[f64],
) -> Result<OddnessReport, EvalError> {
    validate_oddness_with_tol(ast, params, grid, 1e-10)
}

pub fn validate_oddness_with_tol(
    ast: &Expr,
    params: &ModelParams,
    grid: &[f64],
    tol: f64,
) -> Result<OddnessReport, EvalError> {
    let mut max_violation = 0.0f64;
    for &k in grid {
        let v = (ast.evaluate(k, params)? + ast.evaluate(-k, params)?).abs();
        max_violation = max_violation.max(v);
    }
    Ok(OddnessReport {
        is_odd: max_violation <= tol,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use alloc::vec::Vec;

    fn p(g: f64, h: f64) -> ModelParams {
        ModelParams::new().with("g", g).unwrap().with("h", h).unwrap()
    }

    #[test]
    fn spec_examples() {
        let none = ModelParams::new();
        assert_eq!(parse("-k^3").unwrap().evaluate(2.0, &none), Ok(-8.0));
        assert_eq!(parse("3.5").unwrap().evaluate(-7.0, &none), Ok(3.5));
        assert!(matches!(
            parse("sqrt(-1)").unwrap().evaluate(0.0, &none),
            Err(EvalError::Domain { op: "sqrt", .. })
        ));
        assert_eq!(
            parse("tanh(k*h)/k").unwrap().evaluate(0.0, &p(1.0, 1.0)),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(
            parse("k*q").unwrap().evaluate(1.0, &none),
            Err(EvalError::UnboundVariable("q".into()))
        );
    }

    #[test]
    fn whitham_expression_value() {
        let e = parse("sign(k)*sqrt(g*k*tanh(k*h))").unwrap();
        let v = e.evaluate(1.0, &p(1.0, 1.0)).unwrap();
        // sqrt(tanh 1) = 0.87269362089782969154 (30-digit reference)
        assert!((v - 0.872_693_620_897_829_7).abs() < 1e-15, "{v}");
        assert_eq!(e.evaluate(0.0, &p(1.0, 1.0)), Ok(0.0));
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        let none = ModelParams::new();
        assert_eq!(parse("(-2)^3").unwrap().evaluate(0.0, &none), Ok(-8.0));
        assert!(parse("(-2)^0.5").unwrap().evaluate(0.0, &none).is_err());
        assert_eq!(parse("0^-1").unwrap().evaluate(0.0, &none), Err(EvalError::DivisionByZero));
        assert_eq!(parse("exp(1000)").unwrap().evaluate(0.0, &none), Err(EvalError::NonFinite));
    }

    #[test]
    fn oddness() {
        let grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.3).collect();
        let none = ModelParams::new();
        let r = validate_oddness(&parse("-k^3").unwrap(), &none, &grid).unwrap();
        assert!(r.is_odd);
        let r = validate_oddness(&parse("k^2").unwrap(), &none, &grid).unwrap();
        assert!(!r.is_odd);
        assert!((r.max_violation - 2.0 * 9.0).abs() < 1e-12);
        let w = parse("sign(k)*sqrt(g*k*tanh(k*h))").unwrap();
        assert!(validate_oddness(&w, &p(1.0, 1.0), &grid).unwrap().is_odd);
    }

    #[test]
    fn bind_then_eval_matches() {
        let e = parse("alpha*k^3-beta*k^5+pi").unwrap();
        let params = ModelParams::new().with("alpha", 1.0).unwrap().with("beta", 0.25).unwrap();
        let bound = e.bind(&params).unwrap();
        for k in [-1.3, 0.0, 0.7, 2.0] {
            assert_eq!(bound.eval_k(k), e.evaluate(k, &params));
        }
        assert!(parse("q*k").unwrap().bind(&params).is_err());
    }
}
