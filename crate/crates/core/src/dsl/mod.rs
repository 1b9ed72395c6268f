//! A small expression language for user-supplied dispersion relations.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right associative)
//! primary := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `k`, the constant `pi`, or a model parameter name.
//! Functions: `sqrt tanh sign abs sin cos exp`. There is no implicit
//! multiplication. `sign(0)` is `0`.

mod eval;
mod parser;
mod print;

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub use eval::{validate_oddness, validate_oddness_with_tol, EvalError, OddnessReport};
pub use parser::parse;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Tanh,
    Sign,
    Abs,
    Sin,
    Cos,
    Exp,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sqrt,
        Func::Tanh,
        Func::Sign,
        Func::Abs,
        Func::Sin,
        Func::Cos,
        Func::Exp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Sign => "sign",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Parsed expression tree. Literals produced by the parser are always
/// non-negative; a leading minus becomes [`Expr::Neg`].
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn neg(inner: Expr) -> Expr {
        Expr::Neg(Box::new(inner))
    }
}

/// Malformed input. `offset` is a byte offset into the source, at most its length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub excerpt: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at offset {}: expected {} near `{}`",
            self.offset, self.expected, self.excerpt
        )
    }
}

impl core::error::Error for ParseError {}
