use core::fmt;

use super::{BinOp, Expr};

// Binding strength used by the canonical printer.
const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => ATOM,
        Expr::Neg(_) => NEG,
        Expr::Binary(op, ..) => match op {
            BinOp::Add | BinOp::Sub => ADD,
            BinOp::Mul | BinOp::Div => MUL,
            BinOp::Pow => POW,
        },
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical form: minimal parentheses such that reparsing yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` is the shortest representation that round-trips, and uses
            // exponent notation for very large or small magnitudes.
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(name) => f.write_str(name),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                write_wrapped(f, inner, strength(inner) < NEG)
            }
            Expr::Binary(op, lhs, rhs) => {
                let (sym, s) = match op {
                    BinOp::Add => ("+", ADD),
                    BinOp::Sub => ("-", ADD),
                    BinOp::Mul => ("*", MUL),
                    BinOp::Div => ("/", MUL),
                    BinOp::Pow => ("^", POW),
                };
                if *op == BinOp::Pow {
                    write_wrapped(f, lhs, strength(lhs) <= POW)?;
                    f.write_str(sym)?;
                    write_wrapped(f, rhs, strength(rhs) < NEG)
                } else {
                    write_wrapped(f, lhs, strength(lhs) < s)?;
                    f.write_str(sym)?;
                    write_wrapped(f, rhs, strength(rhs) <= s)
                }
            }
        }
    }
}
