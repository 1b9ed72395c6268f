use alloc::string::{String, ToString};

use super::{BinOp, Expr, Func, ParseError};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => alloc::format!("number {v}"),
            Tok::Ident(s) => alloc::format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
}

/// Parses an expression; never panics on malformed input.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        tok: Tok::End,
        tok_start: 0,
    };
    p.advance()?;
    let expr = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error_here("operator or end of input"));
    }
    Ok(expr)
}

impl<'a> Parser<'a> {
    fn error_at(&self, offset: usize, expected: &str) -> ParseError {
        let offset = offset.min(self.src.len());
        let mut start = offset.saturating_sub(8);
        while !self.src.is_char_boundary(start) {
            start -= 1;
        }
        let mut end = (offset + 8).min(self.src.len());
        while !self.src.is_char_boundary(end) {
            end += 1;
        }
        ParseError {
            offset,
            expected: expected.to_string(),
            excerpt: self.src[start..end].to_string(),
        }
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let mut e = self.error_at(self.tok_start, expected);
        e.expected = alloc::format!("{expected}, found {}", self.tok.describe());
        e
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        let single = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            self.tok = t;
            return Ok(());
        }
        if b.is_ascii_digit() || b == b'.' {
            return self.number();
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            let start = self.pos;
            while self.pos < bytes.len()
                && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
            {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
            return Ok(());
        }
        Err(self.error_at(self.pos, "number, identifier, operator or parenthesis"))
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - s
        };
        let mut n = digits(&mut self.pos);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(self.error_at(start, "digits"));
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                look += 1;
            }
            if digits(&mut look) == 0 {
                return Err(self.error_at(look, "exponent digits"));
            }
            self.pos = look;
        }
        let text = &self.src[start..self.pos];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.tok = Tok::Num(v);
                Ok(())
            }
            _ => Err(self.error_at(start, "finite number literal")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance()?;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.advance()?;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Caret {
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match core::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                let name_start = self.tok_start;
                self.advance()?;
                if self.tok == Tok::LParen {
                    let Some(func) = Func::from_name(&name) else {
                        return Err(self.error_at(name_start, "known function name"));
                    };
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::call(func, arg))
                } else if Func::from_name(&name).is_some() {
                    Err(self.error_here("`(` after function name"))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            other => {
                self.tok = other;
                Err(self.error_here("expression"))
            }
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(self.error_here("`)`"));
        }
        self.advance()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse("-k^3").unwrap();
        assert_eq!(
            e,
            Expr::neg(Expr::binary(
                BinOp::Pow,
                Expr::Var("k".into()),
                Expr::Num(3.0)
            ))
        );
        let e = parse("2^3^2").unwrap();
        assert_eq!(
            e,
            Expr::binary(
                BinOp::Pow,
                Expr::Num(2.0),
                Expr::binary(BinOp::Pow, Expr::Num(3.0), Expr::Num(2.0))
            )
        );
        let e = parse("a-b-c").unwrap();
        assert!(matches!(e, Expr::Binary(BinOp::Sub, ref l, _) if matches!(**l, Expr::Binary(BinOp::Sub, _, _))));
    }

    #[test]
    fn incomplete_expression_reports_end_offset() {
        let err = parse("k+").unwrap_err();
        assert_eq!(err.offset, 2);
        assert!(err.expected.contains("expression"));
    }

    #[test]
    fn malformed_inputs_are_errors() {
        for bad in ["", "(", "k)", "2k", "g k", "sqrt k", "foo(k)", "1e", "1.2.3", "k^", "#", "é+k", "1e999"] {
            let err = parse(bad).unwrap_err();
            assert!(err.offset <= bad.len(), "{bad}: {err:?}");
        }
    }

    #[test]
    fn exponent_literals() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse(".5").unwrap(), Expr::Num(0.5));
        assert_eq!(parse("2.").unwrap(), Expr::Num(2.0));
    }
}
