//! A small expression parser for exact polynomial input: `+ - * / ^`,
//! parentheses, nonnegative integer literals and named symbols.  Division is
//! restricted to invertible scalar factors, so every parse is an exact
//! element of the polynomial model.
//!
//! Built-in generators: `z` (independent variable) and `l` or `E` (spectral
//! parameter slot).  Everything else resolves through the caller's symbol
//! table.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::algebra::{ParamScalar, Rat, ScalarCtx};
use crate::error::{Error, Result};
use crate::zpoly::{LzPoly, ZPoly};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Int(s.parse().expect("digits")));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(s));
            }
            '+' => {
                out.push(Tok::Plus);
                chars.next();
            }
            '-' => {
                out.push(Tok::Minus);
                chars.next();
            }
            '*' => {
                out.push(Tok::Star);
                chars.next();
            }
            '/' => {
                out.push(Tok::Slash);
                chars.next();
            }
            '^' => {
                out.push(Tok::Caret);
                chars.next();
            }
            '(' => {
                out.push(Tok::LParen);
                chars.next();
            }
            ')' => {
                out.push(Tok::RParen);
                chars.next();
            }
            other => {
                return Err(Error::Parse(format!("unexpected character '{other}'")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    ctx: &'a ScalarCtx,
    vars: &'a HashMap<String, ParamScalar>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<LzPoly> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LzPoly> {
        let mut acc = self.factor()?;
        while let Some(t) = self.peek() {
            match t {
                Tok::Star => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    self.pos += 1;
                    let rhs = self.factor()?;
                    let scalar = as_scalar(&rhs).ok_or_else(|| {
                        Error::Parse("division only by scalar factors".into())
                    })?;
                    let inv = scalar
                        .inv()
                        .map_err(|e| Error::Parse(format!("non-invertible divisor: {e}")))?;
                    acc = acc.mul_z(&ZPoly::constant(inv));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LzPoly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let f = self.factor()?;
                Ok(&LzPoly::zero(self.ctx) - &f)
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<LzPoly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Tok::Int(e)) => {
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    let mut acc = LzPoly::from_z(ZPoly::one(self.ctx));
                    let mut b = base;
                    let mut e = e;
                    while e > 0 {
                        if e & 1 == 1 {
                            acc = &acc * &b;
                        }
                        b = &b * &b;
                        e >>= 1;
                    }
                    Ok(acc)
                }
                other => Err(Error::Parse(format!(
                    "expected integer exponent, got {other:?}"
                ))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<LzPoly> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(LzPoly::from_z(ZPoly::constant(
                self.ctx.rational(Rat::from(v)),
            ))),
            Some(Tok::Ident(name)) => match name.as_str() {
                "z" => Ok(LzPoly::from_z(ZPoly::gen(self.ctx))),
                "l" | "lambda" | "E" => Ok(LzPoly::from_z(ZPoly::one(self.ctx)).mul_lambda()),
                other => {
                    let v = self.vars.get(other).ok_or_else(|| {
                        Error::Parse(format!("unknown symbol '{other}'"))
                    })?;
                    Ok(LzPoly::from_z(ZPoly::constant(v.clone())))
                }
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn as_scalar(p: &LzPoly) -> Option<ParamScalar> {
    if p.lambda_degree().unwrap_or(0) > 0 {
        return None;
    }
    let s = p.stratum(0);
    if s.degree().unwrap_or(0) > 0 {
        return None;
    }
    Some(s.coeff(0))
}

/// Parse into a bivariate `(lambda, z)` polynomial; symbols other than the
/// built-ins resolve through `vars`.
pub fn parse_lz(
    src: &str,
    ctx: &ScalarCtx,
    vars: &HashMap<String, ParamScalar>,
) -> Result<LzPoly> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        ctx,
        vars,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(e)
}

/// Standard symbol table: `a` and `b` as tower generators.
pub fn ab_vars(ctx: &ScalarCtx) -> HashMap<String, ParamScalar> {
    let mut m = HashMap::new();
    m.insert("a".to_string(), ctx.sym_a());
    m.insert("b".to_string(), ctx.sym_b());
    m
}

/// Parse a scalar expression in the `a, b` symbols.
pub fn parse_scalar(src: &str, ctx: &ScalarCtx) -> Result<ParamScalar> {
    let p = parse_lz(src, ctx, &ab_vars(ctx))?;
    as_scalar(&p).ok_or_else(|| Error::Parse("expected a scalar expression".into()))
}

/// Parse a polynomial in `b` over `Q(a)` (no `z`, no `lambda`).
pub fn parse_bpoly(src: &str) -> Result<crate::algebra::BPoly> {
    let ctx = ScalarCtx::generic();
    let s = parse_scalar(src, &ctx)?;
    s.as_bpoly()
        .cloned()
        .ok_or_else(|| Error::Parse("expression has a b-denominator".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_branch_polynomials() {
        let p = parse_bpoly("b^2 - a").unwrap();
        let q = parse_bpoly("3*b^2 - 2*(a+2)*b + 3*a").unwrap();
        assert_eq!(p.degree(), Some(2));
        assert_eq!(q.degree(), Some(2));
        assert_eq!(format!("{q}"), format!("{}", q.clone()));
    }

    #[test]
    fn parses_lambda_z_mix() {
        let ctx = ScalarCtx::generic();
        let vars = ab_vars(&ctx);
        let p = parse_lz("(z-b)^2*l + (3+3*a-4*b)*z^2", &ctx, &vars).unwrap();
        assert_eq!(p.lambda_degree(), Some(1));
        assert_eq!(p.stratum(1).degree(), Some(2));
    }

    #[test]
    fn division_by_scalar() {
        let ctx = ScalarCtx::generic();
        let vars = ab_vars(&ctx);
        let p = parse_lz("(4/3)*z + 1/3", &ctx, &vars).unwrap();
        let third = ctx.rational(crate::algebra::rat(1, 3));
        assert_eq!(p.stratum(0).coeff(0), third);
        // division by a polynomial is rejected
        assert!(parse_lz("1/(z-1)", &ctx, &vars).is_err());
    }

    #[test]
    fn rejects_unknown_symbols() {
        let ctx = ScalarCtx::generic();
        let vars = ab_vars(&ctx);
        assert!(parse_lz("q + 1", &ctx, &vars).is_err());
    }
}
