use malachite_nz::integer::Integer as BigInteger;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Signed;

use crate::diffop::DiffOperator;
use crate::error::{Error, Result};
use crate::orepoly::{ore_mul, OrePoly};
use crate::scalars::{Backend, GaussRat, Scalar};
use crate::series::{Derivation, PuiseuxSeries};

use super::Session;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(GaussRat),
    T,
    X,
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            k += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            't' => Some(Tok::T),
            'x' => Some(Tok::X),
            'i' => Some(Tok::I),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            k += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            col += k - start;
            let num = parse_decimal(&s).ok_or_else(|| err(l0, c0, format!("malformed number `{s}`")))?;
            out.push(Token {
                tok: Tok::Num(num),
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

/// Decimal literals are read exactly: `1.25` is `5/4`.
fn parse_decimal(s: &str) -> Option<GaussRat> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if (int.is_empty() && frac.is_empty()) || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInteger = digits.parse().ok()?;
    Some(GaussRat::decimal(n, frac.len() as u64))
}

/// An element of the Ore ring under construction; ramification grows as
/// fractional exponents appear.
struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    base: &'a Derivation,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token> {
        let t = self.next();
        if t.tok != tok {
            return Err(err(t.line, t.column, format!("expected {what}")));
        }
        Ok(t)
    }

    fn der(&self, b: u32) -> Derivation {
        self.base.lift_to(b)
    }

    fn constant(&self, c: Scalar) -> OrePoly {
        OrePoly::constant(PuiseuxSeries::constant(c, 1), self.der(1))
    }

    fn align(&self, a: OrePoly, b: OrePoly) -> (OrePoly, OrePoly) {
        let r = a.ramification().lcm(&b.ramification());
        (a.lift_to(r), b.lift_to(r))
    }

    fn mul(&self, a: OrePoly, b: OrePoly) -> OrePoly {
        let (a, b) = self.align(a, b);
        ore_mul(&a, &b)
    }

    fn expr(&mut self) -> Result<OrePoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    let rhs = self.term()?;
                    let (a, b) = self.align(acc, rhs);
                    acc = a.add(&b);
                }
                Tok::Minus => {
                    self.next();
                    let rhs = self.term()?;
                    let (a, b) = self.align(acc, rhs);
                    acc = a.sub(&b);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OrePoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    let rhs = self.unary()?;
                    acc = self.mul(acc, rhs);
                }
                Tok::Slash => {
                    let at = self.next();
                    let rhs = self.unary()?;
                    let inv = self.monomial_inverse(&rhs).ok_or_else(|| {
                        err(
                            at.line,
                            at.column,
                            "division is only by non-zero constants or monomials c*t^r",
                        )
                    })?;
                    acc = self.mul(acc, inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn monomial_inverse(&self, p: &OrePoly) -> Option<OrePoly> {
        if p.degree() != Some(0) {
            return None;
        }
        let c = p.coeff(0);
        let mut terms = c.terms();
        let (e, a) = terms.next()?;
        if terms.next().is_some() {
            return None;
        }
        let b = c.ramification();
        let inv = PuiseuxSeries::monomial(a.inv()?, -e, b);
        Some(OrePoly::constant(inv, self.der(b)))
    }

    fn unary(&mut self) -> Result<OrePoly> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                let v = self.unary()?;
                Ok(OrePoly::zero(v.derivation().clone()).sub(&v))
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<OrePoly> {
        let at = self.peek().clone();
        let (base, kind) = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let ex_at = self.peek().clone();
        let ex = self.exponent()?;
        match kind {
            Atom::T => {
                let b = *ex.denom() as u32;
                Ok(OrePoly::constant(
                    PuiseuxSeries::monomial(Scalar::one(), *ex.numer(), b),
                    self.der(b),
                ))
            }
            Atom::Constant(c) => {
                if !ex.is_integer() {
                    return Err(err(ex_at.line, ex_at.column, "only t takes fractional exponents"));
                }
                let n = ex.to_integer();
                let v = if n >= 0 {
                    c.pow(n as u32)
                } else {
                    c.inv()
                        .ok_or_else(|| err(at.line, at.column, "zero raised to a negative power"))?
                        .pow((-n) as u32)
                };
                Ok(self.constant(v))
            }
            Atom::Other => {
                if !ex.is_integer() || ex.is_negative() {
                    return Err(err(
                        ex_at.line,
                        ex_at.column,
                        "exponent must be a non-negative integer here",
                    ));
                }
                let mut acc = OrePoly::one(base.derivation().clone());
                for _ in 0..ex.to_integer() {
                    acc = self.mul(acc, base.clone());
                }
                Ok(acc)
            }
        }
    }

    fn exponent(&mut self) -> Result<Rational64> {
        let t = self.next();
        let signed_int = |p: &mut Self, first: Token| -> Result<i64> {
            let (neg, tok) = if first.tok == Tok::Minus {
                (true, p.next())
            } else {
                (false, first)
            };
            match tok.tok {
                Tok::Num(n) if n.is_integer() => {
                    let v = n
                        .to_i64()
                        .ok_or_else(|| err(tok.line, tok.column, "exponent too large"))?;
                    Ok(if neg { -v } else { v })
                }
                _ => Err(err(tok.line, tok.column, "expected an integer exponent")),
            }
        };
        if t.tok == Tok::LParen {
            let first = self.next();
            let num = signed_int(self, first)?;
            let den = if self.peek().tok == Tok::Slash {
                self.next();
                let d = self.next();
                let v = signed_int(self, d.clone())?;
                if v <= 0 {
                    return Err(err(d.line, d.column, "exponent denominator must be positive"));
                }
                v
            } else {
                1
            };
            self.expect(Tok::RParen, "`)` closing the exponent")?;
            Ok(Rational64::new(num, den))
        } else {
            Ok(Rational64::from(signed_int(self, t)?))
        }
    }

    fn atom(&mut self) -> Result<(OrePoly, Atom)> {
        let t = self.next();
        match t.tok {
            Tok::Num(n) => {
                let c = Scalar::Exact(n);
                Ok((self.constant(c.clone()), Atom::Constant(c)))
            }
            Tok::I => Ok((self.constant(Scalar::i()), Atom::Constant(Scalar::i()))),
            Tok::T => Ok((
                OrePoly::constant(PuiseuxSeries::monomial(Scalar::one(), 1, 1), self.der(1)),
                Atom::T,
            )),
            Tok::X => Ok((OrePoly::x(self.der(1)), Atom::Other)),
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok((v, Atom::Other))
            }
            Tok::End => Err(err(t.line, t.column, "unexpected end of input")),
            _ => Err(err(t.line, t.column, "expected a number, `t`, `x`, `i` or `(`")),
        }
    }
}

enum Atom {
    T,
    Constant(Scalar),
    Other,
}

fn base_derivation(session: &Session) -> Derivation {
    if session.derivation_m == 1 {
        Derivation::delta_one(1)
    } else {
        Derivation::delta_m(session.derivation_m)
    }
}

fn to_backend_poly(p: OrePoly, backend: Backend) -> OrePoly {
    if backend == Backend::Exact {
        return p;
    }
    let coeffs = p.coeffs().iter().map(|c| c.to_backend(backend)).collect();
    OrePoly::new(coeffs, p.derivation().clone())
}

/// Parsed input: a matrix if it starts with `[`, otherwise a polynomial in
/// `x`, which degenerates to a series when `x` does not occur.
#[derive(Clone, Debug)]
pub enum Parsed {
    Series(PuiseuxSeries),
    Poly(OrePoly),
    Operator(DiffOperator),
}

pub fn parse_expression(text: &str, session: &Session) -> Result<Parsed> {
    let toks = lex(text)?;
    if toks[0].tok == Tok::LBracket {
        return parse_matrix(text, session).map(Parsed::Operator);
    }
    let p = parse_poly(text, session)?;
    Ok(match p.degree() {
        Some(d) if d > 0 => Parsed::Poly(p),
        _ => Parsed::Series(p.coeff(0)),
    })
}

pub fn parse_poly(text: &str, session: &Session) -> Result<OrePoly> {
    let base = base_derivation(session);
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        base: &base,
    };
    let v = p.expr()?;
    let end = p.peek();
    if end.tok != Tok::End {
        return Err(err(end.line, end.column, "unexpected trailing input"));
    }
    Ok(to_backend_poly(v, session.backend))
}

pub fn parse_series(text: &str, session: &Session) -> Result<PuiseuxSeries> {
    let p = parse_poly(text, session)?;
    match p.degree() {
        Some(d) if d > 0 => Err(err(1, 1, "expected a series but `x` occurs")),
        _ => Ok(p.coeff(0)),
    }
}

pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let s = parse_series(text, &Session::default())?;
    if s.terms().any(|(e, _)| e != 0) {
        return Err(err(1, 1, "expected a constant"));
    }
    Ok(s.coeff(0))
}

/// `[a, b; c, d]`, rows separated by `;`.
pub fn parse_matrix(text: &str, session: &Session) -> Result<DiffOperator> {
    let base = base_derivation(session);
    if !base.is_delta_one() {
        return Err(Error::Unsupported("operators are defined for t d/dt only".into()));
    }
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        base: &base,
    };
    p.expect(Tok::LBracket, "`[`")?;
    let mut rows: Vec<Vec<PuiseuxSeries>> = vec![Vec::new()];
    loop {
        let at = p.peek().clone();
        let e = p.expr()?;
        if e.degree().is_some_and(|d| d > 0) {
            return Err(err(at.line, at.column, "matrix entries cannot contain `x`"));
        }
        rows.last_mut().unwrap().push(e.coeff(0).to_backend(session.backend));
        let t = p.next();
        match t.tok {
            Tok::Comma => {}
            Tok::Semi => {
                let done = rows.last().unwrap().len();
                if rows.len() > 1 && done != rows[0].len() {
                    return Err(err(
                        t.line,
                        t.column,
                        format!("row has {done} entries, expected {}", rows[0].len()),
                    ));
                }
                rows.push(Vec::new());
            }
            Tok::RBracket => {
                let done = rows.last().unwrap().len();
                if done != rows[0].len() {
                    return Err(err(
                        t.line,
                        t.column,
                        format!("row has {done} entries, expected {}", rows[0].len()),
                    ));
                }
                break;
            }
            _ => return Err(err(t.line, t.column, "expected `,`, `;` or `]`")),
        }
    }
    let end = p.peek();
    if end.tok != Tok::End {
        return Err(err(end.line, end.column, "unexpected trailing input"));
    }
    if rows.len() != rows[0].len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows of length {}",
            rows.len(),
            rows[0].len()
        )));
    }
    DiffOperator::from_rows(rows)
}

/// Exact fraction in lowest terms, `-3/2` or `5`.
pub fn parse_fraction(text: &str) -> Option<Rational64> {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (text.trim().parse::<i64>().ok()?, 1),
    };
    (d != 0).then(|| Rational64::new(n, d))
}
