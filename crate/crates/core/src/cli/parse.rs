//! Lexer and recursive-descent parser for the expression language.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' uint)?
//! primary := number | 't' | '(' expr ')' | '(' complex ')' | '[' rows ']'
//!          | 'theta' '(' real ')' | 'ramp' '(' real ')' | 'exp' '(' expr ')'
//!          | 'delta' '(' real (';' 'alpha=' literal)? (';' 'order=' uint)? ')'
//!          | ('deltaplus' | 'deltaminus') '(' real (';' 'order=' uint)? ')'
//!          | 'jump' '(' real ';' 'order=' uint ')'
//! rows    := expr (',' expr)* (';' expr (',' expr)*)*
//! ```
//!
//! A number with an `i` suffix is imaginary; `(a+bi)` is a single complex literal.
//! A minus sign directly before a number (not followed by `^`) is part of the literal.

use crate::error::{Error, Result};
use crate::scalar::Complex;

use super::ast::Expr;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Real(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eq,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = src[i..].chars().next().unwrap();
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let x: f64 = text
                .parse()
                .map_err(|_| Error::Parse { pos: start, msg: format!("malformed number '{text}'") })?;
            let imaginary = i < bytes.len() && bytes[i] == b'i' && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric());
            if imaginary {
                i += 1;
                out.push((Tok::Imag(x), start));
            } else {
                out.push((Tok::Real(x), start));
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            _ => return Err(Error::Parse { pos: start, msg: format!("unexpected character '{c}'") }),
        };
        i += c.len_utf8();
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_n(&self, n: usize) -> &Tok {
        &self.toks[(self.at + n).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() != Tok::Minus {
            return self.power();
        }
        let signed_literal = matches!(self.peek_n(1), Tok::Real(_) | Tok::Imag(_)) && *self.peek_n(2) != Tok::Caret;
        self.bump();
        if signed_literal {
            return match self.bump() {
                Tok::Real(x) => Ok(Expr::Num(Complex::new(-x, 0.0))),
                Tok::Imag(y) => Ok(Expr::Num(Complex::new(0.0, -y))),
                _ => unreachable!(),
            };
        }
        Ok(Expr::Neg(Box::new(self.unary()?)))
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let n = self.uint("exponent")?;
            let n = u32::try_from(n).map_err(|_| Error::Parse { pos: self.pos(), msg: "exponent too large".into() })?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn uint(&mut self, what: &str) -> Result<usize> {
        match *self.peek() {
            Tok::Real(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e9 => {
                self.bump();
                Ok(x as usize)
            }
            _ => self.fail(format!("expected a non-negative integer {what}")),
        }
    }

    fn real(&mut self, what: &str) -> Result<f64> {
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        match *self.peek() {
            Tok::Real(x) => {
                self.bump();
                Ok(if neg { -x } else { x })
            }
            _ => self.fail(format!("expected a real number for {what}")),
        }
    }

    /// `(a+bi)` with optional signs, looked ahead without consuming on mismatch.
    fn complex_in_parens(&mut self) -> Option<Complex> {
        let mut k = 1;
        let mut sign_re = 1.0;
        if *self.peek_n(k) == Tok::Minus {
            sign_re = -1.0;
            k += 1;
        }
        let Tok::Real(a) = *self.peek_n(k) else { return None };
        let sign_im = match self.peek_n(k + 1) {
            Tok::Plus => 1.0,
            Tok::Minus => -1.0,
            _ => return None,
        };
        let Tok::Imag(b) = *self.peek_n(k + 2) else { return None };
        if *self.peek_n(k + 3) != Tok::RParen {
            return None;
        }
        for _ in 0..(k + 4) {
            self.bump();
        }
        Some(Complex::new(sign_re * a, sign_im * b))
    }

    /// Complex literal as accepted after `alpha=`.
    fn literal(&mut self) -> Result<Complex> {
        if *self.peek() == Tok::LParen {
            return match self.complex_in_parens() {
                Some(c) => Ok(c),
                None => self.fail("expected a complex literal (a+bi)"),
            };
        }
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let s = if neg { -1.0 } else { 1.0 };
        match self.bump() {
            Tok::Real(x) => Ok(Complex::new(s * x, 0.0)),
            Tok::Imag(y) => Ok(Complex::new(0.0, s * y)),
            t => {
                self.at -= 1;
                self.fail(format!("expected a number, found {}", describe(&t)))
            }
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Real(x) => {
                self.bump();
                Ok(Expr::Num(Complex::new(x, 0.0)))
            }
            Tok::Imag(y) => {
                self.bump();
                Ok(Expr::Num(Complex::new(0.0, y)))
            }
            Tok::LParen => {
                if let Some(c) = self.complex_in_parens() {
                    return Ok(Expr::Num(c));
                }
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::LBracket => {
                self.bump();
                let mut rows = vec![vec![self.expr()?]];
                loop {
                    match self.bump() {
                        Tok::Comma => rows.last_mut().unwrap().push(self.expr()?),
                        Tok::Semi => rows.push(vec![self.expr()?]),
                        Tok::RBracket => break,
                        t => {
                            self.at -= 1;
                            return self.fail(format!("expected ',', ';' or ']', found {}", describe(&t)));
                        }
                    }
                }
                if rows.iter().any(|r| r.len() != rows[0].len()) {
                    return Err(Error::Parse { pos, msg: "matrix rows have different lengths".into() });
                }
                Ok(Expr::Matrix(rows))
            }
            Tok::Ident(name) => {
                self.bump();
                self.call(&name, pos)
            }
            t => self.fail(format!("unexpected {}", describe(&t))),
        }
    }

    fn call(&mut self, name: &str, pos: usize) -> Result<Expr> {
        if name == "t" {
            return Ok(Expr::T);
        }
        self.expect(Tok::LParen, &format!("'(' after {name}"))?;
        let e = match name {
            "theta" => Expr::Theta(self.real("the step site")?),
            "ramp" => Expr::Ramp(self.real("the ramp site")?),
            "exp" => Expr::Exp(Box::new(self.expr()?)),
            "delta" => {
                let site = self.real("the delta site")?;
                let alpha = self.option("alpha", |p| p.literal())?;
                let order = self.option("order", |p| p.uint("order"))?;
                Expr::Delta { site, alpha, order: order.unwrap_or(0) }
            }
            "deltaplus" | "deltaminus" => {
                let site = self.real("the delta site")?;
                let order = self.option("order", |p| p.uint("order"))?.unwrap_or(0);
                if name == "deltaplus" {
                    Expr::DeltaPlus { site, order }
                } else {
                    Expr::DeltaMinus { site, order }
                }
            }
            "jump" => {
                let site = self.real("the jump site")?;
                let Some(order) = self.option("order", |p| p.uint("order"))? else {
                    return self.fail("jump requires ';order=k'");
                };
                Expr::Jump { site, order }
            }
            _ => return Err(Error::Parse { pos, msg: format!("unknown function '{name}'") }),
        };
        self.expect(Tok::RParen, "')'")?;
        Ok(e)
    }

    /// Parses `; key = value` if the next tokens spell that key.
    fn option<T>(&mut self, key: &str, value: impl FnOnce(&mut Self) -> Result<T>) -> Result<Option<T>> {
        let matches = *self.peek() == Tok::Semi && matches!(self.peek_n(1), Tok::Ident(k) if k == key);
        if !matches {
            return Ok(None);
        }
        self.bump();
        self.bump();
        self.expect(Tok::Eq, &format!("'=' after {key}"))?;
        value(self).map(Some)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Real(x) => format!("number {x}"),
        Tok::Imag(y) => format!("number {y}i"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::End => "end of input".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::LBracket => "'['".into(),
        Tok::RBracket => "']'".into(),
        Tok::Comma => "','".into(),
        Tok::Semi => "';'".into(),
        Tok::Eq => "'='".into(),
    }
}

/// Parses and type-checks an expression.
pub fn parse(src: &str) -> Result<Expr> {
    let e = parse_untyped(src)?;
    e.kind()?;
    Ok(e)
}

/// Parses without the product type check.
pub fn parse_untyped(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(format!("unexpected {} after expression", describe(p.peek())));
    }
    Ok(e)
}
