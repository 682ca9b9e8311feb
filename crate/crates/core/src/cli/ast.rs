//! Expression syntax tree and its printer.

use std::fmt::{self, Write};

use crate::error::{Error, Result};
use crate::scalar::Complex;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Complex),
    /// The variable `t`.
    T,
    Theta(f64),
    Ramp(f64),
    Exp(Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `delta(site; alpha=..; order=..)`; `alpha` is kept as written.
    Delta { site: f64, alpha: Option<Complex>, order: usize },
    DeltaPlus { site: f64, order: usize },
    DeltaMinus { site: f64, order: usize },
    Jump { site: f64, order: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Rows of a matrix; a column vector is a list of one-element rows.
    Matrix(Vec<Vec<Expr>>),
}

/// Whether a subexpression is an ordinary function or carries delta atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Regular,
    Singular,
}

impl Expr {
    pub fn num(c: Complex) -> Self {
        Expr::Num(c)
    }

    /// Static kind of the expression; rejects singular products and singular
    /// arguments of `exp` and powers.
    pub fn kind(&self) -> Result<Kind> {
        use Expr::*;
        match self {
            Num(_) | T | Theta(_) | Ramp(_) => Ok(Kind::Regular),
            Delta { .. } | DeltaPlus { .. } | DeltaMinus { .. } | Jump { .. } => Ok(Kind::Singular),
            Exp(e) => match e.kind()? {
                Kind::Regular => Ok(Kind::Regular),
                Kind::Singular => Err(Error::Type("exp of a singular distribution".into())),
            },
            Pow(e, _) => match e.kind()? {
                Kind::Regular => Ok(Kind::Regular),
                Kind::Singular => Err(Error::Type("power of a singular distribution".into())),
            },
            Neg(e) => e.kind(),
            Add(a, b) | Sub(a, b) => Ok(a.kind()?.max(b.kind()?)),
            Mul(a, b) => match (a.kind()?, b.kind()?) {
                (Kind::Singular, Kind::Singular) => {
                    Err(Error::Type(format!("product of two singular factors: {a} * {b}")))
                }
                (x, y) => Ok(x.max(y)),
            },
            Matrix(rows) => {
                let mut k = Kind::Regular;
                for e in rows.iter().flatten() {
                    k = k.max(e.kind()?);
                }
                Ok(k)
            }
        }
    }

    /// Every site mentioned by the expression (step, ramp and atom locations).
    pub fn sites(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_sites(&mut out);
        out
    }

    fn collect_sites(&self, out: &mut Vec<f64>) {
        use Expr::*;
        match self {
            Num(_) | T => {}
            Theta(s) | Ramp(s) => out.push(*s),
            Delta { site, .. } | DeltaPlus { site, .. } | DeltaMinus { site, .. } | Jump { site, .. } => out.push(*site),
            Exp(e) | Pow(e, _) | Neg(e) => e.collect_sites(out),
            Add(a, b) | Sub(a, b) | Mul(a, b) => {
                a.collect_sites(out);
                b.collect_sites(out);
            }
            Matrix(rows) => rows.iter().flatten().for_each(|e| e.collect_sites(out)),
        }
    }
}

// binding strength used by the printer
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;

fn real(x: f64) -> String {
    format!("{x}")
}

/// Literal form of a complex number: `2`, `-1.5`, `2i`, `(1-2i)`.
pub fn complex_literal(c: Complex) -> String {
    if c.im == 0.0 {
        real(c.re)
    } else if c.re == 0.0 {
        format!("{}i", real(c.im))
    } else if c.im < 0.0 {
        format!("({}-{}i)", real(c.re), real(-c.im))
    } else {
        format!("({}+{}i)", real(c.re), real(c.im))
    }
}

/// Precedence of the literal as printed.
fn literal_prec(c: Complex) -> u8 {
    if c.im == 0.0 && c.re.is_sign_negative() || c.re == 0.0 && c.im.is_sign_negative() {
        UNARY
    } else {
        POWER + 1
    }
}

impl Expr {
    fn prec(&self) -> u8 {
        use Expr::*;
        match self {
            Num(c) => literal_prec(*c),
            Add(..) | Sub(..) => SUM,
            Mul(..) => PRODUCT,
            Neg(_) => UNARY,
            Pow(..) => POWER,
            _ => POWER + 1,
        }
    }

    fn write_at(&self, out: &mut String, min: u8) -> fmt::Result {
        if self.prec() < min {
            out.push('(');
            self.write_inner(out)?;
            out.push(')');
            Ok(())
        } else {
            self.write_inner(out)
        }
    }

    fn write_inner(&self, out: &mut String) -> fmt::Result {
        use Expr::*;
        match self {
            Num(c) => out.push_str(&complex_literal(*c)),
            T => out.push('t'),
            Theta(s) => write!(out, "theta({})", real(*s))?,
            Ramp(s) => write!(out, "ramp({})", real(*s))?,
            Exp(e) => {
                out.push_str("exp(");
                e.write_at(out, SUM)?;
                out.push(')');
            }
            Pow(e, n) => {
                e.write_at(out, POWER + 1)?;
                write!(out, "^{n}")?;
            }
            Delta { site, alpha, order } => {
                write!(out, "delta({}", real(*site))?;
                if let Some(a) = alpha {
                    write!(out, ";alpha={}", complex_literal(*a))?;
                }
                if *order > 0 {
                    write!(out, ";order={order}")?;
                }
                out.push(')');
            }
            DeltaPlus { site, order } => write_site_order(out, "deltaplus", *site, *order, false)?,
            DeltaMinus { site, order } => write_site_order(out, "deltaminus", *site, *order, false)?,
            Jump { site, order } => write_site_order(out, "jump", *site, *order, true)?,
            Neg(e) => {
                out.push('-');
                // a literal right after '-' would be read back as a signed literal
                let min = if matches!(**e, Num(_)) { POWER + 2 } else { UNARY };
                e.write_at(out, min)?;
            }
            Add(a, b) | Sub(a, b) => {
                a.write_at(out, SUM)?;
                out.push_str(if matches!(self, Add(..)) { " + " } else { " - " });
                // `(2 + 3i)` would be read back as one complex literal
                let min = if reads_as_literal(a, b) { POWER + 2 } else { PRODUCT };
                b.write_at(out, min)?;
            }
            Mul(a, b) => {
                a.write_at(out, PRODUCT)?;
                out.push('*');
                b.write_at(out, UNARY)?;
            }
            Matrix(rows) => {
                out.push('[');
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        out.push_str("; ");
                    }
                    for (j, e) in row.iter().enumerate() {
                        if j > 0 {
                            out.push_str(", ");
                        }
                        e.write_at(out, SUM)?;
                    }
                }
                out.push(']');
            }
        }
        Ok(())
    }
}

fn reads_as_literal(a: &Expr, b: &Expr) -> bool {
    matches!((a, b), (Expr::Num(x), Expr::Num(y)) if x.im == 0.0 && y.re == 0.0 && y.im != 0.0)
}

fn write_site_order(out: &mut String, name: &str, site: f64, order: usize, always: bool) -> fmt::Result {
    write!(out, "{name}({}", real(site))?;
    if always || order > 0 {
        write!(out, ";order={order}")?;
    }
    out.push(')');
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_inner(&mut s)?;
        f.write_str(&s)
    }
}

/// Printed form; `parse(&print(e)) == e` for every expression the parser can produce.
pub fn print(e: &Expr) -> String {
    e.to_string()
}
