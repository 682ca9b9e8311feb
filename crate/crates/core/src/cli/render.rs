//! Renders functions and distributions back into the expression language.
//!
//! Output parses again and evaluates to the rendered value up to the printed precision.

use crate::dist::{Atom, Distribution};
use crate::pwfun::{Piece, PiecewiseFunction, Term};
use crate::scalar::Complex;

use super::ast::complex_literal;

/// Rounds to 12 significant digits so that round-off does not clutter the output.
fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let y: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn tidy_c(c: Complex) -> Complex {
    let scale = c.norm();
    let clip = |x: f64| if x.abs() <= 1e-14 * scale { 0.0 } else { tidy(x) };
    Complex::new(clip(c.re), clip(c.im))
}

pub fn number(c: Complex) -> String {
    complex_literal(tidy_c(c))
}

pub fn real(x: f64) -> String {
    format!("{}", tidy(x))
}

/// `coef*rest`, dropping unit coefficients.
fn scaled(c: Complex, rest: &str) -> String {
    let c = tidy_c(c);
    if rest.is_empty() {
        return complex_literal(c);
    }
    if c == Complex::new(1.0, 0.0) {
        rest.to_string()
    } else if c == Complex::new(-1.0, 0.0) {
        format!("-{rest}")
    } else {
        format!("{}*{rest}", complex_literal(c))
    }
}

fn shift(anchor: f64) -> String {
    if anchor == 0.0 {
        "t".into()
    } else if anchor > 0.0 {
        format!("(t - {})", real(anchor))
    } else {
        format!("(t + {})", real(-anchor))
    }
}

fn shift_bare(anchor: f64) -> String {
    let s = shift(anchor);
    s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).map_or(s.clone(), str::to_string)
}

fn term(t: &Term, anchor: f64) -> String {
    let s = shift(anchor);
    let mut factors = Vec::new();
    match t.power {
        0 => {}
        1 => factors.push(s.clone()),
        p => factors.push(format!("{s}^{p}")),
    }
    if t.rate != Complex::new(0.0, 0.0) {
        let arg = scaled(t.rate, &s);
        let arg = if arg == s { shift_bare(anchor) } else { arg };
        factors.push(format!("exp({arg})"));
    }
    scaled(t.coeff, &factors.join("*"))
}

/// Joins signed summands with `+`/`-`.
fn join_sum(parts: &[String]) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        match p.strip_prefix('-') {
            Some(rest) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            None => {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
    }
    out
}

fn piece(p: &Piece) -> Vec<String> {
    p.terms().iter().map(|t| term(t, p.anchor())).collect()
}

fn window(f: &PiecewiseFunction, i: usize) -> Option<String> {
    let bps = f.breakpoints();
    let n = bps.len();
    if n == 0 {
        return None;
    }
    Some(if i == 0 {
        format!("(1 - theta({}))", real(bps[0]))
    } else if i == n {
        format!("theta({})", real(bps[n - 1]))
    } else {
        format!("(theta({}) - theta({}))", real(bps[i - 1]), real(bps[i]))
    })
}

pub fn function_terms(f: &PiecewiseFunction) -> Vec<String> {
    let mut out = Vec::new();
    for (i, p) in f.pieces().iter().enumerate() {
        let parts = piece(p);
        if parts.is_empty() {
            continue;
        }
        match window(f, i) {
            None => out.extend(parts),
            Some(w) if parts.len() == 1 => out.push(match parts[0].as_str() {
                "1" => w,
                "-1" => format!("-{w}"),
                t => format!("{t}*{w}"),
            }),
            Some(w) => out.push(format!("({})*{w}", join_sum(&parts))),
        }
    }
    out
}

pub fn function(f: &PiecewiseFunction) -> String {
    join_sum(&function_terms(f))
}

fn order_suffix(order: usize) -> String {
    if order == 0 {
        String::new()
    } else {
        format!(";order={order}")
    }
}

pub fn atom(a: &Atom) -> String {
    let site = real(a.site);
    let (p, m) = (tidy_c(a.plus), tidy_c(a.minus));
    let zero = Complex::new(0.0, 0.0);
    let w = tidy_c(p + m);
    if w == zero {
        scaled(p, &format!("jump({site};order={})", a.order))
    } else if m == zero {
        scaled(p, &format!("deltaplus({site}{})", order_suffix(a.order)))
    } else if p == zero {
        scaled(m, &format!("deltaminus({site}{})", order_suffix(a.order)))
    } else {
        let alpha = p / w;
        scaled(w, &format!("delta({site};alpha={}{})", number(alpha), order_suffix(a.order)))
    }
}

pub fn distribution(d: &Distribution) -> String {
    let mut parts = function_terms(d.regular_part());
    parts.extend(d.atoms().iter().map(atom));
    join_sum(&parts)
}
