//! Noncommutative rational expressions: syntax tree, parser, printer,
//! direct evaluation and polynomial expansion.

mod parser;
mod poly;

use std::fmt;

pub use parser::{parse, MAX_POWER};
pub use poly::{CoefficientJson, NCPolynomial, NCWord};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, C64, ONE};
use crate::tuple::MatrixTuple;

/// Below this reciprocal condition number a matrix is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Scalar(C64),
    Var(usize),
    Sum(Vec<Ast>),
    Product(Vec<Ast>),
    Inverse(Box<Ast>),
    Negate(Box<Ast>),
}

impl Ast {
    /// Largest variable index used, 0 for constants.
    pub fn max_variable(&self) -> usize {
        match self {
            Ast::Scalar(_) => 0,
            Ast::Var(k) => *k,
            Ast::Sum(v) | Ast::Product(v) => v.iter().map(Ast::max_variable).max().unwrap_or(0),
            Ast::Inverse(a) | Ast::Negate(a) => a.max_variable(),
        }
    }

    pub fn has_inverse(&self) -> bool {
        match self {
            Ast::Scalar(_) | Ast::Var(_) => false,
            Ast::Sum(v) | Ast::Product(v) => v.iter().any(Ast::has_inverse),
            Ast::Inverse(_) => true,
            Ast::Negate(a) => a.has_inverse(),
        }
    }

    /// Canonical form produced by the parser: negated scalars are folded
    /// and one-element sums and products collapse to their child.
    pub fn normalize(&self) -> Ast {
        match self {
            Ast::Scalar(_) | Ast::Var(_) => self.clone(),
            Ast::Sum(v) if v.len() == 1 => v[0].normalize(),
            Ast::Product(v) if v.len() == 1 => v[0].normalize(),
            Ast::Sum(v) => Ast::Sum(v.iter().map(Ast::normalize).collect()),
            Ast::Product(v) => Ast::Product(v.iter().map(Ast::normalize).collect()),
            Ast::Inverse(a) => Ast::Inverse(Box::new(a.normalize())),
            Ast::Negate(a) => parser::negate(a.normalize()),
        }
    }
}

fn format_real(x: f64) -> String {
    format!("{x}")
}

fn format_scalar(z: C64) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else if z.re == 0.0 {
        format!("{}i", format_real(z.im))
    } else if z.re < 0.0 {
        format!("-{}", format_scalar(-z))
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("({}{}{}i)", format_real(z.re), sign, format_real(z.im.abs()))
    }
}

/// Deterministic text form; `parse(format(a))` equals `a.normalize()`.
pub fn format(ast: &Ast) -> String {
    match ast {
        Ast::Scalar(z) => format_scalar(*z),
        Ast::Var(k) => format!("z{k}"),
        Ast::Sum(v) => {
            let mut out = String::new();
            for (i, child) in v.iter().enumerate() {
                let s = format(child);
                if matches!(child, Ast::Sum(_)) {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    out.push_str(&format!("({s})"));
                } else if i == 0 {
                    out.push_str(&s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
            out
        }
        Ast::Product(v) => v
            .iter()
            .map(|child| {
                let s = format(child);
                if matches!(child, Ast::Sum(_) | Ast::Product(_)) || s.starts_with('-') {
                    format!("({s})")
                } else {
                    s
                }
            })
            .collect::<Vec<_>>()
            .join("*"),
        Ast::Inverse(a) => format!("inv({})", format(a)),
        Ast::Negate(a) => {
            let s = format(a);
            if matches!(**a, Ast::Sum(_)) || s.starts_with('-') {
                format!("-({s})")
            } else {
                format!("-{s}")
            }
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format(self))
    }
}

/// Inverse of a square matrix, refusing numerically singular inputs.
pub fn checked_inverse(m: &CMat) -> Result<CMat> {
    let rc = linalg::rcond(m);
    if rc < SINGULAR_RCOND {
        return Err(Error::NotInDomain(format!("singular inverse argument (rcond {rc:.3e})")));
    }
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::NotInDomain("singular inverse argument".into()))
}

/// Evaluates the expression at a matrix point by structural recursion.
pub fn eval_ast(ast: &Ast, x: &MatrixTuple) -> Result<CMat> {
    if ast.max_variable() > x.d {
        return Err(Error::DimensionMismatch(format!(
            "expression uses z{} but the point has d = {}",
            ast.max_variable(),
            x.d
        )));
    }
    eval_rec(ast, x)
}

fn eval_rec(ast: &Ast, x: &MatrixTuple) -> Result<CMat> {
    let n = x.n;
    Ok(match ast {
        Ast::Scalar(z) => CMat::identity(n, n) * *z,
        Ast::Var(k) => x.x[k - 1].clone(),
        Ast::Sum(v) => {
            let mut acc = CMat::zeros(n, n);
            for child in v {
                acc += eval_rec(child, x)?;
            }
            acc
        }
        Ast::Product(v) => {
            let mut acc = CMat::identity(n, n);
            for child in v {
                acc *= eval_rec(child, x)?;
            }
            acc
        }
        Ast::Inverse(a) => checked_inverse(&eval_rec(a, x)?)?,
        Ast::Negate(a) => -eval_rec(a, x)?,
    })
}

/// Expands an inverse-free expression (after folding inverses of constants)
/// into its coefficient map.
pub fn as_polynomial(ast: &Ast, d: usize) -> Result<NCPolynomial> {
    Ok(match ast {
        Ast::Scalar(z) => NCPolynomial::constant(d, *z),
        Ast::Var(k) => NCPolynomial::monomial(d, NCWord::letter(*k), ONE),
        Ast::Sum(v) => {
            let mut acc = NCPolynomial::zero(d);
            for child in v {
                acc = acc.add(&as_polynomial(child, d)?);
            }
            acc
        }
        Ast::Product(v) => {
            let mut acc = NCPolynomial::constant(d, ONE);
            for child in v {
                acc = acc.mul(&as_polynomial(child, d)?);
            }
            acc
        }
        Ast::Negate(a) => as_polynomial(a, d)?.scale(c64(-1.0, 0.0)),
        Ast::Inverse(a) => {
            let p = as_polynomial(a, d)?;
            if p.degree() > 0 {
                return Err(Error::NotAPolynomial);
            }
            let c = p.constant_term();
            if c == linalg::ZERO {
                return Err(Error::NotInDomain("inverse of the zero constant".into()));
            }
            NCPolynomial::constant(d, c.inv())
        }
    })
}

/// Expression text for a polynomial, terms in word order.
pub fn polynomial_to_ast(p: &NCPolynomial) -> Ast {
    let terms: Vec<Ast> = p
        .iter()
        .map(|(w, c)| {
            if w.is_empty() {
                return Ast::Scalar(*c);
            }
            let mut factors: Vec<Ast> = Vec::new();
            if *c != ONE {
                factors.push(Ast::Scalar(*c));
            }
            factors.extend(w.letters().iter().map(|&j| Ast::Var(j)));
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Ast::Product(factors)
            }
        })
        .collect();
    match terms.len() {
        0 => Ast::Scalar(linalg::ZERO),
        1 => terms.into_iter().next().unwrap(),
        _ => Ast::Sum(terms),
    }
}
