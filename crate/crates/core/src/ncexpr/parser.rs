//! Tokenizer and recursive-descent parser for NC rational expressions.
//!
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := ["-"] factor { "*" factor }
//! factor  := base [ "^" ( "-1" | nonneg-integer ) ]
//! base    := "(" expr ")" | "inv" "(" expr ")" | variable | literal
//! variable := "z" positive-integer
//! literal  := decimal | decimal "i" | "(" decimal ("+"|"-") decimal "i" ")"
//! ```

use super::Ast;
use crate::error::{Error, Result};
use crate::linalg::{c64, C64};

/// Largest exponent accepted by `^k`.
pub const MAX_POWER: u64 = 64;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: f64, integral: bool, text_int: Option<u64>, imag: bool },
    Var(usize),
    Inv,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn syntax(pos: usize, message: impl Into<String>) -> Error {
    Error::Syntax { pos, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        let pos = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push(Token { tok: Tok::Plus, pos }),
            b'-' => out.push(Token { tok: Tok::Minus, pos }),
            b'*' => out.push(Token { tok: Tok::Star, pos }),
            b'^' => out.push(Token { tok: Tok::Caret, pos }),
            b'(' => out.push(Token { tok: Tok::LParen, pos }),
            b')' => out.push(Token { tok: Tok::RParen, pos }),
            b'0'..=b'9' | b'.' => {
                let (tok, end) = lex_number(text, i)?;
                out.push(Token { tok, pos });
                i = end;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                if word == "inv" {
                    out.push(Token { tok: Tok::Inv, pos });
                } else if let Some(digits) = word.strip_prefix('z') {
                    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                        return Err(syntax(pos, format!("unknown identifier '{word}'")));
                    }
                    let k: usize = digits.parse().map_err(|_| Error::LiteralOverflow { pos })?;
                    if k == 0 {
                        return Err(syntax(pos, "variable indices start at 1"));
                    }
                    out.push(Token { tok: Tok::Var(k), pos });
                } else {
                    return Err(syntax(pos, format!("unknown identifier '{word}'")));
                }
                i = j;
                continue;
            }
            _ => {
                let c = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(pos, format!("unexpected character '{c}'")));
            }
        }
        i += 1;
    }
    out.push(Token { tok: Tok::End, pos: bytes.len() });
    Ok(out)
}

fn lex_number(text: &str, start: usize) -> Result<(Tok, usize)> {
    let bytes = text.as_bytes();
    let mut j = start;
    let digits = |j: &mut usize| {
        let s = *j;
        while *j < bytes.len() && bytes[*j].is_ascii_digit() {
            *j += 1;
        }
        *j - s
    };
    let int_digits = digits(&mut j);
    let mut is_int = true;
    if j < bytes.len() && bytes[j] == b'.' {
        is_int = false;
        j += 1;
        let frac = digits(&mut j);
        if int_digits == 0 && frac == 0 {
            return Err(syntax(start, "malformed number"));
        }
    }
    if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
        let mut k = j + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        let mut kk = k;
        if digits(&mut kk) == 0 {
            return Err(syntax(j, "malformed exponent"));
        }
        is_int = false;
        j = kk;
    }
    let lit = &text[start..j];
    let value: f64 = lit.parse().map_err(|_| syntax(start, "malformed number"))?;
    if !value.is_finite() {
        return Err(Error::LiteralOverflow { pos: start });
    }
    let mut imag = false;
    if j < bytes.len() && bytes[j] == b'i' {
        let next = bytes.get(j + 1);
        if !next.is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
            imag = true;
            j += 1;
        }
    }
    let integral = is_int && !imag;
    let text_int = if integral { lit.parse::<u64>().ok() } else { None };
    Ok((Tok::Num { value, integral, text_int, imag }, j))
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    d: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.at + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(negate(t));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Ast::Sum(terms) })
    }

    fn term(&mut self) -> Result<Ast> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut factors = vec![self.factor()?];
        while *self.peek() == Tok::Star {
            self.bump();
            factors.push(self.factor()?);
        }
        let t = if factors.len() == 1 { factors.pop().unwrap() } else { Ast::Product(factors) };
        Ok(if neg { negate(t) } else { t })
    }

    fn factor(&mut self) -> Result<Ast> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                match self.peek() {
                    Tok::Num { text_int: Some(1), .. } => {
                        self.bump();
                        Ok(Ast::Inverse(Box::new(base)))
                    }
                    _ => Err(syntax(pos, "only the exponent -1 may be negative")),
                }
            }
            Tok::Num { text_int: Some(k), .. } => {
                self.bump();
                if k > MAX_POWER {
                    return Err(Error::LiteralOverflow { pos });
                }
                Ok(match k {
                    0 => Ast::Scalar(c64(1.0, 0.0)),
                    1 => base,
                    _ => Ast::Product(vec![base; k as usize]),
                })
            }
            Tok::Num { integral: true, text_int: None, .. } => Err(Error::LiteralOverflow { pos }),
            _ => Err(syntax(pos, "exponent must be a nonnegative integer or -1")),
        }
    }

    fn base(&mut self) -> Result<Ast> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::LParen => {
                if let Some(z) = self.complex_literal() {
                    return Ok(Ast::Scalar(z));
                }
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Inv => {
                self.bump();
                self.expect(Tok::LParen, "'(' after inv")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Ast::Inverse(Box::new(e)))
            }
            Tok::Var(k) => {
                if k > self.d {
                    return Err(Error::VariableOutOfRange { index: k, d: self.d, pos });
                }
                self.bump();
                Ok(Ast::Var(k))
            }
            Tok::Num { value, imag, .. } => {
                self.bump();
                Ok(Ast::Scalar(if imag { c64(0.0, value) } else { c64(value, 0.0) }))
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            _ => Err(syntax(pos, "expected a variable, literal, 'inv' or '('")),
        }
    }

    /// Recognizes `( a ± b i )` by lookahead and consumes it.
    fn complex_literal(&mut self) -> Option<C64> {
        let re = match self.peek_at(1) {
            Tok::Num { value, imag: false, .. } => *value,
            _ => return None,
        };
        let sign = match self.peek_at(2) {
            Tok::Plus => 1.0,
            Tok::Minus => -1.0,
            _ => return None,
        };
        let im = match self.peek_at(3) {
            Tok::Num { value, imag: true, .. } => *value,
            _ => return None,
        };
        if *self.peek_at(4) != Tok::RParen {
            return None;
        }
        for _ in 0..5 {
            self.bump();
        }
        Some(c64(re, sign * im))
    }
}

/// Negation with scalar folding.
pub(super) fn negate(a: Ast) -> Ast {
    match a {
        Ast::Scalar(z) => Ast::Scalar(-z),
        other => Ast::Negate(Box::new(other)),
    }
}

pub fn parse(text: &str, d: usize) -> Result<Ast> {
    if d == 0 {
        return Err(Error::InvalidInput("number of variables d must be positive".into()));
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, d };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(ast)
}
