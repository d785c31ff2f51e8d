//! Words in the free monoid and finitely supported noncommutative polynomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{C64, ZERO};

/// One entry of a serialized coefficient table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub word: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

/// A word `i1 i2 ... ik` over the letters `1..=d`. The empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct NCWord(pub Vec<usize>);

impl NCWord {
    pub fn empty() -> Self {
        NCWord(Vec::new())
    }

    pub fn letter(j: usize) -> Self {
        NCWord(vec![j])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &NCWord) -> NCWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        NCWord(v)
    }

    /// If `self = prefix · rest`, returns `rest`.
    pub fn strip_prefix(&self, prefix: &NCWord) -> Option<NCWord> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|r| NCWord(r.to_vec()))
    }

    /// If `self = rest · suffix`, returns `rest`.
    pub fn strip_suffix(&self, suffix: &NCWord) -> Option<NCWord> {
        self.0.strip_suffix(suffix.0.as_slice()).map(|r| NCWord(r.to_vec()))
    }

    pub fn suffixes(&self) -> impl Iterator<Item = NCWord> + '_ {
        (0..=self.0.len()).map(move |k| NCWord(self.0[k..].to_vec()))
    }

    pub fn max_letter(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// All words of length exactly `k` over `d` letters, in lexicographic order.
    pub fn all_of_length(d: usize, k: usize) -> Vec<NCWord> {
        let mut out = vec![NCWord::empty()];
        for _ in 0..k {
            let mut next = Vec::with_capacity(out.len() * d);
            for w in &out {
                for j in 1..=d {
                    let mut v = w.0.clone();
                    v.push(j);
                    next.push(NCWord(v));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `k`, length-then-lexicographic.
    pub fn all_up_to(d: usize, k: usize) -> Vec<NCWord> {
        (0..=k).flat_map(|l| NCWord::all_of_length(d, l)).collect()
    }
}

impl Ord for NCWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for NCWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NCWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.0.iter().map(|j| format!("z{j}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl From<Vec<usize>> for NCWord {
    fn from(v: Vec<usize>) -> Self {
        NCWord(v)
    }
}

impl<const N: usize> From<[usize; N]> for NCWord {
    fn from(v: [usize; N]) -> Self {
        NCWord(v.to_vec())
    }
}

/// Finitely supported map from words to coefficients. Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct NCPolynomial {
    pub d: usize,
    coeffs: BTreeMap<NCWord, C64>,
}

impl NCPolynomial {
    pub fn zero(d: usize) -> Self {
        NCPolynomial { d, coeffs: BTreeMap::new() }
    }

    pub fn constant(d: usize, c: C64) -> Self {
        let mut p = NCPolynomial::zero(d);
        p.set(NCWord::empty(), c);
        p
    }

    pub fn monomial(d: usize, w: NCWord, c: C64) -> Self {
        let mut p = NCPolynomial::zero(d);
        p.set(w, c);
        p
    }

    pub fn from_terms<I, W>(d: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (W, C64)>,
        W: Into<NCWord>,
    {
        let mut p = NCPolynomial::zero(d);
        for (w, c) in terms {
            p.add_term(w.into(), c);
        }
        p
    }

    pub fn set(&mut self, w: NCWord, c: C64) {
        if c == ZERO {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, c);
        }
    }

    pub fn add_term(&mut self, w: NCWord, c: C64) {
        let v = self.coeff(&w) + c;
        self.set(w, v);
    }

    pub fn coeff(&self, w: &NCWord) -> C64 {
        self.coeffs.get(w).copied().unwrap_or(ZERO)
    }

    pub fn constant_term(&self) -> C64 {
        self.coeff(&NCWord::empty())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Terms in length-then-lexicographic word order.
    pub fn iter(&self) -> impl Iterator<Item = (&NCWord, &C64)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &NCWord> {
        self.coeffs.keys()
    }

    pub fn add(&self, other: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        out.d = self.d.max(other.d);
        for (w, c) in other.iter() {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &NCPolynomial) -> NCPolynomial {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> NCPolynomial {
        let mut out = NCPolynomial::zero(self.d);
        for (w, c) in self.iter() {
            out.set(w.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &NCPolynomial) -> NCPolynomial {
        let mut out = NCPolynomial::zero(self.d.max(other.d));
        for (w1, c1) in self.iter() {
            for (w2, c2) in other.iter() {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }

    /// Keeps only words of length at most `k`.
    pub fn truncate(&self, k: usize) -> NCPolynomial {
        let mut out = NCPolynomial::zero(self.d);
        for (w, c) in self.iter().filter(|(w, _)| w.len() <= k) {
            out.set(w.clone(), *c);
        }
        out
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm2(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conj(&self) -> NCPolynomial {
        let mut out = NCPolynomial::zero(self.d);
        for (w, c) in self.iter() {
            out.set(w.clone(), c.conj());
        }
        out
    }

    /// Largest coefficient-wise distance, treating missing words as zero.
    pub fn max_diff(&self, other: &NCPolynomial) -> f64 {
        let mut m: f64 = 0.0;
        for w in self.support().chain(other.support()) {
            m = m.max((self.coeff(w) - other.coeff(w)).norm());
        }
        m
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn chop(&self, tol: f64) -> NCPolynomial {
        let mut out = NCPolynomial::zero(self.d);
        for (w, c) in self.iter().filter(|(_, c)| c.norm() > tol) {
            out.set(w.clone(), *c);
        }
        out
    }

    pub fn to_coefficient_json(&self) -> Vec<CoefficientJson> {
        self.iter()
            .map(|(w, c)| CoefficientJson { word: w.0.clone(), re: c.re, im: c.im })
            .collect()
    }

    pub fn from_coefficient_json(d: usize, table: &[CoefficientJson]) -> Result<Self> {
        let mut p = NCPolynomial::zero(d);
        for t in table {
            if let Some(&j) = t.word.iter().find(|&&j| j == 0 || j > d) {
                return Err(Error::VariableOutOfRange { index: j, d, pos: 0 });
            }
            p.add_term(NCWord(t.word.clone()), C64::new(t.re, t.im));
        }
        Ok(p)
    }
}
