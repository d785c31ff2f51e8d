//! State-space realizations `r(X) = (b*⊗I) L_A(X)⁻¹ (c⊗I)` with
//! `L_A(X) = I − Σ A_j ⊗ X_j`, and the algebra on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, CVec, C64, ONE, ZERO};
use crate::ncexpr::{self, Ast, NCPolynomial, NCWord};
use crate::tuple::{matrix_from_json, matrix_to_json, JsonMatrix, MatrixTuple};

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub d: usize,
    pub n: usize,
    pub a: Vec<CMat>,
    pub b: CVec,
    pub c: CVec,
}

impl Realization {
    pub fn new(d: usize, a: Vec<CMat>, b: CVec, c: CVec) -> Result<Self> {
        let n = b.len();
        if a.len() != d {
            return Err(Error::DimensionMismatch(format!("expected {d} matrices, found {}", a.len())));
        }
        if c.len() != n || a.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(Error::DimensionMismatch(format!("state dimension must be {n} throughout")));
        }
        Ok(Realization { d, n, a, b, c })
    }

    /// The zero function.
    pub fn zero(d: usize) -> Self {
        Realization { d, n: 0, a: vec![CMat::zeros(0, 0); d], b: CVec::zeros(0), c: CVec::zeros(0) }
    }

    pub fn scalar(d: usize, value: C64) -> Self {
        Realization {
            d,
            n: 1,
            a: vec![CMat::zeros(1, 1); d],
            b: CVec::from_element(1, ONE),
            c: CVec::from_element(1, value),
        }
    }

    /// The coordinate function `z_k`.
    pub fn variable(d: usize, k: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::VariableOutOfRange { index: k, d, pos: 0 });
        }
        let mut a = vec![CMat::zeros(2, 2); d];
        a[k - 1][(0, 1)] = ONE;
        Ok(Realization {
            d,
            n: 2,
            a,
            b: CVec::from_column_slice(&[ONE, ZERO]),
            c: CVec::from_column_slice(&[ZERO, ONE]),
        })
    }

    pub fn from_ast(ast: &Ast, d: usize) -> Result<Self> {
        if ast.max_variable() > d {
            return Err(Error::VariableOutOfRange { index: ast.max_variable(), d, pos: 0 });
        }
        Ok(match ast {
            Ast::Scalar(z) => Realization::scalar(d, *z),
            Ast::Var(k) => Realization::variable(d, *k)?,
            Ast::Sum(v) => {
                let mut acc = Realization::from_ast(&v[0], d)?;
                for child in &v[1..] {
                    acc = acc.add(&Realization::from_ast(child, d)?)?;
                }
                acc
            }
            Ast::Product(v) => {
                let mut acc = Realization::from_ast(&v[0], d)?;
                for child in &v[1..] {
                    acc = acc.mul(&Realization::from_ast(child, d)?)?;
                }
                acc
            }
            Ast::Negate(a) => Realization::from_ast(a, d)?.scale(c64(-1.0, 0.0)),
            Ast::Inverse(a) => match Realization::from_ast(a, d)?.invert() {
                Err(Error::ZeroAtOrigin) => return Err(Error::NotRegularAtZero),
                other => other?,
            },
        })
    }

    pub fn from_expression(text: &str, d: usize) -> Result<Self> {
        Realization::from_ast(&ncexpr::parse(text, d)?, d)
    }

    /// One state per suffix of a support word; size is the hereditary tree size.
    pub fn from_polynomial(p: &NCPolynomial) -> Self {
        let d = p.d;
        if p.is_zero() {
            return Realization::zero(d);
        }
        let states = hereditary_words(p);
        let n = states.len();
        let index = |w: &NCWord| states.binary_search(w).ok();
        let mut a = vec![CMat::zeros(n, n); d];
        let mut b = CVec::zeros(n);
        for (col, beta) in states.iter().enumerate() {
            b[col] = p.coeff(beta).conj();
            for j in 1..=d {
                let jb = NCWord::letter(j).concat(beta);
                if let Some(row) = index(&jb) {
                    a[j - 1][(row, col)] = ONE;
                }
            }
        }
        let mut c = CVec::zeros(n);
        c[index(&NCWord::empty()).expect("empty word is a suffix")] = ONE;
        Realization { d, n, a, b, c }
    }

    pub fn value_at_zero(&self) -> C64 {
        self.b.dotc(&self.c)
    }

    pub fn check_same_d(&self, other: &Realization) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "realizations in {} and {} variables",
                self.d, other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Realization) -> Result<Realization> {
        self.check_same_d(other)?;
        let a = self.a.iter().zip(&other.a).map(|(x, y)| linalg::block_diag(x, y)).collect();
        let b = stack(&self.b, &other.b);
        let c = stack(&self.c, &other.c);
        Realization::new(self.d, a, b, c)
    }

    pub fn scale(&self, s: C64) -> Realization {
        let mut out = self.clone();
        out.c *= s;
        out
    }

    pub fn mul(&self, other: &Realization) -> Result<Realization> {
        self.check_same_d(other)?;
        let (n1, n2) = (self.n, other.n);
        let n = n1 + n2;
        let coupling = &self.c * other.b.adjoint();
        let a = (0..self.d)
            .map(|j| {
                let mut m = CMat::zeros(n, n);
                m.view_mut((0, 0), (n1, n1)).copy_from(&self.a[j]);
                m.view_mut((0, n1), (n1, n2)).copy_from(&(&coupling * &other.a[j]));
                m.view_mut((n1, n1), (n2, n2)).copy_from(&other.a[j]);
                m
            })
            .collect();
        let b = stack(&self.b, &CVec::zeros(n2));
        let c = stack(&(&self.c * other.value_at_zero()), &other.c);
        Realization::new(self.d, a, b, c)
    }

    /// Realization of `r⁻¹` of size `n + 1`.
    pub fn invert(&self) -> Result<Realization> {
        let delta = self.value_at_zero();
        let scale = 1.0_f64.max(self.b.norm() * self.c.norm());
        if delta.norm() <= 1e-14 * scale {
            return Err(Error::ZeroAtOrigin);
        }
        let n = self.n + 1;
        let inv_delta = delta.inv();
        let a = self
            .a
            .iter()
            .map(|aj| {
                let ajc = aj * &self.c;
                let mut m = CMat::zeros(n, n);
                m.view_mut((1, 0), (self.n, 1)).copy_from(&(&ajc * inv_delta));
                let lower = aj - &ajc * self.b.adjoint() * inv_delta;
                m.view_mut((1, 1), (self.n, self.n)).copy_from(&lower);
                m
            })
            .collect();
        let mut b = CVec::zeros(n);
        b[0] = inv_delta.conj();
        for i in 0..self.n {
            b[i + 1] = -self.b[i] * inv_delta.conj();
        }
        let mut c = CVec::zeros(n);
        c[0] = ONE;
        Realization::new(self.d, a, b, c)
    }

    pub fn conj(&self) -> Realization {
        Realization {
            d: self.d,
            n: self.n,
            a: self.a.iter().map(linalg::conj).collect(),
            b: self.b.map(|z| z.conj()),
            c: self.c.map(|z| z.conj()),
        }
    }

    /// `(S⁻¹AS, S*b, S⁻¹c)`, which realizes the same function.
    pub fn similarity(&self, s: &CMat) -> Result<Realization> {
        let s_inv = s
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("similarity matrix is singular".into()))?;
        Realization::new(
            self.d,
            self.a.iter().map(|m| &s_inv * m * s).collect(),
            s.adjoint() * &self.b,
            &s_inv * &self.c,
        )
    }

    /// Compresses to the controllable part and then to the observable part.
    /// The two passes are repeated until the size is stable: with badly
    /// conditioned Krylov chains one round can leave directions that only
    /// roundoff reaches.
    pub fn minimize(&self, tol: f64) -> Realization {
        let mut cur = self.minimize_once(tol);
        loop {
            let next = cur.minimize_once(tol);
            if next.n >= cur.n {
                return cur;
            }
            cur = next;
        }
    }

    fn minimize_once(&self, tol: f64) -> Realization {
        let v = reachable_basis(&self.a, &self.c, tol);
        if v.ncols() == 0 {
            return Realization::zero(self.d);
        }
        let step = self.compress(&v);
        let adj: Vec<CMat> = step.a.iter().map(|m| m.adjoint()).collect();
        let u = reachable_basis(&adj, &step.b, tol);
        if u.ncols() == 0 {
            return Realization::zero(self.d);
        }
        step.compress(&u)
    }

    fn compress(&self, v: &CMat) -> Realization {
        let vh = v.adjoint();
        Realization {
            d: self.d,
            n: v.ncols(),
            a: self.a.iter().map(|m| &vh * m * v).collect(),
            b: &vh * &self.b,
            c: &vh * &self.c,
        }
    }

    pub fn controllability_rank(&self, tol: f64) -> usize {
        reachable_basis(&self.a, &self.c, tol).ncols()
    }

    pub fn observability_rank(&self, tol: f64) -> usize {
        let adj: Vec<CMat> = self.a.iter().map(|m| m.adjoint()).collect();
        reachable_basis(&adj, &self.b, tol).ncols()
    }

    pub fn is_minimal(&self, tol: f64) -> bool {
        self.controllability_rank(tol) == self.n && self.observability_rank(tol) == self.n
    }

    /// `I − Σ A_j ⊗ X_j`.
    pub fn pencil(&self, x: &MatrixTuple) -> Result<CMat> {
        if x.d != self.d {
            return Err(Error::DimensionMismatch(format!(
                "point has d = {}, realization has d = {}",
                x.d, self.d
            )));
        }
        let size = self.n * x.n;
        let mut l = CMat::identity(size, size);
        for (aj, xj) in self.a.iter().zip(&x.x) {
            l -= linalg::kron(aj, xj);
        }
        Ok(l)
    }

    pub fn evaluate(&self, x: &MatrixTuple) -> Result<CMat> {
        let l = self.pencil(x)?;
        let m = x.n;
        if self.n == 0 {
            return Ok(CMat::zeros(m, m));
        }
        let rc = linalg::rcond(&l);
        if rc < ncexpr::SINGULAR_RCOND {
            return Err(Error::NotInDomain(format!("pencil is singular (rcond {rc:.3e})")));
        }
        let id = CMat::identity(m, m);
        let cm = linalg::kron(&CMat::from_column_slice(self.n, 1, self.c.as_slice()), &id);
        let y = l
            .lu()
            .solve(&cm)
            .ok_or_else(|| Error::NotInDomain("pencil is singular".into()))?;
        let bh = linalg::kron(&CMat::from_row_slice(1, self.n, self.b.adjoint().as_slice()), &id);
        Ok(bh * y)
    }

    /// `A_{i1} ⋯ A_{ik} c` for the word `i1…ik`.
    pub fn apply_word(&self, w: &NCWord) -> CVec {
        let mut v = self.c.clone();
        for &j in w.letters().iter().rev() {
            v = &self.a[j - 1] * v;
        }
        v
    }

    pub fn taylor_coeff(&self, w: &NCWord) -> C64 {
        if w.max_letter() > self.d || self.n == 0 {
            return ZERO;
        }
        self.b.dotc(&self.apply_word(w))
    }

    /// Coefficients of all words of length at most `max_len`.
    pub fn taylor_table(&self, max_len: usize) -> NCPolynomial {
        let mut out = NCPolynomial::zero(self.d);
        if self.n == 0 {
            return out;
        }
        let mut layer: Vec<(NCWord, CVec)> = vec![(NCWord::empty(), self.c.clone())];
        for len in 0..=max_len {
            for (w, v) in &layer {
                out.set(w.clone(), self.b.dotc(v));
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::with_capacity(layer.len() * self.d);
            for j in 1..=self.d {
                for (w, v) in &layer {
                    next.push((NCWord::letter(j).concat(w), &self.a[j - 1] * v));
                }
            }
            layer = next;
        }
        out
    }

    pub fn a_tuple(&self) -> MatrixTuple {
        MatrixTuple { d: self.d, n: self.n, x: self.a.clone() }
    }

    pub fn to_json(&self) -> RealizationJson {
        RealizationJson {
            d: self.d,
            n: self.n,
            a: self.a.iter().map(matrix_to_json).collect(),
            b: self.b.iter().map(|z| [z.re, z.im]).collect(),
            c: self.c.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_json(j: &RealizationJson) -> Result<Self> {
        if j.b.len() != j.n || j.c.len() != j.n {
            return Err(Error::DimensionMismatch(format!("vectors must have length {}", j.n)));
        }
        if j.a.len() != j.d {
            return Err(Error::DimensionMismatch(format!("expected {} matrices", j.d)));
        }
        let a = j.a.iter().map(|m| matrix_from_json(m, j.n)).collect::<Result<Vec<_>>>()?;
        let vecof = |v: &[[f64; 2]]| CVec::from_iterator(v.len(), v.iter().map(|p| c64(p[0], p[1])));
        Realization::new(j.d, a, vecof(&j.b), vecof(&j.c))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("realization serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Realization::from_json(&serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealizationJson {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<JsonMatrix>,
    pub b: Vec<[f64; 2]>,
    pub c: Vec<[f64; 2]>,
}

fn stack(x: &CVec, y: &CVec) -> CVec {
    CVec::from_iterator(x.len() + y.len(), x.iter().chain(y.iter()).copied())
}

/// All suffixes of support words, sorted length-then-lexicographic.
pub fn hereditary_words(p: &NCPolynomial) -> Vec<NCWord> {
    let mut set: Vec<NCWord> = p.support().flat_map(|w| w.suffixes().collect::<Vec<_>>()).collect();
    set.sort();
    set.dedup();
    set
}

/// Orthonormal basis of `span{A^ω v}`, grown until the rank stabilizes.
pub fn reachable_basis(a: &[CMat], v: &CVec, tol: f64) -> CMat {
    let n = v.len();
    let nv = v.norm();
    if n == 0 || nv == 0.0 {
        return CMat::zeros(n, 0);
    }
    let mut basis = CMat::from_column_slice(n, 1, (v / c64(nv, 0.0)).as_slice());
    loop {
        let mut blocks = vec![basis.clone()];
        blocks.extend(a.iter().map(|m| m * &basis));
        let stacked = linalg::hstack(&blocks);
        let smax = linalg::spectral_norm(&stacked);
        let next = linalg::orthonormal_range(&stacked, tol * smax);
        if next.ncols() <= basis.ncols() {
            return basis;
        }
        basis = next;
        if basis.ncols() == n {
            return basis;
        }
    }
}
