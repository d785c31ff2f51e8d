//! Inner–outer factorization of NC polynomials and the outerness / innerness
//! certificates for rational functions.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, CVec, C64, ONE, ZERO};
use crate::ncexpr::{NCPolynomial, NCWord};
use crate::realization::{self, Realization, DEFAULT_TOL};
use crate::spectral::{self, Side, SprMethod, KNIFE_EDGE};

/// `γ ↦ Σ_ω conj(p_{ωγ}) p_ω`, i.e. `⟨p, p·z^γ⟩`.
pub fn autocorrelations(p: &NCPolynomial) -> BTreeMap<NCWord, C64> {
    let mut out: BTreeMap<NCWord, C64> = BTreeMap::new();
    for (w, cw) in p.iter() {
        for gamma in w.suffixes() {
            let omega = w.strip_suffix(&gamma).expect("suffix");
            let po = p.coeff(&omega);
            if po != ZERO {
                *out.entry(gamma).or_insert(ZERO) += cw.conj() * po;
            }
        }
    }
    out.retain(|_, v| *v != ZERO);
    out
}

/// Suffixes of support words, sorted length-then-lexicographic.
pub fn hereditary_tree(p: &NCPolynomial) -> Vec<NCWord> {
    realization::hereditary_words(p)
}

/// Largest coefficient gap between the autocorrelations of `p` and `q`.
pub fn autocorrelation_residual(p: &NCPolynomial, q: &NCPolynomial) -> f64 {
    let rp = autocorrelations(p);
    let rq = autocorrelations(q);
    rp.keys()
        .chain(rq.keys())
        .map(|g| (rp.get(g).copied().unwrap_or(ZERO) - rq.get(g).copied().unwrap_or(ZERO)).norm())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct OuterTest {
    pub outer: bool,
    /// `spr` of the minimal realization of the inverse, absent when `r(0) = 0`.
    pub spr_inverse: Option<f64>,
    pub indeterminate: bool,
    pub inverse_size: usize,
}

/// Outer iff the minimal realization of `r⁻¹` has `spr ≤ 1`.
pub fn is_outer_rational(r: &Realization) -> OuterTest {
    let scale = 1.0_f64.max(r.b.norm() * r.c.norm());
    if r.n == 0 || r.value_at_zero().norm() <= 1e-14 * scale {
        return OuterTest { outer: false, spr_inverse: None, indeterminate: false, inverse_size: 0 };
    }
    let inv = match r.invert() {
        Ok(inv) => inv.minimize(DEFAULT_TOL),
        Err(_) => {
            return OuterTest { outer: false, spr_inverse: None, indeterminate: false, inverse_size: 0 }
        }
    };
    let rho = if inv.n == 0 { 0.0 } else { spectral::spr(&inv.a, SprMethod::Matrized) };
    OuterTest {
        outer: rho <= 1.0 + KNIFE_EDGE,
        spr_inverse: Some(rho),
        indeterminate: (rho - 1.0).abs() < KNIFE_EDGE,
        inverse_size: inv.n,
    }
}

#[derive(Clone, Debug)]
pub struct InnerTest {
    pub inner: bool,
    /// `|‖r‖² − 1|`.
    pub norm_defect: f64,
    /// Norm of the projection of `r` onto the closed span of `r·z^γ`, `γ ≠ ∅`.
    pub orthogonality_defect: f64,
    /// Isometry defect of truncated Toeplitz columns, a diagnostic only.
    pub toeplitz_defect: f64,
}

/// Relative rank cutoff for the span of `A^γ c`, `|γ| ≥ 1`. Looser than the
/// minimization tolerance so zero eigenvalues smeared by roundoff do not
/// pull `c` itself into the span.
const SPAN_CUTOFF: f64 = 1e-9;

/// Exact Gram test for `r(L)` being an isometry.
pub fn is_inner(r: &Realization, tol: f64) -> Result<InnerTest> {
    if r.n == 0 {
        return Ok(InnerTest { inner: false, norm_defect: 1.0, orthogonality_defect: 0.0, toeplitz_defect: 1.0 });
    }
    let rho = spectral::spr(&r.a, SprMethod::Matrized);
    if rho >= 1.0 - KNIFE_EDGE {
        return Err(Error::NotBoundedMultiplier { spr: rho });
    }
    let q = spectral::stein_solve(&r.a, &(&r.b * r.b.adjoint()), Side::Left)?;
    let qc = &q * &r.c;
    let norm_defect = (r.c.dotc(&qc).re - 1.0).abs();
    let blocks: Vec<CMat> = r.a.iter().map(|m| CMat::from_column_slice(r.n, 1, (m * &r.c).as_slice())).collect();
    let seed = linalg::hstack(&blocks);
    let floor = linalg::spectral_norm(&seed).max(r.c.norm());
    let mut v = linalg::orthonormal_range(&seed, SPAN_CUTOFF * floor);
    if v.ncols() > 0 {
        loop {
            let mut more = vec![v.clone()];
            more.extend(r.a.iter().map(|m| m * &v));
            let stacked = linalg::hstack(&more);
            let next = linalg::orthonormal_range(&stacked, SPAN_CUTOFF * linalg::spectral_norm(&stacked));
            if next.ncols() <= v.ncols() {
                break;
            }
            v = next;
        }
    }
    let orthogonality_defect = if v.ncols() == 0 {
        0.0
    } else {
        let g = v.adjoint() * &q * &v;
        let w = v.adjoint() * &qc;
        let (vals, vecs) = linalg::hermitian_eigen(&g);
        let top = vals.last().copied().unwrap_or(0.0);
        let mut acc = 0.0;
        for (i, &lam) in vals.iter().enumerate() {
            if lam > 1e-12 * top {
                acc += vecs.column(i).dotc(&w).norm_sqr() / lam;
            }
        }
        acc.sqrt()
    };
    let toeplitz_defect = toeplitz_isometry_defect(r, 8);
    Ok(InnerTest {
        inner: norm_defect <= tol && orthogonality_defect <= tol,
        norm_defect,
        orthogonality_defect,
        toeplitz_defect,
    })
}

/// Gram defect of the columns `r·z^β`, `|β| ≤ 1`, using coefficients up to `degree`.
fn toeplitz_isometry_defect(r: &Realization, degree: usize) -> f64 {
    let degree = if r.d > 3 { degree.min(5) } else { degree };
    let table = r.taylor_table(degree);
    let cols: Vec<NCWord> = NCWord::all_up_to(r.d, 1);
    let column = |beta: &NCWord| -> BTreeMap<NCWord, C64> {
        table
            .iter()
            .filter(|(w, _)| w.len() + beta.len() <= degree)
            .map(|(w, c)| (w.concat(beta), *c))
            .collect()
    };
    let data: Vec<BTreeMap<NCWord, C64>> = cols.iter().map(column).collect();
    let mut defect: f64 = 0.0;
    for (i, ci) in data.iter().enumerate() {
        for (j, cj) in data.iter().enumerate() {
            let mut g = ZERO;
            for (w, x) in ci {
                if let Some(y) = cj.get(w) {
                    g += x.conj() * y;
                }
            }
            let target = if i == j { ONE } else { ZERO };
            defect = defect.max((g - target).norm());
        }
    }
    defect
}

#[derive(Clone, Debug)]
pub struct FactorOptions {
    pub seed: u64,
    pub random_starts: usize,
    /// Autocorrelation residual required of an accepted candidate.
    pub residual_tol: f64,
    pub inner_tol: f64,
    /// Upper bound on the number of monomials in the warm-start section.
    pub section_size: usize,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions { seed: 0, random_starts: 8, residual_tol: 1e-8, inner_tol: 1e-7, section_size: 600 }
    }
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub start: String,
    pub q: NCPolynomial,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub outer: NCPolynomial,
    pub inner: Realization,
    pub residual: f64,
    pub constant_term: f64,
    pub outer_test: OuterTest,
    pub inner_test: InnerTest,
    pub start: String,
    pub candidates: Vec<Candidate>,
    /// Squared constant term predicted by the finite-section warm start.
    pub section_estimate: f64,
}

/// Spectral factor `q` of `p` with `q(L)*q(L) = p(L)*p(L)`, `q_∅ > 0` maximal.
pub fn outer_factor(p: &NCPolynomial, opts: &FactorOptions) -> Result<FactorizationResult> {
    if p.is_zero() {
        return Err(Error::InvalidInput("cannot factor the zero polynomial".into()));
    }
    let d = p.d.max(1);
    let deg = p.degree();
    let support = NCWord::all_up_to(d, deg);
    let target = autocorrelations(p);
    let system = AutocorrSystem::new(d, support, target);

    let (section_q, section_estimate) = section_start(p, d, deg, opts.section_size);
    let mut starts: Vec<(String, NCPolynomial)> = vec![
        ("section".to_string(), section_q),
        ("p".to_string(), phase_normalized(p)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scale = p.norm2() / (system.support.len() as f64).sqrt();
    for k in 0..opts.random_starts {
        let mut q = NCPolynomial::zero(d);
        for w in &system.support {
            let re: f64 = rng.random_range(-1.0..1.0);
            let im: f64 = if w.is_empty() { 0.0 } else { rng.random_range(-1.0..1.0) };
            q.set(w.clone(), c64(re * scale, im * scale));
        }
        starts.push((format!("random{k}"), q));
    }

    let mut candidates: Vec<Candidate> = starts
        .par_iter()
        .map(|(label, q0)| {
            let (q, iterations) = system.solve(q0);
            let q = phase_normalized(&q).chop(1e-15 * p.norm2());
            let residual = autocorrelation_residual(p, &q);
            Candidate { start: label.clone(), q, residual, iterations }
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.q.constant_term()
            .re
            .partial_cmp(&a.q.constant_term().re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let rp = Realization::from_polynomial(p);
    let mut tried: Vec<(f64, f64)> = Vec::new();
    for cand in candidates.iter().filter(|c| c.residual <= opts.residual_tol) {
        let q0 = cand.q.constant_term().re;
        if tried.iter().any(|(t, _)| (t - q0).abs() <= 1e-9 * q0.abs().max(1.0)) {
            continue;
        }
        let rq = Realization::from_polynomial(&cand.q).minimize(DEFAULT_TOL);
        let outer_test = is_outer_rational(&rq);
        tried.push((q0, outer_test.spr_inverse.unwrap_or(f64::NAN)));
        if !outer_test.outer {
            continue;
        }
        let Ok(qinv) = Realization::from_polynomial(&cand.q).invert() else { continue };
        let inner = rp.mul(&qinv)?.minimize(DEFAULT_TOL);
        let Ok(inner_test) = is_inner(&inner, opts.inner_tol) else { continue };
        if !inner_test.inner {
            continue;
        }
        return Ok(FactorizationResult {
            outer: cand.q.clone(),
            inner,
            residual: cand.residual,
            constant_term: q0,
            outer_test,
            inner_test,
            start: cand.start.clone(),
            candidates: candidates.clone(),
            section_estimate,
        });
    }
    let summary: Vec<String> = candidates
        .iter()
        .map(|c| format!("{}: q0={:.6} residual={:.2e}", c.start, c.q.constant_term().re, c.residual))
        .collect();
    Err(Error::CertificationFailed(format!(
        "no candidate is both outer and leaves an inner quotient [{}]",
        summary.join("; ")
    )))
}

fn phase_normalized(q: &NCPolynomial) -> NCPolynomial {
    let c = q.constant_term();
    if c.norm() == 0.0 {
        return q.clone();
    }
    q.scale((c / c.norm()).conj())
}

/// Finite-section estimate: minimize `‖p·x‖²` over `x` with `x_∅ = 1` and
/// support of length at most `k`; the minimum approximates `q_∅²` and
/// `q ≈ q_∅ x⁻¹`.
fn section_start(p: &NCPolynomial, d: usize, deg: usize, max_size: usize) -> (NCPolynomial, f64) {
    let mut k = deg.max(1);
    while section_count(d, k + 1) <= max_size && k < 4096 {
        k += 1;
    }
    let basis = NCWord::all_up_to(d, k);
    let n = basis.len();
    let r = autocorrelations(p);
    let mut h = CMat::zeros(n, n);
    for (j, beta) in basis.iter().enumerate() {
        for (gamma, val) in &r {
            // column beta, rows alpha with alpha = gamma·beta or beta = gamma·alpha
            let up = gamma.concat(beta);
            if up.len() <= k {
                let i = basis.binary_search(&up).expect("word in basis");
                h[(i, j)] = val.conj();
                h[(j, i)] = *val;
            }
        }
    }
    let mut e = CVec::zeros(n);
    e[0] = ONE;
    let sol = match h.clone().cholesky() {
        Some(ch) => ch.solve(&e),
        None => match h.lu().solve(&e) {
            Some(s) => s,
            None => return (phase_normalized(p), f64::NAN),
        },
    };
    let denom = sol[0].re;
    if !(denom > 0.0) {
        return (phase_normalized(p), f64::NAN);
    }
    let q0_sq = 1.0 / denom;
    let x: Vec<C64> = sol.iter().map(|v| v / sol[0]).collect();
    let xpoly = NCPolynomial::from_terms(d, basis.iter().cloned().zip(x));
    let y = series_inverse(&xpoly, d, deg);
    (y.scale(c64(q0_sq.sqrt(), 0.0)), q0_sq)
}

fn section_count(d: usize, k: usize) -> usize {
    let mut total: usize = 0;
    let mut layer: usize = 1;
    for _ in 0..=k {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(d);
    }
    total
}

/// Right inverse of a series with unit constant term, truncated at `deg`.
fn series_inverse(x: &NCPolynomial, d: usize, deg: usize) -> NCPolynomial {
    let words = NCWord::all_up_to(d, deg);
    let mut y = NCPolynomial::constant(d, ONE);
    for w in words.iter().skip(1) {
        let mut acc = ZERO;
        for split in 1..=w.len() {
            let alpha = NCWord(w.letters()[..split].to_vec());
            let beta = NCWord(w.letters()[split..].to_vec());
            let xa = x.coeff(&alpha);
            if xa != ZERO {
                acc += xa * y.coeff(&beta);
            }
        }
        y.set(w.clone(), -acc);
    }
    y
}

/// The real square system `autocorr(q) = autocorr(p)` with `Im q_∅ = 0`.
struct AutocorrSystem {
    d: usize,
    support: Vec<NCWord>,
    target: BTreeMap<NCWord, C64>,
}

impl AutocorrSystem {
    fn new(d: usize, support: Vec<NCWord>, target: BTreeMap<NCWord, C64>) -> Self {
        AutocorrSystem { d, support, target }
    }

    fn unknowns(&self) -> usize {
        2 * self.support.len() - 1
    }

    fn pack(&self, q: &NCPolynomial) -> DVector<f64> {
        let n = self.support.len();
        let mut th = DVector::zeros(self.unknowns());
        for (i, w) in self.support.iter().enumerate() {
            let c = q.coeff(w);
            th[i] = c.re;
            if i > 0 {
                th[n + i - 1] = c.im;
            }
        }
        th
    }

    fn unpack(&self, th: &DVector<f64>) -> Vec<C64> {
        let n = self.support.len();
        (0..n)
            .map(|i| c64(th[i], if i == 0 { 0.0 } else { th[n + i - 1] }))
            .collect()
    }

    fn index(&self, w: &NCWord) -> Option<usize> {
        self.support.binary_search(w).ok()
    }

    fn autocorr(&self, q: &[C64]) -> Vec<C64> {
        self.support
            .iter()
            .map(|gamma| {
                let mut acc = ZERO;
                for (i, omega) in self.support.iter().enumerate() {
                    if let Some(j) = self.index(&omega.concat(gamma)) {
                        acc += q[j].conj() * q[i];
                    }
                }
                acc
            })
            .collect()
    }

    fn residual(&self, q: &[C64]) -> DVector<f64> {
        let n = self.support.len();
        let r = self.autocorr(q);
        let mut f = DVector::zeros(self.unknowns());
        for (i, gamma) in self.support.iter().enumerate() {
            let diff = r[i] - self.target.get(gamma).copied().unwrap_or(ZERO);
            f[i] = diff.re;
            if i > 0 {
                f[n + i - 1] = diff.im;
            }
        }
        f
    }

    /// `dR(γ) = δ_u conj(q_{uγ}) + conj(δ_u) q_{u/γ}`.
    fn jacobian(&self, q: &[C64]) -> DMatrix<f64> {
        let n = self.support.len();
        let m = self.unknowns();
        let mut jac = DMatrix::zeros(m, m);
        for (g, gamma) in self.support.iter().enumerate() {
            for (u, word) in self.support.iter().enumerate() {
                let a = self.index(&word.concat(gamma)).map_or(ZERO, |k| q[k].conj());
                let b = word
                    .strip_suffix(gamma)
                    .and_then(|w| self.index(&w))
                    .map_or(ZERO, |k| q[k]);
                let d_re = a + b;
                let d_im = c64(0.0, 1.0) * (a - b);
                let mut put = |col: usize, dv: C64| {
                    jac[(g, col)] = dv.re;
                    if g > 0 {
                        jac[(n + g - 1, col)] = dv.im;
                    }
                };
                put(u, d_re);
                if u > 0 {
                    put(n + u - 1, d_im);
                }
            }
        }
        jac
    }

    /// Levenberg–Marquardt iteration from `start`.
    fn solve(&self, start: &NCPolynomial) -> (NCPolynomial, usize) {
        let mut th = self.pack(start);
        let scale = self.target.get(&NCWord::empty()).map_or(1.0, |v| v.re.max(1e-300));
        let mut f = self.residual(&self.unpack(&th));
        let mut cost = f.norm_squared();
        let mut mu = 1e-3;
        let mut iters = 0;
        for it in 0..300 {
            iters = it;
            if f.amax() <= 1e-15 * scale {
                break;
            }
            let q = self.unpack(&th);
            let jac = self.jacobian(&q);
            let jt = jac.transpose();
            let jtj = &jt * &jac;
            let g = &jt * &f;
            let mut accepted = false;
            for _ in 0..30 {
                let mut lhs = jtj.clone();
                for i in 0..lhs.nrows() {
                    lhs[(i, i)] += mu * (1.0 + jtj[(i, i)]);
                }
                let Some(step) = lhs.lu().solve(&(-&g)) else {
                    mu *= 10.0;
                    continue;
                };
                let trial = &th + &step;
                let ft = self.residual(&self.unpack(&trial));
                let ct = ft.norm_squared();
                if ct.is_finite() && ct < cost {
                    th = trial;
                    f = ft;
                    cost = ct;
                    mu = (mu / 5.0).max(1e-15);
                    accepted = true;
                    break;
                }
                mu *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        let q = self.unpack(&th);
        (NCPolynomial::from_terms(self.d, self.support.iter().cloned().zip(q)), iters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncexpr::{as_polynomial, parse};

    fn poly(text: &str, d: usize) -> NCPolynomial {
        as_polynomial(&parse(text, d).unwrap(), d).unwrap()
    }

    fn real_root() -> f64 {
        // t^3 - 2t^2 + t - 1 on [1, 2]
        let f = |t: f64| t * t * t - 2.0 * t * t + t - 1.0;
        let (mut lo, mut hi) = (1.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn autocorrelation_examples() {
        let r = autocorrelations(&poly("1 + z1 + z1*z2", 2));
        assert_eq!(r.len(), 4);
        assert_eq!(r[&NCWord::empty()], c64(3.0, 0.0));
        assert_eq!(r[&NCWord::from([1])], ONE);
        assert_eq!(r[&NCWord::from([2])], ONE);
        assert_eq!(r[&NCWord::from([1, 2])], ONE);
        let r = autocorrelations(&poly("1", 2));
        assert_eq!(r.len(), 1);
        let r = autocorrelations(&poly("1 - z1*z2 - z2*z1", 2));
        assert_eq!(r.len(), 3);
        assert_eq!(r[&NCWord::from([1, 2])], c64(-1.0, 0.0));
        assert_eq!(r[&NCWord::from([2, 1])], c64(-1.0, 0.0));
    }

    #[test]
    fn autocorrelations_match_toeplitz_gram() {
        let p = poly("1 + (0.5-1i)*z1 - 2*z2*z1 + 0.25*z1*z1", 2);
        let t = crate::fock::toeplitz(&p, 3);
        let g = t.gram();
        let r = autocorrelations(&p);
        for (row, gamma) in t.basis.iter().enumerate() {
            let expect = r.get(gamma).copied().unwrap_or(ZERO);
            assert!((g[(0, row)] - expect).norm() < 1e-12, "{gamma}");
        }
    }

    #[test]
    fn hereditary_tree_examples() {
        assert_eq!(hereditary_tree(&poly("1 + z1 + z1*z2", 2)).len(), 4);
        assert_eq!(hereditary_tree(&poly("1", 2)).len(), 1);
        assert_eq!(hereditary_tree(&poly("1 - z1*z2 - z2*z1", 2)).len(), 5);
    }

    #[test]
    fn outer_tests() {
        let p = Realization::from_expression("1 + z1 + z1*z2", 2).unwrap().minimize(DEFAULT_TOL);
        let t = is_outer_rational(&p);
        assert!(!t.outer);
        assert!(t.spr_inverse.unwrap() > 1.0);
        let h = Realization::from_expression("1 - 0.5*z1", 1).unwrap().minimize(DEFAULT_TOL);
        let t = is_outer_rational(&h);
        assert!(t.outer);
        assert!((t.spr_inverse.unwrap() - 0.5).abs() < 1e-12);
        let z = Realization::from_expression("z1", 1).unwrap();
        assert!(!is_outer_rational(&z).outer);
    }

    #[test]
    fn inner_tests() {
        let z = Realization::from_expression("z1", 2).unwrap().minimize(DEFAULT_TOL);
        assert!(is_inner(&z, 1e-10).unwrap().inner);
        let s = 1.0 / 2f64.sqrt();
        let zz = Realization::from_expression(&format!("{s}*z1 + {s}*z2"), 2).unwrap().minimize(DEFAULT_TOL);
        assert!(is_inner(&zz, 1e-10).unwrap().inner);
        let p = Realization::from_expression("1 + z1", 1).unwrap().minimize(DEFAULT_TOL);
        assert!(!is_inner(&p, 1e-7).unwrap().inner);
        let g = Realization::from_expression("inv(1 - z1)", 1).unwrap().minimize(DEFAULT_TOL);
        assert!(matches!(is_inner(&g, 1e-7), Err(Error::NotBoundedMultiplier { .. })));
    }

    #[test]
    fn one_variable_blaschke_factor_is_inner() {
        // (z - a)/(1 - conj(a) z) with a = 0.5
        let b = Realization::from_expression("(z1 - 0.5)*inv(1 - 0.5*z1)", 1).unwrap().minimize(DEFAULT_TOL);
        let t = is_inner(&b, 1e-10).unwrap();
        assert!(t.inner, "{t:?}");
        assert!(t.toeplitz_defect < 1e-3);
    }

    #[test]
    fn factor_one_plus_z1_plus_z1z2() {
        let p = poly("1 + z1 + z1*z2", 2);
        let res = outer_factor(&p, &FactorOptions::default()).unwrap();
        let t0 = real_root();
        let a = res.constant_term;
        assert!((a * a - t0).abs() < 1e-8, "{} vs {}", a * a, t0);
        let b = res.outer.coeff(&[1].into());
        let c = res.outer.coeff(&[2].into());
        let d = res.outer.coeff(&[1, 2].into());
        assert!((b - c64(1.0 / t0.sqrt(), 0.0)).norm() < 1e-8);
        assert!((d - c64(1.0 / t0.sqrt(), 0.0)).norm() < 1e-8);
        assert!((c - c64((1.0 - 1.0 / t0) / t0.sqrt(), 0.0)).norm() < 1e-8);
        assert!(res.residual <= 1e-8);
        assert!(res.outer_test.outer);
        assert!(res.inner_test.inner);
    }

    #[test]
    fn factor_of_outer_polynomial_is_itself() {
        let p = poly("1 - 0.5*z1", 1);
        let res = outer_factor(&p, &FactorOptions::default()).unwrap();
        assert!(res.outer.max_diff(&p) < 1e-10);
    }

    #[test]
    fn factor_second_worked_example() {
        let p = poly("1 - z1*z2 - z2*z1", 2);
        let res = outer_factor(&p, &FactorOptions::default()).unwrap();
        let s = 2f64.sqrt();
        let expect = NCPolynomial::from_terms(
            2,
            vec![(vec![], c64(s, 0.0)), (vec![1, 2], c64(-1.0 / s, 0.0)), (vec![2, 1], c64(-1.0 / s, 0.0))],
        );
        assert!(res.outer.max_diff(&expect) < 1e-8, "{:?}", res.outer);
    }
}
