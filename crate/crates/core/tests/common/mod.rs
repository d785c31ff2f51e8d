//! Randomized checks shared by the acceptance suite and the property tests.
//! Each check returns a short summary on success and a reason on failure.
#![allow(dead_code)]

use nalgebra::DMatrix;
use ncrational::factorization::{outer_factor, FactorOptions};
use ncrational::fock::{self, KernelVector};
use ncrational::linalg::{c64, CMat, CVec, C64};
use ncrational::ncexpr::{self, NCPolynomial, NCWord};
use ncrational::realization::{Realization, DEFAULT_TOL};
use ncrational::spectral::{self, SprMethod};
use ncrational::tuple::MatrixTuple;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Check = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, n, |_, _| cgauss(rng))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| cgauss(rng))
}

pub fn random_tuple(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<CMat> {
    (0..d).map(|_| random_matrix(rng, n)).collect()
}

/// Spectral radius of `Σ conj(A_j) ⊗ A_j` from a direct Schur decomposition.
pub fn spr_oracle(a: &[CMat]) -> f64 {
    let n = a[0].nrows();
    let mut m = CMat::zeros(n * n, n * n);
    for aj in a {
        m += aj.map(|z| z.conj()).kronecker(aj);
    }
    let t = m.schur().unpack().1;
    t.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max).sqrt()
}

/// Row norm `‖Σ Z_j Z_j*‖^{1/2}` from singular values of the row block.
pub fn row_norm_oracle(z: &MatrixTuple) -> f64 {
    let n = z.n;
    let mut block = CMat::zeros(n, n * z.d);
    for (j, m) in z.x.iter().enumerate() {
        block.view_mut((0, j * n), (n, n)).copy_from(m);
    }
    block.singular_values().max()
}

/// Scales a random tuple so that its joint spectral radius is `target`.
pub fn tuple_with_spr(rng: &mut ChaCha8Rng, d: usize, n: usize, target: f64) -> Vec<CMat> {
    loop {
        let a = random_tuple(rng, d, n);
        let rho = spr_oracle(&a);
        if rho > 1e-6 {
            return a.into_iter().map(|m| m * c64(target / rho, 0.0)).collect();
        }
    }
}

pub fn within(actual: f64, expected: f64, tol: f64, what: &str) -> Result<(), String> {
    if (actual - expected).abs() <= tol && actual.is_finite() {
        Ok(())
    } else {
        Err(format!("{what}: got {actual:.15e}, expected {expected:.15e} (tol {tol:e})"))
    }
}

pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// spr by the iterate and matrized routes agree to relative 1e-9.
pub fn spr_methods_agree(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=4);
        let a = random_tuple(&mut rng, d, n);
        let m = spectral::spr(&a, SprMethod::Matrized);
        let it = spectral::spr(&a, SprMethod::Iterate);
        let rel = (m - it).abs() / m.max(1e-300);
        worst = worst.max(rel);
        ensure(rel <= 1e-9, || format!("tuple {i} (d={d}, n={n}): matrized {m:e}, iterate {it:e}"))?;
    }
    Ok(format!("{count} tuples, worst relative gap {worst:.2e}"))
}

/// With one variable, spr is the classical spectral radius. The oracle
/// plants the eigenvalues with a random similarity.
pub fn spr_single_variable(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let n = rng.random_range(1..=5);
        let eig: Vec<C64> = (0..n).map(|_| cgauss(&mut rng) * c64(0.5, 0.0)).collect();
        let s = random_matrix(&mut rng, n) + CMat::identity(n, n) * c64(2.0, 0.0);
        let Some(s_inv) = s.clone().try_inverse() else { continue };
        let a = &s * CMat::from_diagonal(&CVec::from_vec(eig.clone())) * s_inv;
        let expected = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let got = spectral::spr(&[a], SprMethod::Matrized);
        let rel = (got - expected).abs() / expected.max(1e-300);
        worst = worst.max(rel);
        ensure(rel <= 1e-8, || format!("case {i}: spr {got:e}, planted radius {expected:e}"))?;
    }
    Ok(format!("{count} matrices, worst relative gap {worst:.2e}"))
}

fn random_polynomial(rng: &mut ChaCha8Rng, d: usize, max_deg: usize, terms: usize) -> NCPolynomial {
    let mut p = NCPolynomial::zero(d);
    for _ in 0..terms {
        let len = rng.random_range(0..=max_deg);
        let w: Vec<usize> = (0..len).map(|_| rng.random_range(1..=d)).collect();
        p.add_term(NCWord(w), cgauss(rng));
    }
    p
}

fn random_kernel(rng: &mut ChaCha8Rng, d: usize, n: usize, radius: f64) -> KernelVector {
    let z = MatrixTuple::new(random_tuple(rng, d, n)).unwrap();
    let z = z.scale(c64(radius / row_norm_oracle(&z), 0.0));
    KernelVector::new(z, random_vector(rng, n), random_vector(rng, n)).unwrap()
}

/// `⟨f, K{Z,y,v}⟩ = y* f(Z) v`, with `f(Z)` from the realization of `f`.
pub fn reproducing_property(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for i in 0..count {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=4);
        let radius = rng.random_range(0.1..0.95);
        let k = random_kernel(&mut rng, d, n, radius);
        let f = random_polynomial(&mut rng, d, 4, 6);
        let rep = fock::reproduce(&k, &f).map_err(|e| e.to_string())?;
        let fz = Realization::from_polynomial(&f).evaluate(&k.z).map_err(|e| e.to_string())?;
        let oracle = k.y.dotc(&(fz * &k.v));
        let scale = 1.0 + oracle.norm();
        let gap = (rep.inner_product - oracle).norm() / scale;
        worst = worst.max(gap);
        ensure(gap <= 1e-10, || format!("pair {i}: {} vs {oracle}", rep.inner_product))?;
    }
    Ok(format!("{count} pairs, worst scaled gap {worst:.2e}"))
}

/// Sum of `|y* Z^ω v|²` over words of length `k`, for every `k ≤ m`.
fn level_sums(k: &KernelVector, m: usize) -> f64 {
    let mut total = 0.0;
    let mut frontier = vec![k.v.clone()];
    for level in 0..=m {
        total += frontier.iter().map(|u| k.y.dotc(u).norm_sqr()).sum::<f64>();
        if level == m {
            break;
        }
        frontier = frontier
            .iter()
            .flat_map(|u| k.z.x.iter().map(move |zj| zj * u))
            .collect();
    }
    total
}

/// Stein norm against a truncated coefficient sum plus the geometric tail bound.
pub fn h2_norm_truncation(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let m = 20;
    for i in 0..count {
        let d = rng.random_range(1..=2);
        let n = rng.random_range(1..=3);
        let r = rng.random_range(0.2..0.8);
        let k = random_kernel(&mut rng, d, n, r);
        let norm = fock::h2_norm(&fock::kernel_to_realization(&k)).map_err(|e| e.to_string())?;
        let partial = level_sums(&k, m);
        let zn = row_norm_oracle(&k.z);
        let tail = k.y.norm_squared() * k.v.norm_squared() * zn.powi(2 * (m as i32 + 1)) / (1.0 - zn * zn);
        let slack = 1e-10 * (1.0 + partial);
        let gap = norm * norm - partial;
        ensure(gap >= -slack && gap <= tail + slack, || {
            format!("kernel {i}: ‖f‖² − partial = {gap:e}, tail bound {tail:e}")
        })?;
    }
    Ok(format!("{count} kernels, truncation length {m}"))
}

pub fn random_realization(rng: &mut ChaCha8Rng, d: usize, n: usize, spr: f64) -> Realization {
    Realization::new(d, tuple_with_spr(rng, d, n, spr), random_vector(rng, n), random_vector(rng, n)).unwrap()
}

/// Minimization keeps Taylor coefficients and never grows the state space.
pub fn minimization_preserves(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for i in 0..count {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=4);
        let spr = rng.random_range(0.1..1.2);
        let r = random_realization(&mut rng, d, n, spr);
        // redundant form of 0.5·r with 2n states
        let big = r.add(&r.scale(c64(-0.5, 0.0))).unwrap();
        let small = big.minimize(DEFAULT_TOL);
        ensure(small.n <= n, || format!("case {i}: minimized to {} > {n}", small.n))?;
        let want = r.scale(c64(0.5, 0.0)).taylor_table(5);
        let got = small.taylor_table(5);
        let scale = 1.0 + want.norm2();
        let gap = got.max_diff(&want) / scale;
        ensure(gap <= 1e-9, || format!("case {i}: coefficient gap {gap:e}"))?;
        ensure(small.is_minimal(DEFAULT_TOL), || format!("case {i}: result not minimal"))?;
    }
    Ok(format!("{count} redundant realizations"))
}

fn random_scalar_text(rng: &mut ChaCha8Rng) -> String {
    let re: f64 = rng.random_range(-0.5..0.5);
    if rng.random_bool(0.3) {
        let im: f64 = rng.random_range(-0.5..0.5);
        format!("({re:.3}{im:+.3}i)")
    } else {
        format!("{:.3}", re.abs())
    }
}

/// Random expression text whose inverses are of the form `inv(2 + …)`.
pub fn random_expression(rng: &mut ChaCha8Rng, d: usize, depth: usize) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.6) {
            format!("z{}", rng.random_range(1..=d))
        } else {
            random_scalar_text(rng)
        };
    }
    match rng.random_range(0..5) {
        0 => format!("({} + {})", random_expression(rng, d, depth - 1), random_expression(rng, d, depth - 1)),
        1 => format!("{}*{}", random_expression(rng, d, depth - 1), random_expression(rng, d, depth - 1)),
        2 => format!("inv(2 + {})", random_expression(rng, d, depth - 1)),
        3 => format!("({})^2", random_expression(rng, d, depth - 1)),
        _ => format!("({} - {})", random_expression(rng, d, depth - 1), random_expression(rng, d, depth - 1)),
    }
}

/// The realization of an expression evaluates like the expression itself.
pub fn evaluation_homomorphism(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut done = 0;
    let mut tries = 0;
    let mut worst = 0.0f64;
    while done < count {
        tries += 1;
        ensure(tries <= 20 * count, || format!("only {done} usable expressions in {tries} draws"))?;
        let d = rng.random_range(1..=3);
        let text = random_expression(&mut rng, d, 3);
        let ast = ncexpr::parse(&text, d).map_err(|e| format!("{text}: {e}"))?;
        let n = rng.random_range(1..=3);
        let z = MatrixTuple::new(random_tuple(&mut rng, d, n)).unwrap();
        let z = z.scale(c64(0.3 / row_norm_oracle(&z), 0.0));
        let Ok(direct) = ncexpr::eval_ast(&ast, &z) else { continue };
        let r = Realization::from_ast(&ast, d).map_err(|e| format!("{text}: {e}"))?;
        let via = r.evaluate(&z).map_err(|e| format!("{text}: {e}"))?;
        let gap = (&via - &direct).norm() / (1.0 + direct.norm());
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("{text}: realization differs by {gap:e}"))?;
        let m = r.minimize(DEFAULT_TOL).evaluate(&z).map_err(|e| format!("{text}: {e}"))?;
        let gap = (&m - &direct).norm() / (1.0 + direct.norm());
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("{text}: minimal realization differs by {gap:e}"))?;
        done += 1;
    }
    Ok(format!("{count} expression/point pairs, worst gap {worst:.2e}"))
}

/// Conjugation is an isometric involution and maps K{Z,y,v} to K{Z̄,ȳ,v̄}.
pub fn conjugation_identities(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    for i in 0..count {
        let d = rng.random_range(1..=3);
        let f = random_polynomial(&mut rng, d, 4, 8);
        let g = fock::conjugate_series(&f);
        ensure((g.norm2() - f.norm2()).abs() <= 1e-12 * (1.0 + f.norm2()), || format!("case {i}: norm changed"))?;
        ensure(fock::conjugate_series(&g) == f, || format!("case {i}: not an involution"))?;

        let n = rng.random_range(1..=3);
        let k = random_kernel(&mut rng, d, n, 0.7);
        let kbar = KernelVector::new(k.z.conj(), k.y.map(|c| c.conj()), k.v.map(|c| c.conj())).unwrap();
        let lhs = fock::conjugate_series(&fock::kernel_coefficients(&k, 4));
        let rhs = fock::kernel_coefficients(&kbar, 4);
        let gap = lhs.max_diff(&rhs);
        ensure(gap <= 1e-12 * (1.0 + lhs.norm2()), || format!("case {i}: kernel conjugation gap {gap:e}"))?;
    }
    Ok(format!("{count} polynomials and kernels"))
}

fn companion_roots(p: &[C64]) -> Vec<C64> {
    let m = p.len() - 1;
    let lead = p[m];
    let mut c = CMat::zeros(m, m);
    for i in 1..m {
        c[(i, i - 1)] = c64(1.0, 0.0);
    }
    for i in 0..m {
        c[(i, m - 1)] = -p[i] / lead;
    }
    c.schur().unpack().1.diagonal().iter().copied().collect()
}

fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![c64(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// One-variable outer factor: zeros inside the disk reflected to `1/z̄`.
pub fn blaschke_flip(p: &[C64]) -> Vec<C64> {
    let m = p.len() - 1;
    let mut q = vec![p[m]];
    for r in companion_roots(p) {
        let factor = if r.norm() < 1.0 { vec![c64(1.0, 0.0), -r.conj()] } else { vec![-r, c64(1.0, 0.0)] };
        q = poly_mul(&q, &factor);
    }
    let phase = q[0].conj() / q[0].norm();
    q.into_iter().map(|c| c * phase).collect()
}

/// `outer_factor` against root reflection on random one-variable polynomials.
pub fn blaschke_cross_check(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut done = 0;
    let mut worst = 0.0f64;
    while done < count {
        let deg = rng.random_range(1..=4);
        let coeffs: Vec<C64> = (0..=deg).map(|_| cgauss(&mut rng)).collect();
        // keep zeros away from the circle, where the factor is ill-conditioned
        if companion_roots(&coeffs).iter().any(|r| (r.norm() - 1.0).abs() < 0.1) {
            continue;
        }
        let p = NCPolynomial::from_terms(1, coeffs.iter().enumerate().map(|(k, c)| (vec![1; k], *c)));
        let oracle = blaschke_flip(&coeffs);
        let res = outer_factor(&p, &FactorOptions::default()).map_err(|e| format!("{coeffs:?}: {e}"))?;
        let gap = (0..=deg)
            .map(|k| (res.outer.coeff(&NCWord(vec![1; k])) - oracle[k]).norm())
            .fold(0.0, f64::max);
        let scale = oracle.iter().map(|c| c.norm()).fold(1.0, f64::max);
        worst = worst.max(gap / scale);
        ensure(gap <= 1e-7 * scale, || format!("{coeffs:?}: factor differs from reflection by {gap:e}"))?;
        done += 1;
    }
    Ok(format!("{count} polynomials, worst relative gap {worst:.2e}"))
}

/// Boundary singular points sit at row norm `1/spr` with a singular pencil.
pub fn boundary_points(count: usize, seed: u64) -> Check {
    let mut rng = rng(seed);
    let mut worst_norm = 0.0f64;
    let mut worst_sigma = 0.0f64;
    for i in 0..count {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(1..=4);
        let target = rng.random_range(0.2..0.9);
        let a = tuple_with_spr(&mut rng, d, n, target);
        let rho = spr_oracle(&a);
        let r = Realization::new(d, a, random_vector(&mut rng, n), random_vector(&mut rng, n)).unwrap();
        let w = spectral::boundary_singularity(&r, 1e-8).map_err(|e| format!("tuple {i}: {e}"))?;
        let norm_gap = (row_norm_oracle(&w.z) - 1.0 / rho).abs();
        let pencil = r.pencil(&w.z).map_err(|e| e.to_string())?;
        let sigma = pencil.singular_values().min();
        worst_norm = worst_norm.max(norm_gap);
        worst_sigma = worst_sigma.max(sigma);
        ensure(norm_gap <= 1e-6, || format!("tuple {i}: |row_norm − 1/spr| = {norm_gap:e}"))?;
        ensure(sigma <= 1e-8, || format!("tuple {i}: σ_min of pencil {sigma:e}"))?;
    }
    Ok(format!("{count} tuples, worst norm gap {worst_norm:.2e}, worst σ_min {worst_sigma:.2e}"))
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMat {
    DMatrix::from_row_slice(rows, cols, data).map(|x| c64(x, 0.0))
}
