//! Joint spectral radius of the completely positive map `P ↦ Σ A_j P A_j*`,
//! Stein equations, similarity to a strict row contraction and boundary
//! singular points of realizations.

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, CVec, ZERO};
use crate::realization::Realization;
use crate::tuple::MatrixTuple;

/// Largest matrization handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 400;

/// Distance from 1 inside which a radius counts as being on the boundary.
pub const KNIFE_EDGE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SprMethod {
    Iterate,
    Matrized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `vec` of the map `X ↦ Σ A_j X B_j`, i.e. `Σ B_jᵀ ⊗ A_j`.
pub fn matrize(terms: &[(CMat, CMat)]) -> Result<CMat> {
    let Some((a0, b0)) = terms.first() else {
        return Err(Error::InvalidInput("empty list of coefficient pairs".into()));
    };
    let (rows, cols) = (a0.nrows(), b0.ncols());
    let mut out = CMat::zeros(rows * cols, a0.ncols() * b0.nrows());
    for (a, b) in terms {
        if a.shape() != a0.shape() || b.shape() != b0.shape() {
            return Err(Error::DimensionMismatch("coefficient pairs differ in shape".into()));
        }
        out += linalg::kron(&b.transpose(), a);
    }
    Ok(out)
}

/// `Σ A_j P A_j*`.
pub fn ad(a: &[CMat], p: &CMat) -> CMat {
    let n = p.nrows();
    let mut out = CMat::zeros(n, n);
    for aj in a {
        out += aj * p * aj.adjoint();
    }
    out
}

/// Matrization `Σ conj(A_j) ⊗ A_j` of `ad`.
pub fn cp_matrix(a: &[CMat]) -> CMat {
    let n = a.first().map_or(0, |m| m.nrows());
    let mut m = CMat::zeros(n * n, n * n);
    for aj in a {
        m += linalg::kron(&linalg::conj(aj), aj);
    }
    m
}

fn tuple_norm(a: &[CMat]) -> f64 {
    a.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

/// True when every product of length `n` vanishes.
pub fn is_jointly_nilpotent(a: &[CMat]) -> bool {
    let n = a.first().map_or(0, |m| m.nrows());
    let scale = tuple_norm(a);
    if n == 0 || scale == 0.0 {
        return true;
    }
    let mut v = CMat::identity(n, n);
    for _ in 0..n {
        let blocks: Vec<CMat> = a.iter().map(|m| m * &v).collect();
        let stacked = linalg::hstack(&blocks);
        v = linalg::orthonormal_range(&stacked, 1e-12 * scale);
        if v.ncols() == 0 {
            return true;
        }
    }
    false
}

pub fn spr(a: &[CMat], method: SprMethod) -> f64 {
    if is_jointly_nilpotent(a) {
        return 0.0;
    }
    let n = a[0].nrows();
    match method {
        SprMethod::Matrized if n * n <= DENSE_LIMIT => {
            linalg::spectral_radius(&cp_matrix(a)).sqrt()
        }
        _ => spr_iterate(a),
    }
}

/// Restarted Arnoldi on `ad`, applied to matrices, started from the identity.
fn spr_iterate(a: &[CMat]) -> f64 {
    let n = a[0].nrows();
    let dim = n * n;
    let m = dim.min(40);
    let mut start = linalg::vec_of(&CMat::identity(n, n));
    let mut theta = 0.0f64;
    for _ in 0..100 {
        let nv = start.norm();
        if nv == 0.0 {
            return 0.0;
        }
        let mut basis: Vec<CVec> = vec![start.unscale(nv)];
        let mut h = CMat::zeros(m + 1, m);
        let mut size = m;
        let mut breakdown = false;
        for k in 0..m {
            let mut w = linalg::vec_of(&ad(a, &linalg::unvec(&basis[k], n, n)));
            let wn = w.norm();
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = q.dotc(&w);
                    h[(i, k)] += c;
                    w -= q * c;
                }
            }
            let beta = w.norm();
            h[(k + 1, k)] = c64(beta, 0.0);
            if beta <= 1e-14 * wn.max(1e-300) {
                size = k + 1;
                breakdown = true;
                break;
            }
            basis.push(w.unscale(beta));
        }
        let hs = h.view((0, 0), (size, size)).into_owned();
        let ritz = linalg::eigenvalues(&hs)
            .into_iter()
            .max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(ZERO);
        theta = ritz.norm();
        if breakdown || theta == 0.0 {
            return theta.sqrt();
        }
        let s = linalg::null_vector(&(&hs - CMat::identity(size, size) * ritz));
        let residual = h[(size, size - 1)].norm() * s[size - 1].norm() / s.norm();
        let mut next = CVec::zeros(dim);
        for (q, c) in basis.iter().zip(s.iter()) {
            next += q * *c;
        }
        if residual <= 1e-13 * theta {
            return theta.sqrt();
        }
        // the Perron vector is Hermitian up to phase
        let p = linalg::unvec(&next, n, n);
        let phase = p.trace();
        let p = if phase.norm() > 0.0 { p * (phase.conj() / phase.norm()) } else { p };
        start = linalg::vec_of(&linalg::hermitian_part(&p));
    }
    theta.sqrt()
}

/// Solves `P − Σ A_j P A_j* = Q0` (right) or `Q − Σ A_j* Q A_j = Q0` (left).
pub fn stein_solve(a: &[CMat], q0: &CMat, side: Side) -> Result<CMat> {
    let n = q0.nrows();
    if a.iter().any(|m| m.nrows() != n || m.ncols() != n) || q0.ncols() != n {
        return Err(Error::DimensionMismatch("Stein data must share one size".into()));
    }
    if n == 0 {
        return Ok(q0.clone());
    }
    let rho = spr(a, SprMethod::Matrized);
    if rho >= 1.0 - KNIFE_EDGE {
        return Err(Error::SpectralRadiusTooLarge { spr: rho });
    }
    let mut m = CMat::identity(n * n, n * n);
    for aj in a {
        match side {
            Side::Right => m -= linalg::kron(&linalg::conj(aj), aj),
            Side::Left => m -= linalg::kron(&aj.transpose(), &aj.adjoint()),
        }
    }
    let sol = m
        .lu()
        .solve(&linalg::vec_of(q0))
        .ok_or(Error::SpectralRadiusTooLarge { spr: rho })?;
    Ok(linalg::hermitian_part(&linalg::unvec(&sol, n, n)))
}

/// Fixed point `P ⪰ 0` of `ad` at the top eigenvalue, trace 1, with `spr`.
pub fn perron(a: &[CMat]) -> Option<(f64, CMat)> {
    let n = a.first()?.nrows();
    if n == 0 || n * n > DENSE_LIMIT * 4 {
        return None;
    }
    let rho = spr(a, SprMethod::Matrized);
    if rho == 0.0 {
        return None;
    }
    let m = cp_matrix(a);
    let lambda = rho * rho;
    let shifted = CMat::identity(n * n, n * n) * c64(lambda * (1.0 + 1e-10), 0.0) - &m;
    let lu = shifted.lu();
    let mut v = linalg::vec_of(&CMat::identity(n, n));
    for _ in 0..3 {
        let next = lu.solve(&v)?;
        let scale = next.norm();
        if !scale.is_finite() || scale == 0.0 {
            return None;
        }
        v = next / c64(scale, 0.0);
    }
    let mut p = linalg::unvec(&v, n, n);
    let tr = p.trace();
    if tr.norm() == 0.0 {
        return None;
    }
    p /= tr;
    p = linalg::hermitian_part(&p);
    let p = linalg::hermitian_fn(&p, |x| x.max(0.0));
    let tr = p.trace().re;
    if tr <= 0.0 {
        return None;
    }
    Some((rho, p / c64(tr, 0.0)))
}

#[derive(Clone, Debug)]
pub struct Similarity {
    pub s: CMat,
    pub w: Vec<CMat>,
    pub route: &'static str,
}

fn row_norm(a: &[CMat]) -> f64 {
    if a.is_empty() || a[0].nrows() == 0 {
        return 0.0;
    }
    linalg::spectral_norm(&linalg::hstack(a))
}

fn conjugate_by(a: &[CMat], s: &CMat) -> Option<Vec<CMat>> {
    let s_inv = s.clone().try_inverse()?;
    Some(a.iter().map(|m| &s_inv * m * s).collect())
}

/// Finds `S` with `W = S⁻¹AS` of row norm at most `spr(A) + margin`.
pub fn similarity_to_contraction(a: &[CMat], margin: f64) -> Result<Similarity> {
    if margin <= 0.0 || !margin.is_finite() {
        return Err(Error::InvalidInput("margin must be positive".into()));
    }
    let n = a.first().map_or(0, |m| m.nrows());
    let rho = spr(a, SprMethod::Matrized);
    if rho >= 1.0 - KNIFE_EDGE {
        return Err(Error::SpectralRadiusTooLarge { spr: rho });
    }
    let target = rho + margin;
    if row_norm(a) <= target {
        return Ok(Similarity { s: CMat::identity(n, n), w: a.to_vec(), route: "identity" });
    }
    if let Some((_, p)) = perron(a) {
        let (vals, _) = linalg::hermitian_eigen(&p);
        if vals[0] > 1e-9 * p.trace().re {
            let s = linalg::hermitian_fn(&p, f64::sqrt);
            if let Some(w) = conjugate_by(a, &s) {
                if row_norm(&w) <= target {
                    return Ok(Similarity { s, w, route: "perron" });
                }
            }
        }
    }
    let scaled: Vec<CMat> = a.iter().map(|m| m / c64(target, 0.0)).collect();
    let p = stein_solve(&scaled, &CMat::identity(n, n), Side::Right)?;
    let s = linalg::hermitian_fn(&p, |x| x.max(0.0).sqrt());
    let w = conjugate_by(a, &s)
        .ok_or_else(|| Error::CertificationFailed("Stein solution is singular".into()))?;
    if row_norm(&w) > target * (1.0 + 1e-9) {
        return Err(Error::CertificationFailed(format!(
            "row norm {} exceeds {}",
            row_norm(&w),
            target
        )));
    }
    Ok(Similarity { s, w, route: "stein" })
}

#[derive(Clone, Debug)]
pub struct BoundaryPoint {
    pub z: MatrixTuple,
    pub spr: f64,
    pub sigma_min: f64,
    pub row_norm: f64,
}

/// Point `Z` of row norm `1/spr(A)` at which the pencil `L_A(Z)` is singular.
pub fn boundary_singularity(r: &Realization, tol: f64) -> Result<BoundaryPoint> {
    let rho = spr(&r.a, SprMethod::Matrized);
    if rho == 0.0 {
        return Err(Error::JointlyNilpotent);
    }
    let n = r.n;
    let small = boundary_tuple(&r.a, rho, n)?;
    let mut z = MatrixTuple::zeros(r.d, n);
    for (full, part) in z.x.iter_mut().zip(&small) {
        full.view_mut((0, 0), part.shape()).copy_from(part);
    }
    let sigma_min = linalg::sigma_min(&r.pencil(&z)?);
    let rn = z.row_norm();
    if (rn - 1.0 / rho).abs() > tol.max(1e-6) * (1.0 / rho).max(1.0) {
        return Err(Error::CertificationFailed(format!(
            "row norm {rn} differs from 1/spr = {}",
            1.0 / rho
        )));
    }
    Ok(BoundaryPoint { z, spr: rho, sigma_min, row_norm: rn })
}

fn boundary_tuple(a: &[CMat], rho: f64, depth: usize) -> Result<Vec<CMat>> {
    let n = a[0].nrows();
    let (_, p) = perron(a).ok_or_else(|| Error::CertificationFailed("no Perron fixed point".into()))?;
    let (vals, vecs) = linalg::hermitian_eigen(&p);
    let tr = p.trace().re;
    if vals[0] > 1e-9 * tr {
        let half = linalg::hermitian_fn(&p, f64::sqrt);
        let half_inv = linalg::hermitian_fn(&p, |x| 1.0 / x.sqrt());
        let y: Vec<CMat> = a.iter().map(|m| &half_inv * m * &half / c64(rho, 0.0)).collect();
        let y = make_coisometry(&y);
        return Ok(y.iter().map(|m| linalg::conj(m) / c64(rho, 0.0)).collect());
    }
    if depth == 0 {
        return Err(Error::CertificationFailed("compression depth exhausted".into()));
    }
    // range(P) is invariant for every A_j; restrict and recurse
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > 1e-9 * tr).collect();
    if keep.is_empty() {
        return Err(Error::CertificationFailed("Perron fixed point vanished".into()));
    }
    let v = CMat::from_fn(n, keep.len(), |i, k| vecs[(i, keep[k])]);
    let restricted: Vec<CMat> = a.iter().map(|m| v.adjoint() * m * &v).collect();
    boundary_tuple(&restricted, rho, depth - 1)
}

/// Rescales the block row so that `Σ Y_j Y_j* = I` exactly.
fn make_coisometry(y: &[CMat]) -> Vec<CMat> {
    let g = ad(y, &CMat::identity(y[0].nrows(), y[0].nrows()));
    let g_inv_half = linalg::hermitian_fn(&g, |x| 1.0 / x.sqrt());
    y.iter().map(|m| &g_inv_half * m).collect()
}
