//! Dense complex linear-algebra helpers shared by the analysis modules.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let sv = m.clone().svd(false, false).singular_values;
    let mut out: Vec<f64> = sv.iter().copied().collect();
    out.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    out
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a square matrix (0 for the empty matrix).
pub fn sigma_min(m: &CMat) -> f64 {
    let sv = singular_values(m);
    if sv.len() < m.nrows().max(m.ncols()) {
        return 0.0;
    }
    sv.last().copied().unwrap_or(0.0)
}

/// Reciprocal 2-norm condition number, `sigma_min / sigma_max`.
pub fn rcond(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = singular_values(m);
    let max = sv.first().copied().unwrap_or(0.0);
    if max == 0.0 || !max.is_finite() {
        return 0.0;
    }
    sv.last().copied().unwrap_or(0.0) / max
}

/// Eigenvalues via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    match n {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        2 => {
            let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
            let half_diff = (m[(0, 0)] - m[(1, 1)]) * 0.5;
            let disc = (half_diff * half_diff + m[(0, 1)] * m[(1, 0)]).sqrt();
            vec![half_tr + disc, half_tr - disc]
        }
        _ => {
            let schur = Schur::try_new(m.clone(), f64::EPSILON, 1000 * n)
                .unwrap_or_else(|| Schur::new(m.clone()));
            let (_, t) = schur.unpack();
            (0..n).map(|i| t[(i, i)]).collect()
        }
    }
}

pub fn spectral_radius(m: &CMat) -> f64 {
    eigenvalues(m).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (vals, vecs)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let d = CMat::from_diagonal(&DVector::from_fn(n, |i, _| c64(f(vals[i]), 0.0)));
    &vecs * d * vecs.adjoint()
}

/// Orthonormal basis of the column space, keeping singular directions
/// above `cutoff` (absolute).
pub fn orthonormal_range(m: &CMat, cutoff: f64) -> CMat {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return CMat::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    let mut sorted = keep;
    sorted.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    CMat::from_fn(rows, sorted.len(), |r, k| u[(r, sorted[k])])
}

/// Right singular vector belonging to the smallest singular value.
pub fn null_vector(m: &CMat) -> CVec {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (imin, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    if svd.singular_values.len() < n {
        // wide matrix: the kernel is not covered by v_t rows
        let full = {
            let mut sq = m.clone();
            sq = sq.resize_vertically(n, ZERO);
            sq
        };
        return null_vector(&full);
    }
    v_t.row(imin).adjoint()
}

/// Left singular vector for the smallest singular value, together with that value.
pub fn min_left_singular(m: &CMat) -> (f64, CVec, CVec) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    (smin, u.column(imin).into_owned(), v_t.row(imin).adjoint())
}

pub fn hstack(blocks: &[CMat]) -> CMat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        out.view_mut((0, offset), (rows, b.ncols())).copy_from(b);
        offset += b.ncols();
    }
    out
}

pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Column-stacking vectorization.
pub fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVec, rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v.as_slice())
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}
