//! Fock-space semantics of realizations: Szegő kernel vectors, the
//! reproducing property, H² norms, membership, conjugation and truncated
//! Toeplitz matrices of left multipliers.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ZERO};
use crate::ncexpr::{NCPolynomial, NCWord};
use crate::realization::Realization;
use crate::spectral::{self, BoundaryPoint, Side, SprMethod, KNIFE_EDGE};
use crate::tuple::MatrixTuple;

/// The Fock-space element with coefficients `⟨Z^α v, y⟩ = conj(y* Z^α v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelVector {
    pub z: MatrixTuple,
    pub y: CVec,
    pub v: CVec,
}

impl KernelVector {
    pub fn new(z: MatrixTuple, y: CVec, v: CVec) -> Result<Self> {
        if y.len() != z.n || v.len() != z.n {
            return Err(Error::DimensionMismatch(format!("kernel vectors must have length {}", z.n)));
        }
        Ok(KernelVector { z, y, v })
    }

    pub fn coefficient(&self, w: &NCWord) -> C64 {
        let mut u = self.v.clone();
        for &j in w.letters().iter().rev() {
            u = &self.z.x[j - 1] * u;
        }
        self.y.dotc(&u).conj()
    }
}

pub fn kernel_to_realization(k: &KernelVector) -> Realization {
    Realization {
        d: k.z.d,
        n: k.z.n,
        a: k.z.conj().x,
        b: k.y.map(|c| c.conj()),
        c: k.v.map(|c| c.conj()),
    }
}

pub fn kernel_coefficients(k: &KernelVector, max_len: usize) -> NCPolynomial {
    kernel_to_realization(k).taylor_table(max_len)
}

/// Writes `r` as a kernel `K{W, x, u}` with `W` a strict row contraction.
pub fn kernel_from_realization(r: &Realization) -> Result<KernelVector> {
    let rho = spectral::spr(&r.a, SprMethod::Matrized);
    if rho >= 1.0 - KNIFE_EDGE {
        return Err(Error::NotInFock { spr: rho });
    }
    let abar: Vec<CMat> = r.a.iter().map(linalg::conj).collect();
    let sim = spectral::similarity_to_contraction(&abar, (1.0 - rho) / 2.0)?;
    let s_inv = sim
        .s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::CertificationFailed("similarity is singular".into()))?;
    let bbar = r.b.map(|c| c.conj());
    let cbar = r.c.map(|c| c.conj());
    let z = MatrixTuple { d: r.d, n: r.n, x: sim.w };
    KernelVector::new(z, sim.s.adjoint() * bbar, s_inv * cbar)
}

/// H² norm `sqrt(b* P b)` with `P − Σ A_j P A_j* = cc*`.
pub fn h2_norm(r: &Realization) -> Result<f64> {
    if r.n == 0 {
        return Ok(0.0);
    }
    let rho = spectral::spr(&r.a, SprMethod::Matrized);
    if rho >= 1.0 - KNIFE_EDGE {
        return Err(Error::NotInFock { spr: rho });
    }
    let p = spectral::stein_solve(&r.a, &(&r.c * r.c.adjoint()), Side::Right)?;
    Ok(r.b.dotc(&(p * &r.b)).re.max(0.0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// In H², bounded multiplier and in the disk algebra.
    InH2,
    NotInH2,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::InH2 => "in_H2",
            Verdict::NotInH2 => "not_in_H2",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Membership {
    pub verdict: Verdict,
    pub spr: f64,
    /// Lower bound for the radius of analyticity; `None` means unbounded.
    pub radius: Option<f64>,
    /// Set when `spr` lies within the knife-edge band around 1.
    pub near_boundary: bool,
    pub witness: Option<BoundaryPoint>,
}

/// Membership test for a minimal realization.
pub fn is_in_fock(r: &Realization) -> Membership {
    let rho = if r.n == 0 { 0.0 } else { spectral::spr(&r.a, SprMethod::Matrized) };
    let radius = if rho > 0.0 { Some(1.0 / rho) } else { None };
    let near_boundary = (rho - 1.0).abs() < KNIFE_EDGE;
    if rho < 1.0 - KNIFE_EDGE {
        return Membership { verdict: Verdict::InH2, spr: rho, radius, near_boundary, witness: None };
    }
    let witness = spectral::boundary_singularity(r, 1e-8).ok();
    Membership { verdict: Verdict::NotInH2, spr: rho, radius, near_boundary, witness }
}

#[derive(Clone, Copy, Debug)]
pub struct Reproduced {
    /// `Σ conj(K_α) f_α`.
    pub inner_product: C64,
    /// `y* f(Z) v`.
    pub point_value: C64,
}

impl Reproduced {
    pub fn discrepancy(&self) -> f64 {
        (self.inner_product - self.point_value).norm()
    }
}

pub fn reproduce(k: &KernelVector, f: &NCPolynomial) -> Result<Reproduced> {
    if f.d > k.z.d && f.support().any(|w| w.max_letter() > k.z.d) {
        return Err(Error::DimensionMismatch(format!(
            "polynomial uses more than {} variables",
            k.z.d
        )));
    }
    let mut inner_product = ZERO;
    let mut fz_v = CVec::zeros(k.z.n);
    for (w, c) in f.iter() {
        inner_product += k.coefficient(w).conj() * c;
        let mut u = k.v.clone();
        for &j in w.letters().iter().rev() {
            u = &k.z.x[j - 1] * u;
        }
        fz_v += u * *c;
    }
    Ok(Reproduced { inner_product, point_value: k.y.dotc(&fz_v) })
}

pub fn conjugate_series(f: &NCPolynomial) -> NCPolynomial {
    f.conj()
}

/// Left multiplication by `f` compressed to monomials of length at most `k`.
#[derive(Clone, Debug)]
pub struct ToeplitzTruncation {
    pub d: usize,
    pub k: usize,
    pub basis: Vec<NCWord>,
    pub matrix: CMat,
}

impl ToeplitzTruncation {
    pub fn gram(&self) -> CMat {
        self.matrix.adjoint() * &self.matrix
    }
}

pub fn toeplitz(f: &NCPolynomial, k: usize) -> ToeplitzTruncation {
    let d = f.d.max(1);
    let basis = NCWord::all_up_to(d, k);
    let index = |w: &NCWord| basis.binary_search(w).ok();
    let size = basis.len();
    let mut matrix = CMat::zeros(size, size);
    for (col, beta) in basis.iter().enumerate() {
        for (alpha, c) in f.iter() {
            if let Some(row) = index(&alpha.concat(beta)) {
                matrix[(row, col)] += c;
            }
        }
    }
    ToeplitzTruncation { d, k, basis, matrix }
}
