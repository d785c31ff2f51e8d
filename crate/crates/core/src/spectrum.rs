//! Spectra of rational multipliers: resolvent tests, plane scans, finite-level
//! eigenvalue sampling, singularity witnesses and a continuity probe.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, CVec, C64};
use crate::ncexpr::{NCPolynomial, NCWord};
use crate::realization::{Realization, DEFAULT_TOL};
use crate::spectral::{self, BoundaryPoint, SprMethod, KNIFE_EDGE};
use crate::tuple::MatrixTuple;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Resolvent,
    Sigma0,
    SigmaPm,
    Indeterminate,
}

impl Tag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::Resolvent => "resolvent",
            Tag::Sigma0 => "sigma_0",
            Tag::SigmaPm => "sigma_pm",
            Tag::Indeterminate => "indeterminate",
        }
    }

    pub fn is_member(&self) -> bool {
        !matches!(self, Tag::Resolvent)
    }
}

#[derive(Clone, Debug)]
pub struct PointTest {
    pub in_spectrum: bool,
    /// `spr` of the minimal realization of `(r − λ)⁻¹`; absent when `r(0) = λ`.
    pub spr_resolvent: Option<f64>,
    pub near_boundary: bool,
    pub witness: Option<BoundaryPoint>,
}

fn require_multiplier(r: &Realization) -> Result<()> {
    let rho = if r.n == 0 { 0.0 } else { spectral::spr(&r.a, SprMethod::Matrized) };
    if rho >= 1.0 - KNIFE_EDGE {
        return Err(Error::NotBoundedMultiplier { spr: rho });
    }
    Ok(())
}

fn resolvent_realization(r: &Realization, lambda: C64) -> Result<Option<Realization>> {
    let shifted = r.add(&Realization::scalar(r.d, -lambda))?;
    let scale = 1.0_f64.max(shifted.b.norm() * shifted.c.norm());
    if shifted.value_at_zero().norm() <= 1e-12 * scale {
        return Ok(None);
    }
    Ok(Some(shifted.invert()?.minimize(DEFAULT_TOL)))
}

fn test_point(r: &Realization, lambda: C64, with_witness: bool) -> Result<PointTest> {
    let Some(inv) = resolvent_realization(r, lambda)? else {
        return Ok(PointTest { in_spectrum: true, spr_resolvent: None, near_boundary: false, witness: None });
    };
    let rho = if inv.n == 0 { 0.0 } else { spectral::spr(&inv.a, SprMethod::Matrized) };
    let in_spectrum = rho >= 1.0 - KNIFE_EDGE;
    let witness = if in_spectrum && with_witness {
        spectral::boundary_singularity(&inv, 1e-8).ok()
    } else {
        None
    };
    Ok(PointTest {
        in_spectrum,
        spr_resolvent: Some(rho),
        near_boundary: (rho - 1.0).abs() < KNIFE_EDGE,
        witness,
    })
}

/// Decides whether `λ` lies in the spectrum of the multiplier `r(L)`.
pub fn contains_lambda(r: &Realization, lambda: C64) -> Result<PointTest> {
    require_multiplier(r)?;
    test_point(r, lambda, true)
}

/// Tags a point: `sigma_0` when `λ − r` is outer, `sigma_pm` otherwise.
pub fn classify_point(r: &Realization, lambda: C64) -> Result<Tag> {
    require_multiplier(r)?;
    Ok(tag_of(&test_point(r, lambda, false)?))
}

fn tag_of(t: &PointTest) -> Tag {
    if t.near_boundary {
        return Tag::Indeterminate;
    }
    if !t.in_spectrum {
        return Tag::Resolvent;
    }
    // outerness of r − λ is spr of the same inverse realization being ≤ 1
    match t.spr_resolvent {
        Some(rho) if rho <= 1.0 + KNIFE_EDGE => Tag::Sigma0,
        _ => Tag::SigmaPm,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        if !(xmin < xmax && ymin < ymax) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("rectangle needs xmin < xmax and ymin < ymax".into()));
        }
        Ok(Rect { xmin, xmax, ymin, ymax })
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub center: C64,
    pub tag: Tag,
}

#[derive(Clone, Debug)]
pub struct SpectrumScan {
    pub rect: Rect,
    pub resolution: f64,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, first row at the top (`ymax`).
    pub cells: Vec<Cell>,
}

impl SpectrumScan {
    pub fn members(&self) -> Vec<C64> {
        self.cells.iter().filter(|c| c.tag.is_member()).map(|c| c.center).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,member,class\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt15(c.center.re),
                fmt15(c.center.im),
                u8::from(c.tag.is_member()),
                c.tag.as_str()
            );
        }
        out
    }

    /// Binary 8-bit PGM: spectrum 0, resolvent 255, indeterminate 128.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        out.extend(self.cells.iter().map(|c| match c.tag {
            Tag::Resolvent => 255u8,
            Tag::Indeterminate => 128,
            Tag::Sigma0 | Tag::SigmaPm => 0,
        }));
        out
    }
}

/// Rounds to 15 significant digits for text output.
pub fn fmt15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let v: f64 = format!("{x:.14e}").parse().unwrap_or(x);
    format!("{v}")
}

/// Constant value if `r` has no nonconstant Taylor terms.
fn constant_value(r: &Realization) -> Option<C64> {
    let table = r.taylor_table(r.n.max(1));
    let scale = table.norm2().max(1e-300);
    if table.iter().all(|(w, c)| w.is_empty() || c.norm() <= 1e-13 * scale) {
        Some(r.value_at_zero())
    } else {
        None
    }
}

/// Tags every cell center of the grid; `jobs = 0` uses the global thread pool.
pub fn grid_scan(r: &Realization, rect: Rect, resolution: f64) -> Result<SpectrumScan> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    let r = r.minimize(DEFAULT_TOL);
    require_multiplier(&r)?;
    let nx = ((rect.xmax - rect.xmin) / resolution).round().max(1.0) as usize;
    let ny = ((rect.ymax - rect.ymin) / resolution).round().max(1.0) as usize;
    let constant = constant_value(&r);
    let cells: Vec<Cell> = (0..nx * ny)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / nx, idx % nx);
            let center = c64(
                rect.xmin + (col as f64 + 0.5) * resolution,
                rect.ymax - (row as f64 + 0.5) * resolution,
            );
            let tag = match constant {
                Some(mu) => {
                    let dx = (mu.re - center.re).abs();
                    let dy = (mu.im - center.im).abs();
                    if dx <= resolution / 2.0 && dy <= resolution / 2.0 {
                        Tag::SigmaPm
                    } else {
                        Tag::Resolvent
                    }
                }
                None => match test_point(&r, center, false) {
                    Ok(t) => tag_of(&t),
                    Err(_) => Tag::Indeterminate,
                },
            };
            Cell { center, tag }
        })
        .collect();
    Ok(SpectrumScan { rect, resolution, nx, ny, cells })
}

#[derive(Clone, Copy, Debug)]
pub struct Sample {
    pub level: usize,
    pub value: C64,
}

pub fn samples_to_csv(samples: &[Sample]) -> String {
    let mut out = String::from("level,re,im\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", s.level, fmt15(s.value.re), fmt15(s.value.im));
    }
    out
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) / c64(2f64.sqrt(), 0.0)
    })
}

fn split_row(block: &CMat, d: usize, n: usize) -> MatrixTuple {
    MatrixTuple {
        d,
        n,
        x: (0..d).map(|j| block.columns(j * n, n).into_owned()).collect(),
    }
}

/// Random point of the closed row ball at level `n`; `mode` cycles between
/// exact boundary co-isometries and two interior radius laws.
pub fn random_ball_point(rng: &mut ChaCha8Rng, d: usize, n: usize, mode: usize) -> MatrixTuple {
    let g = gaussian_matrix(rng, n, n * d);
    match mode % 3 {
        0 => {
            let gg = &g * g.adjoint();
            let w = linalg::hermitian_fn(&gg, |x| 1.0 / x.max(1e-300).sqrt());
            split_row(&(w * g), d, n)
        }
        m => {
            let u: f64 = rng.random_range(0.0..1.0);
            let dim = (2 * n * n * d) as f64;
            let radius = if m == 1 { u.powf(1.0 / dim) } else { u.sqrt() };
            let norm = linalg::spectral_norm(&g).max(1e-300);
            split_row(&(g * c64(radius / norm, 0.0)), d, n)
        }
    }
}

/// Eigenvalues of `r(Z)` for random `Z` in the closed ball at levels `1..=level_max`.
pub fn finite_spectrum_sample(r: &Realization, level_max: usize, samples: usize, seed: u64) -> Result<Vec<Sample>> {
    require_multiplier(r)?;
    let per_level: Vec<Vec<Sample>> = (1..=level_max)
        .into_par_iter()
        .map(|level| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (level as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut out = Vec::with_capacity(samples * level);
            for k in 0..samples {
                let z = random_ball_point(&mut rng, r.d, level, k);
                if let Ok(v) = r.evaluate(&z) {
                    out.extend(linalg::eigenvalues(&v).into_iter().map(|value| Sample { level, value }));
                }
            }
            out
        })
        .collect();
    Ok(per_level.into_iter().flatten().collect())
}

#[derive(Clone, Debug)]
pub struct VarietyWitness {
    pub z: MatrixTuple,
    pub y: CVec,
    pub residual: f64,
    pub level: usize,
}

/// `‖y* r(Z)‖ / ‖y‖`.
pub fn certify_witness(r: &Realization, z: &MatrixTuple, y: &CVec) -> Result<f64> {
    let v = r.evaluate(z)?;
    let ny = y.norm();
    if ny == 0.0 {
        return Err(Error::InvalidInput("witness vector is zero".into()));
    }
    Ok((y.adjoint() * v).norm() / ny)
}

struct Objective {
    sigma: f64,
    u: CVec,
    grad: Vec<CMat>,
}

fn objective(r: &Realization, z: &MatrixTuple) -> Option<Objective> {
    let n = z.n;
    let l = r.pencil(z).ok()?;
    if linalg::rcond(&l) < 1e-14 {
        return None;
    }
    let lu = l.clone().lu();
    let id = CMat::identity(n, n);
    let cm = linalg::kron(&CMat::from_column_slice(r.n, 1, r.c.as_slice()), &id);
    let bh = linalg::kron(&CMat::from_row_slice(1, r.n, r.b.adjoint().as_slice()), &id);
    let right = lu.solve(&cm)?;
    let f = &bh * &right;
    let (sigma, u, v) = linalg::min_left_singular(&f);
    // g = u*(b*⊗I)L⁻¹ as a column of conjugates, h = L⁻¹(c⊗I)v
    let g = l.adjoint().lu().solve(&(bh.adjoint() * &u))?.adjoint();
    let h = &right * &v;
    let grad = r
        .a
        .iter()
        .map(|aj| {
            let mut m = CMat::zeros(n, n);
            for p in 0..r.n {
                for q in 0..r.n {
                    let coef = aj[(p, q)];
                    if coef == linalg::ZERO {
                        continue;
                    }
                    let hq = h.rows(q * n, n);
                    let gp = g.columns(p * n, n);
                    m += (hq * gp) * coef;
                }
            }
            m.adjoint()
        })
        .collect();
    Some(Objective { sigma, u, grad })
}

/// Negative gradient, with the outward normal removed on the unit sphere.
fn descent_direction(z: &MatrixTuple, grad: &[CMat]) -> Vec<CMat> {
    let mut dir: Vec<CMat> = grad.iter().map(|g| -g).collect();
    if z.row_norm() < 1.0 - 1e-12 {
        return dir;
    }
    let block = z.row_block();
    let (_, vecs) = linalg::hermitian_eigen(&(&block * block.adjoint()));
    let e = vecs.column(z.n - 1).into_owned();
    let proj = &e * e.adjoint();
    let normal: Vec<CMat> = z.x.iter().map(|x| &proj * x).collect();
    let nn: f64 = normal.iter().map(|m| m.norm_squared()).sum();
    let out: f64 = normal.iter().zip(&dir).map(|(m, v)| m.dotc(v).re).sum();
    if nn > 0.0 && out > 0.0 {
        for (v, m) in dir.iter_mut().zip(&normal) {
            *v -= m * c64(out / nn, 0.0);
        }
    }
    dir
}

fn project(z: &MatrixTuple) -> MatrixTuple {
    let rn = z.row_norm();
    if rn > 1.0 {
        z.scale(c64(1.0 / rn, 0.0))
    } else {
        z.clone()
    }
}

/// Projected descent on `σ_min(r(Z))` over the closed ball at one level.
pub fn variety_witness_search(
    r: &Realization,
    level: usize,
    attempts: usize,
    seed: u64,
) -> Result<Option<VarietyWitness>> {
    if level == 0 {
        return Err(Error::InvalidInput("level must be at least 1".into()));
    }
    let results: Vec<Option<VarietyWitness>> = (0..attempts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
            let z0 = random_ball_point(&mut rng, r.d, level, k + 1);
            descend(r, z0)
        })
        .collect();
    let best = results
        .into_iter()
        .flatten()
        .min_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap_or(std::cmp::Ordering::Equal));
    Ok(best.filter(|w| w.residual <= 1e-8))
}

fn descend(r: &Realization, z0: MatrixTuple) -> Option<VarietyWitness> {
    let mut z = z0;
    let mut obj = objective(r, &z)?;
    for _ in 0..50 {
        if obj.sigma <= 1e-14 {
            break;
        }
        let dir = descent_direction(&z, &obj.grad);
        let slope: f64 = obj.grad.iter().zip(&dir).map(|(g, v)| g.dotc(v).re).sum();
        if slope >= 0.0 {
            break;
        }
        let mut t = obj.sigma / -slope;
        let mut improved = false;
        for _ in 0..30 {
            let trial = MatrixTuple {
                d: z.d,
                n: z.n,
                x: z.x.iter().zip(&dir).map(|(x, v)| x + v * c64(t, 0.0)).collect(),
            };
            let trial = project(&trial);
            if let Some(o) = objective(r, &trial) {
                if o.sigma < obj.sigma {
                    z = trial;
                    obj = o;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let residual = certify_witness(r, &z, &obj.u).ok()?;
    Some(VarietyWitness { level: z.n, z, y: obj.u, residual })
}

#[derive(Clone, Debug)]
pub struct ProbeRow {
    pub epsilon: f64,
    pub hausdorff: f64,
}

/// Hausdorff distance between finite point sets; both empty gives 0, one empty ∞.
pub fn hausdorff(a: &[C64], b: &[C64]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let directed = |x: &[C64], y: &[C64]| {
        x.par_iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .reduce(|| 0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Perturbs Taylor coefficients up to degree 3 by noise of modulus at most ε
/// and reports how far the scanned spectrum moves.
pub fn continuity_probe(
    r: &Realization,
    scales: &[f64],
    rect: Rect,
    resolution: f64,
    seed: u64,
) -> Result<Vec<ProbeRow>> {
    let base = grid_scan(r, rect, resolution)?.members();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = NCWord::all_up_to(r.d, 3);
    let mut rows = Vec::with_capacity(scales.len());
    for &eps in scales {
        let mut noise = NCPolynomial::zero(r.d);
        for w in &words {
            let rad: f64 = eps * rng.random_range(0.0f64..1.0).sqrt();
            let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            noise.set(w.clone(), C64::from_polar(rad, ang));
        }
        let perturbed = r.add(&Realization::from_polynomial(&noise))?.minimize(DEFAULT_TOL);
        let scan = grid_scan(&perturbed, rect, resolution)?;
        rows.push(ProbeRow { epsilon: eps, hausdorff: hausdorff(&base, &scan.members()) });
    }
    Ok(rows)
}
