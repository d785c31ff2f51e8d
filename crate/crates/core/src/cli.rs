//! Command-line front end. Every analysis runs on the minimal realization of
//! its input; numbers are printed with 15 significant digits.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factorization::{self, FactorOptions};
use crate::fock;
use crate::linalg::CVec;
use crate::ncexpr::{self, NCPolynomial};
use crate::realization::{Realization, DEFAULT_TOL};
use crate::spectral::{self, BoundaryPoint, SprMethod};
use crate::spectrum::{self, fmt15, Rect};
use crate::tuple::{self, MatrixTuple, TupleJson};

#[derive(Parser, Debug)]
#[command(name = "ncrational", version, about = "Noncommutative rational functions in the Fock space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Expression in z1..zd, e.g. "inv(1 - 0.5*z1*z2)"; put `--` before one starting with '-'.
    pub expression: Option<String>,
    /// Number of variables; inferred from the expression when omitted.
    #[arg(short = 'd', long = "vars")]
    pub d: Option<usize>,
    /// Realization JSON file used instead of an expression.
    #[arg(long, conflicts_with = "expression")]
    pub realization: Option<PathBuf>,
    /// Seed for randomized procedures.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Args, Debug, Clone)]
pub struct Grid {
    /// Rectangle xmin,xmax,ymin,ymax.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rect, default_value = "-1.5,1.5,-1.5,1.5")]
    pub rect: Rect,
    /// Cell side length.
    #[arg(long, default_value_t = 0.05)]
    pub res: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum MethodArg {
    Matrized,
    Iterate,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Echo the parsed expression.
    Parse(Input),
    /// Print a realization as JSON.
    Realize {
        #[command(flatten)]
        input: Input,
        /// Reduce to a minimal realization first.
        #[arg(long)]
        minimize: bool,
    },
    /// Evaluate at a matrix tuple given as JSON {"d","n","X"}.
    Eval {
        #[command(flatten)]
        input: Input,
        /// JSON file holding the matrix tuple.
        #[arg(long)]
        point: PathBuf,
    },
    /// Joint spectral radius of the minimal realization.
    Spr {
        #[command(flatten)]
        input: Input,
        /// Dense eigensolve of the matrization, or Arnoldi on the completely positive map.
        #[arg(long, value_enum, default_value = "matrized")]
        method: MethodArg,
    },
    /// Fock-space norm.
    Norm(Input),
    /// Membership in the Fock space with certificate.
    Member(Input),
    /// Szegő kernel datum representing the function.
    Kernel {
        #[command(flatten)]
        input: Input,
        /// Coefficient table length.
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
    /// Outer spectral factor of a polynomial.
    Factor {
        #[command(flatten)]
        input: Input,
        /// Random restarts besides the finite-section warm start.
        #[arg(long, default_value_t = 8)]
        starts: usize,
    },
    /// Certificate that a rational multiplier is outer.
    OuterTest(Input),
    /// Gram test for an isometric multiplier.
    InnerTest {
        #[command(flatten)]
        input: Input,
        /// Allowed norm and orthogonality defect.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Row-ball boundary point where the pencil is singular.
    BoundarySing(Input),
    /// Tag each grid cell as resolvent or spectrum; counts to stdout.
    SpectrumScan {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: Grid,
        /// Write per-cell tags as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the membership mask as a binary PGM.
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// Eigenvalues of r(Z) at random ball points; CSV to stdout unless --csv.
    SpectrumSample {
        #[command(flatten)]
        input: Input,
        /// Highest level; defaults to the minimal size plus 2.
        #[arg(long)]
        levels: Option<usize>,
        /// Draws per level.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Write samples here and print a summary instead.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Search the closed ball at one level for Z with r(Z) singular.
    VarietySearch {
        #[command(flatten)]
        input: Input,
        /// Matrix size of the search.
        #[arg(long)]
        level: usize,
        /// Independent descents.
        #[arg(long, default_value_t = 16)]
        attempts: usize,
    },
    /// Hausdorff movement of the scanned spectrum under coefficient noise.
    ContinuityProbe {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: Grid,
        /// Noise moduli.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
        eps: Vec<f64>,
    },
}

fn parse_rect(s: &str) -> std::result::Result<Rect, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != 4 {
        return Err("expected xmin,xmax,ymin,ymax".into());
    }
    Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

impl Command {
    pub fn input(&self) -> &Input {
        match self {
            Command::Parse(i)
            | Command::Norm(i)
            | Command::Member(i)
            | Command::OuterTest(i)
            | Command::BoundarySing(i) => i,
            Command::Realize { input, .. }
            | Command::Eval { input, .. }
            | Command::Spr { input, .. }
            | Command::Kernel { input, .. }
            | Command::Factor { input, .. }
            | Command::InnerTest { input, .. }
            | Command::SpectrumScan { input, .. }
            | Command::SpectrumSample { input, .. }
            | Command::VarietySearch { input, .. }
            | Command::ContinuityProbe { input, .. } => input,
        }
    }
}

impl Input {
    fn expression(&self) -> Result<(ncexpr::Ast, usize)> {
        let text = self
            .expression
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("an expression or --realization is required".into()))?;
        let probe = self.d.unwrap_or(usize::MAX / 2);
        let ast = ncexpr::parse(text, probe)?;
        let d = self.d.unwrap_or_else(|| ast.max_variable().max(1));
        Ok((ast, d))
    }

    /// The realization as given (not minimized).
    pub fn raw_realization(&self) -> Result<Realization> {
        match &self.realization {
            Some(path) => {
                let r = Realization::from_json_str(&std::fs::read_to_string(path)?)?;
                if let Some(d) = self.d {
                    if d != r.d {
                        return Err(Error::DimensionMismatch(format!("-d {d} but the file has d = {}", r.d)));
                    }
                }
                Ok(r)
            }
            None => {
                let (ast, d) = self.expression()?;
                Realization::from_ast(&ast, d)
            }
        }
    }

    pub fn minimal(&self) -> Result<Realization> {
        Ok(self.raw_realization()?.minimize(DEFAULT_TOL))
    }

    fn polynomial(&self) -> Result<NCPolynomial> {
        if self.realization.is_none() {
            let (ast, d) = self.expression()?;
            return ncexpr::as_polynomial(&ast, d);
        }
        let r = self.minimal()?;
        if !spectral::is_jointly_nilpotent(&r.a) {
            return Err(Error::NotAPolynomial);
        }
        let table = r.taylor_table(r.n);
        let scale = table.norm2().max(1.0);
        Ok(table.chop(1e-13 * scale))
    }
}

fn vec_json(v: &CVec) -> Value {
    json!(v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())
}

fn tuple_json(z: &MatrixTuple) -> Value {
    serde_json::to_value(z.to_json()).expect("tuple serializes")
}

fn boundary_json(w: &BoundaryPoint) -> Value {
    json!({ "Z": tuple_json(&w.z), "spr": w.spr, "sigma_min": w.sigma_min, "row_norm": w.row_norm })
}

/// Rounds every float in a JSON value to 15 significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r: f64 = fmt15(x).parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn print_json(v: Value) -> String {
    let mut s = serde_json::to_string(&round_json(v)).expect("json serializes");
    s.push('\n');
    s
}

pub fn error_json(e: &Error) -> String {
    json!({ "error": { "code": e.code(), "message": e.to_string() } }).to_string()
}

/// Runs one subcommand and returns its standard output.
pub fn run(command: &Command) -> Result<String> {
    match command {
        Command::Parse(input) => {
            let (ast, d) = input.expression()?;
            let mut out = json!({ "d": d, "expression": ncexpr::format(&ast) });
            if let Ok(p) = ncexpr::as_polynomial(&ast, d) {
                out["coefficients"] = serde_json::to_value(p.to_coefficient_json())?;
            }
            Ok(print_json(out))
        }
        Command::Realize { input, minimize } => {
            let r = input.raw_realization()?;
            let r = if *minimize { r.minimize(DEFAULT_TOL) } else { r };
            // realizations keep full precision so that they round-trip exactly
            let mut s = r.to_json_string();
            s.push('\n');
            Ok(s)
        }
        Command::Eval { input, point } => {
            let r = input.minimal()?;
            let tj: TupleJson = serde_json::from_str(&std::fs::read_to_string(point)?)?;
            let z = MatrixTuple::from_json(&tj)?;
            let v = r.evaluate(&z)?;
            Ok(print_json(json!({ "value": tuple::matrix_to_json(&v) })))
        }
        Command::Spr { input, method } => {
            let r = input.minimal()?;
            let (m, name) = match method {
                MethodArg::Matrized => (SprMethod::Matrized, "matrized"),
                MethodArg::Iterate => (SprMethod::Iterate, "iterate"),
            };
            let rho = if r.n == 0 { 0.0 } else { spectral::spr(&r.a, m) };
            Ok(print_json(json!({ "spr": rho, "method": name, "n": r.n })))
        }
        Command::Norm(input) => {
            let r = input.minimal()?;
            Ok(print_json(json!({ "h2_norm": fock::h2_norm(&r)? })))
        }
        Command::Member(input) => {
            let r = input.minimal()?;
            let m = fock::is_in_fock(&r);
            Ok(print_json(json!({
                "verdict": m.verdict.as_str(),
                "spr": m.spr,
                "radius": m.radius,
                "near_boundary": m.near_boundary,
                "witness": m.witness.as_ref().map(boundary_json),
            })))
        }
        Command::Kernel { input, max_len } => {
            let r = input.minimal()?;
            let k = fock::kernel_from_realization(&r)?;
            let table = fock::kernel_coefficients(&k, *max_len);
            Ok(print_json(json!({
                "Z": tuple_json(&k.z),
                "y": vec_json(&k.y),
                "v": vec_json(&k.v),
                "coefficients": serde_json::to_value(table.chop(1e-14).to_coefficient_json())?,
            })))
        }
        Command::Factor { input, starts } => {
            let p = input.polynomial()?;
            let opts = FactorOptions { seed: input.seed, random_starts: *starts, ..FactorOptions::default() };
            let f = factorization::outer_factor(&p, &opts)?;
            let q0 = f.constant_term;
            Ok(print_json(json!({
                "outer": serde_json::to_value(f.outer.to_coefficient_json())?,
                "constant_term": q0,
                "constant_term_squared": q0 * q0,
                "residual": f.residual,
                "start": f.start,
                "section_estimate": f.section_estimate,
                "outer_test": outer_json(&f.outer_test),
                "inner_test": inner_json(&f.inner_test),
                "inner": serde_json::to_value(f.inner.to_json())?,
            })))
        }
        Command::OuterTest(input) => {
            let r = input.minimal()?;
            Ok(print_json(outer_json(&factorization::is_outer_rational(&r))))
        }
        Command::InnerTest { input, tol } => {
            let r = input.minimal()?;
            Ok(print_json(inner_json(&factorization::is_inner(&r, *tol)?)))
        }
        Command::BoundarySing(input) => {
            let r = input.minimal()?;
            Ok(print_json(boundary_json(&spectral::boundary_singularity(&r, 1e-8)?)))
        }
        Command::SpectrumScan { input, grid, csv, pgm } => {
            let r = input.minimal()?;
            let scan = spectrum::grid_scan(&r, grid.rect, grid.res)?;
            if let Some(path) = csv {
                std::fs::write(path, scan.to_csv())?;
            }
            if let Some(path) = pgm {
                std::fs::write(path, scan.to_pgm())?;
            }
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for c in &scan.cells {
                *counts.entry(c.tag.as_str()).or_default() += 1;
            }
            let rc = grid.rect;
            Ok(print_json(json!({
                "nx": scan.nx,
                "ny": scan.ny,
                "rect": [rc.xmin, rc.xmax, rc.ymin, rc.ymax],
                "resolution": scan.resolution,
                "counts": counts,
            })))
        }
        Command::SpectrumSample { input, levels, samples, csv } => {
            let r = input.minimal()?;
            let level_max = levels.unwrap_or(r.n + 2);
            let s = spectrum::finite_spectrum_sample(&r, level_max, *samples, input.seed)?;
            let text = spectrum::samples_to_csv(&s);
            match csv {
                Some(path) => {
                    std::fs::write(path, text)?;
                    Ok(print_json(json!({ "levels": level_max, "count": s.len() })))
                }
                None => Ok(text),
            }
        }
        Command::VarietySearch { input, level, attempts } => {
            let r = input.minimal()?;
            let w = spectrum::variety_witness_search(&r, *level, *attempts, input.seed)?;
            Ok(print_json(match w {
                Some(w) => json!({
                    "found": true,
                    "level": w.level,
                    "residual": w.residual,
                    "Z": tuple_json(&w.z),
                    "y": vec_json(&w.y),
                }),
                None => json!({ "found": false, "level": level }),
            }))
        }
        Command::ContinuityProbe { input, grid, eps } => {
            let r = input.minimal()?;
            let rows = spectrum::continuity_probe(&r, eps, grid.rect, grid.res, input.seed)?;
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| json!({ "epsilon": row.epsilon, "hausdorff": row.hausdorff }))
                .collect();
            Ok(print_json(json!({ "rows": rows })))
        }
    }
}

fn outer_json(t: &factorization::OuterTest) -> Value {
    json!({
        "outer": t.outer,
        "spr_inverse": t.spr_inverse,
        "indeterminate": t.indeterminate,
        "inverse_size": t.inverse_size,
    })
}

fn inner_json(t: &factorization::InnerTest) -> Value {
    json!({
        "inner": t.inner,
        "norm_defect": t.norm_defect,
        "orthogonality_defect": t.orthogonality_defect,
        "toeplitz_defect": t.toeplitz_defect,
    })
}
