//! Hochschild and Connes boundaries, the `(b,B)` bicomplex and cohomology
//! dimensions.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::cocyclic::CocyclicComplex;
use crate::error::{Error, Result};
use crate::linalg::{extend_basis, image_rank, kernel_basis, Echelon, Subspace};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use crate::sparse::{SparseMatrix, SparseVec};

/// `b_n = Σ_{i=0}^{n+1} (-1)^i ∂_i` for every stored face degree.
pub fn hochschild_b(c: &CocyclicComplex) -> Result<Vec<SparseMatrix>> {
    let b: Vec<SparseMatrix> = (0..=c.max_degree())
        .into_par_iter()
        .map(|n| alternating_faces(c, n))
        .collect();
    for n in 0..c.max_degree() {
        if !b[n + 1].compose(&b[n])?.is_zero() {
            return Err(Error::NotAComplex { what: "b∘b = 0".into(), degree: n });
        }
    }
    Ok(b)
}

/// `b_n` alone, for `n <= N`.
pub fn alternating_faces(c: &CocyclicComplex, n: usize) -> SparseMatrix {
    let mut acc = SparseMatrix::zeros(c.dim(n + 1), c.dim(n));
    for i in 0..=n + 1 {
        acc = acc.lin_comb(&Scalar::one(), c.face(n, i), &Scalar::sign(i)).expect("same shape");
    }
    acc
}

/// Sign conventions for the cyclic operator `λ` in the norm of `B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaReading {
    /// `λ = (-1)^{m-1} τ_m` on degree `m`
    Printed,
    /// `λ = (-1)^m τ_m` on degree `m`
    Standard,
}

impl LambdaReading {
    pub const ALL: [LambdaReading; 2] = [LambdaReading::Printed, LambdaReading::Standard];

    pub fn name(self) -> &'static str {
        match self {
            LambdaReading::Printed => "lambda = (-1)^(m-1) tau_m",
            LambdaReading::Standard => "lambda = (-1)^m tau_m",
        }
    }

    fn sign(self, m: usize) -> Scalar {
        match self {
            LambdaReading::Printed => Scalar::sign(m + 1),
            LambdaReading::Standard => Scalar::sign(m),
        }
    }
}

/// The signed cyclic operator on degree `m`.
pub fn lambda(c: &CocyclicComplex, m: usize, reading: LambdaReading) -> SparseMatrix {
    c.tau(m).scale(&reading.sign(m))
}

/// `b` and `B` matrices of a complex.
#[derive(Clone, Debug)]
pub struct BBData {
    /// `b_n: C^n -> C^{n+1}`, `n <= N`
    pub b: Vec<SparseMatrix>,
    /// `B_n: C^n -> C^{n-1}`, `n <= N+1`; `B_0` has no rows
    pub big_b: Vec<SparseMatrix>,
    pub reading: LambdaReading,
}

impl BBData {
    pub fn max_degree(&self) -> usize {
        self.b.len() - 1
    }
}

fn big_b_with(c: &CocyclicComplex, reading: LambdaReading) -> Vec<SparseMatrix> {
    let top = c.top();
    let mut out = vec![SparseMatrix::zeros(0, c.dim(0))];
    out.par_extend((1..=top).into_par_iter().map(|n| {
        let id = SparseMatrix::identity(c.dim(n));
        let one_minus = id.lin_comb(&Scalar::one(), c.tau(n), &-Scalar::sign(n)).expect("square");
        let b0 = SparseMatrix::chain(&[c.degen(n, n - 1), c.tau(n), &one_minus]);
        let lam = lambda(c, n - 1, reading);
        let mut norm = SparseMatrix::identity(c.dim(n - 1));
        let mut power = norm.clone();
        for _ in 1..n {
            power = lam.compose(&power).expect("square");
            norm = norm.add(&power).expect("square");
        }
        norm.compose(&b0).expect("composable")
    }));
    out
}

/// Exact certificates for a candidate `(b,B)` pair.
pub fn bb_certificate(c: &CocyclicComplex, bb: &BBData) -> ValidationReport {
    let mut r = ValidationReport::new(format!("(b,B) certificates of {}", c.name));
    let n_max = bb.max_degree();
    let zero_check = |r: &mut ValidationReport, law: String, m: SparseMatrix| {
        if m.is_zero() {
            r.pass();
        } else {
            r.fail(&law, "matrix", format!("{} nonzero entries", m.nnz()));
        }
    };
    for m in 0..=c.top() {
        let lam = lambda(c, m, bb.reading);
        let p = lam.pow(m + 1);
        if p == SparseMatrix::identity(c.dim(m)) {
            r.pass();
        } else {
            r.fail(&format!("lambda period n={m}"), "matrix", "lambda^(n+1) != 1");
        }
    }
    for n in 0..n_max {
        zero_check(&mut r, format!("bb n={n}"), bb.b[n + 1].compose(&bb.b[n]).unwrap());
    }
    for n in 2..=c.top() {
        zero_check(&mut r, format!("BB n={n}"), bb.big_b[n - 1].compose(&bb.big_b[n]).unwrap());
    }
    for n in 0..=n_max {
        let mut sum = bb.big_b[n + 1].compose(&bb.b[n]).unwrap();
        if n >= 1 {
            sum = sum.add(&bb.b[n - 1].compose(&bb.big_b[n]).unwrap()).unwrap();
        }
        zero_check(&mut r, format!("bB+Bb n={n}"), sum);
    }
    r
}

/// `b` and `B`, choosing the first `λ` reading whose certificates pass.
#[allow(non_snake_case)]
pub fn connes_B(c: &CocyclicComplex) -> Result<BBData> {
    let b = hochschild_b(c)?;
    let mut first = None;
    for reading in LambdaReading::ALL {
        let bb = BBData {
            b: b.clone(),
            big_b: big_b_with(c, reading),
            reading,
        };
        let report = bb_certificate(c, &bb);
        if report.is_valid() {
            return Ok(bb);
        }
        first.get_or_insert(report);
    }
    let report = first.expect("at least one reading");
    let law = report.failed_laws().first().map(|s| s.to_string()).unwrap_or_default();
    let degree = law
        .split_whitespace()
        .find_map(|w| w.strip_prefix("n=").and_then(|x| x.parse().ok()))
        .unwrap_or(0);
    Err(Error::NotAComplex { what: law, degree })
}

/// Degrees of the summands of `TC^n = ⊕_k C^{n-2k}`, highest first.
pub fn total_blocks(n: usize) -> Vec<usize> {
    (0..=n / 2).map(|k| n - 2 * k).collect()
}

pub fn total_dim(c: &CocyclicComplex, n: usize) -> usize {
    total_blocks(n).iter().map(|&d| c.dim(d)).sum()
}

/// `b + B: TC^n -> TC^{n+1}`, `n <= N`.
pub fn total_differential(c: &CocyclicComplex, bb: &BBData, n: usize) -> SparseMatrix {
    let src = total_blocks(n);
    let dst = total_blocks(n + 1);
    let offsets = |blocks: &[usize]| {
        let mut o = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for &d in blocks {
            o.push(acc);
            acc += c.dim(d);
        }
        o
    };
    let (so, dof) = (offsets(&src), offsets(&dst));
    let mut triplets = Vec::new();
    for (k, &d) in src.iter().enumerate() {
        // b keeps the summand index, B moves to the next one
        for (r, col, v) in bb.b[d].triplets() {
            triplets.push((dof[k] + r, so[k] + col, v));
        }
        if d >= 1 {
            for (r, col, v) in bb.big_b[d].triplets() {
                triplets.push((dof[k + 1] + r, so[k] + col, v));
            }
        }
    }
    SparseMatrix::from_triplets(total_dim(c, n + 1), total_dim(c, n), triplets).expect("in range")
}

/// Dimensions of Hochschild, cyclic and periodic cohomology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    pub complex: String,
    pub max_degree: usize,
    pub reading: LambdaReading,
    /// `HH^n`, `n <= N`
    pub hh: Vec<usize>,
    /// `HC^n` from the total complex, `n <= N`
    pub hc: Vec<usize>,
    /// `(even, odd)` periodic values and whether each is stable
    pub hp: [(Option<usize>, bool); 2],
}

impl CohomologyReport {
    /// Degrees more than one step below the truncation.
    pub fn trusted(&self, n: usize) -> bool {
        n + 2 <= self.max_degree
    }

    pub fn trusted_hc(&self) -> Vec<usize> {
        (0..self.hc.len()).filter(|&n| self.trusted(n)).map(|n| self.hc[n]).collect()
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CohomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trust = |n| if self.trusted(n) { "trusted" } else { "untrusted" };
        writeln!(f, "cohomology 1")?;
        writeln!(f, "complex {}", self.complex)?;
        writeln!(f, "max_degree {}", self.max_degree)?;
        writeln!(f, "B {}", self.reading.name())?;
        for (n, d) in self.hh.iter().enumerate() {
            writeln!(f, "HH {n} {d} {}", trust(n))?;
        }
        for (n, d) in self.hc.iter().enumerate() {
            writeln!(f, "HC {n} {d} {}", trust(n))?;
        }
        for (name, (v, stable)) in ["even", "odd"].iter().zip(&self.hp) {
            match v {
                Some(v) => writeln!(f, "HP {name} {v} {}", if *stable { "stable" } else { "unstable" })?,
                None => writeln!(f, "HP {name} - unstable")?,
            }
        }
        Ok(())
    }
}

/// Ranks of consecutive differentials, `ranks[n] = rank d_n`.
fn ranks(ds: &[SparseMatrix]) -> Vec<usize> {
    ds.par_iter().map(image_rank).collect()
}

pub fn compute_cohomology(c: &CocyclicComplex) -> Result<CohomologyReport> {
    let bb = connes_B(c)?;
    let n_max = c.max_degree();
    let rb = ranks(&bb.b);
    let hh = (0..=n_max)
        .map(|n| c.dim(n) - rb[n] - if n > 0 { rb[n - 1] } else { 0 })
        .collect();
    let totals: Vec<SparseMatrix> = (0..=n_max).into_par_iter().map(|n| total_differential(c, &bb, n)).collect();
    let rt = ranks(&totals);
    let hc: Vec<usize> = (0..=n_max)
        .map(|n| total_dim(c, n) - rt[n] - if n > 0 { rt[n - 1] } else { 0 })
        .collect();
    let mut report = CohomologyReport {
        complex: c.name.clone(),
        max_degree: n_max,
        reading: bb.reading,
        hh,
        hc,
        hp: [(None, false), (None, false)],
    };
    for parity in 0..2 {
        let trusted: Vec<usize> = (0..=n_max).filter(|&n| n % 2 == parity && report.trusted(n)).collect();
        if let Some(&last) = trusted.last() {
            let v = report.hc[last];
            let stable = trusted.len() >= 2 && report.hc[trusted[trusted.len() - 2]] == v;
            report.hp[parity] = (Some(v), stable);
        }
    }
    Ok(report)
}

/// Cocycles spanning `ker d / im d_prev`, one echelon representative per class.
pub fn class_representatives(d: &SparseMatrix, prev: Option<&SparseMatrix>) -> Vec<SparseVec> {
    let cocycles = kernel_basis(d);
    let boundaries: Vec<SparseVec> = prev.map(|p| p.columns().to_vec()).unwrap_or_default();
    extend_basis(d.cols(), &boundaries, &cocycles)
        .into_iter()
        .map(|k| cocycles[k].clone())
        .collect()
}

/// Representatives of `HH^n`.
pub fn hochschild_representatives(bb: &BBData, n: usize) -> Vec<SparseVec> {
    class_representatives(&bb.b[n], n.checked_sub(1).map(|p| &bb.b[p]))
}

/// Representatives of `HC^n` in the total complex.
pub fn total_representatives(c: &CocyclicComplex, bb: &BBData, n: usize) -> Vec<SparseVec> {
    let d = total_differential(c, bb, n);
    let prev = n.checked_sub(1).map(|p| total_differential(c, bb, p));
    class_representatives(&d, prev.as_ref())
}

/// The cyclic cochains `ker(1 - λ)` in degree `m`.
pub fn cyclic_cochains(c: &CocyclicComplex, m: usize, reading: LambdaReading) -> Subspace {
    let id = SparseMatrix::identity(c.dim(m));
    Subspace::kernel_of(&id.sub(&lambda(c, m, reading)).expect("square"))
}

/// Cyclic cocycles spanning `HC^n` computed from the `λ`-invariant subcomplex.
pub fn cyclic_representatives(c: &CocyclicComplex, bb: &BBData, n: usize) -> Vec<SparseVec> {
    let here = cyclic_cochains(c, n, bb.reading);
    let incl = here.inclusion();
    let restricted = bb.b[n].compose(&incl).expect("composable");
    let cocycles: Vec<SparseVec> = kernel_basis(&restricted).iter().map(|v| incl.mul_vec(v)).collect();
    let boundaries: Vec<SparseVec> = match n.checked_sub(1) {
        Some(p) => {
            let below = cyclic_cochains(c, p, bb.reading).inclusion();
            bb.b[p].compose(&below).expect("composable").into_columns()
        }
        None => Vec::new(),
    };
    extend_basis(c.dim(n), &boundaries, &cocycles)
        .into_iter()
        .map(|k| cocycles[k].clone())
        .collect()
}

/// `HC^n` dimensions from the `λ`-invariant subcomplex, `n <= N`.
pub fn cyclic_dims(c: &CocyclicComplex, bb: &BBData) -> Vec<usize> {
    (0..=c.max_degree()).into_par_iter().map(|n| cyclic_representatives(c, bb, n).len()).collect()
}

/// Whether `v` lies in the column span of `d` (is a coboundary).
pub fn is_coboundary(v: &SparseVec, d: Option<&SparseMatrix>) -> bool {
    if v.is_zero() {
        return true;
    }
    let Some(d) = d else { return false };
    let mut e = Echelon::new(d.rows());
    for col in d.columns() {
        e.insert(col);
    }
    e.contains(v)
}

/// A short dimension table for logs.
pub fn dims_line(name: &str, dims: &[usize]) -> String {
    let mut s = format!("{name}:");
    for d in dims {
        let _ = write!(s, " {d}");
    }
    s
}
