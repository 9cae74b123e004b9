//! Cocyclic modules as explicit operator matrices per degree.
//!
//! A complex built up to `N` stores spaces `0..=N+1`, faces out of degrees
//! `0..=N`, degeneracies out of degrees `1..=N+1` and cyclic operators on all
//! stored degrees, so that every identity whose terms stay inside the stored
//! range can be checked.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hopf::{iterated_coproduct, AlgebraData, twisted_antipode, HopfData, ModularPair};
use crate::linalg::{image_rank, Quotient, Realization, Subspace};
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use crate::space::{multi_indices, product, BasedSpace};
use crate::sparse::{SparseMatrix, SparseVec};
use crate::symmetry::{mpi_coefficients, validate_sayd, ComoduleAlgebra, ModuleAlgebra, ModuleCoalgebra, SAYDModule};
use crate::tensor::{matrix_from_fn, StructureTensor, Terms};

#[derive(Clone, Debug)]
pub struct CocyclicComplex {
    pub name: String,
    max_degree: usize,
    spaces: Vec<BasedSpace>,
    /// `faces[m][i]`, degree `m -> m+1`
    faces: Vec<Vec<SparseMatrix>>,
    /// `degens[m][j]`, degree `m -> m-1` (empty at `m = 0`)
    degens: Vec<Vec<SparseMatrix>>,
    taus: Vec<SparseMatrix>,
    /// How each degree sits in its ambient coordinates.
    pub realizations: Vec<Realization>,
    /// Which equivariance or colinearity convention the builder settled on.
    pub convention: Option<String>,
}

/// A cochain of a given degree in a given complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub coeffs: SparseVec,
}

impl Cochain {
    pub fn new(degree: usize, coeffs: SparseVec) -> Self {
        Cochain { degree, coeffs }
    }
}

impl CocyclicComplex {
    /// Assembles a complex from its matrices, checking shapes.
    pub fn from_parts(
        name: impl Into<String>,
        spaces: Vec<BasedSpace>,
        faces: Vec<Vec<SparseMatrix>>,
        degens: Vec<Vec<SparseMatrix>>,
        taus: Vec<SparseMatrix>,
    ) -> Result<Self> {
        if spaces.len() < 2 {
            return Err(Error::ShapeMismatch("a complex needs at least two degrees".into()));
        }
        let top = spaces.len() - 1;
        let bad = |what: String| Err(Error::ShapeMismatch(what));
        if faces.len() != top || degens.len() != top + 1 || taus.len() != top + 1 {
            return bad("operator family lengths".into());
        }
        for (m, fs) in faces.iter().enumerate() {
            if fs.len() != m + 2 {
                return bad(format!("{} faces in degree {m}", fs.len()));
            }
            for f in fs {
                if f.cols() != spaces[m].dim() || f.rows() != spaces[m + 1].dim() {
                    return bad(format!("face shape in degree {m}"));
                }
            }
        }
        for (m, ds) in degens.iter().enumerate() {
            if ds.len() != m {
                return bad(format!("{} degeneracies in degree {m}", ds.len()));
            }
            for d in ds {
                if d.cols() != spaces[m].dim() || d.rows() != spaces[m - 1].dim() {
                    return bad(format!("degeneracy shape in degree {m}"));
                }
            }
        }
        for (m, t) in taus.iter().enumerate() {
            if t.cols() != spaces[m].dim() || t.rows() != spaces[m].dim() {
                return bad(format!("cyclic operator shape in degree {m}"));
            }
        }
        let realizations = spaces.iter().map(|s| Realization::Full(s.dim())).collect();
        Ok(CocyclicComplex {
            name: name.into(),
            max_degree: top - 1,
            spaces,
            faces,
            degens,
            taus,
            realizations,
            convention: None,
        })
    }

    /// The truncation `N`; spaces exist up to `N+1`.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn top(&self) -> usize {
        self.max_degree + 1
    }

    pub fn space(&self, n: usize) -> &BasedSpace {
        &self.spaces[n]
    }

    pub fn dim(&self, n: usize) -> usize {
        self.spaces[n].dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(|s| s.dim()).collect()
    }

    /// `∂_i` out of degree `n`.
    pub fn face(&self, n: usize, i: usize) -> &SparseMatrix {
        &self.faces[n][i]
    }

    /// `σ_j` out of degree `n`.
    pub fn degen(&self, n: usize, j: usize) -> &SparseMatrix {
        &self.degens[n][j]
    }

    /// `τ_n`.
    pub fn op(&self, op: Op, n: usize) -> &SparseMatrix {
        match op {
            Op::Face(i) => self.face(n, i),
            Op::Degen(j) => self.degen(n, j),
            Op::Tau => self.tau(n),
        }
    }

    pub fn tau(&self, n: usize) -> &SparseMatrix {
        &self.taus[n]
    }

    /// Replaces one cyclic operator; used to build corrupted complexes.
    pub fn with_tau(mut self, n: usize, t: SparseMatrix) -> Self {
        self.taus[n] = t;
        self
    }

    pub fn with_face(mut self, n: usize, i: usize, f: SparseMatrix) -> Self {
        self.faces[n][i] = f;
        self
    }

    /// Same operators, truncated to a smaller `N`.
    pub fn truncate(&self, n: usize) -> Self {
        assert!(n <= self.max_degree);
        let mut c = self.clone();
        c.max_degree = n;
        c.spaces.truncate(n + 2);
        c.faces.truncate(n + 1);
        c.degens.truncate(n + 2);
        c.taus.truncate(n + 2);
        c.realizations.truncate(n + 2);
        c
    }

    /// The constant complex: every space the ground field, every operator 1.
    pub fn constant(n: usize) -> Self {
        let one = SparseMatrix::identity(1);
        let top = n + 1;
        CocyclicComplex::from_parts(
            "constant",
            vec![BasedSpace::ground(); top + 1],
            (0..top).map(|m| vec![one.clone(); m + 2]).collect(),
            (0..=top).map(|m| vec![one.clone(); m]).collect(),
            vec![one; top + 1],
        )
        .expect("constant shapes")
    }

    /// Text dump: dimensions, then every operator as a triplet list.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cocyclic 1");
        let _ = writeln!(s, "name {}", self.name);
        let _ = writeln!(s, "max_degree {}", self.max_degree);
        let dims: Vec<String> = self.dims().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "dims {}", dims.join(" "));
        for (m, fs) in self.faces.iter().enumerate() {
            for (i, f) in fs.iter().enumerate() {
                let _ = writeln!(s, "face {m} {i}");
                s.push_str(&f.to_text());
            }
        }
        for (m, ds) in self.degens.iter().enumerate() {
            for (j, d) in ds.iter().enumerate() {
                let _ = writeln!(s, "degen {m} {j}");
                s.push_str(&d.to_text());
            }
        }
        for (m, t) in self.taus.iter().enumerate() {
            let _ = writeln!(s, "tau {m}");
            s.push_str(&t.to_text());
        }
        s
    }

    /// Parses [`CocyclicComplex::to_text`]. Space labels are numbered.
    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidInput(format!("complex dump: {m}"));
        let mut lines = text.lines().peekable();
        if lines.next() != Some("cocyclic 1") {
            return Err(bad("missing header"));
        }
        let name = lines
            .next()
            .and_then(|l| l.strip_prefix("name "))
            .ok_or_else(|| bad("name"))?
            .to_string();
        let _n: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("max_degree "))
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| bad("max_degree"))?;
        let dims: Vec<usize> = lines
            .next()
            .and_then(|l| l.strip_prefix("dims "))
            .ok_or_else(|| bad("dims"))?
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| bad("dims")))
            .collect::<Result<_>>()?;
        let top = dims.len().checked_sub(1).ok_or_else(|| bad("dims"))?;
        let mut faces: Vec<Vec<SparseMatrix>> = (0..top).map(|_| Vec::new()).collect();
        let mut degens: Vec<Vec<SparseMatrix>> = (0..=top).map(|_| Vec::new()).collect();
        let mut taus = Vec::new();
        while let Some(head) = lines.next() {
            let parts: Vec<&str> = head.split_whitespace().collect();
            let mut body = String::new();
            while let Some(l) = lines.peek() {
                if l.starts_with(|c: char| c.is_ascii_alphabetic()) {
                    break;
                }
                body.push_str(l);
                body.push('\n');
                lines.next();
            }
            let m = SparseMatrix::from_text(&body)?;
            let deg: usize = parts.get(1).and_then(|x| x.parse().ok()).ok_or_else(|| bad(head))?;
            match parts[0] {
                "face" if deg < top => faces[deg].push(m),
                "degen" if deg <= top => degens[deg].push(m),
                "tau" => taus.push(m),
                _ => return Err(bad(head)),
            }
        }
        let spaces = dims.iter().map(|&d| BasedSpace::numbered("v", d)).collect();
        CocyclicComplex::from_parts(name, spaces, faces, degens, taus)
    }

    /// Whether two complexes carry identical operator matrices.
    pub fn same_operators(&self, other: &CocyclicComplex) -> bool {
        self.dims() == other.dims() && self.faces == other.faces && self.degens == other.degens && self.taus == other.taus
    }
}

/// Exhaustive check of the cosimplicial and cyclic identities over all
/// degrees where both sides are stored.
pub fn check_cocyclic(c: &CocyclicComplex) -> ValidationReport {
    let top = c.top();
    let mut jobs: Vec<Box<dyn Fn() -> ValidationReport + Sync + '_>> = Vec::new();
    let cmp = |law: String, lhs: SparseMatrix, rhs: &SparseMatrix, src: usize, dst: usize| {
        let mut r = ValidationReport::new("");
        r.compare(&law, &lhs, rhs, c.space(src), c.space(dst));
        r
    };
    let comp = |a: &SparseMatrix, b: &SparseMatrix| a.compose(b).expect("composable");
    // ds, faces: ∂_j ∂_i = ∂_i ∂_{j-1} for i < j, out of degree m
    for m in 0..top.saturating_sub(1) {
        jobs.push(Box::new(move || {
            let mut r = ValidationReport::new("");
            for j in 1..=m + 2 {
                for i in 0..j {
                    r.absorb(cmp(
                        format!("ds faces n={m} i={i} j={j}"),
                        comp(c.face(m + 1, j), c.face(m, i)),
                        &comp(c.face(m + 1, i), c.face(m, j - 1)),
                        m,
                        m + 2,
                    ));
                }
            }
            r
        }));
    }
    // ds, degeneracies: σ_j σ_i = σ_i σ_{j+1} for i <= j, out of degree m
    for m in 2..=top {
        jobs.push(Box::new(move || {
            let mut r = ValidationReport::new("");
            for j in 0..m - 1 {
                for i in 0..=j {
                    r.absorb(cmp(
                        format!("ds degeneracies n={m} i={i} j={j}"),
                        comp(c.degen(m - 1, j), c.degen(m, i)),
                        &comp(c.degen(m - 1, i), c.degen(m, j + 1)),
                        m,
                        m - 2,
                    ));
                }
            }
            r
        }));
    }
    // sd: σ_j ∂_i out of degree m
    for m in 0..top {
        jobs.push(Box::new(move || {
            let mut r = ValidationReport::new("");
            for j in 0..=m {
                for i in 0..=m + 1 {
                    let lhs = comp(c.degen(m + 1, j), c.face(m, i));
                    let rhs = if i < j {
                        comp(c.face(m - 1, i), c.degen(m, j - 1))
                    } else if i == j || i == j + 1 {
                        SparseMatrix::identity(c.dim(m))
                    } else {
                        comp(c.face(m - 1, i - 1), c.degen(m, j))
                    };
                    r.absorb(cmp(format!("sd n={m} i={i} j={j}"), lhs, &rhs, m, m));
                }
            }
            r
        }));
    }
    // ci: τ_n ∂_i = ∂_{i-1} τ_{n-1}, τ_n ∂_0 = ∂_n
    for n in 1..=top {
        jobs.push(Box::new(move || {
            let mut r = ValidationReport::new("");
            r.absorb(cmp(
                format!("ci n={n} i=0"),
                comp(c.tau(n), c.face(n - 1, 0)),
                c.face(n - 1, n),
                n - 1,
                n,
            ));
            for i in 1..=n {
                r.absorb(cmp(
                    format!("ci n={n} i={i}"),
                    comp(c.tau(n), c.face(n - 1, i)),
                    &comp(c.face(n - 1, i - 1), c.tau(n - 1)),
                    n - 1,
                    n,
                ));
            }
            r
        }));
    }
    // cj: τ_n σ_i = σ_{i-1} τ_{n+1}, τ_n σ_0 = σ_n τ_{n+1}²
    for n in 0..top {
        jobs.push(Box::new(move || {
            let mut r = ValidationReport::new("");
            let t2 = comp(c.tau(n + 1), c.tau(n + 1));
            r.absorb(cmp(
                format!("cj n={n} i=0"),
                comp(c.tau(n), c.degen(n + 1, 0)),
                &comp(c.degen(n + 1, n), &t2),
                n + 1,
                n,
            ));
            for i in 1..=n {
                r.absorb(cmp(
                    format!("cj n={n} i={i}"),
                    comp(c.tau(n), c.degen(n + 1, i)),
                    &comp(c.degen(n + 1, i - 1), c.tau(n + 1)),
                    n + 1,
                    n,
                ));
            }
            r
        }));
    }
    // ce: τ_n^{n+1} = 1
    for n in 0..=top {
        jobs.push(Box::new(move || {
            cmp(format!("ce n={n}"), c.tau(n).pow(n + 1), &SparseMatrix::identity(c.dim(n)), n, n)
        }));
    }
    let parts: Vec<ValidationReport> = jobs.par_iter().map(|j| j()).collect();
    let mut report = ValidationReport::new(format!("cocyclic identities of {}", c.name));
    for p in parts {
        report.absorb(p);
    }
    report
}

/// Lets an element `h` (at `h_slot`) act diagonally on `k` consecutive slots
/// starting at `first` (counted after removing `h`), through `dk`.
fn act_diagonally(t: &Terms, dk: &StructureTensor, act: &StructureTensor, h_slot: usize, first: usize) -> Terms {
    let mut out = Vec::new();
    for (idx, c) in t.items() {
        let h = idx[h_slot];
        let mut rest = idx.clone();
        rest.remove(h_slot);
        for (hs, w) in dk.at(h) {
            let mut partial = vec![(rest.clone(), c * w)];
            for (j, &hj) in hs.iter().enumerate() {
                let slot = first + j;
                let mut next = Vec::new();
                for (p, v) in &partial {
                    for (o, x) in act.image(&[hj, p[slot]]) {
                        let mut q = p.clone();
                        q[slot] = o[0];
                        next.push((q, v * x));
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
    }
    Terms::from_items(out)
}

/// One structure map of a cocyclic module, without its degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Face(usize),
    Degen(usize),
    Tau,
}

impl Op {
    pub fn name(self) -> String {
        match self {
            Op::Face(i) => format!("face {i}"),
            Op::Degen(j) => format!("degeneracy {j}"),
            Op::Tau => "cyclic operator".to_string(),
        }
    }
}

/// Every operator slot of a complex truncated at `n_max`: (kind, source degree).
pub fn operator_slots(n_max: usize) -> Vec<(Op, usize)> {
    let top = n_max + 1;
    let mut v = Vec::new();
    for m in 0..top {
        for i in 0..=m + 1 {
            v.push((Op::Face(i), m));
        }
    }
    for m in 1..=top {
        for j in 0..m {
            v.push((Op::Degen(j), m));
        }
    }
    for m in 0..=top {
        v.push((Op::Tau, m));
    }
    v
}

/// Degree reached by `op` out of degree `m`.
pub fn target(op: Op, m: usize) -> usize {
    match op {
        Op::Face(_) => m + 1,
        Op::Degen(_) => m - 1,
        Op::Tau => m,
    }
}

/// Restricts ambient operators to realized spaces and assembles the complex.
fn assemble<F>(
    name: String,
    n_max: usize,
    spaces: Vec<BasedSpace>,
    realizations: Vec<Realization>,
    ambient: F,
) -> Result<CocyclicComplex>
where
    F: Fn(Op, usize) -> SparseMatrix + Sync,
{
    let slots = operator_slots(n_max);
    let mats: Vec<Result<SparseMatrix>> = slots
        .par_iter()
        .map(|&(op, m)| {
            let a = ambient(op, m);
            Realization::restrict(&a, &realizations[m], &realizations[target(op, m)]).ok_or(Error::IllDefined {
                op: op.name(),
                degree: m,
            })
        })
        .collect();
    let top = n_max + 1;
    let mut faces: Vec<Vec<SparseMatrix>> = (0..top).map(|_| Vec::new()).collect();
    let mut degens: Vec<Vec<SparseMatrix>> = (0..=top).map(|_| Vec::new()).collect();
    let mut taus = Vec::new();
    for ((op, m), mat) in slots.into_iter().zip(mats) {
        let mat = mat?;
        match op {
            Op::Face(_) => faces[m].push(mat),
            Op::Degen(_) => degens[m].push(mat),
            Op::Tau => taus.push(mat),
        }
    }
    let mut c = CocyclicComplex::from_parts(name, spaces, faces, degens, taus)?;
    c.realizations = realizations;
    Ok(c)
}

fn quotient_labels(q: &Quotient, ambient: &BasedSpace) -> BasedSpace {
    BasedSpace::new(q.kept().iter().map(|&j| format!("[{}]", ambient.label(j)))).expect("distinct labels")
}

fn functional_labels(s: &Subspace, ambient: &BasedSpace) -> BasedSpace {
    BasedSpace::new(s.keys().iter().map(|&j| format!("f[{}]", ambient.label(j)))).expect("distinct labels")
}

fn factors<'a>(first: &'a BasedSpace, rest: &'a BasedSpace, k: usize) -> BasedSpace {
    let mut fs: Vec<&BasedSpace> = vec![first];
    fs.extend(std::iter::repeat_n(rest, k));
    BasedSpace::tensor(&fs)
}

fn check_same_hopf(a: &Arc<HopfData>, b: &Arc<HopfData>) -> Result<()> {
    if a != b {
        return Err(Error::InvalidInput("structures over different Hopf algebras".into()));
    }
    Ok(())
}

/// `C^n_H(C,M) = M ⊗_H C^{⊗n+1}` with the coalgebra-side operators.
pub fn build_coalgebra_complex(mc: &ModuleCoalgebra, m: &SAYDModule, n_max: usize) -> Result<CocyclicComplex> {
    check_same_hopf(&mc.hopf, &m.hopf)?;
    let h = &*mc.hopf;
    let (dh, dm, dc) = (h.dim(), m.dim(), mc.coalg.dim());
    let top = n_max + 1;
    let dks: Vec<StructureTensor> = (0..=top + 1).map(|k| iterated_coproduct(&h.coalg, k.max(1))).collect::<Result<_>>()?;
    let dims = |n: usize| {
        let mut d = vec![dm];
        d.extend(std::iter::repeat_n(dc, n + 1));
        d
    };
    let realizations: Vec<Realization> = (0..=top)
        .into_par_iter()
        .map(|n| {
            let src = dims(n);
            let mut rels = Vec::new();
            for idx in multi_indices(&src) {
                for hh in 0..dh {
                    let mut t = Terms::basis(&idx).insert(1, hh);
                    let lhs = t.apply(&m.raction, &[0, 1], 0);
                    t = act_diagonally(&t, &dks[n + 1], &mc.action, 1, 1).scale(&Scalar::from_int(-1));
                    let mut all = lhs;
                    all.extend(t);
                    let v = all.flatten(&src);
                    if !v.is_zero() {
                        rels.push(v);
                    }
                }
            }
            Realization::Quotient(Quotient::new(product(&src), &rels))
        })
        .collect();
    let spaces = (0..=top)
        .map(|n| match &realizations[n] {
            Realization::Quotient(q) => quotient_labels(q, &factors(&m.space, &mc.coalg.space, n + 1)),
            _ => unreachable!(),
        })
        .collect();
    let ambient = |op: Op, n: usize| -> SparseMatrix {
        let src = dims(n);
        let dst = dims(target(op, n));
        match op {
            Op::Face(i) if i <= n => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply_at(&mc.coalg.comul, 1 + i)),
            Op::Face(_) => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx)
                    .apply_at(&m.lcoaction, 0) // m-1, m0, c0..cn
                    .apply_at(&mc.coalg.comul, 2) // m-1, m0, c0(1), c0(2), c1..cn
                    .apply(&mc.action, &[0, 2], n + 2)
            }),
            Op::Degen(j) => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply(mc.coalg.counit_tensor(), &[j + 2], 0)),
            Op::Tau => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx).apply_at(&m.lcoaction, 0).apply(&mc.action, &[0, 2], n + 1)
            }),
        }
    };
    assemble(format!("coalgebra complex C_H({},M)", short(&mc.coalg.space)), n_max, spaces, realizations, ambient)
}

fn short(s: &BasedSpace) -> String {
    format!("dim {}", s.dim())
}

fn identity_failure(c: &CocyclicComplex) -> Error {
    let report = check_cocyclic(c);
    let law = report.failed_laws().first().map(|l| l.to_string()).unwrap_or_default();
    let degree = law
        .split_whitespace()
        .find_map(|w| w.strip_prefix("n=").and_then(|x| x.parse().ok()))
        .unwrap_or(0);
    Error::NotAComplex { what: law, degree }
}

/// Conventions for the equivariance of functionals on `M⊗A^{⊗n+1}`, tried in order.
const ALGEBRA_CONVENTIONS: [&str; 3] = [
    "phi(m h(1) (x) S(h(2)) a) = e(h) phi(m (x) a)",
    "phi(m S(h(1)) (x) h(2) a) = e(h) phi(m (x) a)",
    "phi(m S^-1(h(1)) (x) h(2) a) = e(h) phi(m (x) a)",
];

/// `C^n_H(A,M)`: equivariant functionals on `M⊗A^{⊗n+1}`.
pub fn build_algebra_complex(ma: &ModuleAlgebra, m: &SAYDModule, n_max: usize) -> Result<CocyclicComplex> {
    let mut first_err = None;
    for (k, conv) in ALGEBRA_CONVENTIONS.iter().enumerate() {
        match build_algebra_complex_with(ma, m, n_max, k) {
            Ok(mut c) if check_cocyclic(&c).is_valid() => {
                c.convention = Some(conv.to_string());
                return Ok(c);
            }
            Ok(c) => {
                first_err.get_or_insert_with(|| identity_failure(&c));
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.expect("at least one convention"))
}

/// Matrix of `m⊗ã ↦ (m·x(h)) ⊗ y(h)·ã` on `M⊗A^{⊗n+1}` for one convention.
fn equivariance_map(ma: &ModuleAlgebra, m: &SAYDModule, n: usize, hh: usize, convention: usize, dk: &StructureTensor) -> SparseMatrix {
    let h = &*ma.hopf;
    let mut d = vec![m.dim()];
    d.extend(std::iter::repeat_n(ma.alg.dim(), n + 1));
    matrix_from_fn(&d, &d, |idx| {
        let t = Terms::basis(idx).insert(1, hh).apply_at(h.comul(), 1); // m, h1, h2, a...
        let t = match convention {
            0 => t.apply_at(h.s(), 2).apply(&m.raction, &[0, 1], 0),
            1 => t.apply_at(h.s(), 1).apply(&m.raction, &[0, 1], 0),
            _ => t.apply_at(h.s_inv(), 1).apply(&m.raction, &[0, 1], 0),
        };
        act_diagonally(&t, dk, &ma.action, 1, 1)
    })
}

fn build_algebra_complex_with(ma: &ModuleAlgebra, m: &SAYDModule, n_max: usize, convention: usize) -> Result<CocyclicComplex> {
    check_same_hopf(&ma.hopf, &m.hopf)?;
    let h = &*ma.hopf;
    let (dh, dm, da) = (h.dim(), m.dim(), ma.alg.dim());
    let top = n_max + 1;
    let dks: Vec<StructureTensor> = (0..=top + 1).map(|k| iterated_coproduct(&h.coalg, k.max(1))).collect::<Result<_>>()?;
    let dims = |n: usize| {
        let mut d = vec![dm];
        d.extend(std::iter::repeat_n(da, n + 1));
        d
    };
    let realizations: Vec<Realization> = (0..=top)
        .into_par_iter()
        .map(|n| {
            let amb = product(&dims(n));
            let mut rows = Vec::new();
            for hh in 0..dh {
                let e = equivariance_map(ma, m, n, hh, convention, &dks[n + 1]);
                let eps = h.counit_vec().get(hh);
                let shifted = e.lin_comb(&Scalar::one(), &SparseMatrix::identity(amb), &-eps).expect("square");
                rows.extend(shifted.into_columns().into_iter().filter(|c| !c.is_zero()));
            }
            if rows.is_empty() {
                Realization::Subspace(Subspace::full(amb))
            } else {
                Realization::Subspace(Subspace::kernel_of(&SparseMatrix::from_rows(amb, &rows)))
            }
        })
        .collect();
    let spaces = (0..=top)
        .map(|n| match &realizations[n] {
            Realization::Subspace(s) => functional_labels(s, &factors(&m.space, &ma.alg.space, n + 1)),
            _ => unreachable!(),
        })
        .collect();
    // precomposition maps g: M⊗A^{⊗(target+1)} -> M⊗A^{⊗(n+1)}; the operator is gᵀ
    let ambient = |op: Op, n: usize| -> SparseMatrix {
        let t = target(op, n);
        let src = dims(t);
        let dst = dims(n);
        let g = match op {
            Op::Face(i) if i <= n => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply(&ma.alg.mul, &[1 + i, 2 + i], 1 + i)),
            Op::Face(_) => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx)
                    .apply_at(&m.lcoaction, 0) // m-1, m0, a0..a(n+1)
                    .apply_at(h.s_inv(), 0)
                    .apply(&ma.action, &[0, n + 3], 1) // m0, X, a0..an
                    .apply(&ma.alg.mul, &[1, 2], 1)
            }),
            Op::Degen(j) => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply(ma.alg.unit_tensor(), &[], j + 2)),
            Op::Tau => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx)
                    .apply_at(&m.lcoaction, 0)
                    .apply_at(h.s_inv(), 0)
                    .apply(&ma.action, &[0, n + 2], 1)
            }),
        };
        g.transpose()
    };
    assemble(format!("algebra complex C_H({},M)", short(&ma.alg.space)), n_max, spaces, realizations, ambient)
}

/// `C^n(A) = Hom(A^{⊗n+1}, ℚ)` with the usual cyclic structure.
pub fn build_cyclic_complex(alg: &AlgebraData, n_max: usize) -> Result<CocyclicComplex> {
    let h = Arc::new(HopfData::ground());
    let ma = ModuleAlgebra::trivial(h.clone(), alg.clone());
    let m = SAYDModule::trivial(h);
    let mut c = build_algebra_complex_with(&ma, &m, n_max, 0)?;
    c.name = format!("cyclic complex C({})", short(&alg.space));
    Ok(c)
}

/// Conventions for the diagonal coaction on `B^{⊗n+1}`, tried in order.
const COMODULE_CONVENTIONS: [&str; 2] = [
    "coaction b0(-1)...bn(-1) (x) b(0)",
    "coaction bn(-1)...b0(-1) (x) b(0)",
];

/// `^H C^n(B,M)`: colinear maps `B^{⊗n+1} -> M`, coordinate `v·dim M + m`.
pub fn build_comodule_algebra_complex(ba: &ComoduleAlgebra, m: &SAYDModule, n_max: usize) -> Result<CocyclicComplex> {
    let mut first_err = None;
    for (k, conv) in COMODULE_CONVENTIONS.iter().enumerate() {
        match build_comodule_algebra_complex_with(ba, m, n_max, k == 1) {
            Ok(mut c) if check_cocyclic(&c).is_valid() => {
                c.convention = Some(conv.to_string());
                return Ok(c);
            }
            Ok(c) => {
                first_err.get_or_insert_with(|| identity_failure(&c));
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.expect("at least one convention"))
}

/// Diagonal coaction `B^{⊗k} -> H⊗B^{⊗k}`.
pub fn diagonal_coaction(ba: &ComoduleAlgebra, k: usize, reversed: bool) -> SparseMatrix {
    let h = &*ba.hopf;
    let db = ba.alg.dim();
    matrix_from_fn(&vec![db; k], &[&[h.dim()][..], &vec![db; k]].concat(), |idx| {
        let mut t = Terms::basis(idx);
        for j in 0..k {
            // the coaction legs collect in front, in slot order
            t = t.apply(&ba.coaction, &[j + j], j + j).move_slot(j + j, j);
        }
        if k == 0 {
            return t.apply(h.unit(), &[], 0);
        }
        for _ in 1..k {
            t = if reversed {
                t.apply(h.mul(), &[1, 0], 0)
            } else {
                t.apply(h.mul(), &[0, 1], 0)
            };
        }
        t
    })
}

/// Matrix on `Hom(B^{⊗·}, M)` of `φ ↦ (b̃ ↦ Σ φ(b̃')·h)` for `g(b̃) = Σ h⊗b̃'`.
fn hom_operator(g: &SparseMatrix, db_src: usize, dst_tuples: usize, m: &SAYDModule) -> SparseMatrix {
    let dm = m.dim();
    let dh = m.hopf.dim();
    let mut triplets = Vec::new();
    for v_new in 0..dst_tuples {
        for (hv, c) in g.column(v_new).iter() {
            let (hh, v_old) = (hv / db_src, hv % db_src);
            for m_old in 0..dm {
                for (m_new, r) in m.raction.matrix().column(m_old * dh + hh).iter() {
                    triplets.push((v_new * dm + m_new, v_old * dm + m_old, c * r));
                }
            }
        }
    }
    SparseMatrix::from_triplets(dst_tuples * dm, db_src * dm, triplets).expect("in range")
}

fn build_comodule_algebra_complex_with(ba: &ComoduleAlgebra, m: &SAYDModule, n_max: usize, reversed: bool) -> Result<CocyclicComplex> {
    check_same_hopf(&ba.hopf, &m.hopf)?;
    let h = &*ba.hopf;
    let (dh, dm, db) = (h.dim(), m.dim(), ba.alg.dim());
    let top = n_max + 1;
    let tuples = |n: usize| db.pow(n as u32 + 1);
    let realizations: Vec<Realization> = (0..=top)
        .into_par_iter()
        .map(|n| {
            let v = tuples(n);
            let rho = diagonal_coaction(ba, n + 1, reversed);
            let mut rows = Vec::new();
            for vi in 0..v {
                // ρ_M(φ(v)) - (id⊗φ)(ρ(v)), one equation per (h, m') coordinate
                let mut eqs: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); dh * dm];
                for mi in 0..dm {
                    for (hm, c) in m.lcoaction.matrix().column(mi).iter() {
                        eqs[hm].push((vi * dm + mi, c.clone()));
                    }
                }
                for (hv, c) in rho.column(vi).iter() {
                    let (hh, v2) = (hv / v, hv % v);
                    for m2 in 0..dm {
                        eqs[hh * dm + m2].push((v2 * dm + m2, -c));
                    }
                }
                rows.extend(eqs.into_iter().map(SparseVec::from_pairs).filter(|r| !r.is_zero()));
            }
            let amb = v * dm;
            if rows.is_empty() {
                Realization::Subspace(Subspace::full(amb))
            } else {
                Realization::Subspace(Subspace::kernel_of(&SparseMatrix::from_rows(amb, &rows)))
            }
        })
        .collect();
    let spaces = (0..=top)
        .map(|n| {
            let mut fs: Vec<&BasedSpace> = std::iter::repeat_n(&ba.alg.space, n + 1).collect();
            fs.push(&m.space);
            let amb = BasedSpace::tensor(&fs);
            match &realizations[n] {
                Realization::Subspace(s) => BasedSpace::new(s.keys().iter().map(|&j| format!("f[{}]", amb.label(j)))).expect("distinct"),
                _ => unreachable!(),
            }
        })
        .collect();
    let ambient = |op: Op, n: usize| -> SparseMatrix {
        let t = target(op, n);
        let src = vec![db; t + 1];
        let mut dst = vec![dh];
        dst.extend(std::iter::repeat_n(db, n + 1));
        let g = match op {
            Op::Face(i) if i <= n => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx).apply(&ba.alg.mul, &[i, i + 1], i).apply(h.unit(), &[], 0)
            }),
            Op::Face(_) => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx)
                    .apply_at(&ba.coaction, n + 1) // b0..bn, h, b(n+1)0
                    .apply(&ba.alg.mul, &[n + 2, 0], 0)
                    .move_slot(n + 1, 0)
            }),
            Op::Degen(j) => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx).apply(ba.alg.unit_tensor(), &[], j + 1).apply(h.unit(), &[], 0)
            }),
            Op::Tau => matrix_from_fn(&src, &dst, |idx| {
                Terms::basis(idx)
                    .apply_at(&ba.coaction, n) // b0..b(n-1), h, bn0
                    .move_slot(n + 1, 0)
                    .move_slot(n + 1, 0)
            }),
        };
        hom_operator(&g, tuples(n), tuples(t), m)
    };
    assemble(format!("comodule algebra complex ^H C({},M)", short(&ba.alg.space)), n_max, spaces, realizations, ambient)
}

/// The Hopf-algebra complex on `H^{⊗n}` for a modular pair.
pub fn build_ans_complex(mp: &ModularPair, n_max: usize) -> Result<CocyclicComplex> {
    let h = &*mp.hopf;
    let d = h.dim();
    let top = n_max + 1;
    let st = StructureTensor::linear(twisted_antipode(mp));
    let sigma = mp.sigma_tensor();
    let dks: Vec<StructureTensor> = (0..=top + 1).map(|k| iterated_coproduct(&h.coalg, k.max(1))).collect::<Result<_>>()?;
    let spaces: Vec<BasedSpace> = (0..=top).map(|n| crate::hopf::tensor_power(h.space(), n)).collect();
    let realizations = (0..=top).map(|n| Realization::Full(d.pow(n as u32))).collect();
    let ambient = |op: Op, n: usize| -> SparseMatrix {
        let src = vec![d; n];
        let dst = vec![d; target(op, n)];
        match op {
            Op::Face(0) => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply(h.unit(), &[], 0)),
            Op::Face(i) if i <= n => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply_at(h.comul(), i - 1)),
            Op::Face(_) => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply(&sigma, &[], n)),
            Op::Degen(j) => matrix_from_fn(&src, &dst, |idx| Terms::basis(idx).apply(h.counit(), &[j], 0)),
            Op::Tau if n == 0 => SparseMatrix::identity(1),
            Op::Tau => matrix_from_fn(&src, &dst, |idx| {
                let t = Terms::basis(idx).apply_at(&st, 0).apply(&sigma, &[], n); // S̃(h1), h2..hn, σ
                act_diagonally_mul(&t, &dks[n], h)
            }),
        }
    };
    assemble("Hopf complex".to_string(), n_max, spaces, realizations, ambient)
}

/// `x, y1..yn ↦ Δ^{(n-1)}(x)·(y1⊗..⊗yn)` by slotwise multiplication.
fn act_diagonally_mul(t: &Terms, dk: &StructureTensor, h: &HopfData) -> Terms {
    act_diagonally(t, dk, h.mul(), 0, 0)
}

/// Matrix of `I(m⊗h0⊗h̃) = m·h0(1) ⊗ S(h0(2))·h̃` on ambient coordinates of
/// `M⊗H^{⊗n+1}` with `M` one-dimensional.
fn normalization_ambient(mp: &ModularPair, n: usize, dk: &StructureTensor) -> SparseMatrix {
    let h = &*mp.hopf;
    let d = h.dim();
    let m = mpi_coefficients(mp);
    let mut src = vec![1];
    src.extend(std::iter::repeat_n(d, n + 1));
    matrix_from_fn(&src, &vec![d; n], |idx| {
        let t = Terms::basis(idx)
            .apply_at(h.comul(), 1) // m, h0(1), h0(2), h..
            .apply(&m.raction, &[0, 1], 0)
            .apply_at(h.s(), 1);
        // drop the one-dimensional M slot
        let t = t.apply(&StructureTensor::functional(vec![1], &SparseVec::unit(0)), &[0], 0);
        if n == 0 {
            t.apply(h.counit(), &[0], 0)
        } else {
            act_diagonally_mul(&t, dk, h)
        }
    })
}

/// The coalgebra complex of `H` with `^σℚ_δ`, the Ans complex, and the
/// certified normalization isomorphism between them.
#[derive(Clone, Debug)]
pub struct HopfComplexes {
    pub coalgebra: CocyclicComplex,
    pub ans: CocyclicComplex,
    /// `I_n`, coalgebra degree `n` onto Ans degree `n`.
    pub iso: Vec<SparseMatrix>,
}

pub fn build_hopf_complex(mp: &ModularPair, n_max: usize) -> Result<HopfComplexes> {
    let m = mpi_coefficients(mp);
    let report = validate_sayd(&m);
    if !report.is_valid() {
        return Err(Error::InvalidInput(format!("not a modular pair in involution: {}", report.failed_laws().join(", "))));
    }
    let mc = ModuleCoalgebra::regular(mp.hopf.clone());
    let coalgebra = build_coalgebra_complex(&mc, &m, n_max)?;
    let ans = build_ans_complex(mp, n_max)?;
    let top = n_max + 1;
    let h = &*mp.hopf;
    let mut iso = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let dk = iterated_coproduct(&h.coalg, n.max(1))?;
        let amb = normalization_ambient(mp, n, &dk);
        let i = Realization::restrict(&amb, &coalgebra.realizations[n], &ans.realizations[n]).ok_or(Error::ConjugationFailure {
            op: "normalization map".into(),
            degree: n,
        })?;
        if i.rows() != i.cols() || image_rank(&i) != i.cols() {
            return Err(Error::ConjugationFailure {
                op: "normalization map (not invertible)".into(),
                degree: n,
            });
        }
        iso.push(i);
    }
    for (op, n) in operator_slots(n_max) {
        let t = target(op, n);
        let (a, b) = match op {
            Op::Face(i) => (coalgebra.face(n, i), ans.face(n, i)),
            Op::Degen(j) => (coalgebra.degen(n, j), ans.degen(n, j)),
            Op::Tau => (coalgebra.tau(n), ans.tau(n)),
        };
        if iso[t].compose(a)? != b.compose(&iso[n])? {
            return Err(Error::ConjugationFailure { op: op.name(), degree: n });
        }
    }
    Ok(HopfComplexes { coalgebra, ans, iso })
}

/// Two complexes tensored: horizontal operators act on the first factor,
/// vertical ones on the second.
#[derive(Clone, Debug)]
pub struct BicocyclicComplex {
    pub horizontal: CocyclicComplex,
    pub vertical: CocyclicComplex,
}

pub fn tensor_bicocyclic(c1: &CocyclicComplex, c2: &CocyclicComplex) -> BicocyclicComplex {
    BicocyclicComplex {
        horizontal: c1.clone(),
        vertical: c2.clone(),
    }
}

impl BicocyclicComplex {
    pub fn max_degree(&self) -> usize {
        self.horizontal.max_degree().min(self.vertical.max_degree())
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.horizontal.dim(p) * self.vertical.dim(q)
    }

    fn hop(&self, op: Op, p: usize, q: usize) -> SparseMatrix {
        let id = SparseMatrix::identity(self.vertical.dim(q));
        let m = match op {
            Op::Face(i) => self.horizontal.face(p, i),
            Op::Degen(j) => self.horizontal.degen(p, j),
            Op::Tau => self.horizontal.tau(p),
        };
        m.kron(&id)
    }

    fn vop(&self, op: Op, p: usize, q: usize) -> SparseMatrix {
        let id = SparseMatrix::identity(self.horizontal.dim(p));
        let m = match op {
            Op::Face(i) => self.vertical.face(q, i),
            Op::Degen(j) => self.vertical.degen(q, j),
            Op::Tau => self.vertical.tau(q),
        };
        id.kron(m)
    }

    /// Horizontal face `→∂_i` at bidegree `(p,q)`.
    pub fn h_face(&self, p: usize, q: usize, i: usize) -> SparseMatrix {
        self.hop(Op::Face(i), p, q)
    }

    /// Vertical face `↑∂_i` at bidegree `(p,q)`.
    pub fn v_face(&self, p: usize, q: usize, i: usize) -> SparseMatrix {
        self.vop(Op::Face(i), p, q)
    }

    /// Checks that horizontal and vertical operators commute for `p,q <= bound`.
    pub fn check_commuting(&self, bound: usize) -> ValidationReport {
        let mut r = ValidationReport::new("bicocyclic commutation");
        let bound = bound.min(self.max_degree());
        for p in 0..=bound {
            for q in 0..=bound {
                let hs: Vec<Op> = (0..=p + 1).map(Op::Face).chain((0..p).map(Op::Degen)).chain([Op::Tau]).collect();
                let vs: Vec<Op> = (0..=q + 1).map(Op::Face).chain((0..q).map(Op::Degen)).chain([Op::Tau]).collect();
                for &a in &hs {
                    for &b in &vs {
                        let (p2, q2) = (target(a, p), target(b, q));
                        let lhs = self.hop(a, p, q2).compose(&self.vop(b, p, q)).unwrap();
                        let rhs = self.vop(b, p2, q).compose(&self.hop(a, p, q)).unwrap();
                        if lhs == rhs {
                            r.pass();
                        } else {
                            r.fail("horizontal and vertical commute", format!("({p},{q}) {} / {}", a.name(), b.name()), "operators differ");
                        }
                    }
                }
            }
        }
        r
    }
}

fn paired_spaces(c1: &CocyclicComplex, c2: &CocyclicComplex, n: usize) -> BasedSpace {
    let (a, b) = (c1.space(n), c2.space(n));
    if a.dim() * b.dim() > 4096 {
        BasedSpace::numbered("d", a.dim() * b.dim())
    } else {
        BasedSpace::new(a.labels().iter().flat_map(|x| b.labels().iter().map(move |y| format!("{x}&{y}")))).expect("distinct")
    }
}

/// Diagonal `n ↦ C^{n,n}` with each structure map the composite of the
/// horizontal and the vertical one.
pub fn diagonal(b: &BicocyclicComplex) -> CocyclicComplex {
    let n_max = b.max_degree();
    let top = n_max + 1;
    let slots = operator_slots(n_max);
    let mats: Vec<SparseMatrix> = slots
        .par_iter()
        .map(|&(op, n)| {
            let t = target(op, n);
            b.hop(op, n, t).compose(&b.vop(op, n, n)).expect("composable")
        })
        .collect();
    let spaces = (0..=top).map(|n| paired_spaces(&b.horizontal, &b.vertical, n)).collect();
    from_slots(format!("diagonal of {} and {}", b.horizontal.name, b.vertical.name), n_max, spaces, slots, mats)
}

/// `(C×C')^n = C^n⊗C'^n` with every operator the tensor of the two.
pub fn product_complex(c1: &CocyclicComplex, c2: &CocyclicComplex) -> CocyclicComplex {
    let n_max = c1.max_degree().min(c2.max_degree());
    let top = n_max + 1;
    let slots = operator_slots(n_max);
    let mats: Vec<SparseMatrix> = slots
        .par_iter()
        .map(|&(op, n)| match op {
            Op::Face(i) => c1.face(n, i).kron(c2.face(n, i)),
            Op::Degen(j) => c1.degen(n, j).kron(c2.degen(n, j)),
            Op::Tau => c1.tau(n).kron(c2.tau(n)),
        })
        .collect();
    let spaces = (0..=top).map(|n| paired_spaces(c1, c2, n)).collect();
    from_slots(format!("product of {} and {}", c1.name, c2.name), n_max, spaces, slots, mats)
}

fn from_slots(name: String, n_max: usize, spaces: Vec<BasedSpace>, slots: Vec<(Op, usize)>, mats: Vec<SparseMatrix>) -> CocyclicComplex {
    let top = n_max + 1;
    let mut faces: Vec<Vec<SparseMatrix>> = (0..top).map(|_| Vec::new()).collect();
    let mut degens: Vec<Vec<SparseMatrix>> = (0..=top).map(|_| Vec::new()).collect();
    let mut taus = Vec::new();
    for ((op, m), mat) in slots.into_iter().zip(mats) {
        match op {
            Op::Face(_) => faces[m].push(mat),
            Op::Degen(_) => degens[m].push(mat),
            Op::Tau => taus.push(mat),
        }
    }
    CocyclicComplex::from_parts(name, spaces, faces, degens, taus).expect("consistent shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::*;
    use proptest::prelude::*;

    fn kz(n: usize) -> Arc<HopfData> {
        Arc::new(cyclic_group_algebra(n))
    }

    fn assert_valid(c: &CocyclicComplex) {
        let r = check_cocyclic(c);
        assert!(r.is_valid(), "{r}");
    }

    /// Orbits of `ℤ/m` acting on `(ℤ/m)^k` by adding the same element to
    /// every coordinate, counted by brute force.
    fn diagonal_orbits(m: usize, k: usize) -> usize {
        let tuples = multi_indices(&vec![m; k]).collect::<Vec<_>>();
        let mut seen = std::collections::BTreeSet::new();
        let mut orbits = 0;
        for t in tuples {
            if seen.contains(&t) {
                continue;
            }
            orbits += 1;
            for s in 0..m {
                seen.insert(t.iter().map(|x| (x + s) % m).collect::<Vec<_>>());
            }
        }
        orbits
    }

    #[test]
    fn constant_complex_is_cocyclic() {
        assert_valid(&CocyclicComplex::constant(4));
    }

    #[test]
    fn negated_tau_breaks_only_the_period_at_two() {
        let c = CocyclicComplex::constant(3);
        let t = c.tau(2).scale(&Scalar::from_int(-1));
        let bad = c.with_tau(2, t);
        let r = check_cocyclic(&bad);
        assert!(r.failed_laws().contains(&"ce n=2"));
        assert!(!r.failed_laws().contains(&"ce n=1"));
    }

    #[test]
    fn ground_coalgebra_complex_is_constant() {
        let h = Arc::new(HopfData::ground());
        let c = build_coalgebra_complex(&ModuleCoalgebra::regular(h.clone()), &SAYDModule::trivial(h), 3).unwrap();
        assert_valid(&c);
        assert!(c.same_operators(&CocyclicComplex::constant(3)));
    }

    #[test]
    fn group_coalgebra_complex_dims_count_orbits() {
        for n in [2, 3] {
            let h = kz(n);
            for sigma in ["e", "g"] {
                let mp = modular_pair(&h, h.counit_vec().clone(), sigma);
                let m = mpi_coefficients(&mp);
                let c = build_coalgebra_complex(&ModuleCoalgebra::regular(h.clone()), &m, 2).unwrap();
                assert_valid(&c);
                for d in 0..=3 {
                    assert_eq!(c.dim(d), diagonal_orbits(n, d + 1), "kZ{n} sigma={sigma} degree {d}");
                }
            }
        }
    }

    #[test]
    fn coalgebra_tau_zero_is_identity_with_trivial_coefficients() {
        let h = kz(2);
        let c = build_coalgebra_complex(&ModuleCoalgebra::regular(h.clone()), &SAYDModule::trivial(h), 1).unwrap();
        assert_eq!(c.tau(0), &SparseMatrix::identity(c.dim(0)));
    }

    #[test]
    fn algebra_complex_of_translation_action() {
        let h = kz(2);
        let ma = translation_module_algebra(&h, 2);
        let c = build_algebra_complex(&ma, &SAYDModule::trivial(h), 2).unwrap();
        assert!(c.convention.is_some());
        for d in 0..=3 {
            assert_eq!(c.dim(d), diagonal_orbits(2, d + 1));
        }
        let again = build_algebra_complex(&translation_module_algebra(&kz(2), 2), &SAYDModule::trivial(kz(2)), 2).unwrap();
        assert!(c.same_operators(&again));
    }

    #[test]
    fn algebra_complex_of_trivial_action_is_full_dual() {
        let h = kz(2);
        let ma = ModuleAlgebra::adjoint(h.clone());
        let c = build_algebra_complex(&ma, &SAYDModule::trivial(h), 2).unwrap();
        assert_eq!(c.dims(), vec![2, 4, 8, 16]);
        assert_eq!(c.tau(0), &SparseMatrix::identity(2));
    }

    #[test]
    fn ground_algebra_and_comodule_complexes_are_constant() {
        let h = Arc::new(HopfData::ground());
        let m = SAYDModule::trivial(h.clone());
        let a = build_algebra_complex(&ModuleAlgebra::adjoint(h.clone()), &m, 3).unwrap();
        let b = build_comodule_algebra_complex(&ComoduleAlgebra::regular(h), &m, 3).unwrap();
        assert!(a.same_operators(&CocyclicComplex::constant(3)));
        assert!(b.same_operators(&CocyclicComplex::constant(3)));
    }

    #[test]
    fn comodule_complex_of_graded_group_algebra() {
        for n in [2, 3] {
            let h = kz(n);
            let c = build_comodule_algebra_complex(&graded_group_algebra(&h), &SAYDModule::trivial(h), 2).unwrap();
            for d in 0..=3 {
                // colinear maps into a coinvariant module live on tuples of total degree 0
                let zero_sum = multi_indices(&vec![n; d + 1]).filter(|t| t.iter().sum::<usize>() % n == 0).count();
                assert_eq!(c.dim(d), zero_sum);
            }
            assert_eq!(c.tau(1).pow(2), SparseMatrix::identity(c.dim(1)));
        }
    }

    #[test]
    fn hopf_complex_of_kz2_with_trivial_pair() {
        let h = kz(2);
        let hc = build_hopf_complex(&ModularPair::trivial(h), 2).unwrap();
        assert_eq!(hc.ans.dims(), vec![1, 2, 4, 8]);
        assert_eq!(hc.ans.tau(0), &SparseMatrix::identity(1));
        assert_valid(&hc.ans);
        assert_valid(&hc.coalgebra);
    }

    #[test]
    fn last_ans_face_appends_sigma() {
        let h = kz(2);
        let mp = modular_pair(&h, h.counit_vec().clone(), "g");
        let hc = build_hopf_complex(&mp, 2).unwrap();
        let g = SparseMatrix::column_vector(2, element(&h, "g"));
        assert_eq!(hc.ans.face(1, 2), &SparseMatrix::identity(2).kron(&g));
    }

    #[test]
    fn sweedler_pairs_in_involution_give_certified_complexes() {
        let h = Arc::new(sweedler());
        for (delta, sigma) in [(sign_character(&h), "1"), (h.counit_vec().clone(), "g")] {
            let hc = build_hopf_complex(&modular_pair(&h, delta, sigma), 2).unwrap();
            assert_valid(&hc.ans);
            for d in 0..=3 {
                assert_eq!(hc.ans.dim(d), 4usize.pow(d as u32));
            }
        }
        let bad = build_hopf_complex(&ModularPair::trivial(h), 1);
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sweedler_algebra_complex_picks_a_convention() {
        let h = Arc::new(sweedler());
        let m = mpi_coefficients(&modular_pair(&h, sign_character(&h), "1"));
        let c = build_algebra_complex(&ModuleAlgebra::adjoint(h), &m, 1).unwrap();
        assert_valid(&c);
    }

    #[test]
    fn diagonal_equals_product() {
        let h = kz(2);
        let c1 = build_coalgebra_complex(&ModuleCoalgebra::regular(h.clone()), &SAYDModule::trivial(h.clone()), 2).unwrap();
        let c2 = build_algebra_complex(&translation_module_algebra(&h, 2), &SAYDModule::trivial(h), 2).unwrap();
        let b = tensor_bicocyclic(&c2, &c1);
        assert!(b.check_commuting(2).is_valid());
        let d = diagonal(&b);
        let p = product_complex(&c2, &c1);
        assert!(d.same_operators(&p));
        assert_valid(&d);
    }

    #[test]
    fn diagonal_with_a_point_is_the_original() {
        let h = kz(3);
        let c = build_coalgebra_complex(&ModuleCoalgebra::regular(h.clone()), &SAYDModule::trivial(h), 2).unwrap();
        let d = diagonal(&tensor_bicocyclic(&c, &CocyclicComplex::constant(2)));
        assert!(d.same_operators(&c));
    }

    #[test]
    fn text_dump_round_trips() {
        let h = kz(2);
        let c = build_hopf_complex(&ModularPair::trivial(h), 2).unwrap().ans;
        let back = CocyclicComplex::from_text(&c.to_text()).unwrap();
        assert!(back.same_operators(&c));
        assert_eq!(back.to_text(), c.to_text());
    }

    #[test]
    fn malformed_dump_is_rejected() {
        assert!(CocyclicComplex::from_text("cocyclic 2\n").is_err());
        let mut text = CocyclicComplex::constant(1).to_text();
        text = text.replace("tau 2", "tau 2\n");
        text.push_str("bogus 0\n");
        assert!(CocyclicComplex::from_text(&text).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn cyclic_group_pairs_are_certified(n in 1usize..5, k in 0usize..4) {
            let h = kz(n);
            let sigma = SparseVec::unit(k % n);
            let mp = ModularPair::new(h.clone(), h.counit_vec().clone(), sigma);
            let hc = build_hopf_complex(&mp, 1).unwrap();
            prop_assert!(check_cocyclic(&hc.ans).is_valid());
            prop_assert_eq!(hc.coalgebra.dims(), hc.ans.dims());
        }
    }
}
