//! Command dispatch and text reports.

use std::fmt::Write as _;
use std::path::PathBuf;

use hopf_cyclic::cocyclic::{
    build_algebra_complex, build_comodule_algebra_complex, build_hopf_complex, check_cocyclic, product_complex, Cochain,
    CocyclicComplex,
};
use hopf_cyclic::cohomology::{
    alternating_faces, bb_certificate, compute_cohomology, connes_B, cyclic_representatives, hochschild_representatives,
    is_coboundary, BBData,
};
use hopf_cyclic::cupprod::{
    aw_cup, aw_cup_chain, certify_char_map, certify_cup_map, certify_psi_c, certify_trace_pairing, char_map, cotrace_cup,
    cup_explicit_coalgebra, cup_explicit_crossed, dg_expand_oracle, shuffle_cup_traces, shuffle_set, trace_violations,
    CupContext, CupKind, CupResult,
};
use hopf_cyclic::hopf::{validate_algebra, validate_hopf};
use hopf_cyclic::linalg::Realization;
use hopf_cyclic::report::{render_vector, ValidationReport};
use hopf_cyclic::symmetry::{
    mpi_coefficients, validate_comodule_algebra, validate_module_algebra, validate_sayd, CoalgebraAction,
};
use hopf_cyclic::{Error as CoreError, SparseVec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cache::{sha256_hex, Cache, VERSION};
use crate::model::{ContextSpec, Model};
use crate::spec::{print_spec, ItemKind, Op, SpecError, SpecFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CupChoice {
    Coalgebra,
    Crossed,
    Relative,
    Traces,
}

impl CupChoice {
    pub fn name(self) -> &'static str {
        match self {
            CupChoice::Coalgebra => "coalgebra",
            CupChoice::Crossed => "crossed",
            CupChoice::Relative => "relative",
            CupChoice::Traces => "traces",
        }
    }

    fn context_kind(self) -> CupKind {
        match self {
            CupChoice::Coalgebra => CupKind::Coalgebra,
            CupChoice::Relative => CupKind::Relative,
            CupChoice::Crossed | CupChoice::Traces => CupKind::Crossed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Identities,
    Cohomology,
    Cup { kind: CupChoice, p: usize, q: usize },
    Audit,
    /// The tasks listed in the spec's `params tasks=`.
    Tasks,
}

impl Command {
    pub fn name(&self) -> String {
        match self {
            Command::Validate => "validate".into(),
            Command::Identities => "identities".into(),
            Command::Cohomology => "cohomology".into(),
            Command::Cup { kind, p, q } => format!("cup --kind {} --p {p} --q {q}", kind.name()),
            Command::Audit => "audit".into(),
            Command::Tasks => "run".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Flags {
    pub max_degree: Option<usize>,
    pub seed: u64,
    pub cache: Cache,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            max_degree: None,
            seed: 0,
            cache: Cache::disabled(),
        }
    }
}

/// One block of a report. A line starting with `FAIL` is a failed check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    pub lines: Vec<String>,
    pub failures: usize,
}

impl Section {
    fn new(title: impl Into<String>) -> Self {
        Section {
            title: title.into(),
            ..Default::default()
        }
    }

    fn info(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        let line = line.into();
        if ok {
            self.lines.push(format!("ok   {line}"));
        } else {
            self.failures += 1;
            self.lines.push(format!("FAIL {line}"));
        }
    }

    fn report(&mut self, label: &str, r: &ValidationReport) {
        self.check(
            r.is_valid(),
            format!("{label}: {} instances, {} violations", r.checked, r.violations.len()),
        );
        if !r.is_valid() {
            self.info(format!("     failed laws: {}", r.failed_laws().join("; ")));
            for v in r.violations.iter().take(8) {
                self.info(format!("     {} at {}: {}", v.law, v.witness, v.discrepancy));
            }
        }
    }

    fn error(&mut self, label: &str, e: &CoreError) {
        self.check(false, format!("{label}: {e}"));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub command: String,
    pub input_hash: String,
    pub version: String,
    pub max_degree: usize,
    pub cup_degree: usize,
    pub sections: Vec<Section>,
}

impl RunReport {
    pub fn failures(&self) -> usize {
        self.sections.iter().map(|s| s.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "hopf-cyclic report");
        let _ = writeln!(s, "version {}", self.version);
        let _ = writeln!(s, "command {}", self.command);
        let _ = writeln!(s, "input sha256 {}", self.input_hash);
        let _ = writeln!(s, "max_degree {}", self.max_degree);
        let _ = writeln!(s, "cup_degree {}", self.cup_degree);
        for sec in &self.sections {
            let _ = writeln!(s, "\n[{}]", sec.title);
            for l in &sec.lines {
                let _ = writeln!(s, "{l}");
            }
        }
        let _ = writeln!(
            s,
            "\nstatus {} ({} failed checks)",
            if self.passed() { "ok" } else { "FAILED" },
            self.failures()
        );
        s
    }
}

/// Cup-product degrees stay at or below this unless the spec asks for less.
pub const CUP_DEGREE_CAP: usize = 3;

pub const DEFAULT_MAX_DEGREE: usize = 5;

struct Runner<'a> {
    spec: &'a SpecFile,
    model: Model,
    canonical: String,
    n: usize,
    cup_n: usize,
    /// Chain maps and context identities are certified on complexes built
    /// to this degree, which covers every degree a cup product reaches.
    chain_n: usize,
    flags: &'a Flags,
}

fn bb_check(sec: &mut Section, label: &str, c: &CocyclicComplex) -> Option<BBData> {
    sec.report(&format!("cocyclic identities of {label}"), &check_cocyclic(c));
    match connes_B(c) {
        Ok(bb) => {
            sec.report(&format!("b and B certificates of {label}"), &bb_certificate(c, &bb));
            Some(bb)
        }
        Err(e) => {
            sec.error(&format!("b and B of {label}"), &e);
            None
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl<'a> Runner<'a> {
    fn new(spec: &'a SpecFile, flags: &'a Flags) -> Result<Self, CliError> {
        let model = Model::resolve(spec)?;
        let n = flags.max_degree.or(spec.param_usize("max_degree")).unwrap_or(DEFAULT_MAX_DEGREE);
        let cup_n = spec.param_usize("cup_degree").unwrap_or(CUP_DEGREE_CAP).min(CUP_DEGREE_CAP).min(n);
        Ok(Runner {
            spec,
            model,
            canonical: print_spec(spec),
            n,
            cup_n,
            chain_n: cup_n.saturating_sub(1).max(1),
            flags,
        })
    }

    /// Pairs whose coefficient module is SAYD, in spec order.
    fn valid_pairs(&self) -> Vec<&(String, hopf_cyclic::hopf::ModularPair)> {
        self.model
            .pairs
            .iter()
            .filter(|(_, mp)| mp.validate_structure().is_valid() && validate_sayd(&mpi_coefficients(mp)).is_valid())
            .collect()
    }

    fn context(&self, c: &ContextSpec, n_max: usize) -> hopf_cyclic::Result<CupContext> {
        let ma = self.model.module(&c.module).expect("resolved").clone();
        let m = mpi_coefficients(self.model.pair(&c.pair).expect("resolved"));
        match c.kind {
            CupKind::Coalgebra => CupContext::coalgebra(CoalgebraAction::regular(ma), m, n_max),
            CupKind::Relative => {
                let sub = self.model.sub(c.sub.as_deref().expect("resolved")).expect("resolved").clone();
                CupContext::relative(ma, sub, m, n_max)
            }
            CupKind::Crossed => {
                let ba = self.model.comodule(c.comodule.as_deref().expect("resolved")).expect("resolved").clone();
                CupContext::crossed(ma, ba, m, n_max)
            }
        }
    }

    fn trace_of(&self, c: &ContextSpec) -> Option<SparseVec> {
        c.trace.as_deref().and_then(|t| self.model.trace(t)).map(|t| t.values.clone())
    }

    fn validate(&self) -> Section {
        let mut sec = Section::new("validate");
        for (name, h) in &self.model.hopfs {
            sec.report(&format!("hopf {name}"), &validate_hopf(h));
        }
        for (name, a) in &self.model.algebras {
            sec.report(&format!("algebra {name}"), &validate_algebra(a));
        }
        for (name, ma) in &self.model.modules {
            sec.report(&format!("module algebra {name}"), &validate_module_algebra(ma));
        }
        for (name, ba) in &self.model.comodules {
            sec.report(&format!("comodule algebra {name}"), &validate_comodule_algebra(ba));
        }
        for (name, mp) in &self.model.pairs {
            let mut r = mp.validate_structure();
            r.absorb(validate_sayd(&mpi_coefficients(mp)));
            sec.report(&format!("modular pair in involution {name}"), &r);
        }
        for (name, sub) in &self.model.subs {
            sec.report(&format!("sub-Hopf algebra {name}"), &sub.validate());
        }
        for c in &self.model.contexts {
            match self.context(c, 0) {
                Ok(_) => sec.check(true, format!("context {} ({})", c.name, c.kind.name())),
                Err(e) => sec.error(&format!("context {}", c.name), &e),
            }
            if let Some(tr) = self.trace_of(c) {
                let mp = self.model.pair(&c.pair).expect("resolved");
                let ma = self.model.module(&c.module).expect("resolved");
                let v = trace_violations(mp, ma, &tr);
                sec.check(
                    v.is_empty(),
                    format!("trace {} of context {}: {} violations", c.trace.as_deref().unwrap_or(""), c.name, v.len()),
                );
            }
        }
        sec
    }

    fn identities(&self) -> Section {
        let n = self.n;
        let mut sec = Section::new("identities");
        sec.info(format!("complexes built to N = {n}; identities checked through degree {}", n + 1));
        for (pn, mp) in self.valid_pairs() {
            match build_hopf_complex(mp, n) {
                Ok(hc) => {
                    sec.check(true, format!("normalization I for pair {pn} conjugates all operators, degrees 0..{}", n + 1));
                    bb_check(&mut sec, &format!("Hopf complex of {pn}"), &hc.coalgebra);
                    bb_check(&mut sec, &format!("Ans complex of {pn}"), &hc.ans);
                }
                Err(e) => sec.error(&format!("Hopf complex of {pn}"), &e),
            }
        }
        for (mn, ma) in &self.model.modules {
            for (pn, mp) in self.valid_pairs() {
                if mp.hopf != ma.hopf {
                    continue;
                }
                match build_algebra_complex(ma, &mpi_coefficients(mp), n) {
                    Ok(c) => {
                        bb_check(&mut sec, &format!("algebra complex of {mn} with {pn}"), &c);
                    }
                    Err(e) => sec.error(&format!("algebra complex of {mn} with {pn}"), &e),
                }
            }
        }
        for (bn, ba) in &self.model.comodules {
            for (pn, mp) in self.valid_pairs() {
                if mp.hopf != ba.hopf {
                    continue;
                }
                match build_comodule_algebra_complex(ba, &mpi_coefficients(mp), n) {
                    Ok(c) => {
                        bb_check(&mut sec, &format!("comodule algebra complex of {bn} with {pn}"), &c);
                    }
                    Err(e) => sec.error(&format!("comodule algebra complex of {bn} with {pn}"), &e),
                }
            }
        }
        for c in &self.model.contexts {
            match self.context(c, self.chain_n) {
                Ok(ctx) => {
                    sec.info(format!("context {} built to N = {}", c.name, self.chain_n));
                    if c.kind == CupKind::Relative {
                        bb_check(&mut sec, &format!("relative coalgebra complex of {}", c.name), &ctx.second);
                    }
                    bb_check(&mut sec, &format!("diagonal complex of {}", c.name), &ctx.diagonal);
                    bb_check(&mut sec, &format!("product complex of {}", c.name), &product_complex(&ctx.first, &ctx.second));
                }
                Err(e) => sec.error(&format!("context {}", c.name), &e),
            }
        }
        for (name, c) in &self.model.complexes {
            bb_check(&mut sec, &format!("complex {name}"), c);
        }
        sec
    }

    fn cohomology(&self) -> Section {
        let n = self.n;
        let mut sec = Section::new("cohomology");
        let mut tables: Vec<(String, CocyclicComplex)> = Vec::new();
        for (pn, mp) in self.valid_pairs() {
            let key = Cache::key(&self.canonical, &format!("hopf complex of pair {pn}"), n);
            match self.flags.cache.get_or_build(&key, || build_hopf_complex(mp, n).map(|h| h.coalgebra)) {
                Ok(c) => tables.push((format!("Hopf complex of pair {pn}"), c)),
                Err(e) => sec.error(&format!("Hopf complex of pair {pn}"), &e),
            }
        }
        for (name, c) in &self.model.complexes {
            tables.push((format!("complex {name}"), c.clone()));
        }
        for (label, c) in tables {
            match compute_cohomology(&c) {
                Ok(r) => {
                    sec.check(true, label.clone());
                    for l in r.to_text().lines().skip(1) {
                        sec.info(format!("     {l}"));
                    }
                    let hc: Vec<String> = r.trusted_hc().iter().map(|d| d.to_string()).collect();
                    sec.info(format!("     HC trusted {}", hc.join(" ")));
                }
                Err(e) => sec.error(&label, &e),
            }
        }
        sec
    }

    fn contexts_of(&self, kind: CupKind) -> impl Iterator<Item = &ContextSpec> {
        self.model.contexts.iter().filter(move |c| c.kind == kind)
    }

    fn cup(&self, choice: CupChoice, p: usize, q: usize) -> Section {
        let mut sec = Section::new(format!("cup {}", choice.name()));
        let n = p + q;
        if n > CUP_DEGREE_CAP {
            sec.check(false, format!("total degree {n} exceeds the cup-product cap {CUP_DEGREE_CAP}"));
            return sec;
        }
        let mut any = false;
        for c in self.contexts_of(choice.context_kind()) {
            any = true;
            let ctx = match self.context(c, n.max(1)) {
                Ok(ctx) => ctx,
                Err(e) => {
                    sec.error(&format!("context {}", c.name), &e);
                    continue;
                }
            };
            let chain_n = n.saturating_sub(1).max(1);
            let cert = self.context(c, chain_n).and_then(|small| {
                if choice == CupChoice::Traces {
                    certify_trace_pairing(&small)
                } else {
                    certify_cup_map(&small)
                }
            });
            match cert {
                Ok(()) => sec.check(true, format!("context {}: chain map certified through degree {}", c.name, chain_n + 1)),
                Err(e) => {
                    sec.error(&format!("context {}", c.name), &e);
                    continue;
                }
            }
            let (Ok(b1), Ok(b2)) = (connes_B(&ctx.first), connes_B(&ctx.second)) else {
                sec.check(false, format!("context {}: no (b,B) structure on the factors", c.name));
                continue;
            };
            let left = cyclic_representatives(&ctx.first, &b1, p);
            let right = cyclic_representatives(&ctx.second, &b2, q);
            sec.info(format!(
                "context {}: {} cyclic classes in degree {p}, {} in degree {q}",
                c.name,
                left.len(),
                right.len()
            ));
            let space = ctx.target.space(n).clone();
            for (i, u) in left.iter().enumerate() {
                for (j, v) in right.iter().enumerate() {
                    let (phi, x) = (Cochain::new(p, u.clone()), Cochain::new(q, v.clone()));
                    let label = format!("context {} [{i}]∪[{j}]", c.name);
                    let (res, extra) = match choice {
                        CupChoice::Coalgebra => {
                            let explicit = cup_explicit_coalgebra(&ctx, &phi, &x);
                            let ok = explicit.is_ok();
                            (aw_cup(&ctx, &phi, &x), Some((ok, format!("explicit formula {}", if ok { "agrees" } else { "disagrees" }))))
                        }
                        CupChoice::Relative => (aw_cup(&ctx, &phi, &x), None),
                        CupChoice::Crossed => match cup_explicit_crossed(&ctx, &phi, &x) {
                            Ok(r) => {
                                let m = format!("printed candidate {}", if r.matches { "matches" } else { "differs" });
                                (Ok(r.normative), Some((true, m)))
                            }
                            Err(e) => (Err(e), None),
                        },
                        CupChoice::Traces => match shuffle_cup_traces(&ctx, &phi, &x) {
                            Ok(s) => {
                                let aw = aw_cup_chain(&ctx, &phi, &x).expect("checked inputs");
                                let diff = s.cochain.coeffs.sub(&aw.coeffs);
                                let below = n.checked_sub(1).map(|k| alternating_faces(&ctx.target, k));
                                let coh = is_coboundary(&diff, below.as_ref());
                                (Ok(s), Some((coh, format!("cohomologous to AW {}", yes(coh)))))
                            }
                            Err(e) => (Err(e), None),
                        },
                    };
                    match res {
                        Ok(r) => {
                            let extra_ok = extra.as_ref().is_none_or(|(ok, _)| *ok);
                            let ok = r.closed && (!r.inputs_cyclic || r.cyclic) && extra_ok;
                            let tail = extra.map(|(_, m)| format!(", {m}")).unwrap_or_default();
                            sec.check(
                                ok,
                                format!("{label}: closed {} cyclic {} exact {}{tail}", yes(r.closed), yes(r.cyclic), yes(r.exact)),
                            );
                            sec.info(format!("     {}", render_vector(&r.cochain.coeffs, &space)));
                        }
                        Err(e) => sec.error(&label, &e),
                    }
                }
            }
        }
        if !any {
            sec.info(format!("no {} contexts in this spec", choice.context_kind().name()));
        }
        sec
    }

    fn chain_maps(&self) -> Section {
        let mut sec = Section::new("chain maps");
        for c in &self.model.contexts {
            let ctx = match self.context(c, self.chain_n) {
                Ok(ctx) => ctx,
                Err(e) => {
                    sec.error(&format!("context {}", c.name), &e);
                    continue;
                }
            };
            let top = self.chain_n + 1;
            let mut record = |what: &str, r: hopf_cyclic::Result<()>| match r {
                Ok(()) => sec.check(true, format!("{what} of context {} commutes with faces, degeneracies and τ, degrees 0..{top}", c.name)),
                Err(e) => sec.error(&format!("{what} of context {}", c.name), &e),
            };
            match c.kind {
                CupKind::Coalgebra => {
                    record("Ψ_c", certify_psi_c(&ctx));
                    record("Ψ", certify_cup_map(&ctx));
                }
                CupKind::Relative => record("Ψ_r", certify_cup_map(&ctx)),
                CupKind::Crossed => {
                    record("Ψ", certify_cup_map(&ctx));
                    record("trace pairing", certify_trace_pairing(&ctx));
                }
            }
            if let Some(tr) = self.trace_of(c) {
                let mp = self.model.pair(&c.pair).expect("resolved");
                record("χ", certify_char_map(mp, &ctx.ma, &tr, self.chain_n));
            }
        }
        sec
    }

    fn closure(&self) -> Section {
        let mut sec = Section::new("cup closure");
        for c in &self.model.contexts {
            let Ok(ctx) = self.context(c, self.cup_n) else {
                sec.check(false, format!("context {} could not be built", c.name));
                continue;
            };
            let (Ok(b1), Ok(b2)) = (connes_B(&ctx.first), connes_B(&ctx.second)) else {
                sec.check(false, format!("context {}: no (b,B) structure on the factors", c.name));
                continue;
            };
            let mut products = 0;
            let mut bad: Vec<String> = Vec::new();
            let mut tally = |what: &str, p: usize, q: usize, r: hopf_cyclic::Result<CupResult>| {
                products += 1;
                match r {
                    Ok(r) if r.closed && (!r.inputs_cyclic || r.cyclic) => {}
                    Ok(r) => bad.push(format!("{what} ({p},{q}): closed {} cyclic {}", yes(r.closed), yes(r.cyclic))),
                    Err(e) => bad.push(format!("{what} ({p},{q}): {e}")),
                }
            };
            for cyclic in [false, true] {
                for p in 0..=self.cup_n {
                    for q in 0..=self.cup_n - p {
                        let reps = |c: &CocyclicComplex, bb: &BBData, k: usize| {
                            let v = if cyclic {
                                cyclic_representatives(c, bb, k)
                            } else {
                                hochschild_representatives(bb, k)
                            };
                            v.into_iter().map(move |x| Cochain::new(k, x)).collect::<Vec<_>>()
                        };
                        let left = reps(&ctx.first, &b1, p);
                        let right = reps(&ctx.second, &b2, q);
                        for phi in &left {
                            for x in &right {
                                tally("AW", p, q, aw_cup(&ctx, phi, x));
                                match c.kind {
                                    CupKind::Crossed => tally("shuffle", p, q, shuffle_cup_traces(&ctx, phi, x)),
                                    CupKind::Coalgebra | CupKind::Relative => {}
                                }
                            }
                        }
                        if c.kind == CupKind::Coalgebra {
                            // x∪φ with x in degree p and φ in degree q
                            for x in reps(&ctx.second, &b2, p) {
                                for phi in reps(&ctx.first, &b1, q) {
                                    tally("cotrace", p, q, cotrace_cup(&ctx, &x, &phi));
                                }
                            }
                        }
                    }
                }
            }
            sec.check(
                bad.is_empty(),
                format!(
                    "context {}: {products} products of cocycles with p+q <= {}, {} not closed or not cyclic",
                    c.name,
                    self.cup_n,
                    bad.len()
                ),
            );
            for b in bad.iter().take(8) {
                sec.info(format!("     {b}"));
            }
        }
        sec
    }

    fn calibration(&self) -> Section {
        let mut sec = Section::new("calibration");
        for c in &self.model.contexts {
            let Ok(ctx) = self.context(c, self.cup_n) else {
                sec.check(false, format!("context {} could not be built", c.name));
                continue;
            };
            match c.kind {
                CupKind::Coalgebra => {
                    let mut total = 0;
                    let mut mismatched = 0;
                    for p in 0..=self.cup_n {
                        for q in 0..=self.cup_n - p {
                            for i in 0..ctx.first.dim(p) {
                                for j in 0..ctx.second.dim(q) {
                                    total += 1;
                                    let phi = Cochain::new(p, SparseVec::unit(i));
                                    let x = Cochain::new(q, SparseVec::unit(j));
                                    if cup_explicit_coalgebra(&ctx, &phi, &x).is_err() {
                                        mismatched += 1;
                                    }
                                }
                            }
                        }
                    }
                    sec.check(
                        mismatched == 0,
                        format!(
                            "context {}: explicit formula equals Ψ∘AW on {} of {total} basis pairs, p+q <= {}",
                            c.name,
                            total - mismatched,
                            self.cup_n
                        ),
                    );
                }
                CupKind::Crossed => {
                    let (Ok(b1), Ok(b2)) = (connes_B(&ctx.first), connes_B(&ctx.second)) else { continue };
                    let mut total = 0;
                    let mut matched = 0;
                    for p in 0..=self.cup_n {
                        for q in 0..=self.cup_n - p {
                            for u in cyclic_representatives(&ctx.first, &b1, p) {
                                for v in cyclic_representatives(&ctx.second, &b2, q) {
                                    total += 1;
                                    if cup_explicit_crossed(&ctx, &Cochain::new(p, u.clone()), &Cochain::new(q, v))
                                        .is_ok_and(|r| r.matches)
                                    {
                                        matched += 1;
                                    }
                                }
                            }
                        }
                    }
                    sec.info(format!(
                        "     context {}: printed crossed formula matches Ψ∘AW on {matched} of {total} cyclic pairs (informational)",
                        c.name
                    ));
                }
                CupKind::Relative => {}
            }
        }
        sec
    }

    fn degenerate(&self) -> Section {
        let mut sec = Section::new("characteristic map");
        for c in &self.model.contexts {
            let Some(tr) = self.trace_of(c) else { continue };
            if c.kind != CupKind::Coalgebra {
                continue;
            }
            let mp = self.model.pair(&c.pair).expect("resolved");
            let run = || -> hopf_cyclic::Result<(usize, usize)> {
                let ctx = self.context(c, self.cup_n)?;
                let hc = build_hopf_complex(mp, self.cup_n)?;
                if !ctx.second.same_operators(&hc.coalgebra) {
                    return Err(CoreError::InvalidInput("coalgebra side is not the Hopf complex".into()));
                }
                let coords = match &ctx.first.realizations[0] {
                    Realization::Full(_) => tr.clone(),
                    Realization::Subspace(s) => s.coords(&tr),
                    Realization::Quotient(qt) => qt.projection().mul_vec(&tr),
                };
                let phi = Cochain::new(0, coords);
                let (mut total, mut equal) = (0, 0);
                for k in 0..=self.cup_n {
                    let chi = char_map(mp, &ctx.ma, &tr, k)?;
                    for j in 0..ctx.second.dim(k) {
                        let x = Cochain::new(k, SparseVec::unit(j));
                        let lhs = aw_cup_chain(&ctx, &phi, &x)?;
                        let rhs = chi.mul_vec(&hc.iso[k].mul_vec(&x.coeffs));
                        total += 1;
                        if lhs.coeffs == rhs {
                            equal += 1;
                        }
                    }
                }
                Ok((equal, total))
            };
            match run() {
                Ok((equal, total)) => sec.check(
                    equal == total,
                    format!("context {}: τ∪x equals χ(I x) on {equal} of {total} basis cochains", c.name),
                ),
                Err(e) => sec.error(&format!("context {}", c.name), &e),
            }
        }
        sec
    }

    fn shuffles(&self) -> Section {
        let mut sec = Section::new("shuffles");
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
        let mut ok = true;
        for total in 0..=6 {
            for q in 0..=total {
                ok &= shuffle_set(q, total - q).len() == binom(total, q);
            }
        }
        sec.check(ok, "|Sh(q,p)| = binomial(p+q, q) for p+q <= 6");
        for n in 0..=3 {
            for q in 0..=n {
                let p = n - q;
                match dg_expand_oracle(p, q) {
                    Ok(r) => sec.check(
                        r.matches,
                        format!(
                            "θ^{n} component (p,q) = ({p},{q}): {} expanded words against {} shuffles",
                            r.expanded_terms, r.shuffles
                        ),
                    ),
                    Err(e) => sec.error(&format!("oracle ({p},{q})"), &e),
                }
            }
        }
        sec
    }

    /// HC tables of the pairs and the context dimensions.
    fn dimension_tables(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (pn, mp) in self.valid_pairs() {
            if let Ok(r) = build_hopf_complex(mp, self.n).and_then(|h| compute_cohomology(&h.coalgebra)) {
                out.push(format!("pair {pn}: HH {:?} HC {:?}", r.hh, r.hc));
            }
        }
        for c in &self.model.contexts {
            if let Ok(ctx) = self.context(c, self.cup_n) {
                out.push(format!(
                    "context {}: {:?} {:?} {:?}",
                    c.name,
                    ctx.first.dims(),
                    ctx.second.dims(),
                    ctx.target.dims()
                ));
            }
        }
        out
    }

    fn permutation(&self) -> Section {
        let mut sec = Section::new("basis permutation");
        let permuted = permute_bases(self.spec, self.flags.seed);
        let flags = Flags {
            max_degree: Some(self.n),
            seed: self.flags.seed,
            cache: Cache::disabled(),
        };
        let other = match Runner::new(&permuted, &flags) {
            Ok(r) => r,
            Err(e) => {
                sec.check(false, format!("permuted spec does not resolve: {e}"));
                return sec;
            }
        };
        let mine = self.dimension_tables();
        let theirs = other.dimension_tables();
        sec.check(
            mine == theirs,
            format!("seed {}: {} dimension tables identical after permuting every basis", self.flags.seed, mine.len()),
        );
        for l in mine {
            sec.info(format!("     {l}"));
        }
        sec
    }
}

/// Shuffles the order of every `basis` line.
pub fn permute_bases(spec: &SpecFile, seed: u64) -> SpecFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = spec.clone();
    for item in &mut out.items {
        if !matches!(item.kind, ItemKind::Hopf | ItemKind::Algebra) {
            continue;
        }
        for st in &mut item.body {
            if let Op::Basis(names) = &mut st.op {
                names.shuffle(&mut rng);
            }
        }
    }
    out
}

pub fn run(spec: &SpecFile, command: &Command, flags: &Flags) -> Result<RunReport, CliError> {
    let r = Runner::new(spec, flags)?;
    let sections = match command {
        Command::Validate => vec![r.validate()],
        Command::Identities => vec![r.identities()],
        Command::Cohomology => vec![r.cohomology()],
        Command::Cup { kind, p, q } => vec![r.cup(*kind, *p, *q)],
        Command::Audit => vec![
            r.validate(),
            r.identities(),
            r.cohomology(),
            r.chain_maps(),
            r.closure(),
            r.calibration(),
            r.degenerate(),
            r.shuffles(),
            r.permutation(),
        ],
        Command::Tasks => {
            let mut out = Vec::new();
            for t in spec.tasks() {
                out.push(match t.as_str() {
                    "validate" => r.validate(),
                    "identities" => r.identities(),
                    "cohomology" => r.cohomology(),
                    "chain_maps" => r.chain_maps(),
                    "closure" => r.closure(),
                    "calibration" => r.calibration(),
                    "characteristic" => r.degenerate(),
                    "shuffles" => r.shuffles(),
                    "permutation" => r.permutation(),
                    other => return Err(CliError::Usage(format!("unknown task `{other}`"))),
                });
            }
            out
        }
    };
    Ok(RunReport {
        command: command.name(),
        input_hash: sha256_hex(&[&r.canonical]),
        version: VERSION.to_string(),
        max_degree: r.n,
        cup_degree: r.cup_n,
        sections,
    })
}

pub fn default_cache_dir() -> PathBuf {
    PathBuf::from(".hopf-cyclic-cache")
}
