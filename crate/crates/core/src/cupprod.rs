//! Cup products landing in the cyclic cochains of an algebra, the
//! characteristic map, shuffle products of twisted traces, and a formal
//! expansion oracle for `θⁿ` in a crossed-product DG algebra.
//!
//! Every map into a cyclic complex is built as a matrix against realized
//! bases and can be certified against all structure operators.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::cocyclic::{
    build_algebra_complex, build_ans_complex, build_coalgebra_complex, build_comodule_algebra_complex, build_cyclic_complex,
    diagonal, operator_slots, target, tensor_bicocyclic, Cochain, CocyclicComplex,
};
use crate::cohomology::{alternating_faces, is_coboundary, lambda, LambdaReading};
use crate::error::{Error, Result};
use crate::hopf::{iterated_coproduct, validate_algebra, AlgebraData, HopfData, ModularPair};
use crate::linalg::Realization;
use crate::report::ValidationReport;
use crate::scalar::Scalar;
use crate::space::{flat_index, multi_indices, product, unflatten};
use crate::sparse::{SparseMatrix, SparseVec};
use crate::symmetry::{
    convolution_algebra, crossed_product, invariant_subalgebra, natural_map, relative_action, relative_coalgebra,
    validate_coalgebra_action, validate_comodule_algebra, validate_module_algebra, validate_module_coalgebra,
    validate_natural_map, validate_relative_action, validate_sayd, CoalgebraAction, ComoduleAlgebra, ConvolutionAlgebra,
    InvariantSubalgebra, ModuleAlgebra, RelativeCoalgebra, SAYDModule, SubHopf,
};
use crate::tensor::StructureTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CupKind {
    /// `C_H(A,M) ⊗ C_H(C,M) → C(A)` through `Ψ = ♮∘Ψ_c`.
    Coalgebra,
    /// `C_H(A,M) ⊗ C_H(C(H,K),M) → C(A^K)` through `Ψ_r`.
    Relative,
    /// `C_H(A,M) ⊗ ^H C(B,M) → C(A⋊B)`.
    Crossed,
}

impl CupKind {
    pub fn name(self) -> &'static str {
        match self {
            CupKind::Coalgebra => "coalgebra",
            CupKind::Relative => "relative",
            CupKind::Crossed => "crossed",
        }
    }
}

/// The structure on the second tensor factor.
#[derive(Clone, Debug)]
pub enum Side {
    Coalgebra {
        ca: CoalgebraAction,
        conv: ConvolutionAlgebra,
        /// `♮: A → Hom_H(C,A)` in convolution coordinates.
        natural: SparseMatrix,
        /// `C(Hom_H(C,A))`, the codomain of `Ψ_c`.
        convolution: CocyclicComplex,
    },
    Relative {
        sub: SubHopf,
        rc: RelativeCoalgebra,
        inv: InvariantSubalgebra,
        /// `C(H,K) ⊗ A^K → A^K`
        action: StructureTensor,
    },
    Crossed {
        ba: ComoduleAlgebra,
        product: AlgebraData,
    },
}

/// Everything a cup product needs, validated and built to degree `N`.
#[derive(Clone, Debug)]
pub struct CupContext {
    pub m: SAYDModule,
    pub ma: ModuleAlgebra,
    pub side: Side,
    /// `C_H(A,M)`
    pub first: CocyclicComplex,
    /// `C_H(C,M)`, `C_H(C(H,K),M)` or `^H C(B,M)`
    pub second: CocyclicComplex,
    /// Cyclic complex of the target algebra.
    pub target: CocyclicComplex,
    /// Diagonal of `first ⊗ second`; coordinate `i·dim second + j`.
    pub diagonal: CocyclicComplex,
    first_lift: Vec<SparseMatrix>,
    second_lift: Vec<SparseMatrix>,
    /// `cup_map` per degree, filled on first use.
    cup_maps: Vec<OnceLock<SparseMatrix>>,
}

fn require(report: ValidationReport, what: &str) -> Result<()> {
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what}: {}", report.failed_laws().join(", "))))
    }
}

impl CupContext {
    pub fn coalgebra(ca: CoalgebraAction, m: SAYDModule, n_max: usize) -> Result<Self> {
        require(validate_module_algebra(&ca.ma), "module algebra")?;
        require(validate_module_coalgebra(&ca.mc), "module coalgebra")?;
        require(validate_coalgebra_action(&ca), "coalgebra action")?;
        require(validate_sayd(&m), "coefficients")?;
        let conv = convolution_algebra(&ca)?;
        let natural = natural_map(&ca, &conv)?;
        require(validate_natural_map(&ca, &conv, &natural), "natural map")?;
        let first = build_algebra_complex(&ca.ma, &m, n_max)?;
        let second = build_coalgebra_complex(&ca.mc, &m, n_max)?;
        let target = build_cyclic_complex(&ca.ma.alg, n_max)?;
        let convolution = build_cyclic_complex(&conv.alg, n_max)?;
        let ma = ca.ma.clone();
        let side = Side::Coalgebra {
            ca,
            conv,
            natural,
            convolution,
        };
        Ok(Self::assemble(m, ma, side, first, second, target))
    }

    pub fn relative(ma: ModuleAlgebra, sub: SubHopf, m: SAYDModule, n_max: usize) -> Result<Self> {
        require(validate_module_algebra(&ma), "module algebra")?;
        require(sub.validate(), "sub-Hopf algebra")?;
        require(validate_sayd(&m), "coefficients")?;
        let inv = invariant_subalgebra(&ma, &sub)?;
        let rc = relative_coalgebra(&ma.hopf, &sub)?;
        let action = relative_action(&ma, &rc, &inv)?;
        require(validate_relative_action(&rc, &inv, &action), "relative action")?;
        let first = build_algebra_complex(&ma, &m, n_max)?;
        let second = build_coalgebra_complex(&rc.mc, &m, n_max)?;
        let target = build_cyclic_complex(&inv.alg, n_max)?;
        let side = Side::Relative { sub, rc, inv, action };
        Ok(Self::assemble(m, ma, side, first, second, target))
    }

    pub fn crossed(ma: ModuleAlgebra, ba: ComoduleAlgebra, m: SAYDModule, n_max: usize) -> Result<Self> {
        require(validate_module_algebra(&ma), "module algebra")?;
        require(validate_comodule_algebra(&ba), "comodule algebra")?;
        require(validate_sayd(&m), "coefficients")?;
        let product = crossed_product(&ma, &ba)?;
        require(validate_algebra(&product), "crossed product")?;
        let first = build_algebra_complex(&ma, &m, n_max)?;
        let second = build_comodule_algebra_complex(&ba, &m, n_max)?;
        let target = build_cyclic_complex(&product, n_max)?;
        let side = Side::Crossed { ba, product };
        Ok(Self::assemble(m, ma, side, first, second, target))
    }

    fn assemble(m: SAYDModule, ma: ModuleAlgebra, side: Side, first: CocyclicComplex, second: CocyclicComplex, target: CocyclicComplex) -> Self {
        let diagonal = diagonal(&tensor_bicocyclic(&first, &second));
        let first_lift = first.realizations.iter().map(Realization::lift).collect();
        let second_lift = second.realizations.iter().map(Realization::lift).collect();
        let cup_maps = (0..=first.top()).map(|_| OnceLock::new()).collect();
        CupContext {
            m,
            ma,
            side,
            first,
            second,
            target,
            diagonal,
            first_lift,
            second_lift,
            cup_maps,
        }
    }

    pub fn kind(&self) -> CupKind {
        match self.side {
            Side::Coalgebra { .. } => CupKind::Coalgebra,
            Side::Relative { .. } => CupKind::Relative,
            Side::Crossed { .. } => CupKind::Crossed,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.first.max_degree().min(self.second.max_degree()).min(self.target.max_degree())
    }

    /// The algebra whose cyclic complex receives the cup product.
    pub fn target_algebra(&self) -> &AlgebraData {
        match &self.side {
            Side::Coalgebra { .. } => &self.ma.alg,
            Side::Relative { inv, .. } => &inv.alg,
            Side::Crossed { product, .. } => product,
        }
    }

    fn hopf(&self) -> &HopfData {
        &self.ma.hopf
    }
}

/// `φ(m ⊗ x⁰ ⊗ … ⊗ xⁿ)` for a functional on `M⊗A^{⊗n+1}` and slot vectors in `A`.
fn evaluate(phi: &SparseVec, da: usize, m: usize, slots: &[&SparseVec]) -> Scalar {
    let mut partial = vec![(m, Scalar::one())];
    for s in slots {
        let mut next = Vec::with_capacity(partial.len() * s.nnz());
        for (idx, c) in &partial {
            for (a, v) in s.iter() {
                next.push((idx * da + a, c * v));
            }
        }
        partial = next;
        if partial.is_empty() {
            return Scalar::zero();
        }
    }
    let mut acc = Scalar::zero();
    for (idx, c) in partial {
        let v = phi.get(idx);
        if !v.is_zero() {
            acc += &(c * &v);
        }
    }
    acc
}

fn kron_vec(a: &SparseVec, b: &SparseVec, db: usize) -> SparseVec {
    let mut out = Vec::with_capacity(a.nnz() * b.nnz());
    for (i, x) in a.iter() {
        for (j, y) in b.iter() {
            out.push((i * db + j, x * y));
        }
    }
    SparseVec::from_sorted(out)
}

fn tensor_columns<F>(ctx: &CupContext, n: usize, f: F) -> Vec<SparseVec>
where
    F: Fn(&SparseVec, &SparseVec) -> SparseVec + Sync,
{
    let (d1, d2) = (ctx.first.dim(n), ctx.second.dim(n));
    (0..d1 * d2)
        .into_par_iter()
        .map(|k| f(ctx.first_lift[n].column(k / d2), ctx.second_lift[n].column(k % d2)))
        .collect()
}

/// Rejects evaluation maps that do not vanish on the balancing relations of
/// a quotient second factor.
fn check_balanced<F>(name: &str, ctx: &CupContext, n: usize, f: &F) -> Result<()>
where
    F: Fn(&SparseVec, &SparseVec) -> SparseVec + Sync,
{
    let Realization::Quotient(q) = &ctx.second.realizations[n] else {
        return Ok(());
    };
    let bad = (0..ctx.first.dim(n)).into_par_iter().any(|i| {
        let phi = ctx.first_lift[n].column(i);
        q.relations().iter().any(|rel| !f(phi, rel).is_zero())
    });
    if bad {
        return Err(Error::IllDefined {
            op: format!("{name} on balanced tensors"),
            degree: n,
        });
    }
    Ok(())
}

/// Entries `c·dim A + a` of a map in `Hom(C,A)` coordinates, as a vector of `A`.
fn map_at(f: &SparseVec, c: usize, da: usize) -> SparseVec {
    SparseVec::from_sorted(f.iter().filter(|(i, _)| i / da == c).map(|(i, v)| (i % da, v.clone())).collect())
}

/// Shared body of `Ψ_c` and `Ψ_r`: `φ⊗m⊗c̃ ↦ (k̃ ↦ φ(m ⊗ g(c⁰,k⁰) ⊗ … ⊗ g(cⁿ,kⁿ)))`
/// where `g[k][c]` is a vector of `A`.
fn slotwise_evaluation(ctx: &CupContext, n: usize, name: &str, g: &[Vec<SparseVec>], dc: usize) -> Result<SparseMatrix> {
    let (dm, da) = (ctx.m.dim(), ctx.ma.alg.dim());
    let dk = g.len();
    let mut xdims = vec![dm];
    xdims.extend(std::iter::repeat_n(dc, n + 1));
    let kdims = vec![dk; n + 1];
    let rows = product(&kdims);
    let f = |phi: &SparseVec, x: &SparseVec| -> SparseVec {
        let terms: Vec<(Vec<usize>, &Scalar)> = x.iter().map(|(xi, xc)| (unflatten(&xdims, xi), xc)).collect();
        let mut out = Vec::new();
        for (row, ks) in multi_indices(&kdims).enumerate() {
            let mut val = Scalar::zero();
            for (idx, xc) in &terms {
                let slots: Vec<&SparseVec> = (0..=n).map(|t| &g[ks[t]][idx[t + 1]]).collect();
                let e = evaluate(phi, da, idx[0], &slots);
                if !e.is_zero() {
                    val += &(e * *xc);
                }
            }
            if !val.is_zero() {
                out.push((row, val));
            }
        }
        SparseVec::from_sorted(out)
    };
    check_balanced(name, ctx, n, &f)?;
    Ok(SparseMatrix::from_columns(rows, tensor_columns(ctx, n, f)))
}

/// `Ψ_c(φ⊗m⊗c̃)(f⁰⊗…⊗fⁿ) = φ(m⊗f⁰(c⁰)⊗…⊗fⁿ(cⁿ))`, from the diagonal into
/// `C^n(Hom_H(C,A))`.
pub fn psi_c(ctx: &CupContext, n: usize) -> Result<SparseMatrix> {
    let Side::Coalgebra { ca, conv, .. } = &ctx.side else {
        return Err(Error::InvalidInput("Ψ_c needs a coalgebra action".into()));
    };
    let (dc, da) = (ca.mc.coalg.dim(), ca.ma.alg.dim());
    let g: Vec<Vec<SparseVec>> = conv.subspace.basis().iter().map(|f| (0..dc).map(|c| map_at(f, c, da)).collect()).collect();
    slotwise_evaluation(ctx, n, "Ψ_c", &g, dc)
}

/// `Ψ = (♮^{⊗n+1})ᵀ ∘ Ψ_c`, landing in `C^n(A)`.
pub fn psi(ctx: &CupContext, n: usize) -> Result<SparseMatrix> {
    let Side::Coalgebra { natural, .. } = &ctx.side else {
        return Err(Error::InvalidInput("Ψ needs a coalgebra action".into()));
    };
    let mut pow = natural.clone();
    for _ in 0..n {
        pow = pow.kron(natural);
    }
    pow.transpose().compose(&psi_c(ctx, n)?)
}

/// `Ψ_r(φ⊗m⊗c̃)(a⁰⊗…⊗aⁿ) = φ(m⊗c⁰(a⁰)⊗…⊗cⁿ(aⁿ))` on `A^K`.
pub fn psi_r(ctx: &CupContext, n: usize) -> Result<SparseMatrix> {
    let Side::Relative { rc, inv, action, .. } = &ctx.side else {
        return Err(Error::InvalidInput("Ψ_r needs a relative context".into()));
    };
    let (dc, dk) = (rc.mc.coalg.dim(), inv.alg.dim());
    let g: Vec<Vec<SparseVec>> = (0..dk)
        .map(|k| {
            (0..dc)
                .map(|c| {
                    let v = SparseVec::from_pairs(action.image(&[c, k]).iter().map(|(o, x)| (o[0], x.clone())).collect());
                    inv.inclusion.mul_vec(&v)
                })
                .collect()
        })
        .collect();
    slotwise_evaluation(ctx, n, "Ψ_r", &g, dc)
}

/// How coaction legs of the `b`-letters are distributed over the `a`-slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Legs {
    /// Slot `i` gets `S⁻¹(bⁱ⁽⁻ⁱ⁻¹⁾…bⁿ⁽⁻ⁱ⁻¹⁾)`; `ψ` sees every `b⁽⁰⁾`.
    Antipodal,
    /// Slot `j ≥ 1` gets `(b⁰…bʲ⁻¹)⁽⁻ⁿ⁺ʲ⁻¹⁾`; `ψ` sees `b⁰⁽⁰⁾…bⁿ⁻¹⁽⁰⁾ ⊗ bⁿ`.
    Trace,
}

/// `ρ^{(k)}(b)`: legs outermost first, then the remaining `b⁽⁰⁾`.
fn iterated_coaction(ba: &ComoduleAlgebra, b: usize, k: usize) -> Vec<(Vec<usize>, usize, Scalar)> {
    let mut cur = vec![(Vec::new(), b, Scalar::one())];
    for _ in 0..k {
        let mut next = Vec::new();
        for (legs, b0, c) in &cur {
            for (o, v) in ba.coaction.at(*b0) {
                let mut l = legs.clone();
                l.push(o[0]);
                next.push((l, o[1], c * v));
            }
        }
        cur = next;
    }
    cur
}

/// One term of a crossed evaluation: `ψ` at tuple `v`, `φ` at the slot vectors.
struct Recipe {
    v: usize,
    slots: Vec<SparseVec>,
    coeff: Scalar,
}

struct CrossedTools<'a> {
    h: &'a HopfData,
    ba: &'a ComoduleAlgebra,
    acts: Vec<SparseMatrix>,
    da: usize,
    db: usize,
}

impl<'a> CrossedTools<'a> {
    fn new(ctx: &'a CupContext) -> Result<Self> {
        let Side::Crossed { ba, .. } = &ctx.side else {
            return Err(Error::InvalidInput("needs a crossed-product context".into()));
        };
        let h = ctx.hopf();
        Ok(CrossedTools {
            h,
            ba,
            acts: (0..h.dim()).map(|k| ctx.ma.act_by(k)).collect(),
            da: ctx.ma.alg.dim(),
            db: ba.alg.dim(),
        })
    }

    fn hmul(&self, legs: &[usize]) -> SparseVec {
        let mut acc = self.h.unit_vec().clone();
        for &l in legs {
            acc = self.h.alg.product(&acc, &SparseVec::unit(l));
        }
        acc
    }

    fn act(&self, h: &SparseVec, a: usize) -> SparseVec {
        let mut out = SparseVec::new();
        for (k, c) in h.iter() {
            out = out.lin_comb(&Scalar::one(), self.acts[k].column(a), c);
        }
        out
    }

    fn s_inv(&self, h: &SparseVec) -> SparseVec {
        self.h.s_inv().matrix().mul_vec(h)
    }

    /// Every `(a⁰#b⁰, …, aⁿ#bⁿ)` with its recipes.
    fn recipes(&self, n: usize, layout: Legs) -> Vec<Vec<Recipe>> {
        let cdims = vec![self.da * self.db; n + 1];
        let bdims = vec![self.db; n + 1];
        multi_indices(&cdims)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|t| {
                let a: Vec<usize> = t.iter().map(|x| x / self.db).collect();
                let b: Vec<usize> = t.iter().map(|x| x % self.db).collect();
                let exps: Vec<Vec<(Vec<usize>, usize, Scalar)>> = (0..=n)
                    .map(|j| {
                        let k = match layout {
                            Legs::Antipodal => j + 1,
                            Legs::Trace => n - j,
                        };
                        iterated_coaction(self.ba, b[j], k)
                    })
                    .collect();
                let mut out = Vec::new();
                for choice in multi_indices(&exps.iter().map(Vec::len).collect::<Vec<_>>()) {
                    let picked: Vec<&(Vec<usize>, usize, Scalar)> = choice.iter().enumerate().map(|(j, &c)| &exps[j][c]).collect();
                    let mut coeff = Scalar::one();
                    for p in &picked {
                        coeff *= &p.2;
                    }
                    let slots: Vec<SparseVec> = (0..=n)
                        .map(|i| match layout {
                            Legs::Antipodal => {
                                let legs: Vec<usize> = (i..=n).map(|j| picked[j].0[j - i]).collect();
                                self.act(&self.s_inv(&self.hmul(&legs)), a[i])
                            }
                            Legs::Trace => {
                                let legs: Vec<usize> = (0..i).map(|j| picked[j].0[i - j - 1]).collect();
                                self.act(&self.hmul(&legs), a[i])
                            }
                        })
                        .collect();
                    let bs: Vec<usize> = picked.iter().map(|p| p.1).collect();
                    out.push(Recipe {
                        v: flat_index(&bdims, &bs),
                        slots,
                        coeff,
                    });
                }
                out
            })
            .collect()
    }
}

fn crossed_map(ctx: &CupContext, n: usize, layout: Legs) -> Result<SparseMatrix> {
    let tools = CrossedTools::new(ctx)?;
    let recipes = tools.recipes(n, layout);
    let (dm, da) = (ctx.m.dim(), tools.da);
    let f = |phi: &SparseVec, psi: &SparseVec| -> SparseVec {
        let mut out = Vec::new();
        for (row, rs) in recipes.iter().enumerate() {
            let mut val = Scalar::zero();
            for r in rs {
                for m in 0..dm {
                    let w = psi.get(r.v * dm + m);
                    if w.is_zero() {
                        continue;
                    }
                    let slots: Vec<&SparseVec> = r.slots.iter().collect();
                    let e = evaluate(phi, da, m, &slots);
                    if !e.is_zero() {
                        val += &(e * &w * &r.coeff);
                    }
                }
            }
            if !val.is_zero() {
                out.push((row, val));
            }
        }
        SparseVec::from_sorted(out)
    };
    Ok(SparseMatrix::from_columns(recipes.len(), tensor_columns(ctx, n, f)))
}

/// `Ψ(φ⊗ψ)(a⁰⋊b⁰⊗…⊗aⁿ⋊bⁿ) = φ(ψ(b⁰⁽⁰⁾⊗…⊗bⁿ⁽⁰⁾) ⊗ S⁻¹(b⁰⁽⁻¹⁾…bⁿ⁽⁻¹⁾)a⁰ ⊗ … ⊗ S⁻¹(bⁿ⁽⁻ⁿ⁻¹⁾)aⁿ)`.
pub fn psi_cross(ctx: &CupContext, n: usize) -> Result<SparseMatrix> {
    crossed_map(ctx, n, Legs::Antipodal)
}

/// `Θ(φ⊗ψ)(a⁰⋊b⁰⊗…⊗aⁿ⋊bⁿ) = φ(ψ(b⁰⁽⁰⁾⊗…⊗bⁿ⁻¹⁽⁰⁾⊗bⁿ) ⊗ a⁰ ⊗ b⁰⁽⁻ⁿ⁾a¹ ⊗ … ⊗ (b⁰…bⁿ⁻¹)⁽⁻¹⁾aⁿ)`,
/// the pairing behind the shuffle product of traces.
pub fn trace_pairing(ctx: &CupContext, n: usize) -> Result<SparseMatrix> {
    crossed_map(ctx, n, Legs::Trace)
}

/// The map used by `aw_cup` for the context's kind.
pub fn cup_map(ctx: &CupContext, n: usize) -> Result<SparseMatrix> {
    match ctx.kind() {
        CupKind::Coalgebra => psi(ctx, n),
        CupKind::Relative => psi_r(ctx, n),
        CupKind::Crossed => psi_cross(ctx, n),
    }
}

/// Checks `M_{t}∘op = op∘M_n` for every operator of degree `<= N`, reporting
/// the first failure in face, degeneracy, cyclic order.
pub fn certify_chain_map(name: &str, src: &CocyclicComplex, dst: &CocyclicComplex, maps: &[SparseMatrix]) -> Result<()> {
    let n_max = src.max_degree().min(dst.max_degree()).min(maps.len().saturating_sub(2));
    let slots = operator_slots(n_max);
    let ok: Vec<Result<bool>> = slots
        .par_iter()
        .map(|&(op, n)| {
            let t = target(op, n);
            Ok(maps[t].compose(src.op(op, n))? == dst.op(op, n).compose(&maps[n])?)
        })
        .collect();
    for (&(op, n), r) in slots.iter().zip(ok) {
        if !r? {
            return Err(Error::ChainMapFailure {
                map: name.to_string(),
                op: op.name(),
                degree: n,
            });
        }
    }
    Ok(())
}

fn all_degrees<F>(ctx: &CupContext, f: F) -> Result<Vec<SparseMatrix>>
where
    F: Fn(&CupContext, usize) -> Result<SparseMatrix>,
{
    (0..=ctx.max_degree() + 1).map(|n| f(ctx, n)).collect()
}

/// Certifies `Ψ_c` against the cyclic complex of the convolution algebra.
pub fn certify_psi_c(ctx: &CupContext) -> Result<()> {
    let Side::Coalgebra { convolution, .. } = &ctx.side else {
        return Err(Error::InvalidInput("Ψ_c needs a coalgebra action".into()));
    };
    certify_chain_map("Ψ_c", &ctx.diagonal, convolution, &all_degrees(ctx, psi_c)?)
}

/// Certifies the context's cup map against the target cyclic complex.
pub fn certify_cup_map(ctx: &CupContext) -> Result<()> {
    let name = match ctx.kind() {
        CupKind::Coalgebra => "Ψ",
        CupKind::Relative => "Ψ_r",
        CupKind::Crossed => "Ψ_cross",
    };
    certify_chain_map(name, &ctx.diagonal, &ctx.target, &all_degrees(ctx, cup_map)?)
}

/// Certifies the pairing behind the shuffle product of traces.
pub fn certify_trace_pairing(ctx: &CupContext) -> Result<()> {
    certify_chain_map("Θ", &ctx.diagonal, &ctx.target, &all_degrees(ctx, trace_pairing)?)
}

/// Applies `∂_{i₁}` out of degree `deg`, then `∂_{i₂}` out of `deg+1`, and so on.
fn faces(c: &CocyclicComplex, mut deg: usize, idx: impl IntoIterator<Item = usize>, v: &SparseVec) -> SparseVec {
    let mut v = v.clone();
    for i in idx {
        v = c.face(deg, i).mul_vec(&v);
        deg += 1;
    }
    v
}

/// Alexander–Whitney `(p,q) → diagonal p+q`: zeroth faces on the first
/// factor, last faces on the second.
pub fn alexander_whitney(ctx: &CupContext, phi: &Cochain, x: &Cochain) -> SparseVec {
    let (p, q) = (phi.degree, x.degree);
    let a = faces(&ctx.first, p, std::iter::repeat_n(0, q), &phi.coeffs);
    let b = faces(&ctx.second, q, (q..q + p).map(|d| d + 1), &x.coeffs);
    kron_vec(&a, &b, ctx.second.dim(p + q))
}

/// `Ψ∘AW` at chain level, without checking the inputs.
pub fn aw_cup_chain(ctx: &CupContext, phi: &Cochain, x: &Cochain) -> Result<Cochain> {
    let n = check_degrees(ctx, phi, x)?;
    let map = match ctx.cup_maps[n].get() {
        Some(m) => m,
        None => {
            let m = cup_map(ctx, n)?;
            ctx.cup_maps[n].get_or_init(|| m)
        }
    };
    Ok(Cochain::new(n, map.mul_vec(&alexander_whitney(ctx, phi, x))))
}

fn check_degrees(ctx: &CupContext, phi: &Cochain, x: &Cochain) -> Result<usize> {
    let n = phi.degree + x.degree;
    if n > ctx.max_degree() {
        return Err(Error::DegreeCapExceeded {
            p: phi.degree,
            q: x.degree,
        });
    }
    if phi.coeffs.max_index().is_some_and(|i| i >= ctx.first.dim(phi.degree))
        || x.coeffs.max_index().is_some_and(|i| i >= ctx.second.dim(x.degree))
    {
        return Err(Error::ShapeMismatch("cochain coordinates out of range".into()));
    }
    Ok(n)
}

fn check_cocycle(c: &CocyclicComplex, v: &Cochain) -> Result<()> {
    if !alternating_faces(c, v.degree).mul_vec(&v.coeffs).is_zero() {
        return Err(Error::NotACocycle { degree: v.degree });
    }
    Ok(())
}

fn is_cyclic(c: &CocyclicComplex, v: &Cochain) -> bool {
    lambda(c, v.degree, LambdaReading::Standard).mul_vec(&v.coeffs) == v.coeffs
}

/// A cup product together with its certificates in the target complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupResult {
    pub cochain: Cochain,
    /// `b(result) = 0`
    pub closed: bool,
    /// `λ(result) = result`
    pub cyclic: bool,
    /// Both inputs were `λ`-invariant.
    pub inputs_cyclic: bool,
    /// The result is a Hochschild coboundary.
    pub exact: bool,
}

fn classify(target: &CocyclicComplex, cochain: Cochain, inputs_cyclic: bool) -> CupResult {
    let n = cochain.degree;
    let closed = alternating_faces(target, n).mul_vec(&cochain.coeffs).is_zero();
    let cyclic = is_cyclic(target, &cochain);
    let below = n.checked_sub(1).map(|p| alternating_faces(target, p));
    let exact = is_coboundary(&cochain.coeffs, below.as_ref());
    CupResult {
        cochain,
        closed,
        cyclic,
        inputs_cyclic,
        exact,
    }
}

/// `∪ = Ψ∘AW` on cocycles of the two factors.
pub fn aw_cup(ctx: &CupContext, phi: &Cochain, x: &Cochain) -> Result<CupResult> {
    check_degrees(ctx, phi, x)?;
    check_cocycle(&ctx.first, phi)?;
    check_cocycle(&ctx.second, x)?;
    let inputs_cyclic = is_cyclic(&ctx.first, phi) && is_cyclic(&ctx.second, x);
    let c = aw_cup_chain(ctx, phi, x)?;
    Ok(classify(&ctx.target, c, inputs_cyclic))
}

fn differences(lhs: &SparseVec, rhs: &SparseVec) -> Vec<(usize, String)> {
    let d = lhs.sub(rhs);
    d.iter().map(|(i, _)| (i, format!("{} vs {}", lhs.get(i), rhs.get(i)))).collect()
}

/// `(φ∪(m⊗c⁰⊗…⊗c^q))(a⁰⊗…⊗a^{p+q}) =
/// φ(m ⊗ c⁰⁽ᵖ⁺¹⁾(a⁰)c¹(a¹)…c^q(a^q) ⊗ c⁰⁽¹⁾(a^{q+1}) ⊗ … ⊗ c⁰⁽ᵖ⁾(a^{p+q}))`,
/// evaluated directly and compared with `Ψ∘AW`.
pub fn cup_explicit_coalgebra(ctx: &CupContext, phi: &Cochain, x: &Cochain) -> Result<Cochain> {
    let Side::Coalgebra { ca, .. } = &ctx.side else {
        return Err(Error::InvalidInput("needs a coalgebra action".into()));
    };
    let n = check_degrees(ctx, phi, x)?;
    let (p, q) = (phi.degree, x.degree);
    let (dm, dc, da) = (ctx.m.dim(), ca.mc.coalg.dim(), ca.ma.alg.dim());
    let alg = &ca.ma.alg;
    let dk = iterated_coproduct(&ca.mc.coalg, p + 1)?;
    let act: Vec<Vec<SparseVec>> = (0..dc)
        .map(|c| (0..da).map(|a| ca.action.matrix().column(c * da + a).clone()).collect())
        .collect();
    let phi_amb = ctx.first_lift[p].mul_vec(&phi.coeffs);
    let x_amb = ctx.second_lift[q].mul_vec(&x.coeffs);
    let mut xdims = vec![dm];
    xdims.extend(std::iter::repeat_n(dc, q + 1));
    let terms: Vec<(Vec<usize>, Scalar)> = x_amb.iter().map(|(i, c)| (unflatten(&xdims, i), c.clone())).collect();
    let adims = vec![da; n + 1];
    let rows: Vec<(usize, Scalar)> = multi_indices(&adims)
        .collect::<Vec<_>>()
        .into_par_iter()
        .enumerate()
        .filter_map(|(row, a)| {
            let mut val = Scalar::zero();
            for (idx, xc) in &terms {
                for (legs, w) in dk.at(idx[1]) {
                    let mut first = act[legs[p]][a[0]].clone();
                    for k in 1..=q {
                        first = alg.product(&first, &act[idx[k + 1]][a[k]]);
                    }
                    let mut slots: Vec<&SparseVec> = vec![&first];
                    for k in 0..p {
                        slots.push(&act[legs[k]][a[q + 1 + k]]);
                    }
                    let e = evaluate(&phi_amb, da, idx[0], &slots);
                    if !e.is_zero() {
                        val += &(e * xc * w);
                    }
                }
            }
            (!val.is_zero()).then_some((row, val))
        })
        .collect();
    let explicit = Cochain::new(n, SparseVec::from_sorted(rows));
    let composed = aw_cup_chain(ctx, phi, x)?;
    if explicit != composed {
        return Err(Error::MismatchWithAw {
            difference: differences(&explicit.coeffs, &composed.coeffs),
        });
    }
    Ok(explicit)
}

/// The crossed cup product as `Ψ∘AW`, with the printed closed formula as a
/// candidate and whether it agrees.
#[derive(Clone, Debug)]
pub struct CrossedCup {
    pub normative: CupResult,
    pub printed: Cochain,
    pub matches: bool,
}

/// Printed closed formula for `φ∪ψ` on `A⋊B`, read as
/// `φ(ψ(b^{q+1}⁽⁰⁾…bⁿ⁽⁰⁾b⁰⁽⁰⁾ ⊗ b¹⁽⁰⁾ ⊗ … ⊗ b^q⁽⁰⁾) ⊗ X ⊗ a^{q+1} ⊗ Y_{q+2} ⊗ … ⊗ Y_n)`
/// with `X = Π_{i≤q} S⁻¹(bⁱ⁽⁻ⁱ⁻¹⁾…b^q⁽⁻ⁱ⁻¹⁾)aⁱ` and
/// `Y_{q+1+k} = (b^{q+1}…b^{q+k})⁽⁻ᵖ⁺ᵏ⁾a^{q+1+k}`.
pub fn crossed_printed_candidate(ctx: &CupContext, phi: &Cochain, psi: &Cochain) -> Result<Cochain> {
    let tools = CrossedTools::new(ctx)?;
    let n = check_degrees(ctx, phi, psi)?;
    let (p, q) = (phi.degree, psi.degree);
    let (dm, da, db) = (ctx.m.dim(), tools.da, tools.db);
    let balg = &tools.ba.alg;
    let aalg = &ctx.ma.alg;
    let phi_amb = ctx.first_lift[p].mul_vec(&phi.coeffs);
    let psi_amb = ctx.second_lift[q].mul_vec(&psi.coeffs);
    let cdims = vec![da * db; n + 1];
    let qdims = vec![db; q + 1];
    let rows: Vec<(usize, Scalar)> = multi_indices(&cdims)
        .collect::<Vec<_>>()
        .into_par_iter()
        .enumerate()
        .filter_map(|(row, t)| {
            let a: Vec<usize> = t.iter().map(|x| x / db).collect();
            let b: Vec<usize> = t.iter().map(|x| x % db).collect();
            let exps: Vec<Vec<(Vec<usize>, usize, Scalar)>> = (0..=n)
                .map(|j| {
                    let k = if j <= q { j + 1 } else { p - (j - q) };
                    iterated_coaction(tools.ba, b[j], k)
                })
                .collect();
            let mut val = Scalar::zero();
            for choice in multi_indices(&exps.iter().map(Vec::len).collect::<Vec<_>>()) {
                let picked: Vec<&(Vec<usize>, usize, Scalar)> = choice.iter().enumerate().map(|(j, &c)| &exps[j][c]).collect();
                let mut coeff = Scalar::one();
                for pk in &picked {
                    coeff *= &pk.2;
                }
                let mut x = aalg.unit.clone();
                for i in 0..=q {
                    let legs: Vec<usize> = (i..=q).map(|j| picked[j].0[j - i]).collect();
                    x = aalg.product(&x, &tools.act(&tools.s_inv(&tools.hmul(&legs)), a[i]));
                }
                let mut slots = vec![x];
                if p >= 1 {
                    slots.push(SparseVec::unit(a[q + 1]));
                    for k in 1..p {
                        let legs: Vec<usize> = (1..=k).map(|j| picked[q + j].0[k - j]).collect();
                        slots.push(tools.act(&tools.hmul(&legs), a[q + 1 + k]));
                    }
                }
                let mut y = balg.unit.clone();
                for j in q + 1..=n {
                    y = balg.product(&y, &SparseVec::unit(picked[j].1));
                }
                y = balg.product(&y, &SparseVec::unit(picked[0].1));
                let refs: Vec<&SparseVec> = slots.iter().collect();
                for (y0, yc) in y.iter() {
                    let mut bs = vec![y0];
                    bs.extend((1..=q).map(|j| picked[j].1));
                    let v = flat_index(&qdims, &bs);
                    for m in 0..dm {
                        let w = psi_amb.get(v * dm + m);
                        if w.is_zero() {
                            continue;
                        }
                        let e = evaluate(&phi_amb, da, m, &refs);
                        if !e.is_zero() {
                            val += &(e * &w * yc * &coeff);
                        }
                    }
                }
            }
            (!val.is_zero()).then_some((row, val))
        })
        .collect();
    Ok(Cochain::new(n, SparseVec::from_sorted(rows)))
}

pub fn cup_explicit_crossed(ctx: &CupContext, phi: &Cochain, psi: &Cochain) -> Result<CrossedCup> {
    let normative = aw_cup(ctx, phi, psi)?;
    let printed = crossed_printed_candidate(ctx, phi, psi)?;
    let matches = printed == normative.cochain;
    Ok(CrossedCup {
        normative,
        printed,
        matches,
    })
}

/// Violations of `τ(h·a) = δ(h)τ(a)` and `τ(ab) = τ(b·σ(a))` on basis elements.
pub fn trace_violations(mp: &ModularPair, ma: &ModuleAlgebra, trace: &SparseVec) -> Vec<String> {
    let h = &*mp.hopf;
    let alg = &ma.alg;
    let mut out = Vec::new();
    for hh in 0..h.dim() {
        let act = ma.act_by(hh);
        for a in 0..alg.dim() {
            let lhs = trace.dot(act.column(a));
            let rhs = mp.delta.get(hh) * &trace.get(a);
            if lhs != rhs {
                out.push(format!("(h,a) = ({}, {})", h.space().label(hh), alg.space.label(a)));
            }
        }
    }
    let mut sigma_act = SparseMatrix::zeros(alg.dim(), alg.dim());
    for (k, c) in mp.sigma.iter() {
        sigma_act = sigma_act.lin_comb(&Scalar::one(), &ma.act_by(k), c).expect("same shape");
    }
    for a in 0..alg.dim() {
        for b in 0..alg.dim() {
            let lhs = trace.dot(&alg.product(&SparseVec::unit(a), &SparseVec::unit(b)));
            let rhs = trace.dot(&alg.product(&SparseVec::unit(b), sigma_act.column(a)));
            if lhs != rhs {
                out.push(format!("(a,b) = ({}, {})", alg.space.label(a), alg.space.label(b)));
            }
        }
    }
    out
}

/// `χ(h¹⊗…⊗hⁿ)(a⁰⊗…⊗aⁿ) = τ(a⁰h¹(a¹)…hⁿ(aⁿ))`, from Ans degree `n` into `C^n(A)`.
pub fn char_map(mp: &ModularPair, ma: &ModuleAlgebra, trace: &SparseVec, n: usize) -> Result<SparseMatrix> {
    let violations = trace_violations(mp, ma, trace);
    if !violations.is_empty() {
        return Err(Error::NotInvariantTrace { violations });
    }
    if ma.hopf != mp.hopf {
        return Err(Error::InvalidInput("trace and pair over different Hopf algebras".into()));
    }
    let (dh, da) = (mp.hopf.dim(), ma.alg.dim());
    let acts: Vec<SparseMatrix> = (0..dh).map(|k| ma.act_by(k)).collect();
    let adims = vec![da; n + 1];
    let cols: Vec<SparseVec> = multi_indices(&vec![dh; n])
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|hs| {
            let mut out = Vec::new();
            for (row, a) in multi_indices(&adims).enumerate() {
                let mut x = SparseVec::unit(a[0]);
                for k in 0..n {
                    x = ma.alg.product(&x, acts[hs[k]].column(a[k + 1]));
                    if x.is_zero() {
                        break;
                    }
                }
                let v = trace.dot(&x);
                if !v.is_zero() {
                    out.push((row, v));
                }
            }
            SparseVec::from_sorted(out)
        })
        .collect();
    Ok(SparseMatrix::from_columns(product(&adims), cols))
}

/// Certifies `χ` as a map of cocyclic modules up to degree `n_max`.
pub fn certify_char_map(mp: &ModularPair, ma: &ModuleAlgebra, trace: &SparseVec, n_max: usize) -> Result<()> {
    let ans = build_ans_complex(mp, n_max)?;
    let cyc = build_cyclic_complex(&ma.alg, n_max)?;
    let maps: Vec<SparseMatrix> = (0..=n_max + 1).map(|n| char_map(mp, ma, trace, n)).collect::<Result<_>>()?;
    certify_chain_map("χ", &ans, &cyc, &maps)
}

/// A permutation of `{1..p+q}` increasing on `{1..q}` and on `{q+1..q+p}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShufflePermutation {
    pub q: usize,
    pub p: usize,
    /// `σ(1), …, σ(p+q)`
    pub perm: Vec<usize>,
    pub sign: i8,
}

impl ShufflePermutation {
    /// `σ̄(i) = σ(i) - 1`, `i` counted from 1.
    pub fn bar(&self, i: usize) -> usize {
        self.perm[i - 1] - 1
    }
}

pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Sh(q,p)` in lexicographic order of `σ(1..q)`.
pub fn shuffle_set(q: usize, p: usize) -> Vec<ShufflePermutation> {
    let n = p + q;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(q);
    fn rec(start: usize, n: usize, q: usize, p: usize, chosen: &mut Vec<usize>, out: &mut Vec<ShufflePermutation>) {
        if chosen.len() == q {
            let mut perm = chosen.clone();
            perm.extend((1..=n).filter(|x| !chosen.contains(x)));
            let sign = permutation_sign(&perm);
            out.push(ShufflePermutation { q, p, perm, sign });
            return;
        }
        for x in start..=n {
            chosen.push(x);
            rec(x + 1, n, q, p, chosen, out);
            chosen.pop();
        }
    }
    rec(1, n, q, p, &mut chosen, &mut out);
    out
}

/// `Σ_{σ∈Sh(d₂,d₁)} (−1)^σ ∂_{σ̄(d₂)}…∂_{σ̄(1)}u ⊗ ∂_{σ̄(d₁+d₂)}…∂_{σ̄(d₂+1)}v`
/// in diagonal coordinates, `u` of degree `d₁` and `v` of degree `d₂`.
pub fn shuffle_vector(ctx: &CupContext, u: &Cochain, v: &Cochain) -> SparseVec {
    let (d1, d2) = (u.degree, v.degree);
    let dim2 = ctx.second.dim(d1 + d2);
    let terms: Vec<SparseVec> = shuffle_set(d2, d1)
        .par_iter()
        .map(|s| {
            let a = faces(&ctx.first, d1, (1..=d2).map(|i| s.bar(i)), &u.coeffs);
            let b = faces(&ctx.second, d2, (d2 + 1..=d1 + d2).map(|i| s.bar(i)), &v.coeffs);
            kron_vec(&a, &b, dim2).scale(&Scalar::from_int(s.sign as i64))
        })
        .collect();
    terms.iter().fold(SparseVec::new(), |acc, t| acc.add(t))
}

/// Shuffle product of a twisted trace `φ` on `A` with a trace `ψ` on `B`,
/// landing on `A⋊B`.
pub fn shuffle_cup_traces(ctx: &CupContext, phi: &Cochain, psi: &Cochain) -> Result<CupResult> {
    if ctx.kind() != CupKind::Crossed {
        return Err(Error::InvalidInput("needs a crossed-product context".into()));
    }
    let n = check_degrees(ctx, phi, psi)?;
    check_cocycle(&ctx.first, phi)?;
    check_cocycle(&ctx.second, psi)?;
    let inputs_cyclic = is_cyclic(&ctx.first, phi) && is_cyclic(&ctx.second, psi);
    let v = trace_pairing(ctx, n)?.mul_vec(&shuffle_vector(ctx, phi, psi));
    Ok(classify(&ctx.target, Cochain::new(n, v), inputs_cyclic))
}

/// `x∪φ` for `x` of degree `p` on `C` and `φ` of degree `q` on `A`:
/// `φ` takes the first `p` shuffle faces and `x` the remaining `q`, then `Ψ`.
pub fn cotrace_cup(ctx: &CupContext, x: &Cochain, phi: &Cochain) -> Result<CupResult> {
    if ctx.kind() != CupKind::Coalgebra {
        return Err(Error::InvalidInput("needs a coalgebra action".into()));
    }
    let n = check_degrees(ctx, phi, x)?;
    check_cocycle(&ctx.first, phi)?;
    check_cocycle(&ctx.second, x)?;
    let inputs_cyclic = is_cyclic(&ctx.first, phi) && is_cyclic(&ctx.second, x);
    let v = psi(ctx, n)?.mul_vec(&shuffle_vector(ctx, phi, x));
    Ok(classify(&ctx.target, Cochain::new(n, v), inputs_cyclic))
}

/// An `A`-letter of a formal word: `aʲ` acted on by coaction legs
/// `(b-index, depth)`, possibly under `d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ALetter {
    index: usize,
    d: bool,
    legs: Vec<(usize, usize)>,
}

/// A `B`-letter: `bʲ`, possibly under `d`, with its `(0)` marker.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct BLetter {
    index: usize,
    d: bool,
    zero: bool,
}

type Word = (Vec<ALetter>, Vec<BLetter>);

fn render_word(w: &Word) -> String {
    let mut s = String::new();
    for l in &w.0 {
        let mut inner = String::new();
        if !l.legs.is_empty() {
            inner.push('(');
            for (i, depth) in &l.legs {
                let _ = write!(inner, "b{i}(-{depth})");
            }
            inner.push(')');
        }
        let _ = write!(inner, "a{}", l.index);
        if l.d {
            let _ = write!(s, "d[{inner}]");
        } else {
            s.push_str(&inner);
        }
    }
    s.push_str(" # ");
    for l in &w.1 {
        let inner = format!("b{}{}", l.index, if l.zero { "(0)" } else { "" });
        if l.d {
            let _ = write!(s, "d[{inner}]");
        } else {
            s.push_str(&inner);
        }
    }
    s
}

/// Outcome of comparing a bidegree component of `θⁿ` with the shuffle sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub p: usize,
    pub q: usize,
    /// Words in the expanded component.
    pub expanded_terms: usize,
    pub shuffles: usize,
    pub matches: bool,
    /// First word (in sorted order) whose coefficients differ.
    pub first_difference: Option<String>,
}

/// Expands `θⁿ = a⁰⋊b⁰ d(a¹⋊b¹)…d(aⁿ⋊bⁿ)`, `n = p+q`, in the crossed DG
/// algebra with formal coaction legs and Koszul signs, keeps the part of
/// `A`-degree `p` and `B`-degree `q` written in `(B,A)` order, and compares
/// it with `Σ_{σ∈Sh(q,p)} (−1)^σ θⁿ_σ`.
pub fn dg_expand_oracle(p: usize, q: usize) -> Result<OracleReport> {
    if p + q > 3 {
        return Err(Error::DegreeCapExceeded { p, q });
    }
    let n = p + q;
    // expansion: each factor j >= 1 puts d on aʲ or on bʲ
    let mut expanded: BTreeMap<Word, i64> = BTreeMap::new();
    let mut expanded_terms = 0;
    for mask in 0..(1usize << n) {
        let a_d: Vec<bool> = (1..=n).map(|j| mask >> (j - 1) & 1 == 1).collect();
        if a_d.iter().filter(|&&x| x).count() != p {
            continue;
        }
        let mut sign = 1i64;
        let mut splits = vec![0usize; n + 1];
        let mut aw = vec![ALetter {
            index: 0,
            d: false,
            legs: Vec::new(),
        }];
        let mut bd = vec![false];
        for j in 1..=n {
            let on_a = a_d[j - 1];
            let b_degree = bd.iter().filter(|&&x| x).count();
            if on_a && b_degree % 2 == 1 {
                sign = -sign;
            }
            // γ⁽⁻¹⁾ acts on the incoming letter: one more split of every earlier b
            let legs: Vec<(usize, usize)> = (0..j)
                .map(|i| {
                    splits[i] += 1;
                    (i, splits[i])
                })
                .collect();
            aw.push(ALetter { index: j, d: on_a, legs });
            bd.push(!on_a);
        }
        // split number s of bⁱ (first split outermost) has depth total - s + 1
        for l in aw.iter_mut() {
            for (i, s) in l.legs.iter_mut() {
                *s = splits[*i] - *s + 1;
            }
        }
        let bw: Vec<BLetter> = (0..=n)
            .map(|j| BLetter {
                index: j,
                d: bd[j],
                zero: splits[j] > 0,
            })
            .collect();
        // (A,B) → (B,A) order
        if (p * q) % 2 == 1 {
            sign = -sign;
        }
        expanded_terms += 1;
        *expanded.entry((aw, bw)).or_insert(0) += sign;
    }
    let shuffles = shuffle_set(q, p);
    let mut shuffled: BTreeMap<Word, i64> = BTreeMap::new();
    for s in &shuffles {
        let b_pos: Vec<usize> = s.perm[..q].to_vec();
        let a_pos: Vec<usize> = s.perm[q..].to_vec();
        let mut aw = vec![ALetter {
            index: 0,
            d: false,
            legs: Vec::new(),
        }];
        for j in 1..=n {
            aw.push(ALetter {
                index: j,
                d: a_pos.contains(&j),
                legs: (0..j).map(|i| (i, n - j + 1)).collect(),
            });
        }
        let bw: Vec<BLetter> = (0..=n)
            .map(|j| BLetter {
                index: j,
                d: b_pos.contains(&j),
                zero: j < n,
            })
            .collect();
        *shuffled.entry((aw, bw)).or_insert(0) += s.sign as i64;
    }
    expanded.retain(|_, c| *c != 0);
    shuffled.retain(|_, c| *c != 0);
    let mut first_difference = None;
    for w in expanded.keys().chain(shuffled.keys()) {
        let (x, y) = (expanded.get(w).copied().unwrap_or(0), shuffled.get(w).copied().unwrap_or(0));
        if x != y {
            let cand = (w.clone(), x, y);
            if first_difference.as_ref().is_none_or(|(fw, _, _): &(Word, i64, i64)| cand.0 < *fw) {
                first_difference = Some(cand);
            }
        }
    }
    Ok(OracleReport {
        p,
        q,
        expanded_terms,
        shuffles: shuffles.len(),
        matches: first_difference.is_none(),
        first_difference: first_difference.map(|(w, x, y)| format!("{}: expanded {x}, shuffle sum {y}", render_word(&w))),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::catalog::*;
    use crate::cocyclic::build_hopf_complex;
    use crate::cohomology::{connes_B, cyclic_representatives, hochschild_representatives};
    use crate::symmetry::mpi_coefficients;

    fn kz(n: usize) -> Arc<HopfData> {
        Arc::new(cyclic_group_algebra(n))
    }

    fn index_of(h: &HopfData, label: &str) -> usize {
        element(h, label).first().expect("basis element").0
    }

    fn swap_ctx(m: SAYDModule, n_max: usize) -> CupContext {
        let h = m.hopf.clone();
        let ma = translation_module_algebra(&h, h.dim());
        CupContext::coalgebra(CoalgebraAction::regular(ma), m, n_max).unwrap()
    }

    fn crossed_ctx(n_max: usize) -> CupContext {
        let h = kz(2);
        let ma = translation_module_algebra(&h, 2);
        CupContext::crossed(ma, graded_group_algebra(&h), SAYDModule::trivial(h), n_max).unwrap()
    }

    fn reps(c: &CocyclicComplex, n: usize, cyclic: bool) -> Vec<Cochain> {
        let bb = connes_B(c).unwrap();
        let v = if cyclic {
            cyclic_representatives(c, &bb, n)
        } else {
            hochschild_representatives(&bb, n)
        };
        v.into_iter().map(|x| Cochain::new(n, x)).collect()
    }

    fn basis(c: &CocyclicComplex, n: usize) -> Vec<Cochain> {
        (0..c.dim(n)).map(|i| Cochain::new(n, SparseVec::unit(i))).collect()
    }

    fn realize(r: &Realization, v: &SparseVec) -> SparseVec {
        match r {
            Realization::Full(_) => v.clone(),
            Realization::Subspace(s) => s.coords(v),
            Realization::Quotient(q) => q.projection().mul_vec(v),
        }
    }

    #[test]
    fn ground_context_is_the_identity() {
        let h = Arc::new(HopfData::ground());
        let ma = ModuleAlgebra::trivial(h.clone(), AlgebraData::ground());
        let ctx = CupContext::coalgebra(CoalgebraAction::regular(ma), SAYDModule::trivial(h), 2).unwrap();
        for n in 0..=3 {
            assert_eq!(psi_c(&ctx, n).unwrap(), SparseMatrix::identity(1), "n={n}");
            assert_eq!(cup_map(&ctx, n).unwrap(), SparseMatrix::identity(1), "n={n}");
        }
        certify_cup_map(&ctx).unwrap();
    }

    #[test]
    fn psi_c_in_degree_zero_evaluates_on_the_identity() {
        let ctx = swap_ctx(SAYDModule::trivial(kz(2)), 1);
        let Side::Coalgebra { conv, .. } = &ctx.side else { unreachable!() };
        let m0 = psi_c(&ctx, 0).unwrap();
        let da = ctx.ma.alg.dim();
        let e = index_of(&ctx.ma.hopf, "e");
        let phi = ctx.first_lift[0].column(0);
        assert_eq!(m0.cols(), 1);
        for k in 0..conv.alg.dim() {
            let fk = map_at(&SparseVec::unit(k), e, da);
            assert_eq!(m0.get(k, 0), phi.dot(&fk), "k={k}");
        }
    }

    #[test]
    fn coalgebra_maps_are_certified() {
        let ctx = swap_ctx(SAYDModule::trivial(kz(2)), 3);
        certify_psi_c(&ctx).unwrap();
        certify_cup_map(&ctx).unwrap();
        let h4 = Arc::new(sweedler());
        let mp = modular_pair(&h4, sign_character(&h4), "1");
        let ctx = CupContext::coalgebra(CoalgebraAction::regular(ModuleAlgebra::adjoint(h4)), mpi_coefficients(&mp), 2).unwrap();
        certify_cup_map(&ctx).unwrap();
    }

    #[test]
    fn natural_map_sends_unit_to_unit() {
        let ctx = swap_ctx(SAYDModule::trivial(kz(3)), 1);
        let Side::Coalgebra { conv, natural, .. } = &ctx.side else { unreachable!() };
        assert_eq!(natural.mul_vec(&ctx.ma.alg.unit), conv.alg.unit);
    }

    #[test]
    fn relative_map_is_certified() {
        let h = kz(4);
        let ma = translation_module_algebra(&h, 4);
        let sub = SubHopf::new(h.clone(), &[element(&h, "e"), element(&h, "g2")]);
        let ctx = CupContext::relative(ma, sub, SAYDModule::trivial(h), 2).unwrap();
        assert_eq!(ctx.target_algebra().dim(), 2);
        certify_cup_map(&ctx).unwrap();
    }

    #[test]
    fn relative_with_trivial_subgroup_is_the_coalgebra_map() {
        let h = kz(2);
        let ma = translation_module_algebra(&h, 2);
        let sub = SubHopf::new(h.clone(), &[element(&h, "e")]);
        let rel = CupContext::relative(ma, sub, SAYDModule::trivial(h.clone()), 2).unwrap();
        let coal = swap_ctx(SAYDModule::trivial(h), 2);
        for n in 0..=2 {
            assert_eq!(rel.diagonal.dim(n), coal.diagonal.dim(n));
            assert_eq!(psi_r(&rel, n).unwrap(), psi(&coal, n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn crossed_maps_are_certified() {
        let ctx = crossed_ctx(3);
        certify_cup_map(&ctx).unwrap();
        certify_trace_pairing(&ctx).unwrap();
    }

    /// With `B = ℚ` the product is `A` and `Ψ` only sees `φ`.
    #[test]
    fn crossed_with_ground_comodule_algebra_reads_off_phi() {
        let h = kz(2);
        let ma = translation_module_algebra(&h, 2);
        let ba = ComoduleAlgebra::trivial(h.clone(), AlgebraData::ground());
        let ctx = CupContext::crossed(ma, ba, SAYDModule::trivial(h), 2).unwrap();
        for n in 0..=2 {
            assert_eq!(ctx.second.dim(n), 1);
            let map = psi_cross(&ctx, n).unwrap();
            for i in 0..ctx.first.dim(n) {
                assert_eq!(map.column(i), ctx.first_lift[n].column(i), "n={n} i={i}");
            }
        }
    }

    /// With `A = ℚ` the product is `B` and `Ψ` only sees `ψ`.
    #[test]
    fn crossed_with_ground_module_algebra_reads_off_psi() {
        let h = kz(2);
        let ma = ModuleAlgebra::trivial(h.clone(), AlgebraData::ground());
        let ctx = CupContext::crossed(ma, graded_group_algebra(&h), SAYDModule::trivial(h), 2).unwrap();
        for n in 0..=2 {
            assert_eq!(ctx.first.dim(n), 1);
            let map = psi_cross(&ctx, n).unwrap();
            for j in 0..ctx.second.dim(n) {
                assert_eq!(map.column(j), ctx.second_lift[n].column(j), "n={n} j={j}");
            }
        }
    }

    #[test]
    fn explicit_coalgebra_formula_matches_aw_for_trivial_coaction() {
        let h4 = Arc::new(sweedler());
        let mp = modular_pair(&h4, sign_character(&h4), "1");
        let fixtures = [
            swap_ctx(SAYDModule::trivial(kz(2)), 3),
            swap_ctx(SAYDModule::trivial(kz(3)), 2),
            CupContext::coalgebra(CoalgebraAction::regular(ModuleAlgebra::adjoint(h4)), mpi_coefficients(&mp), 2).unwrap(),
        ];
        for ctx in &fixtures {
            let top = ctx.max_degree();
            for p in 0..=top {
                for q in 0..=top - p {
                    for phi in basis(&ctx.first, p) {
                        for x in basis(&ctx.second, q) {
                            let direct = cup_explicit_coalgebra(ctx, &phi, &x).unwrap();
                            assert_eq!(direct, aw_cup_chain(ctx, &phi, &x).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_coalgebra_formula_reports_twisted_coaction() {
        let h = kz(2);
        let mp = modular_pair(&h, h.counit_vec().clone(), "g");
        let ctx = swap_ctx(mpi_coefficients(&mp), 2);
        let mut mismatches = 0;
        for p in 0..=2 {
            for q in 0..=2 - p {
                for phi in basis(&ctx.first, p) {
                    for x in basis(&ctx.second, q) {
                        match cup_explicit_coalgebra(&ctx, &phi, &x) {
                            Ok(_) => {}
                            Err(Error::MismatchWithAw { difference }) => {
                                assert!(!difference.is_empty());
                                mismatches += 1;
                            }
                            Err(e) => panic!("{e}"),
                        }
                    }
                }
            }
        }
        assert!(mismatches > 0);
    }

    #[test]
    fn cup_of_cocycles_is_closed_and_cyclic_on_cyclic_inputs() {
        let coal = swap_ctx(SAYDModule::trivial(kz(2)), 3);
        let cross = crossed_ctx(3);
        for ctx in [&coal, &cross] {
            for cyclic in [false, true] {
                for p in 0..=3 {
                    for q in 0..=3 - p {
                        for phi in reps(&ctx.first, p, cyclic) {
                            for x in reps(&ctx.second, q, cyclic) {
                                let r = aw_cup(ctx, &phi, &x).unwrap();
                                assert!(r.closed, "{} p={p} q={q}", ctx.kind().name());
                                if cyclic {
                                    assert!(r.inputs_cyclic);
                                    assert!(r.cyclic);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cup_rejects_non_cocycles_and_large_degrees() {
        let ctx = swap_ctx(SAYDModule::trivial(kz(2)), 2);
        let phi = Cochain::new(2, SparseVec::unit(0));
        let x = Cochain::new(1, SparseVec::unit(0));
        assert!(matches!(aw_cup(&ctx, &phi, &x), Err(Error::DegreeCapExceeded { .. })));
        let bb = connes_B(&ctx.first).unwrap();
        let closed = hochschild_representatives(&bb, 0);
        let mut open = None;
        for v in basis(&ctx.first, 1) {
            if !alternating_faces(&ctx.first, 1).mul_vec(&v.coeffs).is_zero() {
                open = Some(v);
            }
        }
        if let (Some(v), Some(c)) = (open, closed.first()) {
            let r = aw_cup(&ctx, &v, &Cochain::new(0, c.clone()));
            assert!(matches!(r, Err(Error::NotACocycle { degree: 1 })));
        }
    }

    #[test]
    fn crossed_printed_candidate_agrees_on_the_swap_fixture() {
        let ctx = crossed_ctx(3);
        for p in 0..=3 {
            for q in 0..=3 - p {
                for phi in reps(&ctx.first, p, true) {
                    for psi in reps(&ctx.second, q, true) {
                        let r = cup_explicit_crossed(&ctx, &phi, &psi).unwrap();
                        assert!(r.matches, "p={p} q={q}");
                    }
                }
            }
        }
    }

    fn swap_pair(sigma: &str) -> (ModularPair, ModuleAlgebra) {
        let h = kz(2);
        let mp = modular_pair(&h, h.counit_vec().clone(), sigma);
        (mp, translation_module_algebra(&h, 2))
    }

    #[test]
    fn char_map_in_degree_zero_is_the_trace() {
        let (mp, ma) = swap_pair("e");
        let tr = sum_functional(2);
        let m = char_map(&mp, &ma, &tr, 0).unwrap();
        assert_eq!(m.cols(), 1);
        assert_eq!(m.column(0), &tr);
    }

    #[test]
    fn char_map_in_degree_one_on_points() {
        let (mp, ma) = swap_pair("e");
        let h = mp.hopf.clone();
        let m = char_map(&mp, &ma, &sum_functional(2), 1).unwrap();
        let (e, g) = (index_of(&h, "e"), index_of(&h, "g"));
        for a0 in 0..2 {
            for a1 in 0..2 {
                let row = a0 * 2 + a1;
                let same = Scalar::from_int(i64::from(a0 == a1));
                let other = Scalar::from_int(i64::from(a0 != a1));
                assert_eq!(m.get(row, e), same);
                assert_eq!(m.get(row, g), other);
            }
        }
        certify_char_map(&mp, &ma, &sum_functional(2), 3).unwrap();
    }

    #[test]
    fn char_map_rejects_a_non_invariant_trace() {
        let (mp, ma) = swap_pair("e");
        let bad = SparseVec::unit(0);
        assert!(!trace_violations(&mp, &ma, &bad).is_empty());
        assert!(matches!(char_map(&mp, &ma, &bad, 1), Err(Error::NotInvariantTrace { .. })));
    }

    /// `τ ∪ x` through the coalgebra cup product equals `χ` after the
    /// normalization isomorphism, at chain level.
    #[test]
    fn trace_cup_is_the_characteristic_map() {
        for n in [2usize, 3] {
            let h = kz(n);
            let mp = modular_pair(&h, h.counit_vec().clone(), "e");
            let ma = translation_module_algebra(&h, n);
            let tr = sum_functional(n);
            let top = 2;
            let ctx = CupContext::coalgebra(CoalgebraAction::regular(ma.clone()), mpi_coefficients(&mp), top).unwrap();
            let hc = build_hopf_complex(&mp, top).unwrap();
            assert!(ctx.second.same_operators(&hc.coalgebra));
            let phi = Cochain::new(0, realize(&ctx.first.realizations[0], &tr));
            for k in 0..=top {
                let chi = char_map(&mp, &ma, &tr, k).unwrap();
                for x in basis(&ctx.second, k) {
                    let lhs = aw_cup_chain(&ctx, &phi, &x).unwrap();
                    let rhs = chi.mul_vec(&hc.iso[k].mul_vec(&x.coeffs));
                    assert_eq!(lhs.coeffs, rhs, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn small_shuffle_sets() {
        let s = shuffle_set(0, 3);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].perm, vec![1, 2, 3]);
        let s = shuffle_set(1, 1);
        let perms: Vec<_> = s.iter().map(|x| (x.perm.clone(), x.sign)).collect();
        assert_eq!(perms, vec![(vec![1, 2], 1), (vec![2, 1], -1)]);
        let s = shuffle_set(2, 1);
        let signs: Vec<i8> = s.iter().map(|x| x.sign).collect();
        assert_eq!(signs, vec![1, -1, 1]);
        assert_eq!(s[1].perm, vec![1, 3, 2]);
        assert_eq!(s[1].bar(2), 2);
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    proptest! {
        #[test]
        fn shuffle_counts_and_reversal_sign(p in 0usize..=6, q in 0usize..=6) {
            prop_assume!(p + q <= 6);
            let s = shuffle_set(q, p);
            prop_assert_eq!(s.len(), binomial(p + q, q));
            for sh in &s {
                prop_assert_eq!(permutation_sign(&sh.perm), sh.sign);
                prop_assert!(sh.perm[..q].windows(2).all(|w| w[0] < w[1]));
                prop_assert!(sh.perm[q..].windows(2).all(|w| w[0] < w[1]));
            }
            // Moving the second block in front costs `(−1)^{pq}`.
            let reversal: Vec<usize> = (q + 1..=p + q).chain(1..=q).collect();
            let expect = if (p * q) % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(permutation_sign(&reversal), expect);
        }
    }

    #[test]
    fn shuffle_product_of_traces_is_cohomologous_to_aw() {
        let ctx = crossed_ctx(3);
        for p in 0..=3 {
            for q in 0..=3 - p {
                for phi in reps(&ctx.first, p, true) {
                    for psi in reps(&ctx.second, q, true) {
                        let s = shuffle_cup_traces(&ctx, &phi, &psi).unwrap();
                        assert!(s.closed && s.cyclic, "p={p} q={q}");
                        let a = aw_cup(&ctx, &phi, &psi).unwrap();
                        let diff = s.cochain.coeffs.sub(&a.cochain.coeffs);
                        let b = (p + q).checked_sub(1).map(|k| alternating_faces(&ctx.target, k));
                        assert!(is_coboundary(&diff, b.as_ref()), "p={p} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn cotrace_degenerate_cases() {
        let ctx = swap_ctx(SAYDModule::trivial(kz(2)), 3);
        for p in 0..=3 {
            for tr in reps(&ctx.first, 0, true) {
                for x in reps(&ctx.second, p, true) {
                    let c = cotrace_cup(&ctx, &x, &tr).unwrap();
                    assert_eq!(c.cochain, aw_cup_chain(&ctx, &tr, &x).unwrap(), "p={p}");
                }
            }
        }
        // Group algebras are cocommutative, so evaluation in degree zero
        // agrees with the explicit formula.
        for q in 0..=3 {
            for phi in basis(&ctx.first, q) {
                for x in reps(&ctx.second, 0, true) {
                    let c = cotrace_cup(&ctx, &x, &phi);
                    if check_cocycle(&ctx.first, &phi).is_ok() {
                        assert_eq!(c.unwrap().cochain, cup_explicit_coalgebra(&ctx, &phi, &x).unwrap(), "q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_products_need_the_matching_context() {
        let coal = swap_ctx(SAYDModule::trivial(kz(2)), 1);
        let cross = crossed_ctx(1);
        let z = Cochain::new(0, SparseVec::unit(0));
        assert!(matches!(shuffle_cup_traces(&coal, &z, &z), Err(Error::InvalidInput(_))));
        assert!(matches!(cotrace_cup(&cross, &z, &z), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn oracle_matches_through_degree_three() {
        for p in 0..=3 {
            for q in 0..=3 - p {
                let r = dg_expand_oracle(p, q).unwrap();
                assert!(r.matches, "p={p} q={q}: {:?}", r.first_difference);
                assert_eq!(r.shuffles, binomial(p + q, q));
            }
        }
        assert!(matches!(dg_expand_oracle(2, 2), Err(Error::DegreeCapExceeded { p: 2, q: 2 })));
    }
}
