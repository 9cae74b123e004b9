//! Turns a parsed spec into engine objects.

use std::sync::Arc;

use hopf_cyclic::cocyclic::CocyclicComplex;
use hopf_cyclic::cupprod::CupKind;
use hopf_cyclic::hopf::{AlgebraData, CoalgebraData, HopfData, ModularPair};
use hopf_cyclic::symmetry::{ComoduleAlgebra, ModuleAlgebra, SubHopf};
use hopf_cyclic::{BasedSpace, Scalar, SparseMatrix, SparseVec};

use crate::spec::{Item, ItemKind, Name, Op, Pos, SpecError, SpecFile, Term};

#[derive(Clone, Debug)]
pub struct ContextSpec {
    pub name: String,
    pub kind: CupKind,
    pub module: String,
    pub pair: String,
    pub sub: Option<String>,
    pub comodule: Option<String>,
    pub trace: Option<String>,
}

#[derive(Clone, Debug)]
pub struct TraceSpec {
    pub algebra: String,
    pub values: SparseVec,
}

/// Engine objects in spec order.
#[derive(Clone, Debug, Default)]
pub struct Model {
    pub hopfs: Vec<(String, Arc<HopfData>)>,
    pub algebras: Vec<(String, AlgebraData)>,
    pub modules: Vec<(String, ModuleAlgebra)>,
    pub comodules: Vec<(String, ComoduleAlgebra)>,
    pub pairs: Vec<(String, ModularPair)>,
    pub subs: Vec<(String, SubHopf)>,
    pub traces: Vec<(String, TraceSpec)>,
    pub complexes: Vec<(String, CocyclicComplex)>,
    pub contexts: Vec<ContextSpec>,
}

fn lookup<'a, T>(list: &'a [(String, T)], n: &Name) -> Result<&'a T, SpecError> {
    list.iter().find(|(k, _)| *k == n.text).map(|(_, v)| v).ok_or_else(|| unresolved(n))
}

fn unresolved(n: &Name) -> SpecError {
    SpecError::UnresolvedName {
        line: n.at.line,
        col: n.at.col,
        name: n.text.clone(),
    }
}

fn mismatch(at: Pos, msg: impl Into<String>) -> SpecError {
    SpecError::DimensionMismatch {
        line: at.line,
        msg: msg.into(),
    }
}

fn index(space: &BasedSpace, n: &Name) -> Result<usize, SpecError> {
    space.index_of(&n.text).ok_or_else(|| unresolved(n))
}

/// A right-hand side in the tensor product of `spaces`, flattened row-major.
fn vector(terms: &[Term], spaces: &[&BasedSpace]) -> Result<SparseVec, SpecError> {
    let mut pairs = Vec::new();
    for t in terms {
        if t.labels.len() != spaces.len() {
            return Err(mismatch(
                t.at,
                format!("term has {} tensor factor(s), expected {}", t.labels.len(), spaces.len()),
            ));
        }
        let mut flat = 0;
        for (l, s) in t.labels.iter().zip(spaces) {
            flat = flat * s.dim() + index(s, l)?;
        }
        pairs.push((flat, t.coef.clone()));
    }
    Ok(SparseVec::from_pairs(pairs))
}

fn basis_of(item: &Item) -> Result<BasedSpace, SpecError> {
    let mut found = None;
    for st in &item.body {
        if let Op::Basis(names) = &st.op {
            if found.is_some() {
                return Err(mismatch(st.at, "second basis declaration"));
            }
            let labels: Vec<&str> = names.iter().map(|n| n.text.as_str()).collect();
            for (k, n) in names.iter().enumerate() {
                if labels[..k].contains(&n.text.as_str()) {
                    return Err(SpecError::Parse {
                        line: n.at.line,
                        col: n.at.col,
                        msg: format!("duplicate basis label `{}`", n.text),
                    });
                }
            }
            found = Some(BasedSpace::new(labels).expect("labels checked distinct"));
        }
    }
    found.ok_or_else(|| mismatch(item.at, format!("{} `{}` has no basis", item.kind.keyword(), item.name)))
}

/// Column `col` of a `rows x cols` matrix built from per-column vectors.
struct Columns {
    rows: usize,
    cols: Vec<SparseVec>,
}

impl Columns {
    fn new(rows: usize, cols: usize) -> Self {
        Columns {
            rows,
            cols: vec![SparseVec::new(); cols],
        }
    }

    fn set(&mut self, col: usize, v: SparseVec, at: Pos) -> Result<(), SpecError> {
        if !self.cols[col].is_zero() {
            return Err(mismatch(at, "structure constant given twice"));
        }
        self.cols[col] = v;
        Ok(())
    }

    fn matrix(self) -> SparseMatrix {
        SparseMatrix::from_columns(self.rows, self.cols)
    }
}

fn build_algebra(item: &Item, space: &BasedSpace) -> Result<AlgebraData, SpecError> {
    let d = space.dim();
    let mut mul = Columns::new(d, d * d);
    let mut unit = None;
    for st in &item.body {
        match &st.op {
            Op::Mul { a, b, rhs } => {
                let col = index(space, a)? * d + index(space, b)?;
                mul.set(col, vector(rhs, &[space])?, st.at)?;
            }
            Op::Unit(rhs) => unit = Some(vector(rhs, &[space])?),
            _ => {}
        }
    }
    let unit = unit.ok_or_else(|| mismatch(item.at, format!("`{}` has no unit", item.name)))?;
    AlgebraData::new(space.clone(), mul.matrix(), unit).map_err(|e| mismatch(item.at, e.to_string()))
}

fn build_hopf(item: &Item) -> Result<HopfData, SpecError> {
    let space = basis_of(item)?;
    let d = space.dim();
    let alg = build_algebra(item, &space)?;
    let mut comul = Columns::new(d * d, d);
    let mut counit = Vec::new();
    let mut s = Columns::new(d, d);
    for st in &item.body {
        match &st.op {
            Op::Comul { b, rhs } => comul.set(index(&space, b)?, vector(rhs, &[&space, &space])?, st.at)?,
            Op::Counit { b, value } => counit.push((index(&space, b)?, value.clone())),
            Op::Antipode { b, rhs } => s.set(index(&space, b)?, vector(rhs, &[&space])?, st.at)?,
            _ => {}
        }
    }
    let coalg = CoalgebraData::new(space, comul.matrix(), SparseVec::from_pairs(counit)).map_err(|e| mismatch(item.at, e.to_string()))?;
    HopfData::new(alg, coalg, s.matrix(), None).map_err(|e| mismatch(item.at, e.to_string()))
}

fn single(terms: &[Term], space: &BasedSpace) -> Result<SparseVec, SpecError> {
    vector(terms, &[space])
}

fn cup_kind(n: &Name) -> Result<CupKind, SpecError> {
    match n.text.as_str() {
        "coalgebra" => Ok(CupKind::Coalgebra),
        "relative" => Ok(CupKind::Relative),
        "crossed" => Ok(CupKind::Crossed),
        other => Err(SpecError::Parse {
            line: n.at.line,
            col: n.at.col,
            msg: format!("unknown context kind `{other}`"),
        }),
    }
}

impl Model {
    pub fn hopf(&self, name: &str) -> Option<&Arc<HopfData>> {
        self.hopfs.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn module(&self, name: &str) -> Option<&ModuleAlgebra> {
        self.modules.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn comodule(&self, name: &str) -> Option<&ComoduleAlgebra> {
        self.comodules.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn pair(&self, name: &str) -> Option<&ModularPair> {
        self.pairs.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn sub(&self, name: &str) -> Option<&SubHopf> {
        self.subs.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn trace(&self, name: &str) -> Option<&TraceSpec> {
        self.traces.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    /// An algebra by name: a declared algebra or the algebra of a Hopf algebra.
    pub fn algebra(&self, name: &str) -> Option<&AlgebraData> {
        self.algebras
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .or_else(|| self.hopf(name).map(|h| &h.alg))
    }

    fn algebra_ref(&self, n: &Name) -> Result<&AlgebraData, SpecError> {
        self.algebra(&n.text).ok_or_else(|| unresolved(n))
    }

    pub fn resolve(spec: &SpecFile) -> Result<Model, SpecError> {
        let mut m = Model::default();
        let attr = |item: &Item, key: &str| item.attr(key).cloned().expect("required attributes checked by the parser");
        for item in spec.items_of(ItemKind::Hopf) {
            m.hopfs.push((item.name.clone(), Arc::new(build_hopf(item)?)));
        }
        for item in spec.items_of(ItemKind::Algebra) {
            if m.hopf(&item.name).is_some() {
                return Err(mismatch(item.at, format!("`{}` names both a Hopf algebra and an algebra", item.name)));
            }
            let space = basis_of(item)?;
            m.algebras.push((item.name.clone(), build_algebra(item, &space)?));
        }
        for item in spec.items_of(ItemKind::Complex) {
            let c = CocyclicComplex::from_text(&item.raw.join("\n")).map_err(|e| mismatch(item.at, e.to_string()))?;
            m.complexes.push((item.name.clone(), c));
        }
        for item in spec.items_of(ItemKind::ModuleAlgebra) {
            let h = lookup(&m.hopfs, &attr(item, "hopf"))?.clone();
            let alg = m.algebra_ref(&attr(item, "algebra"))?.clone();
            let (dh, da) = (h.dim(), alg.dim());
            let mut act = Columns::new(da, dh * da);
            for st in &item.body {
                if let Op::Act { h: hn, a, rhs } = &st.op {
                    let col = index(h.space(), hn)? * da + index(&alg.space, a)?;
                    act.set(col, single(rhs, &alg.space)?, st.at)?;
                }
            }
            let ma = ModuleAlgebra::new(h, alg, act.matrix()).map_err(|e| mismatch(item.at, e.to_string()))?;
            m.modules.push((item.name.clone(), ma));
        }
        for item in spec.items_of(ItemKind::ComoduleAlgebra) {
            let h = lookup(&m.hopfs, &attr(item, "hopf"))?.clone();
            let alg = m.algebra_ref(&attr(item, "algebra"))?.clone();
            let mut co = Columns::new(h.dim() * alg.dim(), alg.dim());
            for st in &item.body {
                if let Op::Coact { b, rhs } = &st.op {
                    co.set(index(&alg.space, b)?, vector(rhs, &[h.space(), &alg.space])?, st.at)?;
                }
            }
            let ba = ComoduleAlgebra::new(h, alg, co.matrix()).map_err(|e| mismatch(item.at, e.to_string()))?;
            m.comodules.push((item.name.clone(), ba));
        }
        for item in spec.items_of(ItemKind::Pair) {
            let h = lookup(&m.hopfs, &attr(item, "hopf"))?.clone();
            let mut delta = Vec::new();
            let mut sigma = None;
            for st in &item.body {
                match &st.op {
                    Op::Delta { h: hn, value } => delta.push((index(h.space(), hn)?, value.clone())),
                    Op::Sigma(rhs) => sigma = Some(single(rhs, h.space())?),
                    _ => {}
                }
            }
            let sigma = sigma.ok_or_else(|| mismatch(item.at, format!("pair `{}` has no sigma", item.name)))?;
            m.pairs.push((item.name.clone(), ModularPair::new(h, SparseVec::from_pairs(delta), sigma)));
        }
        for item in spec.items_of(ItemKind::SubHopf) {
            let h = lookup(&m.hopfs, &attr(item, "hopf"))?.clone();
            let mut gens = Vec::new();
            for st in &item.body {
                if let Op::Span(rhs) = &st.op {
                    gens.push(single(rhs, h.space())?);
                }
            }
            m.subs.push((item.name.clone(), SubHopf::new(h, &gens)));
        }
        for item in spec.items_of(ItemKind::Trace) {
            let an = attr(item, "algebra");
            let alg = m.algebra_ref(&an)?;
            let mut values: Vec<(usize, Scalar)> = Vec::new();
            for st in &item.body {
                if let Op::Value { a, value } = &st.op {
                    values.push((index(&alg.space, a)?, value.clone()));
                }
            }
            let t = TraceSpec {
                algebra: an.text,
                values: SparseVec::from_pairs(values),
            };
            m.traces.push((item.name.clone(), t));
        }
        for item in spec.items_of(ItemKind::Context) {
            let kind = cup_kind(&attr(item, "kind"))?;
            let mn = attr(item, "module");
            let ma = m.module(&mn.text).ok_or_else(|| unresolved(&mn))?;
            let pn = attr(item, "pair");
            let mp = m.pair(&pn.text).ok_or_else(|| unresolved(&pn))?;
            if ma.hopf != mp.hopf {
                return Err(mismatch(item.at, format!("context `{}`: module and pair act through different Hopf algebras", item.name)));
            }
            let need = |key: &str| -> Result<Name, SpecError> {
                item.attr(key).cloned().ok_or_else(|| SpecError::Parse {
                    line: item.at.line,
                    col: item.at.col,
                    msg: format!("{} context `{}` needs `{key}=`", kind.name(), item.name),
                })
            };
            let sub = match kind {
                CupKind::Relative => {
                    let sn = need("sub")?;
                    let s = m.sub(&sn.text).ok_or_else(|| unresolved(&sn))?;
                    if s.hopf != ma.hopf {
                        return Err(mismatch(sn.at, format!("`{}` lives in another Hopf algebra", sn.text)));
                    }
                    Some(sn.text)
                }
                _ => None,
            };
            let comodule = match kind {
                CupKind::Crossed => {
                    let bn = need("comodule")?;
                    let b = m.comodule(&bn.text).ok_or_else(|| unresolved(&bn))?;
                    if b.hopf != ma.hopf {
                        return Err(mismatch(bn.at, format!("`{}` coacts through another Hopf algebra", bn.text)));
                    }
                    Some(bn.text)
                }
                _ => None,
            };
            let trace = match item.attr("trace") {
                Some(tn) => {
                    let t = m.trace(&tn.text).ok_or_else(|| unresolved(tn))?;
                    if m.algebra(&t.algebra).map(|a| &a.space) != Some(&ma.alg.space) {
                        return Err(mismatch(tn.at, format!("trace `{}` is not on the algebra of `{}`", tn.text, mn.text)));
                    }
                    Some(tn.text.clone())
                }
                None => None,
            };
            m.contexts.push(ContextSpec {
                name: item.name.clone(),
                kind,
                module: mn.text,
                pair: pn.text,
                sub,
                comodule,
                trace,
            });
        }
        if let Some(p) = spec.params() {
            for (k, v) in &p.attrs {
                if k != "tasks" && v.text.parse::<usize>().is_err() {
                    return Err(SpecError::Parse {
                        line: v.at.line,
                        col: v.at.col,
                        msg: format!("`{k}` needs a nonnegative integer"),
                    });
                }
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_syntax;

    const KZ2: &str = "hopf k\nbasis e g\nmul e e = e\nmul e g = g\nmul g e = g\nmul g g = e\nunit = e\n\
        comul e = e|e\ncomul g = g|g\ncounit e = 1\ncounit g = 1\nantipode e = e\nantipode g = g\nend\n";

    #[test]
    fn group_algebra_round_trips_into_engine_data() {
        let m = Model::resolve(&parse_syntax(KZ2).unwrap()).unwrap();
        let h = m.hopf("k").unwrap();
        assert_eq!(**h, hopf_cyclic::catalog::cyclic_group_algebra(2));
    }

    #[test]
    fn undeclared_label_is_unresolved_at_its_line() {
        let text = KZ2.replace("mul g g = e", "mul g g = h");
        let e = Model::resolve(&parse_syntax(&text).unwrap()).unwrap_err();
        assert!(matches!(e, SpecError::UnresolvedName { line: 6, col: 11, ref name } if name == "h"), "{e}");
    }

    #[test]
    fn wrong_tensor_arity_is_a_dimension_mismatch() {
        let text = KZ2.replace("comul g = g|g", "comul g = g");
        let e = Model::resolve(&parse_syntax(&text).unwrap()).unwrap_err();
        assert!(matches!(e, SpecError::DimensionMismatch { line: 9, .. }), "{e}");
    }

    #[test]
    fn contexts_check_their_references() {
        let text = format!("{KZ2}\ncontext c kind=coalgebra module=nope pair=p\n");
        let e = Model::resolve(&parse_syntax(&text).unwrap()).unwrap_err();
        assert!(matches!(e, SpecError::UnresolvedName { ref name, .. } if name == "nope"));
    }
}
