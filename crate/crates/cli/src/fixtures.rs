//! Writes engine objects back out as spec items, and the shipped fixture files.

use std::sync::Arc;

use hopf_cyclic::catalog::{
    cyclic_group_algebra, element, graded_group_algebra, sign_character, sum_functional, sweedler, translation_module_algebra,
};
use hopf_cyclic::hopf::{AlgebraData, HopfData, ModularPair};
use hopf_cyclic::space::unflatten;
use hopf_cyclic::symmetry::{ComoduleAlgebra, ModuleAlgebra, SubHopf};
use hopf_cyclic::{BasedSpace, SparseVec};

use crate::spec::{Item, ItemKind, Name, Op, Pos, SpecFile, Statement, Term};

fn nm(s: &str) -> Name {
    Name {
        text: s.to_string(),
        at: Pos::default(),
    }
}

fn st(op: Op) -> Statement {
    Statement { op, at: Pos::default() }
}

fn item(kind: ItemKind, name: &str, attrs: &[(&str, &str)], body: Vec<Statement>) -> Item {
    Item {
        kind,
        name: name.to_string(),
        attrs: attrs.iter().map(|(k, v)| (k.to_string(), nm(v))).collect(),
        body,
        raw: Vec::new(),
        at: Pos::default(),
    }
}

/// A vector over `spaces[0] ⊗ spaces[1] ⊗ …` as terms.
fn terms(v: &SparseVec, spaces: &[&BasedSpace]) -> Vec<Term> {
    let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
    v.iter()
        .map(|(i, c)| Term {
            coef: c.clone(),
            labels: unflatten(&dims, i).iter().zip(spaces).map(|(&k, s)| nm(s.label(k))).collect(),
            at: Pos::default(),
        })
        .collect()
}

fn basis(space: &BasedSpace) -> Statement {
    st(Op::Basis(space.labels().iter().map(|l| nm(l)).collect()))
}

fn mul_lines(alg: &AlgebraData) -> Vec<Statement> {
    let d = alg.dim();
    let sp = &alg.space;
    let m = alg.mul_matrix();
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let col = m.column(a * d + b);
            if !col.is_zero() {
                out.push(st(Op::Mul {
                    a: nm(sp.label(a)),
                    b: nm(sp.label(b)),
                    rhs: terms(col, &[sp]),
                }));
            }
        }
    }
    out.push(st(Op::Unit(terms(&alg.unit, &[sp]))));
    out
}

pub fn algebra_item(name: &str, alg: &AlgebraData) -> Item {
    let mut body = vec![basis(&alg.space)];
    body.extend(mul_lines(alg));
    item(ItemKind::Algebra, name, &[], body)
}

pub fn hopf_item(name: &str, h: &HopfData) -> Item {
    let sp = h.space();
    let mut body = vec![basis(sp)];
    body.extend(mul_lines(&h.alg));
    let comul = h.coalg.comul_matrix();
    for b in 0..h.dim() {
        body.push(st(Op::Comul {
            b: nm(sp.label(b)),
            rhs: terms(comul.column(b), &[sp, sp]),
        }));
    }
    for b in 0..h.dim() {
        let value = h.counit_vec().get(b);
        if !value.is_zero() {
            body.push(st(Op::Counit { b: nm(sp.label(b)), value }));
        }
    }
    for b in 0..h.dim() {
        body.push(st(Op::Antipode {
            b: nm(sp.label(b)),
            rhs: terms(h.antipode.column(b), &[sp]),
        }));
    }
    item(ItemKind::Hopf, name, &[], body)
}

pub fn module_item(name: &str, hopf: &str, algebra: &str, ma: &ModuleAlgebra) -> Item {
    let (hs, asp) = (ma.hopf.space(), &ma.alg.space);
    let mut body = Vec::new();
    for h in 0..hs.dim() {
        let act = ma.act_by(h);
        for a in 0..asp.dim() {
            if !act.column(a).is_zero() {
                body.push(st(Op::Act {
                    h: nm(hs.label(h)),
                    a: nm(asp.label(a)),
                    rhs: terms(act.column(a), &[asp]),
                }));
            }
        }
    }
    item(ItemKind::ModuleAlgebra, name, &[("hopf", hopf), ("algebra", algebra)], body)
}

pub fn comodule_item(name: &str, hopf: &str, algebra: &str, ba: &ComoduleAlgebra) -> Item {
    let (hs, bsp) = (ba.hopf.space(), &ba.alg.space);
    let m = ba.coaction.matrix();
    let body = (0..bsp.dim())
        .map(|b| {
            st(Op::Coact {
                b: nm(bsp.label(b)),
                rhs: terms(m.column(b), &[hs, bsp]),
            })
        })
        .collect();
    item(ItemKind::ComoduleAlgebra, name, &[("hopf", hopf), ("algebra", algebra)], body)
}

pub fn pair_item(name: &str, hopf: &str, mp: &ModularPair) -> Item {
    let sp = mp.hopf.space();
    let mut body: Vec<Statement> = mp
        .delta
        .iter()
        .map(|(h, c)| {
            st(Op::Delta {
                h: nm(sp.label(h)),
                value: c.clone(),
            })
        })
        .collect();
    body.push(st(Op::Sigma(terms(&mp.sigma, &[sp]))));
    item(ItemKind::Pair, name, &[("hopf", hopf)], body)
}

pub fn sub_item(name: &str, hopf: &str, sub: &SubHopf) -> Item {
    let sp = sub.hopf.space();
    let body = sub.span.basis().iter().map(|v| st(Op::Span(terms(v, &[sp])))).collect();
    item(ItemKind::SubHopf, name, &[("hopf", hopf)], body)
}

pub fn trace_item(name: &str, algebra: &str, space: &BasedSpace, values: &SparseVec) -> Item {
    let body = values
        .iter()
        .map(|(a, c)| {
            st(Op::Value {
                a: nm(space.label(a)),
                value: c.clone(),
            })
        })
        .collect();
    item(ItemKind::Trace, name, &[("algebra", algebra)], body)
}

pub fn context_item(name: &str, attrs: &[(&str, &str)]) -> Item {
    item(ItemKind::Context, name, attrs, Vec::new())
}

pub fn params_item(attrs: &[(&str, &str)]) -> Item {
    item(ItemKind::Params, "", attrs, Vec::new())
}

/// A comment header followed by the printed spec.
fn with_header(header: &str, spec: SpecFile) -> String {
    let mut s = String::new();
    for l in header.lines() {
        s.push_str("# ");
        s.push_str(l);
        s.push('\n');
    }
    s.push('\n');
    s.push_str(&crate::spec::print_spec(&spec));
    s
}

fn trivial_pair(h: &Arc<HopfData>) -> ModularPair {
    ModularPair::trivial(h.clone())
}

fn group(n: usize) -> Arc<HopfData> {
    Arc::new(cyclic_group_algebra(n))
}

/// `(file name, contents)` for every shipped fixture.
pub fn shipped() -> Vec<(&'static str, String)> {
    let mut out = Vec::new();

    let k = Arc::new(HopfData::ground());
    let ma = ModuleAlgebra::trivial(k.clone(), AlgebraData::ground());
    out.push((
        "triv.spec",
        with_header(
            "The one-dimensional Hopf algebra acting trivially on the ground field.",
            SpecFile {
                items: vec![
                    hopf_item("k", &k),
                    pair_item("triv", "k", &trivial_pair(&k)),
                    module_item("ground", "k", "k", &ma),
                    context_item("c", &[("kind", "coalgebra"), ("module", "ground"), ("pair", "triv")]),
                    params_item(&[("max_degree", "4")]),
                ],
            },
        ),
    ));

    let kz2 = group(2);
    out.push((
        "kz2.spec",
        with_header(
            "Group algebra of Z/2 with the modular pair (counit, 1).",
            SpecFile {
                items: vec![
                    hopf_item("kz2", &kz2),
                    pair_item("triv", "kz2", &trivial_pair(&kz2)),
                    params_item(&[("max_degree", "4")]),
                ],
            },
        ),
    ));

    let kz3 = group(3);
    let tr3 = translation_module_algebra(&kz3, 3);
    out.push((
        "kz3.spec",
        with_header(
            "Group algebra of Z/3 translating the points of a three-point set.",
            SpecFile {
                items: vec![
                    hopf_item("kz3", &kz3),
                    pair_item("triv", "kz3", &trivial_pair(&kz3)),
                    algebra_item("fun3", &tr3.alg),
                    module_item("rot", "kz3", "fun3", &tr3),
                    trace_item("sum", "fun3", &tr3.alg.space, &sum_functional(3)),
                    context_item(
                        "c",
                        &[("kind", "coalgebra"), ("module", "rot"), ("pair", "triv"), ("trace", "sum")],
                    ),
                    params_item(&[("max_degree", "4"), ("cup_degree", "3")]),
                ],
            },
        ),
    ));

    let kz4 = group(4);
    let tr4 = translation_module_algebra(&kz4, 4);
    let sub = SubHopf::new(kz4.clone(), &[element(&kz4, "e"), element(&kz4, "g2")]);
    out.push((
        "kz4.spec",
        with_header(
            "Group algebra of Z/4 with the subgroup algebra K of Z/2 inside it,\nacting on four points by translation.",
            SpecFile {
                items: vec![
                    hopf_item("kz4", &kz4),
                    pair_item("triv", "kz4", &trivial_pair(&kz4)),
                    sub_item("K", "kz4", &sub),
                    algebra_item("fun4", &tr4.alg),
                    module_item("rot", "kz4", "fun4", &tr4),
                    context_item(
                        "c",
                        &[("kind", "relative"), ("module", "rot"), ("pair", "triv"), ("sub", "K")],
                    ),
                    params_item(&[("max_degree", "4"), ("cup_degree", "3")]),
                ],
            },
        ),
    ));

    let h4 = Arc::new(sweedler());
    let modular = ModularPair::new(h4.clone(), sign_character(&h4), element(&h4, "1"));
    let twisted = ModularPair::new(h4.clone(), h4.counit_vec().clone(), element(&h4, "g"));
    let ad = ModuleAlgebra::adjoint(h4.clone());
    out.push((
        "h4.spec",
        with_header(
            "Sweedler's four-dimensional Hopf algebra with its two modular pairs in\ninvolution, acting on itself by the adjoint action.",
            SpecFile {
                items: vec![
                    hopf_item("h4", &h4),
                    pair_item("modular", "h4", &modular),
                    pair_item("twisted", "h4", &twisted),
                    module_item("ad", "h4", "h4", &ad),
                    context_item("c", &[("kind", "coalgebra"), ("module", "ad"), ("pair", "modular")]),
                    params_item(&[("max_degree", "4"), ("cup_degree", "3")]),
                ],
            },
        ),
    ));

    let swap = translation_module_algebra(&kz2, 2);
    let swap_items = || {
        vec![
            hopf_item("kz2", &kz2),
            pair_item("triv", "kz2", &trivial_pair(&kz2)),
            algebra_item("fun2", &swap.alg),
            module_item("swap", "kz2", "fun2", &swap),
            trace_item("sum", "fun2", &swap.alg.space, &sum_functional(2)),
        ]
    };
    let mut items = swap_items();
    items.push(context_item(
        "c",
        &[("kind", "coalgebra"), ("module", "swap"), ("pair", "triv"), ("trace", "sum")],
    ));
    items.push(params_item(&[("max_degree", "4"), ("cup_degree", "3")]));
    out.push((
        "swap.spec",
        with_header("Z/2 swapping the two points of a two-point set.", SpecFile { items }),
    ));

    let graded = graded_group_algebra(&kz2);
    let mut items = swap_items();
    items.push(algebra_item("grp", &graded.alg));
    items.push(comodule_item("graded", "kz2", "grp", &graded));
    items.push(context_item(
        "c",
        &[("kind", "crossed"), ("module", "swap"), ("pair", "triv"), ("comodule", "graded")],
    ));
    items.push(params_item(&[("max_degree", "4"), ("cup_degree", "3")]));
    out.push((
        "graded.spec",
        with_header(
            "The group algebra of Z/2 graded by itself, crossed with the swap action.",
            SpecFile { items },
        ),
    ));
    out
}
