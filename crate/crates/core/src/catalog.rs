//! Small Hopf algebras and companion structures used as fixtures.

use std::sync::Arc;

use crate::hopf::{AlgebraData, CoalgebraData, HopfData, ModularPair};
use crate::symmetry::{ComoduleAlgebra, ModuleAlgebra};
use crate::scalar::Scalar;
use crate::space::BasedSpace;
use crate::sparse::{SparseMatrix, SparseVec};

fn group_label(k: usize) -> String {
    match k {
        0 => "e".to_string(),
        1 => "g".to_string(),
        _ => format!("g{k}"),
    }
}

/// Group algebra of the cyclic group of order `n`, basis `e, g, g2, ...`.
pub fn cyclic_group_algebra(n: usize) -> HopfData {
    assert!(n >= 1);
    let space = BasedSpace::new((0..n).map(group_label)).expect("distinct labels");
    let mut mul = Vec::new();
    let mut comul = Vec::new();
    let mut s = Vec::new();
    for a in 0..n {
        for b in 0..n {
            mul.push(((a + b) % n, a * n + b, Scalar::one()));
        }
        comul.push((a * n + a, a, Scalar::one()));
        s.push(((n - a) % n, a, Scalar::one()));
    }
    let alg = AlgebraData::new(
        space.clone(),
        SparseMatrix::from_triplets(n, n * n, mul).unwrap(),
        SparseVec::unit(0),
    )
    .unwrap();
    let coalg = CoalgebraData::new(
        space,
        SparseMatrix::from_triplets(n * n, n, comul).unwrap(),
        SparseVec::from_pairs((0..n).map(|k| (k, Scalar::one())).collect()),
    )
    .unwrap();
    HopfData::new(alg, coalg, SparseMatrix::from_triplets(n, n, s).unwrap(), None).unwrap()
}

/// Sweedler's four-dimensional Hopf algebra, basis `1, g, x, gx`:
/// `g² = 1`, `x² = 0`, `xg = -gx`, `Δx = x⊗1 + g⊗x`, `S(x) = -gx`.
pub fn sweedler() -> HopfData {
    // basis element g^a x^b has index a + 2b
    let space = BasedSpace::new(["1", "g", "x", "gx"]).unwrap();
    let idx = |a: usize, b: usize| (a % 2) + 2 * b;
    let mut mul = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    if b + d == 2 {
                        continue;
                    }
                    let sign = if b * c == 1 { -1 } else { 1 };
                    mul.push((idx(a + c, b + d), idx(a, b) * 4 + idx(c, d), Scalar::from_int(sign)));
                }
            }
        }
    }
    let one = Scalar::one();
    let comul = vec![
        (0, 0, one.clone()),
        (4 + 1, 1, one.clone()),
        (2 * 4, 2, one.clone()),
        (4 + 2, 2, one.clone()),
        (3 * 4 + 1, 3, one.clone()),
        (3, 3, one.clone()),
    ];
    let s = vec![
        (0, 0, one.clone()),
        (1, 1, one.clone()),
        (3, 2, Scalar::from_int(-1)),
        (2, 3, one.clone()),
    ];
    let alg = AlgebraData::new(
        space.clone(),
        SparseMatrix::from_triplets(4, 16, mul).unwrap(),
        SparseVec::unit(0),
    )
    .unwrap();
    let coalg = CoalgebraData::new(
        space,
        SparseMatrix::from_triplets(16, 4, comul).unwrap(),
        SparseVec::from_pairs(vec![(0, one.clone()), (1, one)]),
    )
    .unwrap();
    HopfData::new(alg, coalg, SparseMatrix::from_triplets(4, 4, s).unwrap(), None).unwrap()
}

/// Character of a cyclic group algebra sending the generator to `-1`
/// (`n` even), or of Sweedler's algebra with `g ↦ -1`, `x ↦ 0`.
pub fn sign_character(h: &HopfData) -> SparseVec {
    let labels = h.space().labels();
    SparseVec::from_pairs(
        labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| match l.as_str() {
                "e" | "1" => Some((i, Scalar::one())),
                "g" => Some((i, Scalar::from_int(-1))),
                _ if l.starts_with('g') && !l.contains('x') => {
                    let k: usize = l[1..].parse().ok()?;
                    Some((i, Scalar::sign(k)))
                }
                _ => None,
            })
            .collect(),
    )
}

/// Basis vector named `label`.
pub fn element(h: &HopfData, label: &str) -> SparseVec {
    SparseVec::unit(h.space().index_of(label).expect("known label"))
}

pub fn modular_pair(h: &Arc<HopfData>, delta: SparseVec, sigma: &str) -> ModularPair {
    let s = element(h, sigma);
    ModularPair::new(h.clone(), delta, s)
}

/// `ℚⁿ` with orthogonal idempotents `p0, p1, ...` and unit their sum.
pub fn function_algebra(n: usize) -> AlgebraData {
    let space = BasedSpace::new((0..n).map(|i| format!("p{i}"))).expect("distinct labels");
    let mul = (0..n).map(|i| (i, i * n + i, Scalar::one())).collect();
    let unit = SparseVec::from_pairs((0..n).map(|i| (i, Scalar::one())).collect());
    AlgebraData::new(space, SparseMatrix::from_triplets(n, n * n, mul).unwrap(), unit).unwrap()
}

/// `ℚᵐ` as a module algebra over `ℚ[ℤ/n]` (`m` dividing `n`) with
/// `g^k·p_i = p_{i+k mod m}`.
pub fn translation_module_algebra(h: &Arc<HopfData>, m: usize) -> ModuleAlgebra {
    let n = h.dim();
    assert!(m >= 1 && n.is_multiple_of(m));
    let alg = function_algebra(m);
    let act = (0..n)
        .flat_map(|k| (0..m).map(move |i| ((i + k) % m, k * m + i, Scalar::one())))
        .collect();
    ModuleAlgebra::new(h.clone(), alg, SparseMatrix::from_triplets(m, n * m, act).unwrap()).unwrap()
}

/// `ℚ[ℤ/n]` as a comodule algebra over itself, graded by `b ↦ b⊗b`.
pub fn graded_group_algebra(h: &Arc<HopfData>) -> ComoduleAlgebra {
    let n = h.dim();
    let mut alg = h.alg.clone();
    alg.space = BasedSpace::new((0..n).map(|k| format!("b{k}"))).unwrap();
    ComoduleAlgebra::new(h.clone(), alg, h.coalg.comul_matrix().clone()).unwrap()
}

/// The functional summing all coordinates.
pub fn sum_functional(dim: usize) -> SparseVec {
    SparseVec::from_pairs((0..dim).map(|i| (i, Scalar::one())).collect())
}
