//! Exact elimination: echelon forms, kernels, ranks and realized sub/quotient spaces.
//!
//! Rows are kept integral and primitive during forward elimination
//! (fraction-free, content removed after every update). Reduced forms are
//! normalized to leading coefficient 1 at the end.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::{SparseMatrix, SparseVec};

const NONE: usize = usize::MAX;

fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// Scales `v` to an integral vector with coprime entries and positive leading entry.
pub fn primitive(v: SparseVec) -> SparseVec {
    let Some(first) = v.first() else {
        return v;
    };
    let negative = first.1.is_negative();
    let v = if v.iter().all(|(_, x)| x.is_integer()) {
        v
    } else {
        let l = Scalar::common_denominator(v.entries().iter().map(|e| &e.1));
        v.scale(&Scalar::from_bigint(l))
    };
    let mut g: u64 = 0;
    let mut big = false;
    for (_, x) in v.iter() {
        match x.small_int() {
            Some(n) => {
                g = g.gcd(&n.unsigned_abs());
                if g == 1 {
                    break;
                }
            }
            None => {
                big = true;
                break;
            }
        }
    }
    let divisor = if big {
        let mut gb = BigInt::zero();
        for (_, x) in v.iter() {
            gb = big_gcd(&gb, &x.numer());
            if gb.is_one() {
                break;
            }
        }
        Scalar::from_bigint(gb)
    } else {
        Scalar::from_bigint(BigInt::from(g))
    };
    let divisor = if negative { -divisor } else { divisor };
    if divisor.is_one() {
        v
    } else {
        v.scale(&divisor.recip())
    }
}

fn int_gcd(a: &Scalar, b: &Scalar) -> Scalar {
    if let (Some(x), Some(y)) = (a.small_int(), b.small_int()) {
        let g = x.unsigned_abs().gcd(&y.unsigned_abs());
        return Scalar::from_bigint(BigInt::from(g));
    }
    Scalar::from_bigint(big_gcd(&a.numer(), &b.numer()).abs())
}

/// Row echelon form built incrementally; leading columns are distinct.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<usize>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_row: vec![NONE; ncols],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Eliminates leading entries of `v` against the stored rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = primitive(v.clone());
        while let Some((lead, a)) = v.first().cloned() {
            let p = self.pivot_row[lead];
            if p == NONE {
                break;
            }
            let row = &self.rows[p];
            let c = &row.first().expect("stored rows are nonzero").1;
            let g = int_gcd(&a, c);
            v = primitive(v.lin_comb(&(c / &g), row, &-(&a / &g)));
        }
        v
    }

    /// Inserts `v`; returns whether it was independent of the stored rows.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        debug_assert!(v.max_index().is_none_or(|m| m < self.ncols));
        let r = self.reduce(v);
        match r.first() {
            None => false,
            Some(&(lead, _)) => {
                self.pivot_row[lead] = self.rows.len();
                self.rows.push(r);
                true
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Reduced row echelon form with unit leading entries.
    pub fn into_rref(self) -> Rref {
        let Echelon {
            ncols,
            rows,
            pivot_row,
        } = self;
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&r| std::cmp::Reverse(rows[r].first().unwrap().0));
        let mut reduced: Vec<Option<SparseVec>> = vec![None; rows.len()];
        for &r in &order {
            let mut v = rows[r].clone();
            let lead = v.first().unwrap().0;
            let targets: Vec<usize> = v
                .iter()
                .filter(|&(c, _)| c != lead && pivot_row[c] != NONE)
                .map(|(c, _)| c)
                .collect();
            let lc = v.first().unwrap().1.clone();
            v = v.scale(&lc.recip());
            for c in targets {
                let x = v.get(c);
                if x.is_zero() {
                    continue;
                }
                let p = reduced[pivot_row[c]].as_ref().expect("higher pivots reduced first");
                v = v.lin_comb(&Scalar::one(), p, &-x);
            }
            reduced[r] = Some(v);
        }
        let mut out: Vec<SparseVec> = reduced.into_iter().map(Option::unwrap).collect();
        out.sort_by_key(|v| v.first().unwrap().0);
        let pivots = out.iter().map(|v| v.first().unwrap().0).collect();
        Rref {
            ncols,
            rows: out,
            pivots,
        }
    }
}

/// Reduced row echelon form: rows sorted by pivot column, leading entries 1,
/// zeros at every other pivot column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub ncols: usize,
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn of_vectors<'a>(ncols: usize, vs: impl IntoIterator<Item = &'a SparseVec>) -> Rref {
        let mut e = Echelon::new(ncols);
        for v in vs {
            e.insert(v);
        }
        e.into_rref()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }
}

/// Exact basis of the null space of `m`, one vector per free column.
///
/// Each vector has entry 1 at its own free column, which is also its last
/// nonzero entry, and entry 0 at every other free column. Vectors are listed
/// by increasing free column.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let rref = Rref::of_vectors(m.cols(), &m.row_vectors());
    kernel_from_rref(&rref)
}

fn kernel_from_rref(rref: &Rref) -> Vec<SparseVec> {
    let free = rref.free_columns();
    let mut slot = vec![NONE; rref.ncols];
    for (k, &f) in free.iter().enumerate() {
        slot[f] = k;
    }
    let mut parts: Vec<Vec<(usize, Scalar)>> = free.iter().map(|&f| vec![(f, Scalar::one())]).collect();
    for (row, &lead) in rref.rows.iter().zip(&rref.pivots) {
        for (c, v) in row.iter() {
            if c != lead && slot[c] != NONE {
                parts[slot[c]].push((lead, -v));
            }
        }
    }
    parts.into_iter().map(SparseVec::from_pairs).collect()
}

/// Exact rank of `m`.
pub fn image_rank(m: &SparseMatrix) -> usize {
    rank_of(m.rows(), m.columns())
}

pub fn rank_of<'a>(ncols: usize, vs: impl IntoIterator<Item = &'a SparseVec>) -> usize {
    let mut e = Echelon::new(ncols);
    vs.into_iter().filter(|v| e.insert(v)).count()
}

/// `dim span(big) - dim span(small)`, requiring `span(small) ⊆ span(big)`.
pub fn quotient_dim(ambient: usize, big: &[SparseVec], small: &[SparseVec]) -> Result<usize> {
    let mut e = Echelon::new(ambient);
    let rb = big.iter().filter(|v| e.insert(v)).count();
    for (k, v) in small.iter().enumerate() {
        if !e.contains(v) {
            return Err(Error::SubspaceNotContained { index: k });
        }
    }
    Ok(rb - rank_of(ambient, small))
}

/// Indices of `candidates` that extend a basis of `span(base)` greedily.
pub fn extend_basis(ambient: usize, base: &[SparseVec], candidates: &[SparseVec]) -> Vec<usize> {
    let mut e = Echelon::new(ambient);
    for v in base {
        e.insert(v);
    }
    candidates
        .iter()
        .enumerate()
        .filter(|(_, v)| e.insert(v))
        .map(|(k, _)| k)
        .collect()
}

/// Inverse of a square matrix, if it exists.
pub fn invert(m: &SparseMatrix) -> Option<SparseMatrix> {
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let rows: Vec<SparseVec> = m
        .row_vectors()
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let mut e = r.into_entries();
            e.push((n + i, Scalar::one()));
            SparseVec::from_sorted(e)
        })
        .collect();
    let rref = Rref::of_vectors(2 * n, &rows);
    if rref.pivots.len() != n || rref.pivots.iter().enumerate().any(|(k, &p)| k != p) {
        return None;
    }
    let inv_rows: Vec<SparseVec> = rref.rows.iter().map(|r| r.remap(|c| c.checked_sub(n))).collect();
    Some(SparseMatrix::from_rows(n, &inv_rows))
}

/// A subspace with a basis in which each vector owns a key coordinate:
/// entry 1 at its key and 0 at the other keys. Coordinates of a member are
/// read off at the keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<SparseVec>,
    keys: Vec<usize>,
}

impl Subspace {
    pub fn full(n: usize) -> Self {
        Subspace {
            ambient: n,
            basis: (0..n).map(SparseVec::unit).collect(),
            keys: (0..n).collect(),
        }
    }

    /// Null space of `m`.
    pub fn kernel_of(m: &SparseMatrix) -> Self {
        let rref = Rref::of_vectors(m.cols(), &m.row_vectors());
        let keys = rref.free_columns();
        Subspace {
            ambient: m.cols(),
            basis: kernel_from_rref(&rref),
            keys,
        }
    }

    /// Span of `vs`, with the reduced echelon rows as basis.
    pub fn span_of(ambient: usize, vs: &[SparseVec]) -> Self {
        let rref = Rref::of_vectors(ambient, vs);
        Subspace {
            ambient,
            keys: rref.pivots,
            basis: rref.rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn keys(&self) -> &[usize] {
        &self.keys
    }

    /// Inclusion, `ambient x dim`.
    pub fn inclusion(&self) -> SparseMatrix {
        SparseMatrix::from_columns(self.ambient, self.basis.clone())
    }

    /// Coordinate selection, `dim x ambient`; exact on members.
    pub fn coordinates(&self) -> SparseMatrix {
        let mut columns = vec![SparseVec::new(); self.ambient];
        for (k, &key) in self.keys.iter().enumerate() {
            columns[key] = SparseVec::unit(k);
        }
        SparseMatrix::from_columns(self.dim(), columns)
    }

    pub fn coords(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            self.keys
                .iter()
                .enumerate()
                .map(|(k, &key)| (k, v.get(key)))
                .collect(),
        )
    }

    pub fn expand(&self, coords: &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        for (k, c) in coords.iter() {
            acc = acc.lin_comb(&Scalar::one(), &self.basis[k], c);
        }
        acc
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        &self.expand(&self.coords(v)) == v
    }
}

/// Quotient of the coordinate space by a span of relations; the basis of the
/// quotient is the classes of the non-pivot coordinates of the reduced relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    ambient: usize,
    relations: Rref,
    kept: Vec<usize>,
    position: Vec<usize>,
}

impl Quotient {
    pub fn new(ambient: usize, relations: &[SparseVec]) -> Self {
        let relations = Rref::of_vectors(ambient, relations);
        let kept = relations.free_columns();
        let mut position = vec![NONE; ambient];
        for (k, &j) in kept.iter().enumerate() {
            position[j] = k;
        }
        Quotient {
            ambient,
            relations,
            kept,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.kept.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn relations(&self) -> &[SparseVec] {
        &self.relations.rows
    }

    /// Canonical projection, `dim x ambient`.
    pub fn projection(&self) -> SparseMatrix {
        let mut columns = vec![SparseVec::new(); self.ambient];
        for (k, &j) in self.kept.iter().enumerate() {
            columns[j] = SparseVec::unit(k);
        }
        for (row, &p) in self.relations.rows.iter().zip(&self.relations.pivots) {
            columns[p] = SparseVec::from_pairs(
                row.iter()
                    .filter(|&(c, _)| c != p)
                    .map(|(c, v)| (self.position[c], -v))
                    .collect(),
            );
        }
        SparseMatrix::from_columns(self.dim(), columns)
    }

    /// Section sending each basis class to its kept coordinate, `ambient x dim`.
    pub fn lift(&self) -> SparseMatrix {
        SparseMatrix::from_columns(
            self.ambient,
            self.kept.iter().map(|&j| SparseVec::unit(j)).collect(),
        )
    }
}

/// How a degree of a complex sits inside its ambient coordinate space.
#[derive(Clone, Debug)]
pub enum Realization {
    Full(usize),
    Quotient(Quotient),
    Subspace(Subspace),
}

impl Realization {
    pub fn dim(&self) -> usize {
        match self {
            Realization::Full(n) => *n,
            Realization::Quotient(q) => q.dim(),
            Realization::Subspace(s) => s.dim(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Realization::Full(n) => *n,
            Realization::Quotient(q) => q.ambient_dim(),
            Realization::Subspace(s) => s.ambient_dim(),
        }
    }

    /// Realized space into ambient coordinates.
    pub fn lift(&self) -> SparseMatrix {
        match self {
            Realization::Full(n) => SparseMatrix::identity(*n),
            Realization::Quotient(q) => q.lift(),
            Realization::Subspace(s) => s.inclusion(),
        }
    }

    /// Ambient coordinates onto the realized space.
    pub fn reduce(&self) -> SparseMatrix {
        match self {
            Realization::Full(n) => SparseMatrix::identity(*n),
            Realization::Quotient(q) => q.projection(),
            Realization::Subspace(s) => s.coordinates(),
        }
    }

    /// Transports an ambient operator to the realized spaces, checking that it
    /// descends (quotient source) and lands inside (subspace target).
    /// Returns `None` when it does not.
    pub fn restrict(op: &SparseMatrix, src: &Realization, dst: &Realization) -> Option<SparseMatrix> {
        let dst_reduce = dst.reduce();
        if let Realization::Quotient(q) = src {
            for rel in q.relations() {
                let image = op.mul_vec(rel);
                let vanishes = match dst {
                    Realization::Quotient(_) => dst_reduce.mul_vec(&image).is_zero(),
                    _ => image.is_zero(),
                };
                if !vanishes {
                    return None;
                }
            }
        }
        let moved = op.compose(&src.lift()).ok()?;
        let m = dst_reduce.compose(&moved).ok()?;
        if let Realization::Subspace(s) = dst {
            if s.inclusion().compose(&m).ok()? != moved {
                return None;
            }
        }
        Some(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::tests::arb_matrix;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> SparseVec {
        SparseVec::from_dense(&xs.iter().map(|&x| Scalar::from_int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&SparseMatrix::zeros(2, 2)), vec![v(&[1, 0]), v(&[0, 1])]);
        assert!(kernel_basis(&SparseMatrix::identity(3)).is_empty());
        let m = SparseMatrix::from_dense(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(kernel_basis(&m), vec![v(&[-2, 1])]);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(image_rank(&SparseMatrix::identity(4)), 4);
        assert_eq!(image_rank(&SparseMatrix::zeros(3, 5)), 0);
        assert_eq!(image_rank(&SparseMatrix::from_dense(&[vec![1, 2], vec![2, 4]])), 1);
    }

    #[test]
    fn quotient_dim_examples() {
        let (e1, e2) = (v(&[1, 0]), v(&[0, 1]));
        assert_eq!(quotient_dim(2, &[e1.clone(), e2.clone()], &[e1.clone()]).unwrap(), 1);
        assert_eq!(quotient_dim(2, &[e1.clone()], &[e1.clone()]).unwrap(), 0);
        assert_eq!(quotient_dim(2, &[e1.clone(), e2.clone()], &[v(&[1, 1])]).unwrap(), 1);
        assert_eq!(
            quotient_dim(2, &[e1], &[e2]),
            Err(Error::SubspaceNotContained { index: 0 })
        );
    }

    #[test]
    fn quotient_projection_kills_relations() {
        let rel = vec![v(&[1, -1, 0]), v(&[0, 2, -2])];
        let q = Quotient::new(3, &rel);
        assert_eq!(q.dim(), 1);
        let p = q.projection();
        for r in &rel {
            assert!(p.mul_vec(r).is_zero());
        }
        assert_eq!(p.compose(&q.lift()).unwrap(), SparseMatrix::identity(1));
    }

    #[test]
    fn fractional_entries_eliminate() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            vec![
                (0, 0, Scalar::from_frac(1, 2)),
                (0, 1, Scalar::from_frac(1, 3)),
                (1, 1, Scalar::from_frac(2, 7)),
                (1, 2, Scalar::from_int(5)),
            ],
        )
        .unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).is_zero());
        assert_eq!(k[0].last().unwrap(), &(2, Scalar::one()));
    }

    #[test]
    fn inverse_of_small_matrix() {
        let m = SparseMatrix::from_dense(&[vec![2, 1], vec![1, 1]]);
        let inv = invert(&m).unwrap();
        assert_eq!(m.compose(&inv).unwrap(), SparseMatrix::identity(2));
        assert!(invert(&SparseMatrix::from_dense(&[vec![1, 2], vec![2, 4]])).is_none());
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix(4, 6)) {
            let k = kernel_basis(&m);
            prop_assert_eq!(image_rank(&m) + k.len(), m.cols());
            for x in &k {
                prop_assert!(m.mul_vec(x).is_zero());
            }
        }

        #[test]
        fn kernel_is_canonical(m in arb_matrix(3, 5)) {
            let k = kernel_basis(&m);
            // Re-echelonizing the kernel as a subspace reproduces the same vectors.
            let km = SparseMatrix::from_columns(5, k.clone());
            let again = kernel_basis(&SparseMatrix::from_rows(5, &kernel_basis(&km.transpose())));
            prop_assert_eq!(again, k);
        }

        #[test]
        fn rank_transpose(m in arb_matrix(5, 3)) {
            prop_assert_eq!(image_rank(&m), image_rank(&m.transpose()));
        }

        #[test]
        fn subspace_coordinates_roundtrip(m in arb_matrix(2, 5)) {
            let s = Subspace::kernel_of(&m);
            let sel = s.coordinates().compose(&s.inclusion()).unwrap();
            prop_assert_eq!(sel, SparseMatrix::identity(s.dim()));
        }
    }
}
