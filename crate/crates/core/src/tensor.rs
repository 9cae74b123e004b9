//! Multilinear maps on tensor products of based spaces and a small term
//! rewriting engine used to turn explicit formulas into operator matrices.

use rayon::prelude::*;

use crate::scalar::Scalar;
use crate::space::{flat_index, product, unflatten};
use crate::sparse::{SparseMatrix, SparseVec};

/// Structure constants of a linear map `V1⊗..⊗Vk -> W1⊗..⊗Wl`, stored as a
/// matrix on the flattened tensor products (left factor major).
#[derive(Clone, Debug)]
pub struct StructureTensor {
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    matrix: SparseMatrix,
    table: Vec<Vec<(Vec<usize>, Scalar)>>,
}

impl PartialEq for StructureTensor {
    fn eq(&self, other: &Self) -> bool {
        self.inputs == other.inputs && self.outputs == other.outputs && self.matrix == other.matrix
    }
}

impl Eq for StructureTensor {}

impl StructureTensor {
    pub fn new(inputs: Vec<usize>, outputs: Vec<usize>, matrix: SparseMatrix) -> Self {
        assert_eq!(matrix.cols(), product(&inputs), "input dimension");
        assert_eq!(matrix.rows(), product(&outputs), "output dimension");
        let table = matrix
            .columns()
            .iter()
            .map(|col| col.iter().map(|(r, v)| (unflatten(&outputs, r), v.clone())).collect())
            .collect();
        StructureTensor {
            inputs,
            outputs,
            matrix,
            table,
        }
    }

    /// A functional on `V1⊗..⊗Vk`.
    pub fn functional(inputs: Vec<usize>, values: &SparseVec) -> Self {
        let m = SparseMatrix::row_vector(product(&inputs), values);
        StructureTensor::new(inputs, vec![], m)
    }

    /// A vector of `W1⊗..⊗Wl`, as a map from the ground field.
    pub fn element(outputs: Vec<usize>, v: SparseVec) -> Self {
        let m = SparseMatrix::column_vector(product(&outputs), v);
        StructureTensor::new(vec![], outputs, m)
    }

    pub fn linear(m: SparseMatrix) -> Self {
        let (r, c) = (m.rows(), m.cols());
        StructureTensor::new(vec![c], vec![r], m)
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    /// Image of a basis tuple as multi-indexed terms.
    pub fn image(&self, idx: &[usize]) -> &[(Vec<usize>, Scalar)] {
        &self.table[flat_index(&self.inputs, idx)]
    }

    /// Image of a single basis vector of a one-input map.
    pub fn at(&self, i: usize) -> &[(Vec<usize>, Scalar)] {
        &self.table[i]
    }

    /// Value of a functional on a basis tuple.
    pub fn value(&self, idx: &[usize]) -> Scalar {
        self.matrix.get(0, flat_index(&self.inputs, idx))
    }
}

/// A linear combination of basis tuples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Terms {
    items: Vec<(Vec<usize>, Scalar)>,
}

impl Terms {
    pub fn basis(idx: &[usize]) -> Self {
        Terms {
            items: vec![(idx.to_vec(), Scalar::one())],
        }
    }

    pub fn zero() -> Self {
        Terms { items: Vec::new() }
    }

    pub fn from_items(items: Vec<(Vec<usize>, Scalar)>) -> Self {
        Terms { items }
    }

    pub fn items(&self) -> &[(Vec<usize>, Scalar)] {
        &self.items
    }

    pub fn push(&mut self, idx: Vec<usize>, c: Scalar) {
        if !c.is_zero() {
            self.items.push((idx, c));
        }
    }

    pub fn extend(&mut self, other: Terms) {
        self.items.extend(other.items);
    }

    pub fn scale(mut self, c: &Scalar) -> Terms {
        if c.is_zero() {
            return Terms::zero();
        }
        for it in &mut self.items {
            it.1 = &it.1 * c;
        }
        self
    }

    /// Applies `t` to the slots `slots` (in that order), removing them and
    /// inserting the outputs starting at position `at` of the remaining tuple.
    pub fn apply(&self, t: &StructureTensor, slots: &[usize], at: usize) -> Terms {
        debug_assert_eq!(slots.len(), t.inputs().len());
        let mut out = Vec::new();
        let mut arg = Vec::with_capacity(slots.len());
        for (idx, c) in &self.items {
            arg.clear();
            arg.extend(slots.iter().map(|&s| idx[s]));
            let rest: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|(k, _)| !slots.contains(k))
                .map(|(_, &x)| x)
                .collect();
            for (o, v) in t.image(&arg) {
                let mut n = Vec::with_capacity(rest.len() + o.len());
                n.extend_from_slice(&rest[..at]);
                n.extend_from_slice(o);
                n.extend_from_slice(&rest[at..]);
                out.push((n, c * v));
            }
        }
        Terms { items: out }
    }

    /// Applies `t` in place to a contiguous block of slots.
    pub fn apply_at(&self, t: &StructureTensor, start: usize) -> Terms {
        let slots: Vec<usize> = (start..start + t.inputs().len()).collect();
        self.apply(t, &slots, start)
    }

    /// Reorders slots: new slot `k` is old slot `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Terms {
        Terms {
            items: self
                .items
                .iter()
                .map(|(idx, c)| (perm.iter().map(|&p| idx[p]).collect(), c.clone()))
                .collect(),
        }
    }

    /// Moves slot `from` to position `to`.
    pub fn move_slot(&self, from: usize, to: usize) -> Terms {
        Terms {
            items: self
                .items
                .iter()
                .map(|(idx, c)| {
                    let mut n = idx.clone();
                    let x = n.remove(from);
                    n.insert(to, x);
                    (n, c.clone())
                })
                .collect(),
        }
    }

    /// Inserts a fixed basis index at position `at`.
    pub fn insert(&self, at: usize, value: usize) -> Terms {
        Terms {
            items: self
                .items
                .iter()
                .map(|(idx, c)| {
                    let mut n = idx.clone();
                    n.insert(at, value);
                    (n, c.clone())
                })
                .collect(),
        }
    }

    /// Flattens over `dims`, summing duplicates.
    pub fn flatten(&self, dims: &[usize]) -> SparseVec {
        SparseVec::from_pairs(
            self.items
                .iter()
                .map(|(idx, c)| (flat_index(dims, idx), c.clone()))
                .collect(),
        )
    }
}

/// Matrix of the linear map sending each basis tuple over `src` to `f(tuple)`
/// expanded over `dst`.
pub fn matrix_from_fn<F>(src: &[usize], dst: &[usize], f: F) -> SparseMatrix
where
    F: Fn(&[usize]) -> Terms + Sync,
{
    let n = product(src);
    let rows = product(dst);
    let columns: Vec<SparseVec> = (0..n)
        .into_par_iter()
        .map(|j| f(&unflatten(src, j)).flatten(dst))
        .collect();
    SparseMatrix::from_columns(rows, columns)
}
