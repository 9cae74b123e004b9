//! Sparse vectors and column-major sparse matrices over the rationals.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sorted `(index, value)` pairs with no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Scalar::one())],
        }
    }

    /// Sums duplicate indices and drops zeros.
    pub fn from_pairs(mut pairs: Vec<(usize, Scalar)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += &v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|e| !e.1.is_zero());
        SparseVec { entries }
    }

    /// Caller guarantees sorted distinct indices and nonzero values.
    pub fn from_sorted(entries: Vec<(usize, Scalar)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| !e.1.is_zero()));
        SparseVec { entries }
    }

    pub fn from_dense(values: &[Scalar]) -> Self {
        SparseVec {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Scalar)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn first(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    pub fn last(&self) -> Option<&(usize, Scalar)> {
        self.entries.last()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn scale(&self, c: &Scalar) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `a*self + b*other`, merged in one pass.
    pub fn lin_comb(&self, a: &Scalar, other: &SparseVec, b: &Scalar) -> SparseVec {
        let (x, y) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            let take = if i == x.len() {
                1
            } else if j == y.len() {
                0
            } else if x[i].0 < y[j].0 {
                0
            } else if x[i].0 > y[j].0 {
                1
            } else {
                2
            };
            match take {
                0 => {
                    out.push((x[i].0, &x[i].1 * a));
                    i += 1;
                }
                1 => {
                    out.push((y[j].0, &y[j].1 * b));
                    j += 1;
                }
                _ => {
                    let v = &(&x[i].1 * a) + &(&y[j].1 * b);
                    if !v.is_zero() {
                        out.push((x[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.retain(|e| !e.1.is_zero());
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.lin_comb(&Scalar::one(), other, &Scalar::one())
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.lin_comb(&Scalar::one(), other, &Scalar::from_int(-1))
    }

    pub fn dot(&self, other: &SparseVec) -> Scalar {
        let (x, y) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = Scalar::zero();
        while i < x.len() && j < y.len() {
            match x[i].0.cmp(&y[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &(&x[i].1 * &y[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Reindexes entries through `f`; `None` drops the entry.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> SparseVec {
        SparseVec::from_pairs(
            self.entries
                .iter()
                .filter_map(|(i, v)| f(*i).map(|k| (k, v.clone())))
                .collect(),
        )
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec>,
}

/// Dense accumulator reused across the columns of one product.
struct Accumulator {
    values: Vec<Scalar>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            values: vec![Scalar::zero(); n],
            touched: Vec::new(),
            mark: vec![false; n],
        }
    }

    fn add(&mut self, i: usize, v: &Scalar) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.touched.push(i);
            self.values[i] = v.clone();
        } else {
            self.values[i] += v;
        }
    }

    fn drain(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            self.mark[i] = false;
            let v = std::mem::take(&mut self.values[i]);
            if !v.is_zero() {
                out.push((i, v));
            }
        }
        self.touched.clear();
        SparseVec::from_sorted(out)
    }
}

const PAR_THRESHOLD: usize = 256;

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            columns: vec![SparseVec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            columns: (0..n).map(SparseVec::unit).collect(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert!(columns.iter().all(|c| c.max_index().is_none_or(|m| m < rows)));
        SparseMatrix {
            rows,
            cols: columns.len(),
            columns,
        }
    }

    pub fn from_rows(cols: usize, rows: &[SparseVec]) -> Self {
        SparseMatrix::from_columns(cols, rows.to_vec()).transpose()
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: Vec<(usize, usize, Scalar)>) -> Result<Self> {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::ShapeMismatch(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            per_col[c].push((r, v));
        }
        Ok(SparseMatrix {
            rows,
            cols,
            columns: per_col.into_iter().map(SparseVec::from_pairs).collect(),
        })
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t.push((i, j, Scalar::from_int(*v)));
            }
        }
        SparseMatrix::from_triplets(r, c, t).expect("dense rows have equal length")
    }

    /// A single row (functional) as a 1 x `cols` matrix.
    pub fn row_vector(cols: usize, v: &SparseVec) -> Self {
        let mut columns = vec![SparseVec::new(); cols];
        for (i, x) in v.iter() {
            columns[i] = SparseVec::from_sorted(vec![(0, x.clone())]);
        }
        SparseMatrix { rows: 1, cols, columns }
    }

    /// A single column as a `rows` x 1 matrix.
    pub fn column_vector(rows: usize, v: SparseVec) -> Self {
        SparseMatrix::from_columns(rows, vec![v])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<SparseVec> {
        self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.columns[c].get(r)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    /// Triplets sorted by (row, column).
    pub fn triplets(&self) -> Vec<(usize, usize, Scalar)> {
        let mut out: Vec<(usize, usize, Scalar)> = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (r, c, v.clone())))
            .collect();
        out.sort_by_key(|t| (t.0, t.1));
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut per_row: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col.iter() {
                per_row[r].push((c, v.clone()));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: per_row.into_iter().map(SparseVec::from_sorted).collect(),
        }
    }

    /// Rows as sparse vectors.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        self.transpose().columns
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.rows);
        self.accumulate(v, &mut acc);
        acc.drain()
    }

    fn accumulate(&self, v: &SparseVec, acc: &mut Accumulator) {
        for (k, x) in v.iter() {
            for (r, a) in self.columns[k].iter() {
                acc.add(r, &(a * x));
            }
        }
    }

    /// The product `self * other`.
    pub fn compose(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rows = self.rows;
        let columns: Vec<SparseVec> = if other.cols >= PAR_THRESHOLD {
            other
                .columns
                .par_iter()
                .map_init(
                    || Accumulator::new(rows),
                    |acc, col| {
                        self.accumulate(col, acc);
                        acc.drain()
                    },
                )
                .collect()
        } else {
            let mut acc = Accumulator::new(rows);
            other
                .columns
                .iter()
                .map(|col| {
                    self.accumulate(col, &mut acc);
                    acc.drain()
                })
                .collect()
        };
        Ok(SparseMatrix {
            rows,
            cols: other.cols,
            columns,
        })
    }

    /// Product of a chain `ms[0] * ms[1] * ... `; panics on shape mismatch.
    pub fn chain(ms: &[&SparseMatrix]) -> SparseMatrix {
        let mut it = ms.iter().rev();
        let mut acc = (*it.next().expect("nonempty chain")).clone();
        for m in it {
            acc = m.compose(&acc).expect("chain shapes");
        }
        acc
    }

    pub fn lin_comb(&self, a: &Scalar, other: &SparseMatrix, b: &Scalar) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .zip(&other.columns)
                .map(|(x, y)| x.lin_comb(a, y, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.lin_comb(&Scalar::one(), other, &Scalar::one())
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.lin_comb(&Scalar::one(), other, &Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|col| col.scale(c)).collect(),
        }
    }

    /// Kronecker product; row and column indices are `(i1*rb + i2, j1*cb + j2)`.
    pub fn kron(&self, other: &SparseMatrix) -> SparseMatrix {
        let (rb, cb) = (other.rows, other.cols);
        let mut columns = Vec::with_capacity(self.cols * cb);
        for a in &self.columns {
            for b in &other.columns {
                let mut out = Vec::with_capacity(a.nnz() * b.nnz());
                for (i1, x) in a.iter() {
                    for (i2, y) in b.iter() {
                        out.push((i1 * rb + i2, x * y));
                    }
                }
                columns.push(SparseVec::from_sorted(out));
            }
        }
        SparseMatrix {
            rows: self.rows * rb,
            cols: self.cols * cb,
            columns,
        }
    }

    /// Selects and reorders columns.
    pub fn select_columns(&self, idx: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: idx.len(),
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }

    /// Powers of a square matrix.
    pub fn pow(&self, k: usize) -> SparseMatrix {
        let mut acc = SparseMatrix::identity(self.rows);
        for _ in 0..k {
            acc = self.compose(&acc).expect("square");
        }
        acc
    }

    /// Indices of columns where `self` and `other` differ, with the difference.
    pub fn column_differences(&self, other: &SparseMatrix) -> Vec<(usize, SparseVec)> {
        self.columns
            .iter()
            .zip(&other.columns)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(j, (a, b))| (j, a.sub(b)))
            .collect()
    }

    /// Text form: `rows cols` header then `r c value` lines sorted by (r, c).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{r} {c} {v}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SparseMatrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |m: &str| Error::InvalidInput(format!("matrix text: {m}"));
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let mut h = header.split_whitespace();
        let rows: usize = h.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad(header))?;
        let cols: usize = h.next().and_then(|x| x.parse().ok()).ok_or_else(|| bad(header))?;
        let mut t = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(line));
            }
            let r = parts[0].parse().map_err(|_| bad(line))?;
            let c = parts[1].parse().map_err(|_| bad(line))?;
            let v: Scalar = parts[2].parse().map_err(|_| bad(line))?;
            if v.is_zero() {
                return Err(bad("explicit zero entry"));
            }
            t.push((r, c, v));
        }
        SparseMatrix::from_triplets(rows, cols, t)
    }
}

/// Free-function form of [`SparseMatrix::compose`].
pub fn compose(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    a.compose(b)
}

/// Free-function form of [`SparseMatrix::kron`].
pub fn tensor_kron(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    a.kron(b)
}

/// Matrix permuting tensor factors: output factor `k` is input factor `perm[k]`.
pub fn permutation_matrix(dims: &[usize], perm: &[usize]) -> SparseMatrix {
    use crate::space::{flat_index, multi_indices};
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n = crate::space::product(dims);
    let mut columns = vec![SparseVec::new(); n];
    for (j, idx) in multi_indices(dims).enumerate() {
        let out: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
        columns[j] = SparseVec::unit(flat_index(&out_dims, &out));
    }
    SparseMatrix::from_columns(n, columns)
}
