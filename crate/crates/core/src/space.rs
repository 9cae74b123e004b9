use std::collections::HashSet;

use crate::error::{Error, Result};

/// A finite-dimensional space with a named basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasedSpace {
    labels: Vec<String>,
}

impl BasedSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate basis label `{l}`")));
            }
        }
        Ok(BasedSpace { labels })
    }

    /// Basis `prefix0, prefix1, ...`.
    pub fn numbered(prefix: &str, dim: usize) -> Self {
        BasedSpace {
            labels: (0..dim).map(|i| format!("{prefix}{i}")).collect(),
        }
    }

    /// The one-dimensional ground field with basis `1`.
    pub fn ground() -> Self {
        BasedSpace {
            labels: vec!["1".to_string()],
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// Tensor product with lexicographic basis, left factor major.
    pub fn tensor(factors: &[&BasedSpace]) -> BasedSpace {
        let mut labels = vec![String::new()];
        for (k, f) in factors.iter().enumerate() {
            let mut next = Vec::with_capacity(labels.len() * f.dim());
            for l in &labels {
                for m in &f.labels {
                    if k == 0 {
                        next.push(m.clone());
                    } else {
                        next.push(format!("{l}|{m}"));
                    }
                }
            }
            labels = next;
        }
        if factors.is_empty() {
            labels = vec!["1".to_string()];
        }
        BasedSpace { labels }
    }
}

/// Row-major flat index of a multi-index over `dims`.
pub fn flat_index(dims: &[usize], idx: &[usize]) -> usize {
    debug_assert_eq!(dims.len(), idx.len());
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| {
        debug_assert!(i < d);
        acc * d + i
    })
}

pub fn unflatten(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
    out
}

pub fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// All multi-indices over `dims` in lexicographic order.
pub fn multi_indices(dims: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..product(dims)).map(move |f| unflatten(dims, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_labels_are_left_major() {
        let a = BasedSpace::new(["e", "g"]).unwrap();
        let b = BasedSpace::new(["x", "y", "z"]).unwrap();
        let t = BasedSpace::tensor(&[&a, &b]);
        assert_eq!(t.label(1), "e|y");
        assert_eq!(t.label(3), "g|x");
        assert_eq!(flat_index(&[2, 3], &[1, 0]), 3);
        assert_eq!(unflatten(&[2, 3], 5), vec![1, 2]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(BasedSpace::new(["a", "a"]).is_err());
    }
}
