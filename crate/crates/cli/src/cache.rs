//! Content-addressed storage of built complexes.
//!
//! A complex is stored as its text dump under the SHA-256 of the tool
//! version, the canonical spec text, a role string and the truncation.

use std::fs;
use std::path::PathBuf;

use hopf_cyclic::cocyclic::CocyclicComplex;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Cache { dir: Some(dir) }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn key(canonical_spec: &str, role: &str, n: usize) -> String {
        sha256_hex(&[VERSION, canonical_spec, role, &n.to_string()])
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.cocyclic")))
    }

    pub fn load(&self, key: &str) -> Option<CocyclicComplex> {
        let text = fs::read_to_string(self.path(key)?).ok()?;
        CocyclicComplex::from_text(&text).ok()
    }

    /// Best effort: an unwritable cache only costs a rebuild next time.
    pub fn store(&self, key: &str, c: &CocyclicComplex) {
        let (Some(dir), Some(path)) = (self.dir.as_ref(), self.path(key)) else { return };
        if fs::create_dir_all(dir).is_ok() {
            let tmp = path.with_extension("tmp");
            if fs::write(&tmp, c.to_text()).is_ok() {
                let _ = fs::rename(tmp, path);
            }
        }
    }

    pub fn get_or_build<E>(&self, key: &str, build: impl FnOnce() -> Result<CocyclicComplex, E>) -> Result<CocyclicComplex, E> {
        if let Some(c) = self.load(key) {
            return Ok(c);
        }
        let c = build()?;
        self.store(key, &c);
        Ok(c)
    }
}
