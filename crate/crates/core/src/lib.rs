//! Exact Hopf-cyclic cohomology over the rationals.

pub mod catalog;
pub mod cocyclic;
pub mod cohomology;
pub mod cupprod;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod space;
pub mod symmetry;
pub mod sparse;
pub mod tensor;

pub use error::{Error, ParseScalarError, Result};
pub use scalar::Scalar;
pub use space::BasedSpace;
pub use sparse::{SparseMatrix, SparseVec};
pub use tensor::{StructureTensor, Terms};
