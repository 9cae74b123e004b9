//! Spec files, reports and the command driver for `hopf-cyclic`.

pub mod cache;
pub mod fixtures;
pub mod model;
pub mod run;
pub mod spec;

pub use cache::Cache;
pub use model::{ContextSpec, Model, TraceSpec};
pub use run::{permute_bases, run, CliError, Command, CupChoice, Flags, RunReport, Section};
pub use spec::{parse_spec, print_spec, SpecError, SpecFile};

pub use hopf_cyclic;
