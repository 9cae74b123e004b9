//! Exhaustive validation reports.

use std::fmt;

use crate::space::BasedSpace;
use crate::sparse::{SparseMatrix, SparseVec};

/// One failing instance of a law: the basis tuple where the two sides of the
/// identity differ and the difference `lhs - rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: String,
    pub witness: String,
    pub discrepancy: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub subject: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

/// Renders a vector as `c*label + ...` over `space`.
pub fn render_vector(v: &SparseVec, space: &BasedSpace) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    v.iter()
        .map(|(i, c)| format!("{c}*{}", space.label(i)))
        .collect::<Vec<_>>()
        .join(" + ")
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        ValidationReport {
            subject: subject.into(),
            ..Default::default()
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Compares two maps column by column; every differing input basis
    /// vector becomes a violation.
    pub fn compare(
        &mut self,
        law: &str,
        lhs: &SparseMatrix,
        rhs: &SparseMatrix,
        inputs: &BasedSpace,
        outputs: &BasedSpace,
    ) {
        self.checked += lhs.cols();
        if lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols() {
            self.violations.push(Violation {
                law: law.to_string(),
                witness: "shape".to_string(),
                discrepancy: format!(
                    "{}x{} vs {}x{}",
                    lhs.rows(),
                    lhs.cols(),
                    rhs.rows(),
                    rhs.cols()
                ),
            });
            return;
        }
        for (j, d) in lhs.column_differences(rhs) {
            self.violations.push(Violation {
                law: law.to_string(),
                witness: inputs.label(j).to_string(),
                discrepancy: render_vector(&d, outputs),
            });
        }
    }

    /// Records a failure that is not tied to a single basis tuple.
    pub fn fail(&mut self, law: &str, witness: impl Into<String>, discrepancy: impl Into<String>) {
        self.checked += 1;
        self.violations.push(Violation {
            law: law.to_string(),
            witness: witness.into(),
            discrepancy: discrepancy.into(),
        });
    }

    pub fn pass(&mut self) {
        self.checked += 1;
    }

    pub fn absorb(&mut self, other: ValidationReport) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }

    /// Distinct law names among the violations, in first-seen order.
    pub fn failed_laws(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in &self.violations {
            if !out.contains(&v.law.as_str()) {
                out.push(&v.law);
            }
        }
        out
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} instances, {} violations)",
            self.subject,
            if self.is_valid() { "valid" } else { "INVALID" },
            self.checked,
            self.violations.len()
        )?;
        for v in &self.violations {
            writeln!(f, "  {} at {}: {}", v.law, v.witness, v.discrepancy)?;
        }
        Ok(())
    }
}
