//! Decision procedures for oscillation, suboscillation and nonoscillation,
//! and the empirical classifier used as their oracle.

mod classify;
mod nonoscillation;
mod options;
mod reduced;
mod verdict;

use thiserror::Error;

use crate::expr::CoeffExpr;
use crate::integrate::{sign_test, NumericError};
use crate::system::SystemError;

pub use classify::{
    default_bundle, empirical_classify, ClassificationReport, EvidenceLabel, SolutionEvidence,
};
pub use nonoscillation::{nonoscillation_check, BOUND_SLACK};
pub use options::CriteriaOptions;
pub use reduced::{oscillation_check, suboscillation_check};
pub use verdict::{CheckKind, Flag, Status, Verdict, Witness};

#[derive(Debug, Error)]
pub enum CriteriaError {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("{0}")]
    Precondition(String),
}

/// Grid sign test of `f >= 0`, as a witness.
pub(crate) fn sign_witness(label: &str, grid: &[f64], f: &CoeffExpr, tol: f64) -> (bool, Witness) {
    let st = sign_test(grid, tol, |t| f.eval(t));
    let w = match st.violation {
        Some((t, value)) => Witness::SignViolation {
            label: label.to_string(),
            t,
            value,
        },
        None => Witness::SignCheck {
            label: label.to_string(),
            a: grid[0],
            b: grid[grid.len() - 1],
            grid_points: grid.len(),
            min_value: st.min_value,
        },
    };
    (st.passed, w)
}
