//! Oscillation, suboscillation and nonoscillation analysis for linear systems
//! `φ' = A(t)φ` of ordinary differential equations.
//!
//! Coefficients are closed-form expressions in `t` ([`expr`]). A system is
//! reduced to its Riccati form and to the scalar quantities `A`, `B_k`, `C`
//! ([`reduction`]), from which the decision procedures in [`criteria`] and
//! [`riccati2d`] produce three-valued [`Verdict`]s. The numerical engines in
//! [`integrate`] double as an empirical oracle for every criterion.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod criteria;
pub mod expr;
pub mod integrate;
pub mod reduction;
pub mod riccati2d;
pub mod system;

pub use criteria::{
    CheckKind, ClassificationReport, CriteriaError, CriteriaOptions, EvidenceLabel, Flag, Status,
    Verdict, Witness,
};
pub use expr::{CoeffExpr, DomainError, DomainKind, ParseError};
pub use integrate::{NumericError, OdeOptions, QuadOptions, Trajectory};
pub use reduction::{ReducedData, ReductionError};
pub use riccati2d::{PlanarError, PlanarOptions, RiccatiTriple, System2D};
pub use system::{LinearSystem, RatioReport, SystemDoc, SystemError};
