use thiserror::Error;

/// Errors produced by solving, enumeration and analysis.
///
/// Parse and validation problems have their own types in [`crate::game`];
/// everything that can fail at analysis time funnels through here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable `{0}` has no assigned value")]
    UnassignedVariable(String),

    #[error("assignment violates duality: {x} * {x_bar} is nonzero")]
    DualityViolation { x: String, x_bar: String },

    #[error("mismatched duality relations")]
    RelationMismatch,

    #[error("unknown edge label `{0}`")]
    UnknownLabel(String),

    #[error("unknown position `{0}`")]
    UnknownPosition(String),

    #[error("repair is outside the declared repair spec: {0}")]
    RepairOutsideSpec(String),

    #[error("repair leaves position `{0}` without outgoing edges")]
    EmptySuccessors(String),

    #[error("fixed-point iteration exceeded its step budget ({steps} steps)")]
    StepBudget { steps: usize },

    #[error("saturation bound exhausted (last bound {bound}); result is bound-sensitive")]
    BoundExhausted { bound: u64 },

    #[error("failed to certify convergence: accelerated descent repeated on a non-fixed-point")]
    NotAFixedPoint,

    #[error("polynomial exceeded the monomial limit ({0} monomials)")]
    MonomialLimit(usize),

    #[error("enumeration budget exhausted ({0} automaton nodes); use the fixed-point solver for larger games")]
    EnumerationBudget(usize),

    #[error("finite-use analysis precondition violated: {0}")]
    FiniteUsePrecondition(String),

    #[error("extracted repair failed Boolean verification: {0}")]
    RepairVerification(String),

    #[error("min-max semiring needs at least one level")]
    EmptyLevels,

    #[error("value `{value}` is outside the carrier of the {semiring} semiring")]
    ValueOutOfRange {
        semiring: &'static str,
        value: String,
    },
}
