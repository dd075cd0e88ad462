use thiserror::Error;

use crate::logic::{Atom, CaseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("recursion through negation among predicates: {}", .0.join(", "))]
    NegativeCycle(Vec<String>),
    #[error("predicate {pred} used with arity {found}, expected {expected}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("fact {0} is not ground")]
    NonGroundFact(Atom),
    #[error("{0} names a derived predicate; only base facts can be stored or updated")]
    DerivedPredicate(Atom),
    #[error("{0} is both inserted and deleted")]
    ConflictingUpdate(Atom),
    #[error("empty body")]
    EmptyBody,
    #[error("variables not bound by a positive literal: {0}")]
    NotRangeRestricted(String),
    #[error("constraint #{} is not a denial", .0 + 1)]
    NotDenial(usize),
    #[error("test was generated for a different update")]
    UpdateMismatch,
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("method {method} is not applicable: {reason}")]
    MethodNotApplicable { method: String, reason: String },
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Case(#[from] CaseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
