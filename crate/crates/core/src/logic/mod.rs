//! Function-free first-order syntax, substitutions, unification, denial
//! constraints and their cases.

mod case;
mod constraint;
mod subst;
mod subsume;
mod term;
mod unify;

pub use case::{enumerate_ground_cases, make_case, Case, CaseError};
pub use constraint::{
    global_variables, Constraint, Denial, ExistentialConstraint, GlobalVars, IntegrityTheory,
};
pub use subst::{apply, Apply, Substitution};
pub use subsume::subsumes;
pub use term::{
    body_vars, format_body, is_range_restricted, unrestricted_vars, Atom, CmpOp, Literal, Term,
    FRESH_PREFIX,
};
pub use unify::{match_atom, unify, unify_with, Matching};
