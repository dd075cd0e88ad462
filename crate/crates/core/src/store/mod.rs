//! Database state, stratified evaluation, updates and deltas.

mod database;
mod eval;
mod join;
mod model;
mod stratify;

pub use database::{
    active_domain, apply_update, check_arities, check_schema, Database, Rule, Update,
};
pub(crate) use eval::check_constraints_in;
pub use eval::{
    body_answers, body_holds, check_theory_in, delta, holds, holds_in, holds_theory,
    standard_model, Delta, Transition, Violation, ViolationReport,
};
pub use join::Plan;
pub use model::{FactSet, FactSource, Overlay};
pub use stratify::{stratify, Strata};
