//! Simplified integrity tests for an update, and the protocols that use them.
//!
//! The delta-driven method instantiates each denial with the atoms an update
//! adds to (or removes from) the standard model, one source constraint at a
//! time. Matched literals are dropped since the delta decides them. The
//! resulting denials are evaluated either in the new state (post-test) or in
//! the old state with every atom read through the update (pre-test).

mod check;
mod generate;
mod method;

pub use check::{check_update, evaluate_in, evaluate_test, CheckDecision};
pub(crate) use generate::generate_with;
pub use generate::{
    adversarial, generate_test, plain_post, plain_pre, simplify_post, simplify_pre, Reading,
    Source, Test, TestKind, Trigger,
};
pub use method::{Method, Protocol};
