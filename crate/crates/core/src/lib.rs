//! Inconsistency-tolerant integrity checking for function-free datalog.
//!
//! Updates are checked with tests simplified from the integrity theory.
//! The checks stay usable on databases that already violate some constraint
//! instances: an accepted update never violates a case that held before.
//! The `lab` module audits that property on generated instances.

pub mod error;
pub mod logic;
pub mod store;

pub use error::{Error, Result};
pub mod cli;
pub mod lab;
pub mod simplify;
pub mod syntax;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/syntax.md")]
    mod syntax {}
    #[doc = include_str!("../../../book/src/cases.md")]
    mod cases {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/simplification.md")]
    mod simplification {}
    #[doc = include_str!("../../../book/src/tolerance.md")]
    mod tolerance {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
