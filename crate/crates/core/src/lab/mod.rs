//! Tolerance oracle, method auditor, inconsistency measure and the random
//! instance generator that feeds them.

mod audit;
mod gen;
mod measure;

pub use audit::{
    audit_method, audit_tolerance_in, audit_tolerance_instance, fresh_constant, CorrectnessFailure,
    Counterexample, Instance, MethodReport, ToleranceFailure, ToleranceVerdict,
};
pub use gen::{
    generate_instance, generate_trace, trial_rng, GenConfig, Schema, GEN_SCHEME_VERSION,
};
pub use measure::{
    ground_case_count, measure_trace, violated_by_constraint, violated_cases, violated_in, Measure,
};
