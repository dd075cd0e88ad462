use serde::Serialize;

use super::generate::{generate_with, Reading, Test};
use super::method::{Method, Protocol};
use crate::error::{Error, Result};
use crate::logic::IntegrityTheory;
use crate::store::{
    apply_update, check_constraints_in, Database, FactSource, Overlay, Transition, Update,
    ViolationReport,
};

/// Evaluates a test for the update it was generated for.
pub fn evaluate_test(t: &Test, d_old: &Database, u: &Update) -> Result<(bool, ViolationReport)> {
    if &t.update != u {
        return Err(Error::UpdateMismatch);
    }
    let tr = Transition::compute(d_old, u)?;
    Ok(evaluate_in(t, &tr))
}

/// Evaluation against precomputed old and new models.
pub fn evaluate_in(t: &Test, tr: &Transition) -> (bool, ViolationReport) {
    let view;
    let state: &dyn FactSource = match t.reading {
        Reading::Old => &tr.old,
        Reading::New | Reading::Shadow => &tr.new,
        Reading::OldThroughUpdate => {
            view = Overlay {
                base: &tr.old,
                added: &tr.delta.added,
                removed: &tr.delta.removed,
            };
            &view
        }
    };
    check_constraints_in(state, &t.constraints, |i| {
        format!("ic{}#{}", t.sources.get(i).map_or(0, |s| s.ic) + 1, i + 1)
    })
}

/// Outcome of running an update through a checking protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckDecision {
    pub accepted: bool,
    pub test_used: Test,
    pub evaluation_witnesses: ViolationReport,
    pub protocol: Protocol,
}

/// Runs `u` against `d` under `method`. Returns the new state on acceptance
/// and the old state on rejection: a post protocol executes and rolls back,
/// a pre protocol never executes.
pub fn check_update(
    d: &Database,
    theory: &IntegrityTheory,
    u: &Update,
    method: Method,
) -> Result<(CheckDecision, Database)> {
    let tr = Transition::compute(d, u)?;
    let test = generate_with(method, theory, u, &tr)?;
    let protocol = method.protocol();
    let (accepted, evaluation_witnesses, next) = match protocol {
        Protocol::Pre => {
            let (ok, w) = evaluate_in(&test, &tr);
            let next = if ok { apply_update(d, u)? } else { d.clone() };
            (ok, w, next)
        }
        Protocol::Post => {
            let executed = apply_update(d, u)?;
            let (ok, w) = evaluate_in(&test, &tr);
            // rollback discards the executed state
            (ok, w, if ok { executed } else { d.clone() })
        }
    };
    Ok((
        CheckDecision {
            accepted,
            test_used: test,
            evaluation_witnesses,
            protocol,
        },
        next,
    ))
}
