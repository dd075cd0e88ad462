use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::Result;
use crate::logic::{make_case, Case, Denial, IntegrityTheory};
use crate::simplify::{check_update, Method};
use crate::store::{active_domain, body_answers, standard_model, Database, FactSource, Update};

/// Violated ground cases over the active domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measure {
    pub violated_cases: BTreeSet<Case>,
    pub total_cases: u64,
    /// `violated / total`, 0 when there are no cases.
    pub ratio: f64,
}

impl Measure {
    pub fn violated_count(&self) -> usize {
        self.violated_cases.len()
    }
}

/// Number of groundings of `w` over a domain of `size` constants.
pub fn ground_case_count(w: &Denial, size: usize) -> u64 {
    (size as u64).saturating_pow(w.vars().len() as u32)
}

/// Ground cases of `w` that are violated in `state`, one per answer.
pub fn violated_in(w: &Denial, state: &dyn FactSource) -> BTreeSet<Case> {
    let globals: BTreeSet<String> = w.vars().into_iter().collect();
    body_answers(&w.body, state)
        .into_iter()
        .map(|sigma| {
            make_case(w, &sigma.restrict(&globals)).expect("answers bind globals to constants")
        })
        .collect()
}

/// Violated ground cases of every constraint in `d`, with the ratio over all
/// ground cases of the active domain of `d` and `theory`.
pub fn violated_cases(d: &Database, theory: &IntegrityTheory) -> Result<Measure> {
    let denials = theory.denials()?;
    let model = standard_model(d)?;
    let dom = active_domain(d, theory, None);
    let mut violated = BTreeSet::new();
    let mut total: u64 = 0;
    for w in denials {
        total = total.saturating_add(ground_case_count(w, dom.len()));
        violated.extend(violated_in(w, &model));
    }
    let ratio = if total == 0 {
        0.0
    } else {
        violated.len() as f64 / total as f64
    };
    Ok(Measure {
        violated_cases: violated,
        total_cases: total,
        ratio,
    })
}

/// Violated-case count per source constraint, keyed by its position.
pub fn violated_by_constraint(m: &Measure, theory: &IntegrityTheory) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for case in &m.violated_cases {
        if let Some(i) = theory
            .iter()
            .position(|c| c.as_denial() == Some(&case.source))
        {
            *out.entry(i).or_insert(0) += 1;
        }
    }
    out
}

/// Measures after each step of a sequence of checked updates. The first
/// entry is the initial state; a rejected step repeats the previous measure.
pub fn measure_trace(
    d0: &Database,
    theory: &IntegrityTheory,
    updates: &[Update],
    method: Method,
) -> Result<Vec<Measure>> {
    let mut out = vec![violated_cases(d0, theory)?];
    let mut state = d0.clone();
    for u in updates {
        let (decision, next) = check_update(&state, theory, u, method)?;
        if decision.accepted {
            state = next;
            out.push(violated_cases(&state, theory)?);
        } else {
            out.push(out.last().unwrap().clone());
        }
    }
    Ok(out)
}
