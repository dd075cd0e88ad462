use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::constraint::{Denial, GlobalVars};
use super::subst::{Apply, Substitution};
use super::term::Term;

/// An instance `Wσ` of a denial where σ only touches global variables and
/// introduces none.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Case {
    pub source: Denial,
    pub sigma: Substitution,
    pub result: Denial,
}

impl Case {
    pub fn is_ground(&self) -> bool {
        self.result.is_ground()
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = self.result.clone();
        d.label = None;
        d.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("substitution binds non-global variables: {}", .0.iter().cloned().collect::<Vec<_>>().join(", "))]
    RangeNotGlobal(BTreeSet<String>),
    #[error("substitution image mentions global variables: {}", .0.iter().cloned().collect::<Vec<_>>().join(", "))]
    ImageHitsGlobal(BTreeSet<String>),
    #[error("cannot enumerate ground cases of a non-ground denial over an empty domain")]
    EmptyDomain,
}

/// Validates both side conditions and builds the case.
pub fn make_case(w: &Denial, sigma: &Substitution) -> Result<Case, CaseError> {
    let globals = w.global_vars();
    let outside: BTreeSet<String> = sigma.range().difference(&globals).cloned().collect();
    if !outside.is_empty() {
        return Err(CaseError::RangeNotGlobal(outside));
    }
    let clash: BTreeSet<String> = sigma.image_vars().intersection(&globals).cloned().collect();
    if !clash.is_empty() {
        return Err(CaseError::ImageHitsGlobal(clash));
    }
    Ok(Case {
        source: w.clone(),
        sigma: sigma.clone(),
        result: w.apply(sigma),
    })
}

/// Every grounding of the global variables of `w` over `domain`.
///
/// Variables are taken in name order with the first one varying slowest, and
/// constants in name order, so the output is lexicographic.
pub fn enumerate_ground_cases(
    w: &Denial,
    domain: &BTreeSet<String>,
) -> Result<Vec<Case>, CaseError> {
    let vars: Vec<String> = w.global_vars().into_iter().collect();
    if vars.is_empty() {
        return Ok(vec![make_case(w, &Substitution::new())?]);
    }
    if domain.is_empty() {
        return Err(CaseError::EmptyDomain);
    }
    let consts: Vec<&String> = domain.iter().collect();
    let total = consts.len().pow(vars.len() as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; vars.len()];
    loop {
        let sigma = Substitution::from_pairs(
            vars.iter()
                .zip(&idx)
                .map(|(v, &i)| (v.clone(), Term::constant(consts[i].as_str()))),
        );
        out.push(make_case(w, &sigma)?);
        // odometer, last variable fastest
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < consts.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}
