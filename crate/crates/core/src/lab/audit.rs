use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::gen::{generate_instance, GenConfig};
use super::measure::{ground_case_count, violated_in};
use crate::error::{Error, Result};
use crate::logic::{Case, IntegrityTheory};
use crate::simplify::{evaluate_in, generate_with, Method};
use crate::store::{active_domain, check_theory_in, Database, Transition, Update};

/// A ground case satisfied before the update, violated after it, although
/// the method's test passed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub ic: usize,
    pub case: Case,
    pub holds_before: bool,
    pub test_passed: bool,
    pub holds_after: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToleranceVerdict {
    pub tolerant_on_instance: bool,
    pub test_passed: bool,
    pub counterexamples: Vec<Counterexample>,
    /// Ground cases examined; zero when the test failed and the check is vacuous.
    pub cases_checked: u64,
}

/// A constant outside `dom`, standing in for every unseen constant.
pub fn fresh_constant(dom: &BTreeSet<String>) -> String {
    (0..)
        .map(|i| {
            if i == 0 {
                "fresh".to_owned()
            } else {
                format!("fresh{i}")
            }
        })
        .find(|c| !dom.contains(c))
        .unwrap()
}

/// Checks one instance: if the method's test passes, every ground case that
/// held before the update must still hold after it.
///
/// Cases range over the active domain of the old state, theory and update
/// plus one fresh constant. A case is violated exactly when it is an answer
/// of its body, so the comparison runs over answer sets.
pub fn audit_tolerance_instance(
    d: &Database,
    theory: &IntegrityTheory,
    u: &Update,
    method: Method,
) -> Result<ToleranceVerdict> {
    let tr = Transition::compute(d, u)?;
    audit_tolerance_in(d, theory, u, method, &tr)
}

/// [`audit_tolerance_instance`] with the old and new models of `d` and `u`
/// already computed, for auditing many theories against one transition.
pub fn audit_tolerance_in(
    d: &Database,
    theory: &IntegrityTheory,
    u: &Update,
    method: Method,
    tr: &Transition,
) -> Result<ToleranceVerdict> {
    let denials = theory.denials()?;
    let test = generate_with(method, theory, u, tr)?;
    let (passed, _) = evaluate_in(&test, tr);
    if !passed {
        return Ok(ToleranceVerdict {
            tolerant_on_instance: true,
            test_passed: false,
            counterexamples: Vec::new(),
            cases_checked: 0,
        });
    }
    let mut dom = active_domain(d, theory, Some(u));
    dom.insert(fresh_constant(&dom));

    let mut counterexamples = Vec::new();
    let mut cases_checked: u64 = 0;
    for (ic, w) in denials.iter().enumerate() {
        cases_checked = cases_checked.saturating_add(ground_case_count(w, dom.len()));
        let after = violated_in(w, &tr.new);
        if after.is_empty() {
            continue;
        }
        let before = violated_in(w, &tr.old);
        for case in after {
            if !before.contains(&case) {
                counterexamples.push(Counterexample {
                    ic,
                    case,
                    holds_before: true,
                    test_passed: true,
                    holds_after: false,
                });
            }
        }
    }
    Ok(ToleranceVerdict {
        tolerant_on_instance: counterexamples.is_empty(),
        test_passed: true,
        counterexamples,
        cases_checked,
    })
}

/// A generated instance with what is needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub seed: u64,
    pub trial: u64,
    pub database: Database,
    pub theory: IntegrityTheory,
    pub update: Update,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "% seed {} trial {}", self.seed, self.trial)?;
        writeln!(f, "% database")?;
        write!(f, "{}", self.database)?;
        writeln!(f, "% theory")?;
        write!(f, "{}", self.theory)?;
        writeln!(f, "% update")?;
        write!(f, "{}", self.update)
    }
}

/// The method's test disagreed with re-checking the full theory on a
/// consistent old state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrectnessFailure {
    pub instance: Instance,
    pub test_verdict: bool,
    pub full_verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToleranceFailure {
    pub instance: Instance,
    pub verdict: ToleranceVerdict,
}

/// Aggregate falsification results. No failure means "no counterexample
/// found in `trials_run` trials", not a proof of tolerance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodReport {
    pub method: Method,
    pub trials_run: u64,
    /// Trials where the generated state satisfied the theory.
    pub consistent_trials: u64,
    /// Trials the method could not handle (adversarial outside its schema).
    pub not_applicable: u64,
    pub correctness_failures: Vec<CorrectnessFailure>,
    pub tolerance_failures: Vec<ToleranceFailure>,
}

impl MethodReport {
    pub fn passed(&self) -> bool {
        self.correctness_failures.is_empty() && self.tolerance_failures.is_empty()
    }
}

enum TrialOutcome {
    NotApplicable,
    Ran {
        consistent: bool,
        correctness: Option<CorrectnessFailure>,
        tolerance: Option<ToleranceFailure>,
    },
}

fn run_trial(method: Method, cfg: &GenConfig, trial: u64) -> Result<TrialOutcome> {
    let (database, theory, update) = generate_instance(cfg, trial)?;
    let tr = Transition::compute(&database, &update)?;
    let test = match generate_with(method, &theory, &update, &tr) {
        Ok(t) => t,
        Err(Error::MethodNotApplicable { .. }) => return Ok(TrialOutcome::NotApplicable),
        Err(e) => return Err(e),
    };
    let instance = || Instance {
        seed: cfg.seed,
        trial,
        database: database.clone(),
        theory: theory.clone(),
        update: update.clone(),
    };
    let (consistent, _) = check_theory_in(&tr.old, &theory);
    let correctness = if consistent {
        let (test_verdict, _) = evaluate_in(&test, &tr);
        let (full_verdict, _) = check_theory_in(&tr.new, &theory);
        (test_verdict != full_verdict).then(|| CorrectnessFailure {
            instance: instance(),
            test_verdict,
            full_verdict,
        })
    } else {
        None
    };
    let verdict = audit_tolerance_in(&database, &theory, &update, method, &tr)?;
    let tolerance = (!verdict.tolerant_on_instance).then(|| ToleranceFailure {
        instance: instance(),
        verdict,
    });
    Ok(TrialOutcome::Ran {
        consistent,
        correctness,
        tolerance,
    })
}

/// Runs `cfg.trials` generated instances through the method, in parallel.
/// The report is deterministic in the configuration.
pub fn audit_method(method: Method, cfg: &GenConfig) -> Result<MethodReport> {
    cfg.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(method, cfg, trial))
        .collect::<Result<_>>()?;
    let mut report = MethodReport {
        method,
        trials_run: cfg.trials,
        consistent_trials: 0,
        not_applicable: 0,
        correctness_failures: Vec::new(),
        tolerance_failures: Vec::new(),
    };
    // outcomes are in trial order, so failures are too
    for o in outcomes {
        match o {
            TrialOutcome::NotApplicable => report.not_applicable += 1,
            TrialOutcome::Ran {
                consistent,
                correctness,
                tolerance,
            } => {
                report.consistent_trials += u64::from(consistent);
                report.correctness_failures.extend(correctness);
                report.tolerance_failures.extend(tolerance);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Atom, Denial, Literal, Term};

    fn example3() -> (Database, IntegrityTheory, Update) {
        (
            Database::from_facts([Atom::ground("p", &["a"])]).unwrap(),
            IntegrityTheory::from_denials([Denial::new(vec![Literal::Pos(Atom::new(
                "p",
                vec![Term::var("X")],
            ))])]),
            Update::insert([Atom::ground("p", &["b"])]).unwrap(),
        )
    }

    #[test]
    fn adversarial_pre_is_caught() {
        let (d, g, u) = example3();
        let v =
            audit_tolerance_instance(&d, &g, &u, "example3-adversarial".parse().unwrap()).unwrap();
        assert!(v.test_passed);
        assert!(!v.tolerant_on_instance);
        assert_eq!(v.counterexamples.len(), 1);
        assert_eq!(v.counterexamples[0].case.to_string(), ":- p(b).");
        // domain {a, b, fresh}
        assert_eq!(v.cases_checked, 3);
    }

    #[test]
    fn plain_pre_is_vacuous_here() {
        let (d, g, u) = example3();
        let v = audit_tolerance_instance(&d, &g, &u, Method::PlainPre).unwrap();
        assert!(!v.test_passed);
        assert!(v.tolerant_on_instance && v.counterexamples.is_empty());
    }

    #[test]
    fn fresh_constant_avoids_domain() {
        let dom: BTreeSet<String> = ["fresh".to_string(), "a".into()].into();
        assert_eq!(fresh_constant(&dom), "fresh1");
    }

    #[test]
    fn zero_trials() {
        let cfg = GenConfig {
            trials: 0,
            ..GenConfig::default()
        };
        let r = audit_method(Method::DeltaPost, &cfg).unwrap();
        assert_eq!(r.trials_run, 0);
        assert!(r.passed());
    }
}
