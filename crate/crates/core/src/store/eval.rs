//! Standard-model computation and constraint evaluation.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;

use super::database::{apply_update, Database, Rule, Update};
use super::join::Plan;
use super::model::{FactSet, FactSource};
use super::stratify::stratify;
use crate::error::Result;
use crate::logic::{Atom, Constraint, IntegrityTheory, Literal, Substitution, Term};

/// The perfect model of a stratified database, computed stratum by stratum
/// with semi-naive iteration.
pub fn standard_model(d: &Database) -> Result<FactSet> {
    let strata = stratify(d.rules())?;
    let mut model: FactSet = d.facts().iter().collect();
    for level in 1..=strata.max() {
        let rules: Vec<&Rule> = d
            .rules()
            .iter()
            .filter(|r| strata.of(&r.head.pred) == level)
            .collect();
        if rules.is_empty() {
            continue;
        }
        let plans: Vec<Plan<'_>> = rules.iter().map(|r| Plan::new(&r.body)).collect();
        // literals that read a predicate of this stratum
        let recursive: Vec<Vec<usize>> = rules
            .iter()
            .map(|r| {
                r.body
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| matches!(l, Literal::Pos(a) if strata.of(&a.pred) == level))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();

        let mut delta = FactSet::new();
        for (rule, plan) in rules.iter().zip(&plans) {
            fire(rule, plan, &|_| &model, &model, &model, &mut delta);
        }
        model.extend(&delta);

        while !delta.is_empty() {
            let mut next = FactSet::new();
            for ((rule, plan), rec) in rules.iter().zip(&plans).zip(&recursive) {
                for &pivot in rec {
                    let (m, dl) = (&model, &delta);
                    let source = move |i: usize| -> &dyn FactSource {
                        if i == pivot {
                            dl
                        } else {
                            m
                        }
                    };
                    fire(rule, plan, &source, m, m, &mut next);
                }
            }
            delta = next;
            model.extend(&delta);
        }
    }
    Ok(model)
}

/// Derives head instances not yet in `known`.
fn fire<'s>(
    rule: &Rule,
    plan: &Plan<'s>,
    source_for: &dyn Fn(usize) -> &'s dyn FactSource,
    negated: &'s dyn FactSource,
    known: &FactSet,
    out: &mut FactSet,
) {
    let slots: Vec<Result<usize, &str>> = rule
        .head
        .args
        .iter()
        .map(|t| match t {
            Term::Var(v) => Ok(plan.vars().iter().position(|x| x == v).unwrap()),
            Term::Const(c) => Err(c.as_str()),
        })
        .collect();
    plan.for_each(source_for, negated, &mut |env| {
        let tuple: Vec<String> = slots
            .iter()
            .map(|s| match s {
                Ok(i) => env[*i].to_owned(),
                Err(c) => (*c).to_owned(),
            })
            .collect();
        if !known.contains(&rule.head.pred, &tuple) {
            out.insert_tuple(&rule.head.pred, tuple);
        }
        ControlFlow::Continue(())
    });
}

/// Answers of a body against a state: every ground instance that holds.
pub fn body_answers(body: &[Literal], state: &dyn FactSource) -> Vec<Substitution> {
    Plan::new(body).answers(state, state)
}

/// Whether some ground instance of the body holds in `state`.
pub fn body_holds(body: &[Literal], state: &dyn FactSource) -> bool {
    Plan::new(body).any(state)
}

/// `state ⊨ c`.
pub fn holds_in(state: &dyn FactSource, c: &Constraint) -> bool {
    match c {
        Constraint::Denial(d) => !body_holds(&d.body, state),
        Constraint::Exists(e) => body_holds(&e.body, state),
    }
}

/// `D ⊨ c`.
pub fn holds(d: &Database, c: &Constraint) -> Result<bool> {
    Ok(holds_in(&standard_model(d)?, c))
}

/// One violated member of a theory with every witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub name: String,
    pub constraint: Constraint,
    /// Ground body instances that hold. Empty for a failed existential.
    pub witnesses: Vec<Substitution>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every member and collects witnesses for the violated ones.
pub fn check_theory_in(
    state: &dyn FactSource,
    theory: &IntegrityTheory,
) -> (bool, ViolationReport) {
    check_constraints_in(state, &theory.constraints, |i| theory.name_of(i))
}

pub(crate) fn check_constraints_in(
    state: &dyn FactSource,
    constraints: &[Constraint],
    name_of: impl Fn(usize) -> String,
) -> (bool, ViolationReport) {
    let mut report = ViolationReport::default();
    for (index, c) in constraints.iter().enumerate() {
        let violated = match c {
            Constraint::Denial(d) => {
                let w = body_answers(&d.body, state);
                (!w.is_empty()).then_some(w)
            }
            Constraint::Exists(e) => (!body_holds(&e.body, state)).then(Vec::new),
        };
        if let Some(witnesses) = violated {
            report.violations.push(Violation {
                index,
                name: name_of(index),
                constraint: c.clone(),
                witnesses,
            });
        }
    }
    (report.is_empty(), report)
}

/// `D ⊨ Γ`, with a report of all violations.
pub fn holds_theory(d: &Database, theory: &IntegrityTheory) -> Result<(bool, ViolationReport)> {
    Ok(check_theory_in(&standard_model(d)?, theory))
}

/// Model-level change set induced by an update, across all predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Delta {
    pub added: FactSet,
    pub removed: FactSet,
}

impl Delta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }

    pub fn added_atoms(&self) -> BTreeSet<Atom> {
        self.added.to_atoms()
    }

    pub fn removed_atoms(&self) -> BTreeSet<Atom> {
        self.removed.to_atoms()
    }
}

/// Both models and their difference, computed once.
#[derive(Debug, Clone)]
pub struct Transition {
    pub old: FactSet,
    pub new: FactSet,
    pub delta: Delta,
}

impl Transition {
    pub fn compute(d: &Database, u: &Update) -> Result<Self> {
        let old = standard_model(d)?;
        let new = standard_model(&apply_update(d, u)?)?;
        let delta = Delta {
            added: new.difference(&old),
            removed: old.difference(&new),
        };
        Ok(Transition { old, new, delta })
    }
}

pub fn delta(d: &Database, u: &Update) -> Result<Delta> {
    Ok(Transition::compute(d, u)?.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{CmpOp, Denial, ExistentialConstraint};

    fn t(s: &str) -> Term {
        if s.chars().next().unwrap().is_uppercase() {
            Term::var(s)
        } else {
            Term::constant(s)
        }
    }
    fn atom(p: &str, args: &[&str]) -> Atom {
        Atom::new(p, args.iter().map(|a| t(a)).collect())
    }
    fn pos(p: &str, args: &[&str]) -> Literal {
        Literal::Pos(atom(p, args))
    }

    fn coauth_rule() -> Rule {
        Rule::new(
            atom("coauth", &["X", "Y"]),
            vec![pos("pub", &["P", "X"]), pos("pub", &["P", "Y"])],
        )
        .unwrap()
    }

    #[test]
    fn facts_only_model() {
        let d = Database::from_facts([Atom::ground("p", &["a"])]).unwrap();
        assert_eq!(standard_model(&d).unwrap().to_atoms().len(), 1);
    }

    #[test]
    fn coauthor_view() {
        let d = Database::new(
            [
                Atom::ground("pub", &["p1", "a"]),
                Atom::ground("pub", &["p1", "b"]),
            ],
            vec![coauth_rule()],
        )
        .unwrap();
        let m = standard_model(&d).unwrap();
        for (x, y) in [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")] {
            assert!(m.contains_atom(&Atom::ground("coauth", &[x, y])));
        }
        assert_eq!(m.len(), 6);
    }

    #[test]
    fn transitive_closure() {
        let rules = vec![
            Rule::new(atom("tc", &["X", "Y"]), vec![pos("e", &["X", "Y"])]).unwrap(),
            Rule::new(
                atom("tc", &["X", "Z"]),
                vec![pos("tc", &["X", "Y"]), pos("e", &["Y", "Z"])],
            )
            .unwrap(),
        ];
        let d = Database::new(
            [
                Atom::ground("e", &["a", "b"]),
                Atom::ground("e", &["b", "c"]),
                Atom::ground("e", &["c", "d"]),
            ],
            rules,
        )
        .unwrap();
        let m = standard_model(&d).unwrap();
        assert!(m.contains_atom(&Atom::ground("tc", &["a", "c"])));
        assert!(m.contains_atom(&Atom::ground("tc", &["a", "d"])));
        assert_eq!(m.to_atoms().iter().filter(|a| a.pred == "tc").count(), 6);
    }

    #[test]
    fn denial_and_existential_evaluation() {
        let d = Database::from_facts([Atom::ground("p", &["a"])]).unwrap();
        let phi = Constraint::Denial(Denial::new(vec![pos("p", &["b"])]));
        assert!(holds(&d, &phi).unwrap());

        let du =
            Database::from_facts([Atom::ground("p", &["a"]), Atom::ground("p", &["b"])]).unwrap();
        let upsilon = Constraint::Exists(ExistentialConstraint::new(vec![
            pos("p", &["X"]),
            Literal::Cmp(CmpOp::Neq, t("X"), t("b")),
        ]));
        assert!(holds(&du, &upsilon).unwrap());
    }

    #[test]
    fn theory_report_has_witness() {
        let d = Database::from_facts([
            Atom::ground("rev", &["d", "e"]),
            Atom::ground("sub", &["d", "e"]),
        ])
        .unwrap();
        let theory = IntegrityTheory::from_denials([Denial::new(vec![
            pos("rev", &["S", "R"]),
            pos("sub", &["S", "R"]),
        ])]);
        let (ok, report) = holds_theory(&d, &theory).unwrap();
        assert!(!ok);
        assert_eq!(report.violations[0].witnesses[0].to_string(), "{R/e, S/d}");

        let (ok, report) = holds_theory(&d, &IntegrityTheory::default()).unwrap();
        assert!(ok && report.is_empty());
    }

    #[test]
    fn delta_through_view() {
        let d = Database::new([Atom::ground("pub", &["p2", "f"])], vec![coauth_rule()]).unwrap();
        let u = Update::insert([Atom::ground("pub", &["p2", "e"])]).unwrap();
        let dl = delta(&d, &u).unwrap();
        for a in [
            Atom::ground("pub", &["p2", "e"]),
            Atom::ground("coauth", &["e", "f"]),
            Atom::ground("coauth", &["f", "e"]),
            Atom::ground("coauth", &["e", "e"]),
        ] {
            assert!(dl.added.contains_atom(&a), "{a}");
        }
        assert!(dl.removed.is_empty());

        assert!(delta(&d, &Update::empty()).unwrap().is_empty());
        let again = Update::insert([Atom::ground("pub", &["p2", "f"])]).unwrap();
        assert!(delta(&d, &again).unwrap().is_empty());
    }

    #[test]
    fn stratified_negation_model() {
        let rules = vec![
            Rule::new(atom("r", &["X"]), vec![pos("e", &["X", "Y"])]).unwrap(),
            Rule::new(
                atom("s", &["Y"]),
                vec![pos("e", &["X", "Y"]), Literal::Neg(atom("r", &["Y"]))],
            )
            .unwrap(),
        ];
        let d = Database::new(
            [
                Atom::ground("e", &["a", "b"]),
                Atom::ground("e", &["b", "c"]),
            ],
            rules,
        )
        .unwrap();
        let m = standard_model(&d).unwrap();
        assert!(m.contains_atom(&Atom::ground("s", &["c"])));
        assert!(!m.contains_atom(&Atom::ground("s", &["b"])));
    }
}
