use std::fmt;

use serde::Serialize;

use super::method::{Method, Protocol};
use crate::error::{Error, Result};
use crate::logic::{
    is_range_restricted, subsumes, unify_with, Apply, Atom, CmpOp, Constraint, Denial,
    ExistentialConstraint, IntegrityTheory, Literal, Substitution, Term,
};
use crate::store::{Database, Delta, FactSet, FactSource, Transition, Update};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    Pre,
    Post,
    PlainPre,
    PlainPost,
}

impl TestKind {
    pub fn protocol(self) -> Protocol {
        match self {
            TestKind::Pre | TestKind::PlainPre => Protocol::Pre,
            TestKind::Post | TestKind::PlainPost => Protocol::Post,
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::Pre => "pre",
            TestKind::Post => "post",
            TestKind::PlainPre => "plain-pre",
            TestKind::PlainPost => "plain-post",
        })
    }
}

/// Which state a test's constraints are read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reading {
    /// The old state as it is.
    Old,
    /// The old state with every atom read as "holds after the update",
    /// answered from the old model plus the delta.
    OldThroughUpdate,
    /// The new state, after executing the update.
    New,
    /// A materialized shadow copy of the new state, the old one untouched.
    Shadow,
}

/// A delta atom that instantiated a body literal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trigger {
    /// Position of the matched literal in the source body.
    pub literal: usize,
    /// The atom, taken from the added set for positive literals and from the
    /// removed set for negated ones.
    pub atom: Atom,
}

/// Provenance of one test member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Source {
    pub ic: usize,
    pub triggers: Vec<Trigger>,
    pub unifier: Substitution,
}

/// A simplification of an integrity theory for one update.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Test {
    pub kind: TestKind,
    pub reading: Reading,
    pub constraints: Vec<Constraint>,
    pub sources: Vec<Source>,
    /// The update the test was generated for.
    pub update: Update,
}

impl Test {
    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn denials(&self) -> impl Iterator<Item = &Denial> {
        self.constraints.iter().filter_map(Constraint::as_denial)
    }

    pub fn as_theory(&self) -> IntegrityTheory {
        IntegrityTheory::new(self.constraints.clone())
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

fn require_denials(theory: &IntegrityTheory) -> Result<Vec<&Denial>> {
    theory.denials()
}

/// Delta-driven post-test for `theory` and `u` in state `d`.
pub fn simplify_post(theory: &IntegrityTheory, u: &Update, d: &Database) -> Result<Test> {
    let denials = require_denials(theory)?;
    let tr = Transition::compute(d, u)?;
    Ok(delta_test(
        &denials,
        &tr.delta,
        u,
        TestKind::Post,
        Reading::New,
    ))
}

/// The denials of [`simplify_post`], read in the old state through the update.
pub fn simplify_pre(theory: &IntegrityTheory, u: &Update, d: &Database) -> Result<Test> {
    let denials = require_denials(theory)?;
    let tr = Transition::compute(d, u)?;
    Ok(delta_test(
        &denials,
        &tr.delta,
        u,
        TestKind::Pre,
        Reading::OldThroughUpdate,
    ))
}

/// The theory is a plain post-test of itself for any update.
pub fn plain_post(theory: &IntegrityTheory, u: &Update) -> Test {
    plain(theory, u, TestKind::PlainPost, Reading::New)
}

/// The theory evaluated on a shadow copy of the updated state.
pub fn plain_pre(theory: &IntegrityTheory, u: &Update) -> Test {
    plain(theory, u, TestKind::PlainPre, Reading::Shadow)
}

fn plain(theory: &IntegrityTheory, u: &Update, kind: TestKind, reading: Reading) -> Test {
    Test {
        kind,
        reading,
        constraints: theory.constraints.clone(),
        sources: (0..theory.len())
            .map(|ic| Source {
                ic,
                triggers: Vec::new(),
                unifier: Substitution::new(),
            })
            .collect(),
        update: u.clone(),
    }
}

/// `Σ = ∃X p(X)` or `Υ = ∃X (p(X) ∧ X ≠ b)`, only for `Γ = {← p(X)}` and
/// `U = insert p(b)`.
pub fn adversarial(theory: &IntegrityTheory, u: &Update, protocol: Protocol) -> Result<Test> {
    let not_applicable = |reason: &str| Error::MethodNotApplicable {
        method: Method::Adversarial(protocol).id().to_owned(),
        reason: reason.to_owned(),
    };
    let denials = require_denials(theory)?;
    let [w] = denials.as_slice() else {
        return Err(not_applicable("the theory must be exactly {:- p(X).}"));
    };
    let x = match w.body.as_slice() {
        [Literal::Pos(a)] if a.pred == "p" && a.arity() == 1 && a.args[0].is_var() => {
            a.args[0].clone()
        }
        _ => return Err(not_applicable("the theory must be exactly {:- p(X).}")),
    };
    let b = Atom::ground("p", &["b"]);
    if !(u.deletes().is_empty() && u.inserts().len() == 1 && u.inserts().contains(&b)) {
        return Err(not_applicable(
            "the update must be exactly the insertion of p(b)",
        ));
    }
    let px = Literal::Pos(Atom::new("p", vec![x.clone()]));
    let (kind, reading, body) = match protocol {
        Protocol::Pre => (TestKind::Pre, Reading::Old, vec![px]),
        Protocol::Post => (
            TestKind::Post,
            Reading::New,
            vec![px, Literal::Cmp(CmpOp::Neq, x, Term::constant("b"))],
        ),
    };
    Ok(Test {
        kind,
        reading,
        constraints: vec![Constraint::Exists(ExistentialConstraint::new(body))],
        sources: vec![Source {
            ic: 0,
            triggers: Vec::new(),
            unifier: Substitution::new(),
        }],
        update: u.clone(),
    })
}

/// The test a method produces for `(Γ, U)` in state `d`.
pub fn generate_test(
    method: Method,
    theory: &IntegrityTheory,
    u: &Update,
    d: &Database,
) -> Result<Test> {
    match method {
        Method::DeltaPost => simplify_post(theory, u, d),
        Method::DeltaPre => simplify_pre(theory, u, d),
        Method::PlainPre => Ok(plain_pre(theory, u)),
        Method::PlainPost => Ok(plain_post(theory, u)),
        Method::Adversarial(p) => adversarial(theory, u, p),
    }
}

/// Same as [`generate_test`] but reuses an already computed transition.
pub(crate) fn generate_with(
    method: Method,
    theory: &IntegrityTheory,
    u: &Update,
    tr: &Transition,
) -> Result<Test> {
    match method {
        Method::DeltaPost => Ok(delta_test(
            &require_denials(theory)?,
            &tr.delta,
            u,
            TestKind::Post,
            Reading::New,
        )),
        Method::DeltaPre => Ok(delta_test(
            &require_denials(theory)?,
            &tr.delta,
            u,
            TestKind::Pre,
            Reading::OldThroughUpdate,
        )),
        Method::PlainPre => Ok(plain_pre(theory, u)),
        Method::PlainPost => Ok(plain_post(theory, u)),
        Method::Adversarial(p) => adversarial(theory, u, p),
    }
}

struct Candidate {
    denial: Denial,
    source: Source,
    size: usize,
    key: String,
}

fn delta_test(
    denials: &[&Denial],
    delta: &Delta,
    u: &Update,
    kind: TestKind,
    reading: Reading,
) -> Test {
    let mut constraints = Vec::new();
    let mut sources = Vec::new();
    for (ic, w) in denials.iter().enumerate() {
        let mut found = Vec::new();
        let mut chosen = Vec::new();
        enumerate_matches(w, delta, 0, &Substitution::new(), &mut chosen, &mut found);
        let mut cands: Vec<Candidate> = found
            .into_iter()
            .filter_map(|(sigma, triggers)| instantiate(w, ic, sigma, triggers))
            .collect();
        cands.sort_by(|a, b| (a.size, &a.key).cmp(&(b.size, &b.key)));

        let mut kept: Vec<Candidate> = Vec::new();
        for c in cands {
            if kept.iter().any(|k| subsumes(&k.denial, &c.denial)) {
                continue;
            }
            kept.retain(|k| !subsumes(&c.denial, &k.denial));
            kept.push(c);
        }
        for k in kept {
            constraints.push(Constraint::Denial(k.denial));
            sources.push(k.source);
        }
    }
    Test {
        kind,
        reading,
        constraints,
        sources,
        update: u.clone(),
    }
}

/// Depth-first over body positions: each literal stays unmatched or takes
/// one delta atom, as long as all matches unify simultaneously.
fn enumerate_matches(
    w: &Denial,
    delta: &Delta,
    pos: usize,
    sigma: &Substitution,
    chosen: &mut Vec<Trigger>,
    out: &mut Vec<(Substitution, Vec<Trigger>)>,
) {
    if pos == w.body.len() {
        if !chosen.is_empty() {
            out.push((sigma.clone(), chosen.clone()));
        }
        return;
    }
    enumerate_matches(w, delta, pos + 1, sigma, chosen, out);
    let (atom, pool): (&Atom, &FactSet) = match &w.body[pos] {
        Literal::Pos(a) => (a, &delta.added),
        Literal::Neg(a) => (a, &delta.removed),
        Literal::Cmp(..) => return,
    };
    for tuple in pool.tuples(&atom.pred) {
        if tuple.len() != atom.arity() {
            continue;
        }
        let target = Atom::ground(atom.pred.clone(), tuple);
        if let Some(next) = unify_with(atom, &target, sigma) {
            chosen.push(Trigger {
                literal: pos,
                atom: target,
            });
            enumerate_matches(w, delta, pos + 1, &next, chosen, out);
            chosen.pop();
        }
    }
}

/// Applies the unifier, drops matched literals and settles ground
/// comparisons. `None` when the instance can never be violated.
fn instantiate(
    w: &Denial,
    ic: usize,
    sigma: Substitution,
    triggers: Vec<Trigger>,
) -> Option<Candidate> {
    let matched: Vec<usize> = triggers.iter().map(|t| t.literal).collect();
    let mut residual = Vec::new();
    let mut held_back = Vec::new();
    for (i, lit) in w.body.iter().enumerate() {
        let lit = lit.apply(&sigma);
        if let Literal::Cmp(op, Term::Const(l), Term::Const(r)) = &lit {
            if !op.eval(l, r) {
                return None;
            }
            held_back.push(lit);
            continue;
        }
        if matched.contains(&i) {
            held_back.push(lit);
        } else {
            residual.push(lit);
        }
    }
    // Removal must leave a nonempty, range-restricted body; otherwise put
    // removed literals back in body order until it does.
    let mut held_back = held_back.into_iter();
    while residual.is_empty() || !is_range_restricted(&residual) {
        residual.push(
            held_back
                .next()
                .expect("the full instance is range-restricted"),
        );
    }
    let denial = Denial::new(residual);
    let key = denial.to_string();
    Some(Candidate {
        size: triggers.len(),
        denial,
        source: Source {
            ic,
            triggers,
            unifier: sigma,
        },
        key,
    })
}
