use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{format_body, unrestricted_vars, Atom, IntegrityTheory, Literal};

/// `head :- body.` defining a derived predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl Rule {
    /// Checks range restriction, including head variables.
    pub fn new(head: Atom, body: Vec<Literal>) -> Result<Self> {
        if body.is_empty() {
            return Err(Error::EmptyBody);
        }
        let mut unrestricted = unrestricted_vars(&body);
        let positive: BTreeSet<&str> = body
            .iter()
            .filter(|l| l.is_positive_atom())
            .flat_map(Literal::vars)
            .collect();
        unrestricted.extend(
            head.vars()
                .filter(|v| !positive.contains(v))
                .map(str::to_owned),
        );
        if !unrestricted.is_empty() {
            return Err(Error::NotRangeRestricted(
                unrestricted.into_iter().collect::<Vec<_>>().join(", "),
            ));
        }
        Ok(Rule { head, body })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- {}.", self.head, format_body(&self.body))
    }
}

/// Ground base facts plus view definitions.
///
/// Rules are kept sorted by head predicate (stable), which is also the
/// canonical print order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Database {
    facts: BTreeSet<Atom>,
    rules: Vec<Rule>,
}

impl Database {
    pub fn new(facts: impl IntoIterator<Item = Atom>, mut rules: Vec<Rule>) -> Result<Self> {
        rules.sort_by(|a, b| a.head.pred.cmp(&b.head.pred));
        let db = Database {
            facts: facts.into_iter().collect(),
            rules,
        };
        let derived = db.derived_predicates();
        for f in &db.facts {
            if !f.is_ground() {
                return Err(Error::NonGroundFact(f.clone()));
            }
            if derived.contains(&f.pred) {
                return Err(Error::DerivedPredicate(f.clone()));
            }
        }
        check_arities(db.atoms_mentioned())?;
        Ok(db)
    }

    pub fn from_facts(facts: impl IntoIterator<Item = Atom>) -> Result<Self> {
        Self::new(facts, Vec::new())
    }

    pub fn facts(&self) -> &BTreeSet<Atom> {
        &self.facts
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn derived_predicates(&self) -> BTreeSet<String> {
        self.rules.iter().map(|r| r.head.pred.clone()).collect()
    }

    pub fn is_derived(&self, pred: &str) -> bool {
        self.rules.iter().any(|r| r.head.pred == pred)
    }

    fn atoms_mentioned(&self) -> impl Iterator<Item = &Atom> {
        self.facts.iter().chain(
            self.rules.iter().flat_map(|r| {
                std::iter::once(&r.head).chain(r.body.iter().filter_map(Literal::atom))
            }),
        )
    }

    /// Constants occurring in facts and rules.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .atoms_mentioned()
            .flat_map(Atom::consts)
            .map(str::to_owned)
            .collect();
        for r in &self.rules {
            out.extend(r.body.iter().flat_map(Literal::consts).map(str::to_owned));
        }
        out
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.facts {
            writeln!(f, "{fact}.")?;
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A transaction of ground base-fact insertions and deletions.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Update {
    inserts: BTreeSet<Atom>,
    deletes: BTreeSet<Atom>,
}

impl Update {
    pub fn new(
        inserts: impl IntoIterator<Item = Atom>,
        deletes: impl IntoIterator<Item = Atom>,
    ) -> Result<Self> {
        let u = Update {
            inserts: inserts.into_iter().collect(),
            deletes: deletes.into_iter().collect(),
        };
        for a in u.inserts.iter().chain(&u.deletes) {
            if !a.is_ground() {
                return Err(Error::NonGroundFact(a.clone()));
            }
        }
        if let Some(a) = u.inserts.intersection(&u.deletes).next() {
            return Err(Error::ConflictingUpdate(a.clone()));
        }
        check_arities(u.inserts.iter().chain(&u.deletes))?;
        Ok(u)
    }

    pub fn insert(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        Self::new(atoms, [])
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn inserts(&self) -> &BTreeSet<Atom> {
        &self.inserts
    }

    pub fn deletes(&self) -> &BTreeSet<Atom> {
        &self.deletes
    }

    pub fn is_empty(&self) -> bool {
        self.inserts.is_empty() && self.deletes.is_empty()
    }

    /// Swaps inserts and deletes.
    pub fn inverse(&self) -> Update {
        Update {
            inserts: self.deletes.clone(),
            deletes: self.inserts.clone(),
        }
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.inserts
            .iter()
            .chain(&self.deletes)
            .flat_map(Atom::consts)
            .map(str::to_owned)
            .collect()
    }
}

impl fmt::Display for Update {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.inserts {
            writeln!(f, "+ {a}.")?;
        }
        for a in &self.deletes {
            writeln!(f, "- {a}.")?;
        }
        Ok(())
    }
}

/// `D^U`: `(facts \ deletes) ∪ inserts`. The input is left untouched.
pub fn apply_update(d: &Database, u: &Update) -> Result<Database> {
    for a in u.inserts.iter().chain(&u.deletes) {
        if d.is_derived(&a.pred) {
            return Err(Error::DerivedPredicate(a.clone()));
        }
    }
    let mut facts = d.facts.clone();
    for a in &u.deletes {
        facts.remove(a);
    }
    facts.extend(u.inserts.iter().cloned());
    let out = Database {
        facts,
        rules: d.rules.clone(),
    };
    check_arities(out.atoms_mentioned())?;
    Ok(out)
}

/// Constants of the database, theory and update together.
pub fn active_domain(
    d: &Database,
    theory: &IntegrityTheory,
    u: Option<&Update>,
) -> BTreeSet<String> {
    let mut dom = d.constants();
    for c in theory.iter() {
        dom.extend(c.body().iter().flat_map(Literal::consts).map(str::to_owned));
    }
    if let Some(u) = u {
        dom.extend(u.constants());
    }
    dom
}

/// Every predicate must keep one arity.
pub fn check_arities<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Result<()> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for a in atoms {
        match seen.get(a.pred.as_str()) {
            Some(&n) if n != a.arity() => {
                return Err(Error::ArityMismatch {
                    pred: a.pred.clone(),
                    expected: n,
                    found: a.arity(),
                })
            }
            Some(_) => {}
            None => {
                seen.insert(&a.pred, a.arity());
            }
        }
    }
    Ok(())
}

/// Arity consistency across a whole run: database, theory and update.
pub fn check_schema(d: &Database, theory: &IntegrityTheory, u: Option<&Update>) -> Result<()> {
    let body_atoms = theory
        .iter()
        .flat_map(|c| c.body().iter().filter_map(Literal::atom));
    let update_atoms = u
        .into_iter()
        .flat_map(|u| u.inserts.iter().chain(&u.deletes));
    check_arities(d.atoms_mentioned().chain(body_atoms).chain(update_atoms))
}
