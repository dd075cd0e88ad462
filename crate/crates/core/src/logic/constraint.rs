use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{body_vars, format_body, unrestricted_vars, Literal};
use crate::error::Error;

/// `← L1 ∧ … ∧ Ln`: violated when some ground instance of the body holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Denial {
    pub body: Vec<Literal>,
    pub label: Option<String>,
}

impl Denial {
    /// Unchecked constructor; see [`Denial::checked`].
    pub fn new(body: Vec<Literal>) -> Self {
        Denial { body, label: None }
    }

    pub fn labelled(body: Vec<Literal>, label: impl Into<String>) -> Self {
        Denial {
            body,
            label: Some(label.into()),
        }
    }

    /// Rejects empty and non-range-restricted bodies.
    pub fn checked(body: Vec<Literal>, label: Option<String>) -> Result<Self, Error> {
        validate_body(&body)?;
        Ok(Denial { body, label })
    }

    pub fn vars(&self) -> Vec<String> {
        body_vars(&self.body)
    }

    pub fn is_ground(&self) -> bool {
        self.body.iter().all(Literal::is_ground)
    }

    pub fn is_range_restricted(&self) -> bool {
        !self.body.is_empty() && unrestricted_vars(&self.body).is_empty()
    }
}

impl fmt::Display for Denial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            write!(f, "@{l} ")?;
        }
        write!(f, ":- {}.", format_body(&self.body))
    }
}

/// `∃X̄ (L1 ∧ … ∧ Ln)`: satisfied when some ground instance of the body holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExistentialConstraint {
    pub body: Vec<Literal>,
}

impl ExistentialConstraint {
    pub fn new(body: Vec<Literal>) -> Self {
        ExistentialConstraint { body }
    }

    pub fn checked(body: Vec<Literal>) -> Result<Self, Error> {
        validate_body(&body)?;
        Ok(ExistentialConstraint { body })
    }
}

impl fmt::Display for ExistentialConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exists {}.", format_body(&self.body))
    }
}

fn validate_body(body: &[Literal]) -> Result<(), Error> {
    if body.is_empty() {
        return Err(Error::EmptyBody);
    }
    let unrestricted = unrestricted_vars(body);
    if !unrestricted.is_empty() {
        return Err(Error::NotRangeRestricted(
            unrestricted.into_iter().collect::<Vec<_>>().join(", "),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Constraint {
    Denial(Denial),
    Exists(ExistentialConstraint),
}

impl Constraint {
    pub fn body(&self) -> &[Literal] {
        match self {
            Constraint::Denial(d) => &d.body,
            Constraint::Exists(e) => &e.body,
        }
    }

    pub fn as_denial(&self) -> Option<&Denial> {
        match self {
            Constraint::Denial(d) => Some(d),
            Constraint::Exists(_) => None,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Constraint::Denial(d) => d.label.as_deref(),
            Constraint::Exists(_) => None,
        }
    }
}

impl From<Denial> for Constraint {
    fn from(d: Denial) -> Self {
        Constraint::Denial(d)
    }
}

impl From<ExistentialConstraint> for Constraint {
    fn from(e: ExistentialConstraint) -> Self {
        Constraint::Exists(e)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Denial(d) => d.fmt(f),
            Constraint::Exists(e) => e.fmt(f),
        }
    }
}

/// Variables not dominated by an existential quantifier.
///
/// Every variable of a denial is universally quantified at the outermost
/// level; an existential constraint has none.
pub trait GlobalVars {
    fn global_vars(&self) -> BTreeSet<String>;
}

impl GlobalVars for Denial {
    fn global_vars(&self) -> BTreeSet<String> {
        self.vars().into_iter().collect()
    }
}

impl GlobalVars for ExistentialConstraint {
    fn global_vars(&self) -> BTreeSet<String> {
        BTreeSet::new()
    }
}

impl GlobalVars for Constraint {
    fn global_vars(&self) -> BTreeSet<String> {
        match self {
            Constraint::Denial(d) => d.global_vars(),
            Constraint::Exists(e) => e.global_vars(),
        }
    }
}

pub fn global_variables<C: GlobalVars>(c: &C) -> BTreeSet<String> {
    c.global_vars()
}

/// A finite set of integrity constraints, kept in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegrityTheory {
    pub constraints: Vec<Constraint>,
}

impl IntegrityTheory {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        IntegrityTheory { constraints }
    }

    pub fn from_denials(denials: impl IntoIterator<Item = Denial>) -> Self {
        IntegrityTheory {
            constraints: denials.into_iter().map(Constraint::Denial).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter()
    }

    /// All members as denials, or the index of the first one that is not.
    pub fn denials(&self) -> Result<Vec<&Denial>, Error> {
        self.constraints
            .iter()
            .enumerate()
            .map(|(i, c)| c.as_denial().ok_or(Error::NotDenial(i)))
            .collect()
    }

    /// `label` if present, otherwise `ic<n>` counted from 1.
    pub fn name_of(&self, index: usize) -> String {
        self.constraints
            .get(index)
            .and_then(Constraint::label)
            .map(str::to_owned)
            .unwrap_or_else(|| format!("ic{}", index + 1))
    }
}

impl fmt::Display for IntegrityTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::term::{Atom, Term};

    fn pos(p: &str, args: &[&str]) -> Literal {
        Literal::Pos(Atom::new(
            p,
            args.iter()
                .map(|a| {
                    if a.chars().next().unwrap().is_uppercase() {
                        Term::var(*a)
                    } else {
                        Term::constant(*a)
                    }
                })
                .collect(),
        ))
    }

    #[test]
    fn denial_globals_are_all_variables() {
        let d = Denial::new(vec![pos("rev", &["S", "R"]), pos("sub", &["S", "R"])]);
        let g: Vec<_> = global_variables(&d).into_iter().collect();
        assert_eq!(g, vec!["R", "S"]);
        assert!(global_variables(&Denial::new(vec![pos("p", &["a"])])).is_empty());
    }

    #[test]
    fn existential_has_no_globals() {
        let e = ExistentialConstraint::new(vec![pos("p", &["X"])]);
        assert!(global_variables(&e).is_empty());
    }

    #[test]
    fn checked_rejects_unsafe_body() {
        let neg = Literal::Neg(Atom::new("p", vec![Term::var("X")]));
        assert!(matches!(
            Denial::checked(vec![neg], None),
            Err(Error::NotRangeRestricted(_))
        ));
        assert!(matches!(
            Denial::checked(vec![], None),
            Err(Error::EmptyBody)
        ));
    }
}
