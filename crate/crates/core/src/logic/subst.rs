use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::constraint::{Constraint, Denial, ExistentialConstraint};
use super::term::{Atom, Literal, Term};

/// A finite mapping from variable names to terms.
///
/// Bindings of a variable to itself are never stored, so `Rng` is exactly
/// the key set.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Term)>,
        S: Into<String>,
    {
        let mut s = Self::new();
        for (v, t) in pairs {
            s.bind(v.into(), t);
        }
        s
    }

    /// Inserts a binding without normalizing. `X/X` is dropped.
    pub fn bind(&mut self, var: String, term: Term) {
        if term.as_var() == Some(var.as_str()) {
            self.bindings.remove(&var);
        } else {
            self.bindings.insert(var, term);
        }
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// `Rng(σ)`: the bound variables.
    pub fn range(&self) -> BTreeSet<String> {
        self.bindings.keys().cloned().collect()
    }

    /// `Img(σ)`: the variables occurring among the image terms.
    pub fn image_vars(&self) -> BTreeSet<String> {
        self.bindings
            .values()
            .filter_map(Term::as_var)
            .map(str::to_owned)
            .collect()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        }
    }

    /// `self` followed by `other`: applying the result equals applying
    /// `self` and then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &self.bindings {
            out.bind(v.clone(), other.apply_term(t));
        }
        for (v, t) in &other.bindings {
            if !self.bindings.contains_key(v) {
                out.bind(v.clone(), t.clone());
            }
        }
        out
    }

    /// True when applying the substitution twice equals applying it once.
    pub fn is_idempotent(&self) -> bool {
        let range = self.range();
        self.image_vars().is_disjoint(&range)
    }

    pub fn restrict(&self, vars: &BTreeSet<String>) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(k, _)| vars.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}

/// Things a substitution can be applied to.
pub trait Apply {
    fn apply(&self, sigma: &Substitution) -> Self;
}

impl Apply for Term {
    fn apply(&self, sigma: &Substitution) -> Self {
        sigma.apply_term(self)
    }
}

impl Apply for Atom {
    fn apply(&self, sigma: &Substitution) -> Self {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|t| sigma.apply_term(t)).collect(),
        }
    }
}

impl Apply for Literal {
    fn apply(&self, sigma: &Substitution) -> Self {
        match self {
            Literal::Pos(a) => Literal::Pos(a.apply(sigma)),
            Literal::Neg(a) => Literal::Neg(a.apply(sigma)),
            Literal::Cmp(op, l, r) => Literal::Cmp(*op, sigma.apply_term(l), sigma.apply_term(r)),
        }
    }
}

impl Apply for Vec<Literal> {
    fn apply(&self, sigma: &Substitution) -> Self {
        self.iter().map(|l| l.apply(sigma)).collect()
    }
}

impl Apply for Denial {
    fn apply(&self, sigma: &Substitution) -> Self {
        Denial {
            body: self.body.apply(sigma),
            label: self.label.clone(),
        }
    }
}

impl Apply for ExistentialConstraint {
    fn apply(&self, sigma: &Substitution) -> Self {
        ExistentialConstraint {
            body: self.body.apply(sigma),
        }
    }
}

impl Apply for Constraint {
    fn apply(&self, sigma: &Substitution) -> Self {
        match self {
            Constraint::Denial(d) => Constraint::Denial(d.apply(sigma)),
            Constraint::Exists(e) => Constraint::Exists(e.apply(sigma)),
        }
    }
}

/// `eσ`, free-function form.
pub fn apply<E: Apply>(e: &E, sigma: &Substitution) -> E {
    e.apply(sigma)
}
