use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Prefix reserved for variables minted by the engine. User-written variables
/// start with an uppercase letter, so they can never collide with these.
pub const FRESH_PREFIX: &str = "_G";

/// A function-free first-order term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    /// A variable that user syntax cannot produce by accident.
    pub fn fresh(n: usize) -> Self {
        Term::Var(format!("{FRESH_PREFIX}{n}"))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Const(n) | Term::Var(n) => n,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `pred(t1, ..., tn)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    /// Builds a ground atom from constant names.
    pub fn ground<S: AsRef<str>>(pred: impl Into<String>, consts: &[S]) -> Self {
        Atom::new(
            pred,
            consts.iter().map(|c| Term::constant(c.as_ref())).collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_const)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn consts(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::as_const)
    }

    /// Constant names of a ground atom; `None` if a variable is present.
    pub fn tuple(&self) -> Option<Vec<String>> {
        self.args
            .iter()
            .map(|t| t.as_const().map(str::to_owned))
            .collect()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if self.args.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Neq,
}

impl CmpOp {
    pub fn eval(self, lhs: &str, rhs: &str) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Neq => lhs != rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Neq => "\\=",
        }
    }
}

/// A body literal: a positive or negated atom, or a builtin comparison.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Literal {
    Pos(Atom),
    Neg(Atom),
    Cmp(CmpOp, Term, Term),
}

impl Literal {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => Some(a),
            Literal::Cmp(..) => None,
        }
    }

    pub fn is_positive_atom(&self) -> bool {
        matches!(self, Literal::Pos(_))
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => a.args.iter().collect(),
            Literal::Cmp(_, l, r) => vec![l, r],
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(Term::as_var)
    }

    pub fn consts(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(Term::as_const)
    }

    pub fn is_ground(&self) -> bool {
        self.terms().iter().all(|t| t.is_const())
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "not {a}"),
            Literal::Cmp(op, l, r) => write!(f, "{l} {} {r}", op.symbol()),
        }
    }
}

/// Variables of a conjunction, in first-occurrence order.
pub fn body_vars(body: &[Literal]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in body.iter().flat_map(Literal::vars) {
        if seen.insert(v) {
            out.push(v.to_owned());
        }
    }
    out
}

/// Variables that occur in a body literal but not in any positive atom.
pub fn unrestricted_vars(body: &[Literal]) -> BTreeSet<String> {
    let bound: BTreeSet<&str> = body
        .iter()
        .filter(|l| l.is_positive_atom())
        .flat_map(Literal::vars)
        .collect();
    body.iter()
        .flat_map(Literal::vars)
        .filter(|v| !bound.contains(v))
        .map(str::to_owned)
        .collect()
}

pub fn is_range_restricted(body: &[Literal]) -> bool {
    unrestricted_vars(body).is_empty()
}

pub fn format_body(body: &[Literal]) -> String {
    body.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_equality_is_kind_and_name() {
        assert_eq!(Term::constant("a"), Term::constant("a"));
        assert_ne!(Term::constant("a"), Term::var("a"));
    }

    #[test]
    fn range_restriction() {
        let x = Term::var("X");
        let body = vec![Literal::Neg(Atom::new("p", vec![x.clone()]))];
        assert!(!is_range_restricted(&body));
        let body = vec![
            Literal::Pos(Atom::new("q", vec![x.clone()])),
            Literal::Neg(Atom::new("p", vec![x.clone()])),
            Literal::Cmp(CmpOp::Neq, x, Term::constant("b")),
        ];
        assert!(is_range_restricted(&body));
    }

    #[test]
    fn display() {
        let a = Atom::new("rev", vec![Term::var("S"), Term::constant("b")]);
        assert_eq!(a.to_string(), "rev(S,b)");
        assert_eq!(Literal::Neg(a).to_string(), "not rev(S,b)");
        assert_eq!(
            Literal::Cmp(CmpOp::Neq, Term::var("X"), Term::constant("b")).to_string(),
            "X \\= b"
        );
    }
}
