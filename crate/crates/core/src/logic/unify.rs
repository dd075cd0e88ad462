use super::subst::Substitution;
use super::term::{Atom, Term};

/// Most general unifier of two atoms, or `None` when they clash.
///
/// The result is idempotent. Variable-variable pairs bind the left variable
/// to the right one, so the output is deterministic for fixed inputs.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    unify_with(a, b, &Substitution::new())
}

/// Extends an existing idempotent unifier so that it also unifies `a` and `b`.
pub fn unify_with(a: &Atom, b: &Atom, sigma: &Substitution) -> Option<Substitution> {
    if a.pred != b.pred || a.arity() != b.arity() {
        return None;
    }
    let mut sigma = sigma.clone();
    for (s, t) in a.args.iter().zip(&b.args) {
        sigma = unify_terms(s, t, sigma)?;
    }
    Some(sigma)
}

fn unify_terms(s: &Term, t: &Term, sigma: Substitution) -> Option<Substitution> {
    let s = sigma.apply_term(s);
    let t = sigma.apply_term(t);
    match (&s, &t) {
        _ if s == t => Some(sigma),
        (Term::Var(v), other) | (other, Term::Var(v)) => {
            // No function symbols, so no occurs check is needed.
            let single = Substitution::from_pairs([(v.clone(), other.clone())]);
            Some(sigma.compose(&single))
        }
        (Term::Const(_), Term::Const(_)) => None,
    }
}

/// One-way matching: a binding of the variables of `pattern` making it equal
/// to `target`. Variables of `target` are treated as opaque constants, so the
/// two sides may share variable names.
pub fn match_atom(pattern: &Atom, target: &Atom, sigma: &Matching) -> Option<Matching> {
    if pattern.pred != target.pred || pattern.arity() != target.arity() {
        return None;
    }
    let mut sigma = sigma.clone();
    for (p, t) in pattern.args.iter().zip(&target.args) {
        if !sigma.match_term(p, t) {
            return None;
        }
    }
    Some(sigma)
}

/// Bindings produced by one-way matching. Unlike [`Substitution`] this keeps
/// `X/X`, which marks `X` as fixed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching(std::collections::BTreeMap<String, Term>);

impl Matching {
    pub fn match_term(&mut self, p: &Term, t: &Term) -> bool {
        match p {
            Term::Var(v) => match self.0.get(v) {
                Some(bound) => bound == t,
                None => {
                    self.0.insert(v.clone(), t.clone());
                    true
                }
            },
            Term::Const(_) => p == t,
        }
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        }
    }

    pub fn to_substitution(&self) -> Substitution {
        Substitution::from_pairs(self.0.iter().map(|(k, v)| (k.clone(), v.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::super::subst::Apply;
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn instantiates_review_trigger() {
        let s = unify(
            &Atom::new("rev", vec![v("S"), v("R")]),
            &Atom::ground("rev", &["c", "b"]),
        )
        .unwrap();
        assert_eq!(s.to_string(), "{R/b, S/c}");
    }

    #[test]
    fn constant_clash() {
        assert!(unify(&Atom::ground("p", &["a"]), &Atom::ground("p", &["b"])).is_none());
        assert!(unify(&Atom::ground("p", &["a"]), &Atom::ground("q", &["a"])).is_none());
    }

    #[test]
    fn chained_variables() {
        let a = Atom::new("p", vec![v("X"), v("Y")]);
        let b = Atom::new("p", vec![v("Y"), c("a")]);
        let s = unify(&a, &b).unwrap();
        assert_eq!(s, Substitution::from_pairs([("X", c("a")), ("Y", c("a"))]));
        assert_eq!(a.apply(&s), b.apply(&s));
        assert!(s.is_idempotent());
    }

    #[test]
    fn matching_is_one_way() {
        let p = Atom::new("p", vec![v("X"), v("X")]);
        let m = Matching::default();
        assert!(match_atom(&p, &Atom::ground("p", &["a", "a"]), &m).is_some());
        assert!(match_atom(&p, &Atom::ground("p", &["a", "b"]), &m).is_none());
        let t = Atom::new("p", vec![v("Y"), c("a")]);
        assert!(match_atom(&Atom::new("p", vec![c("a"), v("Z")]), &t, &m).is_none());
        // shared names: X is fixed to the target's X, not free
        let shared = Atom::new("p", vec![v("X"), v("X")]);
        let target = Atom::new("p", vec![v("X"), c("a")]);
        assert!(match_atom(&shared, &target, &m).is_none());
    }
}
