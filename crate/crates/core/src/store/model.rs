use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{Atom, Term};

/// Read access to a set of ground atoms, grouped by predicate.
pub trait FactSource {
    fn contains(&self, pred: &str, tuple: &[String]) -> bool;
    fn tuples<'a>(&'a self, pred: &str) -> Box<dyn Iterator<Item = &'a [String]> + 'a>;
}

/// A set of ground atoms indexed by predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FactSet {
    rels: BTreeMap<String, BTreeSet<Vec<String>>>,
}

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the atom was already present. Panics on non-ground atoms.
    pub fn insert(&mut self, atom: &Atom) -> bool {
        let tuple = atom.tuple().expect("fact sets only hold ground atoms");
        self.insert_tuple(&atom.pred, tuple)
    }

    pub fn insert_tuple(&mut self, pred: &str, tuple: Vec<String>) -> bool {
        if let Some(rel) = self.rels.get_mut(pred) {
            rel.insert(tuple)
        } else {
            self.rels.entry(pred.to_owned()).or_default().insert(tuple)
        }
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        let Some(tuple) = atom.tuple() else {
            return false;
        };
        let Some(rel) = self.rels.get_mut(&atom.pred) else {
            return false;
        };
        let removed = rel.remove(&tuple);
        if rel.is_empty() {
            self.rels.remove(&atom.pred);
        }
        removed
    }

    pub fn contains_atom(&self, atom: &Atom) -> bool {
        atom.tuple().is_some_and(|t| self.contains(&atom.pred, &t))
    }

    pub fn len(&self) -> usize {
        self.rels.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rels.is_empty()
    }

    pub fn extend(&mut self, other: &FactSet) {
        for (p, rel) in &other.rels {
            for t in rel {
                self.insert_tuple(p, t.clone());
            }
        }
    }

    /// Atoms in `self` but not in `other`.
    pub fn difference(&self, other: &FactSet) -> FactSet {
        let mut out = FactSet::new();
        for (p, rel) in &self.rels {
            for t in rel {
                if !other.contains(p, t) {
                    out.insert_tuple(p, t.clone());
                }
            }
        }
        out
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.rels.iter().flat_map(|(p, rel)| {
            rel.iter()
                .map(move |t| Atom::new(p.clone(), t.iter().map(Term::constant).collect()))
        })
    }

    pub fn to_atoms(&self) -> BTreeSet<Atom> {
        self.atoms().collect()
    }

    pub fn predicates(&self) -> impl Iterator<Item = &str> {
        self.rels.keys().map(String::as_str)
    }
}

impl FromIterator<Atom> for FactSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        let mut s = FactSet::new();
        for a in iter {
            s.insert(&a);
        }
        s
    }
}

impl<'x> FromIterator<&'x Atom> for FactSet {
    fn from_iter<I: IntoIterator<Item = &'x Atom>>(iter: I) -> Self {
        let mut s = FactSet::new();
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl FactSource for FactSet {
    fn contains(&self, pred: &str, tuple: &[String]) -> bool {
        self.rels.get(pred).is_some_and(|r| r.contains(tuple))
    }

    fn tuples<'a>(&'a self, pred: &str) -> Box<dyn Iterator<Item = &'a [String]> + 'a> {
        match self.rels.get(pred) {
            Some(rel) => Box::new(rel.iter().map(Vec::as_slice)),
            None => Box::new(std::iter::empty()),
        }
    }
}

/// The new state seen through the old one: `(old \ removed) ∪ added`,
/// without materializing it.
#[derive(Debug, Clone, Copy)]
pub struct Overlay<'a> {
    pub base: &'a FactSet,
    pub added: &'a FactSet,
    pub removed: &'a FactSet,
}

impl FactSource for Overlay<'_> {
    fn contains(&self, pred: &str, tuple: &[String]) -> bool {
        self.added.contains(pred, tuple)
            || (self.base.contains(pred, tuple) && !self.removed.contains(pred, tuple))
    }

    fn tuples<'b>(&'b self, pred: &str) -> Box<dyn Iterator<Item = &'b [String]> + 'b> {
        let removed = self.removed;
        let added = self.added;
        let pred_owned = pred.to_owned();
        let pred2 = pred.to_owned();
        Box::new(
            self.base
                .tuples(pred)
                .filter(move |t| !removed.contains(&pred_owned, t) && !added.contains(&pred2, t))
                .chain(self.added.tuples(pred)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_reads_new_state() {
        let base: FactSet = [Atom::ground("p", &["a"]), Atom::ground("p", &["b"])]
            .into_iter()
            .collect();
        let added: FactSet = [Atom::ground("p", &["c"])].into_iter().collect();
        let removed: FactSet = [Atom::ground("p", &["a"])].into_iter().collect();
        let view = Overlay {
            base: &base,
            added: &added,
            removed: &removed,
        };
        let mut seen: Vec<_> = view.tuples("p").map(|t| t[0].clone()).collect();
        seen.sort();
        assert_eq!(seen, vec!["b", "c"]);
        assert!(!view.contains("p", &["a".into()]));
        assert!(view.contains("p", &["c".into()]));
    }

    #[test]
    fn difference_and_remove() {
        let mut a: FactSet = [Atom::ground("p", &["a"]), Atom::ground("q", &["a"])]
            .into_iter()
            .collect();
        let b: FactSet = [Atom::ground("p", &["a"])].into_iter().collect();
        assert_eq!(a.difference(&b).to_atoms().len(), 1);
        assert!(a.remove(&Atom::ground("q", &["a"])));
        assert_eq!(a, b);
    }
}
