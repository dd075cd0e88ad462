use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::database::Rule;
use crate::error::{Error, Result};
use crate::logic::Literal;

/// Assignment of predicates to strata. Base predicates live in stratum 0 and
/// derived ones start at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strata {
    levels: BTreeMap<String, usize>,
}

impl Strata {
    pub fn of(&self, pred: &str) -> usize {
        self.levels.get(pred).copied().unwrap_or(0)
    }

    pub fn max(&self) -> usize {
        self.levels.values().copied().max().unwrap_or(0)
    }

    /// Predicates grouped by stratum, ascending.
    pub fn layers(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.max() + 1];
        for (p, &s) in &self.levels {
            out[s].push(p.clone());
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.levels.iter().map(|(p, s)| (p.as_str(), *s))
    }
}

/// Stratifies a rule set, or reports predicates that recurse through negation.
pub fn stratify(rules: &[Rule]) -> Result<Strata> {
    let derived: BTreeSet<&str> = rules.iter().map(|r| r.head.pred.as_str()).collect();
    let mut levels: BTreeMap<String, usize> = BTreeMap::new();
    for r in rules {
        for a in r.body.iter().filter_map(Literal::atom) {
            levels.entry(a.pred.clone()).or_insert(0);
        }
    }
    for d in &derived {
        levels.insert((*d).to_owned(), 1);
    }

    // (from, to, negative): head depends on body predicate
    let edges: Vec<(&str, &str, bool)> = rules
        .iter()
        .flat_map(|r| {
            r.body.iter().filter_map(move |l| match l {
                Literal::Pos(a) => Some((a.pred.as_str(), r.head.pred.as_str(), false)),
                Literal::Neg(a) => Some((a.pred.as_str(), r.head.pred.as_str(), true)),
                Literal::Cmp(..) => None,
            })
        })
        .collect();

    if let Some(cycle) = negative_cycle(&levels, &edges) {
        return Err(Error::NegativeCycle(cycle));
    }

    // Without a negative cycle this relaxation converges.
    loop {
        let mut changed = false;
        for &(from, to, neg) in &edges {
            let need = levels[from] + usize::from(neg);
            let cur = levels.get_mut(to).unwrap();
            if *cur < need {
                *cur = need;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(Strata { levels })
}

fn negative_cycle(
    levels: &BTreeMap<String, usize>,
    edges: &[(&str, &str, bool)],
) -> Option<Vec<String>> {
    let mut g = DiGraph::<&str, bool>::new();
    let idx: BTreeMap<&str, _> = levels
        .keys()
        .map(|p| (p.as_str(), g.add_node(p.as_str())))
        .collect();
    for &(from, to, neg) in edges {
        g.add_edge(idx[from], idx[to], neg);
    }
    let mut found: Vec<Vec<String>> = Vec::new();
    for scc in tarjan_scc(&g) {
        let members: BTreeSet<_> = scc.iter().copied().collect();
        let has_neg = edges
            .iter()
            .any(|&(f, t, neg)| neg && members.contains(&idx[f]) && members.contains(&idx[t]));
        if has_neg {
            let mut names: Vec<String> = scc.iter().map(|n| g[*n].to_owned()).collect();
            names.sort();
            found.push(names);
        }
    }
    found.sort();
    found.into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Atom, Term};

    fn a(p: &str, vars: &[&str]) -> Atom {
        Atom::new(p, vars.iter().map(|v| Term::var(*v)).collect())
    }

    #[test]
    fn view_sits_above_base() {
        let r = Rule::new(
            a("coauth", &["X", "Y"]),
            vec![
                Literal::Pos(a("pub", &["P", "X"])),
                Literal::Pos(a("pub", &["P", "Y"])),
            ],
        )
        .unwrap();
        let s = stratify(&[r]).unwrap();
        assert_eq!(s.of("pub"), 0);
        assert_eq!(s.of("coauth"), 1);
    }

    #[test]
    fn no_rules() {
        let s = stratify(&[]).unwrap();
        assert_eq!(s.of("p"), 0);
        assert_eq!(s.max(), 0);
    }

    #[test]
    fn self_negation_is_reported() {
        let r = Rule::new(
            a("p", &["X"]),
            vec![Literal::Pos(a("q", &["X"])), Literal::Neg(a("p", &["X"]))],
        )
        .unwrap();
        assert_eq!(stratify(&[r]), Err(Error::NegativeCycle(vec!["p".into()])));
    }

    #[test]
    fn negation_raises_stratum() {
        let r1 = Rule::new(a("v", &["X"]), vec![Literal::Pos(a("e", &["X", "Y"]))]).unwrap();
        let r2 = Rule::new(
            a("w", &["X"]),
            vec![
                Literal::Pos(a("e", &["X", "Y"])),
                Literal::Neg(a("v", &["Y"])),
            ],
        )
        .unwrap();
        let s = stratify(&[r2, r1]).unwrap();
        assert_eq!(s.of("v"), 1);
        assert_eq!(s.of("w"), 2);
        assert_eq!(
            s.layers(),
            vec![vec!["e".to_string()], vec!["v".into()], vec!["w".into()]]
        );
    }
}
