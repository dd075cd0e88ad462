//! Reference implementations used to cross-check the library. Nothing here
//! calls the library's evaluator, joins, unifier or case machinery; only the
//! plain data types are shared.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use ictol::logic::{Atom, CmpOp, Denial, Literal, Term};
use ictol::store::Database;

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

pub fn read_fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub type Binding = BTreeMap<String, String>;

fn ground_term(t: &Term, b: &Binding) -> String {
    match t {
        Term::Const(c) => c.clone(),
        Term::Var(v) => b.get(v).unwrap_or_else(|| panic!("unbound {v}")).clone(),
    }
}

pub fn ground_atom(a: &Atom, b: &Binding) -> Atom {
    Atom::new(
        a.pred.clone(),
        a.args
            .iter()
            .map(|t| Term::Const(ground_term(t, b)))
            .collect(),
    )
}

/// Truth of a body under a total binding of its variables.
pub fn body_true(body: &[Literal], b: &Binding, model: &BTreeSet<Atom>) -> bool {
    body.iter().all(|l| match l {
        Literal::Pos(a) => model.contains(&ground_atom(a, b)),
        Literal::Neg(a) => !model.contains(&ground_atom(a, b)),
        Literal::Cmp(op, x, y) => {
            let (x, y) = (ground_term(x, b), ground_term(y, b));
            match op {
                CmpOp::Eq => x == y,
                CmpOp::Neq => x != y,
            }
        }
    })
}

pub fn vars_of(lits: &[Literal]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for l in lits {
        let terms: Vec<&Term> = match l {
            Literal::Pos(a) | Literal::Neg(a) => a.args.iter().collect(),
            Literal::Cmp(_, x, y) => vec![x, y],
        };
        for t in terms {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
    }
    out
}

/// Every total binding of `vars` over `dom`.
pub fn bindings(vars: &[String], dom: &[String]) -> Vec<Binding> {
    let mut out = vec![Binding::new()];
    for v in vars {
        let mut next = Vec::with_capacity(out.len() * dom.len());
        for b in &out {
            for c in dom {
                let mut b2 = b.clone();
                b2.insert(v.clone(), c.clone());
                next.push(b2);
            }
        }
        out = next;
    }
    out
}

fn atom_consts(a: &Atom, out: &mut BTreeSet<String>) {
    for t in &a.args {
        if let Term::Const(c) = t {
            out.insert(c.clone());
        }
    }
}

pub fn literal_consts(l: &Literal, out: &mut BTreeSet<String>) {
    match l {
        Literal::Pos(a) | Literal::Neg(a) => atom_consts(a, out),
        Literal::Cmp(_, x, y) => {
            for t in [x, y] {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        }
    }
}

pub fn database_consts(d: &Database) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in d.facts() {
        atom_consts(f, &mut out);
    }
    for r in d.rules() {
        atom_consts(&r.head, &mut out);
        for l in &r.body {
            literal_consts(l, &mut out);
        }
    }
    out
}

/// Stratum per derived predicate by relaxation, independent of any graph
/// algorithm. Panics on recursion through negation.
fn naive_strata(d: &Database) -> BTreeMap<String, usize> {
    let mut level: BTreeMap<String, usize> =
        d.rules().iter().map(|r| (r.head.pred.clone(), 1)).collect();
    let limit = level.len() + 2;
    loop {
        let mut changed = false;
        for r in d.rules() {
            for l in &r.body {
                let (q, strict) = match l {
                    Literal::Pos(a) => (&a.pred, false),
                    Literal::Neg(a) => (&a.pred, true),
                    Literal::Cmp(..) => continue,
                };
                let lq = level.get(q).copied().unwrap_or(0);
                let need = lq + usize::from(strict);
                if level[&r.head.pred] < need {
                    level.insert(r.head.pred.clone(), need);
                    changed = true;
                }
            }
        }
        assert!(level.values().all(|&l| l <= limit), "not stratifiable");
        if !changed {
            return level;
        }
    }
}

/// Standard model by naive ground instantiation, stratum by stratum.
pub fn naive_model(d: &Database) -> BTreeSet<Atom> {
    let mut model: BTreeSet<Atom> = d.facts().clone();
    let strata = naive_strata(d);
    let dom: Vec<String> = database_consts(d).into_iter().collect();
    let top = strata.values().copied().max().unwrap_or(0);
    for s in 1..=top {
        let rules: Vec<_> = d
            .rules()
            .iter()
            .filter(|r| strata[&r.head.pred] == s)
            .collect();
        loop {
            let mut new = Vec::new();
            for r in &rules {
                let mut lits = r.body.clone();
                lits.push(Literal::Pos(r.head.clone()));
                let vars = vars_of(&lits);
                for b in bindings(&vars, &dom) {
                    if body_true(&r.body, &b, &model) {
                        let h = ground_atom(&r.head, &b);
                        if !model.contains(&h) {
                            new.push(h);
                        }
                    }
                }
            }
            if new.is_empty() {
                break;
            }
            model.extend(new);
        }
    }
    model
}

/// Ground instances of `w` over `dom` whose body holds, printed as denials.
pub fn violated_ground_cases(
    w: &Denial,
    model: &BTreeSet<Atom>,
    dom: &[String],
) -> BTreeSet<String> {
    let vars = vars_of(&w.body);
    bindings(&vars, dom)
        .into_iter()
        .filter(|b| body_true(&w.body, b, model))
        .map(|b| ground_denial_text(w, &b))
        .collect()
}

pub fn ground_denial_text(w: &Denial, b: &Binding) -> String {
    let lits: Vec<String> = w
        .body
        .iter()
        .map(|l| match l {
            Literal::Pos(a) => ground_atom(a, b).to_string(),
            Literal::Neg(a) => format!("not {}", ground_atom(a, b)),
            Literal::Cmp(op, x, y) => format!(
                "{} {} {}",
                ground_term(x, b),
                op.symbol(),
                ground_term(y, b)
            ),
        })
        .collect();
    format!(":- {}.", lits.join(", "))
}

/// `true` when no denial has a satisfied ground body over `dom`.
pub fn consistent(denials: &[&Denial], model: &BTreeSet<Atom>, dom: &[String]) -> bool {
    denials.iter().all(|w| {
        bindings(&vars_of(&w.body), dom)
            .iter()
            .all(|b| !body_true(&w.body, b, model))
    })
}

/// Applies an update to stored facts: deletions first, then insertions.
pub fn apply_facts(d: &Database, ins: &BTreeSet<Atom>, del: &BTreeSet<Atom>) -> Database {
    let mut facts = d.facts().clone();
    for a in del {
        facts.remove(a);
    }
    facts.extend(ins.iter().cloned());
    Database::new(facts, d.rules().to_vec()).unwrap()
}

/// Canonical form of a conjunction up to literal order and variable names:
/// the least rendering over all literal orders with variables renamed in
/// first-occurrence order.
pub fn canonical_body(body: &[Literal]) -> String {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    let mut best: Option<String> = None;
    for perm in permutations(body.len()) {
        let mut names: BTreeMap<String, String> = BTreeMap::new();
        let mut rename = |t: &Term| match t {
            Term::Const(c) => c.clone(),
            Term::Var(v) => {
                let n = names.len();
                names
                    .entry(v.clone())
                    .or_insert_with(|| format!("V{n}"))
                    .clone()
            }
        };
        let parts: Vec<String> = perm
            .iter()
            .map(|&i| match &body[i] {
                Literal::Pos(a) | Literal::Neg(a) => {
                    let args: Vec<String> = a.args.iter().map(&mut rename).collect();
                    let neg = if matches!(body[i], Literal::Neg(_)) {
                        "not "
                    } else {
                        ""
                    };
                    format!("{neg}{}({})", a.pred, args.join(","))
                }
                Literal::Cmp(op, x, y) => format!("{} {} {}", rename(x), op.symbol(), rename(y)),
            })
            .collect();
        let s = parts.join(", ");
        if best.as_ref().is_none_or(|b| &s < b) {
            best = Some(s);
        }
    }
    best.unwrap_or_default()
}
