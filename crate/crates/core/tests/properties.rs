mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{bindings, body_true, naive_model, vars_of};
use ictol::lab::{generate_instance, violated_cases, GenConfig};
use ictol::logic::{
    apply, make_case, subsumes, unify, Atom, CmpOp, Constraint, Denial, ExistentialConstraint,
    IntegrityTheory, Literal, Substitution, Term,
};
use ictol::store::{holds, standard_model, Database, Update};
use ictol::syntax::{parse_database, parse_theory, parse_trace, parse_update, print_trace};

const CONSTS: [&str; 5] = ["a", "b", "c", "not", "exists"];
const VARS: [&str; 4] = ["X", "Y", "Z", "_G0"];

fn constant() -> BoxedStrategy<Term> {
    prop::sample::select(&CONSTS[..])
        .prop_map(Term::constant)
        .boxed()
}

fn term() -> BoxedStrategy<Term> {
    prop_oneof![
        constant(),
        prop::sample::select(&VARS[..]).prop_map(Term::var)
    ]
    .boxed()
}

fn pred_and_arity() -> impl Strategy<Value = (&'static str, usize)> {
    prop::sample::select(vec![("p", 1), ("q", 2), ("r", 0), ("not", 1)])
}

fn atom_with(t: BoxedStrategy<Term>) -> impl Strategy<Value = Atom> {
    pred_and_arity().prop_flat_map(move |(p, n)| {
        prop::collection::vec(t.clone(), n).prop_map(move |args| Atom::new(p, args))
    })
}

fn atom() -> impl Strategy<Value = Atom> {
    atom_with(term())
}

fn ground_atom() -> impl Strategy<Value = Atom> {
    atom_with(constant())
}

/// Range-restricted bodies: positive atoms, then negations and comparisons
/// over variables those atoms bind.
fn body() -> impl Strategy<Value = Vec<Literal>> {
    (
        prop::collection::vec(atom(), 1..4),
        prop::collection::vec((any::<bool>(), atom(), term(), any::<bool>()), 0..2),
    )
        .prop_map(|(pos, extra)| {
            let mut body: Vec<Literal> = pos.into_iter().map(Literal::Pos).collect();
            let bound: Vec<String> = vars_of(&body);
            let fix = |t: Term| match t {
                Term::Var(v) if !bound.contains(&v) => bound
                    .first()
                    .map_or(Term::constant("a"), |b| Term::var(b.clone())),
                t => t,
            };
            for (neg, a, t, eq) in extra {
                if neg {
                    let args = a.args.into_iter().map(fix).collect();
                    body.push(Literal::Neg(Atom::new(a.pred, args)));
                } else {
                    let lhs = bound
                        .first()
                        .map_or(Term::constant("b"), |b| Term::var(b.clone()));
                    let op = if eq { CmpOp::Eq } else { CmpOp::Neq };
                    body.push(Literal::Cmp(op, lhs, fix(t)));
                }
            }
            body
        })
}

fn ground_substitution(vars: &[String], seed: &[usize]) -> Substitution {
    Substitution::from_pairs(
        vars.iter()
            .zip(seed.iter().cycle())
            .map(|(v, i)| (v.clone(), Term::constant(CONSTS[i % 3]))),
    )
}

fn all_vars(atoms: &[&Atom]) -> Vec<String> {
    let lits: Vec<Literal> = atoms.iter().map(|a| Literal::Pos((*a).clone())).collect();
    vars_of(&lits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn unifier_is_most_general(a in atom(), b in atom()) {
        let vars = all_vars(&[&a, &b]);
        let dom: Vec<String> = ["a", "b", "c", "not", "exists", "fresh"].map(String::from).to_vec();
        let ground_unifiers: Vec<Substitution> = bindings(&vars, &dom)
            .into_iter()
            .map(|b| Substitution::from_pairs(b.into_iter().map(|(v, c)| (v, Term::constant(c)))))
            .filter(|t| apply(&a, t) == apply(&b, t))
            .collect();
        match unify(&a, &b) {
            Some(s) => {
                prop_assert_eq!(apply(&a, &s), apply(&b, &s));
                prop_assert!(s.is_idempotent());
                // every ground unifier factors through s
                for t in &ground_unifiers {
                    prop_assert_eq!(apply(&apply(&a, &s), t), apply(&a, t));
                }
            }
            None => prop_assert!(ground_unifiers.is_empty()),
        }
    }

    #[test]
    fn composition_applies_in_sequence(a in atom(), s1 in prop::collection::vec(0usize..5, 4), s2 in prop::collection::vec(0usize..5, 4)) {
        let s = Substitution::from_pairs([("X", Term::var("Y")), ("Z", Term::constant(CONSTS[s1[0]]))]);
        let vars: Vec<String> = VARS.iter().map(|v| v.to_string()).collect();
        let t = ground_substitution(&vars, &s2);
        prop_assert_eq!(apply(&a, &s.compose(&t)), apply(&apply(&a, &s), &t));
        prop_assert_eq!(apply(&a, &Substitution::new()), a.clone());
    }

    #[test]
    fn case_conditions(b in body(), picks in prop::collection::vec((0usize..4, prop::option::of(0usize..4)), 0..3)) {
        let w = Denial::new(b);
        let globals: BTreeSet<String> = w.vars().into_iter().collect();
        let sigma = Substitution::from_pairs(picks.iter().map(|&(v, img)| {
            let t = match img {
                Some(i) => Term::var(VARS[i]),
                None => Term::constant("c"),
            };
            (VARS[v], t)
        }));
        let range_ok = sigma.range().is_subset(&globals);
        let image_ok = sigma.image_vars().is_disjoint(&globals);
        match make_case(&w, &sigma) {
            Ok(case) => {
                prop_assert!(range_ok && image_ok);
                prop_assert_eq!(case.result, apply(&w, &sigma));
            }
            Err(_) => prop_assert!(!(range_ok && image_ok)),
        }
    }

    #[test]
    fn denial_and_existential_are_dual(b in body(), facts in prop::collection::btree_set(ground_atom(), 0..8)) {
        let d = Database::from_facts(facts.clone());
        prop_assume!(d.is_ok());
        let d = d.unwrap();
        let denial = holds(&d, &Constraint::Denial(Denial::new(b.clone()))).unwrap();
        let exists = holds(&d, &Constraint::Exists(ExistentialConstraint::new(b.clone()))).unwrap();
        prop_assert_ne!(denial, exists);
        // and the independent evaluation agrees
        let dom: Vec<String> = CONSTS.iter().map(|c| c.to_string()).collect();
        let model = naive_model(&d);
        let some = bindings(&vars_of(&b), &dom).iter().any(|s| body_true(&b, s, &model));
        prop_assert_eq!(exists, some);
    }

    #[test]
    fn subsumption_is_reflexive_and_respects_instances(b in body(), picks in prop::collection::vec(0usize..5, 4)) {
        let w = Denial::new(b);
        prop_assert!(subsumes(&w, &w));
        let g = ground_substitution(&w.vars(), &picks);
        prop_assert!(subsumes(&w, &apply(&w, &g)));
    }

    #[test]
    fn theory_round_trip(bodies in prop::collection::vec((body(), any::<bool>(), any::<bool>()), 0..5)) {
        let cs: Vec<Constraint> = bodies
            .into_iter()
            .enumerate()
            .map(|(i, (b, exists, labelled))| {
                if exists {
                    Constraint::Exists(ExistentialConstraint::new(b))
                } else if labelled {
                    Constraint::Denial(Denial::labelled(b, format!("c{i}")))
                } else {
                    Constraint::Denial(Denial::new(b))
                }
            })
            .collect();
        let g = IntegrityTheory::new(cs);
        let back = parse_theory(&g.to_string(), true);
        prop_assert!(back.is_ok(), "{}\n{}", g, back.unwrap_err());
        prop_assert_eq!(back.unwrap(), g);
    }

    #[test]
    fn database_and_update_round_trip(facts in prop::collection::btree_set(ground_atom(), 0..8), ins in prop::collection::btree_set(ground_atom(), 0..4), del in prop::collection::btree_set(ground_atom(), 0..4)) {
        if let Ok(d) = Database::from_facts(facts) {
            prop_assert_eq!(parse_database(&d.to_string()).unwrap(), d);
        }
        let del: BTreeSet<Atom> = del.difference(&ins).cloned().collect();
        let u = Update::new(ins, del).unwrap();
        if parse_update(&u.to_string()).is_ok() {
            prop_assert_eq!(parse_update(&u.to_string()).unwrap(), u.clone());
        }
        let trace = vec![u.clone(), Update::empty(), u];
        prop_assert_eq!(parse_trace(&print_trace(&trace)).unwrap(), trace);
    }

    #[test]
    fn measure_ratio_in_unit_interval(trial in 0u64..200) {
        let cfg = GenConfig { seed: 11, allow_rules: true, ..GenConfig::default() };
        let (d, g, _) = generate_instance(&cfg, trial).unwrap();
        let m = violated_cases(&d, &g).unwrap();
        prop_assert!((0.0..=1.0).contains(&m.ratio));
        prop_assert!(m.violated_cases.len() as u64 <= m.total_cases);
        prop_assert_eq!(violated_cases(&d, &g).unwrap(), m);
    }

    #[test]
    fn semi_naive_matches_naive(trial in 0u64..1000) {
        let cfg = GenConfig { seed: 3, allow_rules: true, max_facts: 12, ..GenConfig::default() };
        let (d, _, _) = generate_instance(&cfg, trial).unwrap();
        prop_assert_eq!(standard_model(&d).unwrap().to_atoms(), naive_model(&d));
    }
}
