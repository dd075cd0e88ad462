//! Seeded random instances for falsification runs.
//!
//! Generation scheme, version 1. Each trial gets its own ChaCha8 stream
//! seeded with `splitmix64(seed ^ splitmix64(trial))`. Draws happen in this
//! order: constants, base predicates, views (when rules are allowed), facts,
//! constraints, update. Changing the order or any distribution bumps
//! [`GEN_SCHEME_VERSION`].

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::{Atom, CmpOp, Denial, IntegrityTheory, Literal, Term};
use crate::store::{Database, Rule, Update};

pub const GEN_SCHEME_VERSION: u32 = 1;

const CONSTANTS: [&str; 26] = [
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p", "q", "r", "s",
    "t", "u", "v", "w", "x", "y", "z",
];
const PREDICATES: [&str; 8] = ["p", "q", "r", "s", "t", "u", "w", "z"];
const VARIABLES: [&str; 3] = ["X", "Y", "Z"];

/// Which family of instances to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schema {
    /// Random schema, facts, denials and update within the bounds.
    Random,
    /// `Γ = {← p(X)}`, `U = insert p(b)`, random `p` facts over the constants.
    Example3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenConfig {
    pub seed: u64,
    /// At least 1 (at least 2 for [`Schema::Example3`]), at most 26.
    pub max_constants: usize,
    /// 1 to 8 base predicates.
    pub max_predicates: usize,
    /// 1 to 4.
    pub max_arity: usize,
    /// Upper bound on stored facts; 0 gives an empty database.
    pub max_facts: usize,
    /// 1 to 16 denials.
    pub max_ics: usize,
    /// 1 to 6 literals per denial.
    pub max_body_literals: usize,
    /// Upper bound on inserted plus deleted facts; 0 gives an empty update.
    pub max_update_facts: usize,
    pub trials: u64,
    pub allow_rules: bool,
    pub schema: Schema,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_constants: 4,
            max_predicates: 3,
            max_arity: 2,
            max_facts: 10,
            max_ics: 3,
            max_body_literals: 3,
            max_update_facts: 3,
            trials: 500,
            allow_rules: false,
            schema: Schema::Random,
        }
    }
}

impl GenConfig {
    pub fn example3(seed: u64, trials: u64) -> Self {
        GenConfig {
            seed,
            trials,
            max_constants: 3,
            schema: Schema::Example3,
            ..GenConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidConfig(msg.to_owned()))
            }
        };
        let min_constants = if self.schema == Schema::Example3 {
            2
        } else {
            1
        };
        check(
            (min_constants..=CONSTANTS.len()).contains(&self.max_constants),
            "max_constants must be between 1 (2 for the example3 schema) and 26",
        )?;
        check(
            (1..=PREDICATES.len()).contains(&self.max_predicates),
            "max_predicates must be between 1 and 8",
        )?;
        check(
            (1..=4).contains(&self.max_arity),
            "max_arity must be between 1 and 4",
        )?;
        check(
            (1..=16).contains(&self.max_ics),
            "max_ics must be between 1 and 16",
        )?;
        check(
            (1..=6).contains(&self.max_body_literals),
            "max_body_literals must be between 1 and 6",
        )?;
        check(self.max_facts <= 10_000, "max_facts must be at most 10000")?;
        check(
            self.max_update_facts <= 1_000,
            "max_update_facts must be at most 1000",
        )?;
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(trial)))
}

/// Deterministic in `(cfg, trial)`.
pub fn generate_instance(
    cfg: &GenConfig,
    trial: u64,
) -> Result<(Database, IntegrityTheory, Update)> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial);
    match cfg.schema {
        Schema::Random => Ok(random_instance(cfg, &mut rng)),
        Schema::Example3 => Ok(example3_instance(cfg, &mut rng)),
    }
}

/// An initial instance plus `steps` updates drawn against the facts seen so
/// far (deletes target facts that may exist by then).
pub fn generate_trace(
    cfg: &GenConfig,
    trial: u64,
    steps: usize,
) -> Result<(Database, IntegrityTheory, Vec<Update>)> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial);
    let gen = RandomSchema::draw(cfg, &mut rng);
    let db = gen.database(cfg, &mut rng);
    let theory = gen.theory(cfg, &mut rng);
    let mut seen: BTreeSet<Atom> = db.facts().clone();
    let mut updates = Vec::with_capacity(steps);
    for _ in 0..steps {
        let u = gen.update(cfg, &seen, &mut rng);
        seen.extend(u.inserts().iter().cloned());
        updates.push(u);
    }
    Ok((db, theory, updates))
}

fn example3_instance(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> (Database, IntegrityTheory, Update) {
    let n = rng.gen_range(2..=cfg.max_constants);
    let facts: Vec<Atom> = CONSTANTS[..n]
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .map(|c| Atom::ground("p", &[*c]))
        .collect();
    let db = Database::from_facts(facts).expect("p/1 facts are well formed");
    let theory = IntegrityTheory::from_denials([Denial::new(vec![Literal::Pos(Atom::new(
        "p",
        vec![Term::var("X")],
    ))])]);
    let u = Update::insert([Atom::ground("p", &["b"])]).expect("ground insert");
    (db, theory, u)
}

fn random_instance(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> (Database, IntegrityTheory, Update) {
    let gen = RandomSchema::draw(cfg, rng);
    let db = gen.database(cfg, rng);
    let theory = gen.theory(cfg, rng);
    let u = gen.update(cfg, db.facts(), rng);
    (db, theory, u)
}

struct RandomSchema {
    constants: Vec<&'static str>,
    base: Vec<(String, usize)>,
    views: Vec<(String, usize)>,
    rules: Vec<Rule>,
}

impl RandomSchema {
    fn draw(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Self {
        let constants = CONSTANTS[..rng.gen_range(1..=cfg.max_constants)].to_vec();
        let base: Vec<(String, usize)> = PREDICATES[..rng.gen_range(1..=cfg.max_predicates)]
            .iter()
            .map(|p| (p.to_string(), rng.gen_range(1..=cfg.max_arity)))
            .collect();
        let mut schema = RandomSchema {
            constants,
            base,
            views: Vec::new(),
            rules: Vec::new(),
        };
        if cfg.allow_rules {
            let n_views = rng.gen_range(0..=2);
            for i in 0..n_views {
                let name = format!("view{i}");
                let arity = rng.gen_range(1..=cfg.max_arity);
                schema.views.push((name.clone(), arity));
                for _ in 0..rng.gen_range(1..=2) {
                    let rule = schema.random_rule(&name, arity, i, rng);
                    schema.rules.push(rule);
                }
            }
        }
        schema
    }

    fn term(&self, rng: &mut ChaCha8Rng, const_prob: f64) -> Term {
        if rng.gen_bool(const_prob) {
            Term::constant(*self.constants.choose(rng).unwrap())
        } else {
            Term::var(*VARIABLES.choose(rng).unwrap())
        }
    }

    fn atom_over(&self, pred: &(String, usize), rng: &mut ChaCha8Rng, const_prob: f64) -> Atom {
        Atom::new(
            pred.0.clone(),
            (0..pred.1).map(|_| self.term(rng, const_prob)).collect(),
        )
    }

    fn ground_atom(&self, rng: &mut ChaCha8Rng) -> Atom {
        let (p, n) = self.base.choose(rng).unwrap();
        Atom::new(
            p.clone(),
            (0..*n)
                .map(|_| Term::constant(*self.constants.choose(rng).unwrap()))
                .collect(),
        )
    }

    /// A rule for view `index`: positive literals over base predicates,
    /// earlier views and the view itself, optionally one negated base or
    /// earlier-view literal. Always stratifiable.
    fn random_rule(&self, name: &str, arity: usize, index: usize, rng: &mut ChaCha8Rng) -> Rule {
        let lower: Vec<(String, usize)> = self
            .base
            .iter()
            .chain(&self.views[..index])
            .cloned()
            .collect();
        let mut body = vec![Literal::Pos(self.atom_over(
            lower.choose(rng).unwrap(),
            rng,
            0.1,
        ))];
        if rng.gen_bool(0.5) {
            let pool: Vec<(String, usize)> = lower
                .iter()
                .cloned()
                .chain([(name.to_owned(), arity)])
                .collect();
            body.push(Literal::Pos(self.atom_over(
                pool.choose(rng).unwrap(),
                rng,
                0.1,
            )));
        }
        let bound: Vec<String> = crate::logic::body_vars(&body);
        let head_term = |rng: &mut ChaCha8Rng| match bound.choose(rng) {
            Some(v) if rng.gen_bool(0.9) => Term::var(v.clone()),
            _ => Term::constant(*self.constants.choose(rng).unwrap()),
        };
        let head = Atom::new(
            name.to_owned(),
            (0..arity).map(|_| head_term(rng)).collect(),
        );
        if !bound.is_empty() && rng.gen_bool(0.3) {
            let target = lower.choose(rng).unwrap();
            let args = (0..target.1)
                .map(|_| {
                    if rng.gen_bool(0.7) {
                        Term::var(bound.choose(rng).unwrap().clone())
                    } else {
                        Term::constant(*self.constants.choose(rng).unwrap())
                    }
                })
                .collect();
            body.push(Literal::Neg(Atom::new(target.0.clone(), args)));
        }
        Rule::new(head, body).expect("generated rules are range-restricted")
    }

    fn database(&self, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Database {
        let n = rng.gen_range(0..=cfg.max_facts);
        let facts: BTreeSet<Atom> = (0..n).map(|_| self.ground_atom(rng)).collect();
        Database::new(facts, self.rules.clone()).expect("generated databases are well formed")
    }

    fn theory(&self, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> IntegrityTheory {
        let all: Vec<(String, usize)> = self.base.iter().chain(&self.views).cloned().collect();
        let n = rng.gen_range(1..=cfg.max_ics);
        IntegrityTheory::from_denials((0..n).map(|_| self.denial(cfg, &all, rng)))
    }

    fn denial(&self, cfg: &GenConfig, preds: &[(String, usize)], rng: &mut ChaCha8Rng) -> Denial {
        let len = rng.gen_range(1..=cfg.max_body_literals);
        let mut body: Vec<Literal> = (0..len)
            .map(|_| Literal::Pos(self.atom_over(preds.choose(rng).unwrap(), rng, 0.25)))
            .collect();
        // Sometimes turn the last literal into a negation or a comparison over
        // variables the remaining positive literals bind.
        if len >= 2 && rng.gen_bool(0.35) {
            let bound = crate::logic::body_vars(&body[..len - 1]);
            if !bound.is_empty() {
                let pick = |rng: &mut ChaCha8Rng| Term::var(bound.choose(rng).unwrap().clone());
                body[len - 1] = if rng.gen_bool(0.5) {
                    let target = preds.choose(rng).unwrap();
                    let args = (0..target.1)
                        .map(|_| {
                            if rng.gen_bool(0.8) {
                                pick(rng)
                            } else {
                                Term::constant(*self.constants.choose(rng).unwrap())
                            }
                        })
                        .collect();
                    Literal::Neg(Atom::new(target.0.clone(), args))
                } else {
                    let rhs = if rng.gen_bool(0.5) {
                        pick(rng)
                    } else {
                        Term::constant(*self.constants.choose(rng).unwrap())
                    };
                    Literal::Cmp(CmpOp::Neq, pick(rng), rhs)
                };
            }
        }
        Denial::new(body)
    }

    fn update(&self, cfg: &GenConfig, facts: &BTreeSet<Atom>, rng: &mut ChaCha8Rng) -> Update {
        if cfg.max_update_facts == 0 {
            return Update::empty();
        }
        let n = rng.gen_range(1..=cfg.max_update_facts);
        let existing: Vec<&Atom> = facts.iter().collect();
        let mut inserts = BTreeSet::new();
        let mut deletes = BTreeSet::new();
        for _ in 0..n {
            if !existing.is_empty() && rng.gen_bool(0.4) {
                let a = (*existing.choose(rng).unwrap()).clone();
                if !inserts.contains(&a) {
                    deletes.insert(a);
                }
            } else {
                let a = self.ground_atom(rng);
                if !deletes.contains(&a) {
                    inserts.insert(a);
                }
            }
        }
        Update::new(inserts, deletes).expect("generated updates are disjoint and ground")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::is_range_restricted;
    use crate::store::{holds_theory, stratify};

    #[test]
    fn deterministic_per_trial() {
        let cfg = GenConfig::default();
        assert_eq!(
            generate_instance(&cfg, 7).unwrap(),
            generate_instance(&cfg, 7).unwrap()
        );
        assert_ne!(
            generate_instance(&cfg, 7).unwrap(),
            generate_instance(&cfg, 8).unwrap()
        );
    }

    #[test]
    fn no_facts_bound() {
        let cfg = GenConfig {
            max_facts: 0,
            ..GenConfig::default()
        };
        for t in 0..20 {
            let (d, _, _) = generate_instance(&cfg, t).unwrap();
            assert!(d.facts().is_empty());
        }
    }

    #[test]
    fn invalid_bounds() {
        let cfg = GenConfig {
            max_constants: 0,
            ..GenConfig::default()
        };
        assert!(matches!(
            generate_instance(&cfg, 0),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn well_formed_with_rules() {
        let cfg = GenConfig {
            allow_rules: true,
            ..GenConfig::default()
        };
        for t in 0..200 {
            let (d, g, u) = generate_instance(&cfg, t).unwrap();
            stratify(d.rules()).unwrap();
            for w in g.denials().unwrap() {
                assert!(is_range_restricted(&w.body));
            }
            for a in u.inserts().iter().chain(u.deletes()) {
                assert!(!d.is_derived(&a.pred));
            }
            crate::store::check_schema(&d, &g, Some(&u)).unwrap();
        }
    }

    #[test]
    fn both_consistent_and_inconsistent_states() {
        let cfg = GenConfig::default();
        let consistent = (0..500)
            .filter(|&t| {
                let (d, g, _) = generate_instance(&cfg, t).unwrap();
                holds_theory(&d, &g).unwrap().0
            })
            .count();
        assert!(consistent >= 100, "consistent {consistent}/500");
        assert!(
            500 - consistent >= 100,
            "inconsistent {}/500",
            500 - consistent
        );
    }
}
