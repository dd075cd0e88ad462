//! Nested-loop conjunctive query evaluation with early filtering.
//!
//! Positive atoms are scanned in body order. Negated atoms and comparisons are
//! checked as soon as their variables are bound, which range restriction
//! guarantees happens by the last positive atom.

use std::ops::ControlFlow;

use super::model::FactSource;
use crate::logic::{body_vars, CmpOp, Literal, Substitution, Term};

#[derive(Debug, Clone, Copy)]
enum Arg<'b> {
    /// Compare against an already bound variable.
    Var(usize),
    /// First occurrence: bind the variable.
    Bind(usize),
    Const(&'b str),
}

#[derive(Debug)]
enum Check<'b> {
    Neg(&'b str, Vec<Arg<'b>>),
    Cmp(CmpOp, Arg<'b>, Arg<'b>),
}

#[derive(Debug)]
struct Scan<'b> {
    literal: usize,
    pred: &'b str,
    args: Vec<Arg<'b>>,
    then: Vec<Check<'b>>,
}

/// A compiled conjunctive body.
#[derive(Debug)]
pub struct Plan<'b> {
    vars: Vec<String>,
    upfront: Vec<Check<'b>>,
    scans: Vec<Scan<'b>>,
}

impl<'b> Plan<'b> {
    /// Compiles a range-restricted body.
    pub fn new(body: &'b [Literal]) -> Self {
        let vars = body_vars(body);
        let slot = |t: &'b Term| match t {
            Term::Var(v) => Arg::Var(vars.iter().position(|x| x == v).unwrap()),
            Term::Const(c) => Arg::Const(c.as_str()),
        };
        let mut scans = Vec::new();
        let mut checks = Vec::new();
        for (i, lit) in body.iter().enumerate() {
            match lit {
                Literal::Pos(a) => scans.push(Scan {
                    literal: i,
                    pred: &a.pred,
                    args: a.args.iter().map(slot).collect(),
                    then: Vec::new(),
                }),
                Literal::Neg(a) => {
                    checks.push(Check::Neg(&a.pred, a.args.iter().map(slot).collect()))
                }
                Literal::Cmp(op, l, r) => checks.push(Check::Cmp(*op, slot(l), slot(r))),
            }
        }
        // Attach every check after the first scan that binds all its variables.
        let mut bound = vec![false; vars.len()];
        let mut upfront = Vec::new();
        let mut pending: Vec<Option<Check<'b>>> = checks.into_iter().map(Some).collect();
        let place =
            |pending: &mut Vec<Option<Check<'b>>>, bound: &[bool], dst: &mut Vec<Check<'b>>| {
                for slot in pending.iter_mut() {
                    let ready = slot
                        .as_ref()
                        .is_some_and(|c| check_vars(c).all(|v| bound[v]));
                    if ready {
                        dst.push(slot.take().unwrap());
                    }
                }
            };
        place(&mut pending, &bound, &mut upfront);
        for scan in &mut scans {
            for a in &mut scan.args {
                if let Arg::Var(v) = *a {
                    if !bound[v] {
                        bound[v] = true;
                        *a = Arg::Bind(v);
                    }
                }
            }
            place(&mut pending, &bound, &mut scan.then);
        }
        assert!(
            pending.iter().all(Option::is_none),
            "body is not range-restricted"
        );
        Plan {
            vars,
            upfront,
            scans,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Enumerates satisfying assignments. `source_for(i)` picks the relation
    /// that positive literal `i` is read from; negated atoms read `negated`.
    /// The callback can stop the search early.
    pub fn for_each<'s>(
        &self,
        source_for: &dyn Fn(usize) -> &'s dyn FactSource,
        negated: &'s dyn FactSource,
        emit: &mut dyn FnMut(&[&'s str]) -> ControlFlow<()>,
    ) where
        'b: 's,
    {
        let mut env: Vec<&'s str> = vec![""; self.vars.len()];
        if !self.upfront.iter().all(|c| run_check(c, &env, negated)) {
            return;
        }
        let _ = self.step(0, &mut env, source_for, negated, emit);
    }

    fn step<'s>(
        &self,
        k: usize,
        env: &mut Vec<&'s str>,
        source_for: &dyn Fn(usize) -> &'s dyn FactSource,
        negated: &'s dyn FactSource,
        emit: &mut dyn FnMut(&[&'s str]) -> ControlFlow<()>,
    ) -> ControlFlow<()>
    where
        'b: 's,
    {
        let Some(scan) = self.scans.get(k) else {
            return emit(env);
        };
        for tuple in source_for(scan.literal).tuples(scan.pred) {
            if tuple.len() != scan.args.len() {
                continue;
            }
            let mut ok = true;
            for (arg, val) in scan.args.iter().zip(tuple) {
                match arg {
                    Arg::Const(c) => ok = *c == val,
                    Arg::Var(v) => ok = env[*v] == val,
                    Arg::Bind(v) => env[*v] = val.as_str(),
                }
                if !ok {
                    break;
                }
            }
            if ok && scan.then.iter().all(|c| run_check(c, env, negated)) {
                self.step(k + 1, env, source_for, negated, emit)?;
            }
        }
        ControlFlow::Continue(())
    }

    /// All answers as substitutions over the body variables, deduplicated.
    pub fn answers(&self, source: &dyn FactSource, negated: &dyn FactSource) -> Vec<Substitution> {
        let mut seen = std::collections::BTreeSet::new();
        self.for_each(&|_| source, negated, &mut |env| {
            seen.insert(env.iter().map(|s| s.to_string()).collect::<Vec<_>>());
            ControlFlow::Continue(())
        });
        seen.into_iter()
            .map(|vals| {
                Substitution::from_pairs(
                    self.vars
                        .iter()
                        .cloned()
                        .zip(vals.into_iter().map(Term::Const)),
                )
            })
            .collect()
    }

    pub fn any(&self, source: &dyn FactSource) -> bool {
        let mut found = false;
        self.for_each(&|_| source, source, &mut |_| {
            found = true;
            ControlFlow::Break(())
        });
        found
    }
}

fn check_vars<'c>(c: &'c Check<'_>) -> Box<dyn Iterator<Item = usize> + 'c> {
    let of = |a: &Arg<'_>| match a {
        Arg::Var(v) | Arg::Bind(v) => Some(*v),
        Arg::Const(_) => None,
    };
    match c {
        Check::Neg(_, args) => Box::new(args.iter().filter_map(of)),
        Check::Cmp(_, l, r) => Box::new([of(l), of(r)].into_iter().flatten()),
    }
}

fn resolve<'s>(a: &Arg<'s>, env: &[&'s str]) -> &'s str {
    match a {
        Arg::Var(v) | Arg::Bind(v) => env[*v],
        Arg::Const(c) => c,
    }
}

fn run_check<'s>(c: &Check<'s>, env: &[&'s str], negated: &dyn FactSource) -> bool {
    match c {
        Check::Neg(pred, args) => {
            let tuple: Vec<String> = args.iter().map(|a| resolve(a, env).to_owned()).collect();
            !negated.contains(pred, &tuple)
        }
        Check::Cmp(op, l, r) => op.eval(resolve(l, env), resolve(r, env)),
    }
}
