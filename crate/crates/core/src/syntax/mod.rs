//! Text formats for databases, theories, updates and update traces.
//!
//! One statement ends at each `.`; `%` starts a comment that runs to the end
//! of the line. Identifiers starting with an uppercase letter or `_` are
//! variables, everything else alphanumeric is a constant or predicate name.
//!
//! ```text
//! % database
//! pub(p1,a).
//! coauth(X,Y) :- pub(P,X), pub(P,Y), X \= Y.
//!
//! % theory
//! @no_self_review :- rev(S,R), sub(S,R).
//! exists p(X).            % only where existentials are enabled
//!
//! % update
//! + sub(c,a).
//! - rev(a,b).
//! ```
//!
//! A trace is a sequence of updates separated by lines consisting of `---`.
//!
//! Parsing collects every error it can find, each with a line and column,
//! and resumes after the next `.`. Printing with `Display` yields text that
//! parses back to an equal value.

mod diag;
mod lexer;
mod parser;

use std::collections::{BTreeMap, BTreeSet};

pub use diag::{Diagnostic, Diagnostics, Location, Severity, SourceFile, SourceKind};
use parser::{parse_statements, Grammar, LAtom, LLiteral, Statement};

use crate::error::Error;
use crate::logic::{Atom, Constraint, Denial, ExistentialConstraint, IntegrityTheory, Literal};
use crate::store::{stratify, Database, Rule, Update};

/// Schema knowledge shared by the files of one run: predicate arities and
/// which predicates are views. Parse the database first so that theories and
/// updates are checked against it.
#[derive(Debug, Clone, Default)]
pub struct Session {
    arities: BTreeMap<String, usize>,
    derived: BTreeSet<String>,
    warnings: Vec<Diagnostic>,
}

/// Diagnostics collected while checking one file.
#[derive(Default)]
struct Sink {
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

impl Sink {
    fn error(&mut self, loc: Location, msg: impl Into<String>) {
        self.errors.push(Diagnostic::error(loc, msg));
    }

    fn warn(&mut self, loc: Location, msg: impl Into<String>) {
        self.warnings.push(Diagnostic::warning(loc, msg));
    }
}

impl Session {
    pub fn new() -> Self {
        Session::default()
    }

    /// Warnings from every file parsed so far.
    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<Diagnostic> {
        std::mem::take(&mut self.warnings)
    }

    fn check_arity(&mut self, a: &LAtom, sink: &mut Sink) {
        match self.arities.get(&a.atom.pred) {
            Some(&n) if n != a.atom.arity() => sink.error(
                a.loc,
                format!(
                    "predicate {} used with arity {}, expected {}",
                    a.atom.pred,
                    a.atom.arity(),
                    n
                ),
            ),
            Some(_) => {}
            None => {
                self.arities.insert(a.atom.pred.clone(), a.atom.arity());
            }
        }
    }

    fn check_body(
        &mut self,
        body: &[LLiteral],
        extra: &[(&str, Location)],
        sink: &mut Sink,
    ) -> bool {
        for l in body {
            if let Some(a) = &l.atom {
                self.check_arity(a, sink);
            }
        }
        let bound: BTreeSet<&str> = body
            .iter()
            .filter(|l| l.lit.is_positive_atom())
            .flat_map(|l| l.vars.iter().map(|(v, _)| v.as_str()))
            .collect();
        let occurrences = extra.iter().copied().chain(
            body.iter()
                .flat_map(|l| l.vars.iter().map(|(v, at)| (v.as_str(), *at))),
        );
        let mut reported = BTreeSet::new();
        for (v, at) in occurrences {
            if !bound.contains(v) && reported.insert(v) {
                sink.error(
                    at,
                    format!("unrestricted variable {v}: it must occur in a positive literal"),
                );
            }
        }
        reported.is_empty()
    }

    fn ground_fact(&mut self, a: &LAtom, sink: &mut Sink) -> bool {
        self.check_arity(a, sink);
        match a.var_occurrences().next() {
            Some((v, at)) => {
                sink.error(at, format!("nonground fact: variable {v}"));
                false
            }
            None => true,
        }
    }

    fn finish<T>(&mut self, value: T, sink: Sink) -> Result<T, Diagnostics> {
        if sink.errors.is_empty() {
            self.warnings.extend(sink.warnings);
            Ok(value)
        } else {
            let mut all = sink.errors;
            all.extend(sink.warnings);
            all.sort_by_key(|d| d.location);
            Err(Diagnostics(all))
        }
    }

    pub fn database(&mut self, text: &str) -> Result<Database, Diagnostics> {
        let (stmts, errors) = parse_statements(text, 1, Grammar::Database);
        let mut sink = Sink {
            errors,
            ..Sink::default()
        };
        let mut facts: Vec<&LAtom> = Vec::new();
        let mut rules: Vec<(Rule, Location)> = Vec::new();
        for s in &stmts {
            let Statement::Clause { head, body } = s else {
                continue;
            };
            match body {
                None => {
                    if self.ground_fact(head, &mut sink) {
                        facts.push(head);
                    }
                }
                Some(body) => {
                    self.check_arity(head, &mut sink);
                    let head_vars: Vec<(&str, Location)> = head.var_occurrences().collect();
                    if self.check_body(body, &head_vars, &mut sink) {
                        let lits = body.iter().map(|l| l.lit.clone()).collect();
                        let rule =
                            Rule::new(head.atom.clone(), lits).expect("range restriction checked");
                        rules.push((rule, head.loc));
                    }
                }
            }
        }
        let derived: BTreeSet<String> = rules.iter().map(|(r, _)| r.head.pred.clone()).collect();
        let mut seen = BTreeSet::new();
        for f in &facts {
            if derived.contains(&f.atom.pred) {
                sink.error(f.loc, format!("fact for derived predicate {}", f.atom.pred));
            } else if !seen.insert(&f.atom) {
                sink.warn(f.loc, format!("duplicate fact {}", f.atom));
            }
        }
        let plain: Vec<Rule> = rules.iter().map(|(r, _)| r.clone()).collect();
        if let Err(Error::NegativeCycle(preds)) = stratify(&plain) {
            let at = rules
                .iter()
                .find(|(r, _)| preds.contains(&r.head.pred))
                .map_or(Location::new(1, 1), |(_, l)| *l);
            sink.error(
                at,
                format!("recursion through negation: {}", preds.join(", ")),
            );
        }
        if !sink.errors.is_empty() {
            return self.finish(Database::default(), sink);
        }
        self.derived.extend(derived);
        let db = Database::new(facts.into_iter().map(|f| f.atom.clone()), plain);
        match db {
            Ok(db) => self.finish(db, sink),
            Err(e) => {
                sink.error(Location::new(1, 1), e.to_string());
                self.finish(Database::default(), sink)
            }
        }
    }

    /// Existential constraints are rejected unless `allow_exists` is set.
    pub fn theory(
        &mut self,
        text: &str,
        allow_exists: bool,
    ) -> Result<IntegrityTheory, Diagnostics> {
        let (stmts, errors) = parse_statements(text, 1, Grammar::Theory);
        let mut sink = Sink {
            errors,
            ..Sink::default()
        };
        let mut out = Vec::new();
        let mut labels: BTreeSet<&str> = BTreeSet::new();
        for s in &stmts {
            match s {
                Statement::Denial { label, body, loc } => {
                    if let Some((l, at)) = label {
                        if !labels.insert(l) {
                            sink.error(*at, format!("duplicate label @{l}"));
                        }
                    }
                    if self.check_body(body, &[], &mut sink) {
                        let d = Denial {
                            body: lits(body),
                            label: label.as_ref().map(|(l, _)| l.clone()),
                        };
                        out.push((Constraint::Denial(d), *loc));
                    }
                }
                Statement::Exists { body, loc } => {
                    if !allow_exists {
                        sink.error(
                            *loc,
                            "existential constraints are not enabled for this input",
                        );
                    } else if self.check_body(body, &[], &mut sink) {
                        out.push((
                            Constraint::Exists(ExistentialConstraint::new(lits(body))),
                            *loc,
                        ));
                    }
                }
                _ => {}
            }
        }
        let mut seen = BTreeSet::new();
        for (c, at) in &out {
            if !seen.insert(c.to_string()) {
                sink.warn(*at, format!("duplicate constraint {c}"));
            }
        }
        self.finish(
            IntegrityTheory::new(out.into_iter().map(|(c, _)| c).collect()),
            sink,
        )
    }

    pub fn update(&mut self, text: &str) -> Result<Update, Diagnostics> {
        self.update_from(text, 1)
    }

    fn update_from(&mut self, text: &str, first_line: u32) -> Result<Update, Diagnostics> {
        let (stmts, errors) = parse_statements(text, first_line, Grammar::Update);
        let mut sink = Sink {
            errors,
            ..Sink::default()
        };
        let mut entries: BTreeMap<Atom, bool> = BTreeMap::new();
        for s in &stmts {
            let Statement::Entry { insert, atom } = s else {
                continue;
            };
            if !self.ground_fact(atom, &mut sink) {
                continue;
            }
            if self.derived.contains(&atom.atom.pred) {
                sink.error(
                    atom.loc,
                    format!("cannot update derived predicate {}", atom.atom.pred),
                );
                continue;
            }
            match entries.get(&atom.atom) {
                Some(prev) if prev == insert => {
                    sink.error(atom.loc, format!("duplicate entry for {}", atom.atom))
                }
                Some(_) => sink.error(atom.loc, format!("conflicting entries for {}", atom.atom)),
                None => {
                    entries.insert(atom.atom.clone(), *insert);
                }
            }
        }
        let (ins, del): (Vec<_>, Vec<_>) = entries.into_iter().partition(|(_, i)| *i);
        let u = Update::new(
            ins.into_iter().map(|(a, _)| a),
            del.into_iter().map(|(a, _)| a),
        );
        match u {
            Ok(u) => self.finish(u, sink),
            Err(e) => {
                sink.error(Location::new(first_line, 1), e.to_string());
                self.finish(Update::empty(), sink)
            }
        }
    }

    /// Updates separated by `---` lines. A file without statements or
    /// separators is the empty trace.
    pub fn trace(&mut self, text: &str) -> Result<Vec<Update>, Diagnostics> {
        let mut sections: Vec<(u32, String)> = vec![(1, String::new())];
        for (i, line) in text.lines().enumerate() {
            if line.trim() == "---" {
                sections.push((i as u32 + 2, String::new()));
            } else {
                let cur = &mut sections.last_mut().unwrap().1;
                cur.push_str(line);
                cur.push('\n');
            }
        }
        let mut out = Vec::new();
        let mut diags = Vec::new();
        for (first, body) in &sections {
            match self.update_from(body, *first) {
                Ok(u) => out.push(u),
                Err(d) => diags.extend(d.0),
            }
        }
        if !diags.is_empty() {
            return Err(Diagnostics(diags));
        }
        if sections.len() == 1 && out[0].is_empty() {
            out.clear();
        }
        Ok(out)
    }
}

fn lits(body: &[LLiteral]) -> Vec<Literal> {
    body.iter().map(|l| l.lit.clone()).collect()
}

pub fn parse_database(text: &str) -> Result<Database, Diagnostics> {
    Session::new().database(text)
}

pub fn parse_theory(text: &str, allow_exists: bool) -> Result<IntegrityTheory, Diagnostics> {
    Session::new().theory(text, allow_exists)
}

pub fn parse_update(text: &str) -> Result<Update, Diagnostics> {
    Session::new().update(text)
}

pub fn parse_trace(text: &str) -> Result<Vec<Update>, Diagnostics> {
    Session::new().trace(text)
}

/// Inverse of [`parse_trace`].
pub fn print_trace(updates: &[Update]) -> String {
    let parts: Vec<String> = updates.iter().map(ToString::to_string).collect();
    parts.join("---\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_error(r: Result<impl std::fmt::Debug, Diagnostics>) -> String {
        r.unwrap_err().errors().next().unwrap().to_string()
    }

    #[test]
    fn fact_and_rule() {
        let d = parse_database("pub(p1,a).\ncoauth(X,Y) :- pub(P,X), pub(P,Y).").unwrap();
        assert_eq!(d.facts().len(), 1);
        assert_eq!(d.rules().len(), 1);
    }

    #[test]
    fn nonground_fact_location() {
        assert_eq!(
            first_error(parse_database("p(X).")),
            "1:3: error: nonground fact: variable X"
        );
    }

    #[test]
    fn unrestricted_denial() {
        assert_eq!(
            first_error(parse_theory(":- not p(X).", false)),
            "1:10: error: unrestricted variable X: it must occur in a positive literal"
        );
    }

    #[test]
    fn unrestricted_head_variable() {
        assert_eq!(
            first_error(parse_database("v(X,Y) :- p(X).")),
            "1:5: error: unrestricted variable Y: it must occur in a positive literal"
        );
    }

    #[test]
    fn several_errors_per_file() {
        let e = parse_database("p(X).\nq(a,b).\nq(a).\nr(Y) :- not s(Y).").unwrap_err();
        let shown: Vec<_> = e.errors().map(|d| d.location.to_string()).collect();
        assert_eq!(shown, ["1:3", "3:1", "4:3"]);
    }

    #[test]
    fn negation_cycle() {
        let e =
            parse_database("p(a).\nw(X) :- p(X), not v(X).\nv(X) :- p(X), not w(X).").unwrap_err();
        assert_eq!(
            e.0[0].to_string(),
            "2:1: error: recursion through negation: v, w"
        );
    }

    #[test]
    fn facts_for_views_rejected() {
        assert_eq!(
            first_error(parse_database("v(a).\nv(X) :- p(X).")),
            "1:1: error: fact for derived predicate v"
        );
    }

    #[test]
    fn example_theory() {
        let g = parse_theory(
            ":- rev(S,R), sub(S,R).\n:- rev(S,R), sub(S,A), pub(P,R), pub(P,A).",
            false,
        )
        .unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(
            g.to_string(),
            ":- rev(S,R), sub(S,R).\n:- rev(S,R), sub(S,A), pub(P,R), pub(P,A).\n"
        );
    }

    #[test]
    fn existentials_need_the_flag() {
        assert!(parse_theory("exists p(X).", false).is_err());
        assert!(parse_theory("exists p(X).", true).is_ok());
    }

    #[test]
    fn updates() {
        let u = parse_update("+ sub(c,a).\n+ rev(c,b).").unwrap();
        assert_eq!(u.inserts().len(), 2);
        assert!(parse_update("").unwrap().is_empty());
        assert_eq!(
            first_error(parse_update("+ p(a).\n- p(a).")),
            "2:3: error: conflicting entries for p(a)"
        );
        assert_eq!(
            first_error(parse_update("+ p(a).\n+ p(a).")),
            "2:3: error: duplicate entry for p(a)"
        );
    }

    #[test]
    fn session_checks_update_against_database() {
        let mut s = Session::new();
        s.database("p(a).\nv(X) :- p(X).").unwrap();
        assert_eq!(
            first_error(s.update("+ v(b).")),
            "1:3: error: cannot update derived predicate v"
        );
        assert_eq!(
            first_error(s.update("\n+ p(a,b).")),
            "2:3: error: predicate p used with arity 2, expected 1"
        );
    }

    #[test]
    fn duplicate_fact_warns() {
        let mut s = Session::new();
        s.database("p(a).\np(a).").unwrap();
        assert_eq!(
            s.warnings()[0].to_string(),
            "2:1: warning: duplicate fact p(a)"
        );
    }

    #[test]
    fn traces() {
        let t = parse_trace("+ p(a).\n---\n- p(a).\n+ p(b).\n---\n").unwrap();
        assert_eq!(t.len(), 3);
        assert!(t[2].is_empty());
        assert_eq!(parse_trace(&print_trace(&t)).unwrap(), t);
        assert!(parse_trace("% nothing\n").unwrap().is_empty());
        let e = parse_trace("+ p(a).\n---\n+ p(X).").unwrap_err();
        assert_eq!(e.0[0].location, Location::new(3, 5));
    }
}
