//! Token-level statement parser. Semantic checks live in the session.

use super::diag::{Diagnostic, Location};
use super::lexer::{lex, Tok, Token};
use crate::logic::{Atom, CmpOp, Literal, Term};

#[derive(Debug, Clone)]
pub(crate) struct LAtom {
    pub atom: Atom,
    pub loc: Location,
    /// Argument positions, parallel to `atom.args`.
    pub arg_locs: Vec<Location>,
}

impl LAtom {
    pub(crate) fn var_occurrences(&self) -> impl Iterator<Item = (&str, Location)> {
        self.atom
            .args
            .iter()
            .zip(&self.arg_locs)
            .filter_map(|(t, l)| t.as_var().map(|v| (v, *l)))
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LLiteral {
    pub lit: Literal,
    /// Atom of a positive or negative literal, with positions.
    pub atom: Option<LAtom>,
    pub vars: Vec<(String, Location)>,
}

#[derive(Debug, Clone)]
pub(crate) enum Statement {
    Clause {
        head: LAtom,
        body: Option<Vec<LLiteral>>,
    },
    Denial {
        label: Option<(String, Location)>,
        body: Vec<LLiteral>,
        loc: Location,
    },
    Exists {
        body: Vec<LLiteral>,
        loc: Location,
    },
    Entry {
        insert: bool,
        atom: LAtom,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Grammar {
    Database,
    Theory,
    Update,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: Location,
}

type PResult<T> = std::result::Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn loc(&self) -> Location {
        self.toks.get(self.pos).map_or(self.end, |t| t.loc)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_owned(), Tok::describe);
        Diagnostic::error(self.loc(), format!("expected {expected}, found {found}"))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> PResult<Location> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().unwrap().loc)
        } else {
            Err(self.unexpected(expected))
        }
    }

    /// Skips past the next `.` so parsing resumes at the following statement.
    fn recover(&mut self) {
        while let Some(t) = self.bump() {
            if t.tok == Tok::Dot {
                break;
            }
        }
    }

    fn term(&mut self) -> PResult<(Term, Location)> {
        let loc = self.loc();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let t = Term::constant(s.clone());
                self.pos += 1;
                Ok((t, loc))
            }
            Some(Tok::Var(s)) => {
                let t = Term::var(s.clone());
                self.pos += 1;
                Ok((t, loc))
            }
            _ => Err(self.unexpected("a constant or variable")),
        }
    }

    fn atom(&mut self) -> PResult<LAtom> {
        let loc = self.loc();
        let pred = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            Some(Tok::Var(s)) => {
                return Err(Diagnostic::error(
                    loc,
                    format!("predicate names start with a lowercase letter, found variable '{s}'"),
                ))
            }
            _ => return Err(self.unexpected("an atom")),
        };
        self.pos += 1;
        let mut args = Vec::new();
        let mut arg_locs = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            loop {
                let (t, l) = self.term()?;
                args.push(t);
                arg_locs.push(l);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.unexpected("',' or ')'")),
                }
            }
        }
        Ok(LAtom {
            atom: Atom::new(pred, args),
            loc,
            arg_locs,
        })
    }

    fn literal(&mut self) -> PResult<LLiteral> {
        let is_cmp = matches!(self.peek2(), Some(Tok::Eq | Tok::Neq));
        match self.peek() {
            Some(Tok::Ident(k))
                if k == "not" && matches!(self.peek2(), Some(Tok::Ident(_) | Tok::Var(_))) =>
            {
                self.pos += 1;
                let a = self.atom()?;
                let vars = a
                    .var_occurrences()
                    .map(|(v, l)| (v.to_owned(), l))
                    .collect();
                Ok(LLiteral {
                    lit: Literal::Neg(a.atom.clone()),
                    atom: Some(a),
                    vars,
                })
            }
            Some(Tok::Ident(_) | Tok::Var(_)) if is_cmp => {
                let (l, ll) = self.term()?;
                let op = match self.bump().map(|t| t.tok) {
                    Some(Tok::Eq) => CmpOp::Eq,
                    _ => CmpOp::Neq,
                };
                let (r, rl) = self.term()?;
                let vars = [(&l, ll), (&r, rl)]
                    .into_iter()
                    .filter_map(|(t, at)| t.as_var().map(|v| (v.to_owned(), at)))
                    .collect();
                Ok(LLiteral {
                    lit: Literal::Cmp(op, l, r),
                    atom: None,
                    vars,
                })
            }
            Some(Tok::Ident(_) | Tok::Var(_)) => {
                let a = self.atom()?;
                let vars = a
                    .var_occurrences()
                    .map(|(v, l)| (v.to_owned(), l))
                    .collect();
                Ok(LLiteral {
                    lit: Literal::Pos(a.atom.clone()),
                    atom: Some(a),
                    vars,
                })
            }
            _ => Err(self.unexpected("a literal")),
        }
    }

    /// `l1, ..., lk .`
    fn body(&mut self) -> PResult<Vec<LLiteral>> {
        let mut out = vec![self.literal()?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    out.push(self.literal()?);
                }
                Some(Tok::Dot) => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return Err(self.unexpected("',' or '.'")),
            }
        }
    }

    fn clause(&mut self) -> PResult<Statement> {
        let head = self.atom()?;
        match self.peek() {
            Some(Tok::Dot) => {
                self.pos += 1;
                Ok(Statement::Clause { head, body: None })
            }
            Some(Tok::If) => {
                self.pos += 1;
                let body = self.body()?;
                Ok(Statement::Clause {
                    head,
                    body: Some(body),
                })
            }
            _ => Err(self.unexpected("'.' or ':-'")),
        }
    }

    fn constraint(&mut self) -> PResult<Statement> {
        let loc = self.loc();
        let label = if self.peek() == Some(&Tok::At) {
            self.pos += 1;
            let l = self.loc();
            match self.bump().map(|t| t.tok) {
                Some(Tok::Ident(s) | Tok::Var(s)) => Some((s, l)),
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("a label after '@'"));
                }
            }
        } else {
            None
        };
        match self.peek() {
            Some(Tok::If) => {
                self.pos += 1;
                Ok(Statement::Denial {
                    label,
                    body: self.body()?,
                    loc,
                })
            }
            Some(Tok::Ident(k)) if k == "exists" && label.is_none() => {
                self.pos += 1;
                Ok(Statement::Exists {
                    body: self.body()?,
                    loc,
                })
            }
            _ if label.is_some() => Err(self.unexpected("':-'")),
            _ => Err(self.unexpected("':-' or 'exists'")),
        }
    }

    fn entry(&mut self) -> PResult<Statement> {
        let insert = match self.peek() {
            Some(Tok::Plus) => true,
            Some(Tok::Minus) => false,
            _ => return Err(self.unexpected("'+' or '-'")),
        };
        self.pos += 1;
        let atom = self.atom()?;
        self.expect(Tok::Dot, "'.'")?;
        Ok(Statement::Entry { insert, atom })
    }
}

/// Parses every statement it can, collecting one diagnostic per broken
/// statement.
pub(crate) fn parse_statements(
    text: &str,
    first_line: u32,
    grammar: Grammar,
) -> (Vec<Statement>, Vec<Diagnostic>) {
    let (toks, mut diags, end) = lex(text, first_line);
    let mut p = Parser { toks, pos: 0, end };
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        let r = match grammar {
            Grammar::Database => p.clause(),
            Grammar::Theory => p.constraint(),
            Grammar::Update => p.entry(),
        };
        match r {
            Ok(s) => out.push(s),
            Err(d) => {
                diags.push(d);
                p.recover();
            }
        }
    }
    diags.sort_by_key(|d| d.location);
    (out, diags)
}
