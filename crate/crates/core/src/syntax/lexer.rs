use super::diag::{Diagnostic, Location};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase- or digit-initial: constants, predicates, keywords.
    Ident(String),
    /// Uppercase- or underscore-initial.
    Var(String),
    LParen,
    RParen,
    Comma,
    Dot,
    If,
    Eq,
    Neq,
    Plus,
    Minus,
    At,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("'{s}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::If => "':-'".into(),
            Tok::Eq => "'='".into(),
            Tok::Neq => "'\\='".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::At => "'@'".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub loc: Location,
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens. Unknown characters become diagnostics and are
/// skipped. `first_line` offsets line numbers for embedded sections. The
/// returned location is the end of input.
pub(crate) fn lex(text: &str, first_line: u32) -> (Vec<Token>, Vec<Diagnostic>, Location) {
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut line = first_line;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let loc = Location::new(line, col);
        col += 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => continue,
            '%' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '=' => Tok::Eq,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '@' => Tok::At,
            ':' if chars.peek() == Some(&'-') => {
                chars.next();
                col += 1;
                Tok::If
            }
            '\\' if chars.peek() == Some(&'=') => {
                chars.next();
                col += 1;
                Tok::Neq
            }
            c if ident_char(c) && c.is_ascii() => {
                let mut s = String::from(c);
                while let Some(&n) = chars.peek() {
                    if !(ident_char(n) && n.is_ascii()) {
                        break;
                    }
                    s.push(n);
                    chars.next();
                    col += 1;
                }
                if c.is_ascii_uppercase() || c == '_' {
                    Tok::Var(s)
                } else {
                    Tok::Ident(s)
                }
            }
            other => {
                diags.push(Diagnostic::error(
                    loc,
                    format!("unexpected character {other:?}"),
                ));
                continue;
            }
        };
        toks.push(Token { tok, loc });
    }
    (toks, diags, Location::new(line, col))
}
