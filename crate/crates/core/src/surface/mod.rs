//! Concrete text syntax: lexing, parsing with name resolution, and
//! printing.
//!
//! ```text
//! kind   ::= '*' | kind '->' kind | '(' kind ')'
//! type   ::= type '=>' type | type '+' type | type '*' type | type type
//!          | '\' X (':' kind)? '.' type | 'mu' '(' type ')' | '0' | '1' | X
//! scheme ::= 'forall' (a (':' kind)?)+ '.' scheme | type
//! term   ::= '\' (x | '(' x ':' type ')')+ '.' term
//!          | '/\' (a (':' kind)?)+ '.' term
//!          | 'let' x ':' scheme '=' term 'in' term
//!          | term term | term '@[' type ']' | '(' term ':' scheme ')'
//!          | prim | x | n
//! prim   ::= ('in' | 'unin' | 'fst' | 'snd' | 'inl' | 'inr' | 'tt' | 'absurd') ann?
//!          | ('fork' | 'join') ann? '(' term ',' term ')'
//!          | ('map' | 'fold') '[' type ']' ann? '(' term ')'
//! ann    ::= '{' kind ('|' type (',' type)*)? '}'
//! decl   ::= 'type' N '=' type ';' | 'let' x ':' scheme '=' term ';'
//! file   ::= decl* (term ';'?)?
//! ```
//!
//! Annotations are what the type checker adds during elaboration; source
//! programs normally omit them.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::syntax::{Kind, Prim, PrimAnn, Scheme, Term, Type};

pub use lexer::KEYWORDS;
pub use parser::{parse, parse_kind, parse_scheme, parse_term, parse_type};
pub use printer::{print_file, print_kind, print_scheme, print_term, print_type, Printer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lex,
    Syntax,
    Unbound,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub message: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Type {
        name: String,
        body: Type,
        pos: Pos,
    },
    Let {
        name: String,
        scheme: Scheme,
        body: Term,
        pos: Pos,
    },
}

impl Decl {
    pub fn name(&self) -> &str {
        match self {
            Decl::Type { name, .. } | Decl::Let { name, .. } => name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Decl::Type { pos, .. } | Decl::Let { pos, .. } => *pos,
        }
    }
}

/// A parsed program. Type declarations are already expanded; let
/// declarations see earlier let declarations as free term variables,
/// innermost (most recent) first.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
    pub main: Option<Term>,
    pub main_pos: Option<Pos>,
}

impl SourceFile {
    /// Equality up to bound names and source positions.
    pub fn alpha_eq(&self, other: &SourceFile) -> bool {
        self.main == other.main
            && self.decls.len() == other.decls.len()
            && self.decls.iter().zip(&other.decls).all(|(a, b)| match (a, b) {
                (Decl::Type { name: n, body: t, .. }, Decl::Type { name: m, body: u, .. }) => n == m && t == u,
                (
                    Decl::Let {
                        name: n,
                        scheme: s,
                        body: t,
                        ..
                    },
                    Decl::Let {
                        name: m,
                        scheme: r,
                        body: u,
                        ..
                    },
                ) => n == m && s == r && t == u,
                _ => false,
            })
    }

    pub fn type_decl(&self, name: &str) -> Option<&Type> {
        self.decls.iter().find_map(|d| match d {
            Decl::Type { name: n, body, .. } if n == name => Some(body),
            _ => None,
        })
    }

    pub fn let_decls(&self) -> impl Iterator<Item = (&str, &Scheme, &Term)> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Let { name, scheme, body, .. } => Some((name.as_str(), scheme, body)),
            _ => None,
        })
    }

    /// The whole program as one closed term: a chain of lets ending in
    /// the main term (or `tt` when there is none).
    pub fn to_term(&self) -> Term {
        let lets: Vec<_> = self.let_decls().collect();
        let main = self.main.clone().unwrap_or_else(|| Term::prim(Prim::Tt));
        lets.into_iter()
            .rev()
            .fold(main, |acc, (n, s, m)| Term::let_(n, s.clone(), m.clone(), acc))
    }
}

/// `λX:*. 1 + X`
pub fn nat_functor() -> Type {
    Type::lam("X", Kind::Star, Type::sum(Type::One, Type::var(0, "X")))
}

/// `mu(λX:*. 1 + X)`
pub fn nat_type() -> Type {
    Type::mu(nat_functor())
}

fn nat_in(inner: Term) -> Term {
    Term::app(
        Term::prim_ann(Prim::In, PrimAnn::new(Kind::Star, vec![nat_functor()])),
        inner,
    )
}

fn nat_inj(p: Prim) -> Term {
    Term::prim_ann(p, PrimAnn::new(Kind::Star, vec![Type::One, nat_type()]))
}

pub fn nat_zero() -> Term {
    nat_in(Term::app(
        nat_inj(Prim::Inl),
        Term::prim_ann(Prim::Tt, PrimAnn::new(Kind::Star, vec![])),
    ))
}

pub fn nat_succ(n: Term) -> Term {
    nat_in(Term::app(nat_inj(Prim::Inr), n))
}

/// The annotated encoding an integer literal parses to.
pub fn nat_literal(n: u64) -> Term {
    (0..n).fold(nat_zero(), |acc, _| nat_succ(acc))
}

/// Recognizes terms produced by [`nat_literal`].
pub fn as_nat_literal(m: &Term) -> Option<u64> {
    let mut count = 0;
    let mut t = m;
    let zero = nat_zero();
    loop {
        if *t == zero {
            return Some(count);
        }
        let Term::App(f, arg) = t else { return None };
        if **f != *nat_in_head() {
            return None;
        }
        let Term::App(g, n) = &**arg else { return None };
        if **g != nat_inj(Prim::Inr) {
            return None;
        }
        count += 1;
        t = n;
    }
}

fn nat_in_head() -> &'static Term {
    use std::sync::OnceLock;
    static HEAD: OnceLock<Term> = OnceLock::new();
    HEAD.get_or_init(|| Term::prim_ann(Prim::In, PrimAnn::new(Kind::Star, vec![nat_functor()])))
}
