use std::collections::HashMap;
use std::sync::Arc;

use super::lexer::{lex, Tok, Token};
use super::{nat_literal, Decl, ParseError, ParseErrorKind, Pos, SourceFile};
use crate::syntax::{name, Kind, Name, Prim, PrimAnn, Scheme, Term, Type};

struct Parser {
    toks: Vec<Token>,
    i: usize,
    types: Vec<Name>,
    terms: Vec<Name>,
    abbrevs: HashMap<String, Type>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(src)?,
            i: 0,
            types: Vec::new(),
            terms: Vec::new(),
            abbrevs: HashMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            kind: ParseErrorKind::Syntax,
            message: message.into(),
            pos: self.pos(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Kw(k) => format!("keyword `{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", Self::describe(self.peek())))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", Self::describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => self.error(format!("expected identifier, found {}", Self::describe(&t))),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => self.error(format!("unexpected {} after end of program", Self::describe(t))),
        }
    }

    // kinds

    fn kind(&mut self) -> PResult<Kind> {
        let dom = self.kind_atom()?;
        if self.eat_sym("->") {
            Ok(Kind::arrow(dom, self.kind()?))
        } else {
            Ok(dom)
        }
    }

    fn kind_atom(&mut self) -> PResult<Kind> {
        if self.eat_sym("*") {
            Ok(Kind::Star)
        } else if self.eat_sym("(") {
            let k = self.kind()?;
            self.expect_sym(")")?;
            Ok(k)
        } else {
            self.error(format!("expected a kind, found {}", Self::describe(self.peek())))
        }
    }

    fn opt_kind(&mut self) -> PResult<Kind> {
        if self.eat_sym(":") {
            self.kind()
        } else {
            Ok(Kind::Star)
        }
    }

    // types

    fn ty(&mut self) -> PResult<Type> {
        let lhs = self.ty_sum()?;
        if self.eat_sym("=>") {
            Ok(Type::fun(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn ty_sum(&mut self) -> PResult<Type> {
        let lhs = self.ty_prod()?;
        if self.eat_sym("+") {
            Ok(Type::sum(lhs, self.ty_sum()?))
        } else {
            Ok(lhs)
        }
    }

    fn ty_prod(&mut self) -> PResult<Type> {
        let lhs = self.ty_app()?;
        if self.eat_sym("*") {
            Ok(Type::prod(lhs, self.ty_prod()?))
        } else {
            Ok(lhs)
        }
    }

    fn starts_ty_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Int(_) | Tok::Kw("mu") | Tok::Sym("(") | Tok::Sym("\\")
        )
    }

    fn ty_app(&mut self) -> PResult<Type> {
        let mut t = self.ty_atom()?;
        while self.starts_ty_atom() {
            let lam = self.is_sym("\\");
            t = Type::app(t, self.ty_atom()?);
            if lam {
                break;
            }
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(x) => self.resolve_type(&x, pos),
            Tok::Int(0) => Ok(Type::Zero),
            Tok::Int(1) => Ok(Type::One),
            Tok::Int(n) => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                message: format!("`{n}` is not a type; only 0 and 1 are"),
                pos,
            }),
            Tok::Kw("mu") => {
                self.expect_sym("(")?;
                let body = self.ty()?;
                self.expect_sym(")")?;
                Ok(Type::mu(body))
            }
            Tok::Sym("(") => {
                let t = self.ty()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Sym("\\") => {
                let mut binders = Vec::new();
                loop {
                    let x = self.ident()?;
                    let k = self.opt_kind()?;
                    binders.push((name(&x), k));
                    if !matches!(self.peek(), Tok::Ident(_)) {
                        break;
                    }
                }
                self.expect_sym(".")?;
                let n = binders.len();
                self.types.extend(binders.iter().map(|b| b.0.clone()));
                let body = self.ty();
                self.types.truncate(self.types.len() - n);
                let body = body?;
                Ok(binders
                    .into_iter()
                    .rev()
                    .fold(body, |b, (x, k)| Type::Lam(x, k, Arc::new(b))))
            }
            t => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                message: format!("expected a type, found {}", Self::describe(&t)),
                pos,
            }),
        }
    }

    fn resolve_type(&self, x: &str, pos: Pos) -> PResult<Type> {
        if let Some(i) = self.types.iter().rev().position(|n| &**n == x) {
            return Ok(Type::Var(i, name(x)));
        }
        if let Some(t) = self.abbrevs.get(x) {
            return Ok(t.clone());
        }
        Err(ParseError {
            kind: ParseErrorKind::Unbound,
            message: format!("unbound type name `{x}`"),
            pos,
        })
    }

    fn scheme(&mut self) -> PResult<Scheme> {
        let mut binders = Vec::new();
        while self.is_kw("forall") {
            self.bump();
            loop {
                let x = self.ident()?;
                let k = self.opt_kind()?;
                self.types.push(name(&x));
                binders.push((name(&x), k));
                if !matches!(self.peek(), Tok::Ident(_)) {
                    break;
                }
            }
            if let Err(e) = self.expect_sym(".") {
                self.types.truncate(self.types.len() - binders.len());
                return Err(e);
            }
        }
        let body = self.ty();
        self.types.truncate(self.types.len() - binders.len());
        Ok(Scheme { binders, body: body? })
    }

    // terms

    fn term(&mut self) -> PResult<Term> {
        if self.eat_sym("\\") {
            let mut params = Vec::new();
            loop {
                if self.eat_sym("(") {
                    let x = self.ident()?;
                    self.expect_sym(":")?;
                    let t = self.ty()?;
                    self.expect_sym(")")?;
                    params.push((x, Some(t)));
                } else {
                    params.push((self.ident()?, None));
                }
                if self.is_sym(".") {
                    break;
                }
            }
            self.bump();
            let n = params.len();
            self.terms.extend(params.iter().map(|p| name(&p.0)));
            let body = self.term();
            self.terms.truncate(self.terms.len() - n);
            let body = body?;
            return Ok(params
                .into_iter()
                .rev()
                .fold(body, |b, (x, t)| Term::Lam(name(&x), t, Arc::new(b))));
        }
        if self.eat_sym("/\\") {
            let mut binders = Vec::new();
            loop {
                let x = self.ident()?;
                let k = self.opt_kind()?;
                binders.push((name(&x), k));
                if !matches!(self.peek(), Tok::Ident(_)) {
                    break;
                }
            }
            self.expect_sym(".")?;
            let n = binders.len();
            self.types.extend(binders.iter().map(|b| b.0.clone()));
            let body = self.term();
            self.types.truncate(self.types.len() - n);
            let body = body?;
            return Ok(binders
                .into_iter()
                .rev()
                .fold(body, |b, (x, k)| Term::TyLam(x, k, Arc::new(b))));
        }
        if self.is_kw("let") {
            self.bump();
            let (x, s, bound) = self.let_head()?;
            self.expect_kw("in")?;
            return self.let_body(x, s, bound);
        }
        self.term_app()
    }

    fn let_head(&mut self) -> PResult<(String, Scheme, Term)> {
        let x = self.ident()?;
        self.expect_sym(":")?;
        let s = self.scheme()?;
        self.expect_sym("=")?;
        let bound = self.term()?;
        Ok((x, s, bound))
    }

    fn let_body(&mut self, x: String, s: Scheme, bound: Term) -> PResult<Term> {
        self.terms.push(name(&x));
        let body = self.term();
        self.terms.pop();
        Ok(Term::let_(&x, s, bound, body?))
    }

    fn starts_term_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(_) | Tok::Int(_) | Tok::Sym("(") => true,
            Tok::Kw(k) => !matches!(*k, "type" | "let" | "in" | "mu" | "forall"),
            _ => false,
        }
    }

    fn term_app(&mut self) -> PResult<Term> {
        let mut m = self.term_atom()?;
        loop {
            if self.eat_sym("@") {
                self.expect_sym("[")?;
                let t = self.ty()?;
                self.expect_sym("]")?;
                m = Term::ty_app(m, t);
            } else if self.starts_term_atom() {
                m = Term::app(m, self.term_atom()?);
            } else {
                return Ok(m);
            }
        }
    }

    fn term_atom(&mut self) -> PResult<Term> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(x) => match self.terms.iter().rev().position(|n| **n == *x) {
                Some(i) => Ok(Term::Var(i, name(&x))),
                None => Err(ParseError {
                    kind: ParseErrorKind::Unbound,
                    message: format!("unbound variable `{x}`"),
                    pos,
                }),
            },
            Tok::Int(n) => Ok(nat_literal(n)),
            Tok::Sym("(") => {
                let m = self.term()?;
                if self.eat_sym(":") {
                    let s = self.scheme()?;
                    self.expect_sym(")")?;
                    Ok(Term::Ascribe(Arc::new(m), s))
                } else {
                    self.expect_sym(")")?;
                    Ok(m)
                }
            }
            Tok::Kw(k) => self.prim(k, pos),
            t => Err(ParseError {
                kind: ParseErrorKind::Syntax,
                message: format!("expected a term, found {}", Self::describe(&t)),
                pos,
            }),
        }
    }

    fn prim(&mut self, kw: &'static str, pos: Pos) -> PResult<Term> {
        let p = match kw {
            "in" => Prim::In,
            "unin" => Prim::Unin,
            "fst" => Prim::Fst,
            "snd" => Prim::Snd,
            "inl" => Prim::Inl,
            "inr" => Prim::Inr,
            "tt" => Prim::Tt,
            "absurd" => Prim::Absurd,
            "fork" | "join" => {
                let ann = self.opt_ann(3)?;
                self.expect_sym("(")?;
                let a = Arc::new(self.term()?);
                self.expect_sym(",")?;
                let b = Arc::new(self.term()?);
                self.expect_sym(")")?;
                let p = if kw == "fork" {
                    Prim::Fork(a, b)
                } else {
                    Prim::Join(a, b)
                };
                return Ok(Term::Prim(p, ann));
            }
            "map" | "fold" => {
                self.expect_sym("[")?;
                let t = self.ty()?;
                self.expect_sym("]")?;
                let ann = self.opt_ann(if kw == "map" { 2 } else { 1 })?;
                self.expect_sym("(")?;
                let m = Arc::new(self.term()?);
                self.expect_sym(")")?;
                let p = if kw == "map" { Prim::Map(t, m) } else { Prim::Fold(t, m) };
                return Ok(Term::Prim(p, ann));
            }
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    message: format!("expected a term, found keyword `{kw}`"),
                    pos,
                })
            }
        };
        let ann = self.opt_ann(p.annotation_width())?;
        Ok(Term::Prim(p, ann))
    }

    fn opt_ann(&mut self, width: usize) -> PResult<Option<PrimAnn>> {
        if !self.is_sym("{") {
            return Ok(None);
        }
        let pos = self.pos();
        self.bump();
        let kind = self.kind()?;
        let mut types = Vec::new();
        if self.eat_sym("|") {
            types.push(self.ty()?);
            while self.eat_sym(",") {
                types.push(self.ty()?);
            }
        }
        self.expect_sym("}")?;
        if types.len() != width {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax,
                message: format!("annotation needs {width} type(s), found {}", types.len()),
                pos,
            });
        }
        Ok(Some(PrimAnn { kind, types }))
    }

    // files

    fn file(&mut self) -> PResult<SourceFile> {
        let mut decls = Vec::new();
        loop {
            let pos = self.pos();
            if matches!(self.peek(), Tok::Eof) {
                return Ok(SourceFile {
                    decls,
                    main: None,
                    main_pos: None,
                });
            }
            if self.is_kw("type") {
                self.bump();
                let n = self.ident()?;
                self.check_fresh(&decls, &n, pos)?;
                self.expect_sym("=")?;
                let body = self.ty()?;
                self.expect_sym(";")?;
                self.abbrevs.insert(n.clone(), body.clone());
                decls.push(Decl::Type { name: n, body, pos });
                continue;
            }
            if self.is_kw("let") {
                self.bump();
                let (x, scheme, body) = self.let_head()?;
                if self.eat_sym(";") {
                    self.check_fresh(&decls, &x, pos)?;
                    self.terms.push(name(&x));
                    decls.push(Decl::Let {
                        name: x,
                        scheme,
                        body,
                        pos,
                    });
                    continue;
                }
                self.expect_kw("in")?;
                let main = self.let_body(x, scheme, body)?;
                return self.finish(decls, main, pos);
            }
            let main = self.term()?;
            return self.finish(decls, main, pos);
        }
    }

    fn check_fresh(&self, decls: &[Decl], n: &str, pos: Pos) -> PResult<()> {
        if decls.iter().any(|d| d.name() == n) {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax,
                message: format!("`{n}` is declared twice"),
                pos,
            });
        }
        Ok(())
    }

    fn finish(&mut self, decls: Vec<Decl>, main: Term, pos: Pos) -> PResult<SourceFile> {
        self.eat_sym(";");
        self.expect_eof()?;
        Ok(SourceFile {
            decls,
            main: Some(main),
            main_pos: Some(pos),
        })
    }
}

/// Parses a whole program.
pub fn parse(src: &str) -> Result<SourceFile, ParseError> {
    Parser::new(src)?.file()
}

fn parse_with<T>(src: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> Result<T, ParseError> {
    let mut p = Parser::new(src)?;
    let out = f(&mut p)?;
    p.expect_eof()?;
    Ok(out)
}

pub fn parse_kind(src: &str) -> Result<Kind, ParseError> {
    parse_with(src, Parser::kind)
}

/// Parses a closed type.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    parse_with(src, Parser::ty)
}

pub fn parse_scheme(src: &str) -> Result<Scheme, ParseError> {
    parse_with(src, Parser::scheme)
}

/// Parses a closed term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_with(src, Parser::term)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_declaration() {
        let f = parse("type List = \\a:*. mu(\\X:*. 1 + (a * X));").unwrap();
        let expected = Type::lam(
            "a",
            Kind::Star,
            Type::mu(Type::lam(
                "X",
                Kind::Star,
                Type::sum(Type::One, Type::prod(Type::var(1, "a"), Type::var(0, "X"))),
            )),
        );
        assert_eq!(f.type_decl("List"), Some(&expected));
    }

    #[test]
    fn polymorphic_identity() {
        let f = parse("let id : forall a. a => a = /\\a. \\x. x;").unwrap();
        let (n, s, m) = f.let_decls().next().unwrap();
        assert_eq!(n, "id");
        assert_eq!(
            s,
            &Scheme::forall(
                "a",
                Kind::Star,
                Scheme::mono(Type::fun(Type::var(0, "a"), Type::var(0, "a")))
            )
        );
        assert_eq!(
            m,
            &Term::ty_lam("a", Kind::Star, Term::lam("x", None, Term::var(0, "x")))
        );
    }

    #[test]
    fn unbalanced_paren_reports_position() {
        let e = parse("(\\x. x x").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.pos, Pos { line: 1, col: 9 });
    }

    #[test]
    fn unbound_name_reports_position() {
        let e = parse("let f : 1 => 1 = \\x. y;").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbound);
        assert_eq!(e.pos, Pos { line: 1, col: 22 });
    }

    #[test]
    fn operators_associate_right() {
        let t = parse_type("1 => 0 => 1").unwrap();
        assert_eq!(t, Type::fun(Type::One, Type::fun(Type::Zero, Type::One)));
        let t = parse_type("1 + 1 * 0 + 0").unwrap();
        assert_eq!(
            t,
            Type::sum(Type::One, Type::sum(Type::prod(Type::One, Type::Zero), Type::Zero))
        );
    }

    #[test]
    fn abbreviations_expand() {
        let f = parse("type Id = \\X:*. X; type T = Id 1;").unwrap();
        assert_eq!(
            f.type_decl("T"),
            Some(&Type::app(Type::lam("X", Kind::Star, Type::var(0, "X")), Type::One))
        );
    }

    #[test]
    fn decls_are_referenced_by_position() {
        let f = parse("let a : 1 = tt; let b : 1 = tt; \\x. a;").unwrap();
        // inside main: x = 0, b = 1, a = 2
        assert_eq!(f.main, Some(Term::lam("x", None, Term::var(2, "a"))));
    }

    #[test]
    fn let_in_as_main() {
        let f = parse("let a : 1 = tt; let b : 1 = a in b;").unwrap();
        assert_eq!(f.let_decls().count(), 1);
        assert!(matches!(f.main, Some(Term::Let(..))));
    }

    #[test]
    fn annotations_parse() {
        let m = parse_term("fork{* | 1, 1, 1}(tt{*}, tt{*})").unwrap();
        let Term::Prim(Prim::Fork(..), Some(ann)) = m else {
            panic!()
        };
        assert_eq!(ann.types.len(), 3);
        assert!(parse_term("inl{* | 1}").is_err());
    }

    #[test]
    fn type_application_and_literals() {
        let m = parse_term("(/\\a. \\(x : a). x) @[mu(\\X. 1 + X)] 2").unwrap();
        let (_, args) = m.spine();
        assert_eq!(args.len(), 2);
    }
}
