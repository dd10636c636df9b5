use std::collections::HashSet;

use super::lexer::{is_ident_char, is_ident_start, KEYWORDS};
use super::{as_nat_literal, Decl, SourceFile};
use crate::syntax::{Kind, Name, Prim, PrimAnn, Scheme, Term, Type};

pub fn print_kind(k: &Kind) -> String {
    match k {
        Kind::Star => "*".into(),
        Kind::Arrow(a, b) => match **a {
            Kind::Arrow(..) => format!("({}) -> {}", print_kind(a), print_kind(b)),
            Kind::Star => format!("* -> {}", print_kind(b)),
        },
    }
}

pub fn print_type(t: &Type) -> String {
    Printer::default().ty(t)
}

pub fn print_scheme(s: &Scheme) -> String {
    Printer::default().scheme(s)
}

pub fn print_term(m: &Term) -> String {
    Printer::default().term(m)
}

pub fn print_file(f: &SourceFile) -> String {
    let mut p = Printer::default();
    let mut out = String::new();
    for d in &f.decls {
        match d {
            Decl::Type { name, body, .. } => {
                out.push_str(&format!("type {name} = {};\n", p.ty(body)));
                p.abbrevs.push((name.clone(), body.clone()));
            }
            Decl::Let { name, scheme, body, .. } => {
                out.push_str(&format!("let {name} : {} = {};\n", p.scheme(scheme), p.term(body)));
                p.terms.push(Name::from(name.as_str()));
            }
        }
    }
    if let Some(m) = &f.main {
        out.push_str(&p.term(m));
        out.push_str(";\n");
    }
    out
}

/// Printer state: the names currently in scope, innermost last.
///
/// Binder names are taken from the hints when that does not capture a
/// variable of the body, and otherwise get a numeric suffix.
#[derive(Clone, Debug, Default)]
pub struct Printer {
    pub types: Vec<Name>,
    pub terms: Vec<Name>,
    /// Closed types printed by name instead of structurally.
    pub abbrevs: Vec<(String, Type)>,
}

fn sanitize(hint: &str, fallback: &str) -> String {
    let mut chars = hint.chars();
    let ok = matches!(chars.next(), Some(c) if is_ident_start(c)) && chars.all(is_ident_char);
    let base = if ok { hint.to_string() } else { fallback.to_string() };
    if KEYWORDS.contains(&base.as_str()) {
        format!("{base}_")
    } else {
        base
    }
}

fn pick(hint: &str, fallback: &str, avoid: &HashSet<String>) -> Name {
    let base = sanitize(hint, fallback);
    if !avoid.contains(&base) {
        return Name::from(base.as_str());
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { fallback } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n) && !KEYWORDS.contains(&n.as_str()))
        .map(|n| Name::from(n.as_str()))
        .unwrap()
}

fn var_name(ctx: &[Name], i: usize, hint: &Name) -> String {
    match ctx.len().checked_sub(i + 1) {
        Some(pos) => ctx[pos].to_string(),
        None => sanitize(hint, "v"),
    }
}

/// Names that free variables of `t` (relative to `depth` local binders)
/// print as.
fn type_free_names(t: &Type, depth: usize, ctx: &[Name], out: &mut HashSet<String>) {
    match t {
        Type::Var(i, h) => {
            if *i >= depth {
                out.insert(var_name(ctx, i - depth, h));
            }
        }
        Type::Lam(_, _, b) => type_free_names(b, depth + 1, ctx, out),
        Type::Mu(b) => type_free_names(b, depth, ctx, out),
        Type::App(a, b) | Type::Fun(a, b) | Type::Prod(a, b) | Type::Sum(a, b) => {
            type_free_names(a, depth, ctx, out);
            type_free_names(b, depth, ctx, out);
        }
        Type::Zero | Type::One => {}
    }
}

fn term_types_free_names(m: &Term, depth: usize, ctx: &[Name], out: &mut HashSet<String>) {
    let scheme = |s: &Scheme, out: &mut HashSet<String>| type_free_names(&s.body, depth + s.binders.len(), ctx, out);
    match m {
        Term::Var(..) => {}
        Term::App(a, b) => {
            term_types_free_names(a, depth, ctx, out);
            term_types_free_names(b, depth, ctx, out);
        }
        Term::Lam(_, p, b) => {
            if let Some(p) = p {
                type_free_names(p, depth, ctx, out);
            }
            term_types_free_names(b, depth, ctx, out);
        }
        Term::Let(_, s, a, b) => {
            scheme(s, out);
            term_types_free_names(a, depth, ctx, out);
            term_types_free_names(b, depth, ctx, out);
        }
        Term::TyLam(_, _, b) => term_types_free_names(b, depth + 1, ctx, out),
        Term::TyApp(f, t) => {
            term_types_free_names(f, depth, ctx, out);
            type_free_names(t, depth, ctx, out);
        }
        Term::Ascribe(a, s) => {
            term_types_free_names(a, depth, ctx, out);
            scheme(s, out);
        }
        Term::Prim(p, ann) => {
            if let Prim::Map(t, _) | Prim::Fold(t, _) = p {
                type_free_names(t, depth, ctx, out);
            }
            if let Some(a) = ann {
                for t in &a.types {
                    type_free_names(t, depth, ctx, out);
                }
            }
            for c in p.components() {
                term_types_free_names(c, depth, ctx, out);
            }
        }
    }
}

fn term_free_names(m: &Term, depth: usize, ctx: &[Name], out: &mut HashSet<String>) {
    match m {
        Term::Var(i, h) => {
            if *i >= depth {
                out.insert(var_name(ctx, i - depth, h));
            }
        }
        Term::App(a, b) => {
            term_free_names(a, depth, ctx, out);
            term_free_names(b, depth, ctx, out);
        }
        Term::Lam(_, _, b) => term_free_names(b, depth + 1, ctx, out),
        Term::Let(_, _, a, b) => {
            term_free_names(a, depth, ctx, out);
            term_free_names(b, depth + 1, ctx, out);
        }
        Term::TyLam(_, _, b) | Term::TyApp(b, _) | Term::Ascribe(b, _) => term_free_names(b, depth, ctx, out),
        Term::Prim(p, _) => {
            for c in p.components() {
                term_free_names(c, depth, ctx, out);
            }
        }
    }
}

impl Printer {
    fn bind_type(&self, hint: &str, body_names: impl FnOnce(&[Name], &mut HashSet<String>)) -> Name {
        let mut avoid = HashSet::new();
        body_names(&self.types, &mut avoid);
        pick(hint, "a", &avoid)
    }

    fn bind_term(&self, hint: &str, body: &Term, depth: usize) -> Name {
        let mut avoid = HashSet::new();
        term_free_names(body, depth, &self.terms, &mut avoid);
        pick(hint, "x", &avoid)
    }

    pub fn kind(&self, k: &Kind) -> String {
        print_kind(k)
    }

    pub fn ty(&mut self, t: &Type) -> String {
        self.ty_prec(t, 0)
    }

    fn ty_prec(&mut self, t: &Type, prec: u8) -> String {
        let wrap = |s: String, need: bool| if need { format!("({s})") } else { s };
        if !self.abbrevs.is_empty() && !matches!(t, Type::Var(..) | Type::Zero | Type::One) && t.free_vars().is_empty()
        {
            let types = &self.types;
            if let Some((n, _)) = self
                .abbrevs
                .iter()
                .rev()
                .find(|(n, b)| b == t && !types.iter().any(|x| **x == **n))
            {
                return n.clone();
            }
        }
        match t {
            Type::Var(i, h) => var_name(&self.types, *i, h),
            Type::Zero => "0".into(),
            Type::One => "1".into(),
            Type::Mu(b) => format!("mu({})", self.ty_prec(b, 0)),
            Type::Fun(a, b) => {
                let s = format!("{} => {}", self.ty_prec(a, 1), self.ty_prec(b, 0));
                wrap(s, prec > 0)
            }
            Type::Sum(a, b) => {
                let s = format!("{} + {}", self.ty_prec(a, 2), self.ty_prec(b, 1));
                wrap(s, prec > 1)
            }
            Type::Prod(a, b) => {
                let s = format!("{} * {}", self.ty_prec(a, 3), self.ty_prec(b, 2));
                wrap(s, prec > 2)
            }
            Type::App(f, a) => {
                let s = format!("{} {}", self.ty_prec(f, 3), self.ty_prec(a, 4));
                wrap(s, prec > 3)
            }
            Type::Lam(h, k, b) => {
                let x = self.bind_type(h, |ctx, out| type_free_names(b, 1, ctx, out));
                self.types.push(x.clone());
                let body = self.ty_prec(b, 0);
                self.types.pop();
                wrap(format!("\\{x}:{}. {body}", print_kind(k)), prec > 0)
            }
        }
    }

    pub fn scheme(&mut self, s: &Scheme) -> String {
        if s.binders.is_empty() {
            return self.ty(&s.body);
        }
        let n = s.binders.len();
        let mut parts = Vec::new();
        for (j, (h, k)) in s.binders.iter().enumerate() {
            let x = self.bind_type(h, |ctx, out| type_free_names(&s.body, n - j, ctx, out));
            self.types.push(x.clone());
            parts.push(match k {
                Kind::Star => x.to_string(),
                _ => format!("{x}:{}", print_kind(k)),
            });
        }
        let body = self.ty(&s.body);
        self.types.truncate(self.types.len() - n);
        format!("forall {}. {body}", parts.join(" "))
    }

    pub fn term(&mut self, m: &Term) -> String {
        self.term_prec(m, 0)
    }

    fn ann(&mut self, ann: &Option<PrimAnn>) -> String {
        match ann {
            None => String::new(),
            Some(a) if a.types.is_empty() => format!("{{{}}}", print_kind(&a.kind)),
            Some(a) => {
                let ts: Vec<String> = a.types.iter().map(|t| self.ty(t)).collect();
                format!("{{{} | {}}}", print_kind(&a.kind), ts.join(", "))
            }
        }
    }

    fn term_prec(&mut self, m: &Term, prec: u8) -> String {
        let wrap = |s: String, need: bool| if need { format!("({s})") } else { s };
        if let Some(n) = as_nat_literal(m) {
            return n.to_string();
        }
        match m {
            Term::Var(i, h) => var_name(&self.terms, *i, h),
            Term::App(f, a) => {
                let s = format!("{} {}", self.term_prec(f, 1), self.term_prec(a, 2));
                wrap(s, prec > 1)
            }
            Term::TyApp(f, t) => {
                let s = format!("{} @[{}]", self.term_prec(f, 1), self.ty(t));
                wrap(s, prec > 1)
            }
            Term::Lam(h, p, b) => {
                let x = self.bind_term(h, b, 1);
                let param = match p {
                    None => x.to_string(),
                    Some(t) => format!("({x} : {})", self.ty(t)),
                };
                self.terms.push(x);
                let body = self.term_prec(b, 0);
                self.terms.pop();
                wrap(format!("\\{param}. {body}"), prec > 0)
            }
            Term::TyLam(h, k, b) => {
                let x = self.bind_type(h, |ctx, out| term_types_free_names(b, 1, ctx, out));
                self.types.push(x.clone());
                let body = self.term_prec(b, 0);
                self.types.pop();
                let binder = match k {
                    Kind::Star => x.to_string(),
                    _ => format!("{x}:{}", print_kind(k)),
                };
                wrap(format!("/\\{binder}. {body}"), prec > 0)
            }
            Term::Let(h, s, a, b) => {
                let x = self.bind_term(h, b, 1);
                let s = self.scheme(s);
                let a = self.term_prec(a, 0);
                self.terms.push(x.clone());
                let b = self.term_prec(b, 0);
                self.terms.pop();
                wrap(format!("let {x} : {s} = {a} in {b}"), prec > 0)
            }
            Term::Ascribe(a, s) => {
                let a = self.term_prec(a, 0);
                format!("({a} : {})", self.scheme(s))
            }
            Term::Prim(p, ann) => {
                let kw = p.keyword();
                match p {
                    Prim::Map(t, c) | Prim::Fold(t, c) => {
                        let t = self.ty(t);
                        let a = self.ann(ann);
                        format!("{kw}[{t}]{a}({})", self.term_prec(c, 0))
                    }
                    Prim::Fork(l, r) | Prim::Join(l, r) => {
                        let a = self.ann(ann);
                        format!("{kw}{a}({}, {})", self.term_prec(l, 0), self.term_prec(r, 0))
                    }
                    Prim::In => wrap(format!("{kw}{}", self.ann(ann)), prec > 1),
                    _ => format!("{kw}{}", self.ann(ann)),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse, parse_scheme, parse_term, parse_type};

    #[test]
    fn nat_type_prints_canonically() {
        let t = Type::mu(Type::lam("X", Kind::Star, Type::sum(Type::One, Type::var(0, "X"))));
        assert_eq!(print_type(&t), "mu(\\X:*. 1 + X)");
    }

    #[test]
    fn arrows_right_associate() {
        let t = Type::fun(Type::fun(Type::One, Type::One), Type::fun(Type::One, Type::Zero));
        assert_eq!(print_type(&t), "(1 => 1) => 1 => 0");
        let k = Kind::arrow(Kind::arrow(Kind::Star, Kind::Star), Kind::arrow(Kind::Star, Kind::Star));
        assert_eq!(print_kind(&k), "(* -> *) -> * -> *");
    }

    #[test]
    fn shadowing_is_renamed() {
        // \x. \x. x1 where the inner body refers to the outer x
        let m = Term::lam("x", None, Term::lam("x", None, Term::var(1, "x")));
        let s = print_term(&m);
        assert_eq!(s, "\\x. \\x1. x");
        assert_eq!(parse_term(&s).unwrap(), m);
    }

    #[test]
    fn scheme_binders_do_not_capture() {
        let s = Scheme {
            binders: vec![("a".into(), Kind::Star), ("a".into(), Kind::Star)],
            body: Type::fun(Type::var(1, "a"), Type::var(0, "a")),
        };
        let printed = print_scheme(&s);
        assert_eq!(parse_scheme(&printed).unwrap(), s);
    }

    #[test]
    fn round_trips() {
        for src in [
            "\\X:*. X * X + 1 => 0",
            "(\\X:* -> *. X) (\\Y:*. Y)",
            "mu(\\X:*. 1 + X) * (1 + 0)",
            "\\f:* -> *. \\a:*. mu(\\X:*. a + f X)",
        ] {
            let t = parse_type(src).unwrap();
            assert_eq!(parse_type(&print_type(&t)).unwrap(), t, "{src}");
        }
        for src in [
            "/\\a. \\(x : a). (x : a)",
            "fold[\\X:*. 1 + X](join(\\u. 0, \\n. n)) 3",
            "let f : forall a. a => a = /\\a. \\x. x in f @[1] tt",
            "map[\\X:*. X * X]{* -> * | 1, 1}(\\x. x) (fork{* | 1, 1, 1}(\\y. y, \\y. y) tt{*})",
            "let f : 1 = fst (in) in in f",
        ] {
            let m = parse_term(src).unwrap();
            assert_eq!(parse_term(&print_term(&m)).unwrap(), m, "{src}");
        }
    }

    #[test]
    fn file_round_trip() {
        let src = "type Nat = mu(\\X:*. 1 + X);\nlet two : Nat = 2;\nlet id : forall a. a => a = /\\a. \\x. x;\nid @[Nat] two;\n";
        let f = parse(src).unwrap();
        let printed = print_file(&f);
        assert_eq!(parse(&printed).unwrap().main, f.main);
    }
}
