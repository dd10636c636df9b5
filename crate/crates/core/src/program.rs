//! Checking whole source files.

use thiserror::Error;

use crate::kinding::{infer_kind, KindCtx};
use crate::surface::{parse, Decl, ParseError, Pos, Printer, SourceFile};
use crate::syntax::{name, Kind, Scheme, Term, Type};
use crate::typing::{check_term, infer_term, TyCtx, TypeError};

#[derive(Clone, Debug)]
pub enum Checked {
    Type { body: Type, kind: Kind },
    Let { scheme: Scheme, term: Term },
}

#[derive(Clone, Debug)]
pub struct CheckedDecl {
    pub name: String,
    pub pos: Pos,
    pub checked: Checked,
}

/// A type-checked program with elaborated let declarations.
#[derive(Clone, Debug)]
pub struct Program {
    pub source: SourceFile,
    pub decls: Vec<CheckedDecl>,
    pub main: Option<(Term, Scheme)>,
}

#[derive(Clone, Debug, Error)]
#[error("{pos}: in `{decl}`: {error}")]
pub struct CheckError {
    pub pos: Pos,
    pub decl: String,
    pub error: TypeError,
}

#[derive(Clone, Debug, Error)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Check(#[from] CheckError),
}

impl LoadError {
    pub fn pos(&self) -> Pos {
        match self {
            LoadError::Parse(e) => e.pos,
            LoadError::Check(e) => e.pos,
        }
    }
}

/// Parses and checks a program.
pub fn load(src: &str) -> Result<Program, LoadError> {
    Ok(check_source(parse(src)?)?)
}

pub fn check_source(source: SourceFile) -> Result<Program, CheckError> {
    let mut ctx = TyCtx::new();
    let mut decls = Vec::new();
    for d in &source.decls {
        let fail = |error| CheckError {
            pos: d.pos(),
            decl: d.name().to_string(),
            error,
        };
        let checked = match d {
            Decl::Type { body, .. } => {
                let kind = infer_kind(&KindCtx::new(), body).map_err(|e| fail(e.into()))?;
                Checked::Type {
                    body: body.clone(),
                    kind,
                }
            }
            Decl::Let {
                name: n, scheme, body, ..
            } => {
                let term = check_term(&ctx, body, scheme).map_err(fail)?;
                ctx.push_term(name(n), scheme.clone());
                Checked::Let {
                    scheme: scheme.clone(),
                    term,
                }
            }
        };
        decls.push(CheckedDecl {
            name: d.name().to_string(),
            pos: d.pos(),
            checked,
        });
    }
    let main = match &source.main {
        None => None,
        Some(m) => Some(infer_term(&ctx, m).map_err(|error| CheckError {
            pos: source.main_pos.unwrap_or_default(),
            decl: "main".into(),
            error,
        })?),
    };
    Ok(Program { source, decls, main })
}

fn abbreviate(printer: &mut Printer, name: &str, body: &Type) {
    printer
        .abbrevs
        .push((name.to_string(), crate::normalize::normalize_type(body)));
    printer.abbrevs.push((name.to_string(), body.clone()));
}

impl Program {
    pub fn lets(&self) -> impl Iterator<Item = (&str, &Scheme, &Term)> {
        self.decls.iter().filter_map(|d| match &d.checked {
            Checked::Let { scheme, term } => Some((d.name.as_str(), scheme, term)),
            Checked::Type { .. } => None,
        })
    }

    pub fn type_decl(&self, n: &str) -> Option<(&Type, &Kind)> {
        self.decls.iter().find_map(|d| match &d.checked {
            Checked::Type { body, kind } if d.name == n => Some((body, kind)),
            _ => None,
        })
    }

    pub fn let_decl(&self, n: &str) -> Option<(&Scheme, &Term)> {
        self.lets().find(|(m, _, _)| *m == n).map(|(_, s, t)| (s, t))
    }

    /// One line per declaration (and main), with types written using the
    /// program's own abbreviations.
    pub fn describe(&self) -> Vec<String> {
        let mut printer = Printer::default();
        let mut out = Vec::new();
        for d in &self.decls {
            match &d.checked {
                Checked::Type { body, kind } => {
                    out.push(format!("type {} :: {kind}", d.name));
                    abbreviate(&mut printer, &d.name, body);
                }
                Checked::Let { scheme, .. } => out.push(format!("let {} : {}", d.name, printer.scheme(scheme))),
            }
        }
        if let Some(s) = self.main_scheme() {
            out.push(format!("main : {}", printer.scheme(s)));
        }
        out
    }

    /// A printer that writes types using every type declaration of the
    /// program.
    pub fn printer(&self) -> Printer {
        let mut printer = Printer::default();
        for d in &self.decls {
            if let Checked::Type { body, .. } = &d.checked {
                abbreviate(&mut printer, &d.name, body);
            }
        }
        printer
    }

    pub fn main_scheme(&self) -> Option<&Scheme> {
        self.main.as_ref().map(|m| &m.1)
    }

    /// The closed elaborated program: the let declarations wrapped
    /// around the main term (`tt` if there is none).
    pub fn to_term(&self) -> Term {
        let main = match &self.main {
            Some((m, _)) => m.clone(),
            None => Term::prim_ann(crate::syntax::Prim::Tt, crate::syntax::PrimAnn::new(Kind::Star, vec![])),
        };
        self.wrap(main)
    }

    /// Closes a term that may mention the program's let declarations.
    pub fn wrap(&self, body: Term) -> Term {
        let lets: Vec<_> = self.lets().collect();
        lets.into_iter()
            .rev()
            .fold(body, |acc, (n, s, m)| Term::let_(n, s.clone(), m.clone(), acc))
    }

    /// A typing context holding the let declarations.
    pub fn context(&self) -> TyCtx {
        let mut ctx = TyCtx::new();
        for (n, s, _) in self.lets() {
            ctx.push_term(name(n), s.clone());
        }
        ctx
    }

    /// Parses `src` as a term in the scope of this program's declarations,
    /// elaborates it and closes it over the declarations.
    pub fn elaborate_in_scope(&self, src: &str) -> Result<(Term, Scheme), LoadError> {
        let text = format!(
            "{}\n{src};",
            crate::surface::print_file(&SourceFile {
                main: None,
                main_pos: None,
                ..self.source.clone()
            })
        );
        let f = parse(&text)?;
        let m = f.main.expect("a term was appended");
        let (t, s) = infer_term(&self.context(), &m).map_err(|error| CheckError {
            pos: Pos::default(),
            decl: "expression".into(),
            error,
        })?;
        Ok((self.wrap(t), s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::TypeError;

    #[test]
    fn kinds_of_declarations() {
        let p = load("type Free = \\f:* -> *. \\a:*. mu(\\X:*. a + f X); type One = 1;").unwrap();
        assert_eq!(p.type_decl("Free").unwrap().1.to_string(), "(* -> *) -> * -> *");
        assert_eq!(p.type_decl("One").unwrap().1, &Kind::Star);
        assert!(p.main.is_none());
    }

    #[test]
    fn error_positions() {
        let e = load("let a : 1 = tt;\nlet b : 0 = a;").unwrap_err();
        let LoadError::Check(e) = e else { panic!() };
        assert_eq!(e.decl, "b");
        assert_eq!(e.pos.line, 2);
        assert!(matches!(e.error, TypeError::TypeMismatch { .. }));
    }

    #[test]
    fn scoped_elaboration() {
        let p = load("let u : 1 = tt;").unwrap();
        let (m, s) = p.elaborate_in_scope("u").unwrap();
        assert_eq!(s, Scheme::mono(Type::One));
        assert!(matches!(m, Term::Let(..)));
    }
}
