#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use xdt::corpus::{corpus_dir, load_corpus, load_file, CorpusEntry};
use xdt::kinding::{check_kind, check_pkind, synth_kind, KindCtx};
use xdt::normalize::{is_normal, normalize_type, redex_positions, rewrite_at};
use xdt::oracle::{denote, observe, observe_term, Observation};
use xdt::reduce::{decompositions, evaluate, is_value, step, DEFAULT_FUEL};
use xdt::surface::{parse, print_file, Decl, Pos, SourceFile};
use xdt::syntax::{shift, Kind, Prim, PrimAnn, Scheme, Term, Type};
use xdt::typing::{audit, TyCtx};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Runs `f` on a thread with a large stack.
pub fn with_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(1 << 29)
        .spawn(f)
        .expect("spawn")
        .join()
        .expect("worker thread panicked")
}

pub fn star() -> Kind {
    Kind::Star
}

pub fn random_kind(rng: &mut StdRng, depth: usize) -> Kind {
    if depth == 0 || rng.gen_bool(0.55) {
        Kind::Star
    } else {
        Kind::arrow(random_kind(rng, depth - 1), random_kind(rng, depth - 1))
    }
}

const TYPE_HINTS: [&str; 4] = ["X", "Y", "f", "a"];
const TERM_HINTS: [&str; 4] = ["x", "y", "k", "p"];

#[derive(Clone)]
struct Entry {
    kind: Kind,
    visible: bool,
}

/// Argument kinds needed to apply something of kind `k` until it has kind
/// `target`.
fn args_to(k: &Kind, target: &Kind) -> Option<Vec<Kind>> {
    let mut args = Vec::new();
    let mut cur = k;
    loop {
        if cur == target {
            return Some(args);
        }
        let (d, c) = cur.split_arrow()?;
        args.push(d.clone());
        cur = c;
    }
}

/// A random closed type of kind `k`. Redexes of every shape are produced
/// along the way.
pub fn well_kinded_type(rng: &mut StdRng, k: &Kind, fuel: usize) -> Type {
    gen_kinded(rng, &mut Vec::new(), k, fuel)
}

fn gen_kinded(rng: &mut StdRng, ctx: &mut Vec<Entry>, k: &Kind, fuel: usize) -> Type {
    let heads: Vec<(usize, Vec<Kind>)> = ctx
        .iter()
        .rev()
        .enumerate()
        .filter(|(_, e)| e.visible)
        .filter_map(|(i, e)| args_to(&e.kind, k).map(|a| (i, a)))
        .collect();
    let less = fuel.saturating_sub(1);
    loop {
        match rng.gen_range(0..12) {
            0 | 1 if !heads.is_empty() => {
                let (i, args) = heads.choose(rng).unwrap().clone();
                let head = Type::var(i, TYPE_HINTS[i % TYPE_HINTS.len()]);
                let args: Vec<Type> = args.iter().map(|a| gen_kinded(rng, ctx, a, less)).collect();
                return Type::apps(head, args);
            }
            2 if fuel > 0 => {
                let ka = random_kind(rng, 1);
                let f = gen_kinded(rng, ctx, &Kind::arrow(ka.clone(), k.clone()), less);
                let a = gen_kinded(rng, ctx, &ka, less);
                return Type::app(f, a);
            }
            3 | 4 => {
                if let Some((a, b)) = k.split_arrow() {
                    ctx.push(Entry {
                        kind: a.clone(),
                        visible: true,
                    });
                    let body = gen_kinded(rng, ctx, b, less);
                    ctx.pop();
                    return Type::lam(TYPE_HINTS.choose(rng).unwrap(), a.clone(), body);
                }
            }
            5 if fuel > 0 => return Type::mu(gen_kinded(rng, ctx, &Kind::arrow(k.clone(), k.clone()), less)),
            6 if fuel > 0 && *k == Kind::Star => {
                let mut hidden: Vec<Entry> = ctx
                    .iter()
                    .map(|e| Entry {
                        visible: false,
                        ..e.clone()
                    })
                    .collect();
                let d = gen_kinded(rng, &mut hidden, &Kind::Star, less);
                let c = gen_kinded(rng, ctx, &Kind::Star, less);
                return Type::fun(d, c);
            }
            7 => return Type::Zero,
            8 => return Type::One,
            9 if fuel > 0 => return Type::prod(gen_kinded(rng, ctx, k, less), gen_kinded(rng, ctx, k, less)),
            10 if fuel > 0 => return Type::sum(gen_kinded(rng, ctx, k, less), gen_kinded(rng, ctx, k, less)),
            11 if fuel > 0 => {
                if let Some((a, _)) = k.split_arrow() {
                    let g = gen_kinded(rng, ctx, k, less);
                    let body = Type::app(shift(&g, 1), Type::var(0, "X"));
                    return Type::lam("X", a.clone(), body);
                }
            }
            _ => {}
        }
    }
}

/// A random type over `scope` type variables; not necessarily well-kinded.
pub fn any_type(rng: &mut StdRng, scope: usize, fuel: usize) -> Type {
    let less = fuel.saturating_sub(1);
    loop {
        match rng.gen_range(0..9) {
            0 if scope > 0 => {
                let i = rng.gen_range(0..scope);
                return Type::var(i, TYPE_HINTS[i % TYPE_HINTS.len()]);
            }
            1 if fuel > 0 => return Type::app(any_type(rng, scope, less), any_type(rng, scope, less)),
            2 if fuel > 0 => {
                let k = random_kind(rng, 2);
                return Type::lam(TYPE_HINTS.choose(rng).unwrap(), k, any_type(rng, scope + 1, less));
            }
            3 if fuel > 0 => return Type::mu(any_type(rng, scope, less)),
            4 if fuel > 0 => return Type::fun(any_type(rng, scope, less), any_type(rng, scope, less)),
            5 => return Type::Zero,
            6 => return Type::One,
            7 if fuel > 0 => return Type::prod(any_type(rng, scope, less), any_type(rng, scope, less)),
            8 if fuel > 0 => return Type::sum(any_type(rng, scope, less), any_type(rng, scope, less)),
            _ => {}
        }
    }
}

pub fn any_scheme(rng: &mut StdRng, scope: usize, fuel: usize) -> Scheme {
    let n = rng.gen_range(0..3);
    let binders = (0..n)
        .map(|i| (xdt::syntax::name(TYPE_HINTS[i]), random_kind(rng, 2)))
        .collect();
    Scheme {
        binders,
        body: any_type(rng, scope + n, fuel),
    }
}

fn any_ann(rng: &mut StdRng, p: &Prim, scope: usize) -> Option<PrimAnn> {
    rng.gen_bool(0.3).then(|| {
        let kind = random_kind(rng, 2);
        let types = (0..p.annotation_width()).map(|_| any_type(rng, scope, 1)).collect();
        PrimAnn::new(kind, types)
    })
}

/// A random well-scoped term; not necessarily well-typed.
pub fn any_term(rng: &mut StdRng, types: usize, terms: usize, fuel: usize) -> Term {
    let less = fuel.saturating_sub(1);
    let sub = |rng: &mut StdRng, types, terms| Arc::new(any_term(rng, types, terms, less));
    loop {
        let p = match rng.gen_range(0..19) {
            0 if terms > 0 => {
                let i = rng.gen_range(0..terms);
                return Term::var(i, TERM_HINTS[i % TERM_HINTS.len()]);
            }
            1 if fuel > 0 => return Term::App(sub(rng, types, terms), sub(rng, types, terms)),
            2 if fuel > 0 => {
                let param = rng.gen_bool(0.5).then(|| any_type(rng, types, 2));
                let hint = *TERM_HINTS.choose(rng).unwrap();
                return Term::Lam(hint.into(), param, sub(rng, types, terms + 1));
            }
            3 if fuel > 0 => {
                let s = any_scheme(rng, types, 2);
                let hint = *TERM_HINTS.choose(rng).unwrap();
                return Term::Let(hint.into(), s, sub(rng, types, terms), sub(rng, types, terms + 1));
            }
            4 if fuel > 0 => {
                let hint = *TYPE_HINTS.choose(rng).unwrap();
                return Term::TyLam(hint.into(), random_kind(rng, 2), sub(rng, types + 1, terms));
            }
            5 if fuel > 0 => return Term::TyApp(sub(rng, types, terms), any_type(rng, types, 2)),
            6 if fuel > 0 => return Term::Ascribe(sub(rng, types, terms), any_scheme(rng, types, 2)),
            7 => Prim::In,
            8 => Prim::Unin,
            9 if fuel > 0 => Prim::Map(any_type(rng, types, 2), sub(rng, types, terms)),
            10 if fuel > 0 => Prim::Fold(any_type(rng, types, 2), sub(rng, types, terms)),
            11 => Prim::Fst,
            12 => Prim::Snd,
            13 if fuel > 0 => Prim::Fork(sub(rng, types, terms), sub(rng, types, terms)),
            14 => Prim::Inl,
            15 => Prim::Inr,
            16 if fuel > 0 => Prim::Join(sub(rng, types, terms), sub(rng, types, terms)),
            17 => Prim::Tt,
            18 => Prim::Absurd,
            _ => continue,
        };
        let ann = any_ann(rng, &p, types);
        return Term::Prim(p, ann);
    }
}

/// A random program: closed type declarations, let declarations that may
/// refer to earlier ones, and an optional main term.
pub fn any_source(rng: &mut StdRng) -> SourceFile {
    let mut decls = Vec::new();
    for i in 0..rng.gen_range(0..3) {
        decls.push(Decl::Type {
            name: format!("D{i}"),
            body: any_type(rng, 0, 3),
            pos: Pos::default(),
        });
    }
    let lets = rng.gen_range(0..3);
    for i in 0..lets {
        let scheme = any_scheme(rng, 0, 2);
        let body = any_term(rng, 0, i, 3);
        decls.push(Decl::Let {
            name: format!("l{i}"),
            scheme,
            body,
            pos: Pos::default(),
        });
    }
    let main = rng.gen_bool(0.8).then(|| any_term(rng, 0, lets, 4));
    SourceFile {
        decls,
        main,
        main_pos: None,
    }
}

pub const TYPE_FORMS: [&str; 9] = [
    "type-var", "type-app", "type-lam", "mu", "fun", "zero", "one", "prod", "sum",
];
pub const KIND_FORMS: [&str; 2] = ["kind-star", "kind-arrow"];
pub const TERM_FORMS: [&str; 19] = [
    "var", "app", "lam", "let", "tylam", "tyapp", "ascribe", "in", "unin", "map", "fold", "fst", "snd", "fork", "inl",
    "inr", "join", "tt", "absurd",
];

pub fn kind_forms(k: &Kind, out: &mut BTreeSet<&'static str>) {
    match k {
        Kind::Star => {
            out.insert("kind-star");
        }
        Kind::Arrow(a, b) => {
            out.insert("kind-arrow");
            kind_forms(a, out);
            kind_forms(b, out);
        }
    }
}

pub fn type_forms(t: &Type, out: &mut BTreeSet<&'static str>) {
    let tag = match t {
        Type::Var(..) => "type-var",
        Type::App(..) => "type-app",
        Type::Lam(_, k, _) => {
            kind_forms(k, out);
            "type-lam"
        }
        Type::Mu(_) => "mu",
        Type::Fun(..) => "fun",
        Type::Zero => "zero",
        Type::One => "one",
        Type::Prod(..) => "prod",
        Type::Sum(..) => "sum",
    };
    out.insert(tag);
    match t {
        Type::App(a, b) | Type::Fun(a, b) | Type::Prod(a, b) | Type::Sum(a, b) => {
            type_forms(a, out);
            type_forms(b, out);
        }
        Type::Lam(_, _, b) | Type::Mu(b) => type_forms(b, out),
        _ => {}
    }
}

pub fn term_forms(m: &Term, out: &mut BTreeSet<&'static str>) {
    let scheme = |s: &Scheme, out: &mut BTreeSet<&'static str>| {
        for (_, k) in &s.binders {
            kind_forms(k, out);
        }
        type_forms(&s.body, out);
    };
    match m {
        Term::Var(..) => {
            out.insert("var");
        }
        Term::App(f, a) => {
            out.insert("app");
            term_forms(f, out);
            term_forms(a, out);
        }
        Term::Lam(_, p, b) => {
            out.insert("lam");
            if let Some(p) = p {
                type_forms(p, out);
            }
            term_forms(b, out);
        }
        Term::Let(_, s, a, b) => {
            out.insert("let");
            scheme(s, out);
            term_forms(a, out);
            term_forms(b, out);
        }
        Term::TyLam(_, k, b) => {
            out.insert("tylam");
            kind_forms(k, out);
            term_forms(b, out);
        }
        Term::TyApp(f, t) => {
            out.insert("tyapp");
            type_forms(t, out);
            term_forms(f, out);
        }
        Term::Ascribe(a, s) => {
            out.insert("ascribe");
            scheme(s, out);
            term_forms(a, out);
        }
        Term::Prim(p, ann) => {
            out.insert(p.keyword());
            if let Prim::Map(t, _) | Prim::Fold(t, _) = p {
                type_forms(t, out);
            }
            if let Some(a) = ann {
                kind_forms(&a.kind, out);
                a.types.iter().for_each(|t| type_forms(t, out));
            }
            p.components().into_iter().for_each(|c| term_forms(c, out));
        }
    }
}

/// Fraction of `all` present in `seen`, with the missing forms.
pub fn coverage(seen: &BTreeSet<&'static str>, all: &[&'static str]) -> (f64, Vec<&'static str>) {
    let missing: Vec<_> = all.iter().copied().filter(|f| !seen.contains(f)).collect();
    ((all.len() - missing.len()) as f64 / all.len() as f64, missing)
}

/// Rewrites redexes at randomly chosen positions until none is left.
pub fn normalize_randomly(rng: &mut StdRng, t: &Type, max_steps: usize) -> Result<Type, String> {
    let mut cur = t.clone();
    for _ in 0..max_steps {
        let positions = redex_positions(&cur);
        let Some(p) = positions.choose(rng) else { return Ok(cur) };
        cur = rewrite_at(&cur, p).ok_or_else(|| format!("no redex at {p:?} in `{cur}`"))?;
    }
    Err(format!("no normal form within {max_steps} rewrites from `{t}`"))
}

#[derive(Default, Debug)]
pub struct NormStats {
    pub types: usize,
    pub with_redexes: usize,
    pub rewrites_checked: usize,
    pub forms: BTreeSet<&'static str>,
}

/// Idempotence, random-order confluence and kind preservation of type
/// normalization on `count` generated types.
pub fn check_normalizer(seed: u64, count: usize) -> Result<NormStats, String> {
    let mut rng = rng(seed);
    let mut stats = NormStats::default();
    let empty = KindCtx::new();
    for _ in 0..count {
        let k = random_kind(&mut rng, 2);
        let t = well_kinded_type(&mut rng, &k, 4);
        type_forms(&t, &mut stats.forms);
        kind_forms(&k, &mut stats.forms);
        check_kind(&empty, &t, &k).map_err(|e| format!("generated `{t}` is not of kind {k}: {e}"))?;
        let pk = synth_kind(&empty, &t).map_err(|e| e.to_string())?;
        let n = normalize_type(&t);
        if !is_normal(&n) {
            return Err(format!("`{n}`, the normal form of `{t}`, has a redex"));
        }
        if normalize_type(&n) != n {
            return Err(format!("normalizing `{n}` again changes it"));
        }
        check_kind(&empty, &n, &k).map_err(|e| format!("`{n}` (from `{t}`) lost kind {k}: {e}"))?;
        check_pkind(&empty, &n, &pk).map_err(|e| format!("`{n}` (from `{t}`) lost its kind: {e}"))?;
        if !redex_positions(&t).is_empty() {
            stats.with_redexes += 1;
        }
        for _ in 0..2 {
            let r = normalize_randomly(&mut rng, &t, 100_000)?;
            if r != n {
                return Err(format!("`{t}` reaches `{r}` and `{n}`"));
            }
            stats.rewrites_checked += 1;
        }
        stats.types += 1;
    }
    Ok(stats)
}

#[derive(Default, Debug)]
pub struct RoundTripStats {
    pub files: usize,
    pub forms: BTreeSet<&'static str>,
}

pub fn round_trip(f: &SourceFile) -> Result<(), String> {
    let text = print_file(f);
    let back = parse(&text).map_err(|e| format!("printed program does not parse: {e}\n{text}"))?;
    if !back.alpha_eq(f) {
        return Err(format!(
            "round trip changed the program:\n{text}\n{}",
            print_file(&back)
        ));
    }
    Ok(())
}

/// parse ∘ print on generated programs.
pub fn check_generated_round_trips(seed: u64, count: usize) -> Result<RoundTripStats, String> {
    let mut rng = rng(seed);
    let mut stats = RoundTripStats::default();
    for _ in 0..count {
        let f = any_source(&mut rng);
        for d in &f.decls {
            match d {
                Decl::Type { body, .. } => type_forms(body, &mut stats.forms),
                Decl::Let { scheme, body, .. } => {
                    term_forms(body, &mut stats.forms);
                    type_forms(&scheme.body, &mut stats.forms);
                }
            }
        }
        if let Some(m) = &f.main {
            term_forms(m, &mut stats.forms);
        }
        round_trip(&f)?;
        stats.files += 1;
    }
    Ok(stats)
}

/// parse ∘ print on the source and on the elaborated form of every
/// corpus file.
pub fn check_corpus_round_trips() -> Result<usize, String> {
    let entries = load_corpus().map_err(|e| e.to_string())?;
    for e in &entries {
        round_trip(&e.program.source).map_err(|m| format!("{}: {m}", e.name()))?;
        let m = e.program.to_term();
        let printed = xdt::surface::print_term(&m);
        let back = xdt::surface::parse_term(&printed).map_err(|err| format!("{}: {err}", e.name()))?;
        if back != m {
            return Err(format!("{}: elaborated program does not round-trip", e.name()));
        }
    }
    Ok(entries.len())
}

/// Observes `m` at `t` with both evaluators and requires them to agree.
pub fn observe_both(m: &Term, t: &Type) -> Result<Observation, String> {
    let small = observe_term(m, t, DEFAULT_FUEL).map_err(|e| format!("small-step: {e}"))?;
    let big = denote(m)
        .and_then(|v| observe(&v, t))
        .map_err(|e| format!("oracle: {e}"))?;
    if small != big {
        return Err(format!("small-step gives {small}, oracle gives {big}"));
    }
    Ok(small)
}

pub fn oracle_observe(m: &Term, t: &Type) -> Result<Observation, String> {
    denote(m).and_then(|v| observe(&v, t)).map_err(|e| e.to_string())
}

/// A corpus program used as a scope for elaborating generated terms.
pub struct Scope {
    pub entry: CorpusEntry,
}

impl Scope {
    pub fn load(name: &str) -> Scope {
        let path = corpus_dir().join(format!("{name}.xdt"));
        Scope {
            entry: load_file(&path).unwrap_or_else(|e| panic!("{e}")),
        }
    }

    /// Elaborates a monomorphic term and closes it over the declarations.
    pub fn term(&self, src: &str) -> Result<(Term, Type), String> {
        let (m, s) = self
            .entry
            .program
            .elaborate_in_scope(src)
            .map_err(|e| format!("`{src}`: {e}"))?;
        if !s.is_mono() {
            return Err(format!("`{src}` has polymorphic type {s}"));
        }
        Ok((m, s.body))
    }

    pub fn observe(&self, src: &str) -> Result<Observation, String> {
        let (m, t) = self.term(src)?;
        observe_both(&m, &t).map_err(|e| format!("`{src}`: {e}"))
    }
}

pub fn nat_source(n: u64) -> String {
    n.to_string()
}

/// Programs over the Catch signature, at nesting level `L`: a program
/// at level `L` computes a value of `Prog Catch^L Nat`.
#[derive(Clone, Debug)]
pub enum CatchProg {
    Ret(Box<CatchVal>),
    Throw,
    Catch(Box<CatchProg>, Box<CatchProg>),
}

#[derive(Clone, Debug)]
pub enum CatchVal {
    Nat(u64),
    Prog(CatchProg),
}

pub fn catch_type(level: usize) -> String {
    if level == 0 {
        "Nat".into()
    } else {
        format!("Prog Catch ({})", catch_type(level - 1))
    }
}

impl CatchProg {
    pub fn random(rng: &mut StdRng, level: usize, fuel: usize) -> CatchProg {
        match rng.gen_range(0..5) {
            0 | 1 => {
                let v = if level == 0 {
                    CatchVal::Nat(rng.gen_range(0..6))
                } else {
                    CatchVal::Prog(CatchProg::random(rng, level - 1, fuel.saturating_sub(1)))
                };
                CatchProg::Ret(Box::new(v))
            }
            2 => CatchProg::Throw,
            _ if fuel > 0 && level < 2 => {
                let p = if rng.gen_bool(0.4) {
                    CatchProg::Throw
                } else {
                    CatchProg::random(rng, level + 1, fuel - 1)
                };
                CatchProg::Catch(Box::new(p), Box::new(CatchProg::random(rng, level + 1, fuel - 1)))
            }
            _ => CatchProg::Throw,
        }
    }

    /// The term, at the given level, in the scope of `catch.xdt`.
    pub fn source(&self, level: usize) -> String {
        let ty = catch_type(level);
        match self {
            CatchProg::Ret(v) => match &**v {
                CatchVal::Nat(n) => format!("(ret @[{ty}] {})", nat_source(*n)),
                CatchVal::Prog(p) => format!("(ret @[{ty}] {})", p.source(level - 1)),
            },
            CatchProg::Throw => format!("(throw @[{ty}])"),
            CatchProg::Catch(p, h) => format!("(catch @[{ty}] {} {})", p.source(level + 1), h.source(level + 1)),
        }
    }

    /// Reference semantics: `None` when the program aborts with an
    /// uncaught throw.
    pub fn run(&self) -> Option<u64> {
        match self.result()? {
            CatchVal::Nat(n) => Some(*n),
            CatchVal::Prog(_) => None,
        }
    }

    fn result(&self) -> Option<&CatchVal> {
        match self {
            CatchProg::Ret(v) => Some(v),
            CatchProg::Throw => None,
            CatchProg::Catch(p, h) => {
                let k = p.result().or_else(|| h.result())?;
                match k {
                    CatchVal::Prog(k) => k.result(),
                    CatchVal::Nat(_) => None,
                }
            }
        }
    }

    /// Whether running the program passes through a throw that a catch
    /// intercepts.
    pub fn catches_a_throw(&self) -> bool {
        match self {
            CatchProg::Ret(v) => matches!(&**v, CatchVal::Prog(p) if p.catches_a_throw()),
            CatchProg::Throw => false,
            CatchProg::Catch(p, h) => p.result().is_none() || p.catches_a_throw() || h.catches_a_throw(),
        }
    }

    pub fn throws(&self) -> bool {
        match self {
            CatchProg::Ret(v) => matches!(&**v, CatchVal::Prog(p) if p.throws()),
            CatchProg::Throw => true,
            CatchProg::Catch(p, h) => p.throws() || h.throws(),
        }
    }
}

/// Reads `Maybe Nat` (`1 + Nat`) back from an observation.
pub fn as_maybe_nat(o: &Observation) -> Option<Option<u64>> {
    match o {
        Observation::TagL(u) if **u == Observation::Unit => Some(None),
        Observation::TagR(n) => n.as_nat().map(Some),
        _ => None,
    }
}

/// Programs in `Free (Choose + Tick) Nat`, in the scope of `reorder.xdt`.
#[derive(Clone, Debug)]
pub enum ChoiceProg {
    Ret(u64),
    Stop,
    Tick(Box<ChoiceProg>),
    Choose(Box<ChoiceProg>, Box<ChoiceProg>),
}

impl ChoiceProg {
    pub fn random(rng: &mut StdRng, fuel: usize) -> ChoiceProg {
        match rng.gen_range(0..6) {
            0 => ChoiceProg::Ret(rng.gen_range(0..4)),
            1 => ChoiceProg::Stop,
            2 | 3 if fuel > 0 => ChoiceProg::Tick(Box::new(ChoiceProg::random(rng, fuel - 1))),
            4 | 5 if fuel > 0 => ChoiceProg::Choose(
                Box::new(ChoiceProg::random(rng, fuel - 1)),
                Box::new(ChoiceProg::random(rng, fuel - 1)),
            ),
            _ => ChoiceProg::Ret(rng.gen_range(0..4)),
        }
    }

    pub fn source(&self) -> String {
        match self {
            ChoiceProg::Ret(n) => format!("(ret {n})"),
            ChoiceProg::Stop => "stop".into(),
            ChoiceProg::Tick(p) => format!("(tick {})", p.source()),
            ChoiceProg::Choose(a, b) => format!("(choose {} {})", a.source(), b.source()),
        }
    }

    pub fn has_op(&self) -> bool {
        !matches!(self, ChoiceProg::Ret(_))
    }
}

pub fn random_list(rng: &mut StdRng) -> String {
    let n = rng.gen_range(0..5);
    let mut s = "(nil @[Nat])".to_string();
    for _ in 0..n {
        s = format!("(cons @[Nat] {} {s})", rng.gen_range(0..5));
    }
    s
}

pub fn random_expr_layer(rng: &mut StdRng) -> String {
    if rng.gen_bool(0.4) {
        format!("(inl {} : Expr Nat)", rng.gen_range(0..6))
    } else {
        format!(
            "(inr (pair @[Nat] @[Nat] {} {}) : Expr Nat)",
            rng.gen_range(0..6),
            rng.gen_range(0..6)
        )
    }
}

/// Functions on Nat written without helper declarations.
pub const NAT_FUNCTIONS: [&str; 4] = [
    "(\\n. n : Nat => Nat)",
    "(\\n. in (inr n) : Nat => Nat)",
    "(\\n. in (inr (in (inr n))) : Nat => Nat)",
    "(\\n. in (inl tt) : Nat => Nat)",
];

#[derive(Default, Debug)]
pub struct LawStats {
    pub identity: usize,
    pub composition: usize,
}

/// Identity and composition laws of `map[functor]` at `Nat` on
/// `count` values produced by `value`.
pub fn check_map_laws(
    scope: &Scope,
    functor: &str,
    count: usize,
    rng: &mut StdRng,
    mut value: impl FnMut(&mut StdRng) -> String,
) -> Result<LawStats, String> {
    let mut stats = LawStats::default();
    let arrow = format!("{functor} Nat => {functor} Nat");
    for _ in 0..count {
        let v = value(rng);
        let plain = scope.observe(&v)?;
        let id = scope.observe(&format!("(map[{functor}](\\x. x) : {arrow}) {v}"))?;
        if id != plain {
            return Err(format!("map[{functor}] id changes {v}: {plain} vs {id}"));
        }
        stats.identity += 1;
        let g = NAT_FUNCTIONS.choose(rng).unwrap();
        let h = NAT_FUNCTIONS.choose(rng).unwrap();
        let fused = scope.observe(&format!("(map[{functor}](\\x. {g} ({h} x)) : {arrow}) {v}"))?;
        let split = scope.observe(&format!(
            "(map[{functor}]({g}) : {arrow}) ((map[{functor}]({h}) : {arrow}) {v})"
        ))?;
        if fused != split {
            return Err(format!(
                "map[{functor}] composition fails on {v} with {g} and {h}: {fused} vs {split}"
            ));
        }
        stats.composition += 1;
    }
    Ok(stats)
}

#[derive(Default, Debug)]
pub struct StepStats {
    pub programs: usize,
    pub steps: usize,
}

/// Subject reduction, progress and unique decomposition along the whole
/// evaluation of a closed program of type `s`.
pub fn check_trace(m: &Term, s: &Scheme) -> Result<usize, String> {
    let ctx = TyCtx::new();
    audit(&ctx, m, s).map_err(|e| format!("the program itself does not type-check: {e}"))?;
    let mut cur = m.clone();
    let mut n = 0;
    loop {
        let ds = decompositions(&cur);
        if is_value(&cur) {
            if !ds.is_empty() {
                return Err(format!("value `{cur}` has a redex"));
            }
            return Ok(n);
        }
        if ds.len() != 1 {
            return Err(format!("{} decompositions of `{cur}` after {n} steps", ds.len()));
        }
        let next = match step(&cur) {
            Ok(Some((_, next))) => next,
            Ok(None) => return Err(format!("non-value `{cur}` does not step")),
            Err(e) => return Err(format!("step {n}: {e}")),
        };
        audit(&ctx, &next, s).map_err(|e| format!("type lost at step {}: {e}", n + 1))?;
        cur = next;
        n += 1;
        if n > DEFAULT_FUEL {
            return Err("out of fuel".into());
        }
    }
}

/// Observations before and after every step of a trace agree.
pub fn check_trace_observations(m: &Term, t: &Type) -> Result<usize, String> {
    let ev = evaluate(m, DEFAULT_FUEL, true).map_err(|e| e.to_string())?;
    let first = oracle_observe(m, t)?;
    let mut n = 0;
    for (rule, _, after) in ev.triples(m) {
        let o = oracle_observe(after, t)?;
        if o != first {
            return Err(format!("{rule} step {n} changes the observation from {first} to {o}"));
        }
        n += 1;
    }
    Ok(n)
}

pub fn catch_programs(seed: u64, count: usize) -> Vec<CatchProg> {
    let mut rng = rng(seed);
    let mut out = fixed_catch_programs();
    while out.len() < count {
        out.push(CatchProg::random(&mut rng, 0, 3));
    }
    out
}

pub fn ret(n: u64) -> CatchProg {
    CatchProg::Ret(Box::new(CatchVal::Nat(n)))
}

pub fn ret_prog(p: CatchProg) -> CatchProg {
    CatchProg::Ret(Box::new(CatchVal::Prog(p)))
}

pub fn catch(p: CatchProg, h: CatchProg) -> CatchProg {
    CatchProg::Catch(Box::new(p), Box::new(h))
}

fn fixed_catch_programs() -> Vec<CatchProg> {
    vec![
        ret(3),
        CatchProg::Throw,
        catch(CatchProg::Throw, ret_prog(ret(7))),
        catch(CatchProg::Throw, CatchProg::Throw),
        catch(ret_prog(CatchProg::Throw), ret_prog(ret(1))),
        catch(ret_prog(ret(2)), CatchProg::Throw),
    ]
}
