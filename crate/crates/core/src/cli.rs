//! The `xdt` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::normalize::{normalize_term_types, normalize_type};
use crate::oracle::{denote_with_fuel, is_observable, observe, observe_term};
use crate::program::{load, LoadError, Program};
use crate::reduce::{evaluate_with, EvalError, DEFAULT_FUEL};
use crate::surface::{parse, print_file, print_kind, print_type, SourceFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_FUEL: i32 = 2;
pub const EXIT_STUCK: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "xdt",
    version,
    about = "Checker and evaluator for extensible data type programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Print one JSON object per line.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kind-check and type-check every declaration.
    Check { file: PathBuf },
    /// Evaluate the main term.
    Eval {
        file: PathBuf,
        /// Print every reduction step.
        #[arg(long)]
        trace: bool,
        /// Compare against the denotational interpreter.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = parse_fuel)]
        fuel: usize,
    },
    /// Print the kind of a type declaration.
    Kind { file: PathBuf, name: String },
    /// Print the normal form of a type written in the scope of the file.
    Norm { file: PathBuf, ty: String },
}

fn parse_fuel(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("fuel must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

struct Out<'a> {
    w: &'a mut dyn Write,
    json: bool,
}

impl Out<'_> {
    fn line(&mut self, text: &str, obj: serde_json::Value) {
        let _ = if self.json {
            writeln!(self.w, "{obj}")
        } else {
            writeln!(self.w, "{text}")
        };
    }

    fn diag(&mut self, code: &str, message: &str, line: usize, col: usize, file: &str) {
        let text = if line > 0 {
            format!("{file}:{line}:{col}: {code}: {message}")
        } else {
            format!("{file}: {code}: {message}")
        };
        self.line(
            &text,
            json!({ "code": code, "message": message, "line": line, "col": col }),
        );
    }
}

/// Runs the command line and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let mut o = Out { w: out, json: cli.json };
    let file = match &cli.command {
        Command::Check { file }
        | Command::Eval { file, .. }
        | Command::Kind { file, .. }
        | Command::Norm { file, .. } => file,
    };
    let shown = file.display().to_string();
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            o.diag("io", &e.to_string(), 0, 0, &shown);
            return EXIT_CHECK;
        }
    };
    let program = match load(&src) {
        Ok(p) => p,
        Err(e) => {
            let code = match &e {
                LoadError::Parse(_) => "parse",
                LoadError::Check(_) => "type",
            };
            let message = match &e {
                LoadError::Parse(p) => p.message.clone(),
                LoadError::Check(c) => format!("in `{}`: {}", c.decl, c.error),
            };
            o.diag(code, &message, e.pos().line, e.pos().col, &shown);
            return EXIT_CHECK;
        }
    };
    match cli.command {
        Command::Check { .. } => check(&program, &mut o),
        Command::Kind { name, .. } => match program.type_decl(&name) {
            Some((_, k)) => {
                o.line(&print_kind(k), json!({ "name": name, "kind": print_kind(k) }));
                EXIT_OK
            }
            None => {
                o.diag("unknown", &format!("no type declaration named `{name}`"), 0, 0, &shown);
                EXIT_CHECK
            }
        },
        Command::Norm { ty, .. } => norm(&program.source, &ty, &mut o, &shown),
        Command::Eval {
            trace, oracle, fuel, ..
        } => eval(&program, trace, oracle, fuel, &mut o),
    }
}

fn check(p: &Program, o: &mut Out) -> i32 {
    for line in p.describe() {
        let obj = match line.split_once(" :: ") {
            Some((d, k)) => json!({ "decl": d.trim_start_matches("type "), "kind": k }),
            None => {
                let (d, t) = line.split_once(" : ").unwrap_or((&line, ""));
                json!({ "decl": d.trim_start_matches("let "), "type": t })
            }
        };
        o.line(&line, obj);
    }
    o.line("OK", json!({ "status": "ok" }));
    EXIT_OK
}

fn norm(source: &SourceFile, ty: &str, o: &mut Out, shown: &str) -> i32 {
    let decls = SourceFile {
        main: None,
        main_pos: None,
        ..source.clone()
    };
    let text = format!("{}type NormTarget__ = {ty};", print_file(&decls));
    let parsed = parse(&text);
    let t = match parsed.map(|f| f.type_decl("NormTarget__").cloned()) {
        Ok(Some(t)) => t,
        Ok(None) => unreachable!("the declaration was appended"),
        Err(e) => {
            o.diag("parse", &e.message, 0, 0, shown);
            return EXIT_CHECK;
        }
    };
    if let Err(e) = crate::kinding::infer_kind(&crate::kinding::KindCtx::new(), &t) {
        o.diag("kind", &e.to_string(), 0, 0, shown);
        return EXIT_CHECK;
    }
    let n = print_type(&normalize_type(&t));
    o.line(&n, json!({ "normal": n }));
    EXIT_OK
}

fn eval(p: &Program, trace: bool, oracle: bool, fuel: usize, o: &mut Out) -> i32 {
    let Some((_, scheme)) = &p.main else {
        o.diag("eval", "the file has no main term", 0, 0, "");
        return EXIT_CHECK;
    };
    let m = p.to_term();
    let mut n = 0;
    let mut printer = p.printer();
    let result = evaluate_with(
        &m,
        fuel,
        |s| {
            n += 1;
            if trace {
                let t = printer.term(&normalize_term_types(&s.term).erase_annotations());
                o.line(
                    &format!("{n:>6} {:<10} {t}", s.rule),
                    json!({ "step": n, "rule": s.rule, "term": t }),
                );
            }
        },
        false,
    );
    let ev = match result {
        Ok(ev) => ev,
        Err(e @ EvalError::OutOfFuel { .. }) => {
            o.diag("fuel", &e.to_string(), 0, 0, "");
            return EXIT_FUEL;
        }
        Err(e @ EvalError::StuckTerm { .. }) => {
            o.diag("stuck", &e.to_string(), 0, 0, "");
            return EXIT_STUCK;
        }
    };
    let value = printer.term(&normalize_term_types(&ev.value).erase_annotations());
    let ty = p.printer().scheme(scheme);
    o.line(
        &format!("{value} : {ty}"),
        json!({ "value": value, "type": ty, "steps": ev.steps }),
    );
    let observable = scheme.is_mono() && is_observable(&scheme.body);
    if observable {
        match observe_term(&m, &scheme.body, fuel) {
            Ok(obs) => {
                let nat = obs.as_nat().map(|k| format!(" = {k}")).unwrap_or_default();
                o.line(
                    &format!("observed: {obs}{nat}"),
                    json!({ "observed": obs.to_string(), "nat": obs.as_nat() }),
                );
            }
            Err(e) => {
                o.diag("observe", &e.to_string(), 0, 0, "");
                return EXIT_CHECK;
            }
        }
    }
    if oracle {
        if !observable {
            o.diag("oracle", &format!("type `{ty}` is not observable"), 0, 0, "");
            return EXIT_CHECK;
        }
        let small = observe_term(&m, &scheme.body, fuel);
        let big = denote_with_fuel(&m, fuel).and_then(|v| observe(&v, &scheme.body));
        let show = |r: &Result<crate::oracle::Observation, crate::oracle::OracleError>| match r {
            Ok(v) => v.to_string(),
            Err(e) => format!("error: {e}"),
        };
        let agree = matches!((&small, &big), (Ok(a), Ok(b)) if a == b);
        o.line(
            &format!("small-step: {}", show(&small)),
            json!({ "small_step": show(&small) }),
        );
        o.line(&format!("oracle:     {}", show(&big)), json!({ "oracle": show(&big) }));
        let verdict = if agree { "AGREE" } else { "DISAGREE" };
        o.line(verdict, json!({ "verdict": verdict }));
        if !agree {
            return EXIT_CHECK;
        }
    }
    EXIT_OK
}
