//! Command-line driver: check files, print elaborated signatures, list
//! goals, and normalize definitions under chosen unfolding hypotheses.
//!
//! Exit codes: 0 success (including files with remaining goals), 1 for
//! elaboration or type errors, 2 for usage or I/O errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use utt::elab::{elaborate, Elaborator};
use utt::error::{ElabError, Span, SurfaceError};
use utt::nbe::normalize;
use utt::pretty::Printer;
use utt::prop::Prop;
use utt::surface::parse_program;
use utt::term::{TeleEntry, Telescope, Term};

#[derive(Parser)]
#[command(name = "utt", version, about = "A checker for definitions that unfold on demand")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Color {
    On,
    #[default]
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Elaborate and check a file
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        color: Color,
        /// Elide goal types deeper than this
        #[arg(long, default_value_t = 64)]
        max_goal_depth: usize,
    },
    /// Print the elaborated core signature
    Elaborate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        color: Color,
    },
    /// List the remaining goals
    Goals {
        file: PathBuf,
        /// Print goal types without applying the hypotheses in scope
        #[arg(long)]
        raw_goals: bool,
        #[arg(long, value_enum, default_value_t)]
        color: Color,
        #[arg(long, default_value_t = 64)]
        max_goal_depth: usize,
    },
    /// Normalize a definition's body under assumed unfoldings
    Normalize {
        file: PathBuf,
        /// The definition to normalize
        #[arg(long)]
        def: String,
        /// Assume this unfolding proposition (repeatable)
        #[arg(long = "assume")]
        assume: Vec<String>,
        #[arg(long, value_enum, default_value_t)]
        color: Color,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            file,
            color,
            max_goal_depth,
        } => with_elaborated(&file, color, |path, el| {
            if el.goals.is_empty() {
                println!("ok");
            } else {
                println!(
                    "{} goal{}",
                    el.goals.len(),
                    if el.goals.len() == 1 { "" } else { "s" }
                );
                print_goals(path, el, false, max_goal_depth);
            }
            ExitCode::SUCCESS
        }),
        Command::Elaborate { file, color } => with_elaborated(&file, color, |_, el| {
            print!("{}", Printer::new(&el.table).signature(&el.signature));
            ExitCode::SUCCESS
        }),
        Command::Goals {
            file,
            raw_goals,
            color,
            max_goal_depth,
        } => with_elaborated(&file, color, |path, el| {
            print_goals(path, el, raw_goals, max_goal_depth);
            ExitCode::SUCCESS
        }),
        Command::Normalize {
            file,
            def,
            assume,
            color,
        } => with_elaborated(&file, color, |_, el| run_normalize(el, &def, &assume, color)),
    }
}

fn with_elaborated(
    file: &PathBuf,
    color: Color,
    k: impl FnOnce(&str, &Elaborator) -> ExitCode,
) -> ExitCode {
    let path = file.display().to_string();
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: cannot read {path}: {e}", err_word(color));
            return ExitCode::from(2);
        }
    };
    let prog = match parse_program(&src) {
        Ok(p) => p,
        Err(e) => {
            eprint!("{}", surface_diagnostic(&src, &path, &e, color));
            return ExitCode::from(1);
        }
    };
    match elaborate(&prog) {
        Ok(el) => k(&path, &el),
        Err(e) => {
            eprint!("{}", elab_diagnostic(&src, &path, &e, color));
            ExitCode::from(1)
        }
    }
}

fn run_normalize(el: &Elaborator, def: &str, assume: &[String], color: Color) -> ExitCode {
    let Some(Term::Ext(a_tm, p, _)) = el.signature.const_type(def) else {
        eprintln!("{}: `{def}` does not name a definition", err_word(color));
        return ExitCode::from(1);
    };
    let mut hyps = Prop::top();
    for name in assume {
        if el.table.is_hidden_name(name) {
            eprintln!(
                "{}: proposition `{name}` belongs to an abstract definition and cannot be assumed",
                err_word(color)
            );
            return ExitCode::from(1);
        }
        match el.table.lookup(name) {
            Ok(q) => hyps = hyps.meet(q),
            Err(_) => {
                eprintln!("{}: unknown proposition `{name}`", err_word(color));
                return ExitCode::from(1);
            }
        }
    }
    let mut tele = Telescope::new();
    tele.push_hyp(hyps);
    let body = Term::Out(p.clone(), Box::new(Term::Const(def.to_owned())));
    let nf = normalize(&el.sig_env, &tele, a_tm, &body);
    println!("{}", Printer::new(&el.table).term(&[], &nf.0));
    ExitCode::SUCCESS
}

fn print_goals(path: &str, el: &Elaborator, raw: bool, max_depth: usize) {
    let printer = Printer::new(&el.table);
    for g in &el.goals {
        let ty = if raw { &g.raw_ty } else { &g.ty };
        let names = var_names(&g.tele);
        let ty_str = if ty.depth() > max_depth {
            "…".to_owned()
        } else {
            printer.term(&names, ty)
        };
        let mut tele_str = printer.telescope(&g.tele);
        if tele_str.is_empty() {
            tele_str = "·".to_owned();
        }
        let (line, col) = line_col_of(path, g.span);
        println!("{path}:{line}:{col} ⊢ {tele_str} ⊢ ?{} : {ty_str}", g.index);
    }
}

fn var_names(tele: &Telescope) -> Vec<String> {
    tele.entries()
        .iter()
        .filter_map(|e| match e {
            TeleEntry::TermVar { name, .. } => Some(name.clone()),
            TeleEntry::PropHyp(_) => None,
        })
        .collect()
}

fn line_col_of(path: &str, span: Span) -> (usize, usize) {
    match std::fs::read_to_string(path) {
        Ok(src) => line_col(&src, span.start),
        Err(_) => (0, 0),
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.bytes().filter(|&b| b == b'\n').count() + 1;
    let col = offset - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
    (line, col)
}

fn err_word(color: Color) -> String {
    match color {
        Color::On => "\u{1b}[31merror\u{1b}[0m".to_owned(),
        Color::Off => "error".to_owned(),
    }
}

fn header(color: Color, code: &str, msg: &str) -> String {
    match color {
        Color::On => format!("\u{1b}[31merror[{code}]\u{1b}[0m: {msg}\n"),
        Color::Off => format!("error[{code}]: {msg}\n"),
    }
}

fn excerpt(src: &str, path: &str, span: Span) -> String {
    let (line, col) = line_col(src, span.start);
    let text = src.lines().nth(line.saturating_sub(1)).unwrap_or("");
    let width = (span.end.saturating_sub(span.start)).clamp(1, text.len().max(1));
    let mut out = format!("  --> {path}:{line}:{col}\n");
    out.push_str(&format!("   | {text}\n"));
    out.push_str(&format!("   | {}{}\n", " ".repeat(col - 1), "^".repeat(width)));
    out
}

fn surface_diagnostic(src: &str, path: &str, e: &SurfaceError, color: Color) -> String {
    let code = match e {
        SurfaceError::Lex { .. } => "lex",
        SurfaceError::Parse { .. } => "parse",
        SurfaceError::DuplicateDef { .. } => "duplicate-def",
    };
    format!("{}{}", header(color, code, &e.to_string()), excerpt(src, path, e.span()))
}

fn elab_diagnostic(src: &str, path: &str, e: &ElabError, color: Color) -> String {
    let mut out = format!(
        "{}{}",
        header(color, e.code(), &e.to_string()),
        excerpt(src, path, e.span())
    );
    if let ElabError::ConvMismatch {
        expected, found, ..
    } = e
    {
        out.push_str(&format!("  expected: {expected}\n"));
        out.push_str(&format!("  found:    {found}\n"));
    }
    out
}
