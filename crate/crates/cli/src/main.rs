//! `lcatch`: check, run and inspect λ-catch programs.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lambda_catch::confluence::complete_development;
use lambda_catch::metatheory::{run_property, GenConfig, Property};
use lambda_catch::reduction::{enumerate_redexes, evaluate, OutcomeKind, DEFAULT_FUEL, TRACE_CAP};
use lambda_catch::stdlib::PRELUDE_SRC;
use lambda_catch::surface::{parse_program, parse_term, print_with, PrintOptions, SourceProgram};
use lambda_catch::syntax::Term;
use lambda_catch::typing::{derive_with_open_conts, fmt_path, infer, TypingEnv};

const PARSE_ERROR: u8 = 1;
const TYPE_ERROR: u8 = 2;
const UNCAUGHT_THROW: u8 = 3;
const OUT_OF_FUEL: u8 = 4;
const PROPERTY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "lcatch", version, about = "A call-by-value λ-calculus with catch and throw")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check every definition (and `main`) of a file.
    Check {
        file: PathBuf,
        /// Load these definitions first.
        #[arg(long, value_name = "PATH")]
        prelude: Option<PathBuf>,
    },
    /// Evaluate a term under call-by-value.
    Eval {
        #[command(flatten)]
        input: Input,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_name = "N", default_value_t = DEFAULT_FUEL)]
        max_steps: u64,
        /// Print the number of steps taken.
        #[arg(long)]
        count: bool,
        #[command(flatten)]
        output: Output,
    },
    /// List every redex of a term.
    Redexes {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
    /// Apply the complete development some number of times.
    Develop {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'n', long, value_name = "ROUNDS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        rounds: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Run randomized property checks.
    Meta {
        /// Comma-separated property names; all of them by default.
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum generated term size (24 for typed, 12 for untyped properties).
        #[arg(long)]
        size: Option<usize>,
    },
}

#[derive(Args)]
struct Input {
    /// The term to work on.
    #[arg(short = 'e', long = "expr", value_name = "EXPR", conflicts_with = "file", required_unless_present = "file")]
    expr: Option<String>,
    /// A program file; its `main` is the term.
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    /// Use these definitions instead of the bundled prelude.
    #[arg(long, value_name = "PATH", conflicts_with = "no_prelude")]
    prelude: Option<PathBuf>,
    #[arg(long)]
    no_prelude: bool,
}

#[derive(Args)]
struct Output {
    /// Print numerals as `cons` chains instead of `#n`.
    #[arg(long)]
    no_sugar: bool,
}

impl Output {
    fn show(&self, t: &Term) -> String {
        print_with(t, PrintOptions { sugar: !self.no_sugar })
    }
}

/// A failure that ends the command with the given exit code.
struct Exit(u8, String);

type Res<T> = Result<T, Exit>;

fn read(path: &PathBuf) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Exit(PARSE_ERROR, format!("{}: {e}", path.display())))
}

fn parse_file(src: &str, origin: &str) -> Res<SourceProgram> {
    parse_program(src).map_err(|e| Exit(PARSE_ERROR, format!("{origin}:{e}")))
}

impl Input {
    fn prelude(&self) -> Res<SourceProgram> {
        match (&self.prelude, self.no_prelude) {
            (_, true) => Ok(SourceProgram::default()),
            (Some(path), _) => parse_file(&read(path)?, &path.display().to_string()),
            (None, false) => parse_file(PRELUDE_SRC, "<prelude>"),
        }
    }

    /// The input term with every definition substituted in.
    fn term(&self) -> Res<Term> {
        let mut program = self.prelude()?;
        let main = match (&self.expr, &self.file) {
            (Some(src), _) => parse_term(src).map_err(|e| Exit(PARSE_ERROR, format!("<expr>:{e}")))?,
            (None, Some(path)) => {
                let origin = path.display().to_string();
                let file = parse_file(&read(path)?, &origin)?;
                program.defs.extend(file.defs);
                file.main.ok_or_else(|| Exit(PARSE_ERROR, format!("{origin}: no `main` term")))?
            }
            (None, None) => unreachable!("clap requires one input"),
        };
        Ok(program.expand(&main))
    }
}

fn check(file: &PathBuf, prelude: Option<&PathBuf>) -> Res<()> {
    let mut program = match prelude {
        Some(p) => parse_file(&read(p)?, &p.display().to_string())?,
        None => SourceProgram::default(),
    };
    let skip = program.defs.len();
    let own = parse_file(&read(file)?, &file.display().to_string())?;
    program.defs.extend(own.defs);
    program.main = own.main;

    let mut items: Vec<(String, Term)> = program.expanded_defs().into_iter().skip(skip).collect();
    if let Some(main) = program.expanded_main() {
        items.push(("main".into(), main));
    }
    let mut failed = 0;
    for (name, term) in items {
        match infer(&TypingEnv::new(), &term) {
            Ok(ty) => println!("{name} : {ty}"),
            Err(e) => {
                eprintln!("error: {name}: {e}");
                failed += 1;
            }
        }
    }
    if failed > 0 {
        return Err(Exit(TYPE_ERROR, format!("{failed} definition(s) failed to type-check")));
    }
    Ok(())
}

fn eval(input: &Input, trace: bool, max_steps: u64, count: bool, output: &Output) -> Res<()> {
    let t = input.term()?;
    derive_with_open_conts(&TypingEnv::new(), &t).map_err(|e| Exit(TYPE_ERROR, e.to_string()))?;
    let out = evaluate(&t, max_steps, trace);
    for (k, ev) in out.trace.iter().flatten().enumerate() {
        println!("step {}: [{}] {}", k + 1, ev.rule, output.show(&ev.result));
    }
    if out.trace_truncated {
        eprintln!("note: trace truncated after {TRACE_CAP} steps");
    }
    let result = match &out.kind {
        OutcomeKind::Value(v) => {
            println!("{}", output.show(v));
            Ok(())
        }
        OutcomeKind::UncaughtThrow { cont, payload } => {
            println!("{}", output.show(&Term::throw(cont.as_str(), payload.clone())));
            Err(Exit(UNCAUGHT_THROW, format!("uncaught throw to `{cont}`")))
        }
        OutcomeKind::OutOfFuel(t) => {
            println!("{}", output.show(t));
            Err(Exit(OUT_OF_FUEL, format!("no value after {} steps", out.steps)))
        }
        OutcomeKind::IllFormed(t) => Err(Exit(TYPE_ERROR, format!("stuck at {}", output.show(t)))),
    };
    if count {
        println!("steps: {}", out.steps);
    }
    result
}

fn redexes(input: &Input, output: &Output) -> Res<()> {
    for ev in enumerate_redexes(&input.term()?) {
        println!("[{}] @ {} -> {}", ev.rule, fmt_path(&ev.path), output.show(&ev.result));
    }
    Ok(())
}

fn develop(input: &Input, rounds: u64, output: &Output) -> Res<()> {
    let t = (0..rounds).fold(input.term()?, |t, _| complete_development(&t));
    println!("{}", output.show(&t));
    Ok(())
}

fn meta(props: &[String], cases: usize, seed: u64, size: Option<usize>) -> Res<()> {
    let props: Vec<Property> = if props.is_empty() {
        Property::ALL.to_vec()
    } else {
        props.iter().map(|s| s.trim().parse()).collect::<Result<_, String>>().map_err(|e| Exit(PARSE_ERROR, e))?
    };
    let mut failed = false;
    for p in props {
        let max_size = size.unwrap_or(if p.typed() { 24 } else { 12 });
        let cfg = GenConfig { seed, max_size, typed: p.typed(), ..GenConfig::default() };
        let report = run_property(p, cases, &cfg);
        print!("{}", report.render_lines());
        failed |= !report.passed();
    }
    if failed {
        return Err(Exit(PROPERTY_FAILED, "some properties failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { PARSE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Check { file, prelude } => check(file, prelude.as_ref()),
        Command::Eval { input, trace, max_steps, count, output } => eval(input, *trace, *max_steps, *count, output),
        Command::Redexes { input, output } => redexes(input, output),
        Command::Develop { input, rounds, output } => develop(input, *rounds, output),
        Command::Meta { props, cases, seed, size } => meta(props, *cases, *seed, *size),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
