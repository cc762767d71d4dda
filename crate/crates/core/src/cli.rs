//! The `codeco` command-line tool.
//!
//! Exit codes: 0 success, 1 negative result (invalid grammar, rejected or
//! incomplete input, ambiguity or counterexample found), 2 usage or input
//! error, 3 budget exceeded.

use std::io::{Read, Write};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::generate::{self, GenerateConfig, GenerateError, DEFAULT_NODE_BUDGET};
use crate::grammar::Grammar;
use crate::notation::{parse_grammar_with_warnings, LoadError, Severity};
use crate::oracle::{self, OracleConfig, OracleError};
use crate::parser::ParseState;
use crate::validate::validate_grammar;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "codeco", version, about = "Codeco grammars: validation, predictive parsing and grammar checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Grammar file (.codeco)
    grammar: PathBuf,
    /// Start category (defaults to the grammar's start)
    #[arg(long)]
    start: Option<String>,
    /// Tokens of the sentence
    tokens: Vec<String>,
    /// Read whitespace-separated tokens from standard input
    #[arg(long)]
    stdin: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a grammar file and print its diagnostics
    Validate { grammar: PathBuf },
    /// Print the tokens that can follow the given ones, one per line
    Complete(Input),
    /// Parse a sentence and optionally print its trees
    Parse {
        #[command(flatten)]
        input: Input,
        /// Print one tree per derivation
        #[arg(long)]
        trees: bool,
        /// Print trees as JSON instead of indented text
        #[arg(long)]
        json: bool,
    },
    /// Print every sentence up to a length, once per derivation
    Generate {
        grammar: PathBuf,
        #[arg(long)]
        max_tokens: usize,
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
    /// Report sentences with more than one derivation
    CheckAmbiguity {
        grammar: PathBuf,
        #[arg(long)]
        max_tokens: usize,
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Print the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Report sentences of the first grammar that the second rejects
    CheckSubset {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        max_tokens: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP completion service
    Serve {
        grammar_dir: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Idle time in seconds before a session is dropped
        #[arg(long, default_value_t = 1800)]
        idle_timeout: u64,
    },
    /// Brute-force reference results, for debugging
    #[command(hide = true)]
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 8)]
        max_tokens: usize,
        /// What to compute: sentences, count, or continuations
        #[arg(long, default_value = "continuations")]
        mode: String,
    },
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut std::io::stdin().lock(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the tool with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdin, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "codeco: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

impl From<GenerateError> for Failure {
    fn from(e: GenerateError) -> Self {
        let code = match e {
            GenerateError::BudgetExceeded(_) | GenerateError::DepthExceeded(_) => EXIT_BUDGET,
            GenerateError::UnknownStart(_) => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::UnknownStart(_) => EXIT_USAGE,
            _ => EXIT_BUDGET,
        };
        Failure(code, e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Grammar, Failure> {
    let text = read_file(path)?;
    crate::notation::load_grammar(&text).map_err(|e| {
        let lines: Vec<String> = match e {
            LoadError::Syntax(d) => d.iter().map(|d| format!("{}:{d}", path.display())).collect(),
            LoadError::Invalid(d) => d.iter().map(|d| format!("{}: {d}", path.display())).collect(),
        };
        Failure(EXIT_USAGE, format!("cannot load grammar\n{}", lines.join("\n")))
    })
}

fn start_of(g: &Grammar, start: &Option<String>) -> String {
    start.clone().unwrap_or_else(|| g.start().to_string())
}

fn tokens_of(input: &Input, stdin: &mut dyn Read) -> Result<Vec<String>, Failure> {
    let mut tokens = input.tokens.clone();
    if input.stdin {
        let mut text = String::new();
        stdin.read_to_string(&mut text)?;
        tokens.extend(text.split_whitespace().map(str::to_string));
    }
    Ok(tokens)
}

fn session(g: Grammar, start: &str) -> Result<ParseState, Failure> {
    ParseState::new(Arc::new(g), start).map_err(|e| Failure(EXIT_USAGE, e.to_string()))
}

fn execute(cmd: Command, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Validate { grammar } => {
            let text = read_file(&grammar)?;
            let (g, diags) = parse_grammar_with_warnings(&text);
            for d in &diags {
                writeln!(out, "{}:{d}", grammar.display())?;
            }
            let Some(g) = g else { return Ok(EXIT_USAGE) };
            let problems = validate_grammar(&g);
            for d in &problems {
                writeln!(out, "{}: error: {d}", grammar.display())?;
            }
            if !problems.is_empty() {
                return Ok(EXIT_NEGATIVE);
            }
            let warnings = diags.iter().filter(|d| d.severity == Severity::Warning).count();
            writeln!(err, "{}: {} rules, {} warnings", grammar.display(), g.rule_count(), warnings)?;
            Ok(EXIT_OK)
        }
        Command::Complete(input) => {
            let g = load(&input.grammar)?;
            let start = start_of(&g, &input.start);
            let mut st = session(g, &start)?;
            for t in tokens_of(&input, stdin)? {
                st = match st.feed_token(&t) {
                    Ok(next) => next,
                    Err(r) => {
                        writeln!(err, "codeco: {r}")?;
                        return Ok(EXIT_NEGATIVE);
                    }
                };
            }
            for o in st.next_tokens() {
                writeln!(out, "{o}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Parse { input, trees, json } => {
            let g = load(&input.grammar)?;
            let start = start_of(&g, &input.start);
            let fresh = session(g, &start)?;
            let tokens = tokens_of(&input, stdin)?;
            let st = tokens.iter().fold(fresh, |st, t| st.feed_unchecked(t));
            if !st.is_complete() {
                writeln!(out, "incomplete")?;
                return Ok(EXIT_NEGATIVE);
            }
            let count = st.derivation_count();
            if !json {
                writeln!(out, "complete: {count} derivation{}", if count == 1 { "" } else { "s" })?;
            }
            if trees || json {
                let all = st.extract_trees();
                if json {
                    let v: Vec<_> = all.iter().map(|t| t.to_json()).collect();
                    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("JSON values serialize"))?;
                } else {
                    for (i, t) in all.iter().enumerate() {
                        writeln!(out, "tree {}:", i + 1)?;
                        write!(out, "{}", t.render())?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Generate { grammar, max_tokens, start, budget } => {
            let g = load(&grammar)?;
            let start = start_of(&g, &start);
            let cfg = GenerateConfig { max_tokens, node_budget: budget, trees: false };
            let mut io_err = None;
            generate::generate(&g, &start, &cfg, &mut |w, _| match writeln!(out, "{}", w.join(" ")) {
                Ok(()) => ControlFlow::Continue(()),
                Err(e) => {
                    io_err = Some(e);
                    ControlFlow::Break(())
                }
            })?;
            if let Some(e) = io_err {
                return Err(e.into());
            }
            Ok(EXIT_OK)
        }
        Command::CheckAmbiguity { grammar, max_tokens, start, budget, json } => {
            let g = load(&grammar)?;
            let start = start_of(&g, &start);
            let report = generate::check_ambiguity(&g, &start, max_tokens, budget)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("reports serialize"))?;
            } else {
                write!(out, "{report}")?;
            }
            Ok(if report.is_ambiguous() { EXIT_NEGATIVE } else { EXIT_OK })
        }
        Command::CheckSubset { a, b, max_tokens, budget, json } => {
            let ga = load(&a)?;
            let gb = load(&b)?;
            let (sa, sb) = (ga.start().to_string(), gb.start().to_string());
            let report = generate::check_subset(&ga, &sa, Arc::new(gb), &sb, max_tokens, budget)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("reports serialize"))?;
            } else {
                write!(out, "{report}")?;
            }
            Ok(if report.counterexamples.is_empty() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Serve { grammar_dir, port, idle_timeout } => {
            if !grammar_dir.is_dir() {
                return Err(Failure(EXIT_USAGE, format!("{}: not a directory", grammar_dir.display())));
            }
            if port == 0 {
                return Err(Failure(EXIT_USAGE, "port must be between 1 and 65535".into()));
            }
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::service::serve(&grammar_dir, port, Duration::from_secs(idle_timeout)))
                .map_err(|e| Failure(EXIT_USAGE, e.to_string()))?;
            Ok(EXIT_OK)
        }
        Command::Oracle { input, max_tokens, mode } => {
            let g = load(&input.grammar)?;
            let start = start_of(&g, &input.start);
            let tokens = tokens_of(&input, stdin)?;
            let cfg = OracleConfig { max_tokens, ..Default::default() };
            match mode.as_str() {
                "sentences" => {
                    for (s, n) in oracle::enumerate_naive(&g, &start, &cfg)? {
                        writeln!(out, "{n}\t{}", s.join(" "))?;
                    }
                }
                "count" => writeln!(out, "{}", oracle::recognize_naive(&g, &start, &tokens, &cfg)?)?,
                "continuations" => {
                    for t in oracle::continuations_naive(&g, &start, &tokens, &cfg)? {
                        writeln!(out, "{t}")?;
                    }
                }
                other => return Err(Failure(EXIT_USAGE, format!("unknown oracle mode `{other}`"))),
            }
            Ok(EXIT_OK)
        }
    }
}

