//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse/validation error,
//! 3 certificate or bound violation, 4 oracle guard exceeded. Data goes to
//! standard output as JSON with sorted keys; diagnostics go to standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::arena::{generate_arena, parse_arena_scaled, serialize_arena, Arena};
use crate::morphism::{build_morphism, MorphismOutcome};
use crate::oracle::{oracle_winning_set, OracleError};
use crate::payoff::{format_rational, mp_value, satisfies, UltimatelyPeriodicWord, Variant};
use crate::selftest;
use crate::solver::{check_certificate, play_report, simulate, solve, value, Label, SolveResult};
use crate::universal::{u_edge, UVertex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_GUARD: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "meanpayoff", version, about = "Mean-payoff games via the universal graph U")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a game and print the certificate.
    Solve {
        arena: PathBuf,
        /// Also write the certificate to this file.
        #[arg(long)]
        emit_cert: Option<PathBuf>,
    },
    /// Check a certificate against an arena.
    CheckCert { arena: PathBuf, cert: PathBuf },
    /// Print the optimal mean payoff from a vertex as p/q.
    Value {
        arena: PathBuf,
        #[arg(long)]
        vertex: String,
    },
    /// Play a certified strategy against a random opponent.
    Simulate {
        arena: PathBuf,
        cert: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Build the morphism from G[root] into U (owners are ignored).
    Morphism {
        arena: PathBuf,
        #[arg(long)]
        root: String,
    },
    /// Evaluate the mean payoff of prefix.cycle^omega.
    MpEval {
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        prefix: String,
        #[arg(long, allow_hyphen_values = true)]
        cycle: String,
        #[arg(long, default_value = "limsup-strict")]
        variant: String,
    },
    /// Evaluate the edge predicate (m,t) -w-> (m',t') of U.
    #[command(allow_negative_numbers = true)]
    UEdge {
        m: u64,
        t: u64,
        w: i64,
        m2: u64,
        t2: u64,
    },
    /// Winning region by exhaustive strategy enumeration.
    Oracle { arena: PathBuf },
    /// Generate a seeded random arena.
    Gen {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'd')]
        d: usize,
        #[arg(short = 'w')]
        wmax: i64,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites on seeded corpora.
    Selftest {
        #[arg(long)]
        quick: bool,
    },
}

/// A failed command: exit code plus message for standard error.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    writeln!(out, "{text}").map_err(|e| Failure::input(format!("write failed: {e}")))
}

fn line(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(|e| Failure::input(format!("write failed: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_arena(path: &Path, stderr: &mut dyn Write) -> Result<Arena, Failure> {
    let (arena, factor) =
        parse_arena_scaled(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    if let Some(factor) = factor {
        let _ = writeln!(stderr, "rational weights scaled by L={factor}");
    }
    Ok(arena)
}

fn load_cert(path: &Path) -> Result<SolveResult, Failure> {
    SolveResult::from_json(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn json_int(x: i128) -> Value {
    i64::try_from(x).map_or_else(|_| Value::String(x.to_string()), Value::from)
}

fn parse_weights(text: &str) -> Result<Vec<i64>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|_| Failure::usage(format!("bad weight {s:?}"))))
        .collect()
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    match command {
        Command::Solve { arena, emit_cert } => {
            let a = load_arena(&arena, stderr)?;
            let result = solve(&a).map_err(Failure::input)?;
            let doc = result.to_json();
            if let Some(path) = emit_cert {
                let text = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
                fs::write(&path, text + "\n")
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            }
            emit(stdout, &doc)?;
            Ok(EXIT_OK)
        }
        Command::CheckCert { arena, cert } => {
            let a = load_arena(&arena, stderr)?;
            let r = load_cert(&cert)?;
            let violations = check_certificate(&a, &r).map_err(Failure::input)?;
            emit(stdout, &json!({ "ok": violations.is_empty(), "violations": violations }))?;
            Ok(if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Value { arena, vertex } => {
            let a = load_arena(&arena, stderr)?;
            let v = value(&a, &vertex).map_err(Failure::input)?;
            line(stdout, &format_rational(&v))?;
            Ok(EXIT_OK)
        }
        Command::Simulate { arena, cert, from, steps, seed } => {
            if steps == 0 {
                return Err(Failure::usage("--steps must be at least 1"));
            }
            let a = load_arena(&arena, stderr)?;
            let r = load_cert(&cert)?;
            let start = match r.label(&from) {
                Some(Label::Finite(t)) => t,
                _ => return Err(Failure::input(format!("vertex {from:?} is not in Eve's winning region"))),
            };
            let play = simulate(&a, &r, &from, steps, seed).map_err(Failure::input)?;
            let report = play_report(&play, r.measure.m, start);
            let ok = report["bound_ok"] == Value::Bool(true);
            emit(stdout, &report)?;
            Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Morphism { arena, root } => {
            let a = load_arena(&arena, stderr)?;
            let doc = match build_morphism(&a, &root).map_err(Failure::input)? {
                MorphismOutcome::Built(phi) => json!({ "m": phi.m, "labels": phi.labels }),
                MorphismOutcome::Refuted(w) => {
                    json!({ "failure": { "cycle": w.cycle, "sum": json_int(w.sum) } })
                }
            };
            emit(stdout, &doc)?;
            Ok(EXIT_OK)
        }
        Command::MpEval { prefix, cycle, variant } => {
            let variant: Variant = variant.parse().map_err(|e: crate::payoff::PayoffError| Failure::usage(e.to_string()))?;
            let word = UltimatelyPeriodicWord::new(parse_weights(&prefix)?, parse_weights(&cycle)?)
                .map_err(|e| Failure::usage(e.to_string()))?;
            line(stdout, &format_rational(&mp_value(&word)))?;
            line(stdout, &satisfies(&word, variant).to_string())?;
            Ok(EXIT_OK)
        }
        Command::UEdge { m, t, w, m2, t2 } => {
            let (Some(u), Some(v)) = (UVertex::new(m, t), UVertex::new(m2, t2)) else {
                return Err(Failure::usage("levels must be at least 1"));
            };
            line(stdout, &u_edge(u, w, v).to_string())?;
            Ok(EXIT_OK)
        }
        Command::Oracle { arena } => {
            let a = load_arena(&arena, stderr)?;
            match oracle_winning_set(&a) {
                Ok(set) => {
                    emit(stdout, &json!({ "winning_eve": set }))?;
                    Ok(EXIT_OK)
                }
                Err(e @ OracleError::GuardExceeded { .. }) => {
                    Err(Failure { code: EXIT_GUARD, message: e.to_string() })
                }
            }
        }
        Command::Gen { n, d, wmax, seed, out } => {
            let a = generate_arena(n, d, wmax, seed).map_err(|e| Failure::usage(e.to_string()))?;
            let text = serialize_arena(&a) + "\n";
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
                None => stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Failure::input(format!("write failed: {e}")))?,
            }
            Ok(EXIT_OK)
        }
        Command::Selftest { quick } => {
            let passed = selftest::run(if quick { selftest::Scale::Quick } else { selftest::Scale::Full }, stdout);
            Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}
