mod text;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;
use ugt_core::discovery::{pipeline, run, Driver, PipelineOptions, Policy};
use ugt_core::dot::export_dot;
use ugt_core::efr::{efr_with, EfrOptions};
use ugt_core::profile::parse_profile;
use ugt_core::sce::{check_rsce, check_sce, RsceSearch};
use ugt_core::strategy::DEFAULT_STRATEGY_CAP;
use ugt_core::{exec, parse, serialize, validate, Error, Game};

#[derive(Parser, Debug)]
#[command(name = "ugt", version, about = "Games with unawareness: validation, rationalizability, self-confirming equilibrium and discovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Pure strategies enumerated per player before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_STRATEGY_CAP, value_parser = positive_u128)]
    strategy_cap: u128,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms; exit 1 when any is violated.
    Validate { file: PathBuf },
    /// Extensive-form rationalizable strategies, round by round.
    Efr { file: PathBuf },
    /// Is the profile a self-confirming equilibrium?
    Sce {
        file: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Is the profile a rationalizable self-confirming equilibrium?
    Rsce {
        file: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Run a discovery process until it absorbs.
    Discover {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write the trace JSON here; stdout then gets the absorbing game.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Discovery followed by an equilibrium search on the absorbing game.
    Pipeline {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Largest denominator tried in mixed candidates.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
        max_denominator: u32,
    },
    /// Graphviz rendering of trees and information sets.
    Dot { file: PathBuf },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long, default_value = "efr-lex-first", value_parser = parse_policy)]
    policy: PolicyArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64, value_parser = positive_usize)]
    max_steps: usize,
}

#[derive(Clone, Debug)]
struct PolicyArg(String);

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

fn parse_policy(s: &str) -> Result<PolicyArg, String> {
    Policy::parse(s).map(|_| PolicyArg(s.to_string())).ok_or_else(|| "expected efr-lex-first, efr-lex-last or efr-uniform".into())
}

fn positive_u128(s: &str) -> Result<u128, String> {
    s.parse::<u128>().ok().filter(|v| *v > 0).ok_or_else(|| "expected a positive integer".into())
}

fn positive_usize(s: &str) -> Result<usize, String> {
    s.parse::<usize>().ok().filter(|v| *v > 0).ok_or_else(|| "expected a positive integer".into())
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: String) -> Failure {
        Failure { code: 2, message }
    }
}

fn located(path: &Path, e: Error) -> Failure {
    let code = match e {
        Error::CapExceeded { .. } | Error::NotAbsorbed(_) => 3,
        Error::NoRsce => 1,
        _ => 2,
    };
    let message = match &e {
        Error::Parse { .. } => format!("{}:{e}", path.display()),
        _ => format!("{}: {e}", path.display()),
    };
    Failure { code, message }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Game, Failure> {
    parse(&read(path)?).map_err(|e| located(path, e))
}

/// Loads a game and refuses it unless every axiom holds.
fn load_valid(path: &Path) -> Result<Game, Failure> {
    let g = load(path)?;
    let report = validate(&g);
    if !report.ok {
        let mut message = format!("{}: game violates {} axiom condition(s)", path.display(), report.violations.len());
        for v in &report.violations {
            message.push_str(&format!("\n  {}: {}", v.axiom.tag(), v.detail));
        }
        return Err(Failure::input(message));
    }
    Ok(g)
}

fn json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn pick(format: Option<Format>, allowed: &[Format]) -> Result<Format, Failure> {
    match format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(Failure::input(format!("format {f:?} is not available for this command").to_lowercase())),
    }
}

/// Output text and the exit code for a successful evaluation.
fn execute(cli: &Cli) -> Result<(String, u8), Failure> {
    let efr_opts = EfrOptions { strategy_cap: cli.strategy_cap, ..EfrOptions::default() };
    match &cli.command {
        Command::Validate { file } => {
            let format = pick(cli.format, &[Format::Json, Format::Text])?;
            let report = validate(&load(file)?);
            let out = match format {
                Format::Json => json(&serde_json::to_value(&report).expect("report serializes")),
                _ => text::validation(&report),
            };
            Ok((out, if report.ok { 0 } else { 1 }))
        }
        Command::Efr { file } => {
            let format = pick(cli.format, &[Format::Text, Format::Json])?;
            let g = load_valid(file)?;
            let e = efr_with(&g, &efr_opts).map_err(|e| located(file, e))?;
            let out = match format {
                Format::Json => json(&e.to_json(&g).map_err(|e| located(file, e))?),
                _ => text::efr(&g, &e),
            };
            Ok((out, 0))
        }
        Command::Sce { file, profile } => {
            let format = pick(cli.format, &[Format::Json, Format::Text])?;
            let g = load_valid(file)?;
            let pi = parse_profile(&g, &read(profile)?).map_err(|e| located(profile, e))?;
            let r = check_sce(&g, &pi).map_err(|e| located(file, e))?;
            let out = match format {
                Format::Json => json(&r.to_json(&g).map_err(|e| located(file, e))?),
                _ => text::sce(&g, &r),
            };
            Ok((out, if r.verdict { 0 } else { 1 }))
        }
        Command::Rsce { file, profile } => {
            let format = pick(cli.format, &[Format::Json, Format::Text])?;
            let g = load_valid(file)?;
            let pi = parse_profile(&g, &read(profile)?).map_err(|e| located(profile, e))?;
            let e = efr_with(&g, &efr_opts).map_err(|e| located(file, e))?;
            let r = check_rsce(&g, &pi, &e).map_err(|e| located(file, e))?;
            let out = match format {
                Format::Json => json(&r.to_json(&g).map_err(|e| located(file, e))?),
                _ => text::rsce(&g, &r),
            };
            Ok((out, if r.verdict() { 0 } else { 1 }))
        }
        Command::Discover { file, run: args, trace } => {
            let format = pick(cli.format, &[Format::Json, Format::Text, Format::Dot])?;
            let g = load_valid(file)?;
            let policy = Policy::parse(&args.policy.0).expect("checked by clap");
            let driver = Driver::with_options(policy, efr_opts);
            let t = run(&g, &driver, args.seed, args.max_steps).map_err(|e| located(file, e))?;
            let trace_json = json(&t.to_json());
            let out = match (trace, format) {
                (Some(path), _) => {
                    std::fs::write(path, &trace_json).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                    match format {
                        Format::Dot => export_dot(t.last()),
                        _ => serialize(t.last()),
                    }
                }
                (None, Format::Json) => trace_json,
                (None, Format::Text) => text::trace(&t),
                (None, Format::Dot) => export_dot(t.last()),
            };
            Ok((out, 0))
        }
        Command::Pipeline { file, run: args, max_denominator } => {
            let format = pick(cli.format, &[Format::Json, Format::Text])?;
            let g = load_valid(file)?;
            let policy = Policy::parse(&args.policy.0).expect("checked by clap");
            let opts = PipelineOptions {
                seed: args.seed,
                max_steps: args.max_steps,
                search: RsceSearch { max_den: *max_denominator, ..RsceSearch::default() },
                efr: efr_opts,
            };
            let r = pipeline(&g, policy, &opts).map_err(|e| located(file, e))?;
            let out = match format {
                Format::Json => json(&r.to_json().map_err(|e| located(file, e))?),
                _ => text::pipeline(&r),
            };
            Ok((out, 0))
        }
        Command::Dot { file } => {
            pick(cli.format, &[Format::Dot])?;
            Ok((export_dot(&load(file)?), 0))
        }
    }
}

fn threads() -> Option<usize> {
    std::env::var("UGT_THREADS").ok()?.parse().ok().filter(|n| *n > 0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match threads() {
        Some(n) => exec::with_threads(n, || execute(&cli)),
        None => execute(&cli),
    };
    match result {
        Ok((out, code)) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, out).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(out.as_bytes()).map_err(|e| e.to_string())
                }
            };
            match written {
                Ok(()) => ExitCode::from(code),
                Err(m) => {
                    eprintln!("error: {m}");
                    ExitCode::from(2)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
