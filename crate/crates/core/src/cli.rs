//! Command-line front end. [`run`] does all the work and returns the text
//! to print and the exit code, so the binary is a thin wrapper.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alphabet::DistributedAlphabet;
use crate::async_automata::{Acceptance, AsyncAutomaton};
use crate::closure::{classify_locally_safety, closure_failure};
use crate::gamma::{is_gamma_infinite_lasso, muller_to_buchi, single_tuple_buchi};
use crate::monitorability::{
    brute_force_local_monitorable, decide_local_monitorable_with, decide_word_monitorable,
    gadget_from_nfa, BruteVerdict, MonOptions,
};
use crate::omega::{BuchiAutomaton, Dfa, Nfa, ValidationMode};
use crate::runtime::{simulate, Schedule};
use crate::synthesis::{synthesize_monitor_with, VerdictAutomaton};
use crate::trace::Trace;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: crate::Error },
    #[error(transparent)]
    Lib(#[from] crate::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser, Debug)]
#[command(
    name = "locmon",
    version,
    about = "Local monitorability of trace languages"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide local monitorability of a trace-closed Büchi language.
    CheckLocalMon {
        #[arg(long)]
        lang: PathBuf,
        #[arg(long)]
        alph: PathBuf,
        /// Also run the bounded definitional search with bounds K1 K2 DEPTH.
        #[arg(long, num_args = 3, value_names = ["K1", "K2", "DEPTH"])]
        brute: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Validation::Full)]
        validation: Validation,
    },
    /// Decide monitorability of an ω-word language.
    WordMon {
        #[arg(long)]
        buchi: PathBuf,
    },
    /// Build the Büchi automaton that is monitorable iff the NFA is universal.
    Gadget {
        #[arg(long)]
        nfa: PathBuf,
        #[arg(long, default_value = "b")]
        fresh: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Synthesize a verdict automaton.
    Synthesize(SynthArgs),
    /// Run a system automaton under a schedule, optionally monitored.
    Simulate(SimArgs),
    /// Test whether a finite trace lies in the prime closure of a language.
    Closure {
        #[arg(long)]
        lang: PathBuf,
        #[arg(long)]
        alph: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Classify a finite-word language (and optional ω-part) as locally safety.
    Classify {
        #[arg(long)]
        dfa: PathBuf,
        #[arg(long)]
        alph: PathBuf,
        #[arg(long)]
        omega: Option<PathBuf>,
    },
    /// Γ-infinite lassos and acceptance conversion.
    Gamma {
        #[command(subcommand)]
        command: GammaCommand,
    },
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    lang: PathBuf,
    #[arg(long, conflicts_with = "complement")]
    colang: Option<PathBuf>,
    /// Compute the complement automaton (the default without --colang).
    #[arg(long)]
    complement: bool,
    #[arg(long)]
    alph: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Validation::Full)]
    validation: Validation,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    alph: PathBuf,
    #[arg(long)]
    monitor: Option<PathBuf>,
    #[arg(long, conflicts_with = "random")]
    script: Option<String>,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GammaCommand {
    /// Check that `u|v` denotes a Γ-infinite lasso.
    Check {
        #[arg(long)]
        alph: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        gamma: Vec<String>,
        #[arg(long)]
        lasso: String,
    },
    /// Convert a Muller condition to the conjunctive Büchi condition.
    Convert {
        #[arg(long)]
        aa: PathBuf,
        #[arg(long)]
        alph: PathBuf,
        #[arg(long, default_value_t = 64)]
        bound: usize,
        /// Produce a single-tuple Büchi condition via counters.
        #[arg(long)]
        single: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Validation {
    Full,
    Prefix,
    Skip,
}

impl From<Validation> for ValidationMode {
    fn from(v: Validation) -> Self {
        match v {
            Validation::Full => ValidationMode::Full,
            Validation::Prefix => ValidationMode::PrefixOnly,
            Validation::Skip => ValidationMode::Skip,
        }
    }
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok((stdout, code)) => Outcome {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: 2,
        },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load<T>(path: &Path, f: impl FnOnce(&str) -> crate::Result<T>) -> Result<T, CliError> {
    let text = read(path)?;
    f(&text).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_alph(path: &Path) -> Result<DistributedAlphabet, CliError> {
    load(path, DistributedAlphabet::parse)
}

/// Writes `text` to `output` and returns a one-line note, or returns the
/// text itself when there is no output file.
fn emit(output: Option<&Path>, text: String, note: String) -> Result<String, CliError> {
    match output {
        Some(p) => {
            write(p, &text)?;
            Ok(format!("{note}\n"))
        }
        None => Ok(text),
    }
}

fn execute(cmd: &Command) -> Result<(String, i32), CliError> {
    match cmd {
        Command::CheckLocalMon {
            lang,
            alph,
            brute,
            validation,
        } => {
            let alph = load_alph(alph)?;
            let b = load(lang, |t| BuchiAutomaton::parse_for(&alph, t))?;
            let opts = MonOptions {
                validation: (*validation).into(),
                ..MonOptions::default()
            };
            let report = decide_local_monitorable_with(&b, &alph, &opts)?;
            let mut out = format!("{}\n", report.render(alph.letter_names()));
            if let Some(bounds) = brute {
                let (k1, k2, d) = (bounds[0], bounds[1], bounds[2]);
                let bv = brute_force_local_monitorable(&b, &alph, k1, k2, d)?;
                out.push_str(&match bv {
                    BruteVerdict::Monitorable => "brute=monitorable\n".to_string(),
                    BruteVerdict::NotMonitorable { witness } => {
                        format!(
                            "brute=not-monitorable witness={}\n",
                            alph.format_word(&witness)
                        )
                    }
                    BruteVerdict::Unknown => "brute=unknown\n".to_string(),
                });
            }
            Ok((out, if report.verdict { 0 } else { 1 }))
        }
        Command::WordMon { buchi } => {
            let b = load(buchi, |t| BuchiAutomaton::parse(t, None))?;
            let report = decide_word_monitorable(&b)?;
            Ok((
                format!("{}\n", report.render(b.letter_names())),
                if report.verdict { 0 } else { 1 },
            ))
        }
        Command::Gadget { nfa, fresh, output } => {
            let a = load(nfa, |t| Nfa::parse(t, None))?;
            let b = gadget_from_nfa(&a, fresh)?;
            let note = format!(
                "gadget states={} letters={}",
                b.num_states(),
                b.num_letters()
            );
            Ok((emit(output.as_deref(), b.to_text(), note)?, 0))
        }
        Command::Synthesize(args) => {
            let alph = load_alph(&args.alph)?;
            let b = load(&args.lang, |t| BuchiAutomaton::parse_for(&alph, t))?;
            let bc = match &args.colang {
                Some(p) => Some(load(p, |t| BuchiAutomaton::parse_for(&alph, t))?),
                None => None,
            };
            let va = synthesize_monitor_with(&b, bc.as_ref(), &alph, args.validation.into())?;
            let note = format!(
                "monitor states={} views={}",
                va.num_states(),
                va.index().len()
            );
            Ok((emit(args.output.as_deref(), va.to_text(), note)?, 0))
        }
        Command::Simulate(args) => {
            let alph = load_alph(&args.alph)?;
            let (system, _) = load(&args.system, |t| AsyncAutomaton::parse(&alph, t))?;
            let monitor = match &args.monitor {
                Some(p) => Some(load(p, VerdictAutomaton::parse)?),
                None => None,
            };
            let schedule = match (&args.script, args.random) {
                (Some(s), false) => Schedule::Script(alph.parse_word(s)?),
                (None, true) => Schedule::Random,
                _ => {
                    return Err(CliError::Usage(
                        "give exactly one of --script or --random".into(),
                    ))
                }
            };
            let report = simulate(&system, monitor.as_ref(), &schedule, args.seed, args.steps)?;
            let text = report.render(&system);
            let note = format!("wrote {} events", report.events.len());
            Ok((emit(args.out.as_deref(), text, note)?, 0))
        }
        Command::Closure { lang, alph, word } => {
            let alph = load_alph(alph)?;
            let b = load(lang, |t| BuchiAutomaton::parse_for(&alph, t))?;
            let t = Trace::from_word(&alph, &alph.parse_word(word)?)?;
            let out = match closure_failure(&b, &t) {
                None => "in_closure=true\n".to_string(),
                Some(p) => format!(
                    "in_closure=false failing_prime={}\n",
                    alph.format_word(p.normal_form())
                ),
            };
            Ok((out, 0))
        }
        Command::Classify { dfa, alph, omega } => {
            let alph = load_alph(alph)?;
            let d = load(dfa, |t| Dfa::parse_for(&alph, t))?;
            let om = match omega {
                Some(p) => Some(load(p, |t| BuchiAutomaton::parse_for(&alph, t))?),
                None => None,
            };
            let r = classify_locally_safety(&d, om.as_ref(), &alph)?;
            Ok((
                format!("{}\n", r.render(&alph)),
                if r.locally_safety { 0 } else { 1 },
            ))
        }
        Command::Gamma { command } => gamma(command),
    }
}

fn gamma(cmd: &GammaCommand) -> Result<(String, i32), CliError> {
    match cmd {
        GammaCommand::Check { alph, gamma, lasso } => {
            let alph = load_alph(alph)?;
            let names: Vec<&str> = gamma.iter().map(String::as_str).collect();
            let g = alph.proc_set(&names)?;
            let (u, v) = lasso
                .split_once('|')
                .ok_or_else(|| CliError::Usage("lasso must be written `u|v`".into()))?;
            let ok = is_gamma_infinite_lasso(&alph, g, &alph.parse_word(u)?, &alph.parse_word(v)?)?;
            Ok((format!("gamma_infinite={ok}\n"), if ok { 0 } else { 1 }))
        }
        GammaCommand::Convert {
            aa,
            alph,
            bound,
            single,
            output,
        } => {
            let alph = load_alph(alph)?;
            let (a, cond) = load(aa, |t| AsyncAutomaton::parse(&alph, t))?;
            let cond = cond
                .ok_or_else(|| CliError::Usage("automaton has no acceptance condition".into()))?;
            let conv = muller_to_buchi(&a, &cond, *bound)?;
            let kept = match &conv.kind {
                Acceptance::GenBuchi(f) => f.len(),
                _ => unreachable!("conversion yields a conjunctive condition"),
            };
            let (a, conv) = if *single {
                single_tuple_buchi(&a, &conv)?
            } else {
                (a, conv)
            };
            let note = format!("converted kept={kept}");
            Ok((emit(output.as_deref(), a.to_text(Some(&conv)), note)?, 0))
        }
    }
}
