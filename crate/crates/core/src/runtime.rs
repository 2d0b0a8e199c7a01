//! Sequential simulation of a distributed run: every process keeps its
//! causal view, and a verdict automaton judges each event on its past.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{DistributedAlphabet, Letter, ProcSet, Process};
use crate::async_automata::{AsyncAutomaton, GlobalState};
use crate::synthesis::{Verdict, VerdictAutomaton};
use crate::trace::normal_form;
use crate::{Error, Result};

pub const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    Script(Vec<Letter>),
    /// Uniform choice among enabled letters.
    Random,
}

/// What one process knows: the events of its causal past, by their
/// position in the run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProcessView {
    pub log: Vec<usize>,
    pub vclock: Vec<u32>,
}

impl ProcessView {
    fn merge(&mut self, other: &ProcessView) {
        let mut log = Vec::with_capacity(self.log.len() + other.log.len());
        let (mut i, mut j) = (0, 0);
        while i < self.log.len() || j < other.log.len() {
            let take_left =
                j == other.log.len() || (i < self.log.len() && self.log[i] <= other.log[j]);
            let e = if take_left { self.log[i] } else { other.log[j] };
            if log.last() != Some(&e) {
                log.push(e);
            }
            if take_left {
                i += 1;
                if j < other.log.len() && other.log[j] == e {
                    j += 1;
                }
            } else {
                j += 1;
            }
        }
        self.log = log;
        for (x, y) in self.vclock.iter_mut().zip(&other.vclock) {
            *x = (*x).max(*y);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventRecord {
    pub letter: Letter,
    pub procs: ProcSet,
    pub vclock: Vec<u32>,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProcessVerdict {
    pub verdict: Verdict,
    /// 1-based index of the event that decided it.
    pub at: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub schedule: String,
    pub seed: u64,
    pub events: Vec<EventRecord>,
    /// Step at which no letter was enabled.
    pub deadlock: Option<usize>,
    pub final_state: GlobalState,
    pub verdicts: Vec<ProcessVerdict>,
}

impl RunReport {
    pub fn word(&self) -> Vec<Letter> {
        self.events.iter().map(|e| e.letter).collect()
    }

    pub fn render(&self, system: &AsyncAutomaton) -> String {
        let alph = system.alphabet();
        let mut out = format!("{} seed={}\n", self.schedule, self.seed);
        for (i, e) in self.events.iter().enumerate() {
            let procs: Vec<&str> = e.procs.iter().map(|p| alph.process_name(p)).collect();
            let clock: Vec<String> = alph
                .processes()
                .map(|p| format!("{}={}", alph.process_name(p), e.vclock[p.0]))
                .collect();
            out.push_str(&format!(
                "event {} label={} procs={} vclock {} verdict={}\n",
                i + 1,
                alph.letter_name(e.letter),
                procs.join(","),
                clock.join(" "),
                e.verdict
            ));
        }
        if let Some(k) = self.deadlock {
            out.push_str(&format!("deadlock at step {k}\n"));
        }
        out.push_str(&format!(
            "final state {}\n",
            system.format_state(&self.final_state)
        ));
        for p in alph.processes() {
            let v = self.verdicts[p.0];
            out.push_str(&format!(
                "process {} verdict={} at={}\n",
                alph.process_name(p),
                v.verdict.as_str().to_uppercase(),
                v.at.map_or("-".to_string(), |k| k.to_string())
            ));
        }
        out
    }
}

/// Letters chosen by the random scheduler, stopping early on deadlock.
pub fn random_schedule(system: &AsyncAutomaton, seed: u64, steps: usize) -> Result<Vec<Letter>> {
    let report = simulate(system, None, &Schedule::Random, seed, steps)?;
    Ok(report.word())
}

pub fn simulate(
    system: &AsyncAutomaton,
    monitor: Option<&VerdictAutomaton>,
    schedule: &Schedule,
    seed: u64,
    steps: usize,
) -> Result<RunReport> {
    let alph = system.alphabet();
    if steps > MAX_STEPS {
        return Err(Error::CapExceeded {
            what: "simulation steps",
            cap: MAX_STEPS,
        });
    }
    if let Some(m) = monitor {
        if m.alphabet() != alph {
            return Err(Error::AlphabetMismatch);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = alph.num_processes();
    let mut views = vec![
        ProcessView {
            log: Vec::new(),
            vclock: vec![0; n]
        };
        n
    ];
    let mut state = system.init().clone();
    let mut events: Vec<EventRecord> = Vec::new();
    let mut word: Vec<Letter> = Vec::new();
    let mut memo: HashMap<Vec<u32>, Verdict> = HashMap::new();
    let mut verdicts = vec![
        ProcessVerdict {
            verdict: Verdict::None,
            at: None
        };
        n
    ];
    let mut deadlock = None;
    let echo = match schedule {
        Schedule::Script(w) => format!("schedule script {}", words(alph, w)),
        Schedule::Random => "schedule random".to_string(),
    };
    for step in 0..steps {
        let a = match schedule {
            Schedule::Script(w) => match w.get(step) {
                Some(&a) => {
                    if !system.enabled(&state, a) {
                        return Err(Error::Invalid(format!(
                            "letter `{}` at position {} is not enabled",
                            alph.letter_name(a),
                            step + 1
                        )));
                    }
                    a
                }
                None => break,
            },
            Schedule::Random => {
                let enabled: Vec<Letter> = alph
                    .letters()
                    .filter(|&a| system.enabled(&state, a))
                    .collect();
                if enabled.is_empty() {
                    deadlock = Some(step + 1);
                    break;
                }
                enabled[rng.gen_range(0..enabled.len())]
            }
        };
        let succ = system.successors(&state, a);
        state = if succ.len() == 1 {
            succ.into_iter().next().expect("enabled")
        } else {
            succ[rng.gen_range(0..succ.len())].clone()
        };
        let dom = alph.dom(a);
        let procs: Vec<Process> = dom.iter().collect();
        let mut merged = views[procs[0].0].clone();
        for p in &procs[1..] {
            merged.merge(&views[p.0]);
        }
        let idx = word.len();
        word.push(a);
        merged.log.push(idx);
        for p in &procs {
            merged.vclock[p.0] += 1;
        }
        let verdict = match monitor {
            None => Verdict::None,
            Some(m) => *memo.entry(merged.vclock.clone()).or_insert_with(|| {
                let past: Vec<Letter> = merged.log.iter().map(|&e| word[e]).collect();
                let nf = normal_form(alph, &past).expect("letters belong to the alphabet");
                m.last_verdict(&nf)
            }),
        };
        for p in &procs {
            views[p.0] = merged.clone();
            if verdict.is_decided() && !verdicts[p.0].verdict.is_decided() {
                verdicts[p.0] = ProcessVerdict {
                    verdict,
                    at: Some(idx + 1),
                };
            }
        }
        events.push(EventRecord {
            letter: a,
            procs: dom,
            vclock: merged.vclock,
            verdict,
        });
    }
    Ok(RunReport {
        schedule: echo,
        seed,
        events,
        deadlock,
        final_state: state,
        verdicts,
    })
}

fn words(alph: &DistributedAlphabet, w: &[Letter]) -> String {
    if w.is_empty() {
        return "-".into();
    }
    w.iter()
        .map(|&a| alph.letter_name(a))
        .collect::<Vec<_>>()
        .join(" ")
}
