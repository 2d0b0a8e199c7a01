//! Asynchronous automata: per-process local states with transitions on the
//! tuples of the processes an action is located on.
//!
//! File format (processes and letters come from the distributed alphabet):
//!
//! ```text
//! process p states 0
//! process q states 0 1
//! init p=0 q=0
//! trans a p=0,q=1 -> p=0,q=0
//! gamma q
//! buchi q=1
//! muller q:{0,1}
//! genbuchi q:{0,1}
//! ```

use std::collections::{BTreeSet, HashMap};

use crate::alphabet::{strip_comment, DistributedAlphabet, Letter, ProcSet, Process};
use crate::omega::{BuchiAutomaton, Dfa};
use crate::{parse_err, Error, Result};

/// Local state of every process, indexed by process.
pub type GlobalState = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsyncAutomaton {
    alph: DistributedAlphabet,
    local: Vec<Vec<String>>,
    init: GlobalState,
    /// Per letter, pairs of tuples over `dom(a)` in process order.
    delta: Vec<Vec<(Vec<usize>, Vec<usize>)>>,
}

/// Acceptance on lassos, evaluated per process of `gamma` on the local
/// states it takes infinitely often.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acceptance {
    /// Some tuple `f` with `f_α` recurring for every `α ∈ Γ`.
    Buchi(Vec<Vec<usize>>),
    /// Some family `T` with the recurring `α`-states exactly `T_α`.
    Muller(Vec<Vec<BTreeSet<usize>>>),
    /// Some family `T` with every state of `T_α` recurring.
    GenBuchi(Vec<Vec<BTreeSet<usize>>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptanceCondition {
    pub gamma: ProcSet,
    pub kind: Acceptance,
}

impl AcceptanceCondition {
    /// Processes of Γ in increasing order; tuples are indexed accordingly.
    pub fn gamma_procs(&self) -> Vec<Process> {
        self.gamma.iter().collect()
    }

    /// Evaluates the condition on the recurring local-state sets of all
    /// processes.
    pub fn holds(&self, inf: &[BTreeSet<usize>]) -> bool {
        let procs = self.gamma_procs();
        match &self.kind {
            Acceptance::Buchi(tuples) => tuples
                .iter()
                .any(|f| procs.iter().zip(f).all(|(p, s)| inf[p.0].contains(s))),
            Acceptance::Muller(fams) => fams
                .iter()
                .any(|t| procs.iter().zip(t).all(|(p, set)| inf[p.0] == *set)),
            Acceptance::GenBuchi(fams) => fams
                .iter()
                .any(|t| procs.iter().zip(t).all(|(p, set)| set.is_subset(&inf[p.0]))),
        }
    }
}

/// Outcome of running a finite word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Run {
    Done(GlobalState),
    /// No transition for the letter at this position.
    Stuck(usize),
}

/// Reachable part of the global sequential automaton.
#[derive(Clone, Debug)]
pub struct GlobalExpansion {
    pub states: Vec<GlobalState>,
    /// `succ[s][a]`: successor state indices in declaration order.
    pub succ: Vec<Vec<Vec<usize>>>,
}

impl AsyncAutomaton {
    pub fn new(alph: &DistributedAlphabet, local: Vec<Vec<String>>, init: GlobalState) -> Self {
        AsyncAutomaton {
            alph: alph.clone(),
            local,
            init,
            delta: vec![Vec::new(); alph.num_letters()],
        }
    }

    /// Adds `(from, to) ∈ δ_a`; tuples list `dom(a)` in process order.
    pub fn add_transition(&mut self, a: Letter, from: Vec<usize>, to: Vec<usize>) {
        let pair = (from, to);
        if !self.delta[a.0].contains(&pair) {
            self.delta[a.0].push(pair);
        }
    }

    pub fn alphabet(&self) -> &DistributedAlphabet {
        &self.alph
    }

    pub fn init(&self) -> &GlobalState {
        &self.init
    }

    pub fn num_local_states(&self, p: Process) -> usize {
        self.local[p.0].len()
    }

    pub fn local_state_name(&self, p: Process, s: usize) -> &str {
        &self.local[p.0][s]
    }

    pub fn transitions(&self, a: Letter) -> &[(Vec<usize>, Vec<usize>)] {
        &self.delta[a.0]
    }

    pub fn local_state(&self, p: Process, name: &str) -> Result<usize> {
        self.local[p.0]
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(format!("{}={name}", self.alph.process_name(p))))
    }

    pub fn parse(
        alph: &DistributedAlphabet,
        text: &str,
    ) -> Result<(Self, Option<AcceptanceCondition>)> {
        let np = alph.num_processes();
        let mut local: Vec<Option<Vec<String>>> = vec![None; np];
        let mut init: Option<(usize, String)> = None;
        let mut trans: Vec<(usize, Letter, String, String)> = Vec::new();
        let mut gamma: Option<ProcSet> = None;
        let mut acc_lines: Vec<(usize, String, String)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match head {
                "process" => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() < 3 || toks[1] != "states" {
                        return Err(parse_err(line_no, "expected `process <p> states <s>...`"));
                    }
                    let p = alph
                        .process(toks[0])
                        .map_err(|e| parse_err(line_no, e.to_string()))?;
                    if local[p.0].is_some() {
                        return Err(parse_err(
                            line_no,
                            format!("duplicate process `{}`", toks[0]),
                        ));
                    }
                    let states: Vec<String> = toks[2..].iter().map(|s| s.to_string()).collect();
                    let uniq: BTreeSet<&String> = states.iter().collect();
                    if uniq.len() != states.len() {
                        return Err(parse_err(line_no, "duplicate local state"));
                    }
                    local[p.0] = Some(states);
                }
                "init" => {
                    if init.is_some() {
                        return Err(parse_err(line_no, "duplicate `init` line"));
                    }
                    init = Some((line_no, rest.to_string()));
                }
                "trans" => {
                    let (lhs, rhs) = rest
                        .split_once("->")
                        .ok_or_else(|| parse_err(line_no, "expected `->`"))?;
                    let lhs = lhs.trim();
                    let (letter, from) = lhs.split_once(char::is_whitespace).ok_or_else(|| {
                        parse_err(line_no, "expected `trans <a> <tuple> -> <tuple>`")
                    })?;
                    let a = alph
                        .letter(letter)
                        .map_err(|e| parse_err(line_no, e.to_string()))?;
                    trans.push((line_no, a, from.trim().to_string(), rhs.trim().to_string()));
                }
                "gamma" => {
                    let procs: Vec<&str> = rest.split_whitespace().collect();
                    let set = alph
                        .proc_set(&procs)
                        .map_err(|e| parse_err(line_no, e.to_string()))?;
                    if set.is_empty() {
                        return Err(parse_err(line_no, "Γ must be non-empty"));
                    }
                    gamma = Some(set);
                }
                "buchi" | "muller" | "genbuchi" => {
                    acc_lines.push((line_no, head.to_string(), rest.to_string()));
                }
                other => return Err(parse_err(line_no, format!("unexpected keyword `{other}`"))),
            }
        }

        let local: Vec<Vec<String>> = local
            .into_iter()
            .enumerate()
            .map(|(p, s)| {
                s.ok_or_else(|| {
                    parse_err(
                        0,
                        format!("process `{}` has no states", alph.process_name(Process(p))),
                    )
                })
            })
            .collect::<Result<_>>()?;
        let mut aa = AsyncAutomaton::new(alph, local, vec![0; np]);

        let (init_line, init_text) = init.ok_or_else(|| parse_err(0, "missing `init` line"))?;
        let assignment = aa.parse_assignment(init_line, &init_text, ' ')?;
        if assignment.len() != np {
            return Err(parse_err(init_line, "`init` must assign every process"));
        }
        for (p, s) in assignment {
            aa.init[p.0] = s;
        }

        for (line_no, a, from, to) in trans {
            let from = aa.parse_tuple(line_no, a, &from)?;
            let to = aa.parse_tuple(line_no, a, &to)?;
            aa.add_transition(a, from, to);
        }

        let cond = if acc_lines.is_empty() {
            if gamma.is_some() {
                return Err(parse_err(0, "`gamma` without acceptance lines"));
            }
            None
        } else {
            let gamma = gamma
                .ok_or_else(|| parse_err(acc_lines[0].0, "acceptance needs a `gamma` line"))?;
            let kinds: BTreeSet<&str> = acc_lines.iter().map(|(_, k, _)| k.as_str()).collect();
            if kinds.len() > 1 {
                return Err(parse_err(acc_lines[0].0, "mixed acceptance kinds"));
            }
            let gprocs: Vec<Process> = gamma.iter().collect();
            let kind = match acc_lines[0].1.as_str() {
                "buchi" => {
                    let mut tuples = Vec::new();
                    for (line_no, _, text) in &acc_lines {
                        let asg: HashMap<Process, usize> = aa
                            .parse_assignment(*line_no, text, ',')?
                            .into_iter()
                            .collect();
                        if asg.len() != gprocs.len() || gprocs.iter().any(|p| !asg.contains_key(p))
                        {
                            return Err(parse_err(
                                *line_no,
                                "tuple must assign exactly the Γ processes",
                            ));
                        }
                        tuples.push(gprocs.iter().map(|p| asg[p]).collect());
                    }
                    Acceptance::Buchi(tuples)
                }
                k => {
                    let mut fams = Vec::new();
                    for (line_no, _, text) in &acc_lines {
                        fams.push(aa.parse_family(*line_no, text, &gprocs)?);
                    }
                    if k == "muller" {
                        Acceptance::Muller(fams)
                    } else {
                        Acceptance::GenBuchi(fams)
                    }
                }
            };
            Some(AcceptanceCondition { gamma, kind })
        };
        Ok((aa, cond))
    }

    /// `p=0 q=1` (or comma separated).
    fn parse_assignment(
        &self,
        line: usize,
        text: &str,
        sep: char,
    ) -> Result<Vec<(Process, usize)>> {
        let mut out: Vec<(Process, usize)> = Vec::new();
        for item in text
            .split(|c: char| c == sep || c.is_whitespace())
            .filter(|s| !s.is_empty())
        {
            let (p, s) = item
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected `proc=state`, got `{item}`")))?;
            let p = self
                .alph
                .process(p)
                .map_err(|e| parse_err(line, e.to_string()))?;
            if out.iter().any(|(q, _)| *q == p) {
                return Err(parse_err(line, "process assigned twice"));
            }
            let s = self
                .local_state(p, s)
                .map_err(|e| parse_err(line, e.to_string()))?;
            out.push((p, s));
        }
        Ok(out)
    }

    fn parse_tuple(&self, line: usize, a: Letter, text: &str) -> Result<Vec<usize>> {
        let asg: HashMap<Process, usize> = self
            .parse_assignment(line, text, ',')?
            .into_iter()
            .collect();
        let dom = self.alph.dom(a);
        if asg.len() != dom.len() || asg.keys().any(|p| !dom.contains(*p)) {
            return Err(parse_err(
                line,
                format!("tuple must assign exactly {}", self.alph.format_procs(dom)),
            ));
        }
        Ok(dom.iter().map(|p| asg[&p]).collect())
    }

    /// `q:{0,1} r:{1}`.
    fn parse_family(
        &self,
        line: usize,
        text: &str,
        gprocs: &[Process],
    ) -> Result<Vec<BTreeSet<usize>>> {
        let mut sets: HashMap<Process, BTreeSet<usize>> = HashMap::new();
        for item in text.split_whitespace() {
            let (p, set) = item.split_once(':').ok_or_else(|| {
                parse_err(line, format!("expected `proc:{{states}}`, got `{item}`"))
            })?;
            let p = self
                .alph
                .process(p)
                .map_err(|e| parse_err(line, e.to_string()))?;
            let inner = set
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| parse_err(line, "state set must be braced"))?;
            let states = inner
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    self.local_state(p, s.trim())
                        .map_err(|e| parse_err(line, e.to_string()))
                })
                .collect::<Result<BTreeSet<usize>>>()?;
            if sets.insert(p, states).is_some() {
                return Err(parse_err(line, "process listed twice"));
            }
        }
        if sets.len() != gprocs.len() || gprocs.iter().any(|p| !sets.contains_key(p)) {
            return Err(parse_err(line, "family must list exactly the Γ processes"));
        }
        Ok(gprocs.iter().map(|p| sets[p].clone()).collect())
    }

    pub fn to_text(&self, cond: Option<&AcceptanceCondition>) -> String {
        let alph = &self.alph;
        let mut out = String::new();
        for p in alph.processes() {
            out.push_str(&format!(
                "process {} states {}\n",
                alph.process_name(p),
                self.local[p.0].join(" ")
            ));
        }
        let init: Vec<String> = alph
            .processes()
            .map(|p| {
                format!(
                    "{}={}",
                    alph.process_name(p),
                    self.local[p.0][self.init[p.0]]
                )
            })
            .collect();
        out.push_str(&format!("init {}\n", init.join(" ")));
        for a in alph.letters() {
            for (from, to) in &self.delta[a.0] {
                out.push_str(&format!(
                    "trans {} {} -> {}\n",
                    alph.letter_name(a),
                    self.format_tuple(a, from),
                    self.format_tuple(a, to)
                ));
            }
        }
        if let Some(cond) = cond {
            let procs = cond.gamma_procs();
            let names: Vec<&str> = procs.iter().map(|&p| alph.process_name(p)).collect();
            out.push_str(&format!("gamma {}\n", names.join(" ")));
            let fam_line = |kw: &str, t: &[BTreeSet<usize>]| {
                let items: Vec<String> = procs
                    .iter()
                    .zip(t)
                    .map(|(&p, set)| {
                        let s: Vec<&str> =
                            set.iter().map(|&s| self.local[p.0][s].as_str()).collect();
                        format!("{}:{{{}}}", alph.process_name(p), s.join(","))
                    })
                    .collect();
                format!("{kw} {}\n", items.join(" "))
            };
            match &cond.kind {
                Acceptance::Buchi(tuples) => {
                    for f in tuples {
                        let items: Vec<String> = procs
                            .iter()
                            .zip(f)
                            .map(|(&p, &s)| {
                                format!("{}={}", alph.process_name(p), self.local[p.0][s])
                            })
                            .collect();
                        out.push_str(&format!("buchi {}\n", items.join(",")));
                    }
                }
                Acceptance::Muller(fams) => fams
                    .iter()
                    .for_each(|t| out.push_str(&fam_line("muller", t))),
                Acceptance::GenBuchi(fams) => fams
                    .iter()
                    .for_each(|t| out.push_str(&fam_line("genbuchi", t))),
            }
        }
        out
    }

    /// Participants sorted by process name.
    fn format_tuple(&self, a: Letter, tuple: &[usize]) -> String {
        let mut items: Vec<(String, String)> = self
            .alph
            .dom(a)
            .iter()
            .zip(tuple)
            .map(|(p, &s)| {
                (
                    self.alph.process_name(p).to_string(),
                    self.local[p.0][s].clone(),
                )
            })
            .collect();
        items.sort();
        items
            .iter()
            .map(|(p, s)| format!("{p}={s}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn format_state(&self, s: &GlobalState) -> String {
        self.alph
            .processes()
            .map(|p| format!("{}={}", self.alph.process_name(p), self.local[p.0][s[p.0]]))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Successors of `s` on `a`, in declaration order.
    pub fn successors(&self, s: &GlobalState, a: Letter) -> Vec<GlobalState> {
        let dom: Vec<Process> = self.alph.dom(a).iter().collect();
        let local: Vec<usize> = dom.iter().map(|p| s[p.0]).collect();
        self.delta[a.0]
            .iter()
            .filter(|(from, _)| *from == local)
            .map(|(_, to)| {
                let mut t = s.clone();
                for (p, &x) in dom.iter().zip(to) {
                    t[p.0] = x;
                }
                t
            })
            .collect()
    }

    pub fn enabled(&self, s: &GlobalState, a: Letter) -> bool {
        !self.successors(s, a).is_empty()
    }

    /// First successor by declaration order.
    pub fn step(&self, s: &GlobalState, a: Letter) -> Option<GlobalState> {
        let mut succ = self.successors(s, a);
        if succ.len() > 1 {
            log::warn!(
                "nondeterministic `{}` at {}; taking the first declared transition",
                self.alph.letter_name(a),
                self.format_state(s)
            );
        }
        if succ.is_empty() {
            None
        } else {
            Some(succ.swap_remove(0))
        }
    }

    pub fn run_from(&self, s: &GlobalState, word: &[Letter]) -> Run {
        let mut cur = s.clone();
        for (i, &a) in word.iter().enumerate() {
            match self.step(&cur, a) {
                Some(t) => cur = t,
                None => return Run::Stuck(i),
            }
        }
        Run::Done(cur)
    }

    pub fn run_word(&self, word: &[Letter]) -> Run {
        self.run_from(&self.init, word)
    }

    pub fn is_deterministic(&self) -> bool {
        self.delta.iter().all(|rel| {
            let froms: BTreeSet<&Vec<usize>> = rel.iter().map(|(f, _)| f).collect();
            froms.len() == rel.len()
        })
    }

    pub fn global_expansion(&self) -> GlobalExpansion {
        let mut ids: HashMap<GlobalState, usize> = HashMap::new();
        ids.insert(self.init.clone(), 0);
        let mut states = vec![self.init.clone()];
        let mut succ: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let s = states[i].clone();
            let mut row = Vec::new();
            for a in self.alph.letters() {
                let mut targets = Vec::new();
                for t in self.successors(&s, a) {
                    let id = *ids.entry(t.clone()).or_insert_with(|| {
                        states.push(t);
                        states.len() - 1
                    });
                    targets.push(id);
                }
                row.push(targets);
            }
            succ.push(row);
            i += 1;
        }
        GlobalExpansion { states, succ }
    }

    fn expansion_names(&self, exp: &GlobalExpansion) -> Vec<String> {
        exp.states
            .iter()
            .map(|s| {
                self.alph
                    .processes()
                    .map(|p| self.local[p.0][s[p.0]].clone())
                    .collect::<Vec<_>>()
                    .join(".")
            })
            .collect()
    }

    /// Global expansion as a Büchi automaton with every state accepting:
    /// the ω-words with an infinite run.
    pub fn to_buchi(&self) -> BuchiAutomaton {
        let exp = self.global_expansion();
        let mut b = BuchiAutomaton::new(
            self.alph.letter_names().to_vec(),
            self.expansion_names(&exp),
            0,
        );
        for (i, row) in exp.succ.iter().enumerate() {
            b.set_accepting(i, true);
            for (a, targets) in row.iter().enumerate() {
                for &t in targets {
                    b.add_transition(i, Letter(a), t);
                }
            }
        }
        b
    }

    /// Global expansion as a DFA with every state final.
    pub fn to_dfa(&self) -> Result<Dfa> {
        if !self.is_deterministic() {
            return Err(Error::NotDeterministic("asynchronous automaton".into()));
        }
        let exp = self.global_expansion();
        let mut d = Dfa::new(
            self.alph.letter_names().to_vec(),
            self.expansion_names(&exp),
            0,
        );
        for (i, row) in exp.succ.iter().enumerate() {
            d.set_accepting(i, true);
            for (a, targets) in row.iter().enumerate() {
                if let Some(&t) = targets.first() {
                    d.set_transition(i, Letter(a), t);
                }
            }
        }
        Ok(d)
    }

    /// Local states each process takes infinitely often along `u v^ω`, or
    /// `None` if the run gets stuck. A process without events in the loop
    /// contributes its frozen state.
    pub fn recurring_states(
        &self,
        u: &[Letter],
        v: &[Letter],
    ) -> Result<Option<Vec<BTreeSet<usize>>>> {
        if v.is_empty() {
            return Err(Error::EmptyLoop);
        }
        let Run::Done(mut s) = self.run_word(u) else {
            return Ok(None);
        };
        let mut seen: HashMap<GlobalState, usize> = HashMap::new();
        let mut starts: Vec<GlobalState> = Vec::new();
        while !seen.contains_key(&s) {
            seen.insert(s.clone(), starts.len());
            starts.push(s.clone());
            match self.run_from(&s, v) {
                Run::Done(t) => s = t,
                Run::Stuck(_) => return Ok(None),
            }
        }
        let first = seen[&s];
        let mut inf: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.alph.num_processes()];
        for start in &starts[first..] {
            let mut cur = start.clone();
            for &a in v {
                cur = self.step(&cur, a).expect("loop already simulated");
                for p in self.alph.dom(a).iter() {
                    inf[p.0].insert(cur[p.0]);
                }
            }
        }
        for p in self.alph.processes() {
            if inf[p.0].is_empty() {
                inf[p.0].insert(s[p.0]);
            }
        }
        Ok(Some(inf))
    }

    /// `u v^ω` is accepted under `cond`; stuck runs are rejected.
    pub fn accepts_lasso(
        &self,
        cond: &AcceptanceCondition,
        u: &[Letter],
        v: &[Letter],
    ) -> Result<bool> {
        Ok(self
            .recurring_states(u, v)?
            .is_some_and(|inf| cond.holds(&inf)))
    }
}

/// The asynchronous automaton of the running example over the alphabet
/// with `a` on `{p,q}`, `b` on `{q,r}`, `c` on `{p}`, `d` on `{r}`.
#[cfg(test)]
pub(crate) fn example1(alph: &DistributedAlphabet) -> AsyncAutomaton {
    let text = "process p states 0\nprocess q states 0 1\nprocess r states 0 1\n\
        init p=0 q=0 r=0\n\
        trans a p=0,q=1 -> p=0,q=0\n\
        trans b q=0,r=0 -> q=1,r=1\ntrans b q=0,r=1 -> q=1,r=1\ntrans b q=1,r=0 -> q=1,r=1\n\
        trans c p=0 -> p=0\n\
        trans d r=1 -> r=0\n";
    AsyncAutomaton::parse(alph, text).unwrap().0
}
