//! Verdict automata: a sequential view-map machine that assigns each new
//! event a verdict from the residuals of its causal past.

use std::collections::HashMap;
use std::fmt;

use crate::alphabet::{strip_comment, DistributedAlphabet, Letter, ProcSet};
use crate::closure::ViewIndex;
use crate::graph;
use crate::omega::{
    complement, validate_trace_closed, BuchiAutomaton, ResidualOracle, StateSet, ValidationMode,
};
use crate::{parse_err, Error, Result};

pub const DEFAULT_VA_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    None,
    Top,
    Bot,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::None => "none",
            Verdict::Top => "top",
            Verdict::Bot => "bot",
        }
    }

    pub fn is_decided(self) -> bool {
        self != Verdict::None
    }

    fn parse(s: &str) -> Option<Verdict> {
        match s {
            "none" => Some(Verdict::None),
            "top" => Some(Verdict::Top),
            "bot" => Some(Verdict::Bot),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-view content: the subsets reached in `B` and `Bc`, or a verdict
/// already known for some event of the view.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Sets(StateSet, StateSet),
    Top,
    Bot,
}

impl Entry {
    fn verdict(&self) -> Verdict {
        match self {
            Entry::Sets(..) => Verdict::None,
            Entry::Top => Verdict::Top,
            Entry::Bot => Verdict::Bot,
        }
    }
}

/// Fully expanded reachable part of the verdict machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictAutomaton {
    alph: DistributedAlphabet,
    index: ViewIndex,
    l_names: Vec<String>,
    c_names: Vec<String>,
    states: Vec<Vec<Entry>>,
    trans: Vec<Vec<(usize, Verdict)>>,
}

/// Builds the verdict machine for `L(B)`; `bc` recognizes the complement,
/// or is computed when absent.
pub fn synthesize_monitor(
    b: &BuchiAutomaton,
    bc: Option<&BuchiAutomaton>,
    alph: &DistributedAlphabet,
) -> Result<VerdictAutomaton> {
    synthesize_monitor_with(b, bc, alph, ValidationMode::Full)
}

pub fn synthesize_monitor_with(
    b: &BuchiAutomaton,
    bc: Option<&BuchiAutomaton>,
    alph: &DistributedAlphabet,
    mode: ValidationMode,
) -> Result<VerdictAutomaton> {
    let b = b.aligned(alph)?;
    let bc = match bc {
        Some(c) => c.aligned(alph)?,
        None => complement(&b)?,
    };
    if mode != ValidationMode::Skip {
        validate_trace_closed(alph, &b, mode)?;
        validate_trace_closed(alph, &bc, mode)?;
        check_complementary(&b, &bc)?;
    }
    let index = ViewIndex::new(alph);
    let lo = ResidualOracle::new(&b);
    let co = ResidualOracle::new(&bc);
    let init = vec![Entry::Sets(b.initial_set(), bc.initial_set()); index.len()];
    let mut ids: HashMap<Vec<Entry>, usize> = HashMap::new();
    ids.insert(init.clone(), 0);
    let mut states = vec![init];
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let old = states[i].clone();
        let mut row = Vec::new();
        for a in alph.letters() {
            let mut new = index.update(&old, a, |e| match e {
                Entry::Sets(l, c) => Entry::Sets(b.post(l, a), bc.post(c, a)),
                other => other.clone(),
            });
            let verdict = match &new[index.dom_index(a)] {
                Entry::Sets(l, c) => match (lo.is_empty(l), co.is_empty(c)) {
                    (true, true) => return Err(Error::Validation(format!(
                        "both residuals are empty after `{}`; the automata are not complementary",
                        alph.letter_name(a)
                    ))),
                    (true, false) => Verdict::Bot,
                    (false, true) => Verdict::Top,
                    (false, false) => Verdict::None,
                },
                e => e.verdict(),
            };
            if verdict.is_decided() {
                let sink = if verdict == Verdict::Top {
                    Entry::Top
                } else {
                    Entry::Bot
                };
                for (w, e) in new.iter_mut().enumerate() {
                    if index.source(a, w).is_some() {
                        *e = sink.clone();
                    }
                }
            }
            let id = match ids.get(&new) {
                Some(&id) => id,
                None => {
                    if states.len() >= DEFAULT_VA_CAP {
                        return Err(Error::CapExceeded {
                            what: "verdict automaton states",
                            cap: DEFAULT_VA_CAP,
                        });
                    }
                    ids.insert(new.clone(), states.len());
                    states.push(new);
                    states.len() - 1
                }
            };
            row.push((id, verdict));
        }
        trans.push(row);
        i += 1;
    }
    Ok(VerdictAutomaton {
        alph: alph.clone(),
        index,
        l_names: b.state_names().to_vec(),
        c_names: bc.state_names().to_vec(),
        states,
        trans,
    })
}

/// `L(B) ∩ L(Bc) = ∅` exactly; `L(B) ∪ L(Bc) = Σ^ω` on all short lassos.
fn check_complementary(b: &BuchiAutomaton, bc: &BuchiAutomaton) -> Result<()> {
    if !b.intersect(bc)?.is_empty() {
        return Err(Error::Validation(
            "the language and its claimed complement intersect".into(),
        ));
    }
    let k = b.num_letters();
    let max = if k <= 3 { 3 } else { 2 };
    let words = words_up_to(k, max);
    for u in &words {
        for v in words.iter().filter(|v| !v.is_empty()) {
            if !b.accepts_lasso(u, v)? && !bc.accepts_lasso(u, v)? {
                return Err(Error::Validation(format!(
                    "lasso {}({})^ω is in neither language",
                    b.format_word(u),
                    b.format_word(v)
                )));
            }
        }
    }
    Ok(())
}

fn words_up_to(k: usize, max: usize) -> Vec<Vec<Letter>> {
    let mut all = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        let next: Vec<Vec<Letter>> = layer
            .iter()
            .flat_map(|w: &Vec<Letter>| {
                (0..k).map(move |a| {
                    let mut v = w.clone();
                    v.push(Letter(a));
                    v
                })
            })
            .collect();
        all.extend(next.iter().cloned());
        layer = next;
    }
    all
}

impl VerdictAutomaton {
    pub fn alphabet(&self) -> &DistributedAlphabet {
        &self.alph
    }

    pub fn index(&self) -> &ViewIndex {
        &self.index
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn entry(&self, state: usize, w: usize) -> &Entry {
        &self.states[state][w]
    }

    /// Successor and verdict of the new event.
    pub fn step(&self, state: usize, a: Letter) -> (usize, Verdict) {
        self.trans[state][a.0]
    }

    pub fn run(&self, word: &[Letter]) -> usize {
        word.iter().fold(self.initial(), |s, &a| self.step(s, a).0)
    }

    /// Verdict of the prime past of the last event of `word`.
    pub fn last_verdict(&self, word: &[Letter]) -> Verdict {
        match word.split_last() {
            None => Verdict::None,
            Some((&a, init)) => self.step(self.run(init), a).1,
        }
    }

    /// States from which a transition with a verdict is reachable.
    pub fn can_reach_verdict(&self) -> Vec<bool> {
        let adj: Vec<Vec<usize>> = self
            .trans
            .iter()
            .map(|r| r.iter().map(|t| t.0).collect())
            .collect();
        let mut emitting: Vec<bool> = self
            .trans
            .iter()
            .map(|r| r.iter().any(|t| t.1.is_decided()))
            .collect();
        let reach = graph::backward_reach(&adj, &emitting);
        for (e, r) in emitting.iter_mut().zip(reach) {
            *e |= r;
        }
        emitting
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in self.alph.to_text().lines() {
            out.push_str(&format!("alphabet {line}\n"));
        }
        let fam: Vec<String> = self
            .index
            .family()
            .iter()
            .map(|&w| format!("W={}", self.alph.format_procs(w)))
            .collect();
        out.push_str(&format!("family {}\n", fam.join(" ")));
        out.push_str(&format!("lstates {}\n", self.l_names.join(" ")));
        out.push_str(&format!("cstates {}\n", self.c_names.join(" ")));
        for (id, st) in self.states.iter().enumerate() {
            out.push_str(&format!("state {id}"));
            for (w, e) in st.iter().enumerate() {
                out.push_str(&format!(
                    " entry W={}",
                    self.alph.format_procs(self.index.family()[w])
                ));
                match e {
                    Entry::Sets(l, c) => out.push_str(&format!(
                        " L={} C={}",
                        format_set(&self.l_names, l),
                        format_set(&self.c_names, c)
                    )),
                    e => out.push_str(&format!(" verdict={}", e.verdict())),
                }
            }
            out.push('\n');
        }
        for (id, row) in self.trans.iter().enumerate() {
            for (a, &(to, v)) in row.iter().enumerate() {
                out.push_str(&format!(
                    "trans {id} {} {to} verdict={v}\n",
                    self.alph.letter_names()[a]
                ));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut alph_text = String::new();
        let mut family_line = None;
        let mut l_names = Vec::new();
        let mut c_names = Vec::new();
        let mut state_lines = Vec::new();
        let mut trans_lines = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            let Some((kw, rest)) = line.split_once(char::is_whitespace).or(Some((line, ""))) else {
                continue;
            };
            match kw {
                "" => {}
                "alphabet" => {
                    alph_text.push_str(rest);
                    alph_text.push('\n');
                }
                "family" => family_line = Some((no + 1, rest)),
                "lstates" => l_names = rest.split_whitespace().map(String::from).collect(),
                "cstates" => c_names = rest.split_whitespace().map(String::from).collect(),
                "state" => state_lines.push((no + 1, rest)),
                "trans" => trans_lines.push((no + 1, rest)),
                other => return Err(parse_err(no + 1, format!("unknown keyword `{other}`"))),
            }
        }
        let alph = DistributedAlphabet::parse(&alph_text)?;
        let index = ViewIndex::new(&alph);
        let (fno, fam) = family_line.ok_or_else(|| parse_err(0, "missing `family` line"))?;
        let fam = fam
            .split_whitespace()
            .map(|tok| {
                parse_view(&alph, tok).ok_or_else(|| parse_err(fno, format!("bad view `{tok}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if fam != index.family() {
            return Err(parse_err(fno, "view family does not match the alphabet"));
        }
        let mut states = vec![None; state_lines.len()];
        for (no, rest) in state_lines {
            let mut toks = rest.split_whitespace().peekable();
            let id: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(no, "bad state id"))?;
            if id >= states.len() {
                return Err(parse_err(no, format!("state id {id} out of range")));
            }
            let mut entries = vec![None; index.len()];
            while let Some(tok) = toks.next() {
                if tok != "entry" {
                    return Err(parse_err(no, format!("expected `entry`, found `{tok}`")));
                }
                let w = toks
                    .next()
                    .and_then(|t| parse_view(&alph, t))
                    .and_then(|w| index.index_of(w))
                    .ok_or_else(|| parse_err(no, "bad entry view"))?;
                let first = toks
                    .next()
                    .ok_or_else(|| parse_err(no, "truncated entry"))?;
                let e = if let Some(v) = first.strip_prefix("verdict=") {
                    match Verdict::parse(v) {
                        Some(Verdict::Top) => Entry::Top,
                        Some(Verdict::Bot) => Entry::Bot,
                        _ => return Err(parse_err(no, format!("bad entry verdict `{v}`"))),
                    }
                } else {
                    let l = first
                        .strip_prefix("L=")
                        .and_then(|s| parse_set(&l_names, s))
                        .ok_or_else(|| parse_err(no, format!("bad L set `{first}`")))?;
                    let c = toks
                        .next()
                        .and_then(|t| t.strip_prefix("C="))
                        .and_then(|s| parse_set(&c_names, s))
                        .ok_or_else(|| parse_err(no, "bad C set"))?;
                    Entry::Sets(l, c)
                };
                entries[w] = Some(e);
            }
            let entries: Option<Vec<Entry>> = entries.into_iter().collect();
            states[id] = Some(entries.ok_or_else(|| parse_err(no, "missing entries"))?);
        }
        let states: Vec<Vec<Entry>> = states
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| parse_err(0, "state ids are not contiguous"))?;
        if states.is_empty() {
            return Err(parse_err(0, "no states"));
        }
        let mut trans = vec![vec![None; alph.num_letters()]; states.len()];
        for (no, rest) in trans_lines {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let [from, a, to, v] = toks[..] else {
                return Err(parse_err(
                    no,
                    "expected `trans <id> <letter> <id> verdict=<v>`",
                ));
            };
            let from: usize = from.parse().map_err(|_| parse_err(no, "bad source id"))?;
            let to: usize = to.parse().map_err(|_| parse_err(no, "bad target id"))?;
            if from >= states.len() || to >= states.len() {
                return Err(parse_err(no, "state id out of range"));
            }
            let a = alph.letter(a)?;
            let v = v
                .strip_prefix("verdict=")
                .and_then(Verdict::parse)
                .ok_or_else(|| parse_err(no, format!("bad verdict `{v}`")))?;
            trans[from][a.0] = Some((to, v));
        }
        let trans = trans
            .into_iter()
            .map(|r| r.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| parse_err(0, "transition table is incomplete"))?;
        Ok(VerdictAutomaton {
            alph,
            index,
            l_names,
            c_names,
            states,
            trans,
        })
    }
}

fn format_set(names: &[String], s: &StateSet) -> String {
    let v: Vec<&str> = s.ones().map(|q| names[q].as_str()).collect();
    format!("{{{}}}", v.join(","))
}

fn parse_set(names: &[String], s: &str) -> Option<StateSet> {
    let inner = s.strip_prefix('{')?.strip_suffix('}')?;
    let mut set = StateSet::with_capacity(names.len());
    for n in inner.split(',').filter(|n| !n.is_empty()) {
        set.insert(names.iter().position(|x| x == n)?);
    }
    Some(set)
}

fn parse_view(alph: &DistributedAlphabet, tok: &str) -> Option<ProcSet> {
    let inner = tok.strip_prefix("W={")?.strip_suffix('}')?;
    let names: Vec<&str> = inner.split(',').filter(|n| !n.is_empty()).collect();
    alph.proc_set(&names).ok()
}

/// Verdict of every event of `w`, in word order.
pub fn verdict_on_prefix(va: &VerdictAutomaton, w: &[Letter]) -> Vec<Verdict> {
    let mut s = va.initial();
    w.iter()
        .map(|&a| {
            let (t, v) = va.step(s, a);
            s = t;
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::build_closure_recognizer;
    use crate::trace::Trace;

    fn sec3() -> DistributedAlphabet {
        DistributedAlphabet::parse("processes x y\naction a x\naction b y\naction c x y\n").unwrap()
    }

    const NO_CC: &str = "states n c\ninitial n\naccepting n c\n\
        trans n a n\ntrans n b n\ntrans n c c\ntrans c a n\ntrans c b n\n";
    const SOME_C: &str = "states n y\ninitial n\naccepting y\n\
        trans n a n\ntrans n b n\ntrans n c y\ntrans y a y\ntrans y b y\ntrans y c y\n";

    fn va(text: &str) -> (DistributedAlphabet, VerdictAutomaton) {
        let alph = sec3();
        let b = BuchiAutomaton::parse_for(&alph, text).unwrap();
        let m = synthesize_monitor(&b, None, &alph).unwrap();
        (alph, m)
    }

    #[test]
    fn no_two_cs() {
        let (alph, m) = va(NO_CC);
        let w = alph.parse_word("acc").unwrap();
        assert_eq!(
            verdict_on_prefix(&m, &w),
            [Verdict::None, Verdict::None, Verdict::Bot]
        );
        let w = alph.parse_word("ca").unwrap();
        assert_eq!(verdict_on_prefix(&m, &w), [Verdict::None, Verdict::None]);
        assert!(verdict_on_prefix(&m, &[]).is_empty());
    }

    #[test]
    fn some_c_is_top_at_first_c() {
        let (alph, m) = va(SOME_C);
        let w = alph.parse_word("abca").unwrap();
        assert_eq!(
            verdict_on_prefix(&m, &w),
            [Verdict::None, Verdict::None, Verdict::Top, Verdict::Top]
        );
    }

    #[test]
    fn full_language_is_top_at_once() {
        let alph = sec3();
        let full = BuchiAutomaton::universal(alph.letter_names().to_vec());
        let empty = BuchiAutomaton::empty(alph.letter_names().to_vec());
        let m = synthesize_monitor(&full, Some(&empty), &alph).unwrap();
        let w = alph.parse_word("abcab").unwrap();
        assert!(verdict_on_prefix(&m, &w).iter().all(|v| *v == Verdict::Top));
        assert_eq!(m.last_verdict(&[]), Verdict::None);
    }

    #[test]
    fn overlapping_pair_is_rejected() {
        let alph = sec3();
        let b = BuchiAutomaton::parse_for(&alph, NO_CC).unwrap();
        assert!(matches!(
            synthesize_monitor(&b, Some(&b), &alph),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let (_, m) = va(NO_CC);
        let text = m.to_text();
        let back = VerdictAutomaton::parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn bot_matches_closure_refusal() {
        let alph = sec3();
        let b = BuchiAutomaton::parse_for(&alph, NO_CC).unwrap();
        let m = synthesize_monitor(&b, None, &alph).unwrap();
        let mut rec = build_closure_recognizer(&b, &alph).unwrap();
        for w in crate::monitorability::traces_up_to(&alph, 5) {
            let w = w.normal_form().to_vec();
            let vs = verdict_on_prefix(&m, &w);
            let first_bot = vs.iter().position(|v| *v == Verdict::Bot);
            let refused = (1..=w.len())
                .find(|&i| !rec.accepts(&w[..i]).unwrap())
                .map(|i| i - 1);
            assert_eq!(first_bot, refused, "{}", alph.format_word(&w));
        }
    }

    #[test]
    fn verdicts_are_causally_absorbing() {
        let (alph, m) = va(NO_CC);
        for t in crate::monitorability::traces_up_to(&alph, 6) {
            let w = t.normal_form();
            let vs = verdict_on_prefix(&m, w);
            let decided: Vec<Verdict> = vs.iter().copied().filter(|v| v.is_decided()).collect();
            assert!(decided.windows(2).all(|p| p[0] == p[1]));
            let tr = Trace::from_word(&alph, w).unwrap();
            for (i, v) in vs.iter().enumerate() {
                if v.is_decided() {
                    for j in i..w.len() {
                        if tr.le(i, j) {
                            assert_eq!(vs[j], *v);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn monitorable_fixture_can_always_decide() {
        let (_, m) = va(NO_CC);
        assert!(m.can_reach_verdict().iter().all(|&x| x));
    }
}
