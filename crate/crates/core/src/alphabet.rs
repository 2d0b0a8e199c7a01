//! Distributed alphabets: letters located on non-empty sets of processes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::{parse_err, Error, Result};

/// Index of a letter in its alphabet. The index order is the fixed total
/// letter order used for normal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Process(pub usize);

/// A set of at most 64 processes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProcSet(pub u64);

impl ProcSet {
    pub const EMPTY: ProcSet = ProcSet(0);

    pub fn singleton(p: Process) -> Self {
        ProcSet(1 << p.0)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ProcSet(u64::MAX)
        } else {
            ProcSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, p: Process) -> bool {
        self.0 >> p.0 & 1 == 1
    }

    pub fn insert(&mut self, p: Process) {
        self.0 |= 1 << p.0;
    }

    pub fn union(self, other: ProcSet) -> ProcSet {
        ProcSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ProcSet) -> ProcSet {
        ProcSet(self.0 & other.0)
    }

    pub fn difference(self, other: ProcSet) -> ProcSet {
        ProcSet(self.0 & !other.0)
    }

    pub fn intersects(self, other: ProcSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset(self, other: ProcSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn first(self) -> Option<Process> {
        if self.0 == 0 {
            None
        } else {
            Some(Process(self.0.trailing_zeros() as usize))
        }
    }

    pub fn iter(self) -> impl Iterator<Item = Process> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let p = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(Process(p))
            }
        })
    }
}

impl FromIterator<Process> for ProcSet {
    fn from_iter<I: IntoIterator<Item = Process>>(iter: I) -> Self {
        let mut s = ProcSet::EMPTY;
        for p in iter {
            s.insert(p);
        }
        s
    }
}

/// Letters with a location function `dom`. Two letters are independent iff
/// their domains are disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributedAlphabet {
    processes: Vec<String>,
    letters: Vec<String>,
    dom: Vec<ProcSet>,
    letter_index: HashMap<String, Letter>,
    process_index: HashMap<String, Process>,
}

impl DistributedAlphabet {
    /// Builds an alphabet from process names and `(letter, domain)` pairs.
    pub fn new<S: AsRef<str>>(processes: &[S], letters: &[(S, Vec<S>)]) -> Result<Self> {
        let mut alph = DistributedAlphabet {
            processes: Vec::new(),
            letters: Vec::new(),
            dom: Vec::new(),
            letter_index: HashMap::new(),
            process_index: HashMap::new(),
        };
        for p in processes {
            alph.add_process(p.as_ref())?;
        }
        for (name, dom) in letters {
            let procs: Vec<&str> = dom.iter().map(|s| s.as_ref()).collect();
            alph.add_letter(name.as_ref(), &procs)?;
        }
        Ok(alph)
    }

    fn add_process(&mut self, name: &str) -> Result<()> {
        if self.process_index.contains_key(name) {
            return Err(Error::Invalid(format!("duplicate process `{name}`")));
        }
        if self.processes.len() == 64 {
            return Err(Error::CapExceeded {
                what: "number of processes",
                cap: 64,
            });
        }
        self.process_index
            .insert(name.to_string(), Process(self.processes.len()));
        self.processes.push(name.to_string());
        Ok(())
    }

    fn add_letter(&mut self, name: &str, dom: &[&str]) -> Result<()> {
        if self.letter_index.contains_key(name) {
            return Err(Error::Invalid(format!("duplicate action `{name}`")));
        }
        if self.letters.len() == 64 {
            return Err(Error::CapExceeded {
                what: "number of letters",
                cap: 64,
            });
        }
        let mut set = ProcSet::EMPTY;
        for p in dom {
            let proc = self.process(p)?;
            if set.contains(proc) {
                return Err(Error::Invalid(format!(
                    "process `{p}` listed twice for action `{name}`"
                )));
            }
            set.insert(proc);
        }
        if set.is_empty() {
            return Err(Error::Invalid(format!("action `{name}` has empty domain")));
        }
        self.letter_index
            .insert(name.to_string(), Letter(self.letters.len()));
        self.letters.push(name.to_string());
        self.dom.push(set);
        Ok(())
    }

    /// Parses the line format `processes p q r` followed by one
    /// `action <letter> <proc>...` line per letter. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alph: Option<DistributedAlphabet> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            let mut toks = line.split_whitespace();
            let Some(head) = toks.next() else { continue };
            match head {
                "processes" => {
                    if alph.is_some() {
                        return Err(parse_err(i + 1, "duplicate `processes` line"));
                    }
                    let names: Vec<&str> = toks.collect();
                    let a = DistributedAlphabet::new::<&str>(&names, &[])
                        .map_err(|e| parse_err(i + 1, e.to_string()))?;
                    alph = Some(a);
                }
                "action" => {
                    let a = alph
                        .as_mut()
                        .ok_or_else(|| parse_err(i + 1, "`action` before `processes`"))?;
                    let name = toks
                        .next()
                        .ok_or_else(|| parse_err(i + 1, "missing action name"))?;
                    let procs: Vec<&str> = toks.collect();
                    a.add_letter(name, &procs)
                        .map_err(|e| parse_err(i + 1, e.to_string()))?;
                }
                other => return Err(parse_err(i + 1, format!("unexpected keyword `{other}`"))),
            }
        }
        alph.ok_or_else(|| parse_err(0, "missing `processes` line"))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("processes {}\n", self.processes.join(" "));
        for (i, name) in self.letters.iter().enumerate() {
            let procs: Vec<&str> = self.dom[i]
                .iter()
                .map(|p| self.processes[p.0].as_str())
                .collect();
            out.push_str(&format!("action {} {}\n", name, procs.join(" ")));
        }
        out
    }

    pub fn num_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn num_processes(&self) -> usize {
        self.processes.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.letters.len()).map(Letter)
    }

    pub fn processes(&self) -> impl Iterator<Item = Process> {
        (0..self.processes.len()).map(Process)
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letters
    }

    pub fn process_names(&self) -> &[String] {
        &self.processes
    }

    pub fn letter_name(&self, a: Letter) -> &str {
        &self.letters[a.0]
    }

    pub fn process_name(&self, p: Process) -> &str {
        &self.processes[p.0]
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.letter_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn process(&self, name: &str) -> Result<Process> {
        self.process_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownProcess(name.to_string()))
    }

    pub fn proc_set(&self, names: &[&str]) -> Result<ProcSet> {
        names.iter().map(|n| self.process(n)).collect()
    }

    pub fn all_processes(&self) -> ProcSet {
        ProcSet::full(self.processes.len())
    }

    pub fn dom(&self, a: Letter) -> ProcSet {
        self.dom[a.0]
    }

    /// `(a, b) ∈ I` iff `dom(a) ∩ dom(b) = ∅`.
    pub fn independent(&self, a: Letter, b: Letter) -> bool {
        !self.dom[a.0].intersects(self.dom[b.0])
    }

    pub fn independent_by_name(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.independent(self.letter(a)?, self.letter(b)?))
    }

    /// Parses a word. Tokens are separated by whitespace; when every letter
    /// name is a single character, a token may also be a run of letters
    /// (`"cbad"`). The empty string and `-` denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Letter>> {
        let single = self.letters.iter().all(|l| l.chars().count() == 1);
        let mut word = Vec::new();
        for tok in text.split_whitespace() {
            if let Ok(a) = self.letter(tok) {
                word.push(a);
            } else if tok == "-" || tok == "ε" {
                continue;
            } else if single {
                for ch in tok.chars() {
                    word.push(self.letter(&ch.to_string())?);
                }
            } else {
                return Err(Error::UnknownLetter(tok.to_string()));
            }
        }
        Ok(word)
    }

    pub fn format_word(&self, word: &[Letter]) -> String {
        if word.is_empty() {
            return "-".to_string();
        }
        let single = self.letters.iter().all(|l| l.chars().count() == 1);
        let names: Vec<&str> = word.iter().map(|a| self.letter_name(*a)).collect();
        if single {
            names.concat()
        } else {
            names.join(" ")
        }
    }

    /// Connected components of the dependence graph on letters, each sorted,
    /// ordered by their smallest letter.
    pub fn components(&self) -> Vec<Vec<Letter>> {
        self.components_of(&self.letters().collect::<Vec<_>>())
    }

    /// Components of the dependence graph restricted to `letters`.
    pub fn components_of(&self, letters: &[Letter]) -> Vec<Vec<Letter>> {
        let n = self.letters.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for (i, &a) in letters.iter().enumerate() {
            for &b in &letters[i + 1..] {
                if !self.independent(a, b) {
                    let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }
        let mut groups: Vec<(usize, BTreeSet<Letter>)> = Vec::new();
        for &a in letters {
            let r = find(&mut parent, a.0);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, g)) => {
                    g.insert(a);
                }
                None => groups.push((r, BTreeSet::from([a]))),
            }
        }
        let mut comps: Vec<Vec<Letter>> = groups
            .into_iter()
            .map(|(_, g)| g.into_iter().collect())
            .collect();
        comps.sort();
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Index into [`components`](Self::components) of the component holding `a`.
    pub fn component_of(&self, a: Letter) -> usize {
        self.components()
            .iter()
            .position(|c| c.contains(&a))
            .expect("every letter lies in a component")
    }

    /// Whether the letters in `letters` form a connected sub-alphabet.
    /// The empty set counts as connected.
    pub fn is_connected_subset(&self, letters: &[Letter]) -> bool {
        self.components_of(letters).len() <= 1
    }

    /// Union-closure of all action domains, sorted.
    pub fn domain_family(&self) -> Vec<ProcSet> {
        let mut family: BTreeSet<ProcSet> = self.dom.iter().copied().collect();
        loop {
            let current: Vec<ProcSet> = family.iter().copied().collect();
            let mut grew = false;
            for (i, &x) in current.iter().enumerate() {
                for &y in &current[i + 1..] {
                    grew |= family.insert(x.union(y));
                }
            }
            if !grew {
                break;
            }
        }
        family.into_iter().collect()
    }

    pub fn format_procs(&self, set: ProcSet) -> String {
        let names: Vec<&str> = set.iter().map(|p| self.process_name(p)).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl fmt::Display for DistributedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

/// The alphabet of the trace in Fig. 1 style examples: `a` on `{p,q}`,
/// `b` on `{q,r}`, `c` on `{p}`, `d` on `{r}`.
#[cfg(test)]
pub(crate) fn fig1() -> DistributedAlphabet {
    DistributedAlphabet::parse(
        "processes p q r\naction a p q\naction b q r\naction c p\naction d r\n",
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_from_domains() {
        let alph = fig1();
        assert!(alph.independent_by_name("a", "d").unwrap());
        assert!(!alph.independent_by_name("a", "a").unwrap());
        assert!(!alph.independent_by_name("a", "b").unwrap());
        assert!(alph.independent_by_name("c", "b").unwrap());
        assert_eq!(
            alph.independent_by_name("a", "z"),
            Err(Error::UnknownLetter("z".into()))
        );
    }

    #[test]
    fn components() {
        let alph = fig1();
        assert_eq!(alph.components().len(), 1);
        assert!(alph.is_connected());

        let disc = DistributedAlphabet::parse("processes x y\naction a x\naction b y\n").unwrap();
        assert_eq!(disc.components(), vec![vec![Letter(0)], vec![Letter(1)]]);
        assert!(!disc.is_connected());

        let single = DistributedAlphabet::parse("processes x\naction a x\n").unwrap();
        assert!(single.is_connected());
    }

    #[test]
    fn parse_errors() {
        assert!(DistributedAlphabet::parse("processes p p\n").is_err());
        assert!(DistributedAlphabet::parse("processes p\naction a p\naction a p\n").is_err());
        assert!(DistributedAlphabet::parse("processes p\naction a q\n").is_err());
        assert!(DistributedAlphabet::parse("processes p\naction a\n").is_err());
        assert!(DistributedAlphabet::parse("action a p\n").is_err());
    }

    #[test]
    fn text_round_trip() {
        let alph = fig1();
        assert_eq!(DistributedAlphabet::parse(&alph.to_text()).unwrap(), alph);
    }

    #[test]
    fn words() {
        let alph = fig1();
        let w = alph.parse_word("cbad").unwrap();
        assert_eq!(w, vec![Letter(2), Letter(1), Letter(0), Letter(3)]);
        assert_eq!(alph.parse_word("c b a d").unwrap(), w);
        assert_eq!(alph.format_word(&w), "cbad");
        assert!(alph.parse_word("").unwrap().is_empty());
        assert!(alph.parse_word("cx").is_err());
    }

    #[test]
    fn domain_family_is_union_closed() {
        let alph = fig1();
        let fam = alph.domain_family();
        for &x in &fam {
            for &y in &fam {
                assert!(fam.contains(&x.union(y)));
            }
        }
        // {p,q}, {q,r}, {p}, {r}, {p,q,r}, {p,r}
        assert_eq!(fam.len(), 6);
    }
}
