//! Finite-state abstraction of `max(t)` used to decide primality on the fly.

use crate::alphabet::{DistributedAlphabet, Letter, ProcSet};

/// Blocks `(a, B)` partition the active processes by the identity of their
/// last event: `B` is the set of processes whose last event is an `a`-event
/// still visible there. A block is full (`B = dom(a)`) iff its event is
/// maximal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimalityTracker {
    blocks: Vec<(Letter, ProcSet)>,
}

impl PrimalityTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn step(&self, alph: &DistributedAlphabet, a: Letter) -> PrimalityTracker {
        let dom = alph.dom(a);
        let mut blocks: Vec<(Letter, ProcSet)> = self
            .blocks
            .iter()
            .map(|&(l, b)| (l, b.difference(dom)))
            .filter(|(_, b)| !b.is_empty())
            .collect();
        blocks.push((a, dom));
        blocks.sort();
        PrimalityTracker { blocks }
    }

    pub fn run(alph: &DistributedAlphabet, word: &[Letter]) -> PrimalityTracker {
        word.iter()
            .fold(PrimalityTracker::new(), |t, &a| t.step(alph, a))
    }

    pub fn blocks(&self) -> &[(Letter, ProcSet)] {
        &self.blocks
    }

    /// Letters of the maximal events.
    pub fn maximal_letters<'a>(
        &'a self,
        alph: &'a DistributedAlphabet,
    ) -> impl Iterator<Item = Letter> + 'a {
        self.blocks
            .iter()
            .filter(move |(l, b)| *b == alph.dom(*l))
            .map(|(l, _)| *l)
    }

    /// `(prime?, last letter when prime)`.
    pub fn status(&self, alph: &DistributedAlphabet) -> (bool, Option<Letter>) {
        let mut full = self.maximal_letters(alph);
        match (full.next(), full.next()) {
            (Some(l), None) => (true, Some(l)),
            _ => (false, None),
        }
    }

    pub fn is_prime(&self, alph: &DistributedAlphabet) -> bool {
        self.status(alph).0
    }

    pub fn active(&self) -> ProcSet {
        self.blocks
            .iter()
            .fold(ProcSet::EMPTY, |s, (_, b)| s.union(*b))
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}
