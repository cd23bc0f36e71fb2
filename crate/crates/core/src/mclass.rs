//! M-equivalence classes: full enumeration by pruned backtracking over the
//! anagram space of a word, the elementary rewriting rules E1/E2, and the
//! rule-closure oracle for binary alphabets.

use crate::budget::{Budget, BudgetMeter, MeterHandle};
use crate::error::{Error, Result};
use crate::parikh::{CornerCounts, ParikhMatrix};
use crate::wordcore::{OrderedAlphabet, Word};
use std::collections::{BTreeSet, VecDeque};

/// A fully enumerated M-equivalence class.
///
/// `members` is lexicographically sorted, pairwise distinct, and contains
/// the representative; every member shares `matrix`.
#[derive(Clone, Debug)]
pub struct MClass {
    representative: Word,
    matrix: ParikhMatrix,
    members: Vec<Word>,
}

impl MClass {
    pub fn representative(&self) -> &Word {
        &self.representative
    }

    pub fn matrix(&self) -> &ParikhMatrix {
        &self.matrix
    }

    pub fn members(&self) -> &[Word] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_ambiguous(&self) -> bool {
        self.members.len() >= 2
    }

    /// Rebuild the class around a different member, e.g. to check that
    /// verdicts do not depend on the representative.
    pub fn with_representative(&self, representative: Word) -> Result<MClass> {
        if self.members.binary_search(&representative).is_err() {
            return Err(Error::InvalidOccurrence);
        }
        Ok(MClass { representative, matrix: self.matrix.clone(), members: self.members.clone() })
    }
}

/// The two elementary M-equivalence-preserving rewriting rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Swap two adjacent letters whose indices differ by at least 2.
    E1,
    /// Swap an adjacent pair of consecutive letters together with a later
    /// reversed copy of the pair, provided the segment between them avoids
    /// the letters directly below and above the pair.
    E2,
}

/// One place a rule applies. Positions are 0-based; a pair occupies the
/// named position and the next one, so the factorization around it is
/// recoverable from the word itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleOccurrence {
    E1 { at: usize },
    E2 { first: usize, second: usize },
}

impl RuleOccurrence {
    pub fn rule(&self) -> Rule {
        match self {
            RuleOccurrence::E1 { .. } => Rule::E1,
            RuleOccurrence::E2 { .. } => Rule::E2,
        }
    }
}

/// Is the segment free of the letters directly below `lo` and above
/// `lo + 1`? Letters outside the alphabet count as absent.
fn middle_segment_ok(segment: &[u8], lo: u8, s: usize) -> bool {
    let below = lo.checked_sub(1);
    let above = if ((lo + 2) as usize) < s { Some(lo + 2) } else { None };
    segment.iter().all(|&l| Some(l) != below && Some(l) != above)
}

/// All factorizations of `w` where `rule` applies, left to right.
///
/// E2 occurrences cover both orientations: an ascending pair with a later
/// descending copy and vice versa, since the rule identifies the two words.
pub fn find_rule_occurrences(w: &Word, rule: Rule) -> Vec<RuleOccurrence> {
    let letters = w.letters();
    let n = letters.len();
    let s = w.alphabet().size();
    let mut out = Vec::new();
    match rule {
        Rule::E1 => {
            for p in 0..n.saturating_sub(1) {
                let (x, y) = (letters[p], letters[p + 1]);
                if x.abs_diff(y) >= 2 {
                    out.push(RuleOccurrence::E1 { at: p });
                }
            }
        }
        Rule::E2 => {
            for p in 0..n.saturating_sub(3) {
                let (x, y) = (letters[p], letters[p + 1]);
                if x.abs_diff(y) != 1 {
                    continue;
                }
                let lo = x.min(y);
                for q in p + 2..n - 1 {
                    if letters[q] == y && letters[q + 1] == x {
                        if middle_segment_ok(&letters[p + 2..q], lo, s) {
                            out.push(RuleOccurrence::E2 { first: p, second: q });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Apply a rule occurrence, producing the rewritten (M-equivalent) word.
pub fn apply_rule(w: &Word, occ: RuleOccurrence) -> Result<Word> {
    let mut letters = w.letters().to_vec();
    let n = letters.len();
    let s = w.alphabet().size();
    match occ {
        RuleOccurrence::E1 { at } => {
            if at + 1 >= n || letters[at].abs_diff(letters[at + 1]) < 2 {
                return Err(Error::InvalidOccurrence);
            }
            letters.swap(at, at + 1);
        }
        RuleOccurrence::E2 { first, second } => {
            if second < first + 2 || second + 1 >= n {
                return Err(Error::InvalidOccurrence);
            }
            let (x, y) = (letters[first], letters[first + 1]);
            if x.abs_diff(y) != 1
                || letters[second] != y
                || letters[second + 1] != x
                || !middle_segment_ok(&letters[first + 2..second], x.min(y), s)
            {
                return Err(Error::InvalidOccurrence);
            }
            letters.swap(first, first + 1);
            letters.swap(second, second + 1);
        }
    }
    Ok(Word::from_letters_unchecked(w.alphabet(), letters))
}

/// Does some single rule application yield a lexicographically smaller word?
/// Cheap sound pre-filter for canonical-representative tests: a hit proves
/// the word is not the least member of its class.
pub(crate) fn has_smaller_rule_image(letters: &[u8], s: usize) -> bool {
    let n = letters.len();
    for p in 0..n.saturating_sub(1) {
        if letters[p] > letters[p + 1] && letters[p] - letters[p + 1] >= 2 {
            return true;
        }
    }
    for p in 0..n.saturating_sub(3) {
        let (x, y) = (letters[p], letters[p + 1]);
        // descending consecutive pair: the E2 image starts lower at p
        if x != y + 1 {
            continue;
        }
        let lo = y;
        let below = lo.checked_sub(1);
        let above = if ((lo + 2) as usize) < s { Some(lo + 2) } else { None };
        for q in p + 2..n - 1 {
            if letters[q] == y && letters[q + 1] == x {
                return true;
            }
            if Some(letters[q]) == below || Some(letters[q]) == above {
                break;
            }
        }
    }
    false
}

/// Resource limits and worker count for one enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub budget: Budget,
    /// Top-level DFS branches fan out across this many workers when the
    /// `parallel` feature is enabled; the member list is identical either
    /// way. 1 means fully sequential.
    pub workers: usize,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { budget: Budget::default(), workers: 1 }
    }
}

pub(crate) enum Visit {
    Continue,
    Stop,
}

#[derive(PartialEq, Eq, Clone, Copy, Debug)]
pub(crate) enum Flow {
    Done,
    Stopped,
    Budget,
}

/// Depth-first construction of all words with a given target matrix over a
/// given letter multiset, left to right in lexicographic order.
///
/// A branch is cut when some band count either already overshoots its target
/// entry or cannot reach it even with the remaining letters arranged in the
/// entry-maximizing (ascending) order; the mirror bound uses the
/// entry-minimizing (descending) arrangement. Both bounds are admissible:
/// no valid completion is ever cut, so the visitor sees exactly the class.
pub(crate) struct ClassEngine {
    s: usize,
    len: usize,
    alphabet: OrderedAlphabet,
    target: CornerCounts,
    counts: CornerCounts,
    remaining: Vec<u32>,
    prefix: Vec<u8>,
    undo: Vec<u64>,
}

impl ClassEngine {
    pub(crate) fn for_word(w: &Word) -> Result<Self> {
        Ok(ClassEngine {
            s: w.alphabet().size(),
            len: w.len(),
            alphabet: w.alphabet(),
            target: CornerCounts::from_word(w)?,
            counts: CornerCounts::new(w.alphabet().size()),
            remaining: w.letter_counts(),
            prefix: Vec::with_capacity(w.len()),
            undo: Vec::with_capacity(w.len() * w.alphabet().size()),
        })
    }

    pub(crate) fn target_matrix(&self) -> ParikhMatrix {
        self.target.to_matrix()
    }

    /// Bound checks for every band containing letter `q`; bands not
    /// containing `q` are unaffected by the last placement.
    #[inline]
    fn feasible_after(&self, q: usize) -> bool {
        for i in 1..=q {
            for j in q..=self.s {
                let t = self.target.get(i, j);
                let c = self.counts.get(i, j);
                let n_last = self.remaining[j - 1] as u64;
                // every completion embeds at least the current occurrences
                // plus those pairing the (i..j-1) prefix with a remaining
                // final letter
                let lo = c.saturating_add(self.counts.get(i, j - 1).saturating_mul(n_last));
                if lo > t {
                    return false;
                }
                // ascending arrangement of the remaining letters attains the
                // product upper bound simultaneously for every band
                let mut hi = 0u64;
                let mut prod = 1u64;
                let mut k = j;
                loop {
                    hi = hi.saturating_add(self.counts.get(i, k).saturating_mul(prod));
                    if hi >= t || k + 1 == i {
                        break;
                    }
                    prod = prod.saturating_mul(self.remaining[k - 1] as u64);
                    k -= 1;
                }
                if hi < t {
                    return false;
                }
            }
        }
        true
    }

    #[inline]
    fn push(&mut self, letter: u8) -> bool {
        let q = letter as usize + 1;
        self.remaining[letter as usize] -= 1;
        self.prefix.push(letter);
        self.counts.append_saturating(q, &mut self.undo);
        self.feasible_after(q)
    }

    #[inline]
    fn pop(&mut self, letter: u8) {
        let q = letter as usize + 1;
        self.counts.unappend(q, &mut self.undo);
        self.prefix.pop();
        self.remaining[letter as usize] += 1;
    }

    /// Replay a known-feasible prefix (used by parallel workers).
    #[cfg(feature = "parallel")]
    fn replay(&mut self, prefix: &[u8]) {
        for &letter in prefix {
            let ok = self.push(letter);
            debug_assert!(ok, "replayed prefix must stay feasible");
        }
    }

    /// A pristine engine with the same target and full multiset.
    #[cfg(feature = "parallel")]
    fn fresh_copy(&self) -> ClassEngine {
        debug_assert!(self.prefix.is_empty());
        ClassEngine {
            s: self.s,
            len: self.len,
            alphabet: self.alphabet,
            target: self.target.clone(),
            counts: CornerCounts::new(self.s),
            remaining: self.remaining.clone(),
            prefix: Vec::with_capacity(self.len),
            undo: Vec::with_capacity(self.len * self.s),
        }
    }

    pub(crate) fn run<F>(&mut self, meter: &mut MeterHandle<'_>, visit: &mut F) -> Flow
    where
        F: FnMut(&[u8]) -> Visit,
    {
        if self.prefix.len() == self.len {
            debug_assert!(self.counts == self.target, "completion must hit the target exactly");
            return match visit(&self.prefix) {
                Visit::Continue => Flow::Done,
                Visit::Stop => Flow::Stopped,
            };
        }
        for letter in 0..self.s as u8 {
            if self.remaining[letter as usize] == 0 {
                continue;
            }
            if !meter.tick() {
                return Flow::Budget;
            }
            let feasible = self.push(letter);
            let flow = if feasible { self.run(meter, visit) } else { Flow::Done };
            self.pop(letter);
            if flow != Flow::Done {
                return flow;
            }
        }
        Flow::Done
    }

    /// Feasible prefixes of exactly `depth` letters, in lexicographic order.
    #[cfg(feature = "parallel")]
    fn feasible_prefixes(&mut self, depth: usize, out: &mut Vec<Vec<u8>>) {
        if self.prefix.len() == depth {
            out.push(self.prefix.clone());
            return;
        }
        for letter in 0..self.s as u8 {
            if self.remaining[letter as usize] == 0 {
                continue;
            }
            if self.push(letter) {
                self.feasible_prefixes(depth, out);
            }
            self.pop(letter);
        }
    }

    fn member(&self, letters: &[u8]) -> Word {
        Word::from_letters_unchecked(self.alphabet, letters.to_vec())
    }
}

fn sequential_members(engine: &mut ClassEngine, meter: &BudgetMeter) -> (Vec<Word>, Flow) {
    let alphabet = engine.alphabet;
    let mut members = Vec::new();
    let mut handle = MeterHandle::new(meter);
    let flow = engine.run(&mut handle, &mut |letters| {
        members.push(Word::from_letters_unchecked(alphabet, letters.to_vec()));
        Visit::Continue
    });
    drop(handle);
    (members, flow)
}

#[cfg(feature = "parallel")]
fn parallel_members(
    engine: &mut ClassEngine,
    meter: &BudgetMeter,
    workers: usize,
) -> (Vec<Word>, Flow) {
    use rayon::prelude::*;

    let want = workers.saturating_mul(8).max(2);
    let mut depth = 1;
    let mut prefixes = Vec::new();
    while depth <= engine.len.min(8) {
        prefixes.clear();
        engine.feasible_prefixes(depth, &mut prefixes);
        if prefixes.len() >= want || prefixes.is_empty() {
            break;
        }
        depth += 1;
    }
    if prefixes.is_empty() {
        // either the length is 0 (the class of the empty word) or no prefix
        // is feasible, which cannot happen since the word itself completes
        return sequential_members(engine, meter);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("worker pool");
    let results: Vec<(Vec<Word>, Flow)> = pool.install(|| {
        prefixes
            .par_iter()
            .map(|prefix| {
                if meter.is_exhausted() {
                    return (Vec::new(), Flow::Budget);
                }
                let mut sub = engine.fresh_copy();
                sub.replay(prefix);
                sequential_members(&mut sub, meter)
            })
            .collect()
    });

    let mut members = Vec::new();
    let mut flow = Flow::Done;
    for (chunk, chunk_flow) in results {
        members.extend(chunk);
        if chunk_flow == Flow::Budget {
            flow = Flow::Budget;
        }
    }
    (members, flow)
}

/// Enumerate the full M-class of `w`: every word of the same length whose
/// Parikh matrix equals `w`'s, sorted lexicographically.
///
/// The member list is deterministic and identical for any worker count.
pub fn enumerate_class(w: &Word, options: &EnumOptions) -> Result<MClass> {
    let mut engine = ClassEngine::for_word(w)?;
    let meter = BudgetMeter::new(&options.budget);
    #[cfg(feature = "parallel")]
    let (members, flow) = if options.workers > 1 {
        parallel_members(&mut engine, &meter, options.workers)
    } else {
        sequential_members(&mut engine, &meter)
    };
    #[cfg(not(feature = "parallel"))]
    let (members, flow) = sequential_members(&mut engine, &meter);

    match flow {
        Flow::Budget => Err(Error::BudgetExhausted { nodes: meter.nodes_used(), partial: members }),
        _ => {
            debug_assert!(members.windows(2).all(|p| p[0] < p[1]), "members sorted and distinct");
            debug_assert!(members.binary_search(w).is_ok(), "the word belongs to its own class");
            Ok(MClass { representative: w.clone(), matrix: engine.target_matrix(), members })
        }
    }
}

/// Does the M-class of `w` contain a second word? Shares the enumeration
/// search but exits as soon as a second member appears.
pub fn is_m_ambiguous(w: &Word, budget: &Budget) -> Result<bool> {
    let mut engine = ClassEngine::for_word(w)?;
    let meter = BudgetMeter::new(budget);
    let mut handle = MeterHandle::new(&meter);
    let mut found = 0usize;
    let flow = engine.run(&mut handle, &mut |_| {
        found += 1;
        if found >= 2 {
            Visit::Stop
        } else {
            Visit::Continue
        }
    });
    drop(handle);
    match flow {
        Flow::Budget => Err(Error::BudgetExhausted { nodes: meter.nodes_used(), partial: vec![] }),
        _ => Ok(found >= 2),
    }
}

/// Scan-side enumeration outcome for one candidate representative.
pub(crate) enum ScanEnumeration {
    /// A lexicographically smaller member exists; the candidate is skipped.
    NonCanonical,
    /// The candidate is the least member of its class; all members returned.
    Canonical(Vec<Word>),
    Budget,
}

/// One-pass canonicality test plus enumeration: the first member produced by
/// the lexicographic DFS is the least member of the class, so if it is not
/// the candidate itself, the search stops immediately.
pub(crate) fn enumerate_if_canonical(w: &Word, meter: &BudgetMeter) -> Result<ScanEnumeration> {
    let mut engine = ClassEngine::for_word(w)?;
    let mut handle = MeterHandle::new(meter);
    let mut members: Vec<Word> = Vec::new();
    let mut non_canonical = false;
    let flow = engine.run(&mut handle, &mut |letters| {
        if members.is_empty() && letters != w.letters() {
            non_canonical = true;
            return Visit::Stop;
        }
        members.push(Word::from_letters_unchecked(w.alphabet(), letters.to_vec()));
        Visit::Continue
    });
    Ok(match flow {
        Flow::Budget => ScanEnumeration::Budget,
        _ if non_canonical => ScanEnumeration::NonCanonical,
        _ => ScanEnumeration::Canonical(members),
    })
}

/// Close `{w}` under rule E2, breadth-first until fixpoint. Rule E2 is a
/// complete characterization of M-equivalence only over binary alphabets, so
/// larger alphabets are rejected rather than returning a possibly-partial
/// class.
pub fn e2_closure(w: &Word) -> Result<BTreeSet<Word>> {
    if w.alphabet().size() != 2 {
        return Err(Error::NotBinary(w.alphabet().size()));
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(w.clone());
    queue.push_back(w.clone());
    while let Some(current) = queue.pop_front() {
        for occ in find_rule_occurrences(&current, Rule::E2) {
            let next = apply_rule(&current, occ)?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}
