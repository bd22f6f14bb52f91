//! Exhaustive bounded checking of TP1 and TP2 with counterexample extraction.
//!
//! TP1 is tested as state identity on a single probe document whose symbols
//! are pairwise distinct and disjoint from the insert alphabet, so any two
//! different placements of the same multiset of symbols are told apart.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::model::{Document, Operation, Position};
use crate::transform::{transform_along, Family, Transform, TransformError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("max position must be non-negative, got {0}")]
    NegativeMaxPos(Position),
    #[error("insert alphabet is empty")]
    EmptyAlphabet,
    #[error("insert alphabet repeats `{0}`")]
    DuplicateSymbol(char),
    #[error("probe has {len} symbols, at least {needed} required")]
    ProbeTooShort { len: usize, needed: usize },
    #[error("probe repeats `{0}`")]
    ProbeNotDistinct(char),
    #[error("probe symbol `{0}` also belongs to the insert alphabet")]
    ProbeOverlapsAlphabet(char),
}

/// Bounds of an exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationDomain {
    pub max_pos: Position,
    pub alphabet: Vec<char>,
    pub probe: Document,
    /// How many fresh operations a domain operation may have been
    /// transformed against; 0 means fresh operations only.
    pub depth: usize,
}

impl Default for OperationDomain {
    fn default() -> Self {
        OperationDomain::new(3, "abc", 0).expect("default domain is valid")
    }
}

impl OperationDomain {
    /// Builds a domain with an automatically chosen probe of `max_pos + 3`
    /// distinct symbols outside the alphabet.
    pub fn new(max_pos: Position, alphabet: &str, depth: usize) -> Result<Self, DomainError> {
        if max_pos < 0 {
            return Err(DomainError::NegativeMaxPos(max_pos));
        }
        let alphabet: Vec<char> = alphabet.chars().collect();
        let probe_len = max_pos as usize + 3;
        let probe: Vec<char> = ('A'..=char::MAX)
            .filter(|c| !c.is_whitespace() && !c.is_control() && !alphabet.contains(c))
            .take(probe_len)
            .collect();
        OperationDomain { max_pos, alphabet, probe: Document::new(probe), depth }.validated()
    }

    pub fn with_probe(self, probe: Document) -> Result<Self, DomainError> {
        OperationDomain { probe, ..self }.validated()
    }

    fn validated(self) -> Result<Self, DomainError> {
        if self.max_pos < 0 {
            return Err(DomainError::NegativeMaxPos(self.max_pos));
        }
        if self.alphabet.is_empty() {
            return Err(DomainError::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        if let Some(c) = self.alphabet.iter().find(|c| !seen.insert(**c)) {
            return Err(DomainError::DuplicateSymbol(*c));
        }
        let needed = self.max_pos as usize + 2;
        if self.probe.len() < needed {
            return Err(DomainError::ProbeTooShort { len: self.probe.len(), needed });
        }
        let mut seen = BTreeSet::new();
        for c in self.probe.symbols() {
            if !seen.insert(*c) {
                return Err(DomainError::ProbeNotDistinct(*c));
            }
            if self.alphabet.contains(c) {
                return Err(DomainError::ProbeOverlapsAlphabet(*c));
            }
        }
        Ok(self)
    }

    pub fn alphabet_string(&self) -> String {
        self.alphabet.iter().collect()
    }
}

impl fmt::Display for OperationDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={} alphabet={} probe={} depth={}",
            self.max_pos,
            self.alphabet_string(),
            self.probe,
            self.depth
        )
    }
}

/// Fresh operations: every `Ins(p, c)` and `Del(p)` with `p` in `0..=P`,
/// carrying the family's generation-time extension. Ranked families get a
/// placeholder rank of 0; checks assign real ranks per operand slot.
pub fn fresh_operations(dom: &OperationDomain, family: Family) -> Vec<Operation> {
    let dels = (0..=dom.max_pos).map(Operation::del);
    let inss = (0..=dom.max_pos)
        .flat_map(|p| dom.alphabet.iter().map(move |c| Operation::ins(p, *c)));
    let mut ops: Vec<_> = dels.chain(inss).map(|op| family.fresh(&op, 0)).collect();
    ops.sort();
    ops
}

/// The operation domain of a check: fresh operations plus, when
/// `dom.depth > 0`, every form obtained by transforming a fresh operation
/// along a sequence of at most `depth` fresh operations. Nop results and
/// transformation failures are dropped. Sorted and duplicate-free.
pub fn enumerate_operations<T: Transform + ?Sized>(dom: &OperationDomain, it: &T) -> Vec<Operation> {
    let family = it.family();
    let fresh = fresh_operations(dom, family);
    if dom.depth == 0 {
        return fresh;
    }
    // Against a ranked family, sequence inserts are tried on both sides of
    // the transformed operation's placeholder rank.
    let against: Vec<Operation> = if family.is_ranked() {
        fresh
            .iter()
            .flat_map(|op| match op {
                Operation::Ins { .. } => vec![family.rerank(op, -1), family.rerank(op, 1)],
                _ => vec![op.clone()],
            })
            .collect()
    } else {
        fresh.clone()
    };
    let mut all: BTreeSet<Operation> = fresh.iter().cloned().collect();
    let mut level: BTreeSet<Operation> = all.clone();
    for _ in 0..dom.depth {
        let next: BTreeSet<Operation> = level
            .iter()
            .flat_map(|op| against.iter().filter_map(move |s| it.transform(op, s).ok()))
            .filter(|op| !op.is_nop())
            .collect();
        let before = all.len();
        all.extend(next.iter().cloned());
        if all.len() == before {
            break;
        }
        level = next;
    }
    all.into_iter().collect()
}

/// Result of executing one side of a TP1 instance on the probe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    State(Document),
    /// An insert addressed a position outside `0..=len`.
    OutOfRange { step: usize, op: Operation },
    /// The IT function itself failed.
    NotTransformed(TransformError),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::State(d) => write!(f, "\"{d}\""),
            Outcome::OutOfRange { step, op } => write!(f, "out-of-range {op} at step {step}"),
            Outcome::NotTransformed(e) => write!(f, "transform failed: {e}"),
        }
    }
}

/// Executes a two-operation side of a TP1 instance.
///
/// A delete addressing a position the state does not have removes nothing:
/// its target is already gone. An insert outside `0..=len` has no such
/// reading and makes the side fail.
pub fn execute_side(first: &Operation, second: &Result<Operation, TransformError>, probe: &Document) -> Outcome {
    let second = match second {
        Ok(op) => op,
        Err(e) => return Outcome::NotTransformed(e.clone()),
    };
    let mut symbols = probe.symbols().to_vec();
    for (step, op) in [first, second].into_iter().enumerate() {
        match op {
            Operation::Nop => {}
            Operation::Del { pos } => {
                if let Some(p) = usize::try_from(*pos).ok().filter(|p| *p < symbols.len()) {
                    symbols.remove(p);
                }
            }
            Operation::Ins { pos, ch, .. } => match usize::try_from(*pos).ok().filter(|p| *p <= symbols.len()) {
                Some(p) => symbols.insert(p, *ch),
                None => return Outcome::OutOfRange { step, op: op.clone() },
            },
        }
    }
    Outcome::State(Document::new(symbols))
}

/// A pair violating `[o1; IT(o2,o1)] ≡ [o2; IT(o1,o2)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tp1Witness {
    pub o1: Operation,
    pub o2: Operation,
    /// `IT(o1, o2)`
    pub o12: Result<Operation, TransformError>,
    /// `IT(o2, o1)`
    pub o21: Result<Operation, TransformError>,
    /// `[o1; IT(o2, o1)]` on the probe.
    pub left: Outcome,
    /// `[o2; IT(o1, o2)]` on the probe.
    pub right: Outcome,
}

impl Tp1Witness {
    /// Re-evaluates the pair from scratch.
    pub fn reproduces<T: Transform + ?Sized>(&self, it: &T, probe: &Document) -> bool {
        tp1_instance(it, &self.o1, &self.o2, probe).as_ref() == Some(self)
    }
}

fn is_state(o: &Outcome) -> bool {
    matches!(o, Outcome::State(_))
}

/// The TP1 state-identity test for one ordered pair. `None` when it holds.
pub fn tp1_instance<T: Transform + ?Sized>(
    it: &T,
    o1: &Operation,
    o2: &Operation,
    probe: &Document,
) -> Option<Tp1Witness> {
    let o12 = it.transform(o1, o2);
    let o21 = it.transform(o2, o1);
    let left = execute_side(o1, &o21, probe);
    let right = execute_side(o2, &o12, probe);
    if is_state(&left) && left == right {
        return None;
    }
    Some(Tp1Witness { o1: o1.clone(), o2: o2.clone(), o12, o21, left, right })
}

/// A triple violating `IT*(o3, [o1; IT(o2,o1)]) = IT*(o3, [o2; IT(o1,o2)])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tp2Witness {
    pub o1: Operation,
    pub o2: Operation,
    pub o3: Operation,
    pub o12: Result<Operation, TransformError>,
    pub o21: Result<Operation, TransformError>,
    /// `IT*(o3, [o1; IT(o2, o1)])`
    pub via_first: Result<Operation, TransformError>,
    /// `IT*(o3, [o2; IT(o1, o2)])`
    pub via_second: Result<Operation, TransformError>,
}

impl Tp2Witness {
    pub fn triple(&self) -> (&Operation, &Operation, &Operation) {
        (&self.o1, &self.o2, &self.o3)
    }

    pub fn reproduces<T: Transform + ?Sized>(&self, it: &T) -> bool {
        tp2_instance(it, &self.o1, &self.o2, &self.o3).as_ref() == Some(self)
    }
}

/// The TP2 operation-identity test for one triple. `None` when it holds.
pub fn tp2_instance<T: Transform + ?Sized>(
    it: &T,
    o1: &Operation,
    o2: &Operation,
    o3: &Operation,
) -> Option<Tp2Witness> {
    let o12 = it.transform(o1, o2);
    let o21 = it.transform(o2, o1);
    let along = |first: &Operation, second: &Result<Operation, TransformError>| {
        second.clone().and_then(|s| transform_along(it, o3, [first, &s]))
    };
    let via_first = along(o1, &o21);
    let via_second = along(o2, &o12);
    if via_first.is_ok() && via_first == via_second {
        return None;
    }
    Some(Tp2Witness {
        o1: o1.clone(),
        o2: o2.clone(),
        o3: o3.clone(),
        o12,
        o21,
        via_first,
        via_second,
    })
}

/// Every way of giving the insert operands distinct ranks `1..=k`.
/// Unranked families and delete operands keep their operation as is.
fn ranked_variants(family: Family, ops: &[&Operation]) -> Vec<Vec<Operation>> {
    let base: Vec<Operation> = ops.iter().map(|o| (*o).clone()).collect();
    if !family.is_ranked() {
        return vec![base];
    }
    let slots: Vec<usize> = ops
        .iter()
        .enumerate()
        .filter(|(_, o)| matches!(o, Operation::Ins { .. }))
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::new();
    let mut ranks: Vec<i64> = (1..=slots.len() as i64).collect();
    permutations(&mut ranks, 0, &mut |perm| {
        let mut v = base.clone();
        for (slot, rank) in slots.iter().zip(perm) {
            v[*slot] = family.rerank(&v[*slot], *rank);
        }
        out.push(v);
    });
    out
}

fn permutations(items: &mut Vec<i64>, k: usize, emit: &mut impl FnMut(&[i64])) {
    if k == items.len() {
        emit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, emit);
        items.swap(k, i);
    }
}

#[derive(Clone, Debug)]
pub struct Tp1Report {
    pub function: String,
    pub domain: OperationDomain,
    pub operations: usize,
    pub instances: usize,
    pub witnesses: Vec<Tp1Witness>,
}

impl Tp1Report {
    pub fn holds(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Tp2Report {
    pub function: String,
    pub domain: OperationDomain,
    pub operations: usize,
    pub instances: usize,
    pub witnesses: Vec<Tp2Witness>,
}

impl Tp2Report {
    pub fn holds(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Checks TP1 on every ordered pair of the domain.
pub fn check_tp1<T: Transform + ?Sized>(it: &T, dom: &OperationDomain) -> Tp1Report {
    let ops = enumerate_operations(dom, it);
    let family = it.family();
    let results: Vec<(usize, Vec<Tp1Witness>)> = ops
        .par_iter()
        .map(|o1| {
            let mut count = 0;
            let mut found = Vec::new();
            for o2 in &ops {
                for v in ranked_variants(family, &[o1, o2]) {
                    count += 1;
                    found.extend(tp1_instance(it, &v[0], &v[1], &dom.probe));
                }
            }
            (count, found)
        })
        .collect();
    let instances = results.iter().map(|(n, _)| n).sum();
    let mut witnesses: Vec<_> = results.into_iter().flat_map(|(_, w)| w).collect();
    witnesses.sort_by(|a, b| (&a.o1, &a.o2).cmp(&(&b.o1, &b.o2)));
    Tp1Report { function: it.name(), domain: dom.clone(), operations: ops.len(), instances, witnesses }
}

/// Checks TP2 on every triple of the domain.
pub fn check_tp2<T: Transform + ?Sized>(it: &T, dom: &OperationDomain) -> Tp2Report {
    let ops = enumerate_operations(dom, it);
    let family = it.family();
    let results: Vec<(usize, Vec<Tp2Witness>)> = ops
        .par_iter()
        .map(|o1| {
            let mut count = 0;
            let mut found = Vec::new();
            for o2 in &ops {
                for o3 in &ops {
                    for v in ranked_variants(family, &[o1, o2, o3]) {
                        count += 1;
                        found.extend(tp2_instance(it, &v[0], &v[1], &v[2]));
                    }
                }
            }
            (count, found)
        })
        .collect();
    let instances = results.iter().map(|(n, _)| n).sum();
    let mut witnesses: Vec<_> = results.into_iter().flat_map(|(_, w)| w).collect();
    witnesses.sort_by(|a, b| a.triple().cmp(&b.triple()));
    Tp2Report { function: it.name(), domain: dom.clone(), operations: ops.len(), instances, witnesses }
}
