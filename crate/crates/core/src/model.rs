//! The replicated-string data model: documents, primitive operations and
//! their application semantics.
//!
//! Positions are 0-based and signed. A transformed operation may carry a
//! position outside the document (a broken IT function can shift an insert
//! to `-1`); [`apply`] reports that instead of clamping it.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Index into a [`Document`]. Signed so that mis-transformed operations stay
/// representable.
pub type Position = i64;

/// Extra parameters some IT functions attach to insert operations.
///
/// Every field is optional; an IT function that needs one reports
/// [`crate::transform::TransformError::MissingExtension`] when it is absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Extension {
    /// Priority used for tie-breaking by Ellis's function.
    pub priority: Option<i64>,
    /// Issuer site identifier used by Ressel's function.
    pub site: Option<i64>,
    /// `av`: deletions that removed a symbol before the insert position.
    pub deleted_before: Option<BTreeSet<Operation>>,
    /// `ap`: deletions that removed a symbol at or after the insert position.
    pub deleted_after: Option<BTreeSet<Operation>>,
    /// Position the insert had when it was generated (Imine).
    pub initial_pos: Option<Position>,
}

impl Extension {
    pub fn is_empty(&self) -> bool {
        *self == Extension::default()
    }
}

/// A primitive update of the shared string.
///
/// The derived ordering is `(kind, position, char, extension)` with
/// `Del < Ins < Nop`; witness minimality relies on it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operation {
    Del { pos: Position },
    Ins { pos: Position, ch: char, ext: Extension },
    Nop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Del,
    Ins,
    Nop,
}

impl Operation {
    pub fn ins(pos: Position, ch: char) -> Self {
        Operation::Ins { pos, ch, ext: Extension::default() }
    }

    pub fn del(pos: Position) -> Self {
        Operation::Del { pos }
    }

    pub fn kind(&self) -> OpKind {
        match self {
            Operation::Del { .. } => OpKind::Del,
            Operation::Ins { .. } => OpKind::Ins,
            Operation::Nop => OpKind::Nop,
        }
    }

    pub fn is_nop(&self) -> bool {
        matches!(self, Operation::Nop)
    }

    pub fn position(&self) -> Option<Position> {
        match self {
            Operation::Del { pos } | Operation::Ins { pos, .. } => Some(*pos),
            Operation::Nop => None,
        }
    }

    pub fn symbol(&self) -> Option<char> {
        match self {
            Operation::Ins { ch, .. } => Some(*ch),
            _ => None,
        }
    }

    pub fn extension(&self) -> Option<&Extension> {
        match self {
            Operation::Ins { ext, .. } => Some(ext),
            _ => None,
        }
    }

    /// Same operation moved by `delta` positions. Nop is returned unchanged.
    pub fn shifted(&self, delta: Position) -> Self {
        let mut out = self.clone();
        match &mut out {
            Operation::Del { pos } | Operation::Ins { pos, .. } => *pos += delta,
            Operation::Nop => {}
        }
        out
    }

    /// Drops every extension field, leaving the basic signature.
    pub fn basic(&self) -> Self {
        match self {
            Operation::Ins { pos, ch, .. } => Operation::ins(*pos, *ch),
            other => other.clone(),
        }
    }

    /// Applies `f` to the extension of an insert; other kinds are returned as-is.
    pub fn map_ext(mut self, f: impl FnOnce(&mut Extension)) -> Self {
        if let Operation::Ins { ext, .. } = &mut self {
            f(ext);
        }
        self
    }

    pub fn with_priority(self, pr: i64) -> Self {
        self.map_ext(|e| e.priority = Some(pr))
    }

    pub fn with_site(self, site: i64) -> Self {
        self.map_ext(|e| e.site = Some(site))
    }

    pub fn with_initial_pos(self, ip: Position) -> Self {
        self.map_ext(|e| e.initial_pos = Some(ip))
    }

    pub fn with_deletion_sets(
        self,
        before: impl IntoIterator<Item = Operation>,
        after: impl IntoIterator<Item = Operation>,
    ) -> Self {
        let before = before.into_iter().collect();
        let after = after.into_iter().collect();
        self.map_ext(|e| {
            e.deleted_before = Some(before);
            e.deleted_after = Some(after);
        })
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, set: &BTreeSet<Operation>) -> fmt::Result {
    f.write_str("{")?;
    for (i, op) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{op}")?;
    }
    f.write_str("}")
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::Nop => f.write_str("Nop()"),
            Operation::Del { pos } => write!(f, "Del({pos})"),
            Operation::Ins { pos, ch, ext } => {
                write!(f, "Ins({pos},{ch}")?;
                if let Some(pr) = ext.priority {
                    write!(f, ",pr={pr}")?;
                }
                if let Some(u) = ext.site {
                    write!(f, ",u={u}")?;
                }
                if ext.deleted_before.is_some() || ext.deleted_after.is_some() {
                    let empty = BTreeSet::new();
                    f.write_str(",")?;
                    write_set(f, ext.deleted_before.as_ref().unwrap_or(&empty))?;
                    f.write_str(",")?;
                    write_set(f, ext.deleted_after.as_ref().unwrap_or(&empty))?;
                }
                if let Some(ip) = ext.initial_pos {
                    write!(f, ",ip={ip}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// The replicated state: a finite sequence of symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Document(Vec<char>);

impl Document {
    pub fn new(symbols: Vec<char>) -> Self {
        Document(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.0
    }

    pub fn get(&self, pos: Position) -> Option<char> {
        usize::try_from(pos).ok().and_then(|p| self.0.get(p).copied())
    }
}

impl From<&str> for Document {
    fn from(s: &str) -> Self {
        Document(s.chars().collect())
    }
}

impl From<String> for Document {
    fn from(s: String) -> Self {
        Document(s.chars().collect())
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|c| write!(f, "{c}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Error)]
pub enum ApplyError {
    #[error("{op} is out of range for a document of length {len}")]
    OutOfRange { op: Operation, len: usize },
}

/// Failure of [`apply_sequence`]: the offending operation's index and cause.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Error)]
#[error("operation #{index} failed: {source}")]
pub struct SequenceError {
    pub index: usize,
    pub source: ApplyError,
}

/// `Do(op, doc)`. The input document is left untouched.
pub fn apply(op: &Operation, doc: &Document) -> Result<Document, ApplyError> {
    let len = doc.len();
    let out_of_range = || ApplyError::OutOfRange { op: op.clone(), len };
    match op {
        Operation::Nop => Ok(doc.clone()),
        Operation::Ins { pos, ch, .. } => {
            let p = usize::try_from(*pos).ok().filter(|p| *p <= len).ok_or_else(out_of_range)?;
            let mut symbols = Vec::with_capacity(len + 1);
            symbols.extend_from_slice(&doc.0[..p]);
            symbols.push(*ch);
            symbols.extend_from_slice(&doc.0[p..]);
            Ok(Document(symbols))
        }
        Operation::Del { pos } => {
            let p = usize::try_from(*pos).ok().filter(|p| *p < len).ok_or_else(out_of_range)?;
            let mut symbols = doc.0.clone();
            symbols.remove(p);
            Ok(Document(symbols))
        }
    }
}

/// `Do(S, doc)`: left fold of [`apply`].
pub fn apply_sequence<'a>(
    seq: impl IntoIterator<Item = &'a Operation>,
    doc: &Document,
) -> Result<Document, SequenceError> {
    seq.into_iter().enumerate().try_fold(doc.clone(), |d, (index, op)| {
        apply(op, &d).map_err(|source| SequenceError { index, source })
    })
}

/// `S1 ≡ S2` tested on one probe document. A failed application is a value of
/// its own, equal only to the same failure at the same index.
pub fn sequences_equivalent(s1: &[Operation], s2: &[Operation], probe: &Document) -> bool {
    apply_sequence(s1, probe) == apply_sequence(s2, probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(s: &str) -> Document {
        Document::from(s)
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(&Operation::ins(1, 'f'), &doc("efecte")).unwrap(), doc("effecte"));
        assert_eq!(apply(&Operation::del(5), &doc("efecte")).unwrap(), doc("efect"));
        assert_eq!(apply(&Operation::Nop, &doc("abc")).unwrap(), doc("abc"));
        assert_eq!(
            apply(&Operation::del(6), &doc("efecte")),
            Err(ApplyError::OutOfRange { op: Operation::del(6), len: 6 })
        );
    }

    #[test]
    fn insert_at_end_is_legal_but_not_beyond() {
        assert_eq!(apply(&Operation::ins(3, 'x'), &doc("abc")).unwrap(), doc("abcx"));
        assert!(apply(&Operation::ins(4, 'x'), &doc("abc")).is_err());
        assert!(apply(&Operation::ins(-1, 'x'), &doc("abc")).is_err());
        assert!(apply(&Operation::del(-1), &doc("abc")).is_err());
        assert!(apply(&Operation::del(0), &doc("")).is_err());
    }

    #[test]
    fn apply_sequence_examples() {
        let start = doc("efecte");
        assert_eq!(apply_sequence(&[], &start).unwrap(), start);
        let site1 = [Operation::ins(1, 'f'), Operation::del(6)];
        let site2 = [Operation::del(5), Operation::ins(1, 'f')];
        assert_eq!(apply_sequence(&site1, &start).unwrap(), doc("effect"));
        assert_eq!(apply_sequence(&site2, &start).unwrap(), doc("effect"));
    }

    #[test]
    fn apply_sequence_reports_offending_index() {
        let err = apply_sequence(&[Operation::del(0), Operation::del(5)], &doc("abcde")).unwrap_err();
        assert_eq!(err.index, 1);
        assert_eq!(err.source, ApplyError::OutOfRange { op: Operation::del(5), len: 4 });
    }

    #[test]
    fn equivalence_examples() {
        let probe = doc("efecte");
        let site2 = [Operation::del(5), Operation::ins(1, 'f')];
        assert!(sequences_equivalent(&[Operation::ins(1, 'f'), Operation::del(6)], &site2, &probe));
        assert!(!sequences_equivalent(&[Operation::ins(1, 'f'), Operation::del(5)], &site2, &probe));
        assert!(sequences_equivalent(&[], &[], &probe));
        // identical failures compare equal, failures at different steps do not
        assert!(sequences_equivalent(&[Operation::del(9)], &[Operation::del(9)], &probe));
        assert!(!sequences_equivalent(
            &[Operation::Nop, Operation::del(9)],
            &[Operation::del(9)],
            &probe
        ));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Operation::ins(1, 'f').with_priority(1).to_string(), "Ins(1,f,pr=1)");
        assert_eq!(Operation::ins(2, 'c').with_initial_pos(2).to_string(), "Ins(2,c,ip=2)");
        let op = Operation::ins(2, 'f').with_deletion_sets([Operation::del(2)], [Operation::del(2)]);
        assert_eq!(op.to_string(), "Ins(2,f,{Del(2)},{Del(2)})");
        assert_eq!(Operation::Nop.to_string(), "Nop()");
    }

    #[test]
    fn ordering_puts_deletes_first() {
        let mut ops = vec![Operation::ins(0, 'a'), Operation::Nop, Operation::del(3), Operation::del(1)];
        ops.sort();
        assert_eq!(
            ops,
            vec![Operation::del(1), Operation::del(3), Operation::ins(0, 'a'), Operation::Nop]
        );
    }
}
