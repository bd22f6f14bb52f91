//! Inclusive transformation (IT) functions and their fold along a sequence.
//!
//! The five published functions are closed case tables over
//! `(Ins|Del) x (Ins|Del)`; `Nop` is handled uniformly:
//! `IT(Nop, o) = Nop` and `IT(o, Nop) = o`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{Extension, Operation, Position};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Error)]
pub enum TransformError {
    #[error("{function} needs `{field}` on {op}")]
    MissingExtension { function: &'static str, field: &'static str, op: Operation },
}

/// The extension signature an IT function expects on insert operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Position and character only.
    Basic,
    /// `pr` (Ellis).
    Priority,
    /// Issuer site `u` (Ressel).
    SiteId,
    /// `av`/`ap` deletion sets (Suleiman).
    DeletionSets,
    /// Initial insertion position `ip` (Imine).
    InitialPosition,
}

impl Family {
    /// Whether concurrent inserts must carry distinct, ordered tie-break values.
    pub fn is_ranked(self) -> bool {
        matches!(self, Family::Priority | Family::SiteId)
    }

    /// Stamps the generation-time extension onto `op`. `rank` is the
    /// priority or site id and is ignored by unranked families.
    pub fn fresh(self, op: &Operation, rank: i64) -> Operation {
        let op = op.basic();
        match self {
            Family::Basic => op,
            Family::Priority => op.with_priority(rank),
            Family::SiteId => op.with_site(rank),
            Family::DeletionSets => op.with_deletion_sets([], []),
            Family::InitialPosition => match op.position() {
                Some(p) => op.with_initial_pos(p),
                None => op,
            },
        }
    }

    /// Overwrites the tie-break value of a ranked family, keeping every other
    /// field. Unranked families return `op` unchanged.
    pub fn rerank(self, op: &Operation, rank: i64) -> Operation {
        match self {
            Family::Priority => op.clone().with_priority(rank),
            Family::SiteId => op.clone().with_site(rank),
            _ => op.clone(),
        }
    }
}

/// An IT function: `transform(o1, o2)` is the form of `o1` that accounts for
/// `o2` having been executed first.
pub trait Transform: Send + Sync {
    fn name(&self) -> String;

    fn family(&self) -> Family;

    fn transform(&self, o1: &Operation, o2: &Operation) -> Result<Operation, TransformError>;
}

impl<T: Transform + ?Sized> Transform for &T {
    fn name(&self) -> String {
        (**self).name()
    }
    fn family(&self) -> Family {
        (**self).family()
    }
    fn transform(&self, o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
        (**self).transform(o1, o2)
    }
}

impl<T: Transform + ?Sized> Transform for Box<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn family(&self) -> Family {
        (**self).family()
    }
    fn transform(&self, o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
        (**self).transform(o1, o2)
    }
}

/// `IT*(o, seq)`: left fold of `it` over `seq`.
pub fn transform_along<'a, T: Transform + ?Sized>(
    it: &T,
    op: &Operation,
    seq: impl IntoIterator<Item = &'a Operation>,
) -> Result<Operation, TransformError> {
    seq.into_iter().try_fold(op.clone(), |acc, other| it.transform(&acc, other))
}

/// Which row of a transformation table a non-Nop pair falls into.
///
/// `Before`/`After`/`Same` compare `p1` with `p2`; the three `InsInsSame*`
/// variants additionally compare `c1` with `c2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransformCase {
    InsInsBefore,
    InsInsAfter,
    InsInsSameLess,
    InsInsSameGreater,
    InsInsSameEqual,
    InsDelBefore,
    InsDelAfter,
    InsDelSame,
    DelInsBefore,
    DelInsAfter,
    DelInsSame,
    DelDelBefore,
    DelDelAfter,
    DelDelSame,
}

impl TransformCase {
    pub const ALL: [TransformCase; 14] = [
        TransformCase::InsInsBefore,
        TransformCase::InsInsAfter,
        TransformCase::InsInsSameLess,
        TransformCase::InsInsSameGreater,
        TransformCase::InsInsSameEqual,
        TransformCase::InsDelBefore,
        TransformCase::InsDelAfter,
        TransformCase::InsDelSame,
        TransformCase::DelInsBefore,
        TransformCase::DelInsAfter,
        TransformCase::DelInsSame,
        TransformCase::DelDelBefore,
        TransformCase::DelDelAfter,
        TransformCase::DelDelSame,
    ];

    /// `None` when either operation is `Nop`.
    pub fn classify(o1: &Operation, o2: &Operation) -> Option<TransformCase> {
        use Operation::{Del, Ins};
        use TransformCase::*;
        let by_pos = |p1: &Position, p2: &Position, before, after, same| match p1.cmp(p2) {
            Ordering::Less => before,
            Ordering::Greater => after,
            Ordering::Equal => same,
        };
        Some(match (o1, o2) {
            (Ins { pos: p1, ch: c1, .. }, Ins { pos: p2, ch: c2, .. }) => match p1.cmp(p2) {
                Ordering::Less => InsInsBefore,
                Ordering::Greater => InsInsAfter,
                Ordering::Equal => match c1.cmp(c2) {
                    Ordering::Less => InsInsSameLess,
                    Ordering::Greater => InsInsSameGreater,
                    Ordering::Equal => InsInsSameEqual,
                },
            },
            (Ins { pos: p1, .. }, Del { pos: p2 }) => by_pos(p1, p2, InsDelBefore, InsDelAfter, InsDelSame),
            (Del { pos: p1 }, Ins { pos: p2, .. }) => by_pos(p1, p2, DelInsBefore, DelInsAfter, DelInsSame),
            (Del { pos: p1 }, Del { pos: p2 }) => by_pos(p1, p2, DelDelBefore, DelDelAfter, DelDelSame),
            _ => return None,
        })
    }

    /// The case `IT(o2, o1)` lands in when `IT(o1, o2)` lands in `self`.
    pub fn mirror(self) -> TransformCase {
        use TransformCase::*;
        match self {
            InsInsBefore => InsInsAfter,
            InsInsAfter => InsInsBefore,
            InsInsSameLess => InsInsSameGreater,
            InsInsSameGreater => InsInsSameLess,
            InsInsSameEqual => InsInsSameEqual,
            InsDelBefore => DelInsAfter,
            InsDelAfter => DelInsBefore,
            InsDelSame => DelInsSame,
            DelInsBefore => InsDelAfter,
            DelInsAfter => InsDelBefore,
            DelInsSame => InsDelSame,
            DelDelBefore => DelDelAfter,
            DelDelAfter => DelDelBefore,
            DelDelSame => DelDelSame,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        use TransformCase::*;
        match self {
            InsInsBefore => "ins/ins p1<p2",
            InsInsAfter => "ins/ins p1>p2",
            InsInsSameLess => "ins/ins p1=p2 c1<c2",
            InsInsSameGreater => "ins/ins p1=p2 c1>c2",
            InsInsSameEqual => "ins/ins p1=p2 c1=c2",
            InsDelBefore => "ins/del p1<p2",
            InsDelAfter => "ins/del p1>p2",
            InsDelSame => "ins/del p1=p2",
            DelInsBefore => "del/ins p1<p2",
            DelInsAfter => "del/ins p1>p2",
            DelInsSame => "del/ins p1=p2",
            DelDelBefore => "del/del p1<p2",
            DelDelAfter => "del/del p1>p2",
            DelDelSame => "del/del p1=p2",
        }
    }
}

impl fmt::Display for TransformCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The cataloged IT functions, plus the identity (no transformation).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Ellis,
    Ressel,
    Sun,
    Suleiman,
    Imine,
    /// Returns its first argument unchanged; models integration without
    /// transformation.
    Identity,
}

impl Algorithm {
    pub const PUBLISHED: [Algorithm; 5] =
        [Algorithm::Ellis, Algorithm::Ressel, Algorithm::Sun, Algorithm::Suleiman, Algorithm::Imine];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Ellis => "ellis",
            Algorithm::Ressel => "ressel",
            Algorithm::Sun => "sun",
            Algorithm::Suleiman => "suleiman",
            Algorithm::Imine => "imine",
            Algorithm::Identity => "identity",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown IT function `{0}`")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ellis" => Algorithm::Ellis,
            "ressel" => Algorithm::Ressel,
            "sun" => Algorithm::Sun,
            "suleiman" => Algorithm::Suleiman,
            "imine" => Algorithm::Imine,
            "identity" => Algorithm::Identity,
            other => return Err(UnknownAlgorithm(other.to_string())),
        })
    }
}

impl Transform for Algorithm {
    fn name(&self) -> String {
        self.as_str().to_string()
    }

    fn family(&self) -> Family {
        match self {
            Algorithm::Ellis => Family::Priority,
            Algorithm::Ressel => Family::SiteId,
            Algorithm::Suleiman => Family::DeletionSets,
            Algorithm::Imine => Family::InitialPosition,
            Algorithm::Sun | Algorithm::Identity => Family::Basic,
        }
    }

    fn transform(&self, o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
        match (o1, o2) {
            (Operation::Nop, _) => return Ok(Operation::Nop),
            (_, Operation::Nop) => return Ok(o1.clone()),
            _ => {}
        }
        match self {
            Algorithm::Ellis => ellis_it(o1, o2),
            Algorithm::Ressel => ressel_it(o1, o2),
            Algorithm::Sun => Ok(sun_it(o1, o2)),
            Algorithm::Suleiman => suleiman_it(o1, o2),
            Algorithm::Imine => imine_it(o1, o2),
            Algorithm::Identity => Ok(o1.clone()),
        }
    }
}

fn field<T: Copy>(
    function: &'static str,
    field: &'static str,
    op: &Operation,
    get: impl Fn(&Extension) -> Option<T>,
) -> Result<T, TransformError> {
    op.extension().and_then(get).ok_or_else(|| TransformError::MissingExtension {
        function,
        field,
        op: op.clone(),
    })
}

fn sets<'a>(
    function: &'static str,
    op: &'a Operation,
) -> Result<(&'a BTreeSet<Operation>, &'a BTreeSet<Operation>), TransformError> {
    let missing = |field| TransformError::MissingExtension { function, field, op: op.clone() };
    let ext = op.extension().ok_or_else(|| missing("av"))?;
    let av = ext.deleted_before.as_ref().ok_or_else(|| missing("av"))?;
    let ap = ext.deleted_after.as_ref().ok_or_else(|| missing("ap"))?;
    Ok((av, ap))
}

// Rows shared verbatim by all five tables.

fn del_ins(p1: Position, p2: Position, o1: &Operation) -> Operation {
    if p1 < p2 {
        o1.clone()
    } else {
        o1.shifted(1)
    }
}

fn del_del(p1: Position, p2: Position, o1: &Operation) -> Operation {
    match p1.cmp(&p2) {
        Ordering::Less => o1.clone(),
        Ordering::Greater => o1.shifted(-1),
        Ordering::Equal => Operation::Nop,
    }
}

/// Ins/Del row of every table except Ellis's: an insert at the deleted
/// position stays put.
fn ins_del_inclusive(p1: Position, p2: Position, o1: &Operation) -> Operation {
    if p1 <= p2 {
        o1.clone()
    } else {
        o1.shifted(-1)
    }
}

pub fn ellis_it(o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
    use Operation::*;
    const NAME: &str = "ellis";
    let pr = |op| field(NAME, "pr", op, |e| e.priority);
    Ok(match (o1, o2) {
        (Nop, _) => Nop,
        (_, Nop) => o1.clone(),
        (Ins { pos: p1, ch: c1, .. }, Ins { pos: p2, ch: c2, .. }) => {
            let (pr1, pr2) = (pr(o1)?, pr(o2)?);
            if p1 < p2 || (p1 == p2 && c1 != c2 && pr1 < pr2) {
                o1.clone()
            } else if p1 > p2 || (p1 == p2 && c1 != c2 && pr1 > pr2) {
                o1.shifted(1)
            } else {
                Nop
            }
        }
        (Ins { pos: p1, .. }, Del { pos: p2 }) => {
            pr(o1)?;
            if p1 < p2 {
                o1.clone()
            } else {
                o1.shifted(-1)
            }
        }
        (Del { pos: p1 }, Ins { pos: p2, .. }) => {
            pr(o2)?;
            del_ins(*p1, *p2, o1)
        }
        (Del { pos: p1 }, Del { pos: p2 }) => del_del(*p1, *p2, o1),
    })
}

pub fn ressel_it(o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
    use Operation::*;
    const NAME: &str = "ressel";
    let site = |op| field(NAME, "u", op, |e| e.site);
    Ok(match (o1, o2) {
        (Nop, _) => Nop,
        (_, Nop) => o1.clone(),
        (Ins { pos: p1, .. }, Ins { pos: p2, .. }) => {
            let (u1, u2) = (site(o1)?, site(o2)?);
            if p1 < p2 || (p1 == p2 && u1 < u2) {
                o1.clone()
            } else {
                o1.shifted(1)
            }
        }
        (Ins { pos: p1, .. }, Del { pos: p2 }) => {
            site(o1)?;
            ins_del_inclusive(*p1, *p2, o1)
        }
        (Del { pos: p1 }, Ins { pos: p2, .. }) => {
            site(o2)?;
            del_ins(*p1, *p2, o1)
        }
        (Del { pos: p1 }, Del { pos: p2 }) => del_del(*p1, *p2, o1),
    })
}

/// Sun's characterwise function (string length fixed to one).
pub fn sun_it(o1: &Operation, o2: &Operation) -> Operation {
    use Operation::*;
    match (o1, o2) {
        (Nop, _) => Nop,
        (_, Nop) => o1.clone(),
        (Ins { pos: p1, .. }, Ins { pos: p2, .. }) => {
            if p1 < p2 {
                o1.clone()
            } else {
                o1.shifted(1)
            }
        }
        (Ins { pos: p1, .. }, Del { pos: p2 }) => ins_del_inclusive(*p1, *p2, o1),
        (Del { pos: p1 }, Ins { pos: p2, .. }) => del_ins(*p1, *p2, o1),
        (Del { pos: p1 }, Del { pos: p2 }) => del_del(*p1, *p2, o1),
    }
}

/// Suleiman's function. On an equal-position insert conflict the deletion
/// sets are consulted in the order `av1 ∩ ap2` (o1 goes after), then
/// `ap1 ∩ av2` (o1 stays), then the characters.
pub fn suleiman_it(o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
    use Operation::*;
    const NAME: &str = "suleiman";
    Ok(match (o1, o2) {
        (Nop, _) => Nop,
        (_, Nop) => o1.clone(),
        (Ins { pos: p1, ch: c1, .. }, Ins { pos: p2, ch: c2, .. }) => {
            let (av1, ap1) = sets(NAME, o1)?;
            let (av2, ap2) = sets(NAME, o2)?;
            match p1.cmp(p2) {
                Ordering::Less => o1.clone(),
                Ordering::Greater => o1.shifted(1),
                Ordering::Equal => {
                    if !av1.is_disjoint(ap2) {
                        o1.shifted(1)
                    } else if !ap1.is_disjoint(av2) {
                        o1.clone()
                    } else {
                        match c1.cmp(c2) {
                            Ordering::Greater => o1.clone(),
                            Ordering::Less => o1.shifted(1),
                            Ordering::Equal => Nop,
                        }
                    }
                }
            }
        }
        (Ins { pos: p1, .. }, Del { pos: p2 }) => {
            sets(NAME, o1)?;
            let deletion = o2.clone();
            if p1 <= p2 {
                o1.clone().map_ext(|e| {
                    e.deleted_after.get_or_insert_with(BTreeSet::new).insert(deletion);
                })
            } else {
                o1.shifted(-1).map_ext(|e| {
                    e.deleted_before.get_or_insert_with(BTreeSet::new).insert(deletion);
                })
            }
        }
        (Del { pos: p1 }, Ins { pos: p2, .. }) => {
            sets(NAME, o2)?;
            del_ins(*p1, *p2, o1)
        }
        (Del { pos: p1 }, Del { pos: p2 }) => del_del(*p1, *p2, o1),
    })
}

pub fn imine_it(o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
    use Operation::*;
    const NAME: &str = "imine";
    let ip = |op| field(NAME, "ip", op, |e| e.initial_pos);
    Ok(match (o1, o2) {
        (Nop, _) => Nop,
        (_, Nop) => o1.clone(),
        (Ins { pos: p1, ch: c1, .. }, Ins { pos: p2, ch: c2, .. }) => {
            let (ip1, ip2) = (ip(o1)?, ip(o2)?);
            if p1 < p2 || (p1 == p2 && ip1 < ip2) || (p1 == p2 && ip1 == ip2 && c1 < c2) {
                o1.clone()
            } else if p1 > p2 || (p1 == p2 && ip1 > ip2) || (p1 == p2 && ip1 == ip2 && c1 > c2) {
                o1.shifted(1)
            } else {
                Nop
            }
        }
        (Ins { pos: p1, .. }, Del { pos: p2 }) => {
            ip(o1)?;
            ins_del_inclusive(*p1, *p2, o1)
        }
        (Del { pos: p1 }, Ins { pos: p2, .. }) => {
            ip(o2)?;
            del_ins(*p1, *p2, o1)
        }
        (Del { pos: p1 }, Del { pos: p2 }) => del_del(*p1, *p2, o1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(p: Position, c: char) -> Operation {
        Operation::ins(p, c)
    }
    fn del(p: Position) -> Operation {
        Operation::del(p)
    }
    fn sets_of(before: &[Operation], after: &[Operation]) -> impl Fn(Operation) -> Operation {
        let (b, a) = (before.to_vec(), after.to_vec());
        move |op| op.with_deletion_sets(b.clone(), a.clone())
    }

    #[test]
    fn ellis_examples() {
        let it = Algorithm::Ellis;
        let o1 = ins(1, 'f').with_priority(1);
        assert_eq!(it.transform(&del(1), &o1).unwrap(), del(2));
        assert_eq!(it.transform(&o1, &del(1)).unwrap(), ins(0, 'f').with_priority(1));
        let o = ins(2, 'a').with_priority(3);
        assert_eq!(it.transform(&o, &Operation::Nop).unwrap(), o);
    }

    #[test]
    fn ellis_ties() {
        let a = ins(1, 'a').with_priority(1);
        let b = ins(1, 'b').with_priority(2);
        assert_eq!(ellis_it(&a, &b).unwrap(), a);
        assert_eq!(ellis_it(&b, &a).unwrap(), ins(2, 'b').with_priority(2));
        let a2 = ins(1, 'a').with_priority(2);
        assert_eq!(ellis_it(&a, &a2).unwrap(), Operation::Nop);
        assert_eq!(ellis_it(&a2, &a).unwrap(), Operation::Nop);
    }

    #[test]
    fn ellis_requires_priority() {
        let err = ellis_it(&ins(1, 'a'), &del(0)).unwrap_err();
        assert!(matches!(err, TransformError::MissingExtension { field: "pr", .. }));
        assert!(ellis_it(&del(0), &ins(1, 'a')).is_err());
        assert_eq!(ellis_it(&del(0), &del(0)).unwrap(), Operation::Nop);
    }

    #[test]
    fn ressel_examples() {
        let it = Algorithm::Ressel;
        let o2 = ins(2, 'c').with_site(2);
        let o3 = ins(1, 'e').with_site(3);
        let o21 = it.transform(&o2, &del(1)).unwrap();
        let o12 = it.transform(&del(1), &o2).unwrap();
        assert_eq!(o21, ins(1, 'c').with_site(2));
        assert_eq!(o12, del(1));
        let via_first = transform_along(&it, &o3, &[del(1), o21]).unwrap();
        let via_second = transform_along(&it, &o3, &[o2, o12]).unwrap();
        assert_eq!(via_first, ins(2, 'e').with_site(3));
        assert_eq!(via_second, ins(1, 'e').with_site(3));
    }

    #[test]
    fn ressel_keeps_both_equal_inserts() {
        let a = ins(1, 'x').with_site(1);
        let b = ins(1, 'x').with_site(2);
        assert_eq!(ressel_it(&a, &b).unwrap(), a);
        assert_eq!(ressel_it(&b, &a).unwrap(), ins(2, 'x').with_site(2));
        // Ins/Del boundary is inclusive, unlike Ellis
        assert_eq!(ressel_it(&a, &del(1)).unwrap(), a);
    }

    #[test]
    fn sun_examples() {
        assert_eq!(sun_it(&del(5), &ins(1, 'f')), del(6));
        assert_eq!(sun_it(&ins(1, 'e'), &ins(1, 'f')), ins(2, 'e'));
        assert_eq!(sun_it(&ins(1, 'f'), &ins(1, 'e')), ins(2, 'f'));
        assert_eq!(sun_it(&ins(1, 'f'), &del(5)), ins(1, 'f'));
    }

    #[test]
    fn suleiman_examples() {
        let it = Algorithm::Suleiman;
        let fresh = sets_of(&[], &[]);
        let s3 = [del(2), fresh(ins(2, 'e')), del(2)];
        let o1p = transform_along(&it, &fresh(ins(3, 'f')), &s3).unwrap();
        let o2p = transform_along(&it, &fresh(ins(2, 'c')), &s3).unwrap();
        // av/ap elements compare structurally, so {o3} and {o5} are both {Del(2)}
        let both = sets_of(&[del(2)], &[del(2)]);
        assert_eq!(o1p, both(ins(2, 'f')));
        assert_eq!(o2p, both(ins(2, 'c')));
        assert_eq!(it.transform(&o2p, &o1p).unwrap(), both(ins(3, 'c')));
        assert_eq!(it.transform(&o1p, &o2p).unwrap(), both(ins(3, 'f')));
    }

    #[test]
    fn suleiman_set_enrichment() {
        let fresh = sets_of(&[], &[]);
        let kept = suleiman_it(&fresh(ins(1, 'a')), &del(1)).unwrap();
        assert_eq!(kept, sets_of(&[], &[del(1)])(ins(1, 'a')));
        let moved = suleiman_it(&fresh(ins(2, 'a')), &del(1)).unwrap();
        assert_eq!(moved, sets_of(&[del(1)], &[])(ins(1, 'a')));
    }

    #[test]
    fn suleiman_character_tiebreak() {
        let fresh = sets_of(&[], &[]);
        let (x, y) = (fresh(ins(1, 'x')), fresh(ins(1, 'y')));
        assert_eq!(suleiman_it(&y, &x).unwrap(), y);
        assert_eq!(suleiman_it(&x, &y).unwrap(), x.shifted(1));
        assert_eq!(suleiman_it(&x, &x).unwrap(), Operation::Nop);
        assert!(suleiman_it(&ins(1, 'x'), &x).is_err());
    }

    #[test]
    fn imine_examples() {
        let it = Algorithm::Imine;
        let o2 = ins(2, 'c').with_initial_pos(2);
        let o3 = ins(2, 'e').with_initial_pos(2);
        assert_eq!(it.transform(&o2, &del(1)).unwrap(), ins(1, 'c').with_initial_pos(2));
        let a = transform_along(&it, &o3, &[del(1), del(1), ins(1, 'c').with_initial_pos(2)]).unwrap();
        assert_eq!(a, ins(2, 'e').with_initial_pos(2));
        let b = transform_along(&it, &o3, &[del(1), o2.clone(), del(1)]).unwrap();
        assert_eq!(b, ins(1, 'e').with_initial_pos(2));
    }

    #[test]
    fn imine_ties_by_initial_position_then_char() {
        let a = ins(1, 'z').with_initial_pos(0);
        let b = ins(1, 'a').with_initial_pos(3);
        assert_eq!(imine_it(&a, &b).unwrap(), a);
        assert_eq!(imine_it(&b, &a).unwrap(), b.shifted(1));
        let c = ins(1, 'a').with_initial_pos(0);
        assert_eq!(imine_it(&c, &a).unwrap(), c);
        assert_eq!(imine_it(&a, &c).unwrap(), a.shifted(1));
        assert_eq!(imine_it(&a, &a).unwrap(), Operation::Nop);
    }

    #[test]
    fn transform_along_examples() {
        let o = ins(3, 'x');
        for alg in Algorithm::PUBLISHED {
            let fresh = alg.family().fresh(&o, 1);
            assert_eq!(transform_along(&alg, &fresh, &[]).unwrap(), fresh);
        }
        let fresh = sets_of(&[], &[]);
        let s3 = [del(2), fresh(ins(2, 'e')), del(2)];
        let out = transform_along(&Algorithm::Suleiman, &fresh(ins(2, 'c')), &s3).unwrap();
        assert_eq!(out, sets_of(&[del(2)], &[del(2)])(ins(2, 'c')));
        // Hand trace: Ins(3,x) vs Ins(0,a) -> Ins(4,x); vs Ins(0,b) -> Ins(5,x).
        let hand = sun_it(&sun_it(&o, &ins(0, 'a')), &ins(0, 'b'));
        assert_eq!(hand, ins(5, 'x'));
        assert_eq!(transform_along(&Algorithm::Sun, &o, &[ins(0, 'a'), ins(0, 'b')]).unwrap(), hand);
    }

    #[test]
    fn classify_and_mirror() {
        assert_eq!(TransformCase::classify(&ins(1, 'a'), &ins(1, 'b')), Some(TransformCase::InsInsSameLess));
        assert_eq!(TransformCase::classify(&del(1), &ins(1, 'b')), Some(TransformCase::DelInsSame));
        assert_eq!(TransformCase::classify(&Operation::Nop, &ins(1, 'b')), None);
        for a in [ins(0, 'a'), ins(1, 'b'), ins(1, 'a'), del(0), del(1), del(2)] {
            for b in [ins(0, 'a'), ins(1, 'b'), ins(1, 'a'), del(0), del(1), del(2)] {
                let ab = TransformCase::classify(&a, &b).unwrap();
                let ba = TransformCase::classify(&b, &a).unwrap();
                assert_eq!(ab.mirror(), ba);
            }
        }
        for (i, case) in TransformCase::ALL.iter().enumerate() {
            assert_eq!(case.index(), i);
            assert_eq!(case.mirror().mirror(), *case);
        }
    }

    #[test]
    fn algorithm_names_round_trip() {
        for alg in Algorithm::PUBLISHED.into_iter().chain([Algorithm::Identity]) {
            assert_eq!(alg.as_str().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("goto".parse::<Algorithm>().is_err());
    }
}
