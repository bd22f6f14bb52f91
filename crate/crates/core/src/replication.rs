//! Causality tracking and the decentralized integration procedure.
//!
//! Replicas are plain values: every state transition consumes a
//! [`SiteReplica`] and returns the next one, so runs can be replayed and
//! forked freely.

use std::fmt;

use thiserror::Error;

use crate::model::{apply, ApplyError, Document, Operation};
use crate::transform::{transform_along, Transform, TransformError};

pub type SiteId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Error)]
pub enum ReplicationError {
    #[error("vector clocks have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("site {site} cannot integrate {op}: clock {clock} does not dominate stamp {stamp}")]
    NotReady { site: SiteId, op: Operation, clock: VectorClock, stamp: VectorClock },
    #[error("site {site} already integrated operation #{seq} of site {origin}")]
    Duplicate { site: SiteId, origin: SiteId, seq: u32 },
    #[error("site {site} is poisoned and cannot generate {op}")]
    Poisoned { site: SiteId, op: Operation },
    #[error("cannot generate at site {site}: {source}")]
    Generate { site: SiteId, source: ApplyError },
}

/// Per-site operation counters.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VectorClock(Vec<u32>);

impl VectorClock {
    pub fn new(sites: usize) -> Self {
        VectorClock(vec![0; sites])
    }

    pub fn from_entries(entries: Vec<u32>) -> Self {
        VectorClock(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, site: SiteId) -> u32 {
        self.0[site]
    }

    pub fn increment(&mut self, site: SiteId) {
        self.0[site] += 1;
    }

    /// `self` dominates `other` iff every entry is at least as large.
    pub fn dominates(&self, other: &VectorClock) -> Result<bool, ReplicationError> {
        dominates(self, other)
    }
}

impl fmt::Display for VectorClock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

pub fn dominates(v1: &VectorClock, v2: &VectorClock) -> Result<bool, ReplicationError> {
    if v1.len() != v2.len() {
        return Err(ReplicationError::LengthMismatch(v1.len(), v2.len()));
    }
    Ok(v1.0.iter().zip(&v2.0).all(|(a, b)| a >= b))
}

/// An operation together with its origin and the origin's clock at
/// generation time (taken before the local increment).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StampedOperation {
    pub op: Operation,
    pub origin: SiteId,
    pub stamp: VectorClock,
}

impl StampedOperation {
    /// `(origin, n)`: this is the `n`-th operation (0-based) generated at
    /// `origin`. Unique within a session.
    pub fn key(&self) -> (SiteId, u32) {
        (self.origin, self.stamp.get(self.origin))
    }

    pub fn same_operation(&self, other: &StampedOperation) -> bool {
        self.key() == other.key()
    }
}

impl fmt::Display for StampedOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}{}", self.op, self.origin, self.stamp)
    }
}

/// `a → b`: `b` was generated after `a` had been executed at `b`'s origin.
pub fn causally_depends(a: &StampedOperation, b: &StampedOperation) -> bool {
    a.stamp.get(a.origin) < b.stamp.get(a.origin)
}

pub fn concurrent(a: &StampedOperation, b: &StampedOperation) -> bool {
    !a.same_operation(b) && !causally_depends(a, b) && !causally_depends(b, a)
}

/// Why a replica stopped executing operations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReplicaFault {
    pub received: StampedOperation,
    pub transformed: Option<Operation>,
    pub error: FaultKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Error)]
pub enum FaultKind {
    #[error(transparent)]
    Apply(#[from] ApplyError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

impl fmt::Display for ReplicaFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "integrating {}", self.received)?;
        if let Some(t) = &self.transformed {
            write!(f, " as {t}")?;
        }
        write!(f, ": {}", self.error)
    }
}

/// One site's copy of the shared document and its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiteReplica {
    pub id: SiteId,
    pub doc: Document,
    pub clock: VectorClock,
    /// Executed operations, in executed (transformed) form.
    pub history: Vec<StampedOperation>,
    /// Received operations not yet causally ready, in arrival order.
    pub pending: Vec<StampedOperation>,
    /// Set once an integration fails; a poisoned replica executes nothing more.
    pub fault: Option<ReplicaFault>,
}

impl SiteReplica {
    pub fn new(id: SiteId, sites: usize, doc: Document) -> Self {
        SiteReplica {
            id,
            doc,
            clock: VectorClock::new(sites),
            history: Vec::new(),
            pending: Vec::new(),
            fault: None,
        }
    }

    pub fn is_poisoned(&self) -> bool {
        self.fault.is_some()
    }

    fn has_integrated(&self, rop: &StampedOperation) -> bool {
        let (origin, seq) = rop.key();
        seq < self.clock.get(origin)
    }

    /// Executes a locally generated operation and returns it stamped for
    /// broadcast.
    pub fn generate_local(
        mut self,
        op: Operation,
    ) -> Result<(SiteReplica, StampedOperation), ReplicationError> {
        if self.is_poisoned() {
            return Err(ReplicationError::Poisoned { site: self.id, op });
        }
        self.doc = apply(&op, &self.doc)
            .map_err(|source| ReplicationError::Generate { site: self.id, source })?;
        let stamped = StampedOperation { op, origin: self.id, stamp: self.clock.clone() };
        self.clock.increment(self.id);
        self.history.push(stamped.clone());
        Ok((self, stamped))
    }

    /// Integrates a causally ready remote operation:
    ///
    /// 1. stable-partitions the history into the operations that happened
    ///    before `rop` followed by those concurrent to it,
    /// 2. transforms `rop` along the concurrent part,
    /// 3. executes the result and appends it to the history.
    ///
    /// A failure in step 2 or 3 poisons the replica instead of returning an
    /// error.
    pub fn integrate_remote<T: Transform + ?Sized>(
        mut self,
        it: &T,
        rop: StampedOperation,
    ) -> Result<SiteReplica, ReplicationError> {
        if self.has_integrated(&rop) {
            let (origin, seq) = rop.key();
            return Err(ReplicationError::Duplicate { site: self.id, origin, seq });
        }
        if !dominates(&self.clock, &rop.stamp)? {
            return Err(ReplicationError::NotReady {
                site: self.id,
                op: rop.op.clone(),
                clock: self.clock.clone(),
                stamp: rop.stamp.clone(),
            });
        }
        if self.is_poisoned() {
            self.pending.push(rop);
            return Ok(self);
        }

        let (mut reordered, concurrent_part): (Vec<_>, Vec<_>) =
            self.history.iter().cloned().partition(|h| causally_depends(h, &rop));
        let split = reordered.len();
        reordered.extend(concurrent_part);

        let transformed = match transform_along(it, &rop.op, reordered[split..].iter().map(|h| &h.op)) {
            Ok(t) => t,
            Err(e) => {
                self.fault = Some(ReplicaFault { received: rop, transformed: None, error: e.into() });
                return Ok(self);
            }
        };
        match apply(&transformed, &self.doc) {
            Ok(doc) => {
                self.doc = doc;
                self.clock.increment(rop.origin);
                reordered.push(StampedOperation { op: transformed, ..rop });
                self.history = reordered;
            }
            Err(e) => {
                self.fault = Some(ReplicaFault {
                    received: rop,
                    transformed: Some(transformed),
                    error: e.into(),
                });
            }
        }
        Ok(self)
    }

    /// Index of the next pending operation to integrate: ready ones only,
    /// lowest origin first, then arrival order.
    fn next_ready(&self) -> Option<usize> {
        self.pending
            .iter()
            .enumerate()
            .filter(|(_, p)| dominates(&self.clock, &p.stamp).unwrap_or(false))
            .min_by_key(|(i, p)| (p.origin, *i))
            .map(|(i, _)| i)
    }

    /// Integrates pending operations until none is ready.
    pub fn pump_pending<T: Transform + ?Sized>(mut self, it: &T) -> SiteReplica {
        while !self.is_poisoned() {
            let Some(i) = self.next_ready() else { break };
            let rop = self.pending.remove(i);
            if self.has_integrated(&rop) {
                continue;
            }
            // readiness was just checked, so only a poisoning can come back
            self = match self.integrate_remote(it, rop) {
                Ok(next) => next,
                Err(_) => unreachable!("ready operation rejected"),
            };
        }
        self
    }

    /// Queues a remote operation and integrates whatever became ready.
    pub fn receive<T: Transform + ?Sized>(mut self, it: &T, rop: StampedOperation) -> SiteReplica {
        if !self.has_integrated(&rop) && !self.pending.iter().any(|p| p.same_operation(&rop)) {
            self.pending.push(rop);
        }
        self.pump_pending(it)
    }
}
