//! Operational transformation workbench for a replicated string.
//!
//! Operations and documents live in [`model`], the IT functions in
//! [`transform`], site replicas in [`replication`]. [`verify`] checks the
//! convergence properties over bounded domains, [`synth`] searches the
//! space of shift-based IT functions and [`simulator`] replays multi-site
//! scenarios.

pub mod model;
pub mod replication;
pub mod select;
pub mod simulator;
pub mod synth;
pub mod transform;
pub mod verify;

pub use model::{apply, apply_sequence, ApplyError, Document, Extension, OpKind, Operation, Position};
pub use replication::{SiteId, SiteReplica, StampedOperation, VectorClock};
pub use transform::{transform_along, Algorithm, Family, Transform, TransformCase, TransformError};
pub use verify::{check_tp1, check_tp2, OperationDomain, Tp1Report, Tp1Witness, Tp2Report, Tp2Witness};
pub use synth::{coherence_filter, prove_impossibility, synthesize_tp1, CaseConstraintSet, CaseGroup, ITStrategy, ShiftAction};
pub use simulator::{builtin_scenarios, run_all_orders, run_scenario, RunOutcome, Scenario};
pub use select::{select_it, ItChoice};
