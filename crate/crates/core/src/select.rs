//! Picking an IT function by name.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::synth::{coherence_filter, synthesize_tp1, ITStrategy};
use crate::model::Operation;
use crate::transform::{Algorithm, Family, Transform, TransformError};
use crate::verify::OperationDomain;

/// `ellis`, `ressel`, `sun`, `suleiman`, `imine`, `identity`, or
/// `synth:<index>` for one of the coherent strategies found on the default
/// domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ItChoice {
    Catalog(Algorithm),
    Synthesized(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("unknown IT function `{0}` (expected ellis, ressel, sun, suleiman, imine, identity or synth:<index>)")]
    Unknown(String),
    #[error("synth:{index} out of range, {count} coherent strategies exist")]
    OutOfRange { index: usize, count: usize },
}

impl FromStr for ItChoice {
    type Err = SelectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("synth:") {
            return rest.parse().map(ItChoice::Synthesized).map_err(|_| SelectError::Unknown(s.to_string()));
        }
        s.parse().map(ItChoice::Catalog).map_err(|_| SelectError::Unknown(s.to_string()))
    }
}

impl fmt::Display for ItChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ItChoice::Catalog(a) => write!(f, "{a}"),
            ItChoice::Synthesized(i) => write!(f, "synth:{i}"),
        }
    }
}

/// The coherent strategies in `synth:<index>` order.
pub fn coherent_strategies() -> Vec<ITStrategy> {
    coherence_filter(&synthesize_tp1(&OperationDomain::default()))
}

struct Named<T> {
    name: String,
    inner: T,
}

impl<T: Transform> Transform for Named<T> {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn family(&self) -> Family {
        self.inner.family()
    }
    fn transform(&self, o1: &Operation, o2: &Operation) -> Result<Operation, TransformError> {
        self.inner.transform(o1, o2)
    }
}

impl ItChoice {
    pub fn build(&self) -> Result<Box<dyn Transform>, SelectError> {
        match self {
            ItChoice::Catalog(a) => Ok(Box::new(*a)),
            ItChoice::Synthesized(index) => {
                let all = coherent_strategies();
                let count = all.len();
                let inner = *all.get(*index).ok_or(SelectError::OutOfRange { index: *index, count })?;
                Ok(Box::new(Named { name: self.to_string(), inner }))
            }
        }
    }
}

/// Parses and builds in one step.
pub fn select_it(name: &str) -> Result<Box<dyn Transform>, SelectError> {
    name.parse::<ItChoice>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("sun".parse(), Ok(ItChoice::Catalog(Algorithm::Sun)));
        assert_eq!("synth:4".parse(), Ok(ItChoice::Synthesized(4)));
        assert!("synth:x".parse::<ItChoice>().is_err());
        assert!("sunn".parse::<ItChoice>().is_err());
        assert_eq!(select_it("synth:2").unwrap().name(), "synth:2");
        assert_eq!(select_it("synth:6").err(), Some(SelectError::OutOfRange { index: 6, count: 6 }));
    }
}
