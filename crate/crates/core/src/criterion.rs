//! Criteria and the problem instance they are evaluated against.
//!
//! A criterion is a boolean predicate over a set of segments, at most one per
//! sequence. Two oracle shapes exist: [`PointwiseOracle`] decides state by
//! state (a segment holds iff each of its states holds), while
//! [`SegmentOracle`] sees the whole segment set at once.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SegmentRef, StateSequence};

/// Structural properties the solvers may rely on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CriterionFlags {
    pub monotone_decreasing: bool,
    pub independent: bool,
    pub fixed: bool,
}

impl CriterionFlags {
    pub const FIXED: CriterionFlags = CriterionFlags {
        monotone_decreasing: true,
        independent: true,
        fixed: true,
    };
    pub const MONOTONE_INDEPENDENT: CriterionFlags = CriterionFlags {
        monotone_decreasing: true,
        independent: true,
        fixed: false,
    };
    pub const MONOTONE_DEPENDENT: CriterionFlags = CriterionFlags {
        monotone_decreasing: true,
        independent: false,
        fixed: false,
    };
    pub const INDEPENDENT: CriterionFlags = CriterionFlags {
        monotone_decreasing: false,
        independent: true,
        fixed: false,
    };
    pub const GENERAL: CriterionFlags = CriterionFlags {
        monotone_decreasing: false,
        independent: false,
        fixed: false,
    };

    pub fn is_monotone_independent(&self) -> bool {
        self.monotone_decreasing && self.independent
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionDescriptor {
    pub id: String,
    pub name: String,
    pub flags: CriterionFlags,
}

impl CriterionDescriptor {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        flags: CriterionFlags,
    ) -> Result<Self> {
        let d = CriterionDescriptor {
            id: id.into(),
            name: name.into(),
            flags,
        };
        if flags.fixed && !(flags.monotone_decreasing && flags.independent) {
            return Err(Error::InvalidParameter(format!(
                "criterion `{}` is fixed but not monotone decreasing and independent",
                d.id
            )));
        }
        Ok(d)
    }
}

/// Decides one state at a time, given its whole sequence for context.
pub trait PointwiseOracle: Send + Sync {
    fn holds_at(&self, seq: &StateSequence, pos: usize) -> bool;
}

/// Decides a whole set of non-empty segments jointly.
pub trait SegmentOracle: Send + Sync {
    fn holds(&self, sequences: &[StateSequence], segments: &[SegmentRef]) -> bool;
}

impl<F> PointwiseOracle for F
where
    F: Fn(&StateSequence, usize) -> bool + Send + Sync,
{
    fn holds_at(&self, seq: &StateSequence, pos: usize) -> bool {
        self(seq, pos)
    }
}

/// Adapts a closure to [`SegmentOracle`].
pub struct SegmentFn<F>(pub F);

impl<F> SegmentOracle for SegmentFn<F>
where
    F: Fn(&[StateSequence], &[SegmentRef]) -> bool + Send + Sync,
{
    fn holds(&self, sequences: &[StateSequence], segments: &[SegmentRef]) -> bool {
        (self.0)(sequences, segments)
    }
}

#[derive(Clone)]
pub enum Oracle {
    Pointwise(Arc<dyn PointwiseOracle>),
    Segment(Arc<dyn SegmentOracle>),
}

#[derive(Clone)]
pub struct Criterion {
    pub descriptor: CriterionDescriptor,
    oracle: Oracle,
}

impl fmt::Debug for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.oracle {
            Oracle::Pointwise(_) => "pointwise",
            Oracle::Segment(_) => "segment",
        };
        f.debug_struct("Criterion")
            .field("descriptor", &self.descriptor)
            .field("oracle", &kind)
            .finish()
    }
}

impl Criterion {
    /// A pointwise criterion is always fixed (and therefore monotone
    /// decreasing and independent).
    pub fn pointwise(
        id: impl Into<String>,
        name: impl Into<String>,
        oracle: impl PointwiseOracle + 'static,
    ) -> Self {
        let id = id.into();
        Criterion {
            descriptor: CriterionDescriptor {
                id,
                name: name.into(),
                flags: CriterionFlags::FIXED,
            },
            oracle: Oracle::Pointwise(Arc::new(oracle)),
        }
    }

    pub fn segment(descriptor: CriterionDescriptor, oracle: impl SegmentOracle + 'static) -> Self {
        Criterion {
            descriptor,
            oracle: Oracle::Segment(Arc::new(oracle)),
        }
    }

    pub fn id(&self) -> &str {
        &self.descriptor.id
    }

    pub fn name(&self) -> &str {
        &self.descriptor.name
    }

    pub fn flags(&self) -> CriterionFlags {
        self.descriptor.flags
    }

    pub fn is_pointwise(&self) -> bool {
        matches!(self.oracle, Oracle::Pointwise(_))
    }

    /// Checked evaluation: the segment set must be non-empty, every segment
    /// non-empty and in range, and no sequence may appear twice.
    pub fn evaluate(&self, sequences: &[StateSequence], segments: &[SegmentRef]) -> Result<bool> {
        if segments.is_empty() {
            return Err(Error::EmptySegmentSet);
        }
        let mut seen = HashSet::with_capacity(segments.len());
        for s in segments {
            let len = sequences
                .get(s.seq)
                .map(StateSequence::len)
                .ok_or_else(|| {
                    Error::Precondition(format!("segment refers to unknown sequence {}", s.seq))
                })?;
            if s.start >= s.end || s.end > len {
                return Err(Error::InvalidSegment {
                    seq: s.seq,
                    start: s.start,
                    end: s.end,
                    len,
                });
            }
            if !seen.insert(s.seq) {
                return Err(Error::Precondition(format!(
                    "two segments on sequence {}",
                    s.seq
                )));
            }
        }
        Ok(self.fulfils(sequences, segments))
    }

    /// Unchecked evaluation used on solver hot paths. Independent criteria
    /// are evaluated one segment at a time.
    pub(crate) fn fulfils(&self, sequences: &[StateSequence], segments: &[SegmentRef]) -> bool {
        match &self.oracle {
            Oracle::Pointwise(o) => segments.iter().all(|s| {
                let seq = &sequences[s.seq];
                s.positions().all(|p| o.holds_at(seq, p))
            }),
            Oracle::Segment(o) => {
                if self.descriptor.flags.independent {
                    segments
                        .iter()
                        .all(|s| o.holds(sequences, std::slice::from_ref(s)))
                } else {
                    o.holds(sequences, segments)
                }
            }
        }
    }

    /// Per-state verdict, available only for pointwise oracles.
    pub(crate) fn holds_at(&self, seq: &StateSequence, pos: usize) -> Option<bool> {
        match &self.oracle {
            Oracle::Pointwise(o) => Some(o.holds_at(seq, pos)),
            Oracle::Segment(_) => None,
        }
    }
}

/// Sequences plus criteria: everything a solver needs.
#[derive(Debug, Clone)]
pub struct Instance {
    pub sequences: Vec<StateSequence>,
    pub criteria: Vec<Criterion>,
}

impl Instance {
    pub fn new(sequences: Vec<StateSequence>, criteria: Vec<Criterion>) -> Result<Self> {
        if sequences.is_empty() {
            return Err(Error::InvalidParameter("instance has no sequences".into()));
        }
        if criteria.is_empty() {
            return Err(Error::InvalidParameter("instance has no criteria".into()));
        }
        for s in &sequences {
            s.check()?;
        }
        let mut ids = HashSet::new();
        for c in &criteria {
            if !ids.insert(c.id()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate criterion id `{}`",
                    c.id()
                )));
            }
        }
        let mut seq_ids = HashSet::new();
        for s in &sequences {
            if !seq_ids.insert(s.id.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate sequence id `{}`",
                    s.id
                )));
            }
        }
        Ok(Instance {
            sequences,
            criteria,
        })
    }

    /// Number of sequences, `m`.
    pub fn arity(&self) -> usize {
        self.sequences.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.sequences.iter().map(StateSequence::len).collect()
    }

    pub fn criterion_index(&self, id: &str) -> Option<usize> {
        self.criteria.iter().position(|c| c.id() == id)
    }

    pub fn sequence_index(&self, id: &str) -> Option<usize> {
        self.sequences.iter().position(|s| s.id == id)
    }

    pub fn all_monotone(&self) -> bool {
        self.criteria.iter().all(|c| c.flags().monotone_decreasing)
    }

    pub fn all_monotone_independent(&self) -> bool {
        self.criteria
            .iter()
            .all(|c| c.flags().is_monotone_independent())
    }

    /// `∏ (n_i + 1)`, saturating.
    pub fn grid_size(&self) -> u128 {
        self.sequences
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128 + 1))
    }

    pub(crate) fn require_monotone_independent(&self) -> Result<()> {
        match self
            .criteria
            .iter()
            .find(|c| !c.flags().is_monotone_independent())
        {
            Some(c) => Err(Error::FlagViolation {
                criterion: c.id().to_string(),
                required: "monotone decreasing and independent",
            }),
            None => Ok(()),
        }
    }

    pub(crate) fn require_monotone(&self) -> Result<()> {
        match self
            .criteria
            .iter()
            .find(|c| !c.flags().monotone_decreasing)
        {
            Some(c) => Err(Error::FlagViolation {
                criterion: c.id().to_string(),
                required: "monotone decreasing",
            }),
            None => Ok(()),
        }
    }
}
