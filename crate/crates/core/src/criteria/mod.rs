//! Built-in criterion packs and reach-table precomputation.

mod ball;
mod formation;
mod reach;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criterion::{Criterion, CriterionDescriptor, CriterionFlags, SegmentOracle};
use crate::error::Result;
use crate::model::{SegmentRef, StateSequence};

pub use ball::{
    ball_criterion, ball_state_criteria, ball_velocity, transition_criteria, BallEvent,
    BallMovement, SHOT_GOAL, SHOT_NO_GOAL,
};
pub use formation::{
    component_ranges, formation_criteria, formation_criterion, pair_angle, FormationTriple,
};
pub use reach::{sweep, ReachTables};

/// Fulfilled iff every state of every segment carries `tag`.
pub fn label_criterion(tag: &str) -> Criterion {
    let owned = tag.to_string();
    Criterion::pointwise(tag, tag, move |seq: &StateSequence, pos: usize| {
        seq.state(pos).has_label(&owned)
    })
}

/// How a segment is matched against the listed intervals of a table
/// criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMatch {
    /// The segment must lie inside some listed interval. Monotone decreasing.
    Within,
    /// The segment must equal a listed interval. No monotonicity.
    Exact,
}

/// Explicit per-sequence lists of fulfilling intervals, in cursor
/// convention, keyed by sequence id.
#[derive(Debug, Clone)]
pub struct TableOracle {
    pub intervals: BTreeMap<String, Vec<(usize, usize)>>,
    pub matching: TableMatch,
}

impl SegmentOracle for TableOracle {
    fn holds(&self, sequences: &[StateSequence], segments: &[SegmentRef]) -> bool {
        segments.iter().all(|s| {
            let Some(list) = self.intervals.get(&sequences[s.seq].id) else {
                return false;
            };
            list.iter().any(|&(a, b)| match self.matching {
                TableMatch::Within => a <= s.start && s.end <= b,
                TableMatch::Exact => a == s.start && s.end == b,
            })
        })
    }
}

pub fn table_criterion(
    id: &str,
    name: &str,
    intervals: BTreeMap<String, Vec<(usize, usize)>>,
    matching: TableMatch,
) -> Result<Criterion> {
    let flags = match matching {
        TableMatch::Within => CriterionFlags::MONOTONE_INDEPENDENT,
        TableMatch::Exact => CriterionFlags::INDEPENDENT,
    };
    Ok(Criterion::segment(
        CriterionDescriptor::new(id, name, flags)?,
        TableOracle {
            intervals,
            matching,
        },
    ))
}
