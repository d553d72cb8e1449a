//! Value types shared by every solver: states, sequences, segments and the
//! certificates that tie a segmentation to a path through a diagram.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the pitch frame: `x` along the attack direction, `y` along the
/// goal-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// One observation of a state sequence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "StateRecord", into = "StateRecord")]
pub struct State {
    pub labels: BTreeSet<String>,
    pub position: Option<Point>,
    pub timestamp: Option<f64>,
    pub event: Option<String>,
    /// Positions of a defensive line, in adjacency order.
    pub line: Option<Vec<Point>>,
}

impl State {
    pub fn labelled<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        State {
            labels: labels.into_iter().map(Into::into).collect(),
            ..State::default()
        }
    }

    pub fn has_label(&self, tag: &str) -> bool {
        self.labels.contains(tag)
    }

    fn check(&self) -> Result<()> {
        let finite = self.position.is_none_or(|p| p.is_finite())
            && self.timestamp.is_none_or(f64::is_finite)
            && self
                .line
                .as_ref()
                .is_none_or(|l| l.iter().all(Point::is_finite));
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "state coordinates must be finite".into(),
            ))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    #[serde(default)]
    labels: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    event: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    line: Option<Vec<[f64; 2]>>,
}

impl From<StateRecord> for State {
    fn from(r: StateRecord) -> Self {
        let position = match (r.x, r.y) {
            (Some(x), Some(y)) => Some(Point { x, y }),
            (Some(x), None) => Some(Point { x, y: 0.0 }),
            (None, Some(y)) => Some(Point { x: 0.0, y }),
            (None, None) => None,
        };
        State {
            labels: r.labels,
            position,
            timestamp: r.t,
            event: r.event,
            line: r
                .line
                .map(|l| l.into_iter().map(|[x, y]| Point { x, y }).collect()),
        }
    }
}

impl From<State> for StateRecord {
    fn from(s: State) -> Self {
        StateRecord {
            labels: s.labels,
            x: s.position.map(|p| p.x),
            y: s.position.map(|p| p.y),
            t: s.timestamp,
            event: s.event,
            line: s.line.map(|l| l.into_iter().map(|p| [p.x, p.y]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSequence {
    pub id: String,
    pub states: Vec<State>,
}

impl StateSequence {
    pub fn new(id: impl Into<String>, states: Vec<State>) -> Result<Self> {
        let seq = StateSequence {
            id: id.into(),
            states,
        };
        seq.check()?;
        Ok(seq)
    }

    /// Builds a sequence whose `i`-th state carries exactly the label
    /// `labels[i]`.
    pub fn from_labels<S: AsRef<str>>(id: impl Into<String>, labels: &[S]) -> Result<Self> {
        let states = labels
            .iter()
            .map(|l| State::labelled([l.as_ref()]))
            .collect();
        StateSequence::new(id, states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// The state at cursor position `pos`, i.e. state number `pos + 1`.
    pub fn state(&self, pos: usize) -> &State {
        &self.states[pos]
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "sequence `{}` has no states",
                self.id
            )));
        }
        self.states.iter().try_for_each(State::check)
    }
}

/// Segment `start..end` of sequence `seq` in cursor convention: it holds the
/// states `start+1 ..= end`, and is empty iff `start == end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentRef {
    pub seq: usize,
    pub start: usize,
    pub end: usize,
}

impl SegmentRef {
    pub fn new(seq: usize, start: usize, end: usize) -> Self {
        SegmentRef { seq, start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Zero-based indices of the states inside the segment.
    pub fn positions(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// One segment of a segmentation together with the criterion it fulfils.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub start: usize,
    pub end: usize,
    pub criterion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub seq_id: String,
    pub parts: Vec<Part>,
}

/// A segmentation and the node path (from source to sink, inclusive) it
/// follows through a diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(flatten)]
    pub segmentation: Segmentation,
    pub path: Vec<usize>,
}
