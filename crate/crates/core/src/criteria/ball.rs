//! Ball-movement criteria for attacking possessions.
//!
//! A possession is a sequence of ball events. The movement class of event `i`
//! is read from the transition to event `i + 1`; the final event of a
//! possession has no movement class and is only covered by the shot criteria,
//! which read the event's own kind.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::criterion::Criterion;
use crate::error::{Error, Result};
use crate::model::{State, StateSequence};

pub const SHOT_GOAL: &str = "shot-goal";
pub const SHOT_NO_GOAL: &str = "shot-no-goal";

const LONG_BALL_METRES: f64 = 30.0;
const CROSS_FIELD_METRES: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BallEvent {
    /// Metres along the attack direction.
    pub x: f64,
    /// Metres across the field.
    pub y: f64,
    /// Seconds.
    pub t: f64,
    pub kind: Option<String>,
}

impl BallEvent {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        BallEvent {
            x,
            y,
            t,
            kind: None,
        }
    }

    pub fn with_kind(mut self, kind: &str) -> Self {
        self.kind = Some(kind.to_string());
        self
    }

    pub fn from_state(state: &State) -> Option<Self> {
        let p = state.position?;
        Some(BallEvent {
            x: p.x,
            y: p.y,
            t: state.timestamp?,
            kind: state.event.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BallMovement {
    /// Backward movement.
    BM,
    /// Lateral movement.
    LM,
    /// Forward movement.
    FM,
    /// Fast forward movement.
    FFM,
    /// Long ball.
    LB,
    /// Cross-field ball.
    CFB,
    /// Shot resulting in a goal.
    SG,
    /// Shot not resulting in a goal.
    SNG,
}

impl BallMovement {
    pub const ALL: [BallMovement; 8] = [
        BallMovement::BM,
        BallMovement::LM,
        BallMovement::FM,
        BallMovement::FFM,
        BallMovement::LB,
        BallMovement::CFB,
        BallMovement::SG,
        BallMovement::SNG,
    ];

    pub fn is_shot(self) -> bool {
        matches!(self, BallMovement::SG | BallMovement::SNG)
    }
}

impl fmt::Display for BallMovement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for BallMovement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BallMovement::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown ball criterion `{s}`")))
    }
}

/// Ball velocity `(x_v, y_v)` in metres per second between two events.
pub fn ball_velocity(e1: &BallEvent, e2: &BallEvent) -> Result<(f64, f64)> {
    let dt = e2.t - e1.t;
    if dt <= 0.0 || dt.is_nan() {
        return Err(Error::NonIncreasingTime {
            from: e1.t,
            to: e2.t,
        });
    }
    Ok(((e2.x - e1.x) / dt, (e2.y - e1.y) / dt))
}

/// Every criterion the transition `e1 -> e2` satisfies. Shot criteria come
/// from the kind of `e2`.
pub fn transition_criteria(e1: &BallEvent, e2: &BallEvent) -> Result<BTreeSet<BallMovement>> {
    let (xv, _) = ball_velocity(e1, e2)?;
    let dx = e2.x - e1.x;
    let dy = e2.y - e1.y;
    let mut out = BTreeSet::new();
    if xv < 1.0 {
        out.insert(BallMovement::BM);
    }
    if -5.0 < xv && xv < 5.0 {
        out.insert(BallMovement::LM);
    }
    if -1.0 < xv && xv < 12.0 {
        out.insert(BallMovement::FM);
    }
    if 8.0 < xv {
        out.insert(BallMovement::FFM);
    }
    if dx >= LONG_BALL_METRES {
        out.insert(BallMovement::LB);
    }
    let heading = dy.atan2(dx).to_degrees();
    if dy.abs() >= CROSS_FIELD_METRES
        && ((80.0..=100.0).contains(&heading) || (-100.0..=-80.0).contains(&heading))
    {
        out.insert(BallMovement::CFB);
    }
    match e2.kind.as_deref() {
        Some(SHOT_GOAL) => {
            out.insert(BallMovement::SG);
        }
        Some(SHOT_NO_GOAL) => {
            out.insert(BallMovement::SNG);
        }
        _ => {}
    }
    Ok(out)
}

/// Criteria satisfied by state `pos` of a possession: the movement class of
/// its outgoing transition plus the shot class of its own event kind.
pub fn ball_state_criteria(seq: &StateSequence, pos: usize) -> BTreeSet<BallMovement> {
    let state = seq.state(pos);
    let mut out = BTreeSet::new();
    if let (Some(here), Some(next)) = (
        BallEvent::from_state(state),
        seq.states.get(pos + 1).and_then(BallEvent::from_state),
    ) {
        if let Ok(set) = transition_criteria(&here, &next) {
            out.extend(set.into_iter().filter(|m| !m.is_shot()));
        }
    }
    match state.event.as_deref() {
        Some(SHOT_GOAL) => {
            out.insert(BallMovement::SG);
        }
        Some(SHOT_NO_GOAL) => {
            out.insert(BallMovement::SNG);
        }
        _ => {}
    }
    out
}

pub fn ball_criterion(movement: BallMovement) -> Criterion {
    let id = movement.to_string();
    Criterion::pointwise(id.clone(), id, move |seq: &StateSequence, pos: usize| {
        ball_state_criteria(seq, pos).contains(&movement)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Point;
    use BallMovement::*;

    #[test]
    fn velocity_examples() {
        let (xv, _) = ball_velocity(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(20.0, 0.0, 2.0),
        )
        .unwrap();
        assert_eq!(xv, 10.0);
        let v = ball_velocity(
            &BallEvent::new(3.0, 4.0, 0.0),
            &BallEvent::new(3.0, 4.0, 1.5),
        )
        .unwrap();
        assert_eq!(v, (0.0, 0.0));
        let (_, yv) = ball_velocity(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(0.0, 20.0, 1.0),
        )
        .unwrap();
        assert_eq!(yv, 20.0);
    }

    #[test]
    fn velocity_needs_increasing_time() {
        let e = BallEvent::new(0.0, 0.0, 1.0);
        assert!(matches!(
            ball_velocity(&e, &e),
            Err(Error::NonIncreasingTime { .. })
        ));
        assert!(transition_criteria(&e, &BallEvent::new(1.0, 0.0, 0.5)).is_err());
    }

    #[test]
    fn threshold_table() {
        let fast = transition_criteria(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(20.0, 0.0, 2.0),
        )
        .unwrap();
        assert_eq!(fast, BTreeSet::from([FM, FFM]));
        let still = transition_criteria(
            &BallEvent::new(5.0, 5.0, 0.0),
            &BallEvent::new(5.0, 5.0, 1.0),
        )
        .unwrap();
        assert_eq!(still, BTreeSet::from([BM, LM, FM]));
    }

    #[test]
    fn long_ball() {
        let set = transition_criteria(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(35.0, 2.0, 2.0),
        )
        .unwrap();
        assert!(set.contains(&LB));
        let short = transition_criteria(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(29.0, 0.0, 2.0),
        )
        .unwrap();
        assert!(!short.contains(&LB));
    }

    #[test]
    fn cross_field_ball() {
        let set = transition_criteria(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(2.0, -25.0, 2.0),
        )
        .unwrap();
        assert!(set.contains(&CFB));
        // Long enough but too diagonal.
        let diag = transition_criteria(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(20.0, 25.0, 2.0),
        )
        .unwrap();
        assert!(!diag.contains(&CFB));
        let short = transition_criteria(
            &BallEvent::new(0.0, 0.0, 0.0),
            &BallEvent::new(0.0, 15.0, 2.0),
        )
        .unwrap();
        assert!(!short.contains(&CFB));
    }

    #[test]
    fn shot_kinds_come_from_second_event() {
        let e1 = BallEvent::new(80.0, 30.0, 0.0);
        let set = transition_criteria(&e1, &BallEvent::new(95.0, 34.0, 1.0).with_kind(SHOT_GOAL))
            .unwrap();
        assert!(set.contains(&SG) && !set.contains(&SNG));
        let set = transition_criteria(
            &e1,
            &BallEvent::new(95.0, 34.0, 1.0).with_kind(SHOT_NO_GOAL),
        )
        .unwrap();
        assert!(set.contains(&SNG));
    }

    #[test]
    fn state_level_classes() {
        let ev = |x: f64, t: f64, kind: Option<&str>| State {
            position: Some(Point::new(x, 0.0)),
            timestamp: Some(t),
            event: kind.map(String::from),
            ..State::default()
        };
        let seq = StateSequence::new(
            "poss",
            vec![
                ev(0.0, 0.0, Some("pass")),
                ev(20.0, 2.0, None),
                ev(20.5, 3.0, Some(SHOT_GOAL)),
            ],
        )
        .unwrap();
        assert_eq!(ball_state_criteria(&seq, 0), BTreeSet::from([FM, FFM]));
        assert_eq!(ball_state_criteria(&seq, 1), BTreeSet::from([BM, LM, FM]));
        assert_eq!(ball_state_criteria(&seq, 2), BTreeSet::from([SG]));
        assert_eq!(ball_criterion(SG).holds_at(&seq, 2), Some(true));
    }

    #[test]
    fn parse_names() {
        for m in BallMovement::ALL {
            assert_eq!(m.to_string().parse::<BallMovement>().unwrap(), m);
        }
        assert!("XX".parse::<BallMovement>().is_err());
    }
}
