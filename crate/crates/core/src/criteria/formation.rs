//! Defensive-line formation criteria.
//!
//! Each adjacent pair of defenders contributes one component of a triple
//! according to the angle of the pair relative to the goal-line:
//! `R(-1) = [-90°, -5°)`, `R(0) = (-15°, +15°)`, `R(+1) = (+5°, +90°]`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::criterion::Criterion;
use crate::error::{Error, Result};
use crate::model::{Point, StateSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormationTriple(pub [i8; 3]);

impl fmt::Display for FormationTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.0;
        write!(f, "({a:+},{b:+},{c:+})")
    }
}

/// Signed angle in degrees, within `[-90, 90]`, between the line through `p`
/// and `q` and the goal-line. Positive when `q` lies further up the attack
/// direction than `p`, taking `q` as the next player along the goal-line.
pub fn pair_angle(p: Point, q: Point) -> Result<f64> {
    let attack = q.x - p.x;
    let along = q.y - p.y;
    if attack == 0.0 && along == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    if along == 0.0 {
        return Ok(90f64.copysign(attack));
    }
    Ok((attack / along).atan().to_degrees())
}

/// The components whose angular range contains `angle`; at most two.
pub fn component_ranges(angle: f64) -> Vec<i8> {
    let mut out = Vec::with_capacity(2);
    if (-90.0..-5.0).contains(&angle) {
        out.push(-1);
    }
    if angle > -15.0 && angle < 15.0 {
        out.push(0);
    }
    if angle > 5.0 && angle <= 90.0 {
        out.push(1);
    }
    out
}

/// Every triple the four defenders (in defence-line order) satisfy.
pub fn formation_criteria(positions: &[Point]) -> Result<BTreeSet<FormationTriple>> {
    if positions.len() != 4 {
        return Err(Error::InvalidParameter(format!(
            "formation needs 4 positions, got {}",
            positions.len()
        )));
    }
    let mut comps: Vec<Vec<i8>> = Vec::with_capacity(3);
    for w in positions.windows(2) {
        comps.push(component_ranges(pair_angle(w[0], w[1])?));
    }
    let mut out = BTreeSet::new();
    for &a in &comps[0] {
        for &b in &comps[1] {
            for &c in &comps[2] {
                out.insert(FormationTriple([a, b, c]));
            }
        }
    }
    Ok(out)
}

/// Fixed criterion over states carrying a defensive line; states without a
/// well-formed line never fulfil it.
pub fn formation_criterion(triple: FormationTriple) -> Criterion {
    let id = format!("formation{triple}");
    Criterion::pointwise(id.clone(), id, move |seq: &StateSequence, pos: usize| {
        seq.state(pos)
            .line
            .as_deref()
            .and_then(|line| formation_criteria(line).ok())
            .is_some_and(|set| set.contains(&triple))
    })
}
