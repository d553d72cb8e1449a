//! Beam-limited frontier search.
//!
//! Each layer is deduplicated and reduced to its maximal vertices, then
//! truncated to the `q` best by score. Scores are taken relative to each
//! vertex's parent in the previous layer.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::criteria::ReachTables;
use crate::criterion::Instance;
use crate::diagram::{from_path, Step};
use crate::error::{Error, Result};
use crate::exact::uncovered_error;
use crate::grid::{maximal_set_unchecked, GridVertex};
use crate::solve::{Solution, SolveOptions, SolveStats};

fn check_step(v: &GridVertex, w: &GridVertex) -> Result<()> {
    if v.arity() != w.arity() {
        return Err(Error::ArityMismatch {
            left: v.arity(),
            right: w.arity(),
        });
    }
    if !w.covers(v) {
        return Err(Error::Precondition(format!("{w} does not cover {v}")));
    }
    Ok(())
}

/// Number of sequences advanced from `v` to `w`.
pub fn score_sequences(v: &GridVertex, w: &GridVertex) -> Result<usize> {
    check_step(v, w)?;
    Ok(v.0.iter().zip(&w.0).filter(|(a, b)| b > a).count())
}

/// Number of states consumed from `v` to `w`, summed over sequences.
pub fn score_timesteps(v: &GridVertex, w: &GridVertex) -> Result<usize> {
    check_step(v, w)?;
    Ok(v.0.iter().zip(&w.0).map(|(a, b)| b - a).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Prefer vertices that advance the most sequences.
    Sequence,
    /// Prefer vertices that consume the most states.
    Timestep,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Sequence => "sequence",
            Strategy::Timestep => "timestep",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequence" | "seq" => Ok(Strategy::Sequence),
            "timestep" | "step" => Ok(Strategy::Timestep),
            _ => Err(Error::InvalidParameter(format!(
                "unknown beam strategy `{s}`"
            ))),
        }
    }
}

pub fn solve_beam(instance: &Instance, strategy: Strategy, q: usize) -> Result<Solution> {
    let opts = SolveOptions {
        beam_width: q,
        ..SolveOptions::default()
    };
    solve_beam_with(instance, strategy, &opts)
}

pub fn solve_beam_with(
    instance: &Instance,
    strategy: Strategy,
    opts: &SolveOptions,
) -> Result<Solution> {
    let q = opts.beam_width;
    if q == 0 {
        return Err(Error::InvalidParameter(
            "beam width must be at least 1".into(),
        ));
    }
    let reach = ReachTables::build(instance)?;
    let lengths = instance.lengths();
    let corner = GridVertex(lengths.clone());
    let k = instance.criteria.len();
    let mut meter = opts.budget.meter();
    let mut stats = SolveStats {
        max_frontier: 1,
        ..SolveStats::default()
    };

    // Every layer keeps (vertex, criterion, parent index).
    let mut layers: Vec<Vec<(GridVertex, usize, usize)>> =
        vec![vec![(GridVertex::origin(lengths.len()), 0, 0)]];
    let cap = lengths.iter().sum::<usize>() + 1;
    loop {
        let prev = layers.last().expect("non-empty");
        if let Some(i) = prev.iter().position(|(v, _, _)| *v == corner) {
            return Ok(finish(instance, &layers, i, stats));
        }
        if layers.len() > cap {
            return Err(Error::Infeasible(format!("no cover within {cap} steps")));
        }
        meter.check()?;
        stats.expanded += prev.len();

        let mut best: HashMap<GridVertex, (usize, usize)> = HashMap::new();
        for (p, (v, _, _)) in prev.iter().enumerate() {
            for c in 0..k {
                meter.tick()?;
                let w = reach.advance_unchecked(v, c);
                if w == *v {
                    continue;
                }
                stats.candidates += 1;
                if opts
                    .max_expansions
                    .is_some_and(|cap| stats.candidates > cap)
                {
                    return Err(Error::Budget(crate::error::BudgetKind::Expansions));
                }
                best.entry(w)
                    .and_modify(|cur| {
                        if (c, &prev[p].0) < (cur.0, &prev[cur.1].0) {
                            *cur = (c, p);
                        }
                    })
                    .or_insert((c, p));
            }
        }
        if best.is_empty() {
            return Err(match reach.first_uncovered(&lengths) {
                Some(gap) => uncovered_error(instance, gap),
                None => Error::BeamDeadEnd {
                    step: layers.len() - 1,
                },
            });
        }
        let maximal = maximal_set_unchecked(best.keys().cloned().collect());
        let mut scored: Vec<_> = maximal
            .into_iter()
            .map(|w| {
                let (c, p) = best[&w];
                let parent = &prev[p].0;
                let seqs = score_sequences(parent, &w).expect("advance covers parent");
                let steps = score_timesteps(parent, &w).expect("advance covers parent");
                let key = match strategy {
                    Strategy::Sequence => (seqs, steps),
                    Strategy::Timestep => (steps, seqs),
                };
                (Reverse(key), c, w, p)
            })
            .collect();
        scored.sort();
        scored.truncate(q);
        let next: Vec<_> = scored.into_iter().map(|(_, c, w, p)| (w, c, p)).collect();
        stats.max_frontier = stats.max_frontier.max(next.len());
        layers.push(next);
    }
}

fn finish(
    instance: &Instance,
    layers: &[Vec<(GridVertex, usize, usize)>],
    mut idx: usize,
    mut stats: SolveStats,
) -> Solution {
    let mut steps = Vec::with_capacity(layers.len() - 1);
    for layer in layers[1..].iter().rev() {
        let (v, c, p) = &layer[idx];
        steps.push(Step {
            criterion: *c,
            vertex: v.clone(),
        });
        idx = *p;
    }
    steps.reverse();
    stats.steps = steps.len();
    let (diagram, certificates) = from_path(instance, &steps);
    Solution {
        diagram,
        certificates,
        stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::label_criterion;
    use crate::model::StateSequence;

    fn gv(c: &[usize]) -> GridVertex {
        GridVertex(c.to_vec())
    }

    fn chars(id: &str, s: &str) -> StateSequence {
        let v: Vec<String> = s.chars().map(String::from).collect();
        StateSequence::from_labels(id, &v).unwrap()
    }

    #[test]
    fn score_examples() {
        assert_eq!(score_sequences(&gv(&[0, 0]), &gv(&[2, 0])).unwrap(), 1);
        assert_eq!(score_sequences(&gv(&[0, 0]), &gv(&[2, 3])).unwrap(), 2);
        assert_eq!(score_sequences(&gv(&[1, 1]), &gv(&[1, 1])).unwrap(), 0);
        assert_eq!(score_timesteps(&gv(&[0, 0]), &gv(&[2, 0])).unwrap(), 2);
        assert_eq!(score_timesteps(&gv(&[0, 0]), &gv(&[2, 3])).unwrap(), 5);
        assert_eq!(score_timesteps(&gv(&[4, 1]), &gv(&[4, 1])).unwrap(), 0);
    }

    #[test]
    fn score_preconditions() {
        assert!(matches!(
            score_sequences(&gv(&[1, 0]), &gv(&[0, 1])),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            score_timesteps(&gv(&[1]), &gv(&[0, 1])),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn single_sequence_either_strategy() {
        let inst = Instance::new(
            vec![chars("s", "aaabbb")],
            vec![label_criterion("a"), label_criterion("b")],
        )
        .unwrap();
        for s in [Strategy::Sequence, Strategy::Timestep] {
            assert_eq!(solve_beam(&inst, s, 1).unwrap().fd_size(), 4);
        }
    }

    #[test]
    fn zero_width_rejected() {
        let inst = Instance::new(vec![chars("s", "a")], vec![label_criterion("a")]).unwrap();
        assert!(matches!(
            solve_beam(&inst, Strategy::Sequence, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn uncoverable_is_true_infeasibility() {
        let inst = Instance::new(vec![chars("s", "ab")], vec![label_criterion("a")]).unwrap();
        assert!(matches!(
            solve_beam(&inst, Strategy::Timestep, 1),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn expansion_cap() {
        let inst = Instance::new(
            vec![chars("x", "abab"), chars("y", "baba")],
            vec![label_criterion("a"), label_criterion("b")],
        )
        .unwrap();
        let opts = SolveOptions {
            beam_width: 4,
            max_expansions: Some(2),
            ..SolveOptions::default()
        };
        assert!(matches!(
            solve_beam_with(&inst, Strategy::Sequence, &opts),
            Err(Error::Budget(crate::error::BudgetKind::Expansions))
        ));
    }
}
