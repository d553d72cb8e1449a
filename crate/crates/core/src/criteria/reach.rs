use rayon::prelude::*;

use crate::criterion::{Criterion, Instance};
use crate::error::{Error, Result};
use crate::grid::GridVertex;

/// Two-pointer sweep over one sequence of length `n` for a monotone
/// decreasing criterion. `extends(a, b)` must report whether the segment
/// `a..b+1` fulfils the criterion; it is only asked when `a..b` is already
/// known to fulfil it (or is empty). Makes at most `2n + 1` calls.
///
/// `reach[a]` is the largest `b >= a` such that `a..b` fulfils the criterion,
/// or `a` when no non-empty extension does.
pub fn sweep(n: usize, mut extends: impl FnMut(usize, usize) -> bool) -> Vec<usize> {
    let mut reach = Vec::with_capacity(n + 1);
    let mut b = 0;
    for a in 0..=n {
        b = b.max(a);
        while b < n && extends(a, b) {
            b += 1;
        }
        reach.push(b);
    }
    reach
}

fn sweep_criterion(instance: &Instance, c: &Criterion, j: usize) -> Vec<usize> {
    let seq = &instance.sequences[j];
    if c.is_pointwise() {
        sweep(seq.len(), |_, b| c.holds_at(seq, b).unwrap_or(false))
    } else {
        sweep(seq.len(), |a, b| {
            c.fulfils(
                &instance.sequences,
                &[crate::model::SegmentRef::new(j, a, b + 1)],
            )
        })
    }
}

/// Below this many state evaluations the tables are built on one thread.
const PARALLEL_WORK: usize = 1 << 14;

/// Per `(criterion, sequence)` reach arrays for monotone independent
/// criteria.
#[derive(Debug, Clone)]
pub struct ReachTables {
    tables: Vec<Option<Vec<Vec<usize>>>>,
    lengths: Vec<usize>,
}

impl ReachTables {
    /// Requires every criterion to be monotone decreasing and independent.
    pub fn build(instance: &Instance) -> Result<Self> {
        instance.require_monotone_independent()?;
        Ok(Self::build_available(instance))
    }

    /// Builds tables for the eligible criteria only; the rest get none.
    pub fn build_available(instance: &Instance) -> Self {
        let m = instance.arity();
        let work: usize = instance.lengths().iter().sum::<usize>() * instance.criteria.len();
        let table = |c: &Criterion| {
            c.flags()
                .is_monotone_independent()
                .then(|| (0..m).map(|j| sweep_criterion(instance, c, j)).collect())
        };
        let tables = if work < PARALLEL_WORK {
            instance.criteria.iter().map(table).collect()
        } else {
            instance.criteria.par_iter().map(table).collect()
        };
        ReachTables {
            tables,
            lengths: instance.lengths(),
        }
    }

    /// Number of criteria, tabled or not.
    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn has(&self, criterion: usize) -> bool {
        self.tables.get(criterion).is_some_and(Option::is_some)
    }

    /// The reach array of `criterion` on sequence `seq`.
    pub fn reach(&self, criterion: usize, seq: usize) -> Option<&[usize]> {
        self.tables
            .get(criterion)?
            .as_ref()
            .map(|t| t[seq].as_slice())
    }

    /// Moves every coordinate as far as `criterion` allows.
    pub fn advance(&self, v: &GridVertex, criterion: usize) -> Result<GridVertex> {
        let table = self
            .tables
            .get(criterion)
            .and_then(Option::as_ref)
            .ok_or_else(|| {
                Error::Precondition(format!("no reach table for criterion {criterion}"))
            })?;
        if table.len() != v.arity() {
            return Err(Error::ArityMismatch {
                left: v.arity(),
                right: table.len(),
            });
        }
        Ok(self.advance_unchecked(v, criterion))
    }

    pub(crate) fn advance_unchecked(&self, v: &GridVertex, criterion: usize) -> GridVertex {
        let table = self.tables[criterion]
            .as_ref()
            .expect("reach table present");
        GridVertex(v.0.iter().zip(table).map(|(&x, r)| r[x]).collect())
    }

    /// First `(sequence, position)` whose state lies in no fulfilling segment
    /// of any tabled criterion. Exact when all criteria are monotone
    /// independent, since then a coverable state fulfils on its own.
    pub fn first_uncovered(&self, lengths: &[usize]) -> Option<(usize, usize)> {
        for (j, &n) in lengths.iter().enumerate() {
            for pos in 0..n {
                let covered = self.tables.iter().flatten().any(|t| t[j][pos] > pos);
                if !covered {
                    return Some((j, pos));
                }
            }
        }
        None
    }
}
