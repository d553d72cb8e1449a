//! Prefix-graph vertices and dominance.

use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prefix-graph vertex: entry `i` is the number of states of sequence `i`
/// already consumed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridVertex(pub Vec<usize>);

impl GridVertex {
    pub fn origin(arity: usize) -> Self {
        GridVertex(vec![0; arity])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    /// Coordinate-wise `>=`.
    pub fn covers(&self, other: &GridVertex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub(crate) fn sum(&self) -> usize {
        self.0.iter().sum()
    }
}

impl From<Vec<usize>> for GridVertex {
    fn from(v: Vec<usize>) -> Self {
        GridVertex(v)
    }
}

impl fmt::Display for GridVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `u` dominates `v` when every coordinate of `u` is at least the matching
/// coordinate of `v` and at least one is strictly larger.
pub fn dominates(u: &GridVertex, v: &GridVertex) -> Result<bool> {
    if u.arity() != v.arity() {
        return Err(Error::ArityMismatch {
            left: u.arity(),
            right: v.arity(),
        });
    }
    Ok(dominates_unchecked(u, v))
}

pub(crate) fn dominates_unchecked(u: &GridVertex, v: &GridVertex) -> bool {
    let mut strict = false;
    for (a, b) in u.0.iter().zip(&v.0) {
        if a < b {
            return false;
        }
        strict |= a > b;
    }
    strict
}

/// The vertices of `vertices` not dominated by any other member, deduplicated
/// and sorted lexicographically.
pub fn maximal_set(vertices: &[GridVertex]) -> Result<Vec<GridVertex>> {
    if let Some(first) = vertices.first() {
        if let Some(bad) = vertices.iter().find(|v| v.arity() != first.arity()) {
            return Err(Error::ArityMismatch {
                left: first.arity(),
                right: bad.arity(),
            });
        }
    }
    Ok(maximal_set_unchecked(vertices.to_vec()))
}

pub(crate) fn maximal_set_unchecked(mut vertices: Vec<GridVertex>) -> Vec<GridVertex> {
    vertices.sort_unstable();
    vertices.dedup();
    // A dominator always has a strictly larger coordinate sum.
    let mut by_sum: Vec<(usize, GridVertex)> = vertices.into_iter().map(|v| (v.sum(), v)).collect();
    by_sum.sort_by_key(|(s, _)| Reverse(*s));
    let mut kept: Vec<GridVertex> = Vec::new();
    for (_, v) in by_sum {
        if !kept.iter().any(|k| dominates_unchecked(k, &v)) {
            kept.push(v);
        }
    }
    kept.sort_unstable();
    kept
}

/// How frontier candidates are reduced to their maximal elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    /// Sort by coordinate sum and scan pairwise.
    #[default]
    Pairwise,
    /// Mark a dense copy of the grid, cascading "dominated" marks downward.
    MarkingGrid,
}

const UNMARKED: u8 = 0;
const IN_SET: u8 = 1;
const DOMINATED: u8 = 2;

/// Dense grid of marks, reused across frontier steps via epoch stamps.
pub struct MarkingGrid {
    dims: Vec<usize>,
    strides: Vec<usize>,
    stamp: Vec<u32>,
    mark: Vec<u8>,
    epoch: u32,
}

impl MarkingGrid {
    /// `lengths[i]` is `n_i`; the grid has `∏ (n_i + 1)` cells.
    pub fn new(lengths: &[usize], cap: u128) -> Result<Self> {
        let dims: Vec<usize> = lengths.iter().map(|n| n + 1).collect();
        let size = dims.iter().fold(1u128, |a, &d| a.saturating_mul(d as u128));
        if size > cap {
            return Err(Error::CapExceeded {
                vertices: size,
                cap,
            });
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let size = size as usize;
        Ok(MarkingGrid {
            dims,
            strides,
            stamp: vec![0; size],
            mark: vec![UNMARKED; size],
            epoch: 0,
        })
    }

    fn index(&self, v: &[usize]) -> usize {
        v.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    fn get(&self, idx: usize) -> u8 {
        if self.stamp[idx] == self.epoch {
            self.mark[idx]
        } else {
            UNMARKED
        }
    }

    fn set(&mut self, idx: usize, m: u8) {
        self.stamp[idx] = self.epoch;
        self.mark[idx] = m;
    }

    /// Maximal elements of `candidates`, sorted lexicographically.
    pub fn filter(&mut self, candidates: &[GridVertex]) -> Vec<GridVertex> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let mut stack: Vec<Vec<usize>> = Vec::new();
        for v in candidates {
            debug_assert!(v.0.iter().zip(&self.dims).all(|(c, d)| c < d));
            let idx = self.index(&v.0);
            if self.get(idx) != UNMARKED {
                continue;
            }
            self.set(idx, IN_SET);
            stack.push(v.0.clone());
            while let Some(coords) = stack.pop() {
                let here = self.index(&coords);
                for i in 0..coords.len() {
                    if coords[i] == 0 {
                        continue;
                    }
                    let below = here - self.strides[i];
                    match self.get(below) {
                        DOMINATED => {}
                        IN_SET => self.set(below, DOMINATED),
                        _ => {
                            self.set(below, DOMINATED);
                            let mut next = coords.clone();
                            next[i] -= 1;
                            stack.push(next);
                        }
                    }
                }
            }
        }
        let mut out: Vec<GridVertex> = candidates
            .iter()
            .filter(|v| self.get(self.index(&v.0)) == IN_SET)
            .cloned()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gv(c: &[usize]) -> GridVertex {
        GridVertex(c.to_vec())
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&gv(&[2, 3]), &gv(&[2, 2])).unwrap());
        assert!(!dominates(&gv(&[2, 3]), &gv(&[3, 2])).unwrap());
        assert!(!dominates(&gv(&[2, 2]), &gv(&[2, 2])).unwrap());
    }

    #[test]
    fn dominance_arity_mismatch() {
        assert!(matches!(
            dominates(&gv(&[1]), &gv(&[1, 2])),
            Err(Error::ArityMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn maximal_set_examples() {
        let m = maximal_set(&[gv(&[2, 3]), gv(&[3, 2]), gv(&[2, 2])]).unwrap();
        assert_eq!(m, vec![gv(&[2, 3]), gv(&[3, 2])]);
        assert!(maximal_set(&[]).unwrap().is_empty());
        assert_eq!(maximal_set(&[gv(&[1, 1])]).unwrap(), vec![gv(&[1, 1])]);
    }

    #[test]
    fn maximal_set_arity_mismatch() {
        assert!(maximal_set(&[gv(&[1]), gv(&[1, 1])]).is_err());
    }

    #[test]
    fn marking_grid_matches_pairwise() {
        let cands = vec![
            gv(&[2, 3]),
            gv(&[3, 2]),
            gv(&[2, 2]),
            gv(&[0, 3]),
            gv(&[3, 2]),
            gv(&[1, 0]),
        ];
        let mut grid = MarkingGrid::new(&[3, 3], 1 << 20).unwrap();
        assert_eq!(grid.filter(&cands), maximal_set(&cands).unwrap());
        // Dominator processed after the dominated vertex.
        let cands = vec![gv(&[1, 1]), gv(&[2, 2])];
        assert_eq!(grid.filter(&cands), vec![gv(&[2, 2])]);
    }

    #[test]
    fn marking_grid_cap() {
        assert!(matches!(
            MarkingGrid::new(&[9, 9, 9], 100),
            Err(Error::CapExceeded {
                vertices: 1000,
                cap: 100
            })
        ));
    }
}
