//! Options, results, and algorithm dispatch shared by all solvers.

use std::fmt;
use std::str::FromStr;

use crate::criterion::Instance;
use crate::diagram::FlowDiagram;
use crate::error::{Error, Result};
use crate::grid::FilterMode;
use crate::model::Certificate;
use crate::resources::Budget;
use crate::{exact, frontier, heuristic};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub budget: Budget,
    /// Let the general search jump straight to the greedy advance of
    /// monotone independent criteria when every criterion is monotone.
    pub prune_monotone: bool,
    /// Largest prefix graph the materialized reference solver will build.
    pub reference_cap: u128,
    pub filter: FilterMode,
    /// Largest grid the dense marking filter may allocate.
    pub dense_cap: u128,
    /// Beam width.
    pub beam_width: usize,
    /// Cap on candidate vertices generated by the beam search.
    pub max_expansions: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: Budget::unlimited(),
            prune_monotone: true,
            reference_cap: 1_000_000,
            filter: FilterMode::Pairwise,
            dense_cap: 50_000_000,
            beam_width: 1,
            max_expansions: None,
        }
    }
}

/// Counters collected while solving.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Labelled nodes in the diagram, i.e. prefix-graph steps to the corner.
    pub steps: usize,
    /// Vertices expanded (BFS pops or frontier members).
    pub expanded: usize,
    /// Candidate vertices generated, duplicates included.
    pub candidates: usize,
    /// Largest frontier or queue seen.
    pub max_frontier: usize,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub diagram: FlowDiagram,
    pub certificates: Vec<Certificate>,
    pub stats: SolveStats,
}

impl Solution {
    pub fn fd_size(&self) -> usize {
        crate::diagram::fd_size(&self.diagram)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Exact,
    Reference,
    Frontier,
    FrontierDependent,
    BeamSequence,
    BeamTimestep,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Exact,
        Algorithm::Reference,
        Algorithm::Frontier,
        Algorithm::FrontierDependent,
        Algorithm::BeamSequence,
        Algorithm::BeamTimestep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::Reference => "reference",
            Algorithm::Frontier => "frontier",
            Algorithm::FrontierDependent => "frontier-dep",
            Algorithm::BeamSequence => "beam-seq",
            Algorithm::BeamTimestep => "beam-step",
        }
    }

    /// Rejects instances whose criterion flags the algorithm cannot handle.
    pub fn check_flags(self, instance: &Instance) -> Result<()> {
        match self {
            Algorithm::Exact | Algorithm::Reference => Ok(()),
            Algorithm::FrontierDependent => instance.require_monotone(),
            Algorithm::Frontier | Algorithm::BeamSequence | Algorithm::BeamTimestep => {
                instance.require_monotone_independent()
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

pub fn solve(instance: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<Solution> {
    algorithm.check_flags(instance)?;
    match algorithm {
        Algorithm::Exact => exact::solve_exact_with(instance, opts),
        Algorithm::Reference => exact::solve_reference_with(instance, opts),
        Algorithm::Frontier => frontier::solve_frontier_independent_with(instance, opts),
        Algorithm::FrontierDependent => frontier::solve_frontier_dependent_with(instance, opts),
        Algorithm::BeamSequence => {
            heuristic::solve_beam_with(instance, heuristic::Strategy::Sequence, opts)
        }
        Algorithm::BeamTimestep => {
            heuristic::solve_beam_with(instance, heuristic::Strategy::Timestep, opts)
        }
    }
}
