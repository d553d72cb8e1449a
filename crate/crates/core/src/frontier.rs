//! Frontier search for monotone decreasing criteria.
//!
//! Frontier `F_i` holds the maximal vertices reachable in `i` steps. Every
//! vertex reachable in `i` steps is dominated by a member of `F_i`, so the
//! corner is reachable in `L` steps exactly when it appears in `F_L`.

use std::collections::HashMap;

use crate::criteria::ReachTables;
use crate::criterion::Instance;
use crate::diagram::{from_path, Step};
use crate::error::{Error, Result};
use crate::exact::{edge_holds, first_uncovered, for_each_above, uncovered_error};
use crate::grid::{maximal_set_unchecked, FilterMode, GridVertex, MarkingGrid};
use crate::model::SegmentRef;
use crate::resources::Meter;
use crate::solve::{Solution, SolveOptions, SolveStats};

/// Advances every coordinate of `v` as far as the monotone independent
/// criterion `criterion` allows, evaluating segments directly.
pub fn greedy_advance(instance: &Instance, v: &GridVertex, criterion: usize) -> Result<GridVertex> {
    let lengths = instance.lengths();
    if v.arity() != lengths.len() {
        return Err(Error::ArityMismatch {
            left: v.arity(),
            right: lengths.len(),
        });
    }
    let c = instance
        .criteria
        .get(criterion)
        .ok_or_else(|| Error::Precondition(format!("no criterion {criterion}")))?;
    if !c.flags().is_monotone_independent() {
        return Err(Error::FlagViolation {
            criterion: c.id().to_string(),
            required: "monotone decreasing and independent",
        });
    }
    let mut out = v.clone();
    for (j, x) in out.0.iter_mut().enumerate() {
        let start = *x;
        while *x < lengths[j]
            && c.fulfils(&instance.sequences, &[SegmentRef::new(j, start, *x + 1)])
        {
            *x += 1;
        }
    }
    Ok(out)
}

/// One layer of the search. `parents[i]` is `(criterion, index into the
/// previous layer)` for `vertices[i]`, or `None` on the first layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frontier {
    pub step: usize,
    pub vertices: Vec<GridVertex>,
    pub parents: Vec<Option<(usize, usize)>>,
}

impl Frontier {
    pub fn initial(arity: usize) -> Self {
        Frontier {
            step: 0,
            vertices: vec![GridVertex::origin(arity)],
            parents: vec![None],
        }
    }
}

enum Filter {
    Pairwise,
    Marking(MarkingGrid),
}

impl Filter {
    fn new(mode: FilterMode, lengths: &[usize], cap: u128) -> Result<Self> {
        Ok(match mode {
            FilterMode::Pairwise => Filter::Pairwise,
            FilterMode::MarkingGrid => Filter::Marking(MarkingGrid::new(lengths, cap)?),
        })
    }

    fn apply(&mut self, candidates: Vec<GridVertex>) -> Vec<GridVertex> {
        match self {
            Filter::Pairwise => maximal_set_unchecked(candidates),
            Filter::Marking(g) => g.filter(&candidates),
        }
    }
}

/// Keeps the maximal candidates; each survivor's parent is the smallest
/// criterion index, then the lexicographically smallest predecessor.
fn reduce(
    step: usize,
    prev: &Frontier,
    candidates: Vec<(GridVertex, usize, usize)>,
    filter: &mut Filter,
) -> Frontier {
    let mut best: HashMap<GridVertex, (usize, usize)> = HashMap::with_capacity(candidates.len());
    for (w, c, p) in &candidates {
        best.entry(w.clone())
            .and_modify(|cur| {
                let (cc, cp) = *cur;
                if (*c, &prev.vertices[*p]) < (cc, &prev.vertices[cp]) {
                    *cur = (*c, *p);
                }
            })
            .or_insert((*c, *p));
    }
    let vertices = filter.apply(candidates.into_iter().map(|(w, _, _)| w).collect());
    let parents = vertices.iter().map(|v| Some(best[v])).collect();
    Frontier {
        step,
        vertices,
        parents,
    }
}

/// The next layer under monotone independent criteria, plus the number of
/// candidates generated.
pub fn next_frontier(
    reach: &ReachTables,
    prev: &Frontier,
    mode: FilterMode,
) -> Result<(Frontier, usize)> {
    let mut filter = Filter::new(mode, reach.lengths(), u128::MAX)?;
    let candidates = independent_candidates(reach, prev);
    let n = candidates.len();
    Ok((reduce(prev.step + 1, prev, candidates, &mut filter), n))
}

fn independent_candidates(reach: &ReachTables, prev: &Frontier) -> Vec<(GridVertex, usize, usize)> {
    let mut out = Vec::new();
    for (p, v) in prev.vertices.iter().enumerate() {
        for c in 0..reach.len() {
            if reach.has(c) {
                let w = reach.advance_unchecked(v, c);
                if w != *v {
                    out.push((w, c, p));
                }
            }
        }
    }
    out
}

fn finish(instance: &Instance, layers: &[Frontier], mut stats: SolveStats) -> Solution {
    let last = layers.last().expect("at least one layer");
    let corner = GridVertex(instance.lengths());
    let mut idx = last
        .vertices
        .iter()
        .position(|v| *v == corner)
        .expect("corner in final layer");
    let mut steps = Vec::with_capacity(layers.len() - 1);
    for layer in layers.iter().rev() {
        match layer.parents[idx] {
            Some((c, p)) => {
                steps.push(Step {
                    criterion: c,
                    vertex: layer.vertices[idx].clone(),
                });
                idx = p;
            }
            None => break,
        }
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

pub fn solve_frontier_independent(instance: &Instance) -> Result<Solution> {
    solve_frontier_independent_with(instance, &SolveOptions::default())
}

pub fn solve_frontier_independent_with(
    instance: &Instance,
    opts: &SolveOptions,
) -> Result<Solution> {
    let reach = ReachTables::build(instance)?;
    let lengths = instance.lengths();
    if let Some(gap) = reach.first_uncovered(&lengths) {
        return Err(uncovered_error(instance, gap));
    }
    let mut filter = Filter::new(opts.filter, &lengths, opts.dense_cap)?;
    let meter = opts.budget.meter();
    run(instance, meter, &mut filter, |prev, _| {
        Ok(independent_candidates(&reach, prev))
    })
}

fn run(
    instance: &Instance,
    mut meter: Meter,
    filter: &mut Filter,
    mut expand: impl FnMut(&Frontier, &mut Meter) -> Result<Vec<(GridVertex, usize, usize)>>,
) -> Result<Solution> {
    let lengths = instance.lengths();
    let corner = GridVertex(lengths.clone());
    let cap: usize = lengths.iter().sum::<usize>() + 1;
    let mut layers = vec![Frontier::initial(lengths.len())];
    let mut stats = SolveStats {
        max_frontier: 1,
        ..SolveStats::default()
    };
    loop {
        let prev = layers.last().expect("non-empty");
        if prev.vertices.contains(&corner) {
            return Ok(finish(instance, &layers, stats));
        }
        if prev.step >= cap {
            return Err(Error::Infeasible(format!("no cover within {cap} steps")));
        }
        meter.check()?;
        stats.expanded += prev.vertices.len();
        let candidates = expand(prev, &mut meter)?;
        if candidates.is_empty() {
            return Err(Error::Infeasible("the frontier cannot advance".into()));
        }
        stats.candidates += candidates.len();
        let next = reduce(prev.step + 1, prev, candidates, filter);
        stats.max_frontier = stats.max_frontier.max(next.vertices.len());
        layers.push(next);
    }
}

/// Maximal targets `w >= v, w != v` whose segments jointly fulfil the
/// monotone decreasing criterion `criterion`. Fulfilment is downward closed
/// inside the box above `v`, so for each setting of the leading coordinates
/// the last coordinate is scanned upward until the criterion fails.
pub fn maximal_reachable_dependent(
    instance: &Instance,
    v: &GridVertex,
    criterion: usize,
) -> Result<Vec<GridVertex>> {
    let lengths = instance.lengths();
    if v.arity() != lengths.len() {
        return Err(Error::ArityMismatch {
            left: v.arity(),
            right: lengths.len(),
        });
    }
    let c = instance
        .criteria
        .get(criterion)
        .ok_or_else(|| Error::Precondition(format!("no criterion {criterion}")))?;
    if !c.flags().monotone_decreasing {
        return Err(Error::FlagViolation {
            criterion: c.id().to_string(),
            required: "monotone decreasing",
        });
    }
    let mut meter = crate::resources::Budget::unlimited().meter();
    dependent_targets(instance, v, criterion, &lengths, &mut meter)
}

fn dependent_targets(
    instance: &Instance,
    v: &GridVertex,
    criterion: usize,
    lengths: &[usize],
    meter: &mut Meter,
) -> Result<Vec<GridVertex>> {
    let m = lengths.len();
    let last = m - 1;
    let holds = |w: &GridVertex| w == v || edge_holds(instance, v, w, criterion);
    let mut out = Vec::new();
    let mut scan = |prefix: &GridVertex, meter: &mut Meter| -> Result<()> {
        let mut w = prefix.clone();
        w.0[last] = v.0[last];
        meter.tick()?;
        if !holds(&w) {
            return Ok(());
        }
        while w.0[last] < lengths[last] {
            w.0[last] += 1;
            meter.tick()?;
            if !holds(&w) {
                w.0[last] -= 1;
                break;
            }
        }
        if w != *v {
            out.push(w);
        }
        Ok(())
    };
    scan(v, meter)?;
    if m > 1 {
        let mut hi = lengths.to_vec();
        hi[last] = v.0[last];
        let mut err = None;
        for_each_above(v, &hi, |prefix| {
            if err.is_none() {
                if let Err(e) = scan(prefix, meter) {
                    err = Some(e);
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(maximal_set_unchecked(out))
}

pub fn solve_frontier_dependent(instance: &Instance) -> Result<Solution> {
    solve_frontier_dependent_with(instance, &SolveOptions::default())
}

/// Frontier search when some monotone criteria are dependent. Independent
/// criteria still use the greedy advance.
pub fn solve_frontier_dependent_with(instance: &Instance, opts: &SolveOptions) -> Result<Solution> {
    instance.require_monotone()?;
    let reach = ReachTables::build_available(instance);
    if let Some(gap) = first_uncovered(instance, Some(&reach)) {
        return Err(uncovered_error(instance, gap));
    }
    let lengths = instance.lengths();
    let mut filter = Filter::new(opts.filter, &lengths, opts.dense_cap)?;
    let meter = opts.budget.meter();
    let k = instance.criteria.len();
    run(instance, meter, &mut filter, |prev, meter| {
        let mut out = Vec::new();
        for (p, v) in prev.vertices.iter().enumerate() {
            for c in 0..k {
                if reach.has(c) {
                    let w = reach.advance_unchecked(v, c);
                    if w != *v {
                        out.push((w, c, p));
                    }
                } else {
                    for w in dependent_targets(instance, v, c, &lengths, meter)? {
                        out.push((w, c, p));
                    }
                }
            }
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::label_criterion;
    use crate::criterion::{Criterion, CriterionDescriptor, CriterionFlags, SegmentFn};
    use crate::model::StateSequence;

    fn chars(id: &str, s: &str) -> StateSequence {
        let v: Vec<String> = s.chars().map(String::from).collect();
        StateSequence::from_labels(id, &v).unwrap()
    }

    fn gv(c: &[usize]) -> GridVertex {
        GridVertex(c.to_vec())
    }

    #[test]
    fn greedy_advance_examples() {
        let inst = Instance::new(
            vec![chars("x", "aab"), chars("y", "bba")],
            vec![label_criterion("a"), label_criterion("b")],
        )
        .unwrap();
        assert_eq!(greedy_advance(&inst, &gv(&[0, 0]), 0).unwrap(), gv(&[2, 0]));
        assert_eq!(greedy_advance(&inst, &gv(&[0, 0]), 1).unwrap(), gv(&[0, 2]));
        assert_eq!(greedy_advance(&inst, &gv(&[2, 2]), 0).unwrap(), gv(&[2, 3]));
        let reach = ReachTables::build(&inst).unwrap();
        assert_eq!(
            reach.advance(&gv(&[1, 1]), 1).unwrap(),
            greedy_advance(&inst, &gv(&[1, 1]), 1).unwrap()
        );
    }

    #[test]
    fn first_layer() {
        let inst = Instance::new(
            vec![chars("x", "aab"), chars("y", "bba")],
            vec![label_criterion("a"), label_criterion("b")],
        )
        .unwrap();
        let reach = ReachTables::build(&inst).unwrap();
        let (f1, n) = next_frontier(&reach, &Frontier::initial(2), FilterMode::Pairwise).unwrap();
        assert_eq!(n, 2);
        assert_eq!(f1.vertices, vec![gv(&[0, 2]), gv(&[2, 0])]);
        assert_eq!(f1.parents, vec![Some((1, 0)), Some((0, 0))]);
    }

    #[test]
    fn solves_two_sequences() {
        let inst = Instance::new(
            vec![chars("x", "aab"), chars("y", "bba")],
            vec![label_criterion("a"), label_criterion("b")],
        )
        .unwrap();
        let sol = solve_frontier_independent(&inst).unwrap();
        assert_eq!(
            sol.fd_size(),
            crate::exact::solve_exact(&inst).unwrap().fd_size()
        );
        assert_eq!(sol.fd_size(), 5);
    }

    #[test]
    fn rejects_non_monotone() {
        use crate::criteria::{table_criterion, TableMatch};
        let inst = Instance::new(
            vec![chars("x", "a")],
            vec![table_criterion("t", "t", Default::default(), TableMatch::Exact).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            solve_frontier_independent(&inst),
            Err(Error::FlagViolation { .. })
        ));
    }

    fn budget_criterion(total: usize) -> Criterion {
        Criterion::segment(
            CriterionDescriptor::new("budget", "budget", CriterionFlags::MONOTONE_DEPENDENT)
                .unwrap(),
            SegmentFn(move |_: &[StateSequence], segs: &[SegmentRef]| {
                segs.iter().map(SegmentRef::len).sum::<usize>() <= total
            }),
        )
    }

    #[test]
    fn dependent_staircase() {
        let inst = Instance::new(
            vec![chars("x", "aaa"), chars("y", "aaa")],
            vec![budget_criterion(3)],
        )
        .unwrap();
        let got = maximal_reachable_dependent(&inst, &gv(&[0, 0]), 0).unwrap();
        assert_eq!(
            got,
            vec![gv(&[0, 3]), gv(&[1, 2]), gv(&[2, 1]), gv(&[3, 0])]
        );
        let got = maximal_reachable_dependent(&inst, &gv(&[2, 2]), 0).unwrap();
        assert_eq!(got, vec![gv(&[3, 3])]);
    }

    #[test]
    fn dependent_solve_matches_exact() {
        let inst = Instance::new(
            vec![chars("x", "aaa"), chars("y", "aaaa")],
            vec![budget_criterion(3)],
        )
        .unwrap();
        let sol = solve_frontier_dependent(&inst).unwrap();
        assert_eq!(sol.fd_size(), 5);
        assert_eq!(crate::exact::solve_exact(&inst).unwrap().fd_size(), 5);
    }

    #[test]
    fn marking_grid_filter_agrees() {
        let inst = Instance::new(
            vec![chars("x", "abab"), chars("y", "bbaa"), chars("z", "aabb")],
            vec![label_criterion("a"), label_criterion("b")],
        )
        .unwrap();
        let opts = SolveOptions {
            filter: FilterMode::MarkingGrid,
            ..SolveOptions::default()
        };
        let a = solve_frontier_independent(&inst).unwrap();
        let b = solve_frontier_independent_with(&inst, &opts).unwrap();
        assert_eq!(a.fd_size(), b.fd_size());
        assert_eq!(a.certificates, b.certificates);
    }
}
