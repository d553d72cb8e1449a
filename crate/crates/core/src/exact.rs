//! Exact search over the prefix graph for arbitrary criteria.
//!
//! Vertex `(x_1, …, x_m)` records how many states of each sequence are
//! covered. An edge labelled `c` joins `v` to any `w >= v, w != v` whose
//! non-empty segments `x_i..w_i` jointly fulfil `c`; a virtual target hangs
//! off the corner `(n_1, …, n_m)`. A shortest path with `L` labelled edges
//! yields a diagram of `L + 2` nodes.

use std::collections::{HashMap, VecDeque};

use petgraph::graph::{DiGraph, NodeIndex};

use crate::criteria::ReachTables;
use crate::criterion::Instance;
use crate::diagram::{from_path, Step};
use crate::error::{Error, Result};
use crate::grid::GridVertex;
use crate::model::SegmentRef;
use crate::solve::{Solution, SolveOptions, SolveStats};

/// Whether the prefix graph has an edge `v -> w` labelled by `criterion`.
pub fn edge_label_valid(
    instance: &Instance,
    v: &GridVertex,
    w: &GridVertex,
    criterion: usize,
) -> Result<bool> {
    let lengths = instance.lengths();
    if v.arity() != lengths.len() || w.arity() != lengths.len() {
        return Err(Error::ArityMismatch {
            left: v.arity(),
            right: w.arity(),
        });
    }
    if !w.covers(v) || w == v {
        return Err(Error::Precondition(format!(
            "{w} must be coordinate-wise >= {v} and differ from it"
        )));
    }
    if w.0.iter().zip(&lengths).any(|(x, n)| x > n) {
        return Err(Error::Precondition(format!("{w} lies outside the grid")));
    }
    if criterion >= instance.criteria.len() {
        return Err(Error::Precondition(format!("no criterion {criterion}")));
    }
    Ok(edge_holds(instance, v, w, criterion))
}

pub(crate) fn segments_between(v: &GridVertex, w: &GridVertex) -> Vec<SegmentRef> {
    v.0.iter()
        .zip(&w.0)
        .enumerate()
        .filter(|(_, (a, b))| b > a)
        .map(|(j, (&a, &b))| SegmentRef::new(j, a, b))
        .collect()
}

pub(crate) fn edge_holds(
    instance: &Instance,
    v: &GridVertex,
    w: &GridVertex,
    criterion: usize,
) -> bool {
    let segs = segments_between(v, w);
    instance.criteria[criterion].fulfils(&instance.sequences, &segs)
}

/// Calls `f` on every vertex of the box `lo ..= hi` except `lo` itself, in
/// lexicographic order.
pub(crate) fn for_each_above(lo: &GridVertex, hi: &[usize], mut f: impl FnMut(&GridVertex)) {
    let mut cur = lo.clone();
    loop {
        let mut i = cur.0.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cur.0[i] < hi[i] {
                cur.0[i] += 1;
                break;
            }
            cur.0[i] = lo.0[i];
        }
        f(&cur);
    }
}

/// First `(sequence, position)` no criterion can cover. Only independent
/// criteria are consulted, so this is a necessary condition and returns
/// `None` whenever a dependent criterion is present.
pub(crate) fn first_uncovered(
    instance: &Instance,
    reach: Option<&ReachTables>,
) -> Option<(usize, usize)> {
    if instance.criteria.iter().any(|c| !c.flags().independent) {
        return None;
    }
    for (j, seq) in instance.sequences.iter().enumerate() {
        let n = seq.len();
        let mut covered = vec![false; n];
        for (ci, c) in instance.criteria.iter().enumerate() {
            if let Some(r) = reach.and_then(|r| r.reach(ci, j)) {
                for pos in 0..n {
                    covered[pos] |= r[pos] > pos;
                }
            } else if c.flags().monotone_decreasing {
                for (pos, slot) in covered.iter_mut().enumerate() {
                    *slot = *slot
                        || c.fulfils(&instance.sequences, &[SegmentRef::new(j, pos, pos + 1)]);
                }
            } else {
                for a in 0..n {
                    for b in a + 1..=n {
                        if covered[a..b].iter().all(|&x| x) {
                            continue;
                        }
                        if c.fulfils(&instance.sequences, &[SegmentRef::new(j, a, b)]) {
                            covered[a..b].iter_mut().for_each(|x| *x = true);
                        }
                    }
                }
            }
        }
        if let Some(pos) = covered.iter().position(|&x| !x) {
            return Some((j, pos));
        }
    }
    None
}

pub(crate) fn uncovered_error(instance: &Instance, (j, pos): (usize, usize)) -> Error {
    Error::Infeasible(format!(
        "state {} of sequence `{}` fulfils no criterion",
        pos + 1,
        instance.sequences[j].id
    ))
}

pub fn solve_exact(instance: &Instance) -> Result<Solution> {
    solve_exact_with(instance, &SolveOptions::default())
}

/// Breadth-first search from the origin. Successors are generated per
/// criterion in id order and, within a criterion, in lexicographic order of
/// the target, so certificates are deterministic.
pub fn solve_exact_with(instance: &Instance, opts: &SolveOptions) -> Result<Solution> {
    let lengths = instance.lengths();
    let m = lengths.len();
    let corner = GridVertex(lengths.clone());
    let prune = opts.prune_monotone && instance.all_monotone();
    let reach = ReachTables::build_available(instance);
    if let Some(gap) = first_uncovered(instance, Some(&reach)) {
        return Err(uncovered_error(instance, gap));
    }

    let mut meter = opts.budget.meter();
    let mut stats = SolveStats::default();
    let mut parent: HashMap<GridVertex, Option<(usize, GridVertex)>> = HashMap::new();
    let mut queue = VecDeque::new();
    let origin = GridVertex::origin(m);
    parent.insert(origin.clone(), None);
    queue.push_back(origin);

    while let Some(v) = queue.pop_front() {
        meter.tick()?;
        stats.expanded += 1;
        let mut found = None;
        for c in 0..instance.criteria.len() {
            let mut visit = |w: &GridVertex, stats: &mut SolveStats| {
                stats.candidates += 1;
                if parent.contains_key(w) {
                    return;
                }
                parent.insert(w.clone(), Some((c, v.clone())));
                if *w == corner {
                    found = Some(());
                }
                queue.push_back(w.clone());
            };
            if prune && reach.has(c) {
                let w = reach.advance_unchecked(&v, c);
                if w != v {
                    visit(&w, &mut stats);
                }
            } else {
                let mut err = None;
                for_each_above(&v, &lengths, |w| {
                    if err.is_some() {
                        return;
                    }
                    if let Err(e) = meter.tick() {
                        err = Some(e);
                        return;
                    }
                    if edge_holds(instance, &v, w, c) {
                        visit(w, &mut stats);
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
            if found.is_some() {
                break;
            }
        }
        stats.max_frontier = stats.max_frontier.max(queue.len());
        if found.is_some() {
            let steps = walk_back(&parent, &corner);
            stats.steps = steps.len();
            let (diagram, certificates) = from_path(instance, &steps);
            return Ok(Solution {
                diagram,
                certificates,
                stats,
            });
        }
    }
    Err(Error::Infeasible(
        "the corner of the prefix graph is unreachable".into(),
    ))
}

fn walk_back(
    parent: &HashMap<GridVertex, Option<(usize, GridVertex)>>,
    corner: &GridVertex,
) -> Vec<Step> {
    let mut steps = Vec::new();
    let mut cur = corner.clone();
    while let Some(Some((c, pred))) = parent.get(&cur) {
        steps.push(Step {
            criterion: *c,
            vertex: cur.clone(),
        });
        cur = pred.clone();
    }
    steps.reverse();
    steps
}

pub fn solve_reference(instance: &Instance) -> Result<Solution> {
    solve_reference_with(instance, &SolveOptions::default())
}

/// Materializes the whole prefix graph, parallel edges included, and runs a
/// textbook shortest-path search on it.
pub fn solve_reference_with(instance: &Instance, opts: &SolveOptions) -> Result<Solution> {
    let size = instance.grid_size();
    if size > opts.reference_cap {
        return Err(Error::CapExceeded {
            vertices: size,
            cap: opts.reference_cap,
        });
    }
    let lengths = instance.lengths();
    let m = lengths.len();
    let mut strides = vec![1usize; m];
    for i in (0..m.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * (lengths[i + 1] + 1);
    }
    let index = |v: &GridVertex| -> usize { v.0.iter().zip(&strides).map(|(c, s)| c * s).sum() };

    let mut meter = opts.budget.meter();
    let mut graph: DiGraph<GridVertex, usize> = DiGraph::with_capacity(size as usize + 1, 0);
    let mut all = vec![GridVertex::origin(m)];
    for_each_above(&GridVertex::origin(m), &lengths, |w| all.push(w.clone()));
    all.sort_by_key(|v| index(v));
    for v in &all {
        graph.add_node(v.clone());
    }
    let target = graph.add_node(GridVertex(vec![]));
    let mut stats = SolveStats::default();
    for v in &all {
        let from = NodeIndex::new(index(v));
        let mut err = None;
        for_each_above(v, &lengths, |w| {
            if err.is_some() {
                return;
            }
            for c in 0..instance.criteria.len() {
                if let Err(e) = meter.tick() {
                    err = Some(e);
                    return;
                }
                stats.candidates += 1;
                if edge_holds(instance, v, w, c) {
                    graph.add_edge(from, NodeIndex::new(index(w)), c);
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    let corner = NodeIndex::new(index(&GridVertex(lengths.clone())));
    graph.add_edge(corner, target, usize::MAX);

    let start = NodeIndex::new(0);
    let (_, path) = petgraph::algo::astar(&graph, start, |n| n == target, |_| 1usize, |_| 0)
        .ok_or_else(|| Error::Infeasible("the corner of the prefix graph is unreachable".into()))?;
    stats.expanded = graph.node_count();
    let mut steps = Vec::new();
    for w in path.windows(2) {
        if w[1] == target {
            break;
        }
        let criterion = graph
            .edges_connecting(w[0], w[1])
            .map(|e| *e.weight())
            .min()
            .expect("path edge exists");
        steps.push(Step {
            criterion,
            vertex: graph[w[1]].clone(),
        });
    }
    stats.steps = steps.len();
    let (diagram, certificates) = from_path(instance, &steps);
    Ok(Solution {
        diagram,
        certificates,
        stats,
    })
}
