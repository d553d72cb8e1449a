//! Checks a diagram against an instance using per-sequence certificates.
//!
//! The checks run in a fixed order and the first failure is reported:
//! diagram structure, then per certificate (a) the path exists from `s` to
//! `t` and its node criteria match the segmentation, (b) the segmentation
//! covers its sequence with abutting non-empty segments, then (c) every
//! labelled node's segments jointly fulfil its criterion, and finally (d)
//! edge weights equal certificate traversal counts.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use thiserror::Error;

use crate::criterion::Instance;
use crate::diagram::{FlowDiagram, NodeId};
use crate::model::{Certificate, SegmentRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("malformed diagram: {0}")]
    Structure(String),

    #[error("no certificate for sequence `{seq_id}`")]
    MissingCertificate { seq_id: String },

    #[error("certificate for unknown or repeated sequence `{seq_id}`")]
    UnexpectedCertificate { seq_id: String },

    #[error("path of `{seq_id}` does not run from s to t through {parts} labelled nodes")]
    PathShape { seq_id: String, parts: usize },

    #[error("path of `{seq_id}` uses missing edge {from} -> {to}")]
    MissingEdge {
        seq_id: String,
        from: NodeId,
        to: NodeId,
    },

    #[error("criterion mismatch on `{seq_id}` at node {node}: node has `{node_criterion}`, segment claims `{segment_criterion}`")]
    CriterionMismatch {
        seq_id: String,
        node: NodeId,
        node_criterion: String,
        segment_criterion: String,
    },

    #[error("segmentation of `{seq_id}` is empty")]
    EmptySegmentation { seq_id: String },

    #[error("empty segment {start}..{end} in `{seq_id}`")]
    EmptySegment {
        seq_id: String,
        start: usize,
        end: usize,
    },

    #[error("coverage gap in `{seq_id}`: segment {part} starts at {found}, expected {expected}")]
    CoverageGap {
        seq_id: String,
        part: usize,
        expected: usize,
        found: usize,
    },

    #[error("segmentation of `{seq_id}` ends at {found}, sequence has {len} states")]
    IncompleteCoverage {
        seq_id: String,
        found: usize,
        len: usize,
    },

    #[error("segments at node {node} do not fulfil `{criterion}`")]
    Unfulfilled { node: NodeId, criterion: String },

    #[error("edge {from} -> {to} has weight {declared}, {counted} certificates traverse it")]
    EdgeWeight {
        from: NodeId,
        to: NodeId,
        declared: usize,
        counted: usize,
    },
}

fn structure(msg: impl Into<String>) -> Violation {
    Violation::Structure(msg.into())
}

fn check_structure(fd: &FlowDiagram, instance: &Instance) -> Result<(), Violation> {
    let mut ids = HashSet::new();
    for n in &fd.nodes {
        if !ids.insert(n.id) {
            return Err(structure(format!("duplicate node id {}", n.id)));
        }
        let terminal = n.id == fd.source || n.id == fd.sink;
        match (&n.criterion, terminal) {
            (Some(_), true) => return Err(structure("source or sink carries a criterion")),
            (None, false) => return Err(structure(format!("node {} has no criterion", n.id))),
            (Some(c), false) if instance.criterion_index(c).is_none() => {
                return Err(structure(format!(
                    "node {} uses unknown criterion `{c}`",
                    n.id
                )))
            }
            _ => {}
        }
    }
    if fd.source == fd.sink || !ids.contains(&fd.source) || !ids.contains(&fd.sink) {
        return Err(structure("source and sink must be distinct existing nodes"));
    }
    let mut out: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    let mut inc: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    let mut seen = HashSet::new();
    for e in &fd.edges {
        if !ids.contains(&e.from) || !ids.contains(&e.to) {
            return Err(structure(format!(
                "edge {} -> {} has unknown endpoint",
                e.from, e.to
            )));
        }
        if !seen.insert((e.from, e.to)) {
            return Err(structure(format!("duplicate edge {} -> {}", e.from, e.to)));
        }
        out.entry(e.from).or_default().push(e.to);
        inc.entry(e.to).or_default().push(e.from);
    }
    if inc.contains_key(&fd.source) {
        return Err(structure("source has incoming edges"));
    }
    if out.contains_key(&fd.sink) {
        return Err(structure("sink has outgoing edges"));
    }

    // Kahn's algorithm.
    let mut indeg: HashMap<NodeId, usize> = ids
        .iter()
        .map(|&id| (id, inc.get(&id).map_or(0, Vec::len)))
        .collect();
    let mut queue: VecDeque<NodeId> = indeg
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&id, _)| id)
        .collect();
    let mut visited = 0;
    while let Some(u) = queue.pop_front() {
        visited += 1;
        for &v in out.get(&u).into_iter().flatten() {
            let d = indeg.get_mut(&v).expect("endpoint checked");
            *d -= 1;
            if *d == 0 {
                queue.push_back(v);
            }
        }
    }
    if visited != ids.len() {
        return Err(structure("diagram has a cycle"));
    }

    let from_source = reach(fd.source, &out);
    let to_sink = reach(fd.sink, &inc);
    if let Some(n) = fd
        .nodes
        .iter()
        .find(|n| !(from_source.contains(&n.id) && to_sink.contains(&n.id)))
    {
        return Err(structure(format!("node {} lies on no s-t path", n.id)));
    }
    Ok(())
}

fn reach(start: NodeId, adj: &HashMap<NodeId, Vec<NodeId>>) -> HashSet<NodeId> {
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in adj.get(&u).into_iter().flatten() {
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen
}

/// Returns `Ok(())` iff the diagram, with these certificates, represents a
/// valid segmentation of every sequence of `instance`.
pub fn validate(
    fd: &FlowDiagram,
    instance: &Instance,
    certificates: &[Certificate],
) -> Result<(), Violation> {
    check_structure(fd, instance)?;

    let edges: HashSet<(NodeId, NodeId)> = fd.edges.iter().map(|e| (e.from, e.to)).collect();
    let node_criterion: HashMap<NodeId, &str> = fd
        .nodes
        .iter()
        .filter_map(|n| n.criterion.as_deref().map(|c| (n.id, c)))
        .collect();

    let mut by_seq: HashMap<&str, &Certificate> = HashMap::new();
    for cert in certificates {
        let id = cert.segmentation.seq_id.as_str();
        if instance.sequence_index(id).is_none() || by_seq.insert(id, cert).is_some() {
            return Err(Violation::UnexpectedCertificate {
                seq_id: id.to_string(),
            });
        }
    }

    let mut assigned: BTreeMap<NodeId, Vec<SegmentRef>> = BTreeMap::new();
    let mut traversals: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    for (j, seq) in instance.sequences.iter().enumerate() {
        let seq_id = seq.id.clone();
        let cert = by_seq
            .get(seq.id.as_str())
            .ok_or_else(|| Violation::MissingCertificate {
                seq_id: seq_id.clone(),
            })?;
        let parts = &cert.segmentation.parts;
        let path = &cert.path;

        // (a) path
        if path.len() != parts.len() + 2
            || path.first() != Some(&fd.source)
            || path.last() != Some(&fd.sink)
        {
            return Err(Violation::PathShape {
                seq_id,
                parts: parts.len(),
            });
        }
        for w in path.windows(2) {
            if !edges.contains(&(w[0], w[1])) {
                return Err(Violation::MissingEdge {
                    seq_id,
                    from: w[0],
                    to: w[1],
                });
            }
            *traversals.entry((w[0], w[1])).or_default() += 1;
        }
        for (part, &node) in parts.iter().zip(&path[1..]) {
            let node_criterion = node_criterion.get(&node).copied().unwrap_or("");
            if node_criterion != part.criterion {
                return Err(Violation::CriterionMismatch {
                    seq_id,
                    node,
                    node_criterion: node_criterion.to_string(),
                    segment_criterion: part.criterion.clone(),
                });
            }
        }

        // (b) segmentation
        if parts.is_empty() {
            return Err(Violation::EmptySegmentation { seq_id });
        }
        let mut cursor = 0;
        for (i, part) in parts.iter().enumerate() {
            if part.start != cursor {
                return Err(Violation::CoverageGap {
                    seq_id,
                    part: i,
                    expected: cursor,
                    found: part.start,
                });
            }
            if part.end <= part.start {
                return Err(Violation::EmptySegment {
                    seq_id,
                    start: part.start,
                    end: part.end,
                });
            }
            if part.end > seq.len() {
                return Err(Violation::IncompleteCoverage {
                    seq_id,
                    found: part.end,
                    len: seq.len(),
                });
            }
            cursor = part.end;
        }
        if cursor != seq.len() {
            return Err(Violation::IncompleteCoverage {
                seq_id,
                found: cursor,
                len: seq.len(),
            });
        }
        for (part, &node) in parts.iter().zip(&path[1..]) {
            assigned
                .entry(node)
                .or_default()
                .push(SegmentRef::new(j, part.start, part.end));
        }
    }

    // (c) joint fulfilment per labelled node
    for (node, segments) in &assigned {
        let id = node_criterion[node];
        let criterion = &instance.criteria[instance.criterion_index(id).expect("checked")];
        if !criterion.fulfils(&instance.sequences, segments) {
            return Err(Violation::Unfulfilled {
                node: *node,
                criterion: id.to_string(),
            });
        }
    }

    // (d) weights
    for e in &fd.edges {
        let counted = traversals.get(&(e.from, e.to)).copied().unwrap_or(0);
        if counted != e.weight {
            return Err(Violation::EdgeWeight {
                from: e.from,
                to: e.to,
                declared: e.weight,
                counted,
            });
        }
    }
    Ok(())
}
