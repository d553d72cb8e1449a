//! Flow diagrams: node-labelled DAGs from a source `s` to a sink `t`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::criterion::Instance;
use crate::grid::GridVertex;
use crate::model::{Certificate, Part, Segmentation};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Display label: `s`, `t`, or the criterion name.
    pub label: String,
    /// Criterion id; `None` for the source and sink.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    /// Number of certificates traversing the edge.
    pub weight: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowDiagram {
    pub source: NodeId,
    pub sink: NodeId,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl FlowDiagram {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, from: NodeId, to: NodeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.from == from && e.to == to)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Labelled nodes only.
    pub fn criterion_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.criterion.is_some())
    }
}

/// Total node count, source and sink included.
pub fn fd_size(fd: &FlowDiagram) -> usize {
    fd.nodes.len()
}

/// One prefix-graph edge: the criterion labelling it and the vertex it
/// reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub criterion: usize,
    pub vertex: GridVertex,
}

/// Turns a prefix-graph path from the origin to the corner `(n_1, …, n_m)`
/// into a diagram with one labelled node per step, plus a certificate per
/// sequence. Nodes are numbered `s = 0`, steps `1..=L`, `t = L + 1`.
pub fn from_path(instance: &Instance, steps: &[Step]) -> (FlowDiagram, Vec<Certificate>) {
    let sink = steps.len() + 1;
    let mut nodes = Vec::with_capacity(steps.len() + 2);
    nodes.push(Node {
        id: 0,
        label: "s".into(),
        criterion: None,
    });
    for (i, step) in steps.iter().enumerate() {
        let c = &instance.criteria[step.criterion];
        nodes.push(Node {
            id: i + 1,
            label: c.name().to_string(),
            criterion: Some(c.id().to_string()),
        });
    }
    nodes.push(Node {
        id: sink,
        label: "t".into(),
        criterion: None,
    });

    let mut weights: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
    let mut certificates = Vec::with_capacity(instance.arity());
    for (j, seq) in instance.sequences.iter().enumerate() {
        let mut parts = Vec::new();
        let mut path = vec![0];
        let mut cursor = 0;
        for (i, step) in steps.iter().enumerate() {
            let x = step.vertex.0[j];
            if x > cursor {
                parts.push(Part {
                    start: cursor,
                    end: x,
                    criterion: instance.criteria[step.criterion].id().to_string(),
                });
                path.push(i + 1);
                cursor = x;
            }
        }
        path.push(sink);
        for w in path.windows(2) {
            *weights.entry((w[0], w[1])).or_default() += 1;
        }
        certificates.push(Certificate {
            segmentation: Segmentation {
                seq_id: seq.id.clone(),
                parts,
            },
            path,
        });
    }
    let edges = weights
        .into_iter()
        .map(|((from, to), weight)| Edge { from, to, weight })
        .collect();
    (
        FlowDiagram {
            source: 0,
            sink,
            nodes,
            edges,
        },
        certificates,
    )
}

/// Rendering options for [`to_dot`].
#[derive(Debug, Clone)]
pub struct DotOptions {
    /// Labels or criterion ids drawn with a grey fill.
    pub significant: BTreeSet<String>,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions {
            significant: ["SG", "SNG", "LB", "CFB"]
                .into_iter()
                .map(String::from)
                .collect(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Nodes are emitted in id order and edges in
/// `(from, to)` order, so the output is byte-stable.
pub fn to_dot(fd: &FlowDiagram, opts: &DotOptions) -> String {
    let mut out = String::new();
    out.push_str("digraph flow {\n    rankdir=LR;\n");
    let mut nodes: Vec<&Node> = fd.nodes.iter().collect();
    nodes.sort_by_key(|n| n.id);
    for n in nodes {
        let attrs = if n.id == fd.source {
            "shape=circle".to_string()
        } else if n.id == fd.sink {
            "shape=doublecircle".to_string()
        } else {
            let sig = opts.significant.contains(&n.label)
                || n.criterion
                    .as_ref()
                    .is_some_and(|c| opts.significant.contains(c));
            if sig {
                "shape=box, style=filled, fillcolor=grey80".to_string()
            } else {
                "shape=box".to_string()
            }
        };
        let _ = writeln!(
            out,
            "    n{} [label=\"{}\", {}];",
            n.id,
            escape(&n.label),
            attrs
        );
    }
    let mut edges: Vec<&Edge> = fd.edges.iter().collect();
    edges.sort_by_key(|e| (e.from, e.to));
    for e in edges {
        let _ = writeln!(
            out,
            "    n{} -> n{} [weight={}, label=\"{}\"];",
            e.from, e.to, e.weight, e.weight
        );
    }
    out.push_str("}\n");
    out
}
