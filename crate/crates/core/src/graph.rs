//! Undirected, unweighted simple graphs with dense integer node ids.
//!
//! Graphs are ingested from whitespace-separated edge lists. Node labels are
//! arbitrary strings; they are mapped to dense ids `0..n-1` in order of first
//! appearance and the original labels are kept for reporting.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

/// Dense node identifier, `0..n-1` within one [`Graph`].
pub type NodeId = u32;

/// Errors raised while reading an edge list.
#[derive(Debug, Error)]
pub enum EdgeListError {
    /// A non-comment line did not contain exactly two tokens.
    #[error("line {line}: expected two whitespace-separated node labels, found {found} token(s)")]
    MalformedLine { line: usize, found: usize },
    /// An edge connected a node to itself.
    #[error("line {line}: self-loop on node {label:?} is not allowed")]
    SelfLoop { line: usize, label: String },
}

/// An undirected simple graph: no self-loops, no parallel edges, no weights.
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Graph {
    fn build(labels: Vec<String>, edge_set: BTreeSet<(NodeId, NodeId)>) -> Self {
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as NodeId))
            .collect();
        let mut adjacency = vec![Vec::new(); labels.len()];
        for &(a, b) in &edge_set {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }
        Graph {
            labels,
            index,
            adjacency,
            edges: edge_set.into_iter().collect(),
        }
    }

    /// Builds a graph over nodes `0..n` from id pairs. Labels are the decimal
    /// ids. Duplicate edges are collapsed silently.
    ///
    /// Panics on self-loops or ids outside `0..n`; intended for
    /// programmatic construction where the caller controls the input.
    pub fn from_edge_ids(n: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let mut edge_set = BTreeSet::new();
        for &(a, b) in edges {
            assert!(a != b, "self-loop on node {a}");
            assert!(
                (a as usize) < n && (b as usize) < n,
                "edge ({a}, {b}) out of range for {n} nodes"
            );
            edge_set.insert((a.min(b), a.max(b)));
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::build(labels, edge_set)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized `(low, high)` id pairs in ascending order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Neighbor ids of `i` in ascending order.
    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.adjacency[i as usize]
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.adjacency[i as usize].len()
    }

    /// Degrees indexed by node id. The sum equals `2 * edge_count()`.
    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.adjacency[i as usize].binary_search(&j).is_ok()
    }

    /// Original label of node `i`.
    pub fn label(&self, i: NodeId) -> &str {
        &self.labels[i as usize]
    }

    /// Id for an original label, if the label occurs in the graph.
    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Serializes the graph back to edge-list text, one `label label` line
    /// per edge in ascending id order.
    ///
    /// Isolated nodes cannot be represented in an edge list; graphs that came
    /// from [`parse_edge_list`] never contain any.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(a, b) in &self.edges {
            out.push_str(self.label(a));
            out.push(' ');
            out.push_str(self.label(b));
            out.push('\n');
        }
        out
    }
}

/// Two graphs are equal when they have the same labels and the same edges
/// between those labels, regardless of internal id assignment.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        if self.node_count() != other.node_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let mut map = Vec::with_capacity(self.node_count());
        for label in &self.labels {
            match other.node_id(label) {
                Some(id) => map.push(id),
                None => return false,
            }
        }
        self.edges
            .iter()
            .all(|&(a, b)| other.has_edge(map[a as usize], map[b as usize]))
    }
}

impl Eq for Graph {}

/// Result of [`parse_edge_list`]: the graph plus how many duplicate edges
/// were collapsed while reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedEdgeList {
    pub graph: Graph,
    pub duplicate_edges: usize,
}

/// Parses edge-list text: one edge per line as two whitespace-separated node
/// labels. Blank lines and lines starting with `#` or `%` are skipped.
/// Duplicate edges (in either orientation) are collapsed and counted.
///
/// ```
/// let parsed = commetric_core::parse_edge_list("a b\nb c\nc a\n").unwrap();
/// assert_eq!(parsed.graph.node_count(), 3);
/// assert_eq!(parsed.graph.edge_count(), 3);
/// assert_eq!(parsed.graph.degree_sequence(), vec![2, 2, 2]);
/// ```
pub fn parse_edge_list(text: &str) -> Result<ParsedEdgeList, EdgeListError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut edge_set: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    let mut duplicate_edges = 0;

    let mut intern = |token: &str, labels: &mut Vec<String>| -> NodeId {
        if let Some(&id) = index.get(token) {
            return id;
        }
        let id = labels.len() as NodeId;
        labels.push(token.to_string());
        index.insert(token.to_string(), id);
        id
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(EdgeListError::MalformedLine {
                    line: lineno + 1,
                    found: line.split_whitespace().count(),
                });
            }
        };
        if a == b {
            return Err(EdgeListError::SelfLoop {
                line: lineno + 1,
                label: a.to_string(),
            });
        }
        let ia = intern(a, &mut labels);
        let ib = intern(b, &mut labels);
        if !edge_set.insert((ia.min(ib), ia.max(ib))) {
            duplicate_edges += 1;
        }
    }

    Ok(ParsedEdgeList {
        graph: Graph::build(labels, edge_set),
        duplicate_edges,
    })
}
