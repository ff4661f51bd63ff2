//! Immutable simple undirected graphs and vertex partitions.
//!
//! Graphs are built once from an edge list and never mutated afterwards, so
//! they can be shared freely across concurrent annealing runs. Vertices are
//! addressed by dense indices `0..n`; the original string labels are kept for
//! round-tripping the text formats.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

/// Errors raised while constructing or parsing a graph.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("edge list is empty")]
    EmptyEdgeList,
    #[error("line {line}: expected two whitespace-separated labels, found {tokens} token(s)")]
    MalformedLine { line: usize, tokens: usize },
}

/// Errors raised while parsing a partition file against a graph.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("line {line}: expected `label community_id`, found {tokens} token(s)")]
    MalformedLine { line: usize, tokens: usize },
    #[error("line {line}: cannot parse community id `{value}`")]
    BadCommunityId { line: usize, value: String },
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
    #[error("vertex `{0}` assigned more than once")]
    DuplicateVertex(String),
    #[error("uncovered vertex `{0}`")]
    UncoveredVertex(String),
    #[error("partition covers {got} vertices, graph has {expected}")]
    SizeMismatch { got: usize, expected: usize },
}

/// Immutable simple undirected graph with dense vertex indices.
///
/// Invariants, established at construction and never broken afterwards:
/// adjacency is symmetric, there are no self-loops or parallel edges,
/// `sum(degree) == 2m`, and labels map bijectively onto `0..n`.
#[derive(Debug, Clone)]
pub struct Graph {
    labels: Vec<String>,
    index_of: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    edge_count: usize,
}

/// A freshly built graph together with ingestion statistics.
#[derive(Debug)]
pub struct GraphBuild {
    pub graph: Graph,
    /// Number of input edges dropped because an identical edge was already present.
    pub duplicates_collapsed: usize,
}

impl Graph {
    /// Builds a graph from labelled edges. Vertex indices are assigned in
    /// first-appearance order; duplicate edges are collapsed and counted.
    pub fn build_graph<I, S>(edges: I) -> Result<GraphBuild, GraphError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut labels: Vec<String> = Vec::new();
        let mut index_of: HashMap<String, usize> = HashMap::new();
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut duplicates = 0usize;

        let intern = |label: &str, labels: &mut Vec<String>, index_of: &mut HashMap<String, usize>| {
            match index_of.entry(label.to_owned()) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    let idx = labels.len();
                    labels.push(label.to_owned());
                    e.insert(idx);
                    idx
                }
            }
        };

        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            if a == b {
                return Err(GraphError::SelfLoop(a.to_owned()));
            }
            let u = intern(a, &mut labels, &mut index_of);
            let v = intern(b, &mut labels, &mut index_of);
            let key = (u.min(v), u.max(v));
            if seen.insert(key) {
                pairs.push(key);
            } else {
                duplicates += 1;
            }
        }
        if pairs.is_empty() {
            return Err(GraphError::EmptyEdgeList);
        }

        let graph = Self::assemble(labels, index_of, pairs);
        Ok(GraphBuild {
            graph,
            duplicates_collapsed: duplicates,
        })
    }

    /// Builds a graph on `n` vertices labelled `"0".."n-1"` from index pairs.
    ///
    /// Used by the generators, which know the vertex count up front; unlike
    /// the edge-list format this keeps isolated vertices. Edges must be
    /// deduplicated, loop-free and in range — violations are bugs in the
    /// caller, not input errors.
    pub(crate) fn from_index_edges(n: usize, edges: Vec<(usize, usize)>) -> Graph {
        Self::from_labeled_index_edges((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub(crate) fn from_labeled_index_edges(labels: Vec<String>, edges: Vec<(usize, usize)>) -> Graph {
        let n = labels.len();
        assert!(n > 0 && !edges.is_empty());
        let index_of = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let pairs = edges
            .into_iter()
            .map(|(u, v)| {
                debug_assert!(u != v && u < n && v < n);
                (u.min(v), u.max(v))
            })
            .collect();
        Self::assemble(labels, index_of, pairs)
    }

    fn assemble(
        labels: Vec<String>,
        index_of: HashMap<String, usize>,
        pairs: Vec<(usize, usize)>,
    ) -> Graph {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &pairs {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let degrees: Vec<usize> = adjacency.iter().map(Vec::len).collect();
        debug_assert_eq!(degrees.iter().sum::<usize>(), 2 * pairs.len());
        Graph {
            labels,
            index_of,
            adjacency,
            degrees,
            edge_count: pairs.len(),
        }
    }

    /// Parses the plain-text edge-list format: one `u v` pair per line,
    /// whitespace-delimited; `#` comment lines and blank lines are skipped.
    pub fn load_edge_list(text: &str) -> Result<GraphBuild, GraphError> {
        let mut edges: Vec<(String, String)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(GraphError::MalformedLine {
                    line: lineno + 1,
                    tokens: tokens.len(),
                });
            }
            edges.push((tokens[0].to_owned(), tokens[1].to_owned()));
        }
        Self::build_graph(edges)
    }

    /// Serializes to the edge-list format, one edge per line, endpoints in
    /// index order. Isolated vertices cannot be represented and are dropped.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for u in 0..self.vertex_count() {
            for &v in &self.adjacency[u] {
                if u < v {
                    let _ = writeln!(out, "{} {}", self.labels[u], self.labels[v]);
                }
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index_of.get(label).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Iterates every edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.adjacency[u]
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }
}

/// Assignment of every vertex to exactly one community.
///
/// Community indices are dense `0..k` with no empty community; `members` and
/// `assignment` are kept mutually consistent. A `Partition` is a value type:
/// cloning is O(n) and clones are independent.
#[derive(Debug, Clone)]
pub struct Partition {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
    /// position of vertex v inside members[assignment[v]], for O(1) removal
    slot: Vec<usize>,
}

/// What [`Partition::move_vertex`] did to community indices.
///
/// When a move empties its source community, the community with the highest
/// index is renumbered to fill the hole (swap-removal), which keeps indices
/// dense without touching anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveEffect {
    /// Community the vertex left.
    pub source: usize,
    /// Community the vertex now belongs to (post-renumbering).
    pub target: usize,
    /// `Some(old_index)` if the source was emptied and community `old_index`
    /// (the last one) was renumbered to `source`.
    pub renumbered_from: Option<usize>,
}

impl Partition {
    /// One community per vertex.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n).collect(),
            members: (0..n).map(|v| vec![v]).collect(),
            slot: vec![0; n],
        }
    }

    /// Builds a partition from an arbitrary per-vertex community labelling.
    /// Labels are renumbered densely in first-appearance order.
    pub fn from_assignment(raw: &[usize]) -> Partition {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for &c in raw {
            let next = remap.len();
            let dense = *remap.entry(c).or_insert(next);
            assignment.push(dense);
        }
        let k = remap.len();
        let mut members = vec![Vec::new(); k];
        let mut slot = vec![0; raw.len()];
        for (v, &c) in assignment.iter().enumerate() {
            slot[v] = members[c].len();
            members[c].push(v);
        }
        Partition {
            assignment,
            members,
            slot,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    /// Number of (non-empty) communities.
    pub fn community_count(&self) -> usize {
        self.members.len()
    }

    pub fn community_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn members(&self, c: usize) -> &[usize] {
        &self.members[c]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Community sizes, in community-index order.
    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Moves `v` into community `target`; `target == community_count()` means
    /// a fresh singleton community. An emptied source community is pruned
    /// immediately by swap-removal so indices stay dense.
    pub fn move_vertex(&mut self, v: usize, target: usize) -> MoveEffect {
        let source = self.assignment[v];
        let k = self.members.len();
        assert!(target <= k, "target community out of range");
        if target == source {
            return MoveEffect {
                source,
                target,
                renumbered_from: None,
            };
        }

        // detach v from its source community
        let s = self.slot[v];
        self.members[source].swap_remove(s);
        if let Some(&moved) = self.members[source].get(s) {
            self.slot[moved] = s;
        }

        // attach to target (possibly fresh)
        let mut target = target;
        if target == k {
            self.members.push(Vec::new());
        }
        self.slot[v] = self.members[target].len();
        self.members[target].push(v);
        self.assignment[v] = target;

        // prune the source if it emptied
        let mut renumbered_from = None;
        if self.members[source].is_empty() {
            let last = self.members.len() - 1;
            self.members.swap_remove(source);
            if source != last {
                for i in 0..self.members[source].len() {
                    let u = self.members[source][i];
                    self.assignment[u] = source;
                }
                renumbered_from = Some(last);
                if target == last {
                    target = source;
                }
            }
        }
        MoveEffect {
            source,
            target,
            renumbered_from,
        }
    }

    /// Community labels renumbered in first-appearance order — equal for two
    /// partitions iff they define the same division of the vertex set.
    pub fn canonical_assignment(&self) -> Vec<usize> {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        self.assignment
            .iter()
            .map(|&c| {
                let next = remap.len();
                *remap.entry(c).or_insert(next)
            })
            .collect()
    }

    /// True if both partitions define the same division, ignoring community
    /// numbering.
    pub fn same_division(&self, other: &Partition) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.canonical_assignment() == other.canonical_assignment()
    }

    /// Checks internal consistency; used by debug assertions and tests.
    pub fn check_invariants(&self) -> bool {
        let n = self.assignment.len();
        if self.slot.len() != n {
            return false;
        }
        let mut covered = 0usize;
        for (c, list) in self.members.iter().enumerate() {
            if list.is_empty() {
                return false;
            }
            covered += list.len();
            for (i, &v) in list.iter().enumerate() {
                if v >= n || self.assignment[v] != c || self.slot[v] != i {
                    return false;
                }
            }
        }
        covered == n
    }
}

/// One community per vertex — the annealer's canonical starting point.
pub fn singleton_partition(g: &Graph) -> Partition {
    Partition::singletons(g.vertex_count())
}

/// Parses the partition format: one `label community_id` pair per line
/// (`#` comments and blank lines skipped). Every vertex of `g` must be
/// covered exactly once; community ids are renumbered densely.
pub fn load_partition(text: &str, g: &Graph) -> Result<Partition, PartitionError> {
    let n = g.vertex_count();
    let mut raw: Vec<Option<u64>> = vec![None; n];
    let mut covered = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(PartitionError::MalformedLine {
                line: lineno + 1,
                tokens: tokens.len(),
            });
        }
        let v = g
            .index_of(tokens[0])
            .ok_or_else(|| PartitionError::UnknownLabel(tokens[0].to_owned()))?;
        let cid: u64 = tokens[1].parse().map_err(|_| PartitionError::BadCommunityId {
            line: lineno + 1,
            value: tokens[1].to_owned(),
        })?;
        if raw[v].is_some() {
            return Err(PartitionError::DuplicateVertex(g.label(v).to_owned()));
        }
        raw[v] = Some(cid);
        covered += 1;
    }
    if covered < n {
        let missing = raw.iter().position(Option::is_none).unwrap();
        return Err(PartitionError::UncoveredVertex(g.label(missing).to_owned()));
    }

    let mut remap: HashMap<u64, usize> = HashMap::new();
    let dense: Vec<usize> = raw
        .into_iter()
        .map(|c| {
            let c = c.unwrap();
            let next = remap.len();
            *remap.entry(c).or_insert(next)
        })
        .collect();
    Ok(Partition::from_assignment(&dense))
}

/// Serializes a partition of `g`: one `label community_id` line per vertex in
/// index order, with community ids canonicalized. Byte-deterministic, and
/// `load_partition(save_partition(p)) ` gives back the same division.
pub fn save_partition(p: &Partition, g: &Graph) -> String {
    assert_eq!(p.vertex_count(), g.vertex_count(), "partition/graph mismatch");
    let canonical = p.canonical_assignment();
    let mut out = String::new();
    for (v, c) in canonical.iter().enumerate() {
        let _ = writeln!(out, "{} {}", g.label(v), c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::build_graph([("a", "b"), ("b", "c"), ("c", "a")])
            .unwrap()
            .graph
    }

    #[test]
    fn triangle_counts() {
        let g = triangle();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!((0..3).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn duplicates_are_collapsed_and_counted() {
        let b = Graph::build_graph([("a", "b"), ("b", "a"), ("a", "b")]).unwrap();
        assert_eq!(b.graph.vertex_count(), 2);
        assert_eq!(b.graph.edge_count(), 1);
        assert_eq!(b.duplicates_collapsed, 2);
    }

    #[test]
    fn self_loop_rejected_with_label() {
        let err = Graph::build_graph([("a", "b"), ("x", "x")]).unwrap_err();
        assert_eq!(err, GraphError::SelfLoop("x".into()));
    }

    #[test]
    fn empty_edge_list_rejected() {
        let edges: [(&str, &str); 0] = [];
        assert_eq!(Graph::build_graph(edges).unwrap_err(), GraphError::EmptyEdgeList);
    }

    #[test]
    fn first_appearance_indexing() {
        let g = Graph::build_graph([("z", "m"), ("m", "a")]).unwrap().graph;
        assert_eq!(g.label(0), "z");
        assert_eq!(g.label(1), "m");
        assert_eq!(g.label(2), "a");
        assert_eq!(g.index_of("a"), Some(2));
    }

    #[test]
    fn edge_list_parsing() {
        let b = Graph::load_edge_list("1 2\n2 3\n").unwrap();
        assert_eq!(b.graph.vertex_count(), 3);
        assert_eq!(b.graph.edge_count(), 2);

        let b = Graph::load_edge_list("# c\na b\n\nb c\nc a\n").unwrap();
        assert_eq!(b.graph.vertex_count(), 3);
        assert_eq!(b.graph.edge_count(), 3);
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = Graph::load_edge_list("1 2 3\n").unwrap_err();
        assert_eq!(err, GraphError::MalformedLine { line: 1, tokens: 3 });

        let err = Graph::load_edge_list("# ok\na b\nc\n").unwrap_err();
        assert_eq!(err, GraphError::MalformedLine { line: 3, tokens: 1 });
    }

    #[test]
    fn handshake_identity() {
        let g = triangle();
        let total: usize = (0..g.vertex_count()).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = triangle();
        let again = Graph::load_edge_list(&g.to_edge_list()).unwrap().graph;
        assert_eq!(again.vertex_count(), g.vertex_count());
        assert_eq!(again.edge_count(), g.edge_count());
    }

    #[test]
    fn singleton_partition_has_n_communities() {
        let g = triangle();
        let p = singleton_partition(&g);
        assert_eq!(p.community_count(), 3);
        assert!(p.check_invariants());
    }

    #[test]
    fn partition_parse_and_renumber() {
        let g = triangle();
        let p = load_partition("a 0\nb 0\nc 1\n", &g).unwrap();
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.community_of(0), p.community_of(1));
        assert_ne!(p.community_of(0), p.community_of(2));

        // sparse ids {5, 9} collapse to {0, 1}
        let p = load_partition("a 5\nb 9\nc 5\n", &g).unwrap();
        assert_eq!(p.community_of(0), 0);
        assert_eq!(p.community_of(1), 1);
        assert_eq!(p.community_of(2), 0);
    }

    #[test]
    fn partition_parse_errors() {
        let g = triangle();
        assert_eq!(
            load_partition("a 0\nb 0\n", &g).unwrap_err(),
            PartitionError::UncoveredVertex("c".into())
        );
        assert_eq!(
            load_partition("a 0\nb 0\na 1\nc 0\n", &g).unwrap_err(),
            PartitionError::DuplicateVertex("a".into())
        );
        assert_eq!(
            load_partition("a 0\nb 0\nd 1\n", &g).unwrap_err(),
            PartitionError::UnknownLabel("d".into())
        );
        assert_eq!(
            load_partition("a x\n", &g).unwrap_err(),
            PartitionError::BadCommunityId { line: 1, value: "x".into() }
        );
    }

    #[test]
    fn save_load_round_trip() {
        let g = triangle();
        let p = load_partition("a 7\nb 3\nc 7\n", &g).unwrap();
        let text = save_partition(&p, &g);
        let q = load_partition(&text, &g).unwrap();
        assert!(p.same_division(&q));
        // saving is canonical, so a second round trip is byte-identical
        assert_eq!(text, save_partition(&q, &g));
    }

    #[test]
    fn move_vertex_prunes_empty_communities() {
        let g = triangle();
        let mut p = singleton_partition(&g);
        let eff = p.move_vertex(2, 0);
        assert!(p.check_invariants());
        assert_eq!(p.community_count(), 2);
        // community 2 (last) was emptied: no renumbering needed
        assert_eq!(eff.renumbered_from, None);

        let mut p = singleton_partition(&g);
        let eff = p.move_vertex(0, 2);
        assert!(p.check_invariants());
        assert_eq!(p.community_count(), 2);
        // community 0 emptied, old community 2 took index 0
        assert_eq!(eff.renumbered_from, Some(2));
        assert_eq!(eff.target, 0);
    }

    #[test]
    fn move_vertex_to_fresh_community() {
        let g = triangle();
        let mut p = load_partition("a 0\nb 0\nc 0\n", &g).unwrap();
        let k = p.community_count();
        p.move_vertex(1, k);
        assert!(p.check_invariants());
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.members(1), &[1]);
    }
}
