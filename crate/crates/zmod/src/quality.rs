//! Exact and incremental evaluation of modularity `Q` and Z-modularity `Z`.
//!
//! Both functions are evaluated from four maintained aggregates — per-community
//! intra-edge counts `m_C`, per-community degree sums `D_C`, and their totals
//! `intra = Σ m_C` and `sq = Σ D_C²` — which are kept as exact integers so that
//! millions of incremental moves cannot drift. Floating point enters only in
//! the final closed forms:
//!
//! ```text
//! Q = intra/m − sq/(2m)²
//! Z = (intra/m − p) / sqrt(p(1−p)),   p = sq/(2m)²
//! ```
//!
//! `Q` is exactly the numerator of `Z`. The single-community division has
//! `p = 1`, where `Z` is defined as 0 by continuity (the numerator is `1 − p`
//! and `(1−p)/sqrt(p(1−p)) = sqrt((1−p)/p) → 0`). The same convention covers
//! the degenerate `p = 1` reached when all positive-degree vertices share one
//! community and the rest are isolated.

use crate::graph::{Graph, Partition};

/// Which quality function the optimizer maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Modularity,
    ZModularity,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::Modularity => "modularity",
            Objective::ZModularity => "zmodularity",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "modularity" | "q" | "Q" => Ok(Objective::Modularity),
            "zmodularity" | "z-modularity" | "z" | "Z" => Ok(Objective::ZModularity),
            other => Err(format!(
                "unknown objective `{other}` (expected `modularity` or `zmodularity`)"
            )),
        }
    }
}

/// Probability that a null-model edge lands inside a community:
/// `p = Σ (D_C/2m)²`, in (0, 1], equal to 1 only in the degenerate cases
/// described at the module level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullProbability(pub f64);

/// Destination of a vertex move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveTarget {
    Community(usize),
    /// A fresh singleton community.
    NewCommunity,
}

/// An evaluated-but-uncommitted vertex move: the objective deltas plus the
/// neighbor counts needed to commit in O(1).
#[derive(Debug, Clone, Copy)]
pub struct MoveProbe {
    pub vertex: usize,
    pub target: MoveTarget,
    pub delta_q: f64,
    pub delta_z: f64,
    links_source: u64,
    links_target: u64,
    noop: bool,
}

impl MoveProbe {
    pub fn delta(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Modularity => self.delta_q,
            Objective::ZModularity => self.delta_z,
        }
    }
}

/// An evaluated-but-uncommitted merge of two communities.
#[derive(Debug, Clone, Copy)]
pub struct MergeProbe {
    pub keep: usize,
    pub absorb: usize,
    pub delta_q: f64,
    pub delta_z: f64,
    links_between: u64,
}

impl MergeProbe {
    pub fn delta(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Modularity => self.delta_q,
            Objective::ZModularity => self.delta_z,
        }
    }
}

/// Maintained aggregates for one partition of one graph.
#[derive(Debug, Clone)]
pub struct QualityState<'g> {
    graph: &'g Graph,
    partition: Partition,
    comm_edges: Vec<u64>,
    comm_degrees: Vec<u64>,
    intra_edges: u64,
    sq_degree_sum: u64,
}

impl<'g> QualityState<'g> {
    /// Computes all aggregates from scratch in O(m + n).
    pub fn new(graph: &'g Graph, partition: Partition) -> QualityState<'g> {
        assert_eq!(
            partition.vertex_count(),
            graph.vertex_count(),
            "partition does not cover the graph"
        );
        let k = partition.community_count();
        let mut comm_edges = vec![0u64; k];
        let mut comm_degrees = vec![0u64; k];
        for (u, v) in graph.edges() {
            if partition.community_of(u) == partition.community_of(v) {
                comm_edges[partition.community_of(u)] += 1;
            }
        }
        for v in 0..graph.vertex_count() {
            comm_degrees[partition.community_of(v)] += graph.degree(v) as u64;
        }
        let intra_edges = comm_edges.iter().sum();
        let sq_degree_sum = comm_degrees.iter().map(|&d| d * d).sum();
        QualityState {
            graph,
            partition,
            comm_edges,
            comm_degrees,
            intra_edges,
            sq_degree_sum,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn into_partition(self) -> Partition {
        self.partition
    }

    pub fn community_count(&self) -> usize {
        self.partition.community_count()
    }

    pub fn intra_edges(&self) -> u64 {
        self.intra_edges
    }

    pub fn sq_degree_sum(&self) -> u64 {
        self.sq_degree_sum
    }

    pub fn community_edges(&self, c: usize) -> u64 {
        self.comm_edges[c]
    }

    pub fn community_degree(&self, c: usize) -> u64 {
        self.comm_degrees[c]
    }

    fn two_m(&self) -> u64 {
        2 * self.graph.edge_count() as u64
    }

    pub fn null_probability(&self) -> NullProbability {
        let two_m = self.two_m() as f64;
        NullProbability(self.sq_degree_sum as f64 / (two_m * two_m))
    }

    pub fn modularity(&self) -> f64 {
        q_from_aggregates(
            self.intra_edges,
            self.sq_degree_sum,
            self.graph.edge_count() as u64,
        )
    }

    pub fn z_modularity(&self) -> f64 {
        z_from_aggregates(
            self.intra_edges,
            self.sq_degree_sum,
            self.graph.edge_count() as u64,
        )
    }

    pub fn evaluate(&self, objective: Objective) -> f64 {
        match objective {
            Objective::Modularity => self.modularity(),
            Objective::ZModularity => self.z_modularity(),
        }
    }

    /// Counts v's neighbors in communities `a` and `b` in one adjacency scan.
    fn link_counts(&self, v: usize, a: usize, b: Option<usize>) -> (u64, u64) {
        let mut into_a = 0u64;
        let mut into_b = 0u64;
        for &u in self.graph.neighbors(v) {
            let c = self.partition.community_of(u);
            if c == a {
                into_a += 1;
            } else if Some(c) == b {
                into_b += 1;
            }
        }
        (into_a, into_b)
    }

    /// Evaluates moving `v` to `target` without committing. O(deg v).
    ///
    /// The Z delta is computed by re-evaluating the closed form on the updated
    /// totals — the denominator couples every community, so no local sum
    /// exists for it.
    pub fn probe_move(&self, v: usize, target: MoveTarget) -> MoveProbe {
        let source = self.partition.community_of(v);
        let noop = matches!(target, MoveTarget::Community(c) if c == source);
        if noop {
            return MoveProbe {
                vertex: v,
                target,
                delta_q: 0.0,
                delta_z: 0.0,
                links_source: 0,
                links_target: 0,
                noop: true,
            };
        }
        let target_comm = match target {
            MoveTarget::Community(c) => {
                assert!(c < self.partition.community_count(), "no such community");
                Some(c)
            }
            MoveTarget::NewCommunity => None,
        };
        let (links_source, links_target) = self.link_counts(v, source, target_comm);
        let deg = self.graph.degree(v) as u64;
        let m = self.graph.edge_count() as u64;

        let intra_after = self.intra_edges - links_source + links_target;
        let d_src = self.comm_degrees[source];
        let d_tgt = target_comm.map_or(0, |c| self.comm_degrees[c]);
        let mut sq_after = self.sq_degree_sum - d_src * d_src + (d_src - deg) * (d_src - deg);
        sq_after = sq_after - d_tgt * d_tgt + (d_tgt + deg) * (d_tgt + deg);

        MoveProbe {
            vertex: v,
            target,
            delta_q: q_from_aggregates(intra_after, sq_after, m) - self.modularity(),
            delta_z: z_from_aggregates(intra_after, sq_after, m) - self.z_modularity(),
            links_source,
            links_target,
            noop: false,
        }
    }

    /// Applies a probed move. O(1) beyond the partition bookkeeping.
    pub fn commit_move(&mut self, probe: &MoveProbe) {
        if probe.noop {
            return;
        }
        let v = probe.vertex;
        let source = self.partition.community_of(v);
        let deg = self.graph.degree(v) as u64;

        self.intra_edges = self.intra_edges - probe.links_source + probe.links_target;
        let d_src = self.comm_degrees[source];
        self.sq_degree_sum -= d_src * d_src;
        self.sq_degree_sum += (d_src - deg) * (d_src - deg);
        self.comm_edges[source] -= probe.links_source;
        self.comm_degrees[source] -= deg;

        let raw_target = match probe.target {
            MoveTarget::Community(c) => c,
            MoveTarget::NewCommunity => {
                self.comm_edges.push(0);
                self.comm_degrees.push(0);
                self.comm_degrees.len() - 1
            }
        };
        let d_tgt = self.comm_degrees[raw_target];
        self.sq_degree_sum -= d_tgt * d_tgt;
        self.sq_degree_sum += (d_tgt + deg) * (d_tgt + deg);
        self.comm_edges[raw_target] += probe.links_target;
        self.comm_degrees[raw_target] += deg;

        let effect = self.partition.move_vertex(v, raw_target);
        if effect.renumbered_from.is_some() {
            // mirror the partition's swap-removal in our parallel vectors
            self.comm_edges.swap_remove(effect.source);
            self.comm_degrees.swap_remove(effect.source);
        } else if self.comm_degrees.len() > self.partition.community_count() {
            // source was the last community and emptied: plain pop
            self.comm_edges.pop();
            self.comm_degrees.pop();
        }
        debug_assert_eq!(self.comm_edges.len(), self.partition.community_count());
    }

    /// Moves `v` to `target`, returning `(delta_q, delta_z)`. Moving a vertex
    /// to its own community is a no-op with zero deltas.
    pub fn apply_move(&mut self, v: usize, target: MoveTarget) -> (f64, f64) {
        let probe = self.probe_move(v, target);
        self.commit_move(&probe);
        (probe.delta_q, probe.delta_z)
    }

    /// Evaluates merging communities `a` and `b` without committing.
    /// O(min(|a|,|b|) · deg).
    pub fn probe_merge(&self, a: usize, b: usize) -> MergeProbe {
        assert!(a != b, "cannot merge a community with itself");
        // scan the smaller side for edges into the other
        let (scan, other) = if self.partition.members(a).len() <= self.partition.members(b).len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut between = 0u64;
        for &v in self.partition.members(scan) {
            for &u in self.graph.neighbors(v) {
                if self.partition.community_of(u) == other {
                    between += 1;
                }
            }
        }
        let m = self.graph.edge_count() as u64;
        let da = self.comm_degrees[a];
        let db = self.comm_degrees[b];
        let intra_after = self.intra_edges + between;
        let sq_after = self.sq_degree_sum - da * da - db * db + (da + db) * (da + db);
        // keep the larger index alive is arbitrary; keep the smaller for
        // stable numbering under the partition's swap-removal
        let (keep, absorb) = (a.min(b), a.max(b));
        MergeProbe {
            keep,
            absorb,
            delta_q: q_from_aggregates(intra_after, sq_after, m) - self.modularity(),
            delta_z: z_from_aggregates(intra_after, sq_after, m) - self.z_modularity(),
            links_between: between,
        }
    }

    /// Applies a probed merge: every member of `absorb` joins `keep`.
    pub fn commit_merge(&mut self, probe: &MergeProbe) {
        let MergeProbe { keep, absorb, .. } = *probe;
        self.intra_edges += probe.links_between;
        let dk = self.comm_degrees[keep];
        let da = self.comm_degrees[absorb];
        self.sq_degree_sum = self.sq_degree_sum - dk * dk - da * da + (dk + da) * (dk + da);
        self.comm_edges[keep] += self.comm_edges[absorb] + probe.links_between;
        self.comm_degrees[keep] += da;

        // drain the absorbed community; its last member empties it and
        // triggers the partition's swap-removal, mirrored below
        let members: Vec<usize> = self.partition.members(absorb).to_vec();
        for v in members {
            self.partition.move_vertex(v, keep);
        }
        self.comm_edges.swap_remove(absorb);
        self.comm_degrees.swap_remove(absorb);
        debug_assert_eq!(self.comm_edges.len(), self.partition.community_count());
    }

    /// Splits community `c`, moving `side` (a subset of its members) into a
    /// fresh community. Returns the new community's index. `side` must be a
    /// proper non-empty subset.
    pub fn commit_split(&mut self, c: usize, side: &[usize]) -> usize {
        assert!(!side.is_empty() && side.len() < self.partition.members(c).len());
        let new_comm = self.partition.community_count();
        self.comm_edges.push(0);
        self.comm_degrees.push(0);

        let mut moved_degree = 0u64;
        for &v in side {
            assert_eq!(self.partition.community_of(v), c, "vertex not in community");
            moved_degree += self.graph.degree(v) as u64;
            self.partition.move_vertex(v, new_comm);
        }
        // count edges now internal to the new side, and those crossing back
        let mut inside = 0u64;
        let mut crossing = 0u64;
        for &v in self.partition.members(new_comm) {
            for &u in self.graph.neighbors(v) {
                let cu = self.partition.community_of(u);
                if cu == new_comm {
                    inside += 1; // counted from both endpoints
                } else if cu == c {
                    crossing += 1;
                }
            }
        }
        inside /= 2;

        let dc = self.comm_degrees[c];
        self.sq_degree_sum -= dc * dc;
        self.comm_degrees[c] -= moved_degree;
        self.comm_degrees[new_comm] = moved_degree;
        let d1 = self.comm_degrees[c];
        self.sq_degree_sum += d1 * d1 + moved_degree * moved_degree;

        self.comm_edges[c] -= inside + crossing;
        self.comm_edges[new_comm] = inside;
        self.intra_edges -= crossing;
        debug_assert_eq!(self.comm_edges.len(), self.partition.community_count());
        new_comm
    }

    /// True if every maintained aggregate equals a from-scratch recomputation.
    /// Integer fields must match exactly.
    pub fn matches_scratch(&self) -> bool {
        let fresh = QualityState::new(self.graph, self.partition.clone());
        self.intra_edges == fresh.intra_edges
            && self.sq_degree_sum == fresh.sq_degree_sum
            && self.comm_edges == fresh.comm_edges
            && self.comm_degrees == fresh.comm_degrees
    }
}

fn q_from_aggregates(intra: u64, sq: u64, m: u64) -> f64 {
    let two_m = (2 * m) as f64;
    intra as f64 / m as f64 - sq as f64 / (two_m * two_m)
}

fn z_from_aggregates(intra: u64, sq: u64, m: u64) -> f64 {
    let two_m_sq = 4 * m * m;
    if sq == two_m_sq {
        // p = 1: single community (or all positive degree in one community);
        // defined as the limit 0
        return 0.0;
    }
    let p = sq as f64 / two_m_sq as f64;
    let fraction = intra as f64 / m as f64;
    (fraction - p) / (p * (1.0 - p)).sqrt()
}

/// Builds the aggregates for `p` over `g` from scratch.
pub fn build_state<'g>(g: &'g Graph, p: Partition) -> QualityState<'g> {
    QualityState::new(g, p)
}

/// Modularity of `p` on `g`, evaluated from scratch.
pub fn modularity(g: &Graph, p: &Partition) -> f64 {
    QualityState::new(g, p.clone()).modularity()
}

/// Z-modularity of `p` on `g`, evaluated from scratch.
pub fn z_modularity(g: &Graph, p: &Partition) -> f64 {
    QualityState::new(g, p.clone()).z_modularity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::graph::{load_partition, singleton_partition};

    fn triangle() -> Graph {
        Graph::build_graph([("a", "b"), ("b", "c"), ("c", "a")])
            .unwrap()
            .graph
    }

    #[test]
    fn triangle_single_community_aggregates() {
        let g = triangle();
        let p = load_partition("a 0\nb 0\nc 0\n", &g).unwrap();
        let s = QualityState::new(&g, p);
        assert_eq!(s.community_edges(0), 3);
        assert_eq!(s.community_degree(0), 6);
        assert_eq!(s.intra_edges(), 3);
        assert_eq!(s.modularity(), 0.0);
        assert_eq!(s.z_modularity(), 0.0);
        assert_eq!(s.null_probability().0, 1.0);
    }

    #[test]
    fn triangle_singletons_aggregates() {
        let g = triangle();
        let s = QualityState::new(&g, singleton_partition(&g));
        assert!((0..3).all(|c| s.community_edges(c) == 0));
        assert_eq!(s.intra_edges(), 0);
        assert_eq!(s.sq_degree_sum(), 12);
    }

    #[test]
    fn triangle_two_one_split() {
        // {a,b},{c}: Q = 1/3 - (4/6)^2 - (2/6)^2 = -2/9
        let g = triangle();
        let p = load_partition("a 0\nb 0\nc 1\n", &g).unwrap();
        let s = QualityState::new(&g, p);
        assert!((s.modularity() - (-2.0 / 9.0)).abs() < 1e-15);
        assert!((s.z_modularity() - (-0.447213595499958)).abs() < 1e-12);
    }

    #[test]
    fn move_into_own_community_is_noop() {
        let g = triangle();
        let mut s = QualityState::new(&g, singleton_partition(&g));
        let before = s.clone();
        let (dq, dz) = s.apply_move(0, MoveTarget::Community(0));
        assert_eq!((dq, dz), (0.0, 0.0));
        assert_eq!(s.intra_edges(), before.intra_edges());
        assert_eq!(s.sq_degree_sum(), before.sq_degree_sum());
    }

    #[test]
    fn triangle_merge_move_delta() {
        // moving c into {a,b} turns {ab|c} (Q = -2/9) into the single
        // community (Q = 0): delta_q = +2/9
        let g = triangle();
        let p = load_partition("a 0\nb 0\nc 1\n", &g).unwrap();
        let mut s = QualityState::new(&g, p);
        let c = g.index_of("c").unwrap();
        let target = s.partition().community_of(g.index_of("a").unwrap());
        let (dq, _) = s.apply_move(c, MoveTarget::Community(target));
        assert!((dq - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(s.modularity(), 0.0);
        assert_eq!(s.community_count(), 1);
        assert!(s.matches_scratch());
    }

    #[test]
    fn ring_5_20_clique_division() {
        let lg = generate::ring_of_cliques(5, 20).unwrap();
        let cstar = lg.division("C*").unwrap().clone();
        let s = QualityState::new(&lg.graph, cstar);
        // every clique holds p(p-1)/2 = 10 internal edges (a bridge's
        // endpoints lie in different cliques) and degree sum p(p-1)+2 = 22
        for c in 0..s.community_count() {
            assert_eq!(s.community_edges(c), 10);
            assert_eq!(s.community_degree(c), 22);
        }
        assert_eq!(s.intra_edges(), 200);
        assert_eq!(s.sq_degree_sum(), 9680);
        assert!((s.modularity() - 0.8590909090909091).abs() < 1e-12);
        assert!((s.z_modularity() - 3.941779427412379).abs() < 1e-9);
    }

    #[test]
    fn two_pairwise_cliques_5_8_divisions() {
        let lg = generate::two_pairwise_cliques(5, 8).unwrap();
        let a = QualityState::new(&lg.graph, lg.division("C_A").unwrap().clone());
        let b = QualityState::new(&lg.graph, lg.division("C_B").unwrap().clone());
        assert!((a.modularity() - 0.649375).abs() < 1e-12);
        assert!((b.modularity() - 0.6240625).abs() < 1e-12);
        assert!((a.z_modularity() - 1.416211009).abs() < 1e-9);
        assert!((b.z_modularity() - 1.318874306).abs() < 1e-9);
        // merging the small cliques lowers both qualities here
        assert!(a.modularity() > b.modularity());
        assert!(a.z_modularity() > b.z_modularity());
    }

    #[test]
    fn hanoi_level_divisions_match_known_values() {
        let lg = generate::hanoi_graph(4).unwrap();
        let lvl1 = QualityState::new(&lg.graph, lg.division("level1").unwrap().clone());
        assert_eq!(lvl1.community_count(), 27);
        assert!((lvl1.modularity() - 0.6379166666666667).abs() < 1e-12);
        assert!((lvl1.z_modularity() - 3.375827).abs() < 5e-7);

        let lvl2 = QualityState::new(&lg.graph, lg.division("level2").unwrap().clone());
        assert_eq!(lvl2.community_count(), 9);
        assert!((lvl2.modularity() - 0.7888541666666667).abs() < 1e-12);
        assert!((lvl2.z_modularity() - 2.509775).abs() < 5e-7);
    }

    #[test]
    fn z_numerator_equals_modularity() {
        let lg = generate::ring_of_cliques(4, 6).unwrap();
        let s = QualityState::new(&lg.graph, lg.ground_truth.clone().unwrap());
        let p = s.null_probability().0;
        let numerator = s.intra_edges() as f64 / lg.graph.edge_count() as f64 - p;
        assert!((numerator - s.modularity()).abs() < 1e-12);
    }

    #[test]
    fn sign_of_z_matches_sign_of_q_at_fixed_p() {
        // 4-cycle a-b-c-d: {ab|cd} and {ac|bd} share sq (all D_C = 4) but
        // differ in intra edges (2 vs 0)
        let g = Graph::build_graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
            .unwrap()
            .graph;
        let p1 = load_partition("a 0\nb 0\nc 1\nd 1\n", &g).unwrap();
        let p2 = load_partition("a 0\nb 1\nc 0\nd 1\n", &g).unwrap();
        let s1 = QualityState::new(&g, p1);
        let s2 = QualityState::new(&g, p2);
        assert_eq!(s1.sq_degree_sum(), s2.sq_degree_sum());
        assert_eq!(s1.modularity(), 0.0);
        assert_eq!(s1.z_modularity(), 0.0);
        assert_eq!(s2.modularity(), -0.5);
        assert_eq!(s2.z_modularity(), -1.0);
        assert_eq!(
            (s1.z_modularity() - s2.z_modularity()).signum(),
            (s1.modularity() - s2.modularity()).signum()
        );
    }

    #[test]
    fn merge_probe_and_commit_agree_with_scratch() {
        let lg = generate::two_pairwise_cliques(5, 8).unwrap();
        let a = lg.division("C_A").unwrap().clone();
        let mut s = QualityState::new(&lg.graph, a);
        // merge the two small cliques: communities of vertices 2q and 2q+p
        let c3 = s.partition().community_of(16);
        let c4 = s.partition().community_of(21);
        let probe = s.probe_merge(c3, c4);
        let before_z = s.z_modularity();
        s.commit_merge(&probe);
        assert!(s.matches_scratch());
        assert!((s.z_modularity() - (before_z + probe.delta_z)).abs() < 1e-12);
        // the result is exactly C_B
        assert!(s.partition().same_division(lg.division("C_B").unwrap()));
    }

    #[test]
    fn split_restores_merge() {
        let lg = generate::two_pairwise_cliques(5, 8).unwrap();
        let b = lg.division("C_B").unwrap().clone();
        let mut s = QualityState::new(&lg.graph, b);
        let merged = s.partition().community_of(16);
        let side: Vec<usize> = (21..26).collect();
        s.commit_split(merged, &side);
        assert!(s.matches_scratch());
        assert!(s.partition().same_division(lg.division("C_A").unwrap()));
    }

    #[test]
    fn fresh_community_move_keeps_aggregates_exact() {
        let lg = generate::ring_of_cliques(3, 3).unwrap();
        let truth = lg.ground_truth.clone().unwrap();
        let mut s = QualityState::new(&lg.graph, truth);
        let (dq, dz) = s.apply_move(0, MoveTarget::NewCommunity);
        assert!(s.matches_scratch());
        assert!(dq < 0.0 && dz < 0.0);
    }
}
