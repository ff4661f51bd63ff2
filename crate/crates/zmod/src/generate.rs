//! Benchmark graph families, each bundled with its reference divisions.
//!
//! All generators are pure functions of their parameters (and seed, where
//! randomness is involved): the same inputs always produce the same graph,
//! byte for byte.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Partition};

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("ring of cliques requires p >= 3 and q >= 2, got p={p}, q={q}")]
    RingParams { p: usize, q: usize },
    #[error("grouping sizes must be positive and sum to q={q}, got sum {sum}")]
    GroupingSizes { q: usize, sum: usize },
    #[error("paired cliques require 3 <= p < q, got p={p}, q={q}")]
    PairwiseParams { p: usize, q: usize },
    #[error("planted partition requires l >= 1 dividing n, got n={n}, l={l}")]
    PlantedDivisibility { n: usize, l: usize },
    #[error("planted partition requires 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}")]
    PlantedProbabilities { p_in: f64, p_out: f64 },
    #[error("no edges after {0} attempts; raise the probabilities")]
    PlantedEmpty(usize),
    #[error("hanoi graph supports 1 <= d <= 8, got d={0}")]
    HanoiDepth(usize),
}

/// A generated graph with its ground truth (when the family defines one) and
/// named reference divisions.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub ground_truth: Option<Partition>,
    pub named_divisions: Vec<(String, Partition)>,
}

impl LabeledGraph {
    pub fn division(&self, name: &str) -> Option<&Partition> {
        self.named_divisions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }
}

/// `q` cliques of `p` vertices arranged in a ring, consecutive cliques joined
/// by one bridge: vertex 0 of each clique connects to vertex 1 of the next.
///
/// Sizes: `n = p*q`, `m = q*(1 + p*(p-1)/2)`. Ground truth is the division
/// into cliques (named `"C*"`); for even `q` the division merging consecutive
/// pairs is included as `"pairs_merged"`.
pub fn ring_of_cliques(p: usize, q: usize) -> Result<LabeledGraph, GenerateError> {
    if p < 3 || q < 2 {
        return Err(GenerateError::RingParams { p, q });
    }
    let n = p * q;
    let mut edges = Vec::with_capacity(q * (1 + p * (p - 1) / 2));
    for c in 0..q {
        let base = c * p;
        for i in 0..p {
            for j in (i + 1)..p {
                edges.push((base + i, base + j));
            }
        }
        let next = (c + 1) % q;
        edges.push((base, next * p + 1));
    }
    let graph = Graph::from_index_edges(n, edges);

    let cstar = Partition::from_assignment(&(0..n).map(|v| v / p).collect::<Vec<_>>());
    let mut named = vec![("C*".to_owned(), cstar.clone())];
    if q % 2 == 0 {
        let pairs = Partition::from_assignment(&(0..n).map(|v| v / p / 2).collect::<Vec<_>>());
        named.push(("pairs_merged".to_owned(), pairs));
    }
    Ok(LabeledGraph {
        graph,
        ground_truth: Some(cstar),
        named_divisions: named,
    })
}

/// Division of a `ring_of_cliques(p, q)` graph into `sizes.len()` communities
/// of consecutive cliques, where `sizes[i]` is the number of cliques in the
/// i-th group. Sizes must be positive and sum to `q`.
pub fn ring_grouped_division(
    p: usize,
    q: usize,
    sizes: &[usize],
) -> Result<Partition, GenerateError> {
    let sum: usize = sizes.iter().sum();
    if sum != q || sizes.iter().any(|&s| s == 0) {
        return Err(GenerateError::GroupingSizes { q, sum });
    }
    let mut clique_group = Vec::with_capacity(q);
    for (g, &s) in sizes.iter().enumerate() {
        clique_group.extend(std::iter::repeat(g).take(s));
    }
    let assignment: Vec<usize> = (0..p * q).map(|v| clique_group[v / p]).collect();
    Ok(Partition::from_assignment(&assignment))
}

/// Two pairs of identical cliques: `C1`, `C2` with `q` vertices each and
/// `C3`, `C4` with `p < q` vertices each, joined into a ring by four single
/// edges `C1–C2`, `C3–C4`, `C1–C3`, `C2–C4`.
///
/// Sizes: `n = 2(p+q)`, `m = p(p-1) + q(q-1) + 4`. Named divisions:
/// `"C_A"` = the four cliques (also the ground truth) and `"C_B"` = the
/// division merging the two small cliques.
pub fn two_pairwise_cliques(p: usize, q: usize) -> Result<LabeledGraph, GenerateError> {
    if p < 3 || q <= p {
        return Err(GenerateError::PairwiseParams { p, q });
    }
    let n = 2 * (p + q);
    let starts = [0, q, 2 * q, 2 * q + p];
    let sizes = [q, q, p, p];
    let mut edges = Vec::with_capacity(p * (p - 1) + q * (q - 1) + 4);
    for (&base, &size) in starts.iter().zip(&sizes) {
        for i in 0..size {
            for j in (i + 1)..size {
                edges.push((base + i, base + j));
            }
        }
    }
    edges.push((starts[0], starts[1])); // C1-C2
    edges.push((starts[2], starts[3])); // C3-C4
    edges.push((starts[0] + 1, starts[2] + 1)); // C1-C3
    edges.push((starts[1] + 1, starts[3] + 1)); // C2-C4
    let graph = Graph::from_index_edges(n, edges);

    let block = |v: usize| match v {
        v if v < q => 0,
        v if v < 2 * q => 1,
        v if v < 2 * q + p => 2,
        _ => 3,
    };
    let c_a = Partition::from_assignment(&(0..n).map(block).collect::<Vec<_>>());
    let c_b = Partition::from_assignment(
        &(0..n).map(|v| block(v).min(2)).collect::<Vec<_>>(),
    );
    Ok(LabeledGraph {
        graph,
        ground_truth: Some(c_a.clone()),
        named_divisions: vec![("C_A".to_owned(), c_a), ("C_B".to_owned(), c_b)],
    })
}

/// Planted l-partition: `n` vertices in `l` equal groups; each same-group
/// pair is an edge with probability `p_in`, each cross-group pair with
/// probability `p_out < p_in`. Ground truth is the planted grouping.
///
/// Isolated vertices are permitted. If the draw produces no edges at all, the
/// generation is retried with a derived seed (`seed + 0x9E3779B97F4A7C15`,
/// wrapping); after 64 empty draws the parameters are reported as infeasible.
pub fn planted_partition(
    n: usize,
    l: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<LabeledGraph, GenerateError> {
    if l == 0 || n == 0 || n % l != 0 {
        return Err(GenerateError::PlantedDivisibility { n, l });
    }
    if !(0.0..=1.0).contains(&p_out) || !(0.0..=1.0).contains(&p_in) || p_out >= p_in {
        return Err(GenerateError::PlantedProbabilities { p_in, p_out });
    }
    let group_size = n / l;
    let mut attempt_seed = seed;
    for _ in 0..64 {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let prob = if u / group_size == v / group_size {
                    p_in
                } else {
                    p_out
                };
                if rng.gen_bool(prob) {
                    edges.push((u, v));
                }
            }
        }
        if edges.is_empty() {
            attempt_seed = attempt_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
            continue;
        }
        let graph = Graph::from_index_edges(n, edges);
        let truth =
            Partition::from_assignment(&(0..n).map(|v| v / group_size).collect::<Vec<_>>());
        return Ok(LabeledGraph {
            graph,
            ground_truth: Some(truth.clone()),
            named_divisions: vec![("planted".to_owned(), truth)],
        });
    }
    Err(GenerateError::PlantedEmpty(64))
}

/// State graph of the `d`-disk tower of Hanoi: vertices are the 3^d placements
/// of disks onto three pegs, edges the legal single-disk moves.
///
/// A disk may move if no smaller disk sits on its peg or on the destination
/// peg; equivalently, for each pair of pegs the smallest disk on either peg
/// (if any) can hop between them, so every vertex has degree 3 except the
/// three all-disks-on-one-peg corners, which have degree 2. Vertex labels are
/// ternary strings, largest disk first. No ground truth; the hierarchical
/// divisions grouping states by all disks above level g are named
/// `"level1"` (3^(d-1) communities) and `"level2"` (3^(d-2), for d >= 2).
pub fn hanoi_graph(d: usize) -> Result<LabeledGraph, GenerateError> {
    if !(1..=8).contains(&d) {
        return Err(GenerateError::HanoiDepth(d));
    }
    let n = 3usize.pow(d as u32);
    let mut edges = Vec::with_capacity(3 * (n - 1) / 2);
    let pow3: Vec<usize> = (0..d).map(|i| 3usize.pow(i as u32)).collect();
    for state in 0..n {
        for a in 0..3usize {
            for b in (a + 1)..3 {
                // smallest disk currently on peg a or peg b
                for i in 0..d {
                    let peg = state / pow3[i] % 3;
                    if peg == a || peg == b {
                        let other = if peg == a { b } else { a };
                        let neighbor =
                            (state as i64 + (other as i64 - peg as i64) * pow3[i] as i64) as usize;
                        if state < neighbor {
                            edges.push((state, neighbor));
                        }
                        break;
                    }
                }
            }
        }
    }
    let labels = (0..n).map(|s| hanoi_state_label(s, d)).collect();
    let graph = Graph::from_labeled_index_edges(labels, edges);
    debug_assert_eq!(graph.edge_count(), 3 * (n - 1) / 2);

    let mut named = Vec::new();
    named.push((
        "level1".to_owned(),
        Partition::from_assignment(&(0..n).map(|s| s / 3).collect::<Vec<_>>()),
    ));
    if d >= 2 {
        named.push((
            "level2".to_owned(),
            Partition::from_assignment(&(0..n).map(|s| s / 9).collect::<Vec<_>>()),
        ));
    }
    Ok(LabeledGraph {
        graph,
        ground_truth: None,
        named_divisions: named,
    })
}

/// Ternary label of a Hanoi state, largest disk first (e.g. `"021"` for
/// d = 3). Matches the vertex order of [`hanoi_graph`].
pub fn hanoi_state_label(state: usize, d: usize) -> String {
    (0..d)
        .rev()
        .map(|i| char::from(b'0' + (state / 3usize.pow(i as u32) % 3) as u8))
        .collect()
}
