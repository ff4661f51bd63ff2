//! Closed-form quality values for clique rings and paired-clique networks,
//! theorem checkers, and the built-in regression tables.
//!
//! The closed forms here are derived independently of the incremental
//! evaluator in [`crate::quality`], so agreement between the two is a strong
//! correctness check for both sides.
//!
//! For a ring of `q` cliques of size `p` (m = q(1 + p(p−1)/2)):
//!
//! ```text
//! Z(C*) = (1 − q/m − 1/q) / sqrt((1 − 1/q)/q)            one community per clique
//! Z(C)  = (1 − l/m − t) / sqrt(t(1 − t)),  t = Σ(sᵢ/q)²  l groups of sᵢ consecutive cliques
//! ```
//!
//! and the shared numerators are the modularity values `Q(C*) = 1 − q/m − 1/q`
//! and `Q(C) = 1 − l/m − t`. Both are instances of
//! `f(x, y) = (1 − y/m − x)/sqrt(x(1−x))` via `Z(C*) = f(1/q, q)` and
//! `Z(C) = f(t, l)`; `f` is strictly decreasing in `x` and `f(1/y, y)` is
//! strictly increasing for `1 < y < m/3`, which together prove that grouping
//! cliques can only lower `Z` — the never-merge property checked by
//! [`check_never_merge`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::generate;
use crate::quality::QualityState;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticError {
    #[error("f(x, y) requires 0 < x < 1, got x={0}")]
    XOutOfRange(f64),
    #[error("f(x, y) requires 1 <= y <= m, got y={y}, m={m}")]
    YOutOfRange { y: f64, m: usize },
}

/// Edge count of `ring_of_cliques(p, q)`: `q(1 + p(p-1)/2)`.
pub fn ring_edge_count(p: usize, q: usize) -> usize {
    q * (1 + p * (p - 1) / 2)
}

/// `f(x, y) = (1 − y/m − x) / sqrt(x(1−x))` — the two ring closed forms are
/// `f(1/q, q)` and `f(t, l)`.
pub fn f(x: f64, y: f64, m: usize) -> Result<f64, AnalyticError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(AnalyticError::XOutOfRange(x));
    }
    if !(y >= 1.0 && y <= m as f64) {
        return Err(AnalyticError::YOutOfRange { y, m });
    }
    Ok((1.0 - y / m as f64 - x) / (x * (1.0 - x)).sqrt())
}

/// Modularity of the clique division of `ring_of_cliques(p, q)`.
pub fn ring_q_star(p: usize, q: usize) -> f64 {
    let m = ring_edge_count(p, q) as f64;
    1.0 - q as f64 / m - 1.0 / q as f64
}

/// Z-modularity of the clique division of `ring_of_cliques(p, q)`.
pub fn ring_z_star(p: usize, q: usize) -> f64 {
    let qf = q as f64;
    ring_q_star(p, q) / ((1.0 - 1.0 / qf) / qf).sqrt()
}

/// `t = Σ (sᵢ/q)²` for a grouping of the ring's cliques.
fn grouping_t(q: usize, sizes: &[usize]) -> f64 {
    let qf = q as f64;
    sizes.iter().map(|&s| (s as f64 / qf).powi(2)).sum()
}

/// Modularity of the division of `ring_of_cliques(p, q)` into consecutive
/// groups of `sizes[i]` cliques.
pub fn ring_q_grouped(p: usize, q: usize, sizes: &[usize]) -> f64 {
    let m = ring_edge_count(p, q) as f64;
    1.0 - sizes.len() as f64 / m - grouping_t(q, sizes)
}

/// Z-modularity of the grouped division. The single-group division has
/// `t = 1` and is defined as 0, matching the evaluator's convention.
pub fn ring_z_grouped(p: usize, q: usize, sizes: &[usize]) -> f64 {
    let t = grouping_t(q, sizes);
    if t >= 1.0 {
        return 0.0;
    }
    ring_q_grouped(p, q, sizes) / (t * (1.0 - t)).sqrt()
}

/// Outcome of a never-merge sweep over groupings of one ring.
#[derive(Debug, Clone)]
pub struct NeverMergeReport {
    pub p: usize,
    pub q: usize,
    pub z_star: f64,
    /// Number of groupings evaluated (every one with some sᵢ ≥ 2).
    pub groupings_checked: usize,
    /// Groupings with Z(grouped) >= Z(C*); empty if the property holds.
    pub violations: Vec<Vec<usize>>,
    /// Smallest observed margin Z(C*) − Z(grouped).
    pub min_margin: f64,
    /// The grouping attaining `min_margin`.
    pub closest_grouping: Vec<usize>,
}

impl NeverMergeReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Z(C*) > Z(grouped)` for every grouping that merges at least two
/// cliques: exhaustively over all 2^(q−1) − 1 such compositions of `q` when
/// `q <= 12`, else over `trials` compositions sampled uniformly (each of the
/// q−1 gaps between consecutive cliques is cut independently with probability
/// 1/2, which is uniform over compositions).
pub fn check_never_merge(p: usize, q: usize, trials: usize, seed: u64) -> NeverMergeReport {
    let z_star = ring_z_star(p, q);
    let mut report = NeverMergeReport {
        p,
        q,
        z_star,
        groupings_checked: 0,
        violations: Vec::new(),
        min_margin: f64::INFINITY,
        closest_grouping: Vec::new(),
    };
    let consider = |sizes: &[usize], report: &mut NeverMergeReport| {
        report.groupings_checked += 1;
        let margin = z_star - ring_z_grouped(p, q, sizes);
        if margin <= 0.0 {
            report.violations.push(sizes.to_vec());
        }
        if margin < report.min_margin {
            report.min_margin = margin;
            report.closest_grouping = sizes.to_vec();
        }
    };

    if q <= 12 {
        // compositions of q from bitmasks over the q-1 gaps; skip all-ones
        for mask in 0..(1u64 << (q - 1)) {
            if mask == (1u64 << (q - 1)) - 1 {
                continue; // every gap cut: the trivial grouping C*
            }
            let sizes = composition_from_gaps(q, mask);
            consider(&sizes, &mut report);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut done = 0;
        while done < trials {
            let mut sizes = Vec::new();
            let mut run = 1usize;
            for _ in 0..(q - 1) {
                if rng.gen_bool(0.5) {
                    sizes.push(run);
                    run = 1;
                } else {
                    run += 1;
                }
            }
            sizes.push(run);
            if sizes.len() == q {
                continue; // drew C* itself; vanishingly rare for large q
            }
            consider(&sizes, &mut report);
            done += 1;
        }
    }
    report
}

fn composition_from_gaps(q: usize, mask: u64) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut run = 1usize;
    for i in 0..(q - 1) {
        if mask >> i & 1 == 1 {
            sizes.push(run);
            run = 1;
        } else {
            run += 1;
        }
    }
    sizes.push(run);
    sizes
}

/// Direct evaluation of both divisions of `two_pairwise_cliques(p, q)` and
/// the implication `Q(C_A) > Q(C_B) ⇒ Z(C_A) > Z(C_B)`.
#[derive(Debug, Clone, Copy)]
pub struct ImplicationReport {
    pub p: usize,
    pub q: usize,
    pub q_a: f64,
    pub q_b: f64,
    pub z_a: f64,
    pub z_b: f64,
    /// Whether the premise Q(C_A) > Q(C_B) holds.
    pub premise: bool,
    /// The implication itself (vacuously true when the premise fails).
    pub holds: bool,
}

/// Evaluates the implication on the generated network with the direct
/// evaluators (not closed forms).
pub fn check_implication(p: usize, q: usize) -> Result<ImplicationReport, generate::GenerateError> {
    let lg = generate::two_pairwise_cliques(p, q)?;
    let a = QualityState::new(&lg.graph, lg.division("C_A").unwrap().clone());
    let b = QualityState::new(&lg.graph, lg.division("C_B").unwrap().clone());
    let (q_a, z_a) = (a.modularity(), a.z_modularity());
    let (q_b, z_b) = (b.modularity(), b.z_modularity());
    let premise = q_a > q_b;
    Ok(ImplicationReport {
        p,
        q,
        q_a,
        q_b,
        z_a,
        z_b,
        premise,
        holds: !premise || z_a > z_b,
    })
}

/// One table cell: the value computed by the direct evaluators next to the
/// built-in reference value and its tolerance.
#[derive(Debug, Clone, Copy)]
pub struct TableEntry {
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
}

impl TableEntry {
    pub fn abs_error(&self) -> f64 {
        (self.computed - self.reference).abs()
    }

    pub fn within_tolerance(&self) -> bool {
        self.abs_error() <= self.tolerance
    }
}

/// One row of a regression table: network sizes plus the four quality values
/// `[Q(ref division), Q(alt division), Z(ref division), Z(alt division)]`.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub entries: [TableEntry; 4],
}

impl TableRow {
    pub fn within_tolerance(&self) -> bool {
        self.entries.iter().all(TableEntry::within_tolerance)
    }
}

/// Reference values ±5e-4 for 4-decimal entries, ±5e-3 for the 4-significant-
/// figure Z values ≥ 10.
fn entry(computed: f64, reference: f64) -> TableEntry {
    TableEntry {
        computed,
        reference,
        tolerance: if reference.abs() >= 10.0 { 5e-3 } else { 5e-4 },
    }
}

const TABLE_ONE_PARAMS: [(usize, usize); 4] = [(5, 20), (5, 40), (5, 80), (5, 1000)];
const TABLE_ONE_REFERENCE: [[f64; 4]; 4] = [
    [0.8591, 0.8548, 3.942, 2.848],
    [0.8841, 0.9045, 5.663, 4.150],
    [0.8966, 0.9295, 8.070, 5.954],
    [0.9081, 0.9525, 28.73, 21.32],
];

const TABLE_TWO_PARAMS: [(usize, usize); 4] = [(5, 8), (5, 16), (5, 32), (5, 64)];
// Reference values as published. They are NOT all attainable: the implied
// intra-community edge count of the four-clique division exceeds what a
// simple graph can hold (the row-1 values need 29 edges inside an 8-vertex
// clique, maximum 28), so no wiring of four single bridges reproduces them.
// They are matched exactly only by a multigraph with a duplicated edge inside
// the first large clique, which the graph type here rejects by design. The
// generator builds the documented simple ring wiring; most entries of this
// table are therefore expected to sit outside tolerance, and `reproduce
// tables` reports them as such. See the README's notes on the `tables`
// command.
const TABLE_TWO_REFERENCE: [[f64; 4]; 4] = [
    [0.6618, 0.3385, 1.443, 1.345],
    [0.5650, 0.5653, 1.144, 1.143],
    [0.5182, 0.5190, 1.037, 1.039],
    [0.5047, 0.5049, 1.009, 1.010],
];

/// Ring-of-cliques regression rows, computed by the direct evaluators on
/// generated graphs: divisions `C*` and the consecutive-pairs grouping.
pub fn table_one() -> Vec<TableRow> {
    TABLE_ONE_PARAMS
        .iter()
        .zip(&TABLE_ONE_REFERENCE)
        .map(|(&(p, q), refs)| {
            let lg = generate::ring_of_cliques(p, q).expect("valid table parameters");
            let star = QualityState::new(&lg.graph, lg.division("C*").unwrap().clone());
            let pairs = QualityState::new(&lg.graph, lg.division("pairs_merged").unwrap().clone());
            TableRow {
                n: lg.graph.vertex_count(),
                m: lg.graph.edge_count(),
                p,
                q,
                entries: [
                    entry(star.modularity(), refs[0]),
                    entry(pairs.modularity(), refs[1]),
                    entry(star.z_modularity(), refs[2]),
                    entry(pairs.z_modularity(), refs[3]),
                ],
            }
        })
        .collect()
}

/// Paired-cliques regression rows, computed by the direct evaluators on
/// generated graphs: divisions `C_A` and `C_B`.
pub fn table_two() -> Vec<TableRow> {
    TABLE_TWO_PARAMS
        .iter()
        .zip(&TABLE_TWO_REFERENCE)
        .map(|(&(p, q), refs)| {
            let lg = generate::two_pairwise_cliques(p, q).expect("valid table parameters");
            let a = QualityState::new(&lg.graph, lg.division("C_A").unwrap().clone());
            let b = QualityState::new(&lg.graph, lg.division("C_B").unwrap().clone());
            TableRow {
                n: lg.graph.vertex_count(),
                m: lg.graph.edge_count(),
                p,
                q,
                entries: [
                    entry(a.modularity(), refs[0]),
                    entry(b.modularity(), refs[1]),
                    entry(a.z_modularity(), refs[2]),
                    entry(b.z_modularity(), refs[3]),
                ],
            }
        })
        .collect()
}

/// Both regression tables.
pub fn reproduce_tables() -> (Vec<TableRow>, Vec<TableRow>) {
    (table_one(), table_two())
}
