//! Simulated-annealing maximization of a pluggable quality objective.
//!
//! The move scheme follows the classic two-level recipe: at every temperature
//! the annealer attempts `f_i·n²` individual vertex moves (a uniform vertex
//! into a uniform community or a fresh singleton), then `f_c·n` merges of two
//! uniform communities and `f_c·n` splits. A split candidate is produced by a
//! short nested annealing of a bisection of the chosen community, optimizing
//! the same global objective. Improvements are always accepted; a worsening
//! `Δ < 0` is accepted with probability `exp(Δ/T)`.
//!
//! Runs are deterministic: all randomness flows from one seeded generator,
//! and a given `(graph, config)` pair always returns the same result.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Partition};
use crate::quality::{MoveTarget, Objective, QualityState};

/// Full parameterization of the annealing schedule and move mix.
#[derive(Debug, Clone)]
pub struct AnnealConfig {
    pub objective: Objective,
    /// Starting temperature; the default is 1/n.
    pub initial_temperature: f64,
    /// Geometric cooling factor in (0, 1), applied once per temperature step.
    pub cooling_factor: f64,
    /// Individual moves per temperature = `individual_move_factor * n²`.
    pub individual_move_factor: f64,
    /// Merge attempts (and split attempts) per temperature = factor * n.
    pub collective_move_factor: f64,
    /// Run ends when the temperature falls below this; the default is 1e-6/n.
    pub min_temperature: f64,
    /// Run ends after this many consecutive temperatures without a new best.
    pub stagnation_limit: usize,
    pub rng_seed: u64,
}

impl AnnealConfig {
    /// The default schedule for a given graph: `T₀ = 1/n`, cooling 0.995,
    /// `f_i = f_c = 1`, `T_min = 1e-6/n`, stagnation limit 25.
    pub fn for_graph(g: &Graph, objective: Objective, seed: u64) -> AnnealConfig {
        let n = g.vertex_count() as f64;
        AnnealConfig {
            objective,
            initial_temperature: 1.0 / n,
            cooling_factor: 0.995,
            individual_move_factor: 1.0,
            collective_move_factor: 1.0,
            min_temperature: 1e-6 / n,
            stagnation_limit: 25,
            rng_seed: seed,
        }
    }

    fn validate(&self) {
        assert!(self.initial_temperature > 0.0, "initial temperature must be positive");
        assert!(
            self.cooling_factor > 0.0 && self.cooling_factor < 1.0,
            "cooling factor must lie in (0, 1)"
        );
        assert!(self.individual_move_factor >= 0.0 && self.collective_move_factor >= 0.0);
        assert!(self.min_temperature > 0.0, "min temperature must be positive");
        assert!(self.stagnation_limit > 0, "stagnation limit must be positive");
    }
}

/// Outcome of one annealing run.
#[derive(Debug, Clone)]
pub struct AnnealResult {
    pub best_partition: Partition,
    pub best_value: f64,
    /// Best objective value seen up to and including each temperature step.
    pub objective_trace: Vec<f64>,
    pub temperatures_run: usize,
    pub seed_used: u64,
}

/// Maximizes the configured objective over partitions of `g`, starting from
/// singletons. Termination is guaranteed by `min_temperature`.
pub fn anneal(g: &Graph, cfg: &AnnealConfig) -> AnnealResult {
    cfg.validate();
    let n = g.vertex_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut state = QualityState::new(g, Partition::singletons(n));
    let mut current = state.evaluate(cfg.objective);
    let mut best_value = current;
    let mut best_partition = state.partition().clone();

    let individual_per_t = ((n * n) as f64 * cfg.individual_move_factor).round() as usize;
    let collective_per_t = (n as f64 * cfg.collective_move_factor).round() as usize;

    let mut trace = Vec::new();
    let mut temperature = cfg.initial_temperature;
    let mut stagnant = 0usize;
    let mut temperatures_run = 0usize;

    while temperature >= cfg.min_temperature {
        let best_before = best_value;

        for _ in 0..individual_per_t {
            let (v, target) = propose_individual_move(&state, &mut rng);
            let probe = state.probe_move(v, target);
            if metropolis(probe.delta(cfg.objective), temperature, &mut rng) {
                state.commit_move(&probe);
                current += probe.delta(cfg.objective);
                debug_assert!(state.partition().check_invariants());
                if current > best_value {
                    best_value = current;
                    best_partition = state.partition().clone();
                }
            }
        }

        for _ in 0..collective_per_t {
            if let Some((a, b)) = propose_merge(&state, &mut rng) {
                let probe = state.probe_merge(a, b);
                if metropolis(probe.delta(cfg.objective), temperature, &mut rng) {
                    state.commit_merge(&probe);
                    current += probe.delta(cfg.objective);
                    debug_assert!(state.partition().check_invariants());
                    if current > best_value {
                        best_value = current;
                        best_partition = state.partition().clone();
                    }
                }
            }
        }

        for _ in 0..collective_per_t {
            if let Some((community, side)) =
                propose_split(&state, temperature, cfg.objective, &mut rng)
            {
                let delta = split_delta(&state, community, &side, cfg.objective);
                if metropolis(delta, temperature, &mut rng) {
                    state.commit_split(community, &side);
                    current = state.evaluate(cfg.objective);
                    debug_assert!(state.partition().check_invariants());
                    if current > best_value {
                        best_value = current;
                        best_partition = state.partition().clone();
                    }
                }
            }
        }

        debug_assert!(state.matches_scratch());
        // drift guard: the maintained objective value never strays from the
        // aggregates, which are exact integers
        current = state.evaluate(cfg.objective);

        temperatures_run += 1;
        trace.push(best_value);
        if best_value > best_before {
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant >= cfg.stagnation_limit {
                break;
            }
        }
        temperature *= cfg.cooling_factor;
    }

    AnnealResult {
        best_partition,
        best_value,
        objective_trace: trace,
        temperatures_run,
        seed_used: cfg.rng_seed,
    }
}

fn metropolis(delta: f64, temperature: f64, rng: &mut impl Rng) -> bool {
    delta >= 0.0 || rng.gen::<f64>() < (delta / temperature).exp()
}

/// Uniform vertex, uniform target over existing communities and one fresh
/// community, excluding the vertex's current community.
pub fn propose_individual_move(state: &QualityState, rng: &mut impl Rng) -> (usize, MoveTarget) {
    let n = state.graph().vertex_count();
    let v = rng.gen_range(0..n);
    let k = state.community_count();
    let pick = rng.gen_range(0..k);
    let target = if pick == state.partition().community_of(v) {
        MoveTarget::NewCommunity
    } else {
        MoveTarget::Community(pick)
    };
    (v, target)
}

/// Uniform unordered pair of distinct communities; `None` when k < 2.
pub fn propose_merge(state: &QualityState, rng: &mut impl Rng) -> Option<(usize, usize)> {
    let k = state.community_count();
    if k < 2 {
        return None;
    }
    let a = rng.gen_range(0..k);
    let mut b = rng.gen_range(0..k - 1);
    if b >= a {
        b += 1;
    }
    Some((a, b))
}

/// Proposes a bisection of a uniform community with at least two members,
/// refined by a short nested annealing (10 temperatures, |C| flips each) of
/// the global objective on the community's induced subgraph. `None` when the
/// chosen community is a singleton or the refined bisection is one-sided.
pub fn propose_split(
    state: &QualityState,
    temperature: f64,
    objective: Objective,
    rng: &mut impl Rng,
) -> Option<(usize, Vec<usize>)> {
    let k = state.community_count();
    let community = rng.gen_range(0..k);
    let members: Vec<usize> = state.partition().members(community).to_vec();
    if members.len() < 2 {
        return None;
    }

    // in-community index of every member, for O(1) lookups during flips
    let graph = state.graph();
    let mut local_index = std::collections::HashMap::with_capacity(members.len());
    for (i, &v) in members.iter().enumerate() {
        local_index.insert(v, i);
    }
    let mut side: Vec<bool> = (0..members.len()).map(|_| rng.gen_bool(0.5)).collect();

    // aggregates of the tentative bisection, maintained under flips:
    // edges inside each side and degree sums per side (crossing edges leave
    // the intra count and need no tracking of their own)
    let mut inside = [0u64; 2];
    let mut degree_sum = [0u64; 2];
    for (i, &v) in members.iter().enumerate() {
        let s = side[i] as usize;
        degree_sum[s] += graph.degree(v) as u64;
        for &u in graph.neighbors(v) {
            if let Some(&j) = local_index.get(&u) {
                if j > i && side[j] == side[i] {
                    inside[s] += 1;
                }
            }
        }
    }

    // base aggregates with community `community` removed
    let m = graph.edge_count() as u64;
    let d_c = state.community_degree(community);
    let base_intra = state.intra_edges() - state.community_edges(community);
    let base_sq = state.sq_degree_sum() - d_c * d_c;
    let objective_of = |inside: &[u64; 2], degree_sum: &[u64; 2]| -> f64 {
        let intra = base_intra + inside[0] + inside[1];
        let sq = base_sq + degree_sum[0] * degree_sum[0] + degree_sum[1] * degree_sum[1];
        evaluate_aggregates(intra, sq, m, objective)
    };

    let mut current = objective_of(&inside, &degree_sum);
    let mut nested_t = temperature;
    for _ in 0..10 {
        for _ in 0..members.len() {
            let i = rng.gen_range(0..members.len());
            let v = members[i];
            let from = side[i] as usize;
            let to = 1 - from;
            // neighbor counts of v on each side
            let mut links = [0u64; 2];
            for &u in graph.neighbors(v) {
                if let Some(&j) = local_index.get(&u) {
                    if j != i {
                        links[side[j] as usize] += 1;
                    }
                }
            }
            let mut new_inside = inside;
            new_inside[from] -= links[from];
            new_inside[to] += links[to];
            let mut new_degree = degree_sum;
            new_degree[from] -= graph.degree(v) as u64;
            new_degree[to] += graph.degree(v) as u64;
            let candidate = objective_of(&new_inside, &new_degree);
            if metropolis(candidate - current, nested_t, rng) {
                side[i] = !side[i];
                inside = new_inside;
                degree_sum = new_degree;
                current = candidate;
            }
        }
        nested_t *= 0.6;
    }

    let chosen: Vec<usize> = members
        .iter()
        .zip(&side)
        .filter(|(_, &s)| s)
        .map(|(&v, _)| v)
        .collect();
    if chosen.is_empty() || chosen.len() == members.len() {
        return None;
    }
    Some((community, chosen))
}

/// Objective change of splitting `side` out of `community`, from aggregates.
fn split_delta(state: &QualityState, community: usize, side: &[usize], objective: Objective) -> f64 {
    let graph = state.graph();
    let in_side: std::collections::HashSet<usize> = side.iter().copied().collect();
    let mut crossing = 0u64;
    let mut moved_degree = 0u64;
    for &v in side {
        moved_degree += graph.degree(v) as u64;
        for &u in graph.neighbors(v) {
            if !in_side.contains(&u) && state.partition().community_of(u) == community {
                crossing += 1;
            }
        }
    }
    let m = graph.edge_count() as u64;
    let d_c = state.community_degree(community);
    let d_rest = d_c - moved_degree;
    let intra = state.intra_edges() - crossing;
    let sq = state.sq_degree_sum() - d_c * d_c + d_rest * d_rest + moved_degree * moved_degree;
    evaluate_aggregates(intra, sq, m, objective) - state.evaluate(objective)
}

fn evaluate_aggregates(intra: u64, sq: u64, m: u64, objective: Objective) -> f64 {
    let two_m_sq = (4 * m * m) as f64;
    let fraction = intra as f64 / m as f64;
    let p = sq as f64 / two_m_sq;
    match objective {
        Objective::Modularity => fraction - p,
        Objective::ZModularity => {
            if sq == 4 * m * m {
                0.0
            } else {
                (fraction - p) / (p * (1.0 - p)).sqrt()
            }
        }
    }
}
