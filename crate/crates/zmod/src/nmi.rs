//! Partition similarity via normalized mutual information (base-2 logs).
//!
//! ```text
//! H(C)        = −Σ_C (|C|/n) log₂(|C|/n)
//! I(C₁, C₂)   = ΣΣ (|C₁∩C₂|/n) log₂(n·|C₁∩C₂| / (|C₁|·|C₂|))
//! nmi(C₁, C₂) = 2I / (H₁ + H₂)   ∈ [0, 1]
//! ```
//!
//! Terms are accumulated in a canonical order (sorted by cell count and
//! marginal product), which makes `nmi` exactly symmetric and exactly
//! invariant under community relabelling, and makes `nmi(p, p) == 1.0` hold
//! bit-for-bit rather than merely up to rounding.

use thiserror::Error;

use crate::graph::Partition;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("partitions cover different vertex sets ({left} vs {right} vertices)")]
    VertexCountMismatch { left: usize, right: usize },
}

/// Joint community-overlap counts of two partitions of the same vertex set.
#[derive(Debug, Clone)]
pub struct Confusion {
    pub n: usize,
    /// Community sizes of the first partition.
    pub sizes_left: Vec<usize>,
    /// Community sizes of the second partition.
    pub sizes_right: Vec<usize>,
    /// Non-empty cells `((c1, c2), |C1 ∩ C2|)`.
    pub joint: Vec<((usize, usize), usize)>,
}

impl Confusion {
    pub fn between(p1: &Partition, p2: &Partition) -> Result<Confusion, MetricsError> {
        let n = p1.vertex_count();
        if n != p2.vertex_count() {
            return Err(MetricsError::VertexCountMismatch {
                left: n,
                right: p2.vertex_count(),
            });
        }
        let mut counts = std::collections::HashMap::new();
        for v in 0..n {
            *counts
                .entry((p1.community_of(v), p2.community_of(v)))
                .or_insert(0usize) += 1;
        }
        let mut joint: Vec<_> = counts.into_iter().collect();
        joint.sort_unstable();
        Ok(Confusion {
            n,
            sizes_left: p1.sizes(),
            sizes_right: p2.sizes(),
            joint,
        })
    }

    /// Mutual information in bits. Clamped at 0 to absorb the residue of
    /// cancelling negative terms; empty cells contribute nothing.
    pub fn mutual_information(&self) -> f64 {
        let n = self.n as f64;
        // canonical accumulation order: by (count, |C1|·|C2|); two cells with
        // equal keys contribute identical terms, so the order is well defined
        // up to reordering equal summands
        let mut terms: Vec<(usize, u64)> = self
            .joint
            .iter()
            .map(|&((c1, c2), cnt)| {
                (cnt, self.sizes_left[c1] as u64 * self.sizes_right[c2] as u64)
            })
            .collect();
        terms.sort_unstable();
        let mut total = 0.0;
        for (cnt, prod) in terms {
            let ratio = (self.n as u64 * cnt as u64) as f64 / prod as f64;
            total += (cnt as f64 / n) * ratio.log2();
        }
        total.max(0.0)
    }
}

/// Entropy of the community-size distribution, in bits. Zero iff the
/// partition is a single community.
pub fn entropy(p: &Partition) -> f64 {
    let n = p.vertex_count() as f64;
    let mut sizes = p.sizes();
    sizes.sort_unstable();
    sizes
        .into_iter()
        .map(|c| {
            // written as (c/n)·log2(n/c) so that the diagonal terms of
            // mutual_information reproduce it bit-for-bit
            let ratio = (p.vertex_count() as u64 * c as u64) as f64 / (c as u64 * c as u64) as f64;
            (c as f64 / n) * ratio.log2()
        })
        .sum()
}

/// Mutual information between two partitions of the same vertex set, in bits.
pub fn mutual_information(p1: &Partition, p2: &Partition) -> Result<f64, MetricsError> {
    Ok(Confusion::between(p1, p2)?.mutual_information())
}

/// Normalized mutual information `2I/(H₁+H₂)` in [0, 1]: 1 iff the partitions
/// are identical up to relabelling, 0 for independent ones.
///
/// When both partitions are the single community, `H₁ + H₂ = 0` and the
/// formula is 0/0; they are identical, so the result is defined as 1.
pub fn nmi(p1: &Partition, p2: &Partition) -> Result<f64, MetricsError> {
    let i = mutual_information(p1, p2)?;
    let h = entropy(p1) + entropy(p2);
    if h == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * i / h).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Partition;

    fn part(assignment: &[usize]) -> Partition {
        Partition::from_assignment(assignment)
    }

    #[test]
    fn entropy_cases() {
        assert_eq!(entropy(&part(&[0, 0, 0, 0])), 0.0);
        assert!((entropy(&part(&[0, 0, 1, 1])) - 1.0).abs() < 1e-15);
        // all singletons: log2 n
        let n = 16;
        let singles: Vec<usize> = (0..n).collect();
        assert!((entropy(&part(&singles)) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn identical_partitions_have_i_equal_h() {
        let p = part(&[0, 1, 1, 2, 0, 1, 3]);
        let i = mutual_information(&p, &p).unwrap();
        assert_eq!(i, entropy(&p));
        assert_eq!(nmi(&p, &p).unwrap(), 1.0);
    }

    #[test]
    fn independence_with_constant_is_zero() {
        let p1 = part(&[0, 1, 2, 0, 1, 2]);
        let trivial = part(&[0; 6]);
        assert_eq!(mutual_information(&p1, &trivial).unwrap(), 0.0);
        assert_eq!(nmi(&p1, &trivial).unwrap(), 0.0);
    }

    #[test]
    fn crossed_halves_are_independent() {
        // {ab|cd} vs {ac|bd}: every cell has count 1 and log term log2(1) = 0
        let p1 = part(&[0, 0, 1, 1]);
        let p2 = part(&[0, 1, 0, 1]);
        assert_eq!(mutual_information(&p1, &p2).unwrap(), 0.0);
        assert_eq!(nmi(&p1, &p2).unwrap(), 0.0);
    }

    #[test]
    fn both_trivial_is_one() {
        let a = part(&[0, 0, 0]);
        let b = part(&[0, 0, 0]);
        assert_eq!(nmi(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn known_value_cross_checked() {
        // frozen against scikit-learn's normalized_mutual_info_score
        let p1 = part(&[0, 0, 1, 1, 2, 0, 3]);
        let p2 = part(&[1, 0, 0, 0, 0, 1, 0]);
        let v = nmi(&p1, &p2).unwrap();
        assert!((v - 0.34712007071429435).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn symmetry_is_exact() {
        let p1 = part(&[0, 0, 1, 1, 2, 0, 3, 2, 2]);
        let p2 = part(&[1, 0, 0, 0, 0, 1, 0, 2, 1]);
        assert_eq!(nmi(&p1, &p2).unwrap(), nmi(&p2, &p1).unwrap());
        assert_eq!(
            mutual_information(&p1, &p2).unwrap(),
            mutual_information(&p2, &p1).unwrap()
        );
    }

    #[test]
    fn relabelling_is_exact() {
        let p1 = part(&[0, 0, 1, 1, 2, 0, 3, 2, 2]);
        let p2 = part(&[1, 0, 0, 0, 0, 1, 0, 2, 1]);
        // permute community labels of p1: 0->3, 1->0, 2->2, 3->1
        let relabelled = part(&[3, 3, 0, 0, 2, 3, 1, 2, 2]);
        assert_eq!(nmi(&p1, &p2).unwrap(), nmi(&relabelled, &p2).unwrap());
    }

    #[test]
    fn vertex_count_mismatch_is_an_error() {
        let p1 = part(&[0, 1]);
        let p2 = part(&[0, 1, 1]);
        assert_eq!(
            nmi(&p1, &p2).unwrap_err(),
            MetricsError::VertexCountMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn confusion_cells_sum_to_n() {
        let p1 = part(&[0, 0, 1, 1, 2, 0, 3]);
        let p2 = part(&[1, 0, 0, 0, 0, 1, 0]);
        let c = Confusion::between(&p1, &p2).unwrap();
        let total: usize = c.joint.iter().map(|&(_, cnt)| cnt).sum();
        assert_eq!(total, 7);
    }
}
