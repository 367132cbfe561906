//! Support-image selection.
//!
//! Each query is paired with one normal image from the pool. The default
//! strategy picks the pool entry whose global embedding has the highest
//! cosine similarity to the query embedding; the random strategy is the
//! ablation baseline.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Norms below this are treated as zero and score a neutral 0.
pub const ZERO_NORM_EPS: f64 = 1e-12;

/// Global image descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("embedding must have dimension >= 1"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("embedding contains non-finite values"));
        }
        Ok(Self(values))
    }

    pub fn from_f32(values: &[f32]) -> Result<Self> {
        Self::new(values.iter().map(|&v| v as f64).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Cosine of the angle between two equal-length vectors, clamped to
/// `[-1, 1]`. Returns 0 if either norm is below [`ZERO_NORM_EPS`].
///
/// Callers guarantee equal lengths; see [`cosine_similarity`] for the
/// checked variant.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let (na, nb) = (na.sqrt(), nb.sqrt());
    if na < ZERO_NORM_EPS || nb < ZERO_NORM_EPS {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::validation(format!(
            "embedding dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(cosine(a.values(), b.values()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolEntry {
    pub id: String,
    pub embedding: EmbeddingVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportSelection {
    pub support_id: String,
    /// Index of the selected entry in the pool.
    pub index: usize,
    pub similarity: f64,
    /// Every pool entry's score, sorted descending, ties by ascending id.
    pub runner_up_scores: Vec<(String, f64)>,
}

fn rank_desc(a: &(String, f64), b: &(String, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

fn scores(query: &EmbeddingVector, pool: &[PoolEntry]) -> Result<Vec<(String, f64)>> {
    if pool.is_empty() {
        return Err(Error::validation("support pool is empty"));
    }
    pool.iter()
        .map(|e| Ok((e.id.clone(), cosine_similarity(query, &e.embedding)?)))
        .collect()
}

/// Embedding similarity matching: the pool entry with the highest cosine
/// similarity to `query`. Exact ties go to the smallest id.
pub fn select_support(query: &EmbeddingVector, pool: &[PoolEntry]) -> Result<SupportSelection> {
    let scored = scores(query, pool)?;
    let best = (0..scored.len())
        .min_by(|&i, &j| rank_desc(&scored[i], &scored[j]))
        .expect("pool is non-empty");
    let mut ranked = scored.clone();
    ranked.sort_by(rank_desc);
    Ok(SupportSelection {
        support_id: scored[best].0.clone(),
        index: best,
        similarity: scored[best].1,
        runner_up_scores: ranked,
    })
}

/// Uniform seeded choice: index = first splitmix64 output mod pool size.
pub fn select_support_random(
    query: &EmbeddingVector,
    pool: &[PoolEntry],
    seed: u64,
) -> Result<SupportSelection> {
    let scored = scores(query, pool)?;
    let index = SplitMix64::new(seed).next_index(pool.len());
    let mut ranked = scored.clone();
    ranked.sort_by(rank_desc);
    Ok(SupportSelection {
        support_id: scored[index].0.clone(),
        index,
        similarity: scored[index].1,
        runner_up_scores: ranked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn emb(v: &[f64]) -> EmbeddingVector {
        EmbeddingVector::new(v.to_vec()).unwrap()
    }

    fn entry(id: &str, v: &[f64]) -> PoolEntry {
        PoolEntry {
            id: id.to_string(),
            embedding: emb(v),
        }
    }

    #[test]
    fn cosine_examples() {
        let c = |a: &[f64], b: &[f64]| cosine_similarity(&emb(a), &emb(b)).unwrap();
        assert_eq!(c(&[1.0, 0.0], &[1.0, 0.0]), 1.0);
        assert_eq!(c(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        assert!((c(&[1.0, 0.0], &[1.0, 1.0]) - 0.7071067811865475).abs() < 1e-15);
        assert_eq!(c(&[0.0, 0.0], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn cosine_dim_mismatch() {
        let err = cosine_similarity(&emb(&[1.0]), &emb(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn embedding_rejects_bad_values() {
        assert!(EmbeddingVector::new(vec![]).is_err());
        assert!(EmbeddingVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn selects_most_similar() {
        let pool = [entry("a", &[1.0, 0.0]), entry("b", &[0.0, 1.0])];
        let sel = select_support(&emb(&[1.0, 0.1]), &pool).unwrap();
        assert_eq!(sel.support_id, "a");
        assert!((sel.similarity - 0.995037).abs() < 1e-6);
        assert_eq!(sel.runner_up_scores[1].0, "b");
        assert!((sel.runner_up_scores[1].1 - 0.0995037).abs() < 1e-6);
    }

    #[test]
    fn tie_goes_to_smallest_id() {
        let pool = [entry("b", &[1.0, 0.0]), entry("a", &[1.0, 0.0])];
        let sel = select_support(&emb(&[1.0, 0.0]), &pool).unwrap();
        assert_eq!(sel.support_id, "a");
        assert_eq!(sel.index, 1);
        assert_eq!(sel.runner_up_scores[0].0, "a");
        assert_eq!(sel.runner_up_scores[1].0, "b");
    }

    #[test]
    fn empty_pool() {
        assert!(matches!(
            select_support(&emb(&[1.0]), &[]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            select_support_random(&emb(&[1.0]), &[], 3),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn random_single_entry_is_forced() {
        let pool = [entry("only", &[0.3, 0.4])];
        for seed in [0, 1, u64::MAX] {
            let sel = select_support_random(&emb(&[1.0, 0.0]), &pool, seed).unwrap();
            assert_eq!(sel.support_id, "only");
            assert!((sel.similarity - 0.6).abs() < 1e-12);
        }
    }

    #[test]
    fn random_is_deterministic_and_uniform() {
        let pool: Vec<PoolEntry> = (0..7)
            .map(|i| entry(&format!("n{i}"), &[1.0, i as f64]))
            .collect();
        let q = emb(&[1.0, 1.0]);
        assert_eq!(
            select_support_random(&q, &pool, 99).unwrap(),
            select_support_random(&q, &pool, 99).unwrap()
        );
        let mut counts = [0usize; 7];
        for seed in 0..10_000u64 {
            counts[select_support_random(&q, &pool, seed).unwrap().index] += 1;
        }
        for c in counts {
            let freq = c as f64 / 10_000.0;
            assert!((freq - 1.0 / 7.0).abs() <= 0.02, "{counts:?}");
        }
    }

    #[test]
    fn argmax_matches_naive_scan() {
        // Independent scan in f64 without the shared `cosine` helper.
        let mut rng = SplitMix64::new(7);
        let mut gauss = || rng.next_f64() * 2.0 - 1.0;
        let pool: Vec<PoolEntry> = (0..50)
            .map(|i| {
                entry(
                    &format!("p{i:02}"),
                    &(0..8).map(|_| gauss()).collect::<Vec<_>>(),
                )
            })
            .collect();
        let q: Vec<f64> = (0..8).map(|_| gauss()).collect();
        let naive = |a: &[f64], b: &[f64]| {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            dot / (na * nb)
        };
        let mut best = (0, f64::NEG_INFINITY);
        for (i, e) in pool.iter().enumerate() {
            let s = naive(&q, e.embedding.values());
            if s > best.1 {
                best = (i, s);
            }
        }
        let sel = select_support(&emb(&q), &pool).unwrap();
        assert_eq!(sel.support_id, pool[best.0].id);
        assert!((sel.similarity - best.1).abs() < 1e-12);
    }

    fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, d)
    }

    proptest! {
        #[test]
        fn cosine_is_symmetric(a in vec_strategy(6), b in vec_strategy(6)) {
            prop_assert_eq!(cosine(&a, &b), cosine(&b, &a));
            let c = cosine(&a, &b);
            prop_assert!((-1.0..=1.0).contains(&c));
        }

        #[test]
        fn selection_is_scale_invariant(
            q in vec_strategy(5),
            pool in prop::collection::vec(vec_strategy(5), 1..12),
            scale in 0.01f64..100.0,
            which in any::<prop::sample::Index>(),
        ) {
            let entries: Vec<PoolEntry> = pool
                .iter()
                .enumerate()
                .map(|(i, v)| entry(&format!("e{i:02}"), v))
                .collect();
            let base = select_support(&emb(&q), &entries).unwrap();
            // Skip near-ties, where rescaling may legitimately flip the last bit.
            let gap = base.runner_up_scores.get(1).map(|r| base.similarity - r.1);
            prop_assume!(gap.is_none_or(|g| g > 1e-9));

            let scaled_q: Vec<f64> = q.iter().map(|x| x * scale).collect();
            prop_assert_eq!(&select_support(&emb(&scaled_q), &entries).unwrap().support_id, &base.support_id);

            let mut scaled_pool = entries.clone();
            let j = which.index(scaled_pool.len());
            scaled_pool[j].embedding =
                emb(&pool[j].iter().map(|x| x * scale).collect::<Vec<_>>());
            prop_assert_eq!(&select_support(&emb(&q), &scaled_pool).unwrap().support_id, &base.support_id);
        }
    }
}
