use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::tokenize::scoring_tokens;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("similarity needs non-empty token lists")]
    EmptyInput,
}

/// Maps tokens to unit vectors of a fixed dimension.
pub trait Embedder: Send + Sync {
    fn id(&self) -> &str;
    fn dim(&self) -> usize;
    fn embed(&self, tokens: &[String]) -> Vec<Vec<f64>>;
}

/// Offline embedder: each token hashes to a point on the unit sphere.
///
/// Coordinates come from SHA-256 over `(seed, token, block)` read as
/// little-endian `u32`s mapped to `[-1, 1)`, then normalized. Only integer
/// ops, multiplication, division and `sqrt` are involved, so the vectors are
/// bit-identical across platforms.
#[derive(Debug, Clone)]
pub struct HashEmbedder {
    id: String,
    dim: usize,
    seed: u64,
}

impl HashEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        HashEmbedder {
            id: format!("hash-d{dim}-s{seed}"),
            dim,
            seed,
        }
    }

    pub fn embed_token(&self, token: &str) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim);
        let mut block = 0u32;
        while v.len() < self.dim {
            let mut h = Sha256::new();
            h.update(self.seed.to_le_bytes());
            h.update((token.len() as u64).to_le_bytes());
            h.update(token.as_bytes());
            h.update(block.to_le_bytes());
            let digest = h.finalize();
            for chunk in digest.chunks_exact(4) {
                if v.len() == self.dim {
                    break;
                }
                let u = u32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
                v.push(u as f64 / 2_147_483_648.0 - 1.0);
            }
            block += 1;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            v[0] = 1.0;
            return v;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        v
    }
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder::new(64, 0)
    }
}

impl Embedder for HashEmbedder {
    fn id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, tokens: &[String]) -> Vec<Vec<f64>> {
        tokens.iter().map(|t| self.embed_token(t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Greedy-matching BERTScore without IDF weighting or baseline rescaling.
///
/// Precision averages, over translated tokens, the best cosine against the
/// original; recall does the converse. F1 is clamped to `[0, 1]` and is 0
/// when `P + R <= 0`.
pub fn bertscore_f1(
    original: &[String],
    translated: &[String],
    embedder: &dyn Embedder,
) -> Result<Prf, MetricError> {
    if original.is_empty() || translated.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let orig = embedder.embed(original);
    let trans = embedder.embed(translated);
    let sims: Vec<Vec<f64>> = trans
        .iter()
        .map(|t| orig.iter().map(|o| dot(t, o)).collect())
        .collect();
    let precision = sims
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / trans.len() as f64;
    let recall = (0..orig.len())
        .map(|j| sims.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / orig.len() as f64;
    let f1 = if precision + recall <= 0.0 {
        0.0
    } else {
        (2.0 * precision * recall / (precision + recall)).clamp(0.0, 1.0)
    };
    Ok(Prf {
        precision,
        recall,
        f1,
    })
}

/// BERTScore F1 between two instruction texts using the shared tokenizer.
pub fn instruction_similarity(
    original: &str,
    translated: &str,
    embedder: &dyn Embedder,
) -> Result<f64, MetricError> {
    bertscore_f1(&scoring_tokens(original), &scoring_tokens(translated), embedder).map(|p| p.f1)
}
