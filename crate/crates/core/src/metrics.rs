//! Pixel-level AUROC and average precision.
//!
//! Both metrics treat tied scores as a single threshold block, so results
//! do not depend on the order of equal-scored pixels.

use crate::anomaly::Grid;
use crate::error::{Error, Result};
use crate::foreground::PixelMask;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredPixels {
    pub scores: Vec<f64>,
    pub labels: Vec<bool>,
}

impl ScoredPixels {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::validation(format!(
                "{} scores vs {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::validation("scores must be finite"));
        }
        Ok(Self { scores, labels })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn negatives(&self) -> usize {
        self.len() - self.positives()
    }
}

/// `(positives, negatives)` per distinct score, ascending by score.
fn tie_blocks(sp: &ScoredPixels) -> Vec<(u64, u64)> {
    let mut order: Vec<usize> = (0..sp.len()).collect();
    order.sort_unstable_by(|&a, &b| sp.scores[a].total_cmp(&sp.scores[b]));
    let mut blocks: Vec<(u64, u64)> = Vec::new();
    let mut prev: Option<f64> = None;
    for i in order {
        let s = sp.scores[i];
        if prev != Some(s) {
            blocks.push((0, 0));
            prev = Some(s);
        }
        let b = blocks.last_mut().unwrap();
        if sp.labels[i] {
            b.0 += 1;
        } else {
            b.1 += 1;
        }
    }
    blocks
}

/// Mann-Whitney AUROC: probability that a random positive outscores a
/// random negative, ties counted as one half. `O(n log n)`.
pub fn auroc(sp: &ScoredPixels) -> Result<f64> {
    let (p, n) = (sp.positives() as u64, sp.negatives() as u64);
    if p == 0 || n == 0 {
        return Err(Error::UndefinedMetric(format!(
            "AUROC needs both classes, got {p} positives and {n} negatives"
        )));
    }
    // Twice the U statistic, kept integral until the final division.
    let mut twice_u: u128 = 0;
    let mut neg_below: u64 = 0;
    for (pos, neg) in tie_blocks(sp) {
        twice_u += pos as u128 * (2 * neg_below as u128 + neg as u128);
        neg_below += neg;
    }
    Ok(twice_u as f64 / (2.0 * p as f64 * n as f64))
}

/// Non-interpolated average precision, `sum_t (R_t - R_{t-1}) P_t`, with one
/// threshold per distinct score.
pub fn auprc(sp: &ScoredPixels) -> Result<f64> {
    let p = sp.positives() as u64;
    if p == 0 {
        return Err(Error::UndefinedMetric(
            "average precision needs at least one positive".into(),
        ));
    }
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut ap = 0.0;
    for (pos, neg) in tie_blocks(sp).into_iter().rev() {
        tp += pos;
        fp += neg;
        if pos > 0 {
            ap += (pos as f64 / p as f64) * (tp as f64 / (tp + fp) as f64);
        }
    }
    Ok(ap)
}

/// Concatenates every map's pixels with the matching ground-truth mask.
pub fn pool_pixels(maps: &[&Grid], masks: &[&PixelMask]) -> Result<ScoredPixels> {
    if maps.is_empty() {
        return Err(Error::validation("no maps to pool"));
    }
    if maps.len() != masks.len() {
        return Err(Error::validation(format!(
            "{} maps vs {} masks",
            maps.len(),
            masks.len()
        )));
    }
    let total: usize = maps.iter().map(|m| m.values().len()).sum();
    let mut scores = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for (i, (map, mask)) in maps.iter().zip(masks).enumerate() {
        if (map.rows(), map.cols()) != (mask.height(), mask.width()) {
            return Err(Error::validation(format!(
                "map {i} is {}x{} but its mask is {}x{}",
                map.rows(),
                map.cols(),
                mask.height(),
                mask.width()
            )));
        }
        scores.extend_from_slice(map.values());
        labels.extend_from_slice(mask.bits());
    }
    ScoredPixels::new(scores, labels)
}
