//! K-means prototypes over foreground patch features.
//!
//! Lloyd iterations (nearest-centroid assignment, then mean update) from a
//! seeded k-means++ start, repeated over several restarts; the restart with
//! the lowest within-cluster sum of squares wins.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Row-major `N x D` matrix of finite feature vectors. Also used for
/// centroid matrices (`K x D`).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    dim: usize,
}

impl PointSet {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("point dimension must be >= 1"));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::validation(format!(
                "{} values do not form a non-empty set of {dim}-d points",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("point set contains non-finite values"));
        }
        Ok(Self { data, dim })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::validation("ragged point rows"));
        }
        Self::new(rows.concat(), dim)
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    pub centroids: PointSet,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub objective: f64,
    pub iterations_run: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub max_iter: usize,
    /// Converged once no centroid moves farther than this (L2).
    pub tol: f64,
    pub restarts: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-6,
            restarts: 10,
        }
    }
}

/// One Lloyd run with its per-iteration objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydRun {
    pub result: CentroidSet,
    /// Objective after each assign+update pair.
    pub objective_trace: Vec<f64>,
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid per point; exact ties go to the smaller index.
pub fn assign(points: &PointSet, centroids: &PointSet) -> Vec<usize> {
    assert_eq!(points.dim(), centroids.dim(), "point/centroid dim mismatch");
    points
        .rows()
        .map(|x| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (k, mu) in centroids.rows().enumerate() {
                let d = squared_distance(x, mu);
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            best
        })
        .collect()
}

fn cluster_means(points: &PointSet, assignments: &[usize], k: usize) -> (Vec<f64>, Vec<usize>) {
    let dim = points.dim();
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (x, &c) in points.rows().zip(assignments) {
        counts[c] += 1;
        for (s, v) in sums[c * dim..(c + 1) * dim].iter_mut().zip(x) {
            *s += v;
        }
    }
    for (c, &n) in counts.iter().enumerate() {
        if n > 0 {
            for s in &mut sums[c * dim..(c + 1) * dim] {
                *s /= n as f64;
            }
        }
    }
    (sums, counts)
}

/// Recomputes each centroid as the mean of its members.
///
/// An empty cluster takes over the point farthest from its own cluster mean
/// (lowest index on ties, donors keep at least one member); `assignments` is
/// updated to reflect the move. Repeats until no cluster is empty.
pub fn update_centroids(points: &PointSet, assignments: &mut [usize], k: usize) -> PointSet {
    assert_eq!(points.len(), assignments.len());
    assert!(k >= 1 && k <= points.len(), "need 1 <= k <= N");
    let dim = points.dim();
    loop {
        let (means, counts) = cluster_means(points, assignments, k);
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return PointSet { data: means, dim };
        };
        let mut donor_point = None;
        let mut far = -1.0;
        for (i, x) in points.rows().enumerate() {
            let c = assignments[i];
            if counts[c] < 2 {
                continue;
            }
            let d = squared_distance(x, &means[c * dim..(c + 1) * dim]);
            if d > far {
                far = d;
                donor_point = Some(i);
            }
        }
        let i = donor_point.expect("k <= N guarantees a cluster with two members");
        assignments[i] = empty;
    }
}

/// Sum over points of squared distance to their assigned centroid.
pub fn objective(points: &PointSet, centroids: &PointSet, assignments: &[usize]) -> f64 {
    points
        .rows()
        .zip(assignments)
        .map(|(x, &c)| squared_distance(x, centroids.row(c)))
        .sum()
}

/// k-means++ seeding: first center uniform, each further center drawn with
/// probability proportional to squared distance to the nearest chosen one.
pub fn kmeans_plus_plus(points: &PointSet, k: usize, rng: &mut SplitMix64) -> PointSet {
    let n = points.len();
    assert!(k >= 1 && k <= n);
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.next_index(n));
    let mut d2: Vec<f64> = points
        .rows()
        .map(|x| squared_distance(x, points.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // Every point coincides with a chosen center.
            (0..n).find(|i| !chosen.contains(i)).expect("k <= N")
        };
        chosen.push(next);
        for (i, x) in points.rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(x, points.row(next)));
        }
    }
    let data = chosen
        .iter()
        .flat_map(|&i| points.row(i).to_vec())
        .collect();
    PointSet {
        data,
        dim: points.dim(),
    }
}

/// Lloyd iterations from `init` until the largest centroid shift drops
/// below `tol` or `max_iter` pairs have run.
pub fn lloyd(points: &PointSet, init: PointSet, max_iter: usize, tol: f64) -> LloydRun {
    let k = init.len();
    let mut centroids = init;
    let mut assignments = assign(points, &centroids);
    let mut trace = Vec::new();
    let mut iterations_run = 0;
    for it in 1..=max_iter.max(1) {
        if it > 1 {
            assignments = assign(points, &centroids);
        }
        let updated = update_centroids(points, &mut assignments, k);
        let shift = centroids
            .rows()
            .zip(updated.rows())
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = updated;
        iterations_run = it;
        trace.push(objective(points, &centroids, &assignments));
        if shift < tol {
            break;
        }
    }
    let objective = *trace.last().expect("at least one iteration");
    LloydRun {
        result: CentroidSet {
            centroids,
            assignments,
            objective,
            iterations_run,
            k,
        },
        objective_trace: trace,
    }
}

fn check_k(points: &PointSet, k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::validation("k must be >= 1"));
    }
    if k > points.len() {
        return Err(Error::validation(format!(
            "k = {k} exceeds the number of points ({})",
            points.len()
        )));
    }
    Ok(())
}

/// Every restart's run; restart `r` seeds its k-means++ stream with
/// `seed + r` (wrapping).
pub fn kmeans_runs(
    points: &PointSet,
    k: usize,
    seed: u64,
    cfg: &KMeansConfig,
) -> Result<Vec<LloydRun>> {
    check_k(points, k)?;
    Ok((0..cfg.restarts.max(1) as u64)
        .map(|r| {
            let mut rng = SplitMix64::new(seed.wrapping_add(r));
            let init = kmeans_plus_plus(points, k, &mut rng);
            lloyd(points, init, cfg.max_iter, cfg.tol)
        })
        .collect())
}

/// Best-of-restarts K-means. Ties on the objective go to the earliest restart.
pub fn kmeans(points: &PointSet, k: usize, seed: u64, cfg: &KMeansConfig) -> Result<CentroidSet> {
    let runs = kmeans_runs(points, k, seed, cfg)?;
    let mut best: Option<LloydRun> = None;
    for run in runs {
        if best
            .as_ref()
            .is_none_or(|b| run.result.objective < b.result.objective)
        {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart").result)
}
