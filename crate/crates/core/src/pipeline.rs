//! End-to-end orchestration: support selection, foreground clustering,
//! anomaly maps, evaluation and the two ablation sweeps.
//!
//! Queries are independent work units processed on a rayon pool of
//! `workers` threads. Every output depends only on the dataset and the
//! config, never on scheduling.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::anomaly::{compute_anomaly_map, AnomalyMap, Grid, PatchFeatureGrid};
use crate::clustering::{kmeans, KMeansConfig, PointSet};
use crate::error::{Error, Result};
use crate::foreground::{
    binarize_nonzero, morphological_close, to_patch_mask, PatchMask, DEFAULT_CLOSING_RADIUS,
    DEFAULT_TAU,
};
use crate::metrics::{auprc, auroc, pool_pixels};
use crate::raster::{heatmap, image_dims, load_image, load_mask, write_pgm};
use crate::support::{
    select_support, select_support_random, EmbeddingVector, PoolEntry, SupportSelection,
};
use crate::tensor_io::{load_manifest, read_tensor, write_tensor, LoadedManifest};

pub const DEFAULT_K: usize = 2;
pub const DEFAULT_RANDOM_SEEDS: usize = 20;
pub const MAPS_DIR: &str = "maps";
pub const RUN_MANIFEST: &str = "run.txt";
pub const METRICS_CSV: &str = "metrics.csv";
pub const ABLATION_K_CSV: &str = "ablation_k.csv";
pub const ABLATION_STRATEGY_CSV: &str = "ablation_strategy.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Highest global-embedding cosine similarity.
    Esm,
    /// Seeded uniform choice.
    Random,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Esm => "esm",
            Strategy::Random => "random",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "esm" => Ok(Strategy::Esm),
            "random" => Ok(Strategy::Random),
            other => Err(Error::validation(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pooling {
    /// One curve over all test pixels.
    Pooled,
    /// Mean of per-image metrics.
    PerImage,
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pooling::Pooled => "pooled",
            Pooling::PerImage => "per-image",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dataset_root: PathBuf,
    pub output_dir: PathBuf,
    pub k: usize,
    pub seed: u64,
    pub closing_radius: usize,
    pub tau: f64,
    pub strategy: Strategy,
    pub kmeans: KMeansConfig,
    pub pooling: Pooling,
    pub workers: usize,
    pub write_pgm: bool,
    pub cache_centroids: bool,
}

impl PipelineConfig {
    pub fn new(dataset_root: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            dataset_root: dataset_root.into(),
            output_dir: output_dir.into(),
            k: DEFAULT_K,
            seed: 0,
            closing_radius: DEFAULT_CLOSING_RADIUS,
            tau: DEFAULT_TAU,
            strategy: Strategy::Esm,
            kmeans: KMeansConfig::default(),
            pooling: Pooling::Pooled,
            workers: 1,
            write_pgm: false,
            cache_centroids: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::validation("k must be >= 1"));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::validation(format!(
                "tau must be in (0, 1], got {}",
                self.tau
            )));
        }
        if self.workers < 1 {
            return Err(Error::validation("workers must be >= 1"));
        }
        if self.kmeans.restarts < 1 || self.kmeans.max_iter < 1 {
            return Err(Error::validation(
                "kmeans restarts and max_iter must be >= 1",
            ));
        }
        if self.kmeans.tol.is_nan() || self.kmeans.tol < 0.0 {
            return Err(Error::validation("kmeans tol must be >= 0"));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("dataset", self.dataset_root.display().to_string());
        kv("k", self.k.to_string());
        kv("seed", self.seed.to_string());
        kv("closing_radius", self.closing_radius.to_string());
        kv("tau", self.tau.to_string());
        kv("strategy", self.strategy.to_string());
        kv("kmeans_max_iter", self.kmeans.max_iter.to_string());
        kv("kmeans_tol", format!("{:e}", self.kmeans.tol));
        kv("kmeans_restarts", self.kmeans.restarts.to_string());
        kv("pooling", self.pooling.to_string());
        s
    }
}

/// A validated manifest plus the normal pool's embeddings, loaded once and
/// shared by every query.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub manifest: LoadedManifest,
    pub pool: Vec<PoolEntry>,
}

fn load_embedding(path: &Path) -> Result<EmbeddingVector> {
    EmbeddingVector::from_f32(read_tensor(path)?.data())
}

impl Dataset {
    pub fn load(root: impl AsRef<Path>) -> Result<Self> {
        let manifest = load_manifest(root)?;
        let pool = manifest
            .manifest
            .normal_entries
            .iter()
            .map(|e| {
                Ok(PoolEntry {
                    id: e.id.clone(),
                    embedding: load_embedding(&manifest.resolve(&e.embed_path))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { manifest, pool })
    }

    pub fn name(&self) -> String {
        self.manifest.name()
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.manifest
            .manifest
            .query_entries
            .iter()
            .map(|q| q.id.as_str())
    }

    /// Pixel dims the query's map is upsampled to: the query image raster
    /// when present, otherwise the patch grid scaled by the patch size.
    pub fn query_pixel_dims(&self, index: usize) -> Result<(usize, usize)> {
        let q = &self.manifest.manifest.query_entries[index];
        match &q.image_path {
            Some(p) => image_dims(self.manifest.resolve(p)),
            None => {
                let (hp, wp) = self.manifest.query_grids[index];
                let ps = self.manifest.patch_size();
                Ok((hp * ps, wp * ps))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub select: Duration,
    pub foreground: Duration,
    pub cluster: Duration,
    pub score: Duration,
    pub write: Duration,
}

/// A scored query held in memory.
#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub query_id: String,
    pub selection: SupportSelection,
    pub map: AnomalyMap,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct QueryResult {
    pub query_id: String,
    pub support_id: String,
    pub support_similarity: f64,
    pub patch_map_path: PathBuf,
    pub pixel_map_path: PathBuf,
    pub pgm_path: Option<PathBuf>,
    pub timings: StageTimings,
}

#[derive(Debug)]
pub struct DetectReport {
    pub results: Vec<QueryResult>,
    /// Queries that failed, with the reason. The run carries on without them.
    pub failures: Vec<(String, Error)>,
}

impl DetectReport {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

type CacheKey = (String, usize, u64);

/// Scores queries against one dataset under one config.
pub struct Detector<'a> {
    dataset: &'a Dataset,
    config: &'a PipelineConfig,
    cache: Option<Mutex<HashMap<CacheKey, Arc<PointSet>>>>,
}

impl<'a> Detector<'a> {
    pub fn new(dataset: &'a Dataset, config: &'a PipelineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            dataset,
            config,
            cache: config.cache_centroids.then(|| Mutex::new(HashMap::new())),
        })
    }

    /// Foreground patch mask of a normal image. Falls back to all patches
    /// when nothing survives the vote.
    pub fn support_patch_mask(&self, normal_index: usize) -> Result<PatchMask> {
        let m = &self.dataset.manifest;
        let entry = &m.manifest.normal_entries[normal_index];
        let (hp, wp) = m.normal_grids[normal_index];
        let image = load_image(m.resolve(&entry.image_path))?;
        let pixels = binarize_nonzero(&image);
        let closed = morphological_close(&pixels, self.config.closing_radius as i64)?;
        let mask = to_patch_mask(&closed, m.patch_size(), self.config.tau)?;
        if (mask.hp(), mask.wp()) != (hp, wp) {
            return Err(Error::validation(format!(
                "support {}: image gives a {}x{} patch grid, features are {hp}x{wp}",
                entry.id,
                mask.hp(),
                mask.wp()
            )));
        }
        if mask.is_empty() {
            warn!(
                "support {}: empty foreground, clustering all patches",
                entry.id
            );
            return Ok(PatchMask::all(hp, wp, true));
        }
        Ok(mask)
    }

    fn compute_centroids(
        &self,
        normal_index: usize,
        timings: &mut StageTimings,
    ) -> Result<PointSet> {
        let m = &self.dataset.manifest;
        let entry = &m.manifest.normal_entries[normal_index];
        let t = Instant::now();
        let mask = self.support_patch_mask(normal_index)?;
        timings.foreground = t.elapsed();
        let t = Instant::now();
        let features = PatchFeatureGrid::from_tensor(&read_tensor(m.resolve(&entry.patch_path))?)?;
        let points = features.select(&mask)?;
        if self.config.k > points.len() {
            return Err(Error::validation(format!(
                "support {}: k = {} exceeds its {} foreground patches",
                entry.id,
                self.config.k,
                points.len()
            )));
        }
        let fit = kmeans(
            &points,
            self.config.k,
            self.config.seed,
            &self.config.kmeans,
        )?;
        timings.cluster = t.elapsed();
        Ok(fit.centroids)
    }

    /// Foreground K-means prototypes of a normal image, memoized by
    /// `(support_id, k, seed)` when caching is on. Cache hits leave
    /// `timings` untouched.
    pub fn support_centroids(
        &self,
        normal_index: usize,
        timings: &mut StageTimings,
    ) -> Result<Arc<PointSet>> {
        let Some(cache) = &self.cache else {
            return self.compute_centroids(normal_index, timings).map(Arc::new);
        };
        let key = (
            self.dataset.pool[normal_index].id.clone(),
            self.config.k,
            self.config.seed,
        );
        if let Some(hit) = cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        let fresh = Arc::new(self.compute_centroids(normal_index, timings)?);
        // Concurrent misses compute identical values; the first insert wins.
        let mut guard = cache.lock().unwrap();
        Ok(Arc::clone(guard.entry(key).or_insert(fresh)))
    }

    pub fn select(&self, query_index: usize, query: &EmbeddingVector) -> Result<SupportSelection> {
        match self.config.strategy {
            Strategy::Esm => select_support(query, &self.dataset.pool),
            Strategy::Random => select_support_random(
                query,
                &self.dataset.pool,
                self.config.seed.wrapping_add(query_index as u64),
            ),
        }
    }

    pub fn score_query(&self, query_index: usize) -> Result<QueryOutcome> {
        let m = &self.dataset.manifest;
        let q = &m.manifest.query_entries[query_index];
        let mut timings = StageTimings::default();

        let t = Instant::now();
        let embedding = load_embedding(&m.resolve(&q.embed_path))?;
        let selection = self.select(query_index, &embedding)?;
        timings.select = t.elapsed();

        let centroids = self.support_centroids(selection.index, &mut timings)?;

        let t = Instant::now();
        let features = PatchFeatureGrid::from_tensor(&read_tensor(m.resolve(&q.patch_path))?)?;
        let (h, w) = self.dataset.query_pixel_dims(query_index)?;
        let map = compute_anomaly_map(&features, &centroids, h, w)?;
        timings.score = t.elapsed();

        Ok(QueryOutcome {
            query_id: q.id.clone(),
            selection,
            map,
            timings,
        })
    }

    /// Scores every query on a pool of `config.workers` threads. Results
    /// keep manifest order.
    pub fn score_all(&self) -> Result<Vec<(String, Result<QueryOutcome>)>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.workers)
            .build()
            .map_err(|e| Error::validation(format!("building worker pool: {e}")))?;
        let ids: Vec<String> = self.dataset.query_ids().map(str::to_string).collect();
        Ok(pool.install(|| {
            ids.into_par_iter()
                .enumerate()
                .map(|(i, id)| {
                    let r = self.score_query(i);
                    (id, r)
                })
                .collect()
        }))
    }
}

fn create_dir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

pub fn map_paths(output_dir: &Path, query_id: &str) -> (PathBuf, PathBuf, PathBuf) {
    let dir = output_dir.join(MAPS_DIR);
    (
        dir.join(format!("{query_id}.patch.dadf")),
        dir.join(format!("{query_id}.pixel.dadf")),
        dir.join(format!("{query_id}.pgm")),
    )
}

fn persist(config: &PipelineConfig, outcome: &QueryOutcome) -> Result<QueryResult> {
    let t = Instant::now();
    let (patch, pixel, pgm) = map_paths(&config.output_dir, &outcome.query_id);
    write_tensor(&outcome.map.patch_map.to_tensor()?, &patch)?;
    write_tensor(&outcome.map.pixel_map.to_tensor()?, &pixel)?;
    let pgm_path = if config.write_pgm {
        write_pgm(&pgm, &heatmap(&outcome.map.pixel_map))?;
        Some(pgm)
    } else {
        None
    };
    let mut timings = outcome.timings;
    timings.write = t.elapsed();
    Ok(QueryResult {
        query_id: outcome.query_id.clone(),
        support_id: outcome.selection.support_id.clone(),
        support_similarity: outcome.selection.similarity,
        patch_map_path: patch,
        pixel_map_path: pixel,
        pgm_path,
        timings,
    })
}

/// Scores every query and writes its maps under `<out>/maps/`, plus a run
/// manifest recording the resolved config and each support selection.
pub fn run_detect(config: &PipelineConfig) -> Result<DetectReport> {
    config.validate()?;
    let dataset = Dataset::load(&config.dataset_root)?;
    detect_dataset(&dataset, config)
}

pub fn detect_dataset(dataset: &Dataset, config: &PipelineConfig) -> Result<DetectReport> {
    create_dir(&config.output_dir.join(MAPS_DIR))?;
    let detector = Detector::new(dataset, config)?;
    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut log = config.describe();
    log.push_str("[queries]\n");
    for (id, scored) in detector.score_all()? {
        match scored.and_then(|o| persist(config, &o)) {
            Ok(r) => {
                info!(
                    "{}: support {} ({:.4}), select {:?} cluster {:?} score {:?} write {:?}",
                    r.query_id,
                    r.support_id,
                    r.support_similarity,
                    r.timings.select,
                    r.timings.cluster,
                    r.timings.score,
                    r.timings.write
                );
                log.push_str(&format!(
                    "{} support={} similarity={:.9}\n",
                    r.query_id, r.support_id, r.support_similarity
                ));
                results.push(r);
            }
            Err(e) => {
                warn!("{id}: skipped: {e}");
                log.push_str(&format!("{id} failed: {e}\n"));
                failures.push((id, e));
            }
        }
    }
    let run = config.output_dir.join(RUN_MANIFEST);
    fs::write(&run, log).map_err(|e| Error::io(&run, e))?;
    Ok(DetectReport { results, failures })
}

/// One metrics row. `auroc`/`auprc` are fractions; the CSV prints percent.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub dataset: String,
    pub k: usize,
    pub strategy: Strategy,
    pub auroc: f64,
    pub auprc: f64,
    pub n_queries: usize,
    pub n_pixels: usize,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    dataset: &'a str,
    k: usize,
    strategy: String,
    auroc: String,
    auprc: String,
    n_queries: usize,
    n_pixels: usize,
}

pub fn write_csv(path: &Path, rows: &[EvalRow]) -> Result<()> {
    let to_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::validation(format!("writing CSV: {other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    for r in rows {
        w.serialize(CsvRow {
            dataset: &r.dataset,
            k: r.k,
            strategy: r.strategy.to_string(),
            auroc: format!("{:.2}", 100.0 * r.auroc),
            auprc: format!("{:.2}", 100.0 * r.auprc),
            n_queries: r.n_queries,
            n_pixels: r.n_pixels,
        })
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Pixel metrics over `(query_index, pixel map)` pairs. Queries without a
/// ground-truth mask are skipped with a warning.
pub fn evaluate_maps(
    dataset: &Dataset,
    maps: &[(usize, Grid)],
    config: &PipelineConfig,
) -> Result<EvalRow> {
    let entries = &dataset.manifest.manifest.query_entries;
    let mut used_maps = Vec::new();
    let mut masks = Vec::new();
    for (i, map) in maps {
        let q = &entries[*i];
        let Some(mask_path) = &q.mask_path else {
            warn!("{}: no ground-truth mask, excluded from evaluation", q.id);
            continue;
        };
        masks.push(load_mask(dataset.manifest.resolve(mask_path))?);
        used_maps.push(map);
    }
    if used_maps.is_empty() {
        return Err(Error::validation(
            "no queries with both a map and a mask to evaluate",
        ));
    }
    let n_pixels = used_maps.iter().map(|m| m.values().len()).sum();
    let (auroc_v, auprc_v, n_queries) = match config.pooling {
        Pooling::Pooled => {
            let mask_refs: Vec<_> = masks.iter().collect();
            let pooled = pool_pixels(&used_maps, &mask_refs)?;
            (auroc(&pooled)?, auprc(&pooled)?, used_maps.len())
        }
        Pooling::PerImage => {
            let (mut sum_roc, mut sum_pr, mut n) = (0.0, 0.0, 0usize);
            for (map, mask) in used_maps.iter().zip(&masks) {
                let one = pool_pixels(&[map], &[mask])?;
                match (auroc(&one), auprc(&one)) {
                    (Ok(a), Ok(p)) => {
                        sum_roc += a;
                        sum_pr += p;
                        n += 1;
                    }
                    _ => warn!("per-image metrics undefined for one query (single-class mask)"),
                }
            }
            if n == 0 {
                return Err(Error::UndefinedMetric(
                    "no query has both anomalous and normal pixels".into(),
                ));
            }
            (sum_roc / n as f64, sum_pr / n as f64, n)
        }
    };
    Ok(EvalRow {
        dataset: dataset.name(),
        k: config.k,
        strategy: config.strategy,
        auroc: auroc_v,
        auprc: auprc_v,
        n_queries,
        n_pixels,
    })
}

/// Evaluates maps previously written by [`run_detect`] into
/// `<out>/metrics.csv`.
pub fn run_eval(config: &PipelineConfig) -> Result<EvalRow> {
    config.validate()?;
    let dataset = Dataset::load(&config.dataset_root)?;
    let mut maps = Vec::new();
    for (i, id) in dataset.query_ids().enumerate() {
        let (_, pixel, _) = map_paths(&config.output_dir, id);
        if !pixel.is_file() {
            warn!("{id}: no anomaly map at {}, excluded", pixel.display());
            continue;
        }
        maps.push((i, Grid::from_tensor(&read_tensor(&pixel)?)?));
    }
    let row = evaluate_maps(&dataset, &maps, config)?;
    create_dir(&config.output_dir)?;
    write_csv(
        &config.output_dir.join(METRICS_CSV),
        std::slice::from_ref(&row),
    )?;
    Ok(row)
}

/// Scores in memory and evaluates, without writing maps.
fn detect_and_evaluate(dataset: &Dataset, config: &PipelineConfig) -> Result<(EvalRow, usize)> {
    let detector = Detector::new(dataset, config)?;
    let mut maps = Vec::new();
    let mut failed = 0;
    for (i, (id, scored)) in detector.score_all()?.into_iter().enumerate() {
        match scored {
            Ok(o) => maps.push((i, o.map.pixel_map)),
            Err(e) => {
                warn!("{id}: skipped: {e}");
                failed += 1;
            }
        }
    }
    Ok((evaluate_maps(dataset, &maps, config)?, failed))
}

#[derive(Debug, Clone)]
pub struct AblationReport {
    pub rows: Vec<EvalRow>,
    /// Query failures summed over every run in the sweep.
    pub failed_queries: usize,
}

/// One detect+eval per distinct `k` (first occurrence order), written to
/// `<out>/ablation_k.csv`.
pub fn run_ablation_k(config: &PipelineConfig, k_values: &[usize]) -> Result<AblationReport> {
    let mut ks = Vec::new();
    for &k in k_values {
        if ks.contains(&k) {
            warn!("duplicate k = {k} ignored");
        } else {
            ks.push(k);
        }
    }
    if ks.is_empty() {
        return Err(Error::validation("no k values given"));
    }
    let dataset = Dataset::load(&config.dataset_root)?;
    let mut rows = Vec::new();
    let mut failed_queries = 0;
    for k in ks {
        let cfg = PipelineConfig {
            k,
            ..config.clone()
        };
        let (row, failed) = detect_and_evaluate(&dataset, &cfg)?;
        failed_queries += failed;
        rows.push(row);
    }
    create_dir(&config.output_dir)?;
    write_csv(&config.output_dir.join(ABLATION_K_CSV), &rows)?;
    Ok(AblationReport {
        rows,
        failed_queries,
    })
}

/// Random support (mean over `random_seeds` consecutive seeds starting at
/// `config.seed`) versus embedding matching, written to
/// `<out>/ablation_strategy.csv`.
pub fn run_ablation_strategy(
    config: &PipelineConfig,
    random_seeds: usize,
) -> Result<AblationReport> {
    if random_seeds == 0 {
        return Err(Error::validation("need at least one random seed"));
    }
    let dataset = Dataset::load(&config.dataset_root)?;
    let mut failed_queries = 0;

    let mut random_rows = Vec::with_capacity(random_seeds);
    for s in 0..random_seeds as u64 {
        let cfg = PipelineConfig {
            strategy: Strategy::Random,
            seed: config.seed.wrapping_add(s),
            ..config.clone()
        };
        let (row, failed) = detect_and_evaluate(&dataset, &cfg)?;
        failed_queries += failed;
        random_rows.push(row);
    }
    let first = &random_rows[0];
    // Offset form: seeds that agree average to exactly their common value.
    let mean = |f: fn(&EvalRow) -> f64| {
        let base = f(first);
        base + random_rows.iter().map(|r| f(r) - base).sum::<f64>() / random_rows.len() as f64
    };
    let random = EvalRow {
        dataset: first.dataset.clone(),
        k: config.k,
        strategy: Strategy::Random,
        auroc: mean(|r| r.auroc),
        auprc: mean(|r| r.auprc),
        n_queries: first.n_queries,
        n_pixels: first.n_pixels,
    };

    let cfg = PipelineConfig {
        strategy: Strategy::Esm,
        ..config.clone()
    };
    let (esm, failed) = detect_and_evaluate(&dataset, &cfg)?;
    failed_queries += failed;

    let rows = vec![random, esm];
    create_dir(&config.output_dir)?;
    write_csv(&config.output_dir.join(ABLATION_STRATEGY_CSV), &rows)?;
    Ok(AblationReport {
        rows,
        failed_queries,
    })
}
