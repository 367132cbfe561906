//! Synthetic benchmark generator.
//!
//! Normal images are ellipses on a black background. Foreground patch
//! features sit near one of two orthonormal prototype directions (a large
//! majority region and a smaller minority cap), background patches near a
//! mix of a third direction and the prototypes. Each query copies the layout
//! of a pool normal with fresh noise and replaces a rectangle of patches by
//! a direction orthogonal to everything else; that rectangle is the ground
//! truth. With `modes = 2` the pool holds two appearance modes built on
//! disjoint prototype pairs.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use image::GrayImage;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::raster::write_pgm;
use crate::rng::SplitMix64;
use crate::tensor_io::{
    write_manifest, write_tensor, DatasetManifest, NormalEntry, QueryEntry, Tensor32,
};

/// Rectangle on the patch grid, `row,col,height,width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatchRect {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

impl PatchRect {
    pub fn contains(&self, r: usize, c: usize) -> bool {
        r >= self.row && r < self.row + self.height && c >= self.col && c < self.col + self.width
    }
}

impl FromStr for PatchRect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::validation(format!("bad rectangle {s:?}: {e}")))?;
        match parts.as_slice() {
            &[row, col, height, width] => Ok(Self {
                row,
                col,
                height,
                width,
            }),
            _ => Err(Error::validation(format!(
                "rectangle {s:?} must be row,col,height,width"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_normals: usize,
    pub n_queries: usize,
    pub hp: usize,
    pub wp: usize,
    pub dim: usize,
    pub anomaly_rect: PatchRect,
    pub patch_size: usize,
    /// Number of normal appearance modes (1 or 2).
    pub modes: usize,
    /// Expected L2 norm of the per-patch noise.
    pub noise: f64,
}

impl SynthConfig {
    /// 20 normals, 10 queries, 16x16 grid, D = 32, centered 4x4 anomaly.
    pub fn standard(seed: u64) -> Self {
        Self {
            seed,
            n_normals: 20,
            n_queries: 10,
            hp: 16,
            wp: 16,
            dim: 32,
            anomaly_rect: PatchRect {
                row: 6,
                col: 6,
                height: 4,
                width: 4,
            },
            patch_size: 8,
            modes: 1,
            noise: 0.05,
        }
    }

    /// [`SynthConfig::standard`] with two appearance modes.
    pub fn heterogeneous(seed: u64) -> Self {
        Self {
            modes: 2,
            ..Self::standard(seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hp < 2 || self.wp < 2 {
            return Err(Error::validation("patch grid must be at least 2x2"));
        }
        if self.dim < 4 {
            return Err(Error::validation("feature dim must be >= 4"));
        }
        if !(1..=2).contains(&self.modes) {
            return Err(Error::validation("modes must be 1 or 2"));
        }
        if self.dim < 2 * self.modes + 2 {
            return Err(Error::validation(format!(
                "{} modes need feature dim >= {}",
                self.modes,
                2 * self.modes + 2
            )));
        }
        if self.n_normals == 0 {
            return Err(Error::validation("need at least one normal image"));
        }
        if self.patch_size == 0 {
            return Err(Error::validation("patch_size must be >= 1"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::validation("noise must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Background,
    Majority,
    Minority,
}

struct Layout {
    mode: usize,
    regions: Vec<Region>,
    raster: Vec<u8>,
}

struct Directions {
    /// `[majority, minority]` per mode.
    prototypes: Vec<[Vec<f64>; 2]>,
    /// Background direction per mode.
    background: Vec<Vec<f64>>,
    anomaly: Vec<f64>,
}

fn gaussian(rng: &mut SplitMix64) -> f64 {
    StandardNormal.sample(rng)
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// `count` orthonormal random directions (Gram-Schmidt on Gaussian draws).
fn orthonormal(rng: &mut SplitMix64, count: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
            normalize(&mut v);
            basis.push(v);
        }
    }
    basis
}

fn directions(rng: &mut SplitMix64, cfg: &SynthConfig) -> Directions {
    let mut basis = orthonormal(rng, 2 * cfg.modes + 2, cfg.dim);
    let anomaly = basis.pop().unwrap();
    let shared_bg = basis.pop().unwrap();
    let mut prototypes = Vec::new();
    let mut background = Vec::new();
    for m in 0..cfg.modes {
        let (a, b) = (basis[2 * m].clone(), basis[2 * m + 1].clone());
        let mut bg: Vec<f64> = (0..cfg.dim)
            .map(|j| shared_bg[j] + 0.5 * a[j] + 0.5 * b[j])
            .collect();
        normalize(&mut bg);
        prototypes.push([a, b]);
        background.push(bg);
    }
    Directions {
        prototypes,
        background,
        anomaly,
    }
}

fn jitter(rng: &mut SplitMix64, amp: f64) -> f64 {
    (rng.next_f64() * 2.0 - 1.0) * amp
}

fn make_layout(rng: &mut SplitMix64, cfg: &SynthConfig, mode: usize) -> Layout {
    let (hp, wp, ps) = (cfg.hp, cfg.wp, cfg.patch_size);
    let cy = hp as f64 / 2.0 + jitter(rng, 0.75);
    let cx = wp as f64 / 2.0 + jitter(rng, 0.75);
    let ry = hp as f64 * (0.40 + jitter(rng, 0.03));
    let rx = wp as f64 * (0.40 + jitter(rng, 0.03));
    let regions: Vec<Region> = (0..hp * wp)
        .map(|i| {
            let dy = (((i / wp) as f64 + 0.5) - cy) / ry;
            let dx = (((i % wp) as f64 + 0.5) - cx) / rx;
            if dy * dy + dx * dx > 1.0 {
                Region::Background
            } else if dy < -0.3 {
                Region::Minority
            } else {
                Region::Majority
            }
        })
        .collect();

    let (h, w) = (hp * ps, wp * ps);
    let base = 40 + 60 * mode as u32;
    let mut raster = vec![0u8; h * w];
    for y in 0..h {
        for x in 0..w {
            if regions[(y / ps) * wp + x / ps] == Region::Background {
                continue;
            }
            // Sparse pinholes, filled again by the closing step.
            if rng.next_f64() < 0.02 {
                continue;
            }
            raster[y * w + x] = (base + (rng.next_u64() % 100) as u32) as u8;
        }
    }
    Layout {
        mode,
        regions,
        raster,
    }
}

fn patch_features(
    rng: &mut SplitMix64,
    cfg: &SynthConfig,
    dirs: &Directions,
    layout: &Layout,
    anomaly: Option<&PatchRect>,
) -> Vec<f32> {
    let sigma = cfg.noise / (cfg.dim as f64).sqrt();
    let mut out = Vec::with_capacity(cfg.hp * cfg.wp * cfg.dim);
    for (i, region) in layout.regions.iter().enumerate() {
        let (r, c) = (i / cfg.wp, i % cfg.wp);
        let dir = if anomaly.is_some_and(|a| a.contains(r, c)) {
            &dirs.anomaly
        } else {
            match region {
                Region::Background => &dirs.background[layout.mode],
                Region::Majority => &dirs.prototypes[layout.mode][0],
                Region::Minority => &dirs.prototypes[layout.mode][1],
            }
        };
        out.extend(dir.iter().map(|&v| (v + sigma * gaussian(rng)) as f32));
    }
    out
}

fn mean_embedding(features: &[f32], dim: usize) -> Vec<f32> {
    let n = (features.len() / dim) as f64;
    let mut acc = vec![0.0f64; dim];
    for f in features.chunks_exact(dim) {
        acc.iter_mut().zip(f).for_each(|(a, &v)| *a += v as f64);
    }
    acc.into_iter().map(|a| (a / n) as f32).collect()
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

fn gray(w: usize, h: usize, raw: Vec<u8>) -> GrayImage {
    GrayImage::from_raw(w as u32, h as u32, raw).expect("raster dims")
}

/// Writes a synthetic dataset (images, masks, features, `manifest.json`)
/// under `out_root` and returns its manifest. Queries whose rectangle
/// covers no patch get no mask entry.
pub fn run_synth(out_root: impl AsRef<Path>, cfg: &SynthConfig) -> Result<DatasetManifest> {
    cfg.validate()?;
    let root = out_root.as_ref();
    for sub in ["images", "features", "masks"] {
        mkdir(&root.join(sub))?;
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let dirs = directions(&mut rng, cfg);
    let (h, w) = (cfg.hp * cfg.patch_size, cfg.wp * cfg.patch_size);
    let grid_dims = vec![cfg.hp, cfg.wp, cfg.dim];

    let write_features = |id: &str, feats: Vec<f32>| -> Result<(PathBuf, PathBuf)> {
        let embed_rel = PathBuf::from(format!("features/{id}.embed.dadf"));
        let patch_rel = PathBuf::from(format!("features/{id}.patch.dadf"));
        let embed = Tensor32::new(vec![cfg.dim], mean_embedding(&feats, cfg.dim))?;
        write_tensor(&embed, root.join(&embed_rel))?;
        write_tensor(
            &Tensor32::new(grid_dims.clone(), feats)?,
            root.join(&patch_rel),
        )?;
        Ok((embed_rel, patch_rel))
    };

    let mut layouts = Vec::with_capacity(cfg.n_normals);
    let mut normal_entries = Vec::with_capacity(cfg.n_normals);
    for i in 0..cfg.n_normals {
        let id = format!("normal_{i:04}");
        let layout = make_layout(&mut rng, cfg, i % cfg.modes);
        let feats = patch_features(&mut rng, cfg, &dirs, &layout, None);
        let image_rel = PathBuf::from(format!("images/{id}.pgm"));
        write_pgm(root.join(&image_rel), &gray(w, h, layout.raster.clone()))?;
        let (embed_path, patch_path) = write_features(&id, feats)?;
        normal_entries.push(NormalEntry {
            id,
            image_path: image_rel,
            embed_path,
            patch_path,
        });
        layouts.push(layout);
    }

    let rect = cfg.anomaly_rect;
    let covers = (0..cfg.hp * cfg.wp).any(|i| rect.contains(i / cfg.wp, i % cfg.wp));
    let mut query_entries = Vec::with_capacity(cfg.n_queries);
    for j in 0..cfg.n_queries {
        let id = format!("query_{j:04}");
        let layout = &layouts[j % cfg.n_normals];
        let feats = patch_features(&mut rng, cfg, &dirs, layout, Some(&rect));

        let mut raster = layout.raster.clone();
        let mut mask = vec![0u8; h * w];
        for y in 0..h {
            for x in 0..w {
                if rect.contains(y / cfg.patch_size, x / cfg.patch_size) {
                    raster[y * w + x] = 255;
                    mask[y * w + x] = 255;
                }
            }
        }
        let image_rel = PathBuf::from(format!("images/{id}.pgm"));
        write_pgm(root.join(&image_rel), &gray(w, h, raster))?;
        let mask_path = if covers {
            let rel = PathBuf::from(format!("masks/{id}.pgm"));
            write_pgm(root.join(&rel), &gray(w, h, mask))?;
            Some(rel)
        } else {
            None
        };
        let (embed_path, patch_path) = write_features(&id, feats)?;
        query_entries.push(QueryEntry {
            id,
            image_path: Some(image_rel),
            embed_path,
            patch_path,
            mask_path,
        });
    }

    let manifest = DatasetManifest {
        patch_size: cfg.patch_size,
        feature_dim: cfg.dim,
        normal_entries,
        query_entries,
    };
    write_manifest(root, &manifest)?;
    Ok(manifest)
}
