//! Patch and pixel anomaly maps.
//!
//! Each query patch is scored by its mean cosine similarity to the support
//! prototypes. The similarity grid is min-max normalized per image, flipped
//! so that high means anomalous, and upsampled to pixel resolution with
//! half-pixel-centered bilinear interpolation.

use crate::clustering::PointSet;
use crate::error::{Error, Result};
use crate::foreground::PatchMask;
use crate::support::cosine;
use crate::tensor_io::Tensor32;

/// Spread below which a similarity grid is treated as constant.
pub const CONSTANT_EPS: f64 = 1e-12;

/// `hp x wp` grid of `dim`-d patch features, row-major with the feature axis
/// innermost (matches the `[Hp, Wp, D]` tensor layout).
#[derive(Debug, Clone, PartialEq)]
pub struct PatchFeatureGrid {
    hp: usize,
    wp: usize,
    dim: usize,
    features: Vec<f64>,
}

impl PatchFeatureGrid {
    pub fn new(hp: usize, wp: usize, dim: usize, features: Vec<f64>) -> Result<Self> {
        if hp == 0 || wp == 0 || dim == 0 {
            return Err(Error::validation("patch grid dims must be positive"));
        }
        if features.len() != hp * wp * dim {
            return Err(Error::validation(format!(
                "patch grid {hp}x{wp}x{dim} needs {} values, got {}",
                hp * wp * dim,
                features.len()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation(
                "patch features contain non-finite values",
            ));
        }
        Ok(Self {
            hp,
            wp,
            dim,
            features,
        })
    }

    pub fn from_tensor(t: &Tensor32) -> Result<Self> {
        match *t.dims() {
            [hp, wp, dim] => Self::new(hp, wp, dim, t.data().iter().map(|&v| v as f64).collect()),
            _ => Err(Error::validation(format!(
                "patch tensor must be 3-D [Hp, Wp, D], got {:?}",
                t.dims()
            ))),
        }
    }

    pub fn hp(&self) -> usize {
        self.hp
    }

    pub fn wp(&self) -> usize {
        self.wp
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature(&self, row: usize, col: usize) -> &[f64] {
        let i = (row * self.wp + col) * self.dim;
        &self.features[i..i + self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.features.chunks_exact(self.dim)
    }

    /// Features of the patches set in `mask`, in row-major order.
    pub fn select(&self, mask: &PatchMask) -> Result<PointSet> {
        if (mask.hp(), mask.wp()) != (self.hp, self.wp) {
            return Err(Error::validation(format!(
                "patch mask {}x{} does not match feature grid {}x{}",
                mask.hp(),
                mask.wp(),
                self.hp,
                self.wp
            )));
        }
        let data: Vec<f64> = self
            .iter()
            .zip(mask.bits())
            .filter(|(_, &b)| b)
            .flat_map(|(f, _)| f.iter().copied())
            .collect();
        PointSet::new(data, self.dim)
    }
}

/// Row-major real-valued 2-D grid (similarity, normalized or anomaly map).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::validation(format!(
                "grid {rows}x{cols} with {} values",
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_tensor(&self) -> Result<Tensor32> {
        Tensor32::new(
            vec![self.rows, self.cols],
            self.values.iter().map(|&v| v as f32).collect(),
        )
    }

    pub fn from_tensor(t: &Tensor32) -> Result<Self> {
        match *t.dims() {
            [rows, cols] => Self::new(rows, cols, t.data().iter().map(|&v| v as f64).collect()),
            _ => Err(Error::validation(format!(
                "map tensor must be 2-D, got {:?}",
                t.dims()
            ))),
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Grid {
        Grid {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnomalyMap {
    pub patch_map: Grid,
    pub pixel_map: Grid,
}

/// Mean cosine similarity of every patch feature to the `K` centroids.
pub fn patch_similarity_map(features: &PatchFeatureGrid, centroids: &PointSet) -> Result<Grid> {
    if centroids.dim() != features.dim() {
        return Err(Error::validation(format!(
            "centroid dim {} does not match feature dim {}",
            centroids.dim(),
            features.dim()
        )));
    }
    let k = centroids.len() as f64;
    let values = features
        .iter()
        .map(|f| centroids.rows().map(|mu| cosine(f, mu)).sum::<f64>() / k)
        .collect();
    Grid::new(features.hp(), features.wp(), values)
}

/// Min-max rescale to `[0, 1]`. A constant grid maps to all ones.
pub fn minmax_normalize(grid: &Grid) -> Grid {
    let (lo, hi) = (grid.min(), grid.max());
    let span = hi - lo;
    if span < CONSTANT_EPS {
        return grid.map(|_| 1.0);
    }
    grid.map(|v| ((v - lo) / span).clamp(0.0, 1.0))
}

pub fn invert(grid: &Grid) -> Grid {
    grid.map(|v| 1.0 - v)
}

// Half-pixel-centered source coordinate, clamped to the valid range.
fn source_coord(dst: usize, src_len: usize, dst_len: usize) -> (usize, usize, f64) {
    let s = ((dst as f64 + 0.5) * (src_len as f64 / dst_len as f64) - 0.5)
        .clamp(0.0, (src_len - 1) as f64);
    let i0 = s.floor() as usize;
    let i1 = (i0 + 1).min(src_len - 1);
    (i0, i1, s - i0 as f64)
}

/// Bilinear resize with half-pixel centers and edge clamping.
pub fn upsample_bilinear(grid: &Grid, out_h: usize, out_w: usize) -> Result<Grid> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::validation("output dims must be positive"));
    }
    let xs: Vec<_> = (0..out_w)
        .map(|x| source_coord(x, grid.cols, out_w))
        .collect();
    let mut values = Vec::with_capacity(out_h * out_w);
    for y in 0..out_h {
        let (y0, y1, fy) = source_coord(y, grid.rows, out_h);
        for &(x0, x1, fx) in &xs {
            let (a, b) = (grid.get(y0, x0), grid.get(y0, x1));
            let (c, d) = (grid.get(y1, x0), grid.get(y1, x1));
            let top = a + fx * (b - a);
            let bottom = c + fx * (d - c);
            let v = top + fy * (bottom - top);
            // Rounding can step one ulp outside the four samples.
            let lo = a.min(b).min(c).min(d);
            let hi = a.max(b).max(c).max(d);
            values.push(v.clamp(lo, hi));
        }
    }
    Grid::new(out_h, out_w, values)
}

/// Full scoring chain: similarity, normalize, invert, upsample.
pub fn compute_anomaly_map(
    features: &PatchFeatureGrid,
    centroids: &PointSet,
    out_h: usize,
    out_w: usize,
) -> Result<AnomalyMap> {
    let sim = patch_similarity_map(features, centroids)?;
    let patch_map = invert(&minmax_normalize(&sim));
    let pixel_map = upsample_bilinear(&patch_map, out_h, out_w)?;
    Ok(AnomalyMap {
        patch_map,
        pixel_map,
    })
}
