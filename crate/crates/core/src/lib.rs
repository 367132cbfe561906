//! Training-free anomaly localization over pre-extracted vision-transformer
//! features.
//!
//! A query image is scored against a single normal *support* image chosen by
//! global-embedding cosine similarity. The support's foreground patch
//! features are summarized by K-means prototypes, every query patch is scored
//! by its mean cosine similarity to those prototypes, and the resulting map is
//! min-max normalized, inverted and bilinearly upsampled to pixel resolution.
//!
//! Modules follow the data flow:
//!
//! - [`tensor_io`]: the `.dadf` tensor container and dataset manifest
//! - [`support`]: support-image selection (embedding matching or seeded random)
//! - [`foreground`]: non-zero binarization, closing, patch-grid downsampling
//! - [`clustering`]: seeded k-means++ / Lloyd K-means
//! - [`anomaly`]: similarity map, normalization, inversion, upsampling
//! - [`metrics`]: pixel-level AUROC and average precision
//! - [`pipeline`]: detect / eval / ablation orchestration
//! - [`synth`]: synthetic benchmark generator

pub mod anomaly;
pub mod clustering;
mod error;
pub mod foreground;
pub mod metrics;
pub mod pipeline;
pub mod raster;
pub mod rng;
pub mod support;
pub mod synth;
pub mod tensor_io;

pub use error::{Error, Result};
