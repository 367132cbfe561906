#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use anomap::raster::write_pgm;
use anomap::tensor_io::{
    write_manifest, write_tensor, DatasetManifest, NormalEntry, QueryEntry, Tensor32,
};
use image::GrayImage;

/// One image worth of hand-built inputs.
pub struct Item {
    pub id: String,
    pub embed: Vec<f32>,
    /// Row-major `[hp, wp, dim]`.
    pub patches: Vec<f32>,
    /// Row-major `height x width` raster; `None` omits the file.
    pub image: Option<Vec<u8>>,
    pub mask: Option<Vec<u8>>,
}

pub struct Fixture {
    pub patch_size: usize,
    pub hp: usize,
    pub wp: usize,
    pub dim: usize,
    pub normals: Vec<Item>,
    pub queries: Vec<Item>,
}

fn gray(w: usize, h: usize, raw: Vec<u8>) -> GrayImage {
    GrayImage::from_raw(w as u32, h as u32, raw).unwrap()
}

/// Writes the fixture under `root` and returns the manifest.
pub fn write_dataset(root: &Path, fixture: &Fixture) -> DatasetManifest {
    fs::create_dir_all(root.join("f")).unwrap();
    let (h, w) = (
        fixture.hp * fixture.patch_size,
        fixture.wp * fixture.patch_size,
    );
    let write_item = |item: &Item| -> (Option<PathBuf>, PathBuf, PathBuf, Option<PathBuf>) {
        let embed = PathBuf::from(format!("f/{}.embed.dadf", item.id));
        let patch = PathBuf::from(format!("f/{}.patch.dadf", item.id));
        write_tensor(
            &Tensor32::new(vec![item.embed.len()], item.embed.clone()).unwrap(),
            root.join(&embed),
        )
        .unwrap();
        let d = item.patches.len() / (fixture.hp * fixture.wp);
        write_tensor(
            &Tensor32::new(vec![fixture.hp, fixture.wp, d], item.patches.clone()).unwrap(),
            root.join(&patch),
        )
        .unwrap();
        let image = item.image.as_ref().map(|raw| {
            let p = PathBuf::from(format!("f/{}.pgm", item.id));
            write_pgm(root.join(&p), &gray(w, h, raw.clone())).unwrap();
            p
        });
        let mask = item.mask.as_ref().map(|raw| {
            let p = PathBuf::from(format!("f/{}.mask.pgm", item.id));
            write_pgm(root.join(&p), &gray(w, h, raw.clone())).unwrap();
            p
        });
        (image, embed, patch, mask)
    };
    let manifest = DatasetManifest {
        patch_size: fixture.patch_size,
        feature_dim: fixture.dim,
        normal_entries: fixture
            .normals
            .iter()
            .map(|n| {
                let (image, embed_path, patch_path, _) = write_item(n);
                NormalEntry {
                    id: n.id.clone(),
                    image_path: image.expect("normals need an image"),
                    embed_path,
                    patch_path,
                }
            })
            .collect(),
        query_entries: fixture
            .queries
            .iter()
            .map(|q| {
                let (image_path, embed_path, patch_path, mask_path) = write_item(q);
                QueryEntry {
                    id: q.id.clone(),
                    image_path,
                    embed_path,
                    patch_path,
                    mask_path,
                }
            })
            .collect(),
    };
    write_manifest(root, &manifest).unwrap();
    manifest
}

pub fn unit(dim: usize, axis: usize) -> Vec<f32> {
    let mut v = vec![0.0; dim];
    v[axis] = 1.0;
    v
}

/// Grid whose patch `(r, c)` is `f(r, c)`.
pub fn grid(hp: usize, wp: usize, f: impl Fn(usize, usize) -> Vec<f32>) -> Vec<f32> {
    (0..hp * wp).flat_map(|i| f(i / wp, i % wp)).collect()
}
