//! The `.dadf` tensor container and the dataset manifest.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size        field
//! 0       4           magic "DADF" (44 41 44 46)
//! 4       4           u32 version = 1
//! 8       1           u8 dtype code = 1 (f32)
//! 9       1           u8 ndim (1..=3)
//! 10      2           zero padding
//! 12      8 * ndim    u64 dims
//! ...     4 * prod    f32 payload, row-major
//! ```

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"DADF";
pub const VERSION: u32 = 1;
pub const DTYPE_F32: u8 = 1;
pub const MAX_NDIM: usize = 3;
/// Bytes before the dims block.
pub const HEADER_PREFIX_LEN: usize = 12;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Row-major, finite, 1- to 3-dimensional f32 tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor32 {
    dims: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor32 {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        validate_dims(&dims)?;
        let expected: usize = dims.iter().product();
        if data.len() != expected {
            return Err(Error::validation(format!(
                "tensor dims {dims:?} need {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite value {} at flat index {i}",
                data[i]
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.len() > MAX_NDIM {
        return Err(Error::validation(format!(
            "tensor must have 1..={MAX_NDIM} dims, got {}",
            dims.len()
        )));
    }
    if dims.contains(&0) {
        return Err(Error::validation(format!(
            "tensor dims must be positive, got {dims:?}"
        )));
    }
    Ok(())
}

/// Serializes `t` into the `.dadf` byte layout.
pub fn encode_tensor(t: &Tensor32) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_PREFIX_LEN + 8 * t.dims.len() + 4 * t.data.len());
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(DTYPE_F32);
    buf.push(t.dims.len() as u8);
    buf.extend_from_slice(&[0, 0]);
    for &d in &t.dims {
        buf.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &v in &t.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

pub fn write_tensor(t: &Tensor32, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(v) = t.data.iter().find(|v| !v.is_finite()) {
        return Err(Error::validation(format!(
            "refusing to write non-finite value {v} to {}",
            path.display()
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_tensor(t))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Parses the fixed prefix and dims block, returning the dims.
fn parse_header(bytes: &[u8], path: &Path) -> Result<Vec<usize>> {
    if bytes.len() < HEADER_PREFIX_LEN {
        return Err(Error::format(path, "truncated header"));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::format(path, "bad magic, expected \"DADF\""));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::format(
            path,
            format!("unsupported version {version}"),
        ));
    }
    if bytes[8] != DTYPE_F32 {
        return Err(Error::format(
            path,
            format!("unsupported dtype code {}", bytes[8]),
        ));
    }
    let ndim = bytes[9] as usize;
    if ndim == 0 || ndim > MAX_NDIM {
        return Err(Error::format(path, format!("invalid ndim {ndim}")));
    }
    let dims_end = HEADER_PREFIX_LEN + 8 * ndim;
    if bytes.len() < dims_end {
        return Err(Error::format(path, "truncated dims block"));
    }
    let mut dims = Vec::with_capacity(ndim);
    for chunk in bytes[HEADER_PREFIX_LEN..dims_end].chunks_exact(8) {
        let d = u64::from_le_bytes(chunk.try_into().unwrap());
        if d == 0 {
            return Err(Error::format(path, "zero-length dimension"));
        }
        let d = usize::try_from(d)
            .map_err(|_| Error::format(path, format!("dimension {d} overflows usize")))?;
        dims.push(d);
    }
    Ok(dims)
}

fn payload_len(dims: &[usize], path: &Path) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::format(path, format!("dims {dims:?} overflow")))
}

/// Decodes a `.dadf` byte buffer. `path` is only used in error messages.
pub fn decode_tensor(bytes: &[u8], path: &Path) -> Result<Tensor32> {
    let dims = parse_header(bytes, path)?;
    let start = HEADER_PREFIX_LEN + 8 * dims.len();
    let need = payload_len(&dims, path)?;
    let payload = &bytes[start..];
    if payload.len() != need {
        return Err(Error::format(
            path,
            format!(
                "payload is {} bytes, dims {dims:?} need {need}",
                payload.len()
            ),
        ));
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Tensor32::new(dims, data).map_err(|e| match e {
        Error::Validation(msg) => Error::validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor32> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_tensor(&bytes, path)
}

/// Reads only the header of a `.dadf` file and checks that the file length
/// matches the declared dims. The payload is not decoded.
pub fn read_tensor_dims(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let mut r = BufReader::new(file);
    let mut head = vec![0u8; HEADER_PREFIX_LEN + 8 * MAX_NDIM];
    let mut filled = 0;
    while filled < head.len() {
        let n = r
            .read(&mut head[filled..])
            .map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        filled += n;
    }
    head.truncate(filled);
    let dims = parse_header(&head, path)?;
    let expected = (HEADER_PREFIX_LEN + 8 * dims.len()) as u64 + payload_len(&dims, path)? as u64;
    if file_len != expected {
        return Err(Error::format(
            path,
            format!("file is {file_len} bytes, header declares {expected}"),
        ));
    }
    Ok(dims)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalEntry {
    pub id: String,
    pub image_path: PathBuf,
    pub embed_path: PathBuf,
    pub patch_path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEntry {
    pub id: String,
    /// When absent, pixel dims default to the patch grid times `patch_size`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_path: Option<PathBuf>,
    pub embed_path: PathBuf,
    pub patch_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_path: Option<PathBuf>,
}

/// On-disk `manifest.json`. Paths are relative to the dataset root (absolute
/// paths are accepted as-is).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub patch_size: usize,
    pub feature_dim: usize,
    pub normal_entries: Vec<NormalEntry>,
    pub query_entries: Vec<QueryEntry>,
}

/// A validated manifest together with the root its paths resolve against
/// and the patch-grid shape of every entry.
#[derive(Debug, Clone)]
pub struct LoadedManifest {
    pub root: PathBuf,
    pub manifest: DatasetManifest,
    /// `(hp, wp)` per normal entry, same order as `normal_entries`.
    pub normal_grids: Vec<(usize, usize)>,
    /// `(hp, wp)` per query entry.
    pub query_grids: Vec<(usize, usize)>,
}

impl LoadedManifest {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.root.join(p)
    }

    pub fn feature_dim(&self) -> usize {
        self.manifest.feature_dim
    }

    pub fn patch_size(&self) -> usize {
        self.manifest.patch_size
    }

    /// Short dataset label: the root directory's name.
    pub fn name(&self) -> String {
        self.root
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string())
    }
}

pub fn write_manifest(root: impl AsRef<Path>, manifest: &DatasetManifest) -> Result<()> {
    let path = root.as_ref().join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::validation(format!("serializing manifest: {e}")))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

fn check_id(id: &str, seen: &mut HashSet<String>, list: &str) -> Result<()> {
    let mut comps = Path::new(id).components();
    let plain = matches!(
        (comps.next(), comps.next()),
        (Some(Component::Normal(_)), None)
    );
    if id.is_empty() || !plain {
        return Err(Error::validation(format!(
            "{list} id {id:?} must be a non-empty plain file-name component"
        )));
    }
    if !seen.insert(id.to_string()) {
        return Err(Error::validation(format!("duplicate {list} id {id:?}")));
    }
    Ok(())
}

fn require_file(root: &Path, rel: &Path) -> Result<PathBuf> {
    let p = root.join(rel);
    if !p.is_file() {
        return Err(Error::io(
            &p,
            std::io::Error::new(std::io::ErrorKind::NotFound, "referenced file missing"),
        ));
    }
    Ok(p)
}

fn check_embed(path: &Path, dim: usize) -> Result<()> {
    let dims = read_tensor_dims(path)?;
    if dims != [dim] {
        return Err(Error::validation(format!(
            "{}: embedding dims {dims:?}, expected [{dim}]",
            path.display()
        )));
    }
    Ok(())
}

fn check_patch(path: &Path, dim: usize) -> Result<(usize, usize)> {
    let dims = read_tensor_dims(path)?;
    match dims.as_slice() {
        &[hp, wp, d] if d == dim => Ok((hp, wp)),
        _ => Err(Error::validation(format!(
            "{}: patch dims {dims:?}, expected [Hp, Wp, {dim}]",
            path.display()
        ))),
    }
}

/// Loads and validates `<root>/manifest.json`. Every referenced tensor's
/// header is checked against `feature_dim`; payloads are not read.
pub fn load_manifest(root: impl AsRef<Path>) -> Result<LoadedManifest> {
    let root = root.as_ref().to_path_buf();
    let path = root.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: DatasetManifest =
        serde_json::from_str(&text).map_err(|e| Error::format(&path, e.to_string()))?;

    if manifest.patch_size == 0 {
        return Err(Error::validation("patch_size must be >= 1"));
    }
    if manifest.feature_dim == 0 {
        return Err(Error::validation("feature_dim must be >= 1"));
    }
    if manifest.normal_entries.is_empty() {
        return Err(Error::validation(
            "normal pool is empty; support selection needs at least one normal image",
        ));
    }

    let dim = manifest.feature_dim;
    let mut seen = HashSet::new();
    let mut normal_grids = Vec::with_capacity(manifest.normal_entries.len());
    for e in &manifest.normal_entries {
        check_id(&e.id, &mut seen, "normal")?;
        require_file(&root, &e.image_path)?;
        check_embed(&require_file(&root, &e.embed_path)?, dim)?;
        normal_grids.push(check_patch(&require_file(&root, &e.patch_path)?, dim)?);
    }

    let mut seen = HashSet::new();
    let mut query_grids = Vec::with_capacity(manifest.query_entries.len());
    for e in &manifest.query_entries {
        check_id(&e.id, &mut seen, "query")?;
        if let Some(p) = &e.image_path {
            require_file(&root, p)?;
        }
        if let Some(p) = &e.mask_path {
            require_file(&root, p)?;
        }
        check_embed(&require_file(&root, &e.embed_path)?, dim)?;
        query_grids.push(check_patch(&require_file(&root, &e.patch_path)?, dim)?);
    }

    Ok(LoadedManifest {
        root,
        manifest,
        normal_grids,
        query_grids,
    })
}
