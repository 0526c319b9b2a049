use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::ScatterParams;
use crate::colorspace::ColorSpace;
use crate::error::{Error, Result};
use crate::filterbank::MorletParams;
use crate::planefile;

/// Overrides the feature cache directory.
pub const CACHE_ENV: &str = "SCATTER_TEX_CACHE";

/// On-disk per-image feature vectors (`<key>.f32`), keyed by a SHA-256 of the
/// image bytes and every parameter that affects the features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCache {
    dir: Option<PathBuf>,
}

impl FeatureCache {
    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
        }
    }

    /// `$SCATTER_TEX_CACHE`, else `configured`, else `<out_dir>/cache`.
    pub fn resolve(configured: Option<PathBuf>, out_dir: &Path) -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .or(configured)
            .unwrap_or_else(|| out_dir.join("cache"));
        Self::at(dir)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(&key[..2]).join(format!("{key}.f32")))
    }

    pub fn get(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.path(key) {
            Some(p) if p.is_file() => planefile::load_vector(&p).map(Some),
            _ => Ok(None),
        }
    }

    pub fn put(&self, key: &str, values: &[f64]) -> Result<()> {
        let Some(path) = self.path(key) else {
            return Ok(());
        };
        let dir = path.parent().unwrap();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        // Write then rename so concurrent readers never see a partial file.
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        planefile::save_vector(&tmp, values)?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }
}

pub(crate) fn feature_key(
    image_bytes: &[u8],
    space: ColorSpace,
    params: &ScatterParams,
    morlet: &MorletParams,
) -> String {
    let mut h = Sha256::new();
    h.update(b"scatter-tex/features/v1\0");
    h.update((image_bytes.len() as u64).to_le_bytes());
    h.update(image_bytes);
    h.update(space.tag().as_bytes());
    h.update([0]);
    for v in [params.scales, params.angles, params.oversampling, params.max_order] {
        h.update((v as u64).to_le_bytes());
    }
    for v in [morlet.sigma0, morlet.xi0, morlet.slant] {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
