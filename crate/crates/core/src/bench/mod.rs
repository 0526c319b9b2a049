//! End-to-end experiment: every colour space of a config is extracted once,
//! then scored at every principal dimension with identical random splits.

mod cache;
mod plot;
mod report;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use cache::{FeatureCache, CACHE_ENV};
pub use plot::{emit_plot, render_plot};
pub use report::{emit_csv, parse_csv, render_csv, render_splits_csv, splits_path};

use crate::classifier::{evaluate_splits_multi, FeatureMatrix, SplitAccuracy, SplitSpec};
use crate::colorspace::{convert, ColorSpace};
use crate::dataset::{index_dataset, DatasetIndex};
use crate::error::{Error, Result};
use crate::filterbank::{FilterBank, MorletParams};
use crate::raster::decode_image;
use crate::scattering::{bank_for_image, scatter_color};

fn default_oversampling() -> usize {
    1
}

fn default_max_order() -> usize {
    2
}

fn default_spaces() -> Vec<ColorSpace> {
    ColorSpace::ALL.to_vec()
}

/// Scattering geometry shared by extraction and the cache key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterParams {
    #[serde(rename = "J", alias = "j")]
    pub scales: usize,
    #[serde(rename = "K", alias = "k")]
    pub angles: usize,
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
}

impl Default for ScatterParams {
    fn default() -> Self {
        Self {
            scales: 4,
            angles: 8,
            oversampling: 1,
            max_order: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub dataset_root: PathBuf,
    #[serde(default = "default_spaces")]
    pub spaces: Vec<ColorSpace>,
    #[serde(flatten)]
    pub scatter: ScatterParams,
    pub dims: Vec<usize>,
    pub split: SplitSpec,
    pub out_dir: PathBuf,
    /// Defaults to `<out_dir>/cache`; `SCATTER_TEX_CACHE` overrides both.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    /// Rows drawn in the plot; defaults to the seven highlighted spaces present in `spaces`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_spaces: Option<Vec<ColorSpace>>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: BenchConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text)?;
        // Relative paths in the file are relative to the file.
        if let Some(base) = path.parent() {
            for p in [&mut cfg.dataset_root, &mut cfg.out_dir] {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
            if let Some(c) = cfg.cache_dir.as_mut().filter(|c| c.is_relative()) {
                *c = base.join(&*c);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.spaces.is_empty() {
            return Err(Error::Config("no colour spaces selected".into()));
        }
        if self.dims.is_empty() || self.dims[0] == 0 || self.dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "dims must be non-empty, positive and strictly increasing, got {:?}",
                self.dims
            )));
        }
        if self.scatter.max_order > crate::scattering::MAX_ORDER {
            return Err(Error::Config(format!("max_order {} > 2", self.scatter.max_order)));
        }
        if self.split.train_per_class == 0 || self.split.n_splits == 0 {
            return Err(Error::Config("split counts must be positive".into()));
        }
        if let Some(ps) = &self.plot_spaces {
            if let Some(bad) = ps.iter().find(|s| !self.spaces.contains(s)) {
                return Err(Error::Config(format!("plot space {bad} is not benchmarked")));
            }
        }
        Ok(())
    }

    pub fn cache(&self) -> FeatureCache {
        FeatureCache::resolve(self.cache_dir.clone(), &self.out_dir)
    }

    fn plot_rows(&self) -> Vec<ColorSpace> {
        match &self.plot_spaces {
            Some(p) => p.clone(),
            None => {
                let highlighted: Vec<ColorSpace> = ColorSpace::PLOT_DEFAULT
                    .into_iter()
                    .filter(|s| self.spaces.contains(s))
                    .collect();
                if highlighted.is_empty() {
                    self.spaces.clone()
                } else {
                    highlighted
                }
            }
        }
    }
}

/// Accuracy grid: one row per colour space, one column per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyTable {
    pub spaces: Vec<ColorSpace>,
    pub dims: Vec<usize>,
    /// `cells[row][col]`.
    pub cells: Vec<Vec<SplitAccuracy>>,
}

impl AccuracyTable {
    pub fn mean(&self, space: ColorSpace, dim: usize) -> Option<f64> {
        let r = self.spaces.iter().position(|&s| s == space)?;
        let c = self.dims.iter().position(|&d| d == dim)?;
        Some(self.cells[r][c].mean)
    }

    /// Mean accuracy of one row across all dimensions.
    pub fn row_mean(&self, space: ColorSpace) -> Option<f64> {
        let r = self.spaces.iter().position(|&s| s == space)?;
        let row = &self.cells[r];
        Some(row.iter().map(|c| c.mean).sum::<f64>() / row.len() as f64)
    }
}

/// Filter banks keyed by image size, built on first use.
#[derive(Debug)]
pub struct BankCache {
    params: ScatterParams,
    banks: Mutex<HashMap<(usize, usize), Arc<FilterBank>>>,
}

impl BankCache {
    pub fn new(params: ScatterParams) -> Self {
        Self {
            params,
            banks: Mutex::default(),
        }
    }

    pub fn get(&self, width: usize, height: usize) -> Result<Arc<FilterBank>> {
        let p = self.params;
        let mut banks = self.banks.lock().unwrap();
        if let Some(b) = banks.get(&(width, height)) {
            return Ok(b.clone());
        }
        let bank = Arc::new(bank_for_image(width, height, p.scales, p.angles)?);
        banks.insert((width, height), bank.clone());
        Ok(bank)
    }
}

/// Features of one encoded image in one colour space, rounded to `f32`
/// precision so cached and freshly computed values agree bit for bit.
pub fn image_features(
    bytes: &[u8],
    path: &Path,
    space: ColorSpace,
    params: &ScatterParams,
    banks: &BankCache,
    cache: &FeatureCache,
) -> Result<Vec<f64>> {
    let key = cache::feature_key(bytes, space, params, &MorletParams::default());
    if let Some(v) = cache.get(&key)? {
        return Ok(v);
    }
    let img = decode_image(bytes, path)?;
    let converted = convert(&img, space)?;
    let bank = banks.get(img.width(), img.height())?;
    let values: Vec<f64> = scatter_color(&converted, &bank, params.max_order, params.oversampling)?
        .into_iter()
        .map(|v| v as f32 as f64)
        .collect();
    cache.put(&key, &values)?;
    Ok(values)
}

/// Scattering features of every dataset image in `space`, one column per image.
pub fn extract_features(
    index: &DatasetIndex,
    space: ColorSpace,
    params: &ScatterParams,
    banks: &BankCache,
    cache: &FeatureCache,
) -> Result<FeatureMatrix> {
    let columns = index
        .entries()
        .par_iter()
        .map(|entry| {
            let bytes = std::fs::read(&entry.path).map_err(|e| Error::io(&entry.path, e))?;
            image_features(&bytes, &entry.path, space, params, banks, cache)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .zip(index.entries())
        .map(|(r, entry)| {
            r.map_err(|e| e.context(format!("{space}, {}", entry.path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    FeatureMatrix::new(columns, index.labels(), index.classes().to_vec())
}

/// Runs the full grid and returns the table; nothing is written.
pub fn run_benchmark(config: &BenchConfig) -> Result<AccuracyTable> {
    config.validate()?;
    let index = index_dataset(&config.dataset_root)?;
    let banks = BankCache::new(config.scatter);
    let cache = config.cache();
    let mut cells = Vec::with_capacity(config.spaces.len());
    for &space in &config.spaces {
        let features = extract_features(&index, space, &config.scatter, &banks, &cache)?;
        let row = evaluate_splits_multi(&features, &config.split, &config.dims)
            .map_err(|e| e.context(format!("classifying {space}")))?;
        cells.push(row);
    }
    Ok(AccuracyTable {
        spaces: config.spaces.clone(),
        dims: config.dims.clone(),
        cells,
    })
}

/// Output files written by [`run_and_write`].
#[derive(Debug, Clone)]
pub struct BenchOutputs {
    pub table_csv: PathBuf,
    pub splits_csv: PathBuf,
    pub plot_svg: PathBuf,
    pub config_json: PathBuf,
}

/// Runs the benchmark, then writes `accuracy.csv`, `accuracy_splits.csv`,
/// `accuracy.svg` and `bench_config.json` into `out_dir`.
pub fn run_and_write(config: &BenchConfig) -> Result<(AccuracyTable, BenchOutputs)> {
    let table = run_benchmark(config)?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let outputs = BenchOutputs {
        table_csv: dir.join("accuracy.csv"),
        splits_csv: splits_path(&dir.join("accuracy.csv")),
        plot_svg: dir.join("accuracy.svg"),
        config_json: dir.join("bench_config.json"),
    };
    emit_csv(&table, &outputs.table_csv)?;
    emit_plot(&table, &config.plot_rows(), &outputs.plot_svg)?;
    let echo = serde_json::to_string_pretty(config).expect("config serializes");
    std::fs::write(&outputs.config_json, echo + "\n")
        .map_err(|e| Error::io(&outputs.config_json, e))?;
    Ok((table, outputs))
}
