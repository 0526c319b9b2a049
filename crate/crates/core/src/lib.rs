//! Colour texture classification with a three-layer 2D wavelet scattering
//! transform and a per-class affine PCA classifier.
//!
//! The pipeline: load RGB images ([`raster`], [`dataset`]), convert them to
//! one of eighteen colour spaces ([`colorspace`]), scatter every channel
//! through a Morlet filter bank ([`filterbank`], [`scattering`]), and score
//! the concatenated features with random train/test splits
//! ([`classifier`]). [`bench`] runs the whole grid of colour spaces and
//! principal dimensions and writes the accuracy table and plot.

pub mod bench;
pub mod classifier;
pub mod colorspace;
pub mod dataset;
pub mod error;
pub mod fft;
pub mod filterbank;
pub mod planefile;
pub mod raster;
pub mod scattering;
pub mod synth;

pub use classifier::{evaluate_splits, fit, ClassifierModel, FeatureMatrix, SplitSpec};
pub use colorspace::{convert, ColorSpace};
pub use dataset::{index_dataset, DatasetIndex};
pub use error::{Error, Result};
pub use filterbank::{littlewood_paley, FilterBank, FilterBankParams, MorletParams};
pub use raster::{load_image, save_plane_image, ColorImage, ImagePlane};
pub use scattering::{enumerate_paths, scatter, scatter_color, wavelet_modulus, PathElement, ScatteringPath};
