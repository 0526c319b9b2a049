//! Synthetic colour texture datasets: oriented sinusoidal gratings with a
//! class-specific orientation and tint, random frequency and phase jitter,
//! and additive noise.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::colorspace::ColorSpace;
use crate::error::{Error, Result};
use crate::raster::{save_rgb_image, ColorImage, ImagePlane};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub classes: usize,
    pub per_class: usize,
    pub size: usize,
    pub seed: u64,
}

const TINTS: [[f64; 3]; 6] = [
    [1.0, 0.35, 0.25],
    [0.25, 0.8, 0.35],
    [0.3, 0.4, 1.0],
    [0.95, 0.85, 0.3],
    [0.8, 0.3, 0.9],
    [0.3, 0.85, 0.9],
];

/// Orientation (radians) and tint of a class.
pub fn class_style(class: usize, classes: usize) -> (f64, [f64; 3]) {
    let theta = PI * class as f64 / classes.max(1) as f64;
    let tint = TINTS[class % TINTS.len()];
    (theta, tint)
}

/// One `[0, 255]` RGB grating image.
pub fn grating(size: usize, class: usize, classes: usize, rng: &mut impl Rng) -> ColorImage {
    let (theta, tint) = class_style(class, classes);
    let theta = theta + rng.random_range(-0.08..0.08);
    // Period between 5 and 9 pixels.
    let freq = 2.0 * PI / rng.random_range(5.0..9.0);
    let phase = rng.random_range(0.0..2.0 * PI);
    let second = rng.random_range(0.1..0.25);
    let noise = Normal::new(0.0, 0.06).unwrap();
    let (s, c) = theta.sin_cos();

    let mut planes: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(size * size)).collect();
    for y in 0..size {
        for x in 0..size {
            let t = freq * (x as f64 * c + y as f64 * s) + phase;
            let base = 0.5 + 0.3 * t.sin() + second * (2.0 * t).cos() * 0.5;
            for (ch, plane) in planes.iter_mut().enumerate() {
                let v = (tint[ch] * base + noise.sample(rng)).clamp(0.0, 1.0);
                plane.push((v * 255.0).round());
            }
        }
    }
    let planes = planes
        .into_iter()
        .map(|p| ImagePlane::new(size, size, p))
        .collect::<Result<Vec<_>>>()
        .expect("finite synthetic samples");
    ColorImage::new(planes, ColorSpace::Rgb).expect("three equal planes")
}

/// Generates the images in memory, class-major, with labels.
pub fn generate(spec: &SynthSpec) -> Result<Vec<(usize, ColorImage)>> {
    if spec.classes == 0 || spec.per_class == 0 || spec.size == 0 {
        return Err(Error::Parameter(format!("invalid synthetic dataset spec {spec:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.classes * spec.per_class);
    for class in 0..spec.classes {
        for _ in 0..spec.per_class {
            out.push((class, grating(spec.size, class, spec.classes, &mut rng)));
        }
    }
    Ok(out)
}

/// Writes `<out>/class_XX/img_YYY.png`.
pub fn write_dataset(out: impl AsRef<Path>, spec: &SynthSpec) -> Result<()> {
    let out = out.as_ref();
    for (i, (class, img)) in generate(spec)?.into_iter().enumerate() {
        let dir = out.join(format!("class_{class:02}"));
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        save_rgb_image(&img, dir.join(format!("img_{:03}.png", i % spec.per_class)))?;
    }
    Ok(())
}
