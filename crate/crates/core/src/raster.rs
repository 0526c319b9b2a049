//! Image planes, colour images, and raster I/O.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageReader, Luma};

use crate::colorspace::ColorSpace;
use crate::error::{Error, Result};

/// One real-valued channel of an image, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl ImagePlane {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Geometry(format!(
                "plane dimensions must be positive, got {width}x{height}"
            )));
        }
        if samples.len() != width * height {
            return Err(Error::Geometry(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite sample {} at index {i}",
                samples[i]
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "plane dimensions must be positive");
        assert!(value.is_finite());
        Self {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "plane dimensions must be positive");
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                assert!(v.is_finite(), "non-finite sample at ({x}, {y})");
                samples.push(v);
            }
        }
        Self {
            width,
            height,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.samples[y * self.width + x]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let samples = self.samples.iter().map(|&v| f(v)).collect::<Vec<_>>();
        assert!(samples.iter().all(|v| v.is_finite()));
        Self {
            width: self.width,
            height: self.height,
            samples,
        }
    }

    /// Circular shift: output(x, y) = input(x - dx, y - dy) with wrap-around.
    pub fn roll(&self, dx: isize, dy: isize) -> Self {
        let (w, h) = (self.width as isize, self.height as isize);
        Self::from_fn(self.width, self.height, |x, y| {
            let sx = (x as isize - dx).rem_euclid(w) as usize;
            let sy = (y as isize - dy).rem_euclid(h) as usize;
            self.get(sx, sy)
        })
    }

    /// Extracts the `width x height` window whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::Geometry(format!(
                "crop {width}x{height}+{x0}+{y0} exceeds plane {}x{}",
                self.width, self.height
            )));
        }
        Ok(Self::from_fn(width, height, |x, y| self.get(x0 + x, y0 + y)))
    }
}

/// A colour image: 3 planes, or 4 for the double-opponent space.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    planes: Vec<ImagePlane>,
    space: ColorSpace,
}

impl ColorImage {
    pub fn new(planes: Vec<ImagePlane>, space: ColorSpace) -> Result<Self> {
        let expected = space.channel_count();
        if planes.len() != expected {
            return Err(Error::Geometry(format!(
                "{space} images have {expected} planes, got {}",
                planes.len()
            )));
        }
        let (w, h) = (planes[0].width(), planes[0].height());
        if planes.iter().any(|p| p.width() != w || p.height() != h) {
            return Err(Error::Geometry("colour planes differ in size".into()));
        }
        Ok(Self { planes, space })
    }

    /// Builds an RGB image from interleaved `[r, g, b, r, g, b, ...]` samples.
    pub fn from_interleaved_rgb(width: usize, height: usize, rgb: &[f64]) -> Result<Self> {
        if rgb.len() != width * height * 3 {
            return Err(Error::Geometry(format!(
                "interleaved RGB {width}x{height} needs {} values, got {}",
                width * height * 3,
                rgb.len()
            )));
        }
        let planes = (0..3)
            .map(|c| {
                ImagePlane::new(
                    width,
                    height,
                    rgb.iter().skip(c).step_by(3).copied().collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(planes, ColorSpace::Rgb)
    }

    pub fn planes(&self) -> &[ImagePlane] {
        &self.planes
    }

    pub fn into_planes(self) -> Vec<ImagePlane> {
        self.planes
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    /// Channel values of one pixel.
    pub fn pixel(&self, x: usize, y: usize) -> Vec<f64> {
        self.planes.iter().map(|p| p.get(x, y)).collect()
    }
}

/// Decodes an 8-bit RGB raster (PNG or PPM) into `[0, 255]` reals.
pub fn load_image(path: impl AsRef<Path>) -> Result<ColorImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, path)
}

/// Like [`load_image`] but from an in-memory encoded file; `path` is only used in errors.
pub fn decode_image(bytes: &[u8], path: &Path) -> Result<ColorImage> {
    let reader = ImageReader::new(std::io::Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let decoded = reader.decode().map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::Format {
            path: path.to_owned(),
            message: u.to_string(),
        },
        other => Error::Decode {
            path: path.to_owned(),
            message: other.to_string(),
        },
    })?;
    let rgb = match decoded {
        DynamicImage::ImageRgb8(rgb) => rgb,
        other => {
            return Err(Error::Format {
                path: path.to_owned(),
                message: format!("expected 8-bit RGB, found {:?}", other.color()),
            })
        }
    };
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let samples = rgb
        .into_raw()
        .into_iter()
        .map(f64::from)
        .collect::<Vec<_>>();
    ColorImage::from_interleaved_rgb(w, h, &samples)
}

/// Affine map of a plane onto 8-bit gray: min to 0, max to 255, constant to 128.
pub fn plane_to_gray(plane: &ImagePlane) -> GrayImage {
    let (lo, hi) = plane.min_max();
    let range = hi - lo;
    GrayImage::from_fn(plane.width() as u32, plane.height() as u32, |x, y| {
        let v = plane.get(x as usize, y as usize);
        let g = if range > 0.0 {
            ((v - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            128
        };
        Luma([g])
    })
}

/// Writes the plane as an 8-bit grayscale PNG (see [`plane_to_gray`]).
pub fn save_plane_image(plane: &ImagePlane, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    plane_to_gray(plane)
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::io(path, std::io::Error::other(other.to_string())),
        })
}

/// Writes an RGB image (samples clamped to `[0, 255]`) as PNG.
pub fn save_rgb_image(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if img.planes().len() != 3 {
        return Err(Error::Parameter("RGB output needs 3 planes".into()));
    }
    let out = image::RgbImage::from_fn(img.width() as u32, img.height() as u32, |x, y| {
        let px = img.pixel(x as usize, y as usize);
        image::Rgb([0, 1, 2].map(|c| px[c].round().clamp(0.0, 255.0) as u8))
    });
    out.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::io(path, std::io::Error::other(other.to_string())),
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_rgb_png(dir: &Path, name: &str, w: u32, h: u32, px: &[[u8; 3]]) -> std::path::PathBuf {
        let img = image::RgbImage::from_fn(w, h, |x, y| image::Rgb(px[(y * w + x) as usize]));
        let path = dir.join(name);
        img.save(&path).unwrap();
        path
    }

    #[test]
    fn red_pixel_decodes_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_rgb_png(dir.path(), "red.png", 1, 1, &[[255, 0, 0]]);
        let img = load_image(&p).unwrap();
        assert_eq!(img.space(), ColorSpace::Rgb);
        assert_eq!(img.pixel(0, 0), vec![255.0, 0.0, 0.0]);
    }

    #[test]
    fn black_png_gives_zero_planes() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_rgb_png(dir.path(), "black.png", 2, 2, &[[0, 0, 0]; 4]);
        let img = load_image(&p).unwrap();
        assert_eq!(img.planes().len(), 3);
        for plane in img.planes() {
            assert_eq!((plane.width(), plane.height()), (2, 2));
            assert!(plane.samples().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn ppm_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.ppm");
        let mut bytes = b"P6\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 200, 100, 50]);
        std::fs::write(&path, bytes).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.pixel(1, 0), vec![200.0, 100.0, 50.0]);
    }

    #[test]
    fn grayscale_and_garbage_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let gray = dir.path().join("g.png");
        GrayImage::new(2, 2).save(&gray).unwrap();
        assert!(matches!(load_image(&gray), Err(Error::Format { .. })));

        let junk = dir.path().join("junk.png");
        std::fs::write(&junk, b"\x89PNG\r\n\x1a\nnot really").unwrap();
        assert!(matches!(load_image(&junk), Err(Error::Decode { .. })));

        assert!(matches!(
            load_image(dir.path().join("missing.png")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn gray_dump_rescales_affinely() {
        let constant = ImagePlane::filled(3, 2, 5.0);
        assert!(plane_to_gray(&constant).pixels().all(|p| p.0[0] == 128));

        let ramp = ImagePlane::new(2, 1, vec![0.0, 1.0]).unwrap();
        let g = plane_to_gray(&ramp);
        assert_eq!(g.get_pixel(0, 0).0[0], 0);
        assert_eq!(g.get_pixel(1, 0).0[0], 255);
    }

    #[test]
    fn save_plane_round_trips_through_png() {
        let dir = tempfile::tempdir().unwrap();
        let plane = ImagePlane::from_fn(4, 3, |x, y| (x + 4 * y) as f64);
        let path = dir.path().join("p.png");
        save_plane_image(&plane, &path).unwrap();
        let back = image::open(&path).unwrap().to_luma8();
        assert_eq!(back.get_pixel(0, 0).0[0], 0);
        assert_eq!(back.get_pixel(3, 2).0[0], 255);
        assert!(save_plane_image(&plane, dir.path().join("no/such/dir/p.png")).is_err());
    }

    #[test]
    fn rgb_png_round_trip_is_sample_exact() {
        let dir = tempfile::tempdir().unwrap();
        let px: Vec<[u8; 3]> = (0..12u8).map(|i| [i * 20, 255 - i, i * 7]).collect();
        let p = write_rgb_png(dir.path(), "x.png", 4, 3, &px);
        let a = load_image(&p).unwrap();
        let q = dir.path().join("y.png");
        save_rgb_image(&a, &q).unwrap();
        assert_eq!(load_image(&q).unwrap(), a);
    }

    #[test]
    fn plane_validation() {
        assert!(ImagePlane::new(2, 2, vec![0.0; 3]).is_err());
        assert!(ImagePlane::new(1, 1, vec![f64::NAN]).is_err());
        let a = ImagePlane::zeros(2, 2);
        let b = ImagePlane::zeros(3, 2);
        assert!(ColorImage::new(vec![a.clone(), a.clone(), b], ColorSpace::Rgb).is_err());
        assert!(ColorImage::new(vec![a.clone(), a.clone(), a.clone()], ColorSpace::DoubleOpponent).is_err());
    }

    #[test]
    fn roll_wraps() {
        let p = ImagePlane::from_fn(3, 1, |x, _| x as f64);
        assert_eq!(p.roll(1, 0).samples(), &[2.0, 0.0, 1.0]);
    }
}
