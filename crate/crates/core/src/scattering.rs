//! Three-layer wavelet scattering.
//!
//! A path `p = (l1, ..., lm)` of wavelet indices defines the propagated field
//! `U[p]f = | ... ||f * psi_l1| * psi_l2| ... * psi_lm|`, and the scattering
//! coefficient `S[p]f = U[p]f * phi`. Orders 0 to 2 are supported, with paths
//! restricted to strictly increasing scale indices (`j1 < j2`, all angle
//! pairs). Each `S[p]f` map is subsampled at stride `2^(J - oversampling)`,
//! cropped to the unpadded image, and reduced to its mean.

use std::path::Path;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filterbank::{FilterBank, FilterBankParams};
use crate::raster::{save_plane_image, ColorImage, ImagePlane};

pub const MAX_ORDER: usize = 2;

/// One wavelet index `lambda = 2^j theta_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathElement {
    /// Scale index, 0 = finest.
    pub j: usize,
    /// Orientation index.
    pub k: usize,
}

impl PathElement {
    pub fn new(j: usize, k: usize) -> Self {
        Self { j, k }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ScatteringPath {
    elements: Vec<PathElement>,
}

impl ScatteringPath {
    pub fn new(elements: Vec<PathElement>) -> Result<Self> {
        if elements.len() > MAX_ORDER {
            return Err(Error::Unsupported(format!(
                "path of order {} exceeds {MAX_ORDER}",
                elements.len()
            )));
        }
        if elements.windows(2).any(|w| w[0].j >= w[1].j) {
            return Err(Error::Parameter(
                "path scales must strictly increase".into(),
            ));
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[PathElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

impl std::fmt::Display for ScatteringPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.elements.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self
            .elements
            .iter()
            .map(|e| format!("j{}k{}", e.j, e.k))
            .collect();
        f.write_str(&parts.join("-"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringFeatures {
    pub paths: Vec<ScatteringPath>,
    pub values: Vec<f64>,
}

impl ScatteringFeatures {
    /// Values of all paths of one order, in canonical order.
    pub fn order_values(&self, order: usize) -> Vec<f64> {
        self.paths
            .iter()
            .zip(&self.values)
            .filter(|(p, _)| p.order() == order)
            .map(|(_, &v)| v)
            .collect()
    }
}

fn check_order(max_order: usize) -> Result<()> {
    if max_order > MAX_ORDER {
        return Err(Error::Unsupported(format!(
            "max_order {max_order} (only orders 0..={MAX_ORDER} are supported)"
        )));
    }
    Ok(())
}

/// Number of paths: `1 + J K + K^2 J (J - 1) / 2` for `max_order = 2`.
pub fn path_count(scales: usize, angles: usize, max_order: usize) -> usize {
    let mut n = 1;
    if max_order >= 1 {
        n += scales * angles;
    }
    if max_order >= 2 {
        n += angles * angles * scales * scales.saturating_sub(1) / 2;
    }
    n
}

/// All paths in canonical order: the empty path, order 1 by `(j, k)`, then
/// order 2 by `(j1, k1, j2, k2)`.
pub fn enumerate_paths(scales: usize, angles: usize, max_order: usize) -> Result<Vec<ScatteringPath>> {
    check_order(max_order)?;
    let mut paths = vec![ScatteringPath::default()];
    let singles: Vec<PathElement> = (0..scales)
        .flat_map(|j| (0..angles).map(move |k| PathElement::new(j, k)))
        .collect();
    if max_order >= 1 {
        paths.extend(singles.iter().map(|&e| ScatteringPath { elements: vec![e] }));
    }
    if max_order >= 2 {
        for &a in &singles {
            for &b in singles.iter().filter(|b| b.j > a.j) {
                paths.push(ScatteringPath {
                    elements: vec![a, b],
                });
            }
        }
    }
    Ok(paths)
}

/// Smallest multiple of `2^scales` that is `>= n`.
pub fn padded_len(n: usize, scales: usize) -> usize {
    let m = 1usize << scales;
    n.div_ceil(m) * m
}

/// A bank on the padded grid for images of `width x height`.
pub fn bank_for_image(width: usize, height: usize, scales: usize, angles: usize) -> Result<FilterBank> {
    check_image_size(width, height, scales)?;
    FilterBank::new(FilterBankParams::new(
        scales,
        angles,
        padded_len(width, scales),
        padded_len(height, scales),
    ))
}

fn check_image_size(width: usize, height: usize, scales: usize) -> Result<()> {
    if scales >= usize::BITS as usize || width.min(height) < (1usize << scales) {
        return Err(Error::Geometry(format!(
            "image {width}x{height} is smaller than 2^J = 2^{scales}"
        )));
    }
    Ok(())
}

/// Half-sample symmetric reflection of `i` into `0..n`.
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Mirror-extends the plane to `width x height`, returning it with the
/// offset of the original top-left corner.
pub fn mirror_pad(plane: &ImagePlane, width: usize, height: usize) -> (ImagePlane, usize, usize) {
    assert!(width >= plane.width() && height >= plane.height());
    let left = (width - plane.width()) / 2;
    let top = (height - plane.height()) / 2;
    let padded = ImagePlane::from_fn(width, height, |x, y| {
        plane.get(
            reflect(x as isize - left as isize, plane.width()),
            reflect(y as isize - top as isize, plane.height()),
        )
    });
    (padded, left, top)
}

fn check_grid(plane: &ImagePlane, bank: &FilterBank) -> Result<()> {
    if plane.width() != bank.width() || plane.height() != bank.height() {
        return Err(Error::Geometry(format!(
            "plane {}x{} does not match filter bank grid {}x{}",
            plane.width(),
            plane.height(),
            bank.width(),
            bank.height()
        )));
    }
    Ok(())
}

fn check_element(bank: &FilterBank, e: PathElement) -> Result<()> {
    if e.j >= bank.scales() || e.k >= bank.angles() {
        return Err(Error::Parameter(format!(
            "path element (j={}, k={}) outside bank J={} K={}",
            e.j,
            e.k,
            bank.scales(),
            bank.angles()
        )));
    }
    Ok(())
}

/// `|IFFT(spectrum * psi_hat)|`.
fn modulus_from_spectrum(spectrum: &[Complex64], bank: &FilterBank, e: PathElement) -> Vec<f64> {
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .zip(bank.psi_hat(e.j, e.k))
        .map(|(s, &p)| s * p)
        .collect();
    bank.fft().inverse(&mut buf);
    buf.into_iter().map(|c| c.norm()).collect()
}

/// `U[lambda] f = |f * psi_lambda|` by circular convolution on the bank grid.
pub fn wavelet_modulus(plane: &ImagePlane, bank: &FilterBank, elem: PathElement) -> Result<ImagePlane> {
    check_grid(plane, bank)?;
    check_element(bank, elem)?;
    let spectrum = bank.fft().forward_real(plane.samples());
    ImagePlane::new(
        plane.width(),
        plane.height(),
        modulus_from_spectrum(&spectrum, bank, elem),
    )
}

/// Sample positions kept after subsampling and cropping, in padded coordinates.
#[derive(Debug, Clone)]
struct OutputGrid {
    xs: Vec<usize>,
    ys: Vec<usize>,
}

impl OutputGrid {
    fn new(width: usize, height: usize, left: usize, top: usize, stride: usize) -> Self {
        Self {
            xs: (0..width).step_by(stride).map(|x| x + left).collect(),
            ys: (0..height).step_by(stride).map(|y| y + top).collect(),
        }
    }

    fn count(&self) -> usize {
        self.xs.len() * self.ys.len()
    }
}

pub fn output_stride(scales: usize, oversampling: usize) -> usize {
    1usize << scales.saturating_sub(oversampling)
}

/// Weights `w` with `mean_{x in grid} (u * phi)(x) = sum_y u(y) w(y)`.
fn averaging_weights(bank: &FilterBank, grid: &OutputGrid) -> Vec<f64> {
    let (w, h) = (bank.width(), bank.height());
    let mut mask = vec![Complex64::default(); w * h];
    let norm = 1.0 / grid.count() as f64;
    for &y in &grid.ys {
        for &x in &grid.xs {
            mask[y * w + x] = Complex64::new(norm, 0.0);
        }
    }
    bank.fft().forward(&mut mask);
    // phi is even, so correlation and convolution coincide.
    mask.iter_mut().zip(bank.phi_hat()).for_each(|(m, &p)| *m *= p);
    bank.fft().inverse(&mut mask);
    mask.into_iter().map(|c| c.re).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Prepared {
    padded: ImagePlane,
    grid: OutputGrid,
}

fn prepare(plane: &ImagePlane, bank: &FilterBank, max_order: usize, oversampling: usize) -> Result<Prepared> {
    check_order(max_order)?;
    let scales = bank.scales();
    check_image_size(plane.width(), plane.height(), scales)?;
    let (pw, ph) = (padded_len(plane.width(), scales), padded_len(plane.height(), scales));
    if bank.width() != pw || bank.height() != ph {
        return Err(Error::Geometry(format!(
            "image {}x{} pads to {pw}x{ph} but the filter bank grid is {}x{}",
            plane.width(),
            plane.height(),
            bank.width(),
            bank.height()
        )));
    }
    let (padded, left, top) = mirror_pad(plane, pw, ph);
    let grid = OutputGrid::new(
        plane.width(),
        plane.height(),
        left,
        top,
        output_stride(scales, oversampling),
    );
    Ok(Prepared { padded, grid })
}

fn order_one_elements(bank: &FilterBank) -> Vec<PathElement> {
    (0..bank.scales())
        .flat_map(|j| (0..bank.angles()).map(move |k| PathElement::new(j, k)))
        .collect()
}

/// Scattering coefficients of one plane, one value per path of
/// [`enumerate_paths`]. The bank must live on the padded grid of the plane
/// (see [`bank_for_image`]).
pub fn scatter(
    plane: &ImagePlane,
    bank: &FilterBank,
    max_order: usize,
    oversampling: usize,
) -> Result<ScatteringFeatures> {
    let prep = prepare(plane, bank, max_order, oversampling)?;
    let weights = averaging_weights(bank, &prep.grid);
    let spectrum = bank.fft().forward_real(prep.padded.samples());

    let mut values = vec![dot(prep.padded.samples(), &weights)];
    if max_order >= 1 {
        let per_first: Vec<(f64, Vec<f64>)> = order_one_elements(bank)
            .into_par_iter()
            .map(|e1| {
                let u1 = modulus_from_spectrum(&spectrum, bank, e1);
                let s1 = dot(&u1, &weights);
                let mut second = Vec::new();
                if max_order >= 2 && e1.j + 1 < bank.scales() {
                    let u1_hat = bank.fft().forward_real(&u1);
                    for j2 in e1.j + 1..bank.scales() {
                        for k2 in 0..bank.angles() {
                            let u2 = modulus_from_spectrum(&u1_hat, bank, PathElement::new(j2, k2));
                            second.push(dot(&u2, &weights));
                        }
                    }
                }
                (s1, second)
            })
            .collect();
        values.extend(per_first.iter().map(|(s1, _)| *s1));
        for (_, second) in per_first {
            values.extend(second);
        }
    }

    let paths = enumerate_paths(bank.scales(), bank.angles(), max_order)?;
    debug_assert_eq!(paths.len(), values.len());
    Ok(ScatteringFeatures { paths, values })
}

/// Per-channel scattering, concatenated in plane order.
pub fn scatter_color(
    img: &ColorImage,
    bank: &FilterBank,
    max_order: usize,
    oversampling: usize,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (c, plane) in img.planes().iter().enumerate() {
        let f = scatter(plane, bank, max_order, oversampling)
            .map_err(|e| e.context(format!("{} channel {c}", img.space())))?;
        out.extend(f.values);
    }
    Ok(out)
}

/// Full `S[p]f` maps (subsampled and cropped) for every path, in canonical order.
pub fn scattering_maps(
    plane: &ImagePlane,
    bank: &FilterBank,
    max_order: usize,
    oversampling: usize,
) -> Result<Vec<(ScatteringPath, ImagePlane)>> {
    let prep = prepare(plane, bank, max_order, oversampling)?;
    let fft = bank.fft();
    let grid = &prep.grid;
    let average = |u: &[f64]| -> ImagePlane {
        let mut buf = fft.forward_real(u);
        buf.iter_mut().zip(bank.phi_hat()).for_each(|(b, &p)| *b *= p);
        fft.inverse(&mut buf);
        let w = bank.width();
        let buf = &buf;
        let samples = grid
            .ys
            .iter()
            .flat_map(|&y| grid.xs.iter().map(move |&x| buf[y * w + x].re))
            .collect();
        ImagePlane::new(grid.xs.len(), grid.ys.len(), samples).expect("finite scattering map")
    };

    let paths = enumerate_paths(bank.scales(), bank.angles(), max_order)?;
    let spectrum = fft.forward_real(prep.padded.samples());
    let mut first: Vec<(PathElement, Vec<f64>)> = Vec::new();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let map = match path.elements() {
            [] => average(prep.padded.samples()),
            [e1] => {
                let u1 = modulus_from_spectrum(&spectrum, bank, *e1);
                let m = average(&u1);
                first.push((*e1, u1));
                m
            }
            [e1, e2] => {
                let u1 = &first.iter().find(|(e, _)| e == e1).expect("order-1 parent").1;
                let u2 = modulus_from_spectrum(&fft.forward_real(u1), bank, *e2);
                average(&u2)
            }
            _ => unreachable!("orders above 2 are rejected"),
        };
        out.push((path, map));
    }
    Ok(out)
}

/// Tiles equally sized planes `cols` per row; unused cells are zero.
pub fn montage(tiles: &[ImagePlane], cols: usize) -> Result<ImagePlane> {
    let first = tiles
        .first()
        .ok_or_else(|| Error::Parameter("montage needs at least one tile".into()))?;
    let (tw, th) = (first.width(), first.height());
    if tiles.iter().any(|t| t.width() != tw || t.height() != th) {
        return Err(Error::Geometry("montage tiles differ in size".into()));
    }
    let cols = cols.clamp(1, tiles.len());
    let rows = tiles.len().div_ceil(cols);
    Ok(ImagePlane::from_fn(cols * tw, rows * th, |x, y| {
        let idx = (y / th) * cols + x / tw;
        tiles.get(idx).map_or(0.0, |t| t.get(x % tw, y % th))
    }))
}

/// Writes `order0.png`, `order1.png` and `order2.png` montages of the
/// scattering maps (oversampling 1). Order-1 tiles are laid out one scale per
/// row, order-2 tiles one `(j1, k1, j2)` triple per row.
///
/// Values below `1e-10 * max|f|` are floating-point residue of the zero-mean
/// filters and are written as zero.
pub fn dump_layers(plane: &ImagePlane, bank: &FilterBank, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let maps = scattering_maps(plane, bank, MAX_ORDER, 1)?;
    let floor = 1e-10 * plane.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for order in 0..=MAX_ORDER {
        let tiles: Vec<ImagePlane> = maps
            .iter()
            .filter(|(p, _)| p.order() == order)
            .map(|(_, m)| {
                if order == 0 {
                    m.clone()
                } else {
                    m.map(|v| if v.abs() < floor { 0.0 } else { v })
                }
            })
            .collect();
        if tiles.is_empty() {
            continue;
        }
        let sheet = montage(&tiles, bank.angles())?;
        save_plane_image(&sheet, dir.join(format!("order{order}.png")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texture(w: usize, h: usize) -> ImagePlane {
        ImagePlane::from_fn(w, h, |x, y| {
            let (x, y) = (x as f64, y as f64);
            (0.7 * x + 0.2 * y).sin() * 40.0 + (0.13 * x * y).cos() * 10.0 + 100.0
        })
    }

    #[test]
    fn path_enumeration_counts() {
        assert_eq!(enumerate_paths(4, 8, 2).unwrap().len(), 417);
        assert_eq!(enumerate_paths(1, 1, 2).unwrap().len(), 2);
        assert_eq!(enumerate_paths(3, 2, 2).unwrap().len(), 19);
        assert_eq!(enumerate_paths(3, 2, 0).unwrap().len(), 1);
        assert_eq!(enumerate_paths(3, 2, 1).unwrap().len(), 7);
        assert!(matches!(enumerate_paths(3, 2, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn canonical_order() {
        let paths = enumerate_paths(3, 2, 2).unwrap();
        assert!(paths[0].elements().is_empty());
        let orders: Vec<usize> = paths.iter().map(|p| p.order()).collect();
        assert!(orders.windows(2).all(|w| w[0] <= w[1]));
        let o2: Vec<_> = paths.iter().filter(|p| p.order() == 2).collect();
        assert!(o2.windows(2).all(|w| w[0].elements() < w[1].elements()));
        assert!(o2.iter().all(|p| p.elements()[0].j < p.elements()[1].j));
    }

    #[test]
    fn path_validation() {
        let e = PathElement::new;
        assert!(ScatteringPath::new(vec![e(1, 0), e(1, 1)]).is_err());
        assert!(ScatteringPath::new(vec![e(0, 0), e(1, 0), e(2, 0)]).is_err());
        assert_eq!(ScatteringPath::new(vec![e(0, 3), e(2, 1)]).unwrap().to_string(), "j0k3-j2k1");
    }

    #[test]
    fn padding_sizes_and_reflection() {
        assert_eq!(padded_len(200, 4), 208);
        assert_eq!(padded_len(64, 4), 64);
        let p = ImagePlane::from_fn(3, 1, |x, _| x as f64);
        let (q, left, top) = mirror_pad(&p, 8, 1);
        assert_eq!((left, top), (2, 0));
        assert_eq!(q.samples(), &[1.0, 0.0, 0.0, 1.0, 2.0, 2.0, 1.0, 0.0]);
        assert_eq!(reflect(-7, 3), 0);
        assert_eq!(reflect(-4, 3), 2);
    }

    #[test]
    fn constant_plane_is_annihilated() {
        let bank = bank_for_image(40, 36, 3, 4).unwrap();
        let c = 7.5;
        let f = scatter(&ImagePlane::filled(40, 36, c), &bank, 2, 1).unwrap();
        assert!((f.values[0] - c).abs() <= 1e-8 * c);
        assert!(f.values[1..].iter().all(|v| v.abs() <= 1e-8 * c));

        let u = wavelet_modulus(&ImagePlane::filled(40, 40, c), &bank_for_image(40, 40, 3, 4).unwrap(), PathElement::new(0, 2))
            .unwrap();
        assert!(u.samples().iter().all(|v| *v <= 1e-8 * c));
    }

    #[test]
    fn features_are_nonnegative_and_sized() {
        let plane = texture(37, 29);
        let bank = bank_for_image(37, 29, 3, 4).unwrap();
        let f = scatter(&plane, &bank, 2, 1).unwrap();
        assert_eq!(f.values.len(), path_count(3, 4, 2));
        assert!(f.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn weighted_mean_matches_explicit_maps() {
        let plane = texture(24, 20);
        let bank = bank_for_image(24, 20, 2, 3).unwrap();
        for os in [0, 1, 3] {
            let f = scatter(&plane, &bank, 2, os).unwrap();
            let maps = scattering_maps(&plane, &bank, 2, os).unwrap();
            assert_eq!(maps.len(), f.values.len());
            for (((path, map), v), p) in maps.iter().zip(&f.values).zip(&f.paths) {
                assert_eq!(path, p);
                assert!((map.mean() - v).abs() <= 1e-9 * (1.0 + v.abs()), "{path}");
            }
        }
    }

    #[test]
    fn geometry_errors() {
        let bank = bank_for_image(32, 32, 3, 2).unwrap();
        assert!(matches!(
            scatter(&texture(7, 32), &bank, 2, 1),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            scatter(&texture(48, 48), &bank, 2, 1),
            Err(Error::Geometry(_))
        ));
        assert!(wavelet_modulus(&texture(16, 16), &bank, PathElement::new(0, 0)).is_err());
        assert!(wavelet_modulus(&texture(32, 32), &bank, PathElement::new(3, 0)).is_err());
        assert!(matches!(bank_for_image(4, 64, 3, 2), Err(Error::Geometry(_))));
    }

    #[test]
    fn identical_channels_repeat() {
        let p = texture(32, 32);
        let img = ColorImage::new(vec![p.clone(), p.clone(), p.clone()], crate::ColorSpace::Rgb).unwrap();
        let bank = bank_for_image(32, 32, 3, 4).unwrap();
        let v = scatter_color(&img, &bank, 2, 1).unwrap();
        let single = scatter(&p, &bank, 2, 1).unwrap().values;
        assert_eq!(v.len(), 3 * single.len());
        for chunk in v.chunks(single.len()) {
            assert_eq!(chunk, single.as_slice());
        }
    }

    #[test]
    fn montage_layout() {
        let tiles: Vec<_> = (0..3).map(|i| ImagePlane::filled(2, 1, i as f64)).collect();
        let m = montage(&tiles, 2).unwrap();
        assert_eq!((m.width(), m.height()), (4, 2));
        assert_eq!(m.samples(), &[0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 0.0, 0.0]);
    }
}
