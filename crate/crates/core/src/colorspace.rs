//! RGB to the eighteen colour spaces of the benchmark.
//!
//! Every conversion is a pure per-pixel map. The six equation-backed spaces
//! (YCbCr, HSL, I1I2I3, CIE XYZ, opponent, double opponent) use their
//! published constants verbatim; the remaining spaces use the textbook
//! definitions (ITU-R BT.601 luma weights, sRGB primaries with a D65 white,
//! CAT02 for LMS). No gamma handling is applied: samples are treated as
//! linear.
//!
//! Input scale: [`rgb_to_ycbcr`] expects `[0, 255]`, every other `rgb_to_*`
//! function expects `[0, 1]`. [`convert`] takes `[0, 255]` RGB and performs
//! the division itself.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ColorImage, ImagePlane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ColorSpace {
    Rgb,
    Yuv,
    Yiq,
    YPbPr,
    YCbCr,
    JpegYCbCr,
    YDbDr,
    Hsv,
    Hsl,
    Hsi,
    I1I2I3,
    CieXyz,
    CieLuv,
    CieLch,
    CieLab,
    Cat02Lms,
    Opponent,
    DoubleOpponent,
}

impl ColorSpace {
    /// All spaces in accuracy-table row order.
    pub const ALL: [ColorSpace; 18] = [
        ColorSpace::Rgb,
        ColorSpace::Yuv,
        ColorSpace::Yiq,
        ColorSpace::YPbPr,
        ColorSpace::YCbCr,
        ColorSpace::JpegYCbCr,
        ColorSpace::YDbDr,
        ColorSpace::Hsv,
        ColorSpace::Hsl,
        ColorSpace::Hsi,
        ColorSpace::I1I2I3,
        ColorSpace::CieXyz,
        ColorSpace::CieLuv,
        ColorSpace::CieLch,
        ColorSpace::CieLab,
        ColorSpace::Cat02Lms,
        ColorSpace::Opponent,
        ColorSpace::DoubleOpponent,
    ];

    /// The seven spaces highlighted in the accuracy plot.
    pub const PLOT_DEFAULT: [ColorSpace; 7] = [
        ColorSpace::Rgb,
        ColorSpace::YCbCr,
        ColorSpace::Hsl,
        ColorSpace::I1I2I3,
        ColorSpace::CieXyz,
        ColorSpace::Opponent,
        ColorSpace::DoubleOpponent,
    ];

    pub fn channel_count(self) -> usize {
        match self {
            ColorSpace::DoubleOpponent => 4,
            _ => 3,
        }
    }

    /// Lowercase CLI/CSV tag, e.g. `jpeg-ycbcr`.
    pub fn tag(self) -> &'static str {
        match self {
            ColorSpace::Rgb => "rgb",
            ColorSpace::Yuv => "yuv",
            ColorSpace::Yiq => "yiq",
            ColorSpace::YPbPr => "ypbpr",
            ColorSpace::YCbCr => "ycbcr",
            ColorSpace::JpegYCbCr => "jpeg-ycbcr",
            ColorSpace::YDbDr => "ydbdr",
            ColorSpace::Hsv => "hsv",
            ColorSpace::Hsl => "hsl",
            ColorSpace::Hsi => "hsi",
            ColorSpace::I1I2I3 => "i1i2i3",
            ColorSpace::CieXyz => "cie-xyz",
            ColorSpace::CieLuv => "cie-luv",
            ColorSpace::CieLch => "cie-lch",
            ColorSpace::CieLab => "cie-lab",
            ColorSpace::Cat02Lms => "cat02-lms",
            ColorSpace::Opponent => "opponent",
            ColorSpace::DoubleOpponent => "double-opponent",
        }
    }

    /// Human-readable name used in plot legends.
    pub fn display_name(self) -> &'static str {
        match self {
            ColorSpace::Rgb => "RGB",
            ColorSpace::Yuv => "YUV",
            ColorSpace::Yiq => "YIQ",
            ColorSpace::YPbPr => "YPbPr",
            ColorSpace::YCbCr => "YCbCr",
            ColorSpace::JpegYCbCr => "JPEG-YCbCr",
            ColorSpace::YDbDr => "YDbDr",
            ColorSpace::Hsv => "HSV",
            ColorSpace::Hsl => "HSL",
            ColorSpace::Hsi => "HSI",
            ColorSpace::I1I2I3 => "I1I2I3",
            ColorSpace::CieXyz => "CIE XYZ",
            ColorSpace::CieLuv => "CIE LUV",
            ColorSpace::CieLch => "CIE LCH",
            ColorSpace::CieLab => "CIE LAB",
            ColorSpace::Cat02Lms => "CAT02 LMS",
            ColorSpace::Opponent => "Opponent RGB",
            ColorSpace::DoubleOpponent => "Double Opponent RGB",
        }
    }

    /// Hue-saturation family (HSV, HSL, HSI).
    pub fn is_hue_saturation(self) -> bool {
        matches!(self, ColorSpace::Hsv | ColorSpace::Hsl | ColorSpace::Hsi)
    }

    /// Spaces that are a plain matrix product of unit-range RGB.
    pub fn is_linear(self) -> bool {
        matches!(
            self,
            ColorSpace::Rgb
                | ColorSpace::Yuv
                | ColorSpace::Yiq
                | ColorSpace::YPbPr
                | ColorSpace::YDbDr
                | ColorSpace::I1I2I3
                | ColorSpace::CieXyz
                | ColorSpace::Opponent
                | ColorSpace::DoubleOpponent
                | ColorSpace::Cat02Lms
        )
    }
}

impl fmt::Display for ColorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ColorSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        ColorSpace::ALL
            .into_iter()
            .find(|c| c.tag() == norm || c.tag().replace('-', "") == norm)
            .ok_or_else(|| Error::Conversion(format!("unsupported colour space '{s}'")))
    }
}

impl TryFrom<String> for ColorSpace {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ColorSpace> for String {
    fn from(c: ColorSpace) -> String {
        c.tag().to_owned()
    }
}

pub type Mat3 = [[f64; 3]; 3];

const KR: f64 = 0.299;
const KB: f64 = 0.114;
const KG: f64 = 1.0 - KR - KB;

/// YCbCr on `[0, 255]`, applied as `M / 256` plus [`YCBCR_OFFSET`].
pub const YCBCR: Mat3 = [
    [65.481, 128.553, 24.966],
    [-37.797, -74.203, 112.0],
    [112.0, -93.786, -18.214],
];
pub const YCBCR_OFFSET: [f64; 3] = [16.0, 128.0, 128.0];

pub const I1I2I3: Mat3 = [
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [0.5, 0.0, -0.5],
    [-0.25, 0.5, -0.25],
];

/// CIE XYZ from RGB, scaled by `1 / XYZ_SCALE`.
pub const XYZ: Mat3 = [[0.49, 0.31, 0.20], [0.177, 0.812, 0.011], [0.00, 0.01, 0.99]];
pub const XYZ_SCALE: f64 = 0.177;

const S2: f64 = std::f64::consts::SQRT_2;
// sqrt(3) and sqrt(6) are not available as std constants.
const S3: f64 = 1.732_050_807_568_877_2;
const S6: f64 = 2.449_489_742_783_178;

pub const OPPONENT: Mat3 = [
    [1.0 / S2, -1.0 / S2, 0.0],
    [1.0 / S6, 1.0 / S6, -2.0 / S6],
    [1.0 / S3, 1.0 / S3, 1.0 / S3],
];

pub const DOUBLE_OPPONENT: [[f64; 3]; 4] = [
    [1.0 / S2, -1.0 / S2, 0.0],
    [2.0 / S6, -1.0 / S6, -1.0 / S6],
    [1.0 / S6, 1.0 / S6, -2.0 / S6],
    [1.0 / S3, 1.0 / S3, 1.0 / S3],
];

pub const YUV: Mat3 = [
    [KR, KG, KB],
    [-0.147, -0.289, 0.436],
    [0.615, -0.515, -0.100],
];

pub const YIQ: Mat3 = [
    [KR, KG, KB],
    [0.595716, -0.274453, -0.321263],
    [0.211456, -0.522591, 0.311135],
];

/// BT.601 analogue colour difference, Pb = (B - Y) / (2 (1 - Kb)).
pub const YPBPR: Mat3 = [
    [KR, KG, KB],
    [-0.5 * KR / (1.0 - KB), -0.5 * KG / (1.0 - KB), 0.5],
    [0.5, -0.5 * KG / (1.0 - KR), -0.5 * KB / (1.0 - KR)],
];

/// JPEG full-range YCbCr, applied as `255 * M` plus [`JPEG_YCBCR_OFFSET`].
pub const JPEG_YCBCR: Mat3 = [
    [KR, KG, KB],
    [-0.168736, -0.331264, 0.5],
    [0.5, -0.418688, -0.081312],
];
pub const JPEG_YCBCR_OFFSET: [f64; 3] = [0.0, 128.0, 128.0];

pub const YDBDR: Mat3 = [
    [KR, KG, KB],
    [-0.450, -0.883, 1.333],
    [-1.333, 1.116, 0.217],
];

/// Linear sRGB primaries to XYZ, D65.
pub const SRGB_TO_XYZ: Mat3 = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

pub const CAT02: Mat3 = [
    [0.7328, 0.4296, -0.1624],
    [-0.7036, 1.6975, 0.0061],
    [0.0030, 0.0136, 0.9834],
];

/// Reference white for the L*-based spaces: the XYZ of unit RGB white under
/// [`SRGB_TO_XYZ`], i.e. D65 normalized to Y = 1.
pub fn white_point() -> [f64; 3] {
    mul3(&SRGB_TO_XYZ, [1.0, 1.0, 1.0])
}

#[inline]
fn mul3(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Effective 3x3 matrix on unit-range RGB for spaces without offsets or
/// nonlinearity. `None` for the others (and for the 4-channel double opponent).
pub fn linear_matrix(space: ColorSpace) -> Option<Mat3> {
    let m = match space {
        ColorSpace::Rgb => [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        ColorSpace::Yuv => YUV,
        ColorSpace::Yiq => YIQ,
        ColorSpace::YPbPr => YPBPR,
        ColorSpace::YDbDr => YDBDR,
        ColorSpace::I1I2I3 => I1I2I3,
        ColorSpace::CieXyz => XYZ.map(|r| r.map(|v| v / XYZ_SCALE)),
        ColorSpace::Opponent => OPPONENT,
        ColorSpace::Cat02Lms => matmul(&CAT02, &SRGB_TO_XYZ),
        _ => return None,
    };
    Some(m)
}

/// Per-pixel YCbCr, `rgb` in `[0, 255]`.
pub fn ycbcr_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let v = mul3(&YCBCR, rgb);
    [0, 1, 2].map(|i| v[i] / 256.0 + YCBCR_OFFSET[i])
}

fn hexcone_hue(r: f64, g: f64, b: f64, max: f64, min: f64) -> f64 {
    let d = max - min;
    if d == 0.0 {
        0.0
    } else if max == r {
        let h = 60.0 * (g - b) / d;
        if g >= b {
            h
        } else {
            h + 360.0
        }
    } else if max == g {
        60.0 * (b - r) / d + 120.0
    } else {
        60.0 * (r - g) / d + 240.0
    }
}

/// Per-pixel HSL on chromaticity-normalized components `r = R / (R + G + B)`.
/// Black (R + G + B = 0) maps to (0, 0, 0).
pub fn hsl_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let sum = rgb[0] + rgb[1] + rgb[2];
    if sum <= 0.0 {
        return [0.0; 3];
    }
    let [r, g, b] = rgb.map(|v| v / sum);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let h = hexcone_hue(r, g, b, max, min);
    let l = 0.5 * (max + min);
    let s = if l == 0.0 || max == min {
        0.0
    } else if l <= 0.5 {
        (max - min) / (2.0 * l)
    } else {
        (max - min) / (2.0 - 2.0 * l)
    };
    [h, s, l]
}

pub fn hsv_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = rgb;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let s = if max > 0.0 { (max - min) / max } else { 0.0 };
    [hexcone_hue(r, g, b, max, min), s, max]
}

pub fn hsi_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = rgb;
    let i = (r + g + b) / 3.0;
    if i <= 0.0 {
        return [0.0; 3];
    }
    let alpha = 0.5 * (2.0 * r - g - b);
    let beta = 0.5 * S3 * (g - b);
    let mut h = beta.atan2(alpha).to_degrees();
    if h < 0.0 {
        h += 360.0;
    }
    let min = r.min(g).min(b);
    [h, 1.0 - min / i, i]
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

pub fn lab_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = mul3(&SRGB_TO_XYZ, rgb);
    let [xn, yn, zn] = white_point();
    let (fx, fy, fz) = (lab_f(x / xn), lab_f(y / yn), lab_f(z / zn));
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn lch_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let [l, a, b] = lab_pixel(rgb);
    let c = a.hypot(b);
    let mut h = b.atan2(a).to_degrees();
    if h < 0.0 {
        h += 360.0;
    }
    if c == 0.0 {
        h = 0.0;
    }
    [l, c, h]
}

pub fn luv_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = mul3(&SRGB_TO_XYZ, rgb);
    let [xn, yn, zn] = white_point();
    let l = 116.0 * lab_f(y / yn) - 16.0;
    let denom = x + 15.0 * y + 3.0 * z;
    let denom_n = xn + 15.0 * yn + 3.0 * zn;
    if denom <= 0.0 {
        return [l, 0.0, 0.0];
    }
    let u = 13.0 * l * (4.0 * x / denom - 4.0 * xn / denom_n);
    let v = 13.0 * l * (9.0 * y / denom - 9.0 * yn / denom_n);
    [l, u, v]
}

pub fn jpeg_ycbcr_pixel(rgb: [f64; 3]) -> [f64; 3] {
    let v = mul3(&JPEG_YCBCR, rgb);
    [0, 1, 2].map(|i| 255.0 * v[i] + JPEG_YCBCR_OFFSET[i])
}

pub fn double_opponent_pixel(rgb: [f64; 3]) -> [f64; 4] {
    DOUBLE_OPPONENT.map(|row| row[0] * rgb[0] + row[1] * rgb[1] + row[2] * rgb[2])
}

/// Converts one pixel given in `[0, 255]` RGB, with the same input scaling as [`convert`].
pub fn convert_pixel(rgb255: [f64; 3], target: ColorSpace) -> Vec<f64> {
    let unit = rgb255.map(|v| v / 255.0);
    match target {
        ColorSpace::Rgb => rgb255.to_vec(),
        ColorSpace::YCbCr => ycbcr_pixel(rgb255).to_vec(),
        ColorSpace::JpegYCbCr => jpeg_ycbcr_pixel(unit).to_vec(),
        ColorSpace::Hsv => hsv_pixel(unit).to_vec(),
        ColorSpace::Hsl => hsl_pixel(unit).to_vec(),
        ColorSpace::Hsi => hsi_pixel(unit).to_vec(),
        ColorSpace::CieLab => lab_pixel(unit).to_vec(),
        ColorSpace::CieLch => lch_pixel(unit).to_vec(),
        ColorSpace::CieLuv => luv_pixel(unit).to_vec(),
        ColorSpace::DoubleOpponent => double_opponent_pixel(unit).to_vec(),
        linear => mul3(&linear_matrix(linear).expect("linear space"), unit).to_vec(),
    }
}

fn require_rgb(img: &ColorImage) -> Result<()> {
    if img.space() != ColorSpace::Rgb {
        return Err(Error::Conversion(format!(
            "expected an RGB source image, got {}",
            img.space()
        )));
    }
    Ok(())
}

fn map_pixels<const N: usize>(
    img: &ColorImage,
    target: ColorSpace,
    f: impl Fn([f64; 3]) -> [f64; N],
) -> Result<ColorImage> {
    require_rgb(img)?;
    let (w, h) = (img.width(), img.height());
    let [r, g, b] = [0, 1, 2].map(|c| img.planes()[c].samples());
    let mut out: Vec<Vec<f64>> = (0..N).map(|_| Vec::with_capacity(w * h)).collect();
    for i in 0..w * h {
        let px = f([r[i], g[i], b[i]]);
        for (c, v) in px.into_iter().enumerate() {
            out[c].push(v);
        }
    }
    let planes = out
        .into_iter()
        .map(|s| ImagePlane::new(w, h, s))
        .collect::<Result<Vec<_>>>()?;
    ColorImage::new(planes, target)
}

/// YCbCr; source samples in `[0, 255]`.
pub fn rgb_to_ycbcr(img: &ColorImage) -> Result<ColorImage> {
    map_pixels(img, ColorSpace::YCbCr, ycbcr_pixel)
}

/// Chromaticity-normalized HSL: H in degrees `[0, 360)`, S and L in `[0, 1]`.
pub fn rgb_to_hsl(img: &ColorImage) -> Result<ColorImage> {
    map_pixels(img, ColorSpace::Hsl, hsl_pixel)
}

pub fn rgb_to_i1i2i3(img: &ColorImage) -> Result<ColorImage> {
    map_pixels(img, ColorSpace::I1I2I3, |p| mul3(&I1I2I3, p))
}

pub fn rgb_to_xyz(img: &ColorImage) -> Result<ColorImage> {
    let m = linear_matrix(ColorSpace::CieXyz).unwrap();
    map_pixels(img, ColorSpace::CieXyz, |p| mul3(&m, p))
}

pub fn rgb_to_opponent(img: &ColorImage) -> Result<ColorImage> {
    map_pixels(img, ColorSpace::Opponent, |p| mul3(&OPPONENT, p))
}

/// Four-channel double opponent (adds the red-cyan channel).
pub fn rgb_to_double_opponent(img: &ColorImage) -> Result<ColorImage> {
    map_pixels(img, ColorSpace::DoubleOpponent, double_opponent_pixel)
}

/// Converts a `[0, 255]` RGB image into `target`.
///
/// YCbCr consumes the samples as they are; every other target first divides
/// by 255. `Rgb` returns a sample-exact copy.
pub fn convert(img: &ColorImage, target: ColorSpace) -> Result<ColorImage> {
    require_rgb(img)?;
    match target {
        ColorSpace::Rgb => Ok(img.clone()),
        ColorSpace::YCbCr => rgb_to_ycbcr(img),
        ColorSpace::DoubleOpponent => {
            map_pixels(img, target, |p| double_opponent_pixel(p.map(|v| v / 255.0)))
        }
        _ => map_pixels(img, target, |p| {
            let v = convert_pixel(p, target);
            [v[0], v[1], v[2]]
        }),
    }
}
