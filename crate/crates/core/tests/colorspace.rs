mod common;

use common::rng;
use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use proptest::prelude::*;
use rand::Rng;
use scatter_tex::colorspace::{
    convert_pixel, linear_matrix, DOUBLE_OPPONENT, rgb_to_double_opponent, rgb_to_opponent, JPEG_YCBCR, JPEG_YCBCR_OFFSET, YCBCR,
    YCBCR_OFFSET,
};
use scatter_tex::{convert, ColorImage, ColorSpace, Error};

const TOL: f64 = 1e-9;

fn image(rgb: &[[f64; 3]]) -> ColorImage {
    let flat: Vec<f64> = rgb.iter().flatten().copied().collect();
    ColorImage::from_interleaved_rgb(rgb.len(), 1, &flat).unwrap()
}

fn invert(m: [[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[i][j]).try_inverse().expect("invertible")
}

#[test]
fn every_space_has_the_declared_plane_count() {
    let mut r = rng(1);
    let px: Vec<[f64; 3]> = (0..16)
        .map(|i| match i {
            0 => [0.0; 3],
            1 => [255.0; 3],
            _ => [0, 1, 2].map(|_| r.random_range(0.0..=255.0f64).round()),
        })
        .collect();
    let img = image(&px);
    for space in ColorSpace::ALL {
        let out = convert(&img, space).unwrap();
        assert_eq!(out.planes().len(), space.channel_count(), "{space}");
        assert_eq!(out.space(), space);
        assert!(out.planes().iter().all(|p| p.samples().iter().all(|v| v.is_finite())));
        for (i, p) in px.iter().enumerate() {
            let expected = convert_pixel(*p, space);
            let got = out.pixel(i, 0);
            assert_eq!(got, expected, "{space} pixel {i}");
        }
    }
}

#[test]
fn rgb_is_sample_exact() {
    let img = image(&[[1.0, 2.5, 254.0], [0.0, 128.0, 7.0]]);
    assert_eq!(convert(&img, ColorSpace::Rgb).unwrap(), img);
}

#[test]
fn dispatch_matches_direct_functions() {
    let px = [[12.0, 200.0, 99.0], [255.0, 0.0, 31.0]];
    let unit: Vec<[f64; 3]> = px.iter().map(|p| p.map(|v| v / 255.0)).collect();
    let a = convert(&image(&px), ColorSpace::Opponent).unwrap();
    let b = rgb_to_opponent(&image(&unit)).unwrap();
    assert_eq!(a, b);
    let a = convert(&image(&px), ColorSpace::DoubleOpponent).unwrap();
    let b = rgb_to_double_opponent(&image(&unit)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gray_has_exact_chrominance() {
    for v in [0.0, 1.0, 37.0, 128.0, 255.0] {
        let g = [v, v, v];
        let u = v / 255.0;
        let check = |space: ColorSpace, expected: &[f64]| {
            let got = convert_pixel(g, space);
            for (x, y) in got.iter().zip(expected) {
                assert!((x - y).abs() <= TOL, "{space} gray {v}: {got:?} vs {expected:?}");
            }
        };
        for space in [ColorSpace::Yuv, ColorSpace::Yiq, ColorSpace::YPbPr, ColorSpace::YDbDr] {
            let y = convert_pixel(g, space)[0];
            assert!((y - u).abs() <= TOL, "{space} luma");
            check(space, &[u, 0.0, 0.0]);
        }
        check(ColorSpace::I1I2I3, &[u, 0.0, 0.0]);
        check(ColorSpace::Opponent, &[0.0, 0.0, 3f64.sqrt() * u]);
        check(ColorSpace::DoubleOpponent, &[0.0, 0.0, 0.0, 3f64.sqrt() * u]);
        let ycc = convert_pixel(g, ColorSpace::YCbCr);
        assert_eq!(&ycc[1..], &[128.0, 128.0]);
        check(ColorSpace::JpegYCbCr, &[255.0 * u, 128.0, 128.0]);
        for space in [ColorSpace::CieLab, ColorSpace::CieLuv] {
            let p = convert_pixel(g, space);
            assert!(p[1].abs() <= TOL && p[2].abs() <= TOL, "{space} gray {v}: {p:?}");
        }
        assert!(convert_pixel(g, ColorSpace::CieLch)[1].abs() <= TOL);
        for space in [ColorSpace::Hsv, ColorSpace::Hsi] {
            assert_eq!(convert_pixel(g, space)[1], 0.0, "{space}");
        }
    }
}

#[test]
fn non_rgb_source_is_rejected() {
    let img = convert(&image(&[[1.0, 2.0, 3.0]]), ColorSpace::Yuv).unwrap();
    assert!(matches!(convert(&img, ColorSpace::Hsv), Err(Error::Conversion(_))));
}

#[test]
fn tags_round_trip() {
    for space in ColorSpace::ALL {
        assert_eq!(space.tag().parse::<ColorSpace>().unwrap(), space);
        assert_eq!(space.tag(), space.tag().to_lowercase());
    }
    assert!("no-such-space".parse::<ColorSpace>().is_err());
}

proptest! {
    #[test]
    fn linear_spaces_invert(r in 0.0..=255.0f64, g in 0.0..=255.0f64, b in 0.0..=255.0f64) {
        for space in ColorSpace::ALL.into_iter().filter(|s| s.is_linear() && *s != ColorSpace::DoubleOpponent) {
            let m = linear_matrix(space).unwrap();
            let out = convert_pixel([r, g, b], space);
            let back = invert(m) * Vector3::new(out[0], out[1], out[2]);
            let scale = if space == ColorSpace::Rgb { 1.0 } else { 255.0 };
            for (x, y) in back.iter().zip([r, g, b]) {
                prop_assert!((x * scale - y).abs() <= TOL * 255.0, "{space}: {back:?}");
            }
        }
    }

    #[test]
    fn double_opponent_has_left_inverse(r in 0.0..=255.0f64, g in 0.0..=255.0f64, b in 0.0..=255.0f64) {
        let m = DMatrix::from_fn(4, 3, |i, j| DOUBLE_OPPONENT[i][j]);
        let out = DVector::from_vec(convert_pixel([r, g, b], ColorSpace::DoubleOpponent));
        let back = m.pseudo_inverse(1e-12).unwrap() * out * 255.0;
        for (x, y) in back.iter().zip([r, g, b]) {
            prop_assert!((x - y).abs() <= TOL * 255.0);
        }
    }

    #[test]
    fn offset_spaces_invert(r in 0.0..=255.0f64, g in 0.0..=255.0f64, b in 0.0..=255.0f64) {
        let ycc = convert_pixel([r, g, b], ColorSpace::YCbCr);
        let y = Vector3::new(ycc[0], ycc[1], ycc[2]) - Vector3::from(YCBCR_OFFSET);
        let back = invert(YCBCR) * y * 256.0;
        for (x, v) in back.iter().zip([r, g, b]) {
            prop_assert!((x - v).abs() <= TOL * 255.0);
        }

        let jpg = convert_pixel([r, g, b], ColorSpace::JpegYCbCr);
        let y = Vector3::new(jpg[0], jpg[1], jpg[2]) - Vector3::from(JPEG_YCBCR_OFFSET);
        let back = invert(JPEG_YCBCR) * y;
        for (x, v) in back.iter().zip([r, g, b]) {
            prop_assert!((x - v).abs() <= TOL * 255.0);
        }
    }

    #[test]
    fn linear_spaces_are_linear(
        x in prop::array::uniform3(0.0..=255.0f64),
        y in prop::array::uniform3(0.0..=255.0f64),
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
    ) {
        let mix: [f64; 3] = std::array::from_fn(|i| a * x[i] + b * y[i]);
        for space in ColorSpace::ALL.into_iter().filter(|s| s.is_linear()) {
            let (cx, cy, cm) = (convert_pixel(x, space), convert_pixel(y, space), convert_pixel(mix, space));
            for i in 0..cm.len() {
                let want = a * cx[i] + b * cy[i];
                prop_assert!((cm[i] - want).abs() <= 1e-10 * (1.0 + want.abs()), "{space}");
            }
        }
    }

    #[test]
    fn hue_ranges(r in 0.0..=255.0f64, g in 0.0..=255.0f64, b in 0.0..=255.0f64) {
        for space in [ColorSpace::Hsv, ColorSpace::Hsl, ColorSpace::Hsi] {
            let p = convert_pixel([r, g, b], space);
            prop_assert!((0.0..360.0).contains(&p[0]), "{space} hue {}", p[0]);
            prop_assert!((-TOL..=1.0 + TOL).contains(&p[1]), "{space} sat {}", p[1]);
        }
    }
}
