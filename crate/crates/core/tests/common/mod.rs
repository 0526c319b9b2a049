//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use scatter_tex::{FilterBank, ImagePlane};

/// Inverse 2D DFT by direct summation (`1/N` normalized).
pub fn naive_idft2(hat: &[f64], w: usize, h: usize) -> Vec<Complex64> {
    let tw = |n: usize| -> Vec<Complex64> {
        (0..n)
            .map(|i| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / n as f64))
            .collect()
    };
    let (tx, ty) = (tw(w), tw(h));
    let mut out = vec![Complex64::default(); w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = Complex64::default();
            for v in 0..h {
                let ey = ty[(v * y) % h];
                for u in 0..w {
                    acc += hat[v * w + u] * tx[(u * x) % w] * ey;
                }
            }
            out[y * w + x] = acc / (w * h) as f64;
        }
    }
    out
}

/// `(f * g)(x) = sum_y f(y) g(x - y)` with periodic wrap.
pub fn circular_conv(f: &[Complex64], g: &[Complex64], w: usize, h: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = Complex64::default();
            for sy in 0..h {
                let gy = (y + h - sy) % h;
                for sx in 0..w {
                    acc += f[sy * w + sx] * g[gy * w + (x + w - sx) % w];
                }
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Circular convolution evaluated only at the listed points.
pub fn circular_conv_at(f: &[f64], g: &[f64], w: usize, h: usize, points: &[(usize, usize)]) -> Vec<f64> {
    points
        .iter()
        .map(|&(x, y)| {
            let mut acc = 0.0;
            for sy in 0..h {
                let gy = (y + h - sy) % h;
                for sx in 0..w {
                    acc += f[sy * w + sx] * g[gy * w + (x + w - sx) % w];
                }
            }
            acc
        })
        .collect()
}

/// Mirror extension where the edge sample is repeated (`..., 1, 0 | 0, 1, ...`).
pub fn symmetric_extend(plane: &ImagePlane, pw: usize, ph: usize) -> (Vec<f64>, usize, usize) {
    let (w, h) = (plane.width(), plane.height());
    let (left, top) = ((pw - w) / 2, (ph - h) / 2);
    let fold = |i: isize, n: usize| -> usize {
        let n = n as isize;
        let mut i = i;
        loop {
            if i < 0 {
                i = -1 - i;
            } else if i >= n {
                i = 2 * n - 1 - i;
            } else {
                return i as usize;
            }
        }
    };
    let mut out = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        for x in 0..pw {
            out.push(plane.get(
                fold(x as isize - left as isize, w),
                fold(y as isize - top as isize, h),
            ));
        }
    }
    (out, left, top)
}

/// Spatial-domain scattering: direct convolutions with filters obtained by a
/// direct inverse DFT of the bank's Fourier responses. Same path order as
/// the library: order 0, order 1 by (j, k), order 2 by (j1, k1, j2, k2).
pub fn reference_scatter(plane: &ImagePlane, bank: &FilterBank, max_order: usize, oversampling: usize) -> Vec<f64> {
    let (pw, ph) = (bank.width(), bank.height());
    let (scales, angles) = (bank.scales(), bank.angles());
    let (padded, left, top) = symmetric_extend(plane, pw, ph);
    let stride = 1usize << scales.saturating_sub(oversampling);
    let mut points = Vec::new();
    for y in (0..plane.height()).step_by(stride) {
        for x in (0..plane.width()).step_by(stride) {
            points.push((x + left, y + top));
        }
    }
    let phi: Vec<f64> = naive_idft2(bank.phi_hat(), pw, ph).iter().map(|c| c.re).collect();
    let psi: Vec<Vec<Complex64>> = (0..scales)
        .flat_map(|j| (0..angles).map(move |k| (j, k)))
        .map(|(j, k)| naive_idft2(bank.psi_hat(j, k), pw, ph))
        .collect();
    let average = |u: &[f64]| -> f64 {
        let s = circular_conv_at(u, &phi, pw, ph, &points);
        s.iter().sum::<f64>() / s.len() as f64
    };
    let modulus = |u: &[f64], filt: &[Complex64]| -> Vec<f64> {
        let uc: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        circular_conv(&uc, filt, pw, ph).iter().map(|c| c.norm()).collect()
    };

    let mut out = vec![average(&padded)];
    if max_order == 0 {
        return out;
    }
    let first: Vec<Vec<f64>> = psi.iter().map(|p| modulus(&padded, p)).collect();
    out.extend(first.iter().map(|u| average(u)));
    if max_order >= 2 {
        for j1 in 0..scales {
            for k1 in 0..angles {
                for j2 in j1 + 1..scales {
                    for k2 in 0..angles {
                        let u2 = modulus(&first[j1 * angles + k1], &psi[j2 * angles + k2]);
                        out.push(average(&u2));
                    }
                }
            }
        }
    }
    out
}

pub fn random_plane(rng: &mut impl Rng, w: usize, h: usize) -> ImagePlane {
    ImagePlane::from_fn(w, h, |_, _| rng.random_range(0.0..255.0))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l2(&diff) / l2(a)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
