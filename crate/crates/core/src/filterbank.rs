//! Fourier-domain Morlet filter bank: `J` dyadic scales times `K` orientations
//! in `[0, pi)`, plus a Gaussian low-pass at the coarsest scale.
//!
//! Filters are sampled directly on the periodic frequency grid of the
//! (padded) image, summing the aliased replicas of each analytic
//! expression. Scale index `j = 0` is the finest wavelet.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft2d;

/// Replicas `2 pi n` with `|n_x|, |n_y| <= PERIODIZATION` are summed.
const PERIODIZATION: i32 = 2;

/// Mother Morlet shape: envelope width, centre frequency, and the
/// perpendicular/parallel aspect ratio of the spatial envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorletParams {
    pub sigma0: f64,
    pub xi0: f64,
    pub slant: f64,
}

impl Default for MorletParams {
    fn default() -> Self {
        Self {
            sigma0: 0.8,
            xi0: 0.75 * PI,
            slant: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterBankParams {
    /// Number of scales; the low-pass averages over `2^J` pixels.
    pub scales: usize,
    /// Number of orientations `theta_k = k pi / K`.
    pub angles: usize,
    pub morlet: MorletParams,
    pub width: usize,
    pub height: usize,
}

impl FilterBankParams {
    pub fn new(scales: usize, angles: usize, width: usize, height: usize) -> Self {
        Self {
            scales,
            angles,
            morlet: MorletParams::default(),
            width,
            height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scales == 0 || self.angles == 0 {
            return Err(Error::Parameter(format!(
                "need J >= 1 and K >= 1, got J={} K={}",
                self.scales, self.angles
            )));
        }
        if self.scales >= usize::BITS as usize
            || (1usize << self.scales) > self.width.min(self.height)
        {
            return Err(Error::Geometry(format!(
                "2^J = 2^{} exceeds grid {}x{}",
                self.scales, self.width, self.height
            )));
        }
        let m = &self.morlet;
        if !(m.sigma0 > 0.0 && m.xi0 > 0.0 && m.xi0 < PI && m.slant > 0.0) {
            return Err(Error::Parameter(format!(
                "invalid Morlet parameters {m:?}"
            )));
        }
        Ok(())
    }

    /// Width of the Gaussian low-pass.
    pub fn phi_sigma(&self) -> f64 {
        self.morlet.sigma0 * (1u64 << (self.scales - 1)) as f64
    }
}

/// Signed angular frequency of DFT bin `u` on an `n`-point axis, in `(-pi, pi]`.
pub fn bin_frequency(u: usize, n: usize) -> f64 {
    let signed = if 2 * u <= n { u as f64 } else { u as f64 - n as f64 };
    2.0 * PI * signed / n as f64
}

/// Anisotropic Gaussian in the Fourier domain, DC value 1.
fn gaussian_hat(par: f64, perp: f64, sigma: f64, slant: f64) -> f64 {
    (-0.5 * sigma * sigma * (par * par + perp * perp / (slant * slant))).exp()
}

fn periodized(width: usize, height: usize, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(width * height);
    for v in 0..height {
        let wy = bin_frequency(v, height);
        for u in 0..width {
            let wx = bin_frequency(u, width);
            let mut acc = 0.0;
            for ny in -PERIODIZATION..=PERIODIZATION {
                for nx in -PERIODIZATION..=PERIODIZATION {
                    acc += f(wx + 2.0 * PI * nx as f64, wy + 2.0 * PI * ny as f64);
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Unnormalized zero-mean Morlet at scale `2^j`, orientation `theta`.
fn morlet_hat(params: &FilterBankParams, j: usize, theta: f64) -> Vec<f64> {
    let MorletParams { sigma0, xi0, slant } = params.morlet;
    let sigma = sigma0 * (1u64 << j) as f64;
    let xi = xi0 / (1u64 << j) as f64;
    let (s, c) = theta.sin_cos();
    let (w, h) = (params.width, params.height);
    let gabor = periodized(w, h, |wx, wy| {
        gaussian_hat(wx * c + wy * s - xi, -wx * s + wy * c, sigma, slant)
    });
    let envelope = periodized(w, h, |wx, wy| {
        gaussian_hat(wx * c + wy * s, -wx * s + wy * c, sigma, slant)
    });
    let beta = gabor[0] / envelope[0];
    gabor
        .iter()
        .zip(&envelope)
        .map(|(g, e)| g - beta * e)
        .collect()
}

/// Index of the bin holding `-omega` for bin `i`.
fn mirror_index(i: usize, width: usize, height: usize) -> usize {
    let (u, v) = (i % width, i / width);
    ((height - v) % height) * width + (width - u) % width
}

/// `A(w) = |phi(w)|^2 + 1/2 sum (|psi(w)|^2 + |psi(-w)|^2)` at every bin.
pub fn littlewood_paley_map(width: usize, height: usize, psi: &[Vec<f64>], phi: &[f64]) -> Vec<f64> {
    let mut sum = vec![0.0; width * height];
    for filter in psi {
        for (i, s) in sum.iter_mut().enumerate() {
            let a = filter[i];
            let b = filter[mirror_index(i, width, height)];
            *s += 0.5 * (a * a + b * b);
        }
    }
    sum.iter_mut().zip(phi).for_each(|(s, p)| *s += p * p);
    sum
}

/// Immutable bank of Fourier-domain filters for one grid.
#[derive(Debug, Clone)]
pub struct FilterBank {
    params: FilterBankParams,
    psi: Vec<Vec<f64>>,
    phi: Vec<f64>,
    fft: Fft2d,
}

impl FilterBank {
    /// Builds and calibrates the bank so its Littlewood-Paley sum peaks at 1.
    pub fn new(params: FilterBankParams) -> Result<Self> {
        params.validate()?;
        let (w, h) = (params.width, params.height);

        let sigma_phi = params.phi_sigma();
        let mut phi = periodized(w, h, |wx, wy| gaussian_hat(wx, wy, sigma_phi, 1.0));
        let dc = phi[0];
        phi.iter_mut().for_each(|v| *v /= dc);

        let mut psi = Vec::with_capacity(params.scales * params.angles);
        for j in 0..params.scales {
            for k in 0..params.angles {
                let theta = k as f64 * PI / params.angles as f64;
                psi.push(morlet_hat(&params, j, theta));
            }
        }

        // Common gain so that |phi|^2 + gain^2 * wavelet energy <= 1 on every bin.
        let raw = littlewood_paley_map(w, h, &psi, &vec![0.0; w * h]);
        let gain_sq = raw
            .iter()
            .zip(&phi)
            .skip(1)
            .filter(|(e, _)| **e > 0.0)
            .map(|(e, p)| (1.0 - p * p).max(0.0) / e)
            .fold(f64::INFINITY, f64::min);
        let gain = if gain_sq.is_finite() { gain_sq.sqrt() } else { 1.0 };
        for filter in psi.iter_mut() {
            filter.iter_mut().for_each(|v| *v *= gain);
        }

        Ok(Self {
            params,
            psi,
            phi,
            fft: Fft2d::new(w, h),
        })
    }

    /// Assembles a bank from precomputed Fourier-domain filters (ordered `j * K + k`).
    pub fn from_parts(params: FilterBankParams, psi: Vec<Vec<f64>>, phi: Vec<f64>) -> Result<Self> {
        params.validate()?;
        let n = params.width * params.height;
        if psi.len() != params.scales * params.angles
            || psi.iter().any(|f| f.len() != n)
            || phi.len() != n
        {
            return Err(Error::Geometry("filter sizes do not match bank geometry".into()));
        }
        Ok(Self {
            params,
            psi,
            phi,
            fft: Fft2d::new(params.width, params.height),
        })
    }

    pub fn params(&self) -> &FilterBankParams {
        &self.params
    }

    pub fn scales(&self) -> usize {
        self.params.scales
    }

    pub fn angles(&self) -> usize {
        self.params.angles
    }

    pub fn width(&self) -> usize {
        self.params.width
    }

    pub fn height(&self) -> usize {
        self.params.height
    }

    pub fn fft(&self) -> &Fft2d {
        &self.fft
    }

    pub fn psi_count(&self) -> usize {
        self.psi.len()
    }

    /// Fourier-domain wavelet `(j, k)`; real-valued on the DFT grid.
    pub fn psi_hat(&self, j: usize, k: usize) -> &[f64] {
        assert!(j < self.params.scales && k < self.params.angles);
        &self.psi[j * self.params.angles + k]
    }

    pub fn phi_hat(&self) -> &[f64] {
        &self.phi
    }

    /// Spatial-domain wavelet `(j, k)` on the periodic grid, origin at index 0.
    pub fn psi_spatial(&self, j: usize, k: usize) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = self
            .psi_hat(j, k)
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.fft.inverse(&mut buf);
        buf
    }

    pub fn phi_spatial(&self) -> Vec<f64> {
        let mut buf: Vec<Complex64> = self.phi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    pub fn littlewood_paley_map(&self) -> Vec<f64> {
        littlewood_paley_map(self.params.width, self.params.height, &self.psi, &self.phi)
    }
}

/// Extrema of the Littlewood-Paley sum over the frequency grid.
pub fn littlewood_paley(bank: &FilterBank) -> (f64, f64) {
    bank.littlewood_paley_map()
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}
