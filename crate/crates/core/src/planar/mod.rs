//! Periodic planar grids and the Fourier multipliers that act on them.
//!
//! Samples live at `x_i = -L/2 + i L/N` on the torus `[-L/2, L/2)²`, stored
//! row-major as `values[j * N + i]` with `i` the `x₁` index. A Fourier mode
//! `e^{i ξ·x}` has `ξ = 2π k / L` with `k` in FFT order.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{param, Result};

mod ap;
mod ascent;
mod identity;
mod io;
mod multiplier;

pub use ap::{ap_class, ap_heat, ApValue, DiscSampling, HeatSampling, PlanarWeight};
pub use ascent::{norm_ratio_ascent, AscentOptions, AscentResult};
pub use identity::{identity_1_13_check, Identity113};
pub use io::{decode_field, encode_field, read_field, write_field, FIELD_MAGIC};
pub use multiplier::{
    ab_transform, apply_multiplier, beurling, heat_extension, riesz_mixed, riesz_sq, SpectralMultiplier,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    n: usize,
    l: f64,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(n: usize, l: f64, values: Vec<Complex64>) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(param("N", format!("grid size must be a power of two ≥ 2, got {n}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(param("L", "box side must be positive"));
        }
        if values.len() != n * n {
            return Err(param("values", format!("expected {} samples, got {}", n * n, values.len())));
        }
        Ok(Self { n, l, values })
    }

    pub fn zeros(n: usize, l: f64) -> Result<Self> {
        Self::new(n, l, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn from_fn(n: usize, l: f64, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let mut g = Self::zeros(n, l)?;
        for j in 0..n {
            for i in 0..n {
                g.values[j * n + i] = f(g.coord(i), g.coord(j));
            }
        }
        Ok(g)
    }

    pub fn from_real_fn(n: usize, l: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::from_fn(n, l, |x, y| Complex64::new(f(x, y), 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// Grid spacing `L/N`.
    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.l + i as f64 * self.dx()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.n + i]
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { n: self.n, l: self.l, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Same grid, new samples.
    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { n: self.n, l: self.l, values }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && self.l == other.l
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    /// The field minus its mean, and the mean that was removed.
    pub fn split_mean(&self) -> (Self, Complex64) {
        let m = self.mean();
        (self.map(|v| v - m), m)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol * (1.0 + v.re.abs()))
    }

    /// `(∬ |f|^p dA)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let da = self.dx() * self.dx();
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() * da).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let da = self.dx() * self.dx();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * da).sqrt()
    }

    /// `∬ f ḡ dA`.
    pub fn inner(&self, g: &Self) -> Complex64 {
        let da = self.dx() * self.dx();
        self.values.iter().zip(&g.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * da
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|f|` on the outer ring of samples, relative to `max |f|`.
    /// Periodization is harmless only when this is negligible.
    pub fn boundary_ratio(&self) -> f64 {
        let n = self.n;
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        let mut b = 0.0f64;
        for k in 0..n {
            for (i, j) in [(k, 0), (k, n - 1), (0, k), (n - 1, k)] {
                b = b.max(self.get(i, j).norm());
            }
        }
        b / m
    }

    /// Fails when the field is not negligible at the box edge.
    pub fn periodization_guard(&self, tol: f64) -> Result<()> {
        let r = self.boundary_ratio();
        if r > tol {
            return Err(crate::Error::Domain(format!(
                "field is {r:.3e} of its maximum at the box edge (> {tol:.0e}); enlarge L"
            )));
        }
        Ok(())
    }

    /// Unnormalized forward DFT.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut v = self.values.clone();
        fft2(&mut v, self.n, false);
        v
    }

    /// Inverse of [`GridField::spectrum`].
    pub fn from_spectrum(n: usize, l: f64, mut spec: Vec<Complex64>) -> Result<Self> {
        if spec.len() != n * n {
            return Err(param("spectrum", "length must be N²"));
        }
        fft2(&mut spec, n, true);
        Self::new(n, l, spec)
    }

    /// Angular frequency of FFT index `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        frequency(k, self.n, self.l)
    }
}

pub(crate) fn frequency(k: usize, n: usize, l: f64) -> f64 {
    let s = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
    std::f64::consts::TAU * s / l
}

/// In-place 2-D FFT; the inverse includes the `1/N²` factor.
pub(crate) fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    fft.process(data);
    transpose(data, n);
    fft.process(data);
    transpose(data, n);
    if inverse {
        let s = 1.0 / (n * n) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in j + 1..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}
