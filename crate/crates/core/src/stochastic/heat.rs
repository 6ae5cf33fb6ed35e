//! Heat extensions under `∂_t - ½Δ`: `u^f(t, x) = E f(x + W_t)`.
//!
//! Gaussian mixtures have closed-form extensions; arbitrary functions go
//! through a tensor Gauss–Hermite rule.

use num_complex::Complex64;
use rand::RngExt;
use rand_distr::StandardNormal;

use crate::error::{param, Result};
use crate::quad::normal_rule;
use crate::rng;

/// `u^f(t, x)` and its spatial gradient.
pub trait HeatSurface: Send + Sync {
    fn value(&self, t: f64, x: [f64; 2]) -> Complex64;
    fn gradient(&self, t: f64, x: [f64; 2]) -> [Complex64; 2];

    fn initial(&self, x: [f64; 2]) -> Complex64 {
        self.value(0.0, x)
    }
}

/// `f(x) = c + a₁x₁ + a₂x₂`, its own extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub c: Complex64,
    pub a: [Complex64; 2],
}

impl Affine {
    /// `f(z) = z`, for which `∂̄f = 0`.
    pub fn holomorphic() -> Self {
        Self { c: Complex64::new(0.0, 0.0), a: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] }
    }
}

impl HeatSurface for Affine {
    fn value(&self, _t: f64, x: [f64; 2]) -> Complex64 {
        self.c + self.a[0] * x[0] + self.a[1] * x[1]
    }

    fn gradient(&self, _t: f64, _x: [f64; 2]) -> [Complex64; 2] {
        self.a
    }
}

/// `amp · exp(-|x - center|²/(2 s2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amp: Complex64,
    pub center: [f64; 2],
    pub s2: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GaussianMixture {
    bumps: Vec<Bump>,
}

impl GaussianMixture {
    pub fn new(bumps: Vec<Bump>) -> Result<Self> {
        if bumps.iter().any(|b| !(b.s2 > 0.0) || !b.amp.is_finite()) {
            return Err(param("bumps", "need finite amplitudes and s2 > 0"));
        }
        Ok(Self { bumps })
    }

    /// Centred real bump `exp(-|x|²/(2 s2))`.
    pub fn bump(s2: f64) -> Result<Self> {
        Self::new(vec![Bump { amp: Complex64::new(1.0, 0.0), center: [0.0; 2], s2 }])
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// One to four bumps with complex normal amplitudes, centres in
    /// `[-1, 1]²` and `s2 ∈ [0.25, 1]`.
    pub fn random(seed: u64, key: u64) -> Self {
        let mut r = rng::stream(seed, key);
        let m = 1 + (r.random::<u32>() % 4) as usize;
        let bumps = (0..m)
            .map(|_| Bump {
                amp: Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)),
                center: [2.0 * r.random::<f64>() - 1.0, 2.0 * r.random::<f64>() - 1.0],
                s2: 0.25 + 0.75 * r.random::<f64>(),
            })
            .collect();
        Self { bumps }
    }

    pub fn bumps(&self) -> &[Bump] {
        &self.bumps
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { bumps: self.bumps.iter().chain(&other.bumps).copied().collect() }
    }

    /// Exact Ahlfors–Beurling transform, symbol `(ξ₁ + iξ₂)²/|ξ|²`. For a
    /// radial `g` about `c` it is `(w/w̄)(g(w) - mean of g over the disc of
    /// radius |w|)`, `w = z - c`.
    pub fn ab_exact(&self, x: [f64; 2]) -> Complex64 {
        self.bumps
            .iter()
            .map(|b| {
                let w = Complex64::new(x[0] - b.center[0], x[1] - b.center[1]);
                let q = w.norm_sqr() / (2.0 * b.s2);
                if q == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                // e^{-q} - (1 - e^{-q})/q, via expm1 to keep small q accurate
                let e = (-q).exp();
                let radial = e + (-q).exp_m1() / q;
                b.amp * radial * (w / w.conj())
            })
            .sum()
    }
}

impl HeatSurface for GaussianMixture {
    fn value(&self, t: f64, x: [f64; 2]) -> Complex64 {
        self.bumps
            .iter()
            .map(|b| {
                let v = b.s2 + t;
                let r2 = (x[0] - b.center[0]).powi(2) + (x[1] - b.center[1]).powi(2);
                b.amp * (b.s2 / v * (-r2 / (2.0 * v)).exp())
            })
            .sum()
    }

    fn gradient(&self, t: f64, x: [f64; 2]) -> [Complex64; 2] {
        let mut g = [Complex64::new(0.0, 0.0); 2];
        for b in &self.bumps {
            let v = b.s2 + t;
            let (d0, d1) = (x[0] - b.center[0], x[1] - b.center[1]);
            let u = b.amp * (b.s2 / v * (-(d0 * d0 + d1 * d1) / (2.0 * v)).exp());
            g[0] -= u * (d0 / v);
            g[1] -= u * (d1 / v);
        }
        g
    }
}

/// `u(t, x) = Σ wᵢ wⱼ f(x + √t (zᵢ, zⱼ))` and
/// `∇u(t, x) = t^{-1/2} Σ wᵢ wⱼ f(x + √t (zᵢ, zⱼ)) (zᵢ, zⱼ)`
/// (Gaussian integration by parts). At `t = 0` the gradient falls back to a
/// central difference of `f`. The rule is exact to roughly `1e-10` while
/// `√t` stays within a couple of widths of the features of `f`; wider
/// smoothing needs more nodes or a closed form.
pub struct HermiteSurface<F> {
    f: F,
    rule: Vec<(f64, f64)>,
}

impl<F: Fn([f64; 2]) -> Complex64 + Send + Sync> HermiteSurface<F> {
    pub fn new(f: F, nodes: usize) -> Result<Self> {
        if nodes == 0 {
            return Err(param("nodes", "need at least one node"));
        }
        Ok(Self { f, rule: normal_rule(nodes) })
    }

    pub fn with_default_rule(f: F) -> Self {
        Self { f, rule: normal_rule(32) }
    }
}

impl<F: Fn([f64; 2]) -> Complex64 + Send + Sync> HeatSurface for HermiteSurface<F> {
    fn value(&self, t: f64, x: [f64; 2]) -> Complex64 {
        if t == 0.0 {
            return (self.f)(x);
        }
        let s = t.sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(zi, wi) in &self.rule {
            for &(zj, wj) in &self.rule {
                acc += (self.f)([x[0] + s * zi, x[1] + s * zj]) * (wi * wj);
            }
        }
        acc
    }

    fn gradient(&self, t: f64, x: [f64; 2]) -> [Complex64; 2] {
        if t == 0.0 {
            let h = 1e-6;
            let d = |e: [f64; 2]| ((self.f)([x[0] + h * e[0], x[1] + h * e[1]]) - (self.f)([x[0] - h * e[0], x[1] - h * e[1]])) / (2.0 * h);
            return [d([1.0, 0.0]), d([0.0, 1.0])];
        }
        let s = t.sqrt();
        let mut g = [Complex64::new(0.0, 0.0); 2];
        for &(zi, wi) in &self.rule {
            for &(zj, wj) in &self.rule {
                let v = (self.f)([x[0] + s * zi, x[1] + s * zj]) * (wi * wj);
                g[0] += v * zi;
                g[1] += v * zj;
            }
        }
        [g[0] / s, g[1] / s]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::{ab_transform, GridField};

    fn sample_mixture() -> GaussianMixture {
        GaussianMixture::new(vec![
            Bump { amp: Complex64::new(1.0, -0.5), center: [0.3, -0.2], s2: 0.5 },
            Bump { amp: Complex64::new(-0.7, 0.2), center: [-0.4, 0.6], s2: 0.8 },
        ])
        .unwrap()
    }

    #[test]
    fn initial_values_and_heat_equation() {
        let m = sample_mixture();
        let x = [0.2, 0.1];
        let f0 = m.bumps().iter().map(|b| b.amp * (-((x[0] - b.center[0]).powi(2) + (x[1] - b.center[1]).powi(2)) / (2.0 * b.s2)).exp()).sum::<Complex64>();
        assert!((m.initial(x) - f0).norm() < 1e-15);
        // u_t = ½Δu by central differences
        let (t, h) = (0.7, 1e-3);
        let ut = (m.value(t + h, x) - m.value(t - h, x)) / (2.0 * h);
        let lap = (m.value(t, [x[0] + h, x[1]]) + m.value(t, [x[0] - h, x[1]]) + m.value(t, [x[0], x[1] + h]) + m.value(t, [x[0], x[1] - h]) - 4.0 * m.value(t, x)) / (h * h);
        assert!((ut - 0.5 * lap).norm() < 1e-5, "{ut} vs {}", 0.5 * lap);
        let g = m.gradient(t, x);
        let g0 = (m.value(t, [x[0] + h, x[1]]) - m.value(t, [x[0] - h, x[1]])) / (2.0 * h);
        assert!((g[0] - g0).norm() < 1e-6);
    }

    #[test]
    fn hermite_matches_closed_form() {
        // accuracy falls once √t is several times the bump width
        let m = sample_mixture();
        let q = HermiteSurface::with_default_rule(|x| m.initial(x));
        for (t, x) in [(0.3, [0.0, 0.0]), (1.0, [0.5, -0.7]), (2.5, [-1.0, 1.5])] {
            let (a, b) = (q.gradient(t, x), m.gradient(t, x));
            let tol = if t < 1.5 { 1e-9 } else { 1e-5 };
            assert!((q.value(t, x) - m.value(t, x)).norm() < tol, "t={t}");
            assert!((a[0] - b[0]).norm() + (a[1] - b[1]).norm() < tol, "t={t}");
        }
    }

    #[test]
    fn semigroup() {
        let m = sample_mixture();
        let s = 0.4;
        let q = HermiteSurface::with_default_rule(|x| m.value(s, x));
        for (t, tol) in [(0.1, 1e-12), (0.6, 1e-10), (2.0, 1e-8)] {
            let x = [0.25, -0.3];
            assert!((q.value(t, x) - m.value(s + t, x)).norm() < tol, "t={t}");
        }
    }

    #[test]
    fn affine_extension_is_static() {
        let f = Affine { c: Complex64::new(1.0, 2.0), a: [Complex64::new(0.5, 0.0), Complex64::new(0.0, -1.0)] };
        let q = HermiteSurface::new(|x| f.initial(x), 8).unwrap();
        assert!((q.value(3.0, [1.0, 1.0]) - f.value(3.0, [1.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn ab_closed_form_matches_fft() {
        let m = sample_mixture();
        let (n, l) = (256, 32.0);
        let f = GridField::from_fn(n, l, |x, y| m.initial([x, y])).unwrap();
        let t = ab_transform(&f);
        let mut err: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let (x, y) = (f.coord(i), f.coord(j));
                if x.abs() < 4.0 && y.abs() < 4.0 {
                    err = err.max((t.get(i, j) - m.ab_exact([x, y])).norm());
                }
            }
        }
        // the periodic images contribute O(s²/L²)
        assert!(err < 2e-3, "{err}");
    }

    #[test]
    fn random_mixtures_are_keyed() {
        assert_eq!(GaussianMixture::random(3, 7), GaussianMixture::random(3, 7));
        assert_ne!(GaussianMixture::random(3, 7), GaussianMixture::random(3, 8));
        assert!(GaussianMixture::bump(0.0).is_err());
    }
}
