use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{fft2, frequency, GridField};
use crate::error::{param, Result};

type Symbol = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A Fourier multiplier: `f ↦ F⁻¹(m · F f)`.
///
/// The value at `ξ = 0` is stored explicitly because every singular symbol
/// here is undefined there; they all use `m(0) = 0`, so the operators see
/// only the mean-zero part of their input.
///
/// On the Nyquist lines the FFT index `N/2` stands for both `±πN/L`. By
/// default the symbol is read at `-πN/L`, which keeps unimodular symbols
/// unimodular (so the Ahlfors–Beurling operator is exactly unitary on the
/// grid). Odd symbols such as derivatives average the two aliases instead,
/// which zeroes them there and keeps real fields real.
#[derive(Clone)]
pub struct SpectralMultiplier {
    name: String,
    symbol: Symbol,
    zero: Complex64,
    bound: f64,
    symmetrize: bool,
}

impl fmt::Debug for SpectralMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralMultiplier").field("name", &self.name).field("zero", &self.zero).field("bound", &self.bound).finish()
    }
}

impl SpectralMultiplier {
    pub fn new(
        name: impl Into<String>,
        bound: f64,
        zero: Complex64,
        symbol: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), symbol: Arc::new(symbol), zero, bound, symmetrize: false }
    }

    fn symmetrized(mut self) -> Self {
        self.symmetrize = true;
        self
    }

    pub fn identity() -> Self {
        Self::new("identity", 1.0, Complex64::new(1.0, 0.0), |_, _| Complex64::new(1.0, 0.0))
    }

    /// `(ξ₁ + iξ₂)² / |ξ|²`. On modes `e^{iξ·x}` this sends `∂u` to `∂̄u`.
    pub fn ahlfors_beurling() -> Self {
        Self::new("ab", 1.0, Complex64::default(), |a, b| {
            let z = Complex64::new(a, b);
            z * z / z.norm_sqr()
        })
    }

    /// `(ξ₁ - iξ₂)² / |ξ|²`, the inverse (and adjoint) of the above. Sends
    /// `∂̄u` to `∂u`.
    pub fn beurling() -> Self {
        Self::new("beurling", 1.0, Complex64::default(), |a, b| {
            let z = Complex64::new(a, -b);
            z * z / z.norm_sqr()
        })
    }

    /// `R_i²` with the nonnegative symbol `ξ_i²/|ξ|²`, so `R₁² + R₂² = I` on
    /// mean-zero fields.
    pub fn riesz_sq(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Self::new("r1^2", 1.0, Complex64::default(), |a, b| Complex64::new(a * a / (a * a + b * b), 0.0))),
            2 => Ok(Self::new("r2^2", 1.0, Complex64::default(), |a, b| Complex64::new(b * b / (a * a + b * b), 0.0))),
            _ => Err(param("i", "Riesz index must be 1 or 2")),
        }
    }

    /// `R₁R₂`, symbol `ξ₁ξ₂/|ξ|²`.
    pub fn riesz_mixed() -> Self {
        Self::new("r1r2", 0.5, Complex64::default(), |a, b| Complex64::new(a * b / (a * a + b * b), 0.0))
    }

    /// `R₁² - R₂²`, the real part of the Ahlfors–Beurling symbol.
    pub fn r11_minus_r22() -> Self {
        Self::new("r11-r22", 1.0, Complex64::default(), |a, b| Complex64::new((a * a - b * b) / (a * a + b * b), 0.0))
    }

    /// Heat extension to time `t` for the kernel `(πt)⁻¹ exp(-|x|²/t)`,
    /// symbol `exp(-t|ξ|²/4)`.
    pub fn heat(t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(param("t", format!("heat time must be ≥ 0, got {t}")));
        }
        Ok(Self::new(format!("heat({t})"), 1.0, Complex64::new(1.0, 0.0), move |a, b| {
            Complex64::new((-0.25 * t * (a * a + b * b)).exp(), 0.0)
        }))
    }

    /// `∂/∂x_j`, symbol `iξ_j`.
    pub fn partial(j: usize) -> Result<Self> {
        match j {
            1 => Ok(Self::new("d1", f64::INFINITY, Complex64::default(), |a, _| I * a).symmetrized()),
            2 => Ok(Self::new("d2", f64::INFINITY, Complex64::default(), |_, b| I * b).symmetrized()),
            _ => Err(param("j", "derivative index must be 1 or 2")),
        }
    }

    /// `∂ = (∂₁ - i∂₂)/2`.
    pub fn d_z() -> Self {
        Self::new("dz", f64::INFINITY, Complex64::default(), |a, b| 0.5 * I * Complex64::new(a, -b)).symmetrized()
    }

    /// `∂̄ = (∂₁ + i∂₂)/2`.
    pub fn d_zbar() -> Self {
        Self::new("dzbar", f64::INFINITY, Complex64::default(), |a, b| 0.5 * I * Complex64::new(a, b)).symmetrized()
    }

    pub fn negated(&self) -> Self {
        let s = self.symbol.clone();
        Self { name: format!("-{}", self.name), symbol: Arc::new(move |a, b| -s(a, b)), zero: -self.zero, ..self.clone() }
    }

    /// The multiplier with conjugated symbol, which is the `L²` adjoint.
    pub fn adjoint(&self) -> Self {
        let s = self.symbol.clone();
        Self { name: format!("{}*", self.name), symbol: Arc::new(move |a, b| s(a, b).conj()), zero: self.zero.conj(), ..self.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn eval(&self, xi1: f64, xi2: f64) -> Complex64 {
        if xi1 == 0.0 && xi2 == 0.0 {
            self.zero
        } else {
            (self.symbol)(xi1, xi2)
        }
    }

    /// Symbol values in FFT order.
    pub fn grid(&self, n: usize, l: f64) -> Vec<Complex64> {
        let ny = n / 2;
        let alias = |k: usize| {
            let w = frequency(k, n, l);
            if k == ny && self.symmetrize {
                vec![w, -w]
            } else {
                vec![w]
            }
        };
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            let b = alias(j);
            for i in 0..n {
                let a = alias(i);
                let mut s = Complex64::default();
                for &x in &a {
                    for &y in &b {
                        s += self.eval(x, y);
                    }
                }
                out.push(s / (a.len() * b.len()) as f64);
            }
        }
        out
    }

    /// Fails if the symbol exceeds its declared bound on the grid.
    pub fn check_bound(&self, n: usize, l: f64) -> Result<()> {
        let worst = self.grid(n, l).iter().map(|v| v.norm()).fold(0.0, f64::max);
        if worst > self.bound * (1.0 + 1e-12) {
            return Err(crate::Error::Domain(format!("|{}| reaches {worst} > declared bound {}", self.name, self.bound)));
        }
        Ok(())
    }

    pub fn apply(&self, f: &GridField) -> GridField {
        let m = self.grid(f.n(), f.l());
        let mut v = f.spectrum();
        v.iter_mut().zip(&m).for_each(|(a, b)| *a *= b);
        fft2(&mut v, f.n(), true);
        f.with_values(v)
    }
}

pub fn apply_multiplier(m: &SpectralMultiplier, f: &GridField) -> GridField {
    m.apply(f)
}

pub fn ab_transform(f: &GridField) -> GridField {
    SpectralMultiplier::ahlfors_beurling().apply(f)
}

pub fn beurling(f: &GridField) -> GridField {
    SpectralMultiplier::beurling().apply(f)
}

pub fn riesz_sq(i: usize, f: &GridField) -> Result<GridField> {
    Ok(SpectralMultiplier::riesz_sq(i)?.apply(f))
}

pub fn riesz_mixed(f: &GridField) -> GridField {
    SpectralMultiplier::riesz_mixed().apply(f)
}

pub fn heat_extension(f: &GridField, t: f64) -> Result<GridField> {
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(SpectralMultiplier::heat(t)?.apply(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngExt;

    fn random(n: usize, l: f64, seed: u64, real: bool) -> GridField {
        let mut r = crate::rng::stream(seed, 1);
        let v = (0..n * n)
            .map(|_| Complex64::new(r.random::<f64>() - 0.5, if real { 0.0 } else { r.random::<f64>() - 0.5 }))
            .collect();
        GridField::new(n, l, v).unwrap()
    }

    fn max_diff(a: &GridField, b: &GridField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_symbol() {
        let f = random(64, 2.0, 1, false);
        assert!(max_diff(&apply_multiplier(&SpectralMultiplier::identity(), &f), &f) <= 1e-13);
    }

    #[test]
    fn single_mode_eigenvalue() {
        let l = std::f64::consts::TAU;
        let f = GridField::from_fn(32, l, |x, y| (I * (x + 2.0 * y)).exp()).unwrap();
        let g = ab_transform(&f);
        let lam = Complex64::new(1.0, 2.0).powi(2) / 5.0;
        assert!(max_diff(&g, &f.map(|v| v * lam)) <= 1e-13);
    }

    #[test]
    fn isometry_and_decomposition() {
        let (f, _) = random(512, 5.0, 2, false).split_mean();
        let g = ab_transform(&f);
        assert!((g.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
        let r11 = riesz_sq(1, &f).unwrap();
        let r22 = riesz_sq(2, &f).unwrap();
        let r12 = riesz_mixed(&f);
        let parts = GridField::new(512, 5.0, (0..512 * 512).map(|k| r11.values()[k] - r22.values()[k] + 2.0 * I * r12.values()[k]).collect()).unwrap();
        assert!(max_diff(&g, &parts) <= 1e-12);
        let sum = GridField::new(512, 5.0, (0..512 * 512).map(|k| r11.values()[k] + r22.values()[k]).collect()).unwrap();
        assert!(max_diff(&sum, &f) <= 1e-12);
    }

    #[test]
    fn real_symbols_keep_real_fields_real() {
        let f = random(64, 3.0, 3, true);
        for g in [riesz_sq(1, &f).unwrap(), riesz_sq(2, &f).unwrap()] {
            assert!(g.is_real(1e-14));
        }
        // R₁R₂ is odd in each variable, so only fields without Nyquist
        // content stay exactly real
        let smooth = heat_extension(&f, 0.5).unwrap().map(|v| Complex64::new(v.re, 0.0));
        assert!(riesz_mixed(&smooth).is_real(1e-14));
        let d = SpectralMultiplier::partial(1).unwrap().apply(&f);
        assert!(d.is_real(1e-12));
    }

    #[test]
    fn beurling_inverts_ab() {
        let (f, _) = random(64, 3.0, 4, false).split_mean();
        assert!(max_diff(&beurling(&ab_transform(&f)), &f) <= 1e-13);
    }

    /// `u = exp(-|x|²/(2s²))` with closed-form `∂u = -z̄ u/(2s²)` and
    /// `∂̄u = -z u/(2s²)`.
    #[test]
    fn complex_derivatives_of_a_bump() {
        let (n, l, s2) = (512, 16.0, 0.6f64);
        let u = |x: f64, y: f64| (-(x * x + y * y) / (2.0 * s2)).exp();
        let du = GridField::from_fn(n, l, |x, y| -Complex64::new(x, -y) * u(x, y) / (2.0 * s2)).unwrap();
        let dbu = GridField::from_fn(n, l, |x, y| -Complex64::new(x, y) * u(x, y) / (2.0 * s2)).unwrap();
        let rel = |a: &GridField, b: &GridField| max_diff(a, b) / b.max_abs();
        assert!(rel(&beurling(&dbu), &du) <= 1e-6);
        assert!(rel(&ab_transform(&du), &dbu) <= 1e-6);
        // the other pairing is far off
        assert!(rel(&ab_transform(&dbu), &du) > 0.1);
    }

    #[test]
    fn heat_of_gaussian() {
        let (n, l, s2, t) = (256, 24.0, 0.5f64, 1.3f64);
        let f = GridField::from_real_fn(n, l, |x, y| (-(x * x + y * y) / (2.0 * s2)).exp()).unwrap();
        let v = s2 + t / 2.0;
        let want = GridField::from_real_fn(n, l, |x, y| s2 / v * (-(x * x + y * y) / (2.0 * v)).exp()).unwrap();
        assert!(max_diff(&heat_extension(&f, t).unwrap(), &want) <= 1e-8);
        assert_eq!(heat_extension(&f, 0.0).unwrap(), f);
        assert!(heat_extension(&f, -1.0).is_err());
        let c = GridField::from_real_fn(16, 1.0, |_, _| 2.5).unwrap();
        assert!(max_diff(&heat_extension(&c, 7.0).unwrap(), &c) <= 1e-14);
    }

    #[test]
    fn bounds_hold_on_grid() {
        for m in [SpectralMultiplier::ahlfors_beurling(), SpectralMultiplier::riesz_mixed(), SpectralMultiplier::r11_minus_r22()] {
            m.check_bound(64, 1.0).unwrap();
        }
        let liar = SpectralMultiplier::new("liar", 0.5, Complex64::default(), |_, _| Complex64::new(1.0, 0.0));
        assert!(liar.check_bound(8, 1.0).is_err());
    }
}
