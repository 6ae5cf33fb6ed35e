//! Radial model maps `z|z|^{1/K - 1}` and `|z|^{1 - 1/K}/z`.
//!
//! Both have Beltrami coefficient of modulus `k = (K-1)/(K+1)` in the unit
//! disc. The first is the extremal example for area distortion; the second
//! solves a Beltrami equation but only lies in `W^{1,q}` for `q < 1 + k`.

use num_complex::Complex64;
use rand::RngExt;

use crate::error::{param, Result};
use crate::planar::{ap_class, DiscSampling, GridField, PlanarWeight};
use crate::quad::Legendre;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `z|z|^{1/K - 1}` in the disc, `z` outside.
    Regular,
    /// `|z|^{1 - 1/K}/z` in the disc, `1/z` outside.
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMap {
    big_k: f64,
    variant: Variant,
}

impl RadialMap {
    pub fn new(big_k: f64, variant: Variant) -> Result<Self> {
        if !(big_k >= 1.0 && big_k.is_finite()) {
            return Err(param("K", "need 1 ≤ K < ∞"));
        }
        Ok(Self { big_k, variant })
    }

    pub fn regular(big_k: f64) -> Result<Self> {
        Self::new(big_k, Variant::Regular)
    }

    pub fn singular(big_k: f64) -> Result<Self> {
        Self::new(big_k, Variant::Singular)
    }

    pub fn big_k(&self) -> f64 {
        self.big_k
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `(K-1)/(K+1)`.
    pub fn k(&self) -> f64 {
        (self.big_k - 1.0) / (self.big_k + 1.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        match (self.variant, r <= 1.0) {
            (_, _) if r == 0.0 && self.variant == Variant::Regular => z,
            (Variant::Regular, true) => z * r.powf(1.0 / self.big_k - 1.0),
            (Variant::Regular, false) => z,
            (Variant::Singular, true) => r.powf(1.0 - 1.0 / self.big_k) / z,
            (Variant::Singular, false) => 1.0 / z,
        }
    }

    /// `(f_z, f_z̄)` in closed form, for `z ≠ 0` off the unit circle.
    pub fn derivatives(&self, z: Complex64) -> (Complex64, Complex64) {
        let r = z.norm();
        let phase = z / z.conj();
        match (self.variant, r < 1.0) {
            (Variant::Regular, true) => {
                // z^{1+β/2} z̄^{β/2}, β = 1/K - 1
                let b = 1.0 / self.big_k - 1.0;
                let m = r.powf(b);
                (Complex64::new((1.0 + 0.5 * b) * m, 0.0), phase * (0.5 * b * m))
            }
            (Variant::Regular, false) => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (Variant::Singular, true) => {
                // z^{γ/2 - 1} z̄^{γ/2}, γ = 1 - 1/K
                let g = 1.0 - 1.0 / self.big_k;
                let m = r.powf(g - 2.0);
                ((0.5 * g - 1.0) * m / phase, Complex64::new(0.5 * g * m, 0.0))
            }
            (Variant::Singular, false) => (-1.0 / (z * z), Complex64::new(0.0, 0.0)),
        }
    }

    /// `|f_z|² - |f_z̄|²`.
    pub fn jacobian(&self, z: Complex64) -> f64 {
        let (a, b) = self.derivatives(z);
        a.norm_sqr() - b.norm_sqr()
    }

    /// `|f_z̄/f_z|` from fourth-order central difference quotients.
    pub fn beltrami_sampled(&self, z: Complex64) -> f64 {
        let h = 1e-3 * z.norm();
        let d = |e: Complex64| {
            let f = |t: f64| self.eval(z + e * t);
            (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
        };
        let (fx, fy) = (d(Complex64::new(1.0, 0.0)), d(Complex64::new(0.0, 1.0)));
        let i = Complex64::new(0.0, 1.0);
        ((fx + i * fy) / (fx - i * fy)).norm()
    }
}

/// `max |(|f_z̄/f_z|) - k|` over `samples` random points with
/// `0.05 ≤ |z| ≤ 0.95`, using difference quotients.
pub fn beltrami_residual(map: &RadialMap, samples: usize, seed: u64) -> f64 {
    let mut r = rng::stream(seed, 0);
    (0..samples)
        .map(|_| {
            let z = Complex64::from_polar(0.05 + 0.9 * r.random::<f64>(), std::f64::consts::TAU * r.random::<f64>());
            (map.beltrami_sampled(z) - map.k()).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub radii: Vec<f64>,
    /// `|f(B_r)|`.
    pub image_areas: Vec<f64>,
    /// `|f(B_r)|/|B_r|^{1/K}`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log |f(B_r)|` against `log |B_r|`.
    pub slope: f64,
    /// Largest deviation of the points from the fitted line.
    pub residual: f64,
}

fn check_regular(map: &RadialMap) -> Result<()> {
    if map.variant != Variant::Regular {
        return Err(param("map", "needs the regular variant"));
    }
    Ok(())
}

/// Area distortion of discs centred at 0. The image of `B_r` is the disc
/// of radius `|f(r)|`.
pub fn distortion_exponent(map: &RadialMap, radii: &[f64]) -> Result<DistortionReport> {
    check_regular(map)?;
    if radii.len() < 2 || radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(param("radii", "need at least two radii in (0, 1)"));
    }
    let pi = std::f64::consts::PI;
    let areas: Vec<f64> = radii.iter().map(|&r| pi * r * r).collect();
    let image_areas: Vec<f64> = radii.iter().map(|&r| pi * map.eval(Complex64::new(r, 0.0)).norm_sqr()).collect();
    let ratios = areas.iter().zip(&image_areas).map(|(a, b)| b / a.powf(1.0 / map.big_k)).collect();
    let (slope, intercept) = fit_line(&areas.iter().map(|a| a.ln()).collect::<Vec<_>>(), &image_areas.iter().map(|a| a.ln()).collect::<Vec<_>>());
    let residual = areas.iter().zip(&image_areas).map(|(a, b)| (b.ln() - intercept - slope * a.ln()).abs()).fold(0.0, f64::max);
    Ok(DistortionReport { radii: radii.to_vec(), image_areas, ratios, slope, residual })
}

/// `|f(B_r)| = ∫_{B_r} J_f`, integrated in `log ρ`.
pub fn image_area_by_quadrature(map: &RadialMap, r: f64) -> Result<f64> {
    check_regular(map)?;
    let lo = r.ln() - 60.0;
    let tau = std::f64::consts::TAU;
    Ok(Legendre::standard().composite(lo, r.ln(), 120, |s| {
        let rho = s.exp();
        tau * rho * rho * map.jacobian(Complex64::new(rho, 0.0))
    }))
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let slope = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converges,
    Diverges,
    /// Within the tolerance of the threshold; reported, not asserted.
    Borderline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub q: f64,
    /// `1 + k`.
    pub threshold: f64,
    /// `ε = 2^{-1}, 2^{-2}, …` down to `eps_min`.
    pub eps: Vec<f64>,
    pub integrals: Vec<f64>,
    /// Fitted `e` in `I(ε/2) - I(ε) ∝ ε^e`; the integral stays bounded iff
    /// `e > 0`.
    pub rate: f64,
    /// `2 - q(1 + 1/K) = -(q - (1+k))(1 + 1/K)`.
    pub rate_exact: f64,
    pub verdict: Verdict,
}

/// `∫_{ε<|z|<1} (|f_z| + |f_z̄|)^q dm₂` by Gauss–Legendre in `log r`.
pub fn sobolev_integral(map: &RadialMap, q: f64, eps: f64) -> Result<f64> {
    if map.variant != Variant::Singular {
        return Err(param("map", "needs the singular variant"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(param("eps", "need 0 < ε < 1"));
    }
    let tau = std::f64::consts::TAU;
    let lo = eps.ln();
    let panels = (-lo).ceil() as usize;
    Ok(Legendre::standard().composite(lo, 0.0, panels.max(1), |s| {
        let r = s.exp();
        let (a, b) = map.derivatives(Complex64::new(r, 0.0));
        tau * r * r * (a.norm() + b.norm()).powf(q)
    }))
}

/// `2π (1 - ε^e)/e` with `e = 2 - q(1 + 1/K)`; `2π log(1/ε)` at `e = 0`.
pub fn sobolev_integral_exact(big_k: f64, q: f64, eps: f64) -> f64 {
    let e = 2.0 - q * (1.0 + 1.0 / big_k);
    let tau = std::f64::consts::TAU;
    if e.abs() < 1e-14 {
        -tau * eps.ln()
    } else {
        -tau * (e * eps.ln()).exp_m1() / e
    }
}

/// Integrals over `ε = 2^{-j}` down to `eps_min`; the verdict comes from
/// the fitted decay rate of successive annulus contributions.
pub fn sobolev_threshold(map: &RadialMap, q: f64, eps_min: f64) -> Result<SobolevReport> {
    if !(q > 0.0) {
        return Err(param("q", "need q > 0"));
    }
    if !(eps_min > 0.0 && eps_min <= 0.125) {
        return Err(param("eps_min", "need 0 < eps_min ≤ 1/8 for at least three levels"));
    }
    let levels = (-eps_min.log2()).floor() as i32;
    let eps: Vec<f64> = (1..=levels).map(|j| 2f64.powi(-j)).collect();
    let integrals = eps.iter().map(|&e| sobolev_integral(map, q, e)).collect::<Result<Vec<_>>>()?;
    let d: Vec<f64> = integrals.windows(2).map(|w| (w[1] - w[0]).ln()).collect();
    let (rate, _) = fit_line(&eps[..eps.len() - 1].iter().map(|e| e.ln()).collect::<Vec<_>>(), &d);
    let verdict = if rate > 1e-6 {
        Verdict::Converges
    } else if rate < -1e-6 {
        Verdict::Diverges
    } else {
        Verdict::Borderline
    };
    Ok(SobolevReport { q, threshold: 1.0 + map.k(), eps, integrals, rate, rate_exact: 2.0 - q * (1.0 + 1.0 / map.big_k), verdict })
}

/// Bisection in `q` between a convergent `lo` and a non-convergent `hi`.
pub fn locate_sobolev_threshold(map: &RadialMap, mut lo: f64, mut hi: f64, tol: f64, eps_min: f64) -> Result<f64> {
    let converges = |q: f64| sobolev_threshold(map, q, eps_min).map(|r| r.verdict == Verdict::Converges);
    if !converges(lo)? || converges(hi)? {
        return Err(param("bracket", format!("[{lo}, {hi}] does not bracket the threshold")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if converges(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `w = J_{f₀}^{1 - p/2}` on the `n × n` grid of side `l`, with `|z|`
/// floored at half a cell so the weight stays positive.
pub fn jacobian_weight(map: &RadialMap, p: f64, n: usize, l: f64) -> Result<PlanarWeight> {
    check_regular(map)?;
    let top = 1.0 + 1.0 / map.k();
    if !(p >= 2.0 && p < top) {
        return Err(param("p", format!("need 2 ≤ p < 1 + 1/k = {top}")));
    }
    let floor = 0.5 * l / n as f64;
    let e = 1.0 - 0.5 * p;
    let field = GridField::from_real_fn(n, l, |x, y| {
        // the Jacobian is radial
        map.jacobian(Complex64::new(x.hypot(y).max(floor), 0.0)).powf(e)
    })?;
    PlanarWeight::new(field)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightGrowth {
    pub ps: Vec<f64>,
    pub classes: Vec<f64>,
    /// `1/(1 + 1/k - p)`, the blow-up shape allowed by the general bound.
    pub shape: Vec<f64>,
    /// Slope of `log [w]` against `log (1/(1 + 1/k - p))`.
    pub fitted_exponent: f64,
    pub monotone: bool,
}

/// `[w]_{A₂}` over discs for each `p`.
pub fn weight_growth(map: &RadialMap, ps: &[f64], n: usize, l: f64) -> Result<WeightGrowth> {
    let discs = DiscSampling::dyadic(n, l);
    let classes = ps
        .iter()
        .map(|&p| ap_class(&jacobian_weight(map, p, n, l)?, 2.0, &discs).map(|a| a.value))
        .collect::<Result<Vec<_>>>()?;
    let top = 1.0 + 1.0 / map.k();
    let shape: Vec<f64> = ps.iter().map(|p| 1.0 / (top - p)).collect();
    let (fitted_exponent, _) = fit_line(&shape.iter().map(|s| s.ln()).collect::<Vec<_>>(), &classes.iter().map(|c| c.ln()).collect::<Vec<_>>());
    let monotone = classes.windows(2).all(|w| w[1] >= w[0]);
    Ok(WeightGrowth { ps: ps.to_vec(), classes, shape, fitted_exponent, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beltrami_modulus_is_k() {
        for big_k in [1.0, 1.5, 2.0, 3.0, 7.0] {
            for map in [RadialMap::regular(big_k).unwrap(), RadialMap::singular(big_k).unwrap()] {
                for z in [Complex64::new(0.3, 0.4), Complex64::new(-0.05, 0.02), Complex64::new(0.0, -0.9)] {
                    let (a, b) = map.derivatives(z);
                    assert!((b.norm() / a.norm() - map.k()).abs() < 1e-14);
                }
                assert!(beltrami_residual(&map, 500, 1) < 1e-8, "K={big_k} {:?}", map.variant());
            }
        }
    }

    #[test]
    fn closed_form_derivatives_match_difference_quotients() {
        let map = RadialMap::singular(2.0).unwrap();
        let z = Complex64::new(0.3, -0.2);
        let h = 1e-6;
        let fx = (map.eval(z + h) - map.eval(z - h)) / (2.0 * h);
        let fy = (map.eval(z + Complex64::new(0.0, h)) - map.eval(z - Complex64::new(0.0, h))) / (2.0 * h);
        let i = Complex64::new(0.0, 1.0);
        let (a, b) = map.derivatives(z);
        assert!((0.5 * (fx - i * fy) - a).norm() < 1e-7);
        assert!((0.5 * (fx + i * fy) - b).norm() < 1e-7);
    }

    #[test]
    fn distortion_slope_is_one_over_k() {
        let radii: Vec<f64> = (1..=10).map(|j| 2f64.powi(-j)).collect();
        for big_k in [1.0, 3.0, 5.5] {
            let r = distortion_exponent(&RadialMap::regular(big_k).unwrap(), &radii).unwrap();
            assert!((r.slope - 1.0 / big_k).abs() < 1e-10, "{r:?}");
            assert!(r.residual < 1e-10);
            let c = std::f64::consts::PI.powf(1.0 - 1.0 / big_k);
            assert!(r.ratios.iter().all(|x| (x - c).abs() < 1e-12));
        }
        assert!(distortion_exponent(&RadialMap::singular(2.0).unwrap(), &radii).is_err());
        assert!(distortion_exponent(&RadialMap::regular(2.0).unwrap(), &[0.5, 1.5]).is_err());
    }

    #[test]
    fn image_area_from_the_jacobian() {
        let map = RadialMap::regular(3.0).unwrap();
        for r in [0.9f64, 0.1, 1e-3] {
            let exact = std::f64::consts::PI * r.powf(2.0 / 3.0);
            assert!((image_area_by_quadrature(&map, r).unwrap() / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn annulus_integral_matches_antiderivative() {
        let map = RadialMap::singular(2.0).unwrap();
        for q in [1.2, 4.0 / 3.0, 1.4] {
            for eps in [0.5, 1e-3, 1e-6] {
                let (a, b) = (sobolev_integral(&map, q, eps).unwrap(), sobolev_integral_exact(2.0, q, eps));
                assert!((a / b - 1.0).abs() < 1e-12, "q={q} eps={eps}: {a} {b}");
            }
        }
    }

    #[test]
    fn convergence_below_the_threshold_only() {
        let map = RadialMap::singular(2.0).unwrap();
        let below = sobolev_threshold(&map, 1.2, 1e-6).unwrap();
        assert_eq!(below.verdict, Verdict::Converges);
        // Cauchy: successive annulus contributions shrink by 2^{-e}
        let d: Vec<f64> = below.integrals.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(d.windows(2).all(|w| (w[1] / w[0] - 2f64.powf(-below.rate_exact)).abs() < 1e-9));
        let above = sobolev_threshold(&map, 1.4, 1e-6).unwrap();
        assert_eq!(above.verdict, Verdict::Diverges);
        assert!((above.rate - above.rate_exact).abs() < 1e-9, "{above:?}");
        assert!((below.rate - below.rate_exact).abs() < 1e-9);
        assert_eq!(sobolev_threshold(&map, 4.0 / 3.0, 1e-6).unwrap().verdict, Verdict::Borderline);
    }

    #[test]
    fn bisection_finds_one_plus_k() {
        for big_k in [1.5, 2.0, 3.0] {
            let map = RadialMap::singular(big_k).unwrap();
            let q = locate_sobolev_threshold(&map, 1.0, 2.0, 1e-4, 1e-6).unwrap();
            assert!((q - (1.0 + map.k())).abs() < 1e-3, "K={big_k}: {q}");
        }
    }

    #[test]
    fn weight_at_p_two_is_one() {
        let map = RadialMap::regular(2.0).unwrap();
        let w = jacobian_weight(&map, 2.0, 64, 4.0).unwrap();
        assert!(w.field().values().iter().all(|v| v.re == 1.0));
        assert_eq!(ap_class(&w, 2.0, &DiscSampling::dyadic(64, 4.0)).unwrap().value, 1.0);
        assert!(jacobian_weight(&map, 4.0, 64, 4.0).is_err());
        assert!(jacobian_weight(&map, 1.9, 64, 4.0).is_err());
    }

    #[test]
    fn weight_class_grows_with_p() {
        let map = RadialMap::regular(2.0).unwrap();
        let g = weight_growth(&map, &[2.0, 2.5, 3.0, 3.5, 3.9], 128, 4.0).unwrap();
        assert!(g.monotone, "{g:?}");
        assert!(g.classes[0] == 1.0 && g.classes[4] > 1.0);
    }

    #[test]
    fn product_of_averages_is_at_least_one() {
        let map = RadialMap::regular(3.0).unwrap();
        let w = jacobian_weight(&map, 2.8, 64, 4.0).unwrap();
        let f = w.field();
        let mut r = rng::stream(4, 0);
        for _ in 0..50 {
            let (cx, cy, rad) = (4.0 * r.random::<f64>() - 2.0, 4.0 * r.random::<f64>() - 2.0, 0.1 + r.random::<f64>());
            let (mut a, mut b, mut n) = (0.0, 0.0, 0.0);
            for j in 0..64 {
                for i in 0..64 {
                    if (f.coord(i) - cx).hypot(f.coord(j) - cy) <= rad {
                        a += f.get(i, j).re;
                        b += 1.0 / f.get(i, j).re;
                        n += 1.0;
                    }
                }
            }
            if n > 0.0 {
                assert!((a / n) * (b / n) >= 1.0 - 1e-12);
            }
        }
    }
}
