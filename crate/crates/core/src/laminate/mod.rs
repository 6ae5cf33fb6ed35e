//! Laminates on diagonal matrices `diag(X, Y)`: finitely many atoms plus
//! power-law densities on rays `t ↦ t·d`, `t ≥ 1`.
//!
//! With `p_η = p + η`, `K = p_η/(p_η - 2)` the measure
//! `ν_{K,η} + ν_{1/K,η}` has mass 1 and baricenter `(1,1)`, and
//! `μ_{K,η} = ¼(ν_{K,η} + ν_{1/K,η}) + ¼δ_{(-1,1)} + ½δ_{(0,1)}` drives the
//! ratio `∫|X+Y|^p dμ / ∫|X-Y|^p dμ → (p-1)^p`.

use crate::error::{param, Error, Result};
use crate::quad::Legendre;

mod battery;

pub use battery::{laminate_inequality_check, InequalityReport, TestFunction2D, TestKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub x: f64,
    pub y: f64,
    pub mass: f64,
}

/// Density `weight · t^{-(exponent+1)} dt` carried to the point `t·dir`,
/// `t ∈ [1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub dir: [f64; 2],
    pub weight: f64,
    pub exponent: f64,
}

impl Ray {
    pub fn at(&self, t: f64) -> (f64, f64) {
        (t * self.dir[0], t * self.dir[1])
    }

    pub fn mass(&self) -> f64 {
        self.weight / self.exponent
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Laminate {
    pub atoms: Vec<Atom>,
    pub rays: Vec<Ray>,
}

/// `(p, η, K)`; `K` is tied to `p_η` unless built with [`Params::free`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub p: f64,
    pub eta: f64,
    pub k: f64,
}

impl Params {
    /// `K = p_η/(p_η - 2)`.
    pub fn tied(p: f64, eta: f64) -> Result<Self> {
        let r = s0_k_p_relations(p, eta)?;
        Self::free(p, eta, r.k)
    }

    pub fn free(p: f64, eta: f64, k: f64) -> Result<Self> {
        if !(k > 1.0 && k.is_finite()) {
            return Err(param("K", "need K > 1"));
        }
        if !(eta > 0.0) {
            return Err(param("eta", "need η > 0"));
        }
        if !(p >= 1.0) {
            return Err(param("p", "need p ≥ 1"));
        }
        Ok(Self { p, eta, k })
    }

    pub fn p_eta(&self) -> f64 {
        self.p + self.eta
    }

    /// `(K+1)/(K-1)`.
    pub fn target(&self) -> f64 {
        (self.k + 1.0) / (self.k - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relations {
    pub s0: f64,
    pub k: f64,
    pub p_eta: f64,
    /// `|(p_η - 1) - (K+1)/(K-1)|`.
    pub residual: f64,
}

/// `s₀ = 1 - 2/p_η`, `K = 1/s₀`.
pub fn s0_k_p_relations(p: f64, eta: f64) -> Result<Relations> {
    let p_eta = p + eta;
    if !(p_eta > 2.0 && p_eta.is_finite()) {
        return Err(param("p", format!("need p + η > 2, got {p_eta}")));
    }
    let s0 = 1.0 - 2.0 / p_eta;
    let k = 1.0 / s0;
    let residual = ((p_eta - 1.0) - (k + 1.0) / (k - 1.0)).abs();
    Ok(Relations { s0, k, p_eta, residual })
}

impl Laminate {
    pub fn atom(x: f64, y: f64, mass: f64) -> Self {
        Self { atoms: vec![Atom { x, y, mass }], rays: vec![] }
    }

    /// `ν_{K,η}`: `(K/(K-1)) ∫₁^∞ φ(t/K, t) t^{-(p+η+1)} dt`, on `Y = KX`.
    pub fn nu_steep(q: &Params) -> Self {
        let w = q.k / (q.k - 1.0);
        Self { atoms: vec![], rays: vec![Ray { dir: [1.0 / q.k, 1.0], weight: w, exponent: q.p_eta() }] }
    }

    /// `ν_{1/K,η}`: the same density on `Y = X/K`.
    pub fn nu_shallow(q: &Params) -> Self {
        let w = q.k / (q.k - 1.0);
        Self { atoms: vec![], rays: vec![Ray { dir: [1.0, 1.0 / q.k], weight: w, exponent: q.p_eta() }] }
    }

    /// `ν_{K,η} + ν_{1/K,η}`.
    pub fn nu_pair(q: &Params) -> Self {
        Self::nu_steep(q).plus(&Self::nu_shallow(q))
    }

    /// `¼(ν_{K,η} + ν_{1/K,η}) + ¼δ_{(-1,1)} + ½δ_{(0,1)}`, atoms as printed.
    pub fn mu(q: &Params) -> Self {
        Self::nu_pair(q).scaled(0.25).plus(&Self::atom(-1.0, 1.0, 0.25)).plus(&Self::atom(0.0, 1.0, 0.5))
    }

    /// Push-forward of `μ_{K,η}` under `Y ↦ -Y`.
    pub fn sigma(q: &Params) -> Self {
        Self::mu(q).reflected_y()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.atoms.extend_from_slice(&other.atoms);
        out.rays.extend_from_slice(&other.rays);
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.atoms.iter_mut().for_each(|a| a.mass *= c);
        out.rays.iter_mut().for_each(|r| r.weight *= c);
        out
    }

    pub fn reflected_y(&self) -> Self {
        let mut out = self.clone();
        out.atoms.iter_mut().for_each(|a| a.y = -a.y);
        out.rays.iter_mut().for_each(|r| r.dir[1] = -r.dir[1]);
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.iter().any(|a| !(a.mass >= 0.0)) || self.rays.iter().any(|r| !(r.weight >= 0.0)) {
            return Err(param("laminate", "masses and densities must be nonnegative"));
        }
        if self.rays.iter().any(|r| !(r.exponent > 0.0)) {
            return Err(Error::Divergent("ray with exponent ≤ 0 has infinite mass".into()));
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.rays.iter().map(Ray::mass).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baricenter {
    pub x: f64,
    pub y: f64,
    pub mass: f64,
}

/// Mass-weighted mean of `(X, Y)`.
pub fn baricenter(lam: &Laminate) -> Result<Baricenter> {
    lam.validate()?;
    let mut mx = 0.0;
    let mut my = 0.0;
    for a in &lam.atoms {
        mx += a.mass * a.x;
        my += a.mass * a.y;
    }
    for r in &lam.rays {
        if r.weight > 0.0 && r.exponent <= 1.0 {
            return Err(Error::Divergent(format!("first moment of a ray with exponent {} diverges", r.exponent)));
        }
        // ∫₁^∞ t · t^{-e-1} dt = 1/(e-1)
        let m = r.weight / (r.exponent - 1.0);
        mx += m * r.dir[0];
        my += m * r.dir[1];
    }
    let mass = lam.mass();
    if !(mass > 0.0) {
        return Err(param("laminate", "zero total mass"));
    }
    Ok(Baricenter { x: mx / mass, y: my / mass, mass })
}

/// Growth degree of `g` along a ray, read off at large `t`.
fn tail_degree(g: &dyn Fn(f64) -> f64, s: f64) -> f64 {
    let (a, b) = (g(s.exp()).abs(), g((s + 1.0).exp()).abs());
    if a == 0.0 || b == 0.0 {
        return f64::NEG_INFINITY;
    }
    (b / a).ln()
}

/// `∫₁^∞ g(t) t^{-e-1} dt` by `t = e^s`, Gauss–Legendre on unit panels of
/// `[0, S]` and a power-law tail fitted at `S`.
fn ray_quadrature(g: &dyn Fn(f64) -> f64, e: f64) -> Result<f64> {
    // keep t^e well inside the f64 range
    let s_cap = (600.0 / e.max(1.0)).min(400.0);
    let a = tail_degree(g, 20.0);
    if a.is_nan() || a >= e - 1e-9 {
        return Err(Error::Divergent(format!("integrand grows like t^{a:.3} against the density t^-{e:.3}")));
    }
    // tail below 1e-13 relative where possible
    let s_end = if a.is_finite() { (30.0 / (e - a)).clamp(8.0, s_cap) } else { 8.0 };
    let panels = s_end.ceil() as usize * 2;
    let body = Legendre::standard().composite(0.0, s_end, panels, |s| g(s.exp()) * (-e * s).exp());
    let a_end = tail_degree(g, s_end - 1.0);
    let tail = if a_end.is_finite() && a_end < e { g(s_end.exp()) * (-e * s_end).exp() / (e - a_end) } else { 0.0 };
    Ok(body + tail)
}

/// `∫ φ dλ`. Homogeneous test functions use the closed form
/// `∫₁^∞ t^{a-e-1} dt = 1/(e-a)`; min-affine ones are integrated exactly
/// piece by piece; anything else goes through [`ray_quadrature`].
pub fn integrate(lam: &Laminate, f: &TestFunction2D) -> Result<f64> {
    lam.validate()?;
    let mut total: f64 = lam.atoms.iter().map(|a| a.mass * f.eval(a.x, a.y)).sum();
    for r in &lam.rays {
        if r.weight == 0.0 {
            continue;
        }
        total += r.weight * battery::ray_integral(f, r, [0.0, 0.0])?;
    }
    Ok(total)
}

/// [`integrate`] with every ray part forced through quadrature.
pub fn integrate_by_quadrature(lam: &Laminate, f: &TestFunction2D) -> Result<f64> {
    lam.validate()?;
    let mut total: f64 = lam.atoms.iter().map(|a| a.mass * f.eval(a.x, a.y)).sum();
    for r in &lam.rays {
        total += r.weight * ray_quadrature(&|t| { let (x, y) = r.at(t); f.eval(x, y) }, r.exponent)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub params: Params,
    /// `∫φ₁ dμ / ∫φ₂ dμ` from the measure definitions.
    pub direct: f64,
    /// The printed closed form.
    pub printed: f64,
    /// `printed/direct - 1`.
    pub discrepancy: f64,
    /// `direct^{1/p}`.
    pub root: f64,
    /// `(K+1)/(K-1)`.
    pub target: f64,
}

/// The printed closed form of the ratio, kept for comparison.
pub fn printed_ratio(q: &Params) -> f64 {
    let (k, p, eta) = (q.k, q.p, q.eta);
    let num = 0.25 * k * ((k + 1.0).powf(p) + (k + 1.0).powf(p) / k.powf(p)) / eta + 0.5 * (k - 1.0);
    let den = 0.25 * k * ((k - 1.0).powf(p) + (k - 1.0).powf(p) / k.powf(p)) / eta + 0.5 * (k - 1.0) + 0.25 * 2f64.powf(p) * (k - 1.0);
    num / den
}

pub fn ratio(q: &Params) -> Result<RatioReport> {
    let mu = Laminate::mu(q);
    let num = integrate(&mu, &TestFunction2D::phi1(q.p))?;
    let den = integrate(&mu, &TestFunction2D::phi2(q.p))?;
    let direct = num / den;
    let printed = printed_ratio(q);
    Ok(RatioReport { params: *q, direct, printed, discrepancy: printed / direct - 1.0, root: direct.powf(1.0 / q.p), target: q.target() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<RatioReport>,
    /// `max (target - root)/η` over the rows.
    pub c_estimate: f64,
    /// `|root - (p-1)|` decreases along the sweep.
    pub monotone: bool,
}

/// Ratios for `K` tied to each `η`, in the order given.
pub fn eta_sweep(p: f64, etas: &[f64]) -> Result<Sweep> {
    let rows = etas.iter().map(|&e| ratio(&Params::tied(p, e)?)).collect::<Result<Vec<_>>>()?;
    let c_estimate = rows.iter().map(|r| (r.target - r.root) / r.params.eta).fold(f64::NEG_INFINITY, f64::max);
    let monotone = rows.windows(2).all(|w| (w[1].root - (p - 1.0)).abs() < (w[0].root - (p - 1.0)).abs());
    Ok(Sweep { rows, c_estimate, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn relations() {
        let r = s0_k_p_relations(4.0, 1e-300).unwrap();
        assert_relative_eq!(r.s0, 0.5, max_relative = 1e-14);
        assert_relative_eq!(r.k, 2.0, max_relative = 1e-14);
        assert_relative_eq!(s0_k_p_relations(2.0, 2.0).unwrap().k, 2.0);
        for p in [2.0, 2.5, 3.0, 7.0] {
            for eta in [1e-4, 1e-2, 0.5] {
                assert!(s0_k_p_relations(p, eta).unwrap().residual <= 1e-14);
            }
        }
        assert!(s0_k_p_relations(1.5, 0.5).is_err());
    }

    #[test]
    fn masses_and_baricenters() {
        let q = Params::tied(3.0, 0.01).unwrap();
        let one = TestFunction2D::homogeneous("one", 0.0, |_, _| 1.0);
        assert_relative_eq!(integrate(&Laminate::nu_steep(&q), &one).unwrap(), 0.5, max_relative = 1e-14);
        let b = baricenter(&Laminate::nu_pair(&q)).unwrap();
        assert_relative_eq!(b.mass, 1.0, max_relative = 1e-14);
        assert_relative_eq!(b.x, 1.0, max_relative = 1e-13);
        assert_relative_eq!(b.y, 1.0, max_relative = 1e-13);
        let m = baricenter(&Laminate::mu(&q)).unwrap();
        assert_relative_eq!(m.x, 0.0, epsilon = 1e-14);
        assert_relative_eq!(m.y, 1.0, max_relative = 1e-14);
        assert_eq!(baricenter(&Laminate::atom(1.0, 1.0, 1.0)).unwrap(), Baricenter { x: 1.0, y: 1.0, mass: 1.0 });
    }

    #[test]
    fn closed_form_against_quadrature() {
        let q = Params::tied(3.0, 0.3).unwrap();
        let lam = Laminate::nu_pair(&q);
        for f in [TestFunction2D::phi1(3.0), TestFunction2D::phi2(3.0), TestFunction2D::phi1(1.5)] {
            let a = integrate(&lam, &f).unwrap();
            let b = integrate_by_quadrature(&lam, &f).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-10);
        }
        let want = 2.0 * q.k / (q.k - 1.0) * ((q.k + 1.0) / q.k).powf(3.0) / q.eta;
        assert_relative_eq!(integrate(&lam, &TestFunction2D::phi1(3.0)).unwrap(), want, max_relative = 1e-13);
    }

    #[test]
    fn divergent_growth_is_an_error() {
        let q = Params::tied(3.0, 0.1).unwrap();
        let lam = Laminate::nu_pair(&q);
        assert!(matches!(integrate(&lam, &TestFunction2D::phi1(3.2)), Err(Error::Divergent(_))));
        let fast = TestFunction2D::custom("x^4", |x, _| x.powi(4));
        assert!(matches!(integrate(&lam, &fast), Err(Error::Divergent(_))));
    }

    #[test]
    fn limit_at_p3() {
        let r = ratio(&Params::tied(3.0, 1e-4).unwrap()).unwrap();
        assert!((r.root - 2.0).abs() <= 5e-3, "{r:?}");
        let s = eta_sweep(3.0, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
        assert!(s.monotone, "{s:?}");
        for row in &s.rows {
            assert!(row.root >= row.target - s.c_estimate * row.params.eta - 1e-12);
        }
    }

    #[test]
    fn reflection_swaps_the_roles() {
        let q = Params::tied(3.0, 1e-2).unwrap();
        let s = Laminate::sigma(&q);
        let a = integrate(&s, &TestFunction2D::phi2(3.0)).unwrap() / integrate(&s, &TestFunction2D::phi1(3.0)).unwrap();
        assert_relative_eq!(a, ratio(&q).unwrap().direct, max_relative = 1e-14);
    }

    #[test]
    fn ratio_decreases_in_eta_for_fixed_k() {
        let mut last = f64::INFINITY;
        for eta in [1e-3, 1e-2, 1e-1, 1.0] {
            let r = ratio(&Params::free(3.0, eta, 3.0).unwrap()).unwrap().direct;
            assert!(r < last);
            last = r;
        }
        let big = ratio(&Params::tied(2.0, 5.0).unwrap()).unwrap();
        assert!(big.direct.is_finite() && big.direct >= 1.0);
    }
}
