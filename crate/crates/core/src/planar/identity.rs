//! `∬ R₁²φ · ψ = ½ ∫₀^∞ ∬ ∂₁φ(·,t) ∂₁ψ(·,t) dx dt` for heat extensions with
//! kernel `(πt)⁻¹ exp(-|x|²/t)`: the `t`-integral of `ξ₁² e^{-t|ξ|²/2}` is
//! `2ξ₁²/|ξ|²`.

use num_complex::Complex64;

use super::{fft2, GridField, SpectralMultiplier};
use crate::error::{param, Result};

/// Factor in front of the triple integral.
pub const IDENTITY_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Identity113 {
    pub lhs: f64,
    /// `½ (small_t + quadrature + tail)`.
    pub rhs: f64,
    /// Trapezoid rule in `log t` over `[t_min, t_max]`.
    pub quadrature: f64,
    /// Trapezoid on `[0, t_min]`.
    pub small_t: f64,
    /// Closed form of `∫_{t_max}^∞` on the torus.
    pub tail: f64,
    /// `|lhs - rhs| / |lhs|` (absolute when `lhs = 0`).
    pub gap: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub nodes: usize,
    pub warnings: Vec<String>,
}

/// Checks the identity for real fields `φ, ψ` with `nt` log-spaced nodes on
/// `[(L/N)², tmax]`.
pub fn identity_1_13_check(phi: &GridField, psi: &GridField, tmax: f64, nt: usize) -> Result<Identity113> {
    if !phi.same_grid(psi) {
        return Err(param("psi", "φ and ψ must share a grid"));
    }
    if !phi.is_real(1e-14) || !psi.is_real(1e-14) {
        return Err(param("phi", "identity check expects real fields"));
    }
    let (n, l) = (phi.n(), phi.l());
    let t_min = phi.dx() * phi.dx();
    if !(tmax > t_min) {
        return Err(param("tmax", format!("need tmax > (L/N)² = {t_min}")));
    }
    if nt < 2 {
        return Err(param("nt", "need at least two nodes"));
    }
    let mut warnings = Vec::new();
    for (name, f) in [("φ", phi), ("ψ", psi)] {
        if let Err(e) = f.periodization_guard(1e-12) {
            warnings.push(format!("{name}: {e}"));
        }
    }
    let da = phi.dx() * phi.dx();
    let lhs: f64 = SpectralMultiplier::riesz_sq(1)?
        .apply(phi)
        .values()
        .iter()
        .zip(psi.values())
        .map(|(a, b)| a.re * b.re)
        .sum::<f64>()
        * da;

    let fp = phi.spectrum();
    let fq = psi.spectrum();
    let d1 = SpectralMultiplier::partial(1)?.grid(n, l);
    let xi2: Vec<f64> = (0..n * n)
        .map(|k| {
            let (a, b) = (phi.frequency(k % n), phi.frequency(k / n));
            a * a + b * b
        })
        .collect();
    let slice = |t: f64| -> f64 {
        let field = |spec: &[Complex64]| {
            let mut v: Vec<Complex64> = (0..n * n).map(|k| spec[k] * d1[k] * (-0.25 * t * xi2[k]).exp()).collect();
            fft2(&mut v, n, true);
            v
        };
        let (a, b) = (field(&fp), field(&fq));
        a.iter().zip(&b).map(|(x, y)| x.re * y.re).sum::<f64>() * da
    };

    let (s0, s1) = (t_min.ln(), tmax.ln());
    let h = (s1 - s0) / (nt - 1) as f64;
    let mut quadrature = 0.0;
    let mut g_min = 0.0;
    for k in 0..nt {
        let t = (s0 + h * k as f64).exp();
        let g = slice(t);
        if k == 0 {
            g_min = g;
        }
        let w = if k == 0 || k == nt - 1 { 0.5 } else { 1.0 };
        quadrature += w * h * g * t;
    }
    let small_t = 0.5 * t_min * (slice(0.0) + g_min);

    // ∫_{tmax}^∞ ξ₁² e^{-t|ξ|²/2} dt = 2 ξ₁²/|ξ|² e^{-tmax|ξ|²/2}
    let tail = (0..n * n)
        .filter(|&k| xi2[k] > 0.0)
        .map(|k| {
            2.0 * d1[k].norm_sqr() / xi2[k] * (-0.5 * tmax * xi2[k]).exp() * (fp[k] * fq[k].conj()).re
        })
        .sum::<f64>()
        * da
        / (n * n) as f64;

    let rhs = IDENTITY_FACTOR * (small_t + quadrature + tail);
    let gap = if lhs != 0.0 { (lhs - rhs).abs() / lhs.abs() } else { (lhs - rhs).abs() };
    if lhs != 0.0 && (IDENTITY_FACTOR * tail / lhs).abs() > 5e-2 {
        warnings.push(format!("tail beyond tmax carries {:.2e} of the total; raise tmax", IDENTITY_FACTOR * tail / lhs));
    }
    Ok(Identity113 { lhs, rhs, quadrature, small_t, tail, gap, t_min, t_max: tmax, nodes: nt, warnings })
}
