//! `τ(p)` and the interpolated constant for `R₁² - R₂²`-type bounds.
//!
//! `M_p = √2 (p-1)/τ(p)` bounds the operator on `L^p`, the operator has norm
//! 1 on `L²`, and Riesz–Thorin between `2` and `p ≥ q` gives
//! `C(q) ≤ M_p^θ` with `θ = (1/2 - 1/q)/(1/2 - 1/p)`.

use statrs::function::gamma::ln_gamma;

use super::feasibility::golden_max;
use crate::error::{param, Result};
use crate::quad;

/// `τ(p) = ((2π)^{-1} ∫_0^{2π} |cos φ|^p dφ)^{1/p}` by adaptive quadrature.
pub fn tau(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(param("p", "need p > 0"));
    }
    let (i, _) = quad::adaptive(|t: f64| t.cos().powf(p), 0.0, std::f64::consts::FRAC_PI_2, 1e-15);
    Ok((i * 2.0 / std::f64::consts::PI).powf(1.0 / p))
}

/// `(Γ((p+1)/2) / (√π Γ(p/2 + 1)))^{1/p}`.
pub fn tau_closed_form(p: f64) -> f64 {
    let l = ln_gamma((p + 1.0) / 2.0) - 0.5 * std::f64::consts::PI.ln() - ln_gamma(p / 2.0 + 1.0);
    (l / p).exp()
}

/// `M_p = √2 (p-1)/τ(p)`.
pub fn endpoint_bound(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * (p - 1.0) / tau_closed_form(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolated {
    pub q: f64,
    pub value: f64,
    /// Endpoint exponent achieving the minimum.
    pub p: f64,
}

/// Largest endpoint exponent considered.
pub const P_MAX: f64 = 1e3;

/// `min_{q ≤ p ≤ 1000} M_p^θ`.
pub fn interpolation_constant(q: f64) -> Result<Interpolated> {
    if !(q >= 2.0) {
        return Err(param("q", "need q ≥ 2 (use duality for q < 2)"));
    }
    if q == 2.0 {
        return Ok(Interpolated { q, value: 1.0, p: 2.0 });
    }
    let log_c = |lp: f64| {
        let p = lp.exp();
        let theta = (0.5 - 1.0 / q) / (0.5 - 1.0 / p);
        theta * endpoint_bound(p).ln()
    };
    let (lo, hi) = (q.ln(), P_MAX.max(q).ln());
    let n = 200;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let best = (0..=n).min_by(|&i, &j| log_c(grid[i]).total_cmp(&log_c(grid[j]))).unwrap();
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(n)];
    let (lp, neg) = golden_max(|x| -log_c(x), a, b, 100);
    let (lp, v) = if -neg <= log_c(grid[best]) { (lp, -neg) } else { (grid[best], log_c(grid[best])) };
    Ok(Interpolated { q, value: v.exp(), p: lp.exp() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub points: Vec<Interpolated>,
    /// `max C(q)/(q-1)` over the sweep.
    pub sup_ratio: f64,
    pub argsup: f64,
}

/// `C(q)/(q-1)` on `n` log-spaced values of `q` in `[qmin, qmax]`.
pub fn interpolation_sweep(qmin: f64, qmax: f64, n: usize) -> Result<Sweep> {
    if !(qmin >= 2.0 && qmax >= qmin) {
        return Err(param("q", "need 2 ≤ qmin ≤ qmax"));
    }
    let n = n.max(2);
    let points = (0..n)
        .map(|i| interpolation_constant(qmin * (qmax / qmin).powf(i as f64 / (n - 1) as f64)))
        .collect::<Result<Vec<_>>>()?;
    let (sup_ratio, argsup) = points
        .iter()
        .filter(|c| c.q > 2.0)
        .map(|c| (c.value / (c.q - 1.0), c.q))
        .fold((f64::NEG_INFINITY, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
    Ok(Sweep { points, sup_ratio, argsup })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tau_values() {
        assert_relative_eq!(tau(2.0).unwrap(), 0.5f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(tau(4.0).unwrap(), (3.0f64 / 8.0).powf(0.25), max_relative = 1e-13);
        for i in 0..=98 {
            let p = 1.0 + 0.5 * i as f64;
            assert_relative_eq!(tau(p).unwrap(), tau_closed_form(p), max_relative = 1e-10);
        }
    }

    #[test]
    fn endpoint_bound_is_asymptotically_root_two() {
        let r = endpoint_bound(1e4) / (1e4 - 1.0);
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-3, "{r}");
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(interpolation_constant(2.0).unwrap().value, 1.0);
        assert!(interpolation_constant(10.0).unwrap().value <= 1.7 * 9.0);
        assert!(interpolation_constant(1.5).is_err());
        // never worse than the endpoint itself
        for q in [2.5, 4.0, 7.0, 20.0] {
            assert!(interpolation_constant(q).unwrap().value <= endpoint_bound(q) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sweep_sup_is_stable_under_refinement() {
        let a = interpolation_sweep(2.1, 50.0, 200).unwrap();
        let b = interpolation_sweep(2.1, 50.0, 400).unwrap();
        assert!((a.sup_ratio - b.sup_ratio).abs() < 1e-3);
    }
}
