//! Burkholder's functions `Φ`, `Φ₀`, `F_p` and the quadratic forms of
//! `(x, y) ↦ Φ(‖x‖, ‖y‖)` on Hilbert-space arguments (here `R²`).

use std::fmt;

use rand::RngExt;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::{p_star, rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurkholderVariant {
    /// `γ_p (|y| + |x|)^{p-1} (|y| - (p*-1)|x|)`
    Phi,
    /// `|y|^p - (p*-1)^p |x|^p` where `|y| ≤ (p*-1)|x|`, `Φ` elsewhere.
    Phi0,
    /// `Φ₀` restricted to `x, y ≥ 0`.
    Fp,
}

impl fmt::Display for BurkholderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Phi => "phi",
            Self::Phi0 => "phi0",
            Self::Fp => "fp",
        })
    }
}

impl std::str::FromStr for BurkholderVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(Self::Phi),
            "phi0" => Ok(Self::Phi0),
            "fp" | "f_p" => Ok(Self::Fp),
            _ => Err(param("variant", format!("unknown variant `{s}` (phi, phi0, fp)"))),
        }
    }
}

/// `γ_p = p (1 - 1/p*)^{p-1}`.
pub fn gamma_p(p: f64) -> f64 {
    p * (1.0 - 1.0 / p_star(p)).powf(p - 1.0)
}

/// `|y|^p - (p*-1)^p |x|^p`.
pub fn obstacle(x: f64, y: f64, p: f64) -> f64 {
    y.abs().powf(p) - ((p_star(p) - 1.0) * x.abs()).powf(p)
}

/// `(y - (p*-1)x)(x + y)^{p-1}` for `x, y ≥ 0`.
pub fn phi_unnormalized(x: f64, y: f64, p: f64) -> f64 {
    (y - (p_star(p) - 1.0) * x) * (x + y).powf(p - 1.0)
}

pub(crate) fn eval_unchecked(x: f64, y: f64, p: f64, v: BurkholderVariant) -> f64 {
    let (ax, ay) = (x.abs(), y.abs());
    let phi = || gamma_p(p) * phi_unnormalized(ax, ay, p);
    match v {
        BurkholderVariant::Phi => phi(),
        BurkholderVariant::Phi0 | BurkholderVariant::Fp => {
            if ay <= (p_star(p) - 1.0) * ax {
                obstacle(ax, ay, p)
            } else {
                phi()
            }
        }
    }
}

pub fn eval_phi(x: f64, y: f64, p: f64, variant: BurkholderVariant) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(param("p", format!("need 1 < p < ∞, got {p}")));
    }
    if variant == BurkholderVariant::Fp && (x < 0.0 || y < 0.0) {
        return Err(Error::Domain(format!("F_p needs x, y ≥ 0, got ({x}, {y})")));
    }
    Ok(eval_unchecked(x, y, p, variant))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantReport {
    /// `min (variant(x,y) - (|y|^p - (p*-1)^p|x|^p))`.
    pub worst_gap: f64,
    /// The same gap divided by `(|x| + |y|)^p`.
    pub worst_relative: f64,
    pub witness: [f64; 2],
}

/// Samples `(x, y)` uniformly in `[-half, half]²` (the positive quadrant for
/// `F_p`) and records how far the variant sits above the obstacle.
pub fn majorant_check(variant: BurkholderVariant, p: f64, samples: usize, half: f64, seed: u64) -> Result<MajorantReport> {
    eval_phi(0.0, 1.0, p, variant)?;
    if samples == 0 {
        return Err(param("samples", "need at least one sample"));
    }
    let lo = if variant == BurkholderVariant::Fp { 0.0 } else { -half };
    const SHARD: usize = 4096;
    let parts: Vec<(f64, f64, [f64; 2])> = (0..samples.div_ceil(SHARD))
        .into_par_iter()
        .map(|s| {
            let mut r = rng::stream(seed, s as u64);
            let mut out = (f64::INFINITY, f64::INFINITY, [0.0; 2]);
            for _ in 0..SHARD.min(samples - s * SHARD) {
                let x = lo + (half - lo) * r.random::<f64>();
                let y = lo + (half - lo) * r.random::<f64>();
                let gap = eval_unchecked(x, y, p, variant) - obstacle(x, y, p);
                let rel = gap / (x.abs() + y.abs()).powf(p).max(f64::MIN_POSITIVE);
                if gap < out.0 {
                    out.0 = gap;
                    out.2 = [x, y];
                }
                out.1 = out.1.min(rel);
            }
            out
        })
        .collect();
    let mut rep = MajorantReport { worst_gap: f64::INFINITY, worst_relative: f64::INFINITY, witness: [0.0; 2] };
    for (g, r, w) in parts {
        if g < rep.worst_gap {
            rep.worst_gap = g;
            rep.witness = w;
        }
        rep.worst_relative = rep.worst_relative.min(r);
    }
    Ok(rep)
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

/// `φ(x, y) = (‖y‖ - (p*-1)‖x‖)(‖x‖ + ‖y‖)^{p-1}` on `R² × R²`.
pub fn phi_on_vectors(x: [f64; 2], y: [f64; 2], p: f64) -> f64 {
    phi_unnormalized(norm(x), norm(y), p)
}

/// Closed form of `d²φ[(dx, dy)]` for `φ = phi_on_vectors`.
///
/// With `S = ‖x‖ + ‖y‖`, `h' = (dx, x/‖x‖)`, `k' = (dy, y/‖y‖)` and `d̂v` the
/// part of `dv` orthogonal to `v`:
///
/// - `p ≥ 2`: `-p(p-2) S^{p-1}/‖y‖ ‖d̂y‖² - p(p-1) S^{p-2}(‖dx‖² - ‖dy‖²)
///   - p(p-1)(p-2) ‖x‖ S^{p-3} (h' + k')²`
/// - `1 < p < 2`: `(p-1)^{-1} [-p(2-p) S^{p-1}/‖x‖ ‖d̂x‖² + p(p-1) S^{p-2}(‖dy‖² - ‖dx‖²)
///   - p(p-1)(2-p) ‖y‖ S^{p-3} (h' + k')²]`
pub fn hessian_form_analytic(x: [f64; 2], y: [f64; 2], dx: [f64; 2], dy: [f64; 2], p: f64) -> f64 {
    let (nx, ny) = (norm(x), norm(y));
    let s = nx + ny;
    let hp = dot(dx, x) / nx;
    let kp = dot(dy, y) / ny;
    let (dx2, dy2) = (dot(dx, dx), dot(dy, dy));
    if p >= 2.0 {
        let perp_y = dy2 - kp * kp;
        -p * (p - 2.0) * s.powf(p - 1.0) / ny * perp_y
            - p * (p - 1.0) * s.powf(p - 2.0) * (dx2 - dy2)
            - p * (p - 1.0) * (p - 2.0) * nx * s.powf(p - 3.0) * (hp + kp).powi(2)
    } else {
        let perp_x = dx2 - hp * hp;
        (-p * (2.0 - p) * s.powf(p - 1.0) / nx * perp_x + p * (p - 1.0) * s.powf(p - 2.0) * (dy2 - dx2)
            - p * (p - 1.0) * (2.0 - p) * ny * s.powf(p - 3.0) * (hp + kp).powi(2))
            / (p - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianForm {
    pub analytic: f64,
    pub numeric: f64,
}

impl HessianForm {
    pub fn error(&self) -> f64 {
        (self.analytic - self.numeric).abs()
    }
}

/// Analytic form against the centered second difference with step
/// `h · (‖x‖ + ‖y‖)`.
pub fn hessian_form_identity(x: [f64; 2], y: [f64; 2], dx: [f64; 2], dy: [f64; 2], p: f64, h: f64) -> Result<HessianForm> {
    if !(p > 1.0) {
        return Err(param("p", "need p > 1"));
    }
    let scale = norm(x) + norm(y);
    if norm(x) < 1e-8 * scale.max(1.0) || norm(y) < 1e-8 * scale.max(1.0) {
        return Err(Error::Domain("‖x‖ or ‖y‖ is too close to 0 (singular locus)".into()));
    }
    let analytic = hessian_form_analytic(x, y, dx, dy, p);
    let step = h * scale;
    let at = |t: f64| {
        phi_on_vectors(
            [x[0] + t * dx[0], x[1] + t * dx[1]],
            [y[0] + t * dy[0], y[1] + t * dy[1]],
            p,
        )
    };
    let numeric = (at(step) - 2.0 * at(0.0) + at(-step)) / (step * step);
    Ok(HessianForm { analytic, numeric })
}

/// Observed order `log(e(h1)/e(h2)) / log(h1/h2)` for the pair of steps.
pub fn observed_order(x: [f64; 2], y: [f64; 2], dx: [f64; 2], dy: [f64; 2], p: f64, h1: f64, h2: f64) -> Result<f64> {
    let e1 = hessian_form_identity(x, y, dx, dy, p, h1)?.error();
    let e2 = hessian_form_identity(x, y, dx, dy, p, h2)?.error();
    Ok((e1 / e2).ln() / (h1 / h2).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plugging_in_examples() {
        for p in [1.5, 2.0, 3.0, 4.0] {
            assert_relative_eq!(eval_phi(0.0, 1.0, p, BurkholderVariant::Phi).unwrap(), gamma_p(p), max_relative = 1e-15);
        }
        for p in [2.0, 3.0, 4.0] {
            let ps = p_star(p);
            assert!(eval_phi(1.0, ps - 1.0, p, BurkholderVariant::Phi).unwrap().abs() < 1e-12);
        }
        assert!(eval_phi(1.0, 1.0, 1.0, BurkholderVariant::Phi).is_err());
        assert!(eval_phi(-1.0, 1.0, 3.0, BurkholderVariant::Fp).is_err());
    }

    #[test]
    fn phi0_is_the_obstacle_below_the_split() {
        let p = 3.0;
        for (x, y) in [(1.0, 0.5), (2.0, 3.9), (1.0, -1.0)] {
            assert_eq!(eval_phi(x, y, p, BurkholderVariant::Phi0).unwrap(), obstacle(x, y, p));
        }
        assert_eq!(
            eval_phi(1.0, 2.5, p, BurkholderVariant::Phi0).unwrap(),
            eval_phi(1.0, 2.5, p, BurkholderVariant::Phi).unwrap()
        );
    }

    #[test]
    fn p2_collapse() {
        for (x, y) in [(0.3, 0.9), (1.2, 0.4), (2.0, 2.0)] {
            let target = y * y - x * x;
            for v in [BurkholderVariant::Phi, BurkholderVariant::Phi0, BurkholderVariant::Fp] {
                assert_relative_eq!(eval_phi(x, y, 2.0, v).unwrap(), target, epsilon = 1e-14);
            }
        }
        let r = majorant_check(BurkholderVariant::Phi, 2.0, 5000, 3.0, 1).unwrap();
        assert!(r.worst_gap.abs() < 1e-12);
    }

    #[test]
    fn majorant_at_p3() {
        for v in [BurkholderVariant::Phi, BurkholderVariant::Phi0, BurkholderVariant::Fp] {
            let r = majorant_check(v, 3.0, 100_000, 2.0, 7).unwrap();
            assert!(r.worst_gap >= -1e-9, "{v}: {r:?}");
        }
        // touching locus
        let g = eval_phi(1.0, 2.0, 3.0, BurkholderVariant::Phi).unwrap() - obstacle(1.0, 2.0, 3.0);
        assert!(g.abs() < 1e-13);
    }

    #[test]
    fn zero_direction_gives_zero_forms() {
        let f = hessian_form_identity([0.3, 0.4], [1.0, -0.2], [0.0; 2], [0.0; 2], 3.0, 1e-3).unwrap();
        assert_eq!(f.analytic, 0.0);
        assert_eq!(f.numeric, 0.0);
    }

    #[test]
    fn equal_lengths_give_nonpositive_form_at_p3() {
        let mut r = rng::stream(12, 0);
        for _ in 0..1000 {
            let mut v = || [r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0];
            let (x, y, dx, mut dy) = (v(), v(), v(), v());
            let s = norm(dx) / norm(dy);
            dy = [dy[0] * s, dy[1] * s];
            assert!(hessian_form_analytic(x, y, dx, dy, 3.0) <= 1e-12);
        }
    }

    #[test]
    fn analytic_forms_match_finite_differences() {
        let mut r = rng::stream(13, 0);
        for p in [1.3, 1.5, 1.8, 2.0, 2.5, 3.0, 5.0] {
            for _ in 0..20 {
                let mut v = || [r.random::<f64>() * 2.0 - 1.0, r.random::<f64>() * 2.0 - 1.0];
                let (x, y, dx, dy) = (v(), v(), v(), v());
                if norm(x) < 0.1 || norm(y) < 0.1 {
                    continue;
                }
                let f = hessian_form_identity(x, y, dx, dy, p, 1e-3).unwrap();
                assert!(f.error() <= 1e-4 * (1.0 + f.analytic.abs()), "p={p}: {f:?}");
            }
        }
    }

    #[test]
    fn second_order_convergence_at_p25() {
        let o = observed_order([0.6, -0.3], [0.2, 0.9], [0.7, 0.1], [-0.4, 0.5], 2.5, 1e-2, 1e-3).unwrap();
        assert!((o - 2.0).abs() < 0.2, "order {o}");
        let fine = hessian_form_identity([0.6, -0.3], [0.2, 0.9], [0.7, 0.1], [-0.4, 0.5], 2.5, 1e-4).unwrap();
        assert!(fine.error() < 1e-6);
    }

    #[test]
    fn singular_locus_rejected() {
        assert!(hessian_form_identity([0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0], 3.0, 1e-3).is_err());
    }
}
