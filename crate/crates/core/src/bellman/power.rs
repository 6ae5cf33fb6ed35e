//! `b(x, y) = x^α y^α` on `Ω_Q = {x, y > 0, 1 < xy ≤ Q}`.

use rand::RngExt;
use rayon::prelude::*;

use crate::error::{param, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    /// `min (-d²b - α(1-2α) b ((dx/x)² + (dy/y)²))`.
    pub worst_margin: f64,
    /// The margin divided by `b ((dx/x)² + (dy/y)²)`.
    pub worst_relative: f64,
    /// `max(-b, b - Q^α)`, positive if the size bound fails.
    pub worst_size: f64,
    pub witness: [f64; 2],
}

/// Samples points of `Ω_Q` (`log x` uniform on `[-3, 3]`, `log xy` uniform on
/// `(0, log Q]`) and random directions.
pub fn bq_hessian_check(q: f64, alpha: f64, samples: usize, seed: u64) -> Result<PowerReport> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(param("alpha", "need 0 < α < 1/2"));
    }
    if !(q > 1.0) {
        return Err(param("Q", "need Q > 1"));
    }
    const SHARD: usize = 4096;
    let bound = q.powf(alpha);
    let parts: Vec<PowerReport> = (0..samples.div_ceil(SHARD))
        .into_par_iter()
        .map(|s| {
            let mut r = rng::stream(seed, s as u64);
            let mut rep = PowerReport { worst_margin: f64::INFINITY, worst_relative: f64::INFINITY, worst_size: f64::NEG_INFINITY, witness: [0.0; 2] };
            for _ in 0..SHARD.min(samples - s * SHARD) {
                let lx = -3.0 + 6.0 * r.random::<f64>();
                let lxy = q.ln() * (1.0 - r.random::<f64>());
                let (x, y) = (lx.exp(), (lxy - lx).exp());
                let t = std::f64::consts::TAU * r.random::<f64>();
                let (dx, dy) = (t.cos() * x, t.sin() * y);
                let b = (x * y).powf(alpha);
                let bxx = alpha * (alpha - 1.0) * b / (x * x);
                let byy = alpha * (alpha - 1.0) * b / (y * y);
                let bxy = alpha * alpha * b / (x * y);
                let form = bxx * dx * dx + 2.0 * bxy * dx * dy + byy * dy * dy;
                let weight = b * ((dx / x).powi(2) + (dy / y).powi(2));
                let margin = -form - alpha * (1.0 - 2.0 * alpha) * weight;
                if margin < rep.worst_margin {
                    rep.worst_margin = margin;
                    rep.witness = [x, y];
                }
                rep.worst_relative = rep.worst_relative.min(margin / weight);
                rep.worst_size = rep.worst_size.max(-b).max(b - bound);
            }
            rep
        })
        .collect();
    parts
        .into_iter()
        .reduce(|a, b| PowerReport {
            worst_margin: a.worst_margin.min(b.worst_margin),
            worst_relative: a.worst_relative.min(b.worst_relative),
            worst_size: a.worst_size.max(b.worst_size),
            witness: if b.worst_margin < a.worst_margin { b.witness } else { a.witness },
        })
        .ok_or_else(|| param("samples", "need at least one sample"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_holds_on_samples() {
        let r = bq_hessian_check(8.0, 0.25, 100_000, 1).unwrap();
        assert!(r.worst_margin >= -1e-12, "{r:?}");
        assert!(r.worst_size <= 0.0);
    }

    #[test]
    fn anti_diagonal_margin_is_four_alpha_squared() {
        // dx/x = -dy/y = u: margin = b α² (u - (-u))² = 4 α² b u²
        let (x, y, a, u): (f64, f64, f64, f64) = (1.7, 2.1, 0.3, 0.4);
        let b = (x * y).powf(a);
        let (dx, dy) = (u * x, -u * y);
        let form = a * (a - 1.0) * b * (u * u) * 2.0 + 2.0 * a * a * b / (x * y) * dx * dy;
        let margin = -form - a * (1.0 - 2.0 * a) * b * 2.0 * u * u;
        assert!((margin - 4.0 * a * a * b * u * u).abs() < 1e-14);
    }

    #[test]
    fn alpha_range_is_enforced() {
        assert!(bq_hessian_check(8.0, 0.5, 10, 0).is_err());
        assert!(bq_hessian_check(8.0, 0.0, 10, 0).is_err());
        assert!(bq_hessian_check(1.0, 0.25, 10, 0).is_err());
    }
}
