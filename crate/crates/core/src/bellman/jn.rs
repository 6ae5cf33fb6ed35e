//! The John–Nirenberg Bellman function
//! `v_δ(x₁, x₂) = (1 - √(δ - x₂))/(1 - √δ) · exp(x₁ + √(δ - x₂) - √δ)`
//! on `Ω_δ = {0 ≤ x₂ ≤ δ}` and the family `φ_{ε,q} = q v_ε`.
//!
//! The checks use the matrix `[[v₁₁ - 2v₂, v₁₂], [v₁₂, v₂₂]]`, which must be
//! negative semidefinite with zero determinant, and the obstacle `v ≥ e^{x₁}`.

use crate::error::{param, Result};

/// `q (1 - √(ε - x₂))/(1 - √ε) · exp(x₁ + √(ε - x₂) - √ε)`.
pub fn phi_eps_q(x1: f64, x2: f64, eps: f64, q: f64) -> f64 {
    let r = (eps - x2).sqrt();
    q * (1.0 - r) / (1.0 - eps.sqrt()) * (x1 + r - eps.sqrt()).exp()
}

pub fn v_delta(x1: f64, x2: f64, delta: f64) -> f64 {
    phi_eps_q(x1, x2, delta, 1.0)
}

#[derive(Debug, Clone, Copy)]
pub struct JnOptions {
    /// Points per axis.
    pub grid: usize,
    /// `x₁ ∈ [-l, l]`.
    pub l: f64,
    /// Distance kept from `x₂ = δ`, as a fraction of `δ`.
    pub clip: f64,
    /// Finite-difference step relative to the point scale.
    pub fd_step: f64,
    /// Eigenvalue tolerance.
    pub tol: f64,
}

impl Default for JnOptions {
    fn default() -> Self {
        Self { grid: 200, l: 1.0, clip: 1e-3, fd_step: 1e-4, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JnReport {
    pub points: usize,
    /// Largest eigenvalue over the grid, divided by `max(1, ‖M‖)`.
    pub max_eigenvalue: f64,
    /// `max |det M| / (|M₁₁ M₂₂| + M₁₂²)`.
    pub max_relative_det: f64,
    /// `min (v - e^{x₁})`.
    pub min_obstacle_gap: f64,
    /// `max |v(x₁, 0) - e^{x₁}|`.
    pub boundary_error: f64,
    pub warnings: Vec<String>,
}

impl JnReport {
    pub fn passes(&self, tol: f64, det_tol: f64) -> bool {
        self.max_eigenvalue <= tol && self.max_relative_det <= det_tol && self.min_obstacle_gap >= -1e-12
    }
}

/// Fourth-order finite-difference matrix `[[f₁₁ - 2f₂, f₁₂], [f₁₂, f₂₂]]`.
/// The `x₂` step shrinks near the square-root branch so the stencil never
/// reaches it.
fn drift_matrix(f: &impl Fn(f64, f64) -> f64, x1: f64, x2: f64, edge: f64, h: f64) -> [f64; 3] {
    const W1: [f64; 4] = [1.0, -8.0, 8.0, -1.0];
    const O: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
    let h1 = h * (1.0 + x1.abs());
    let h2 = h.min(5e-2 * (edge - x2));
    let d1 = |g: &dyn Fn(f64) -> f64, x: f64, h: f64| O.iter().zip(W1).map(|(o, w)| w * g(x + o * h)).sum::<f64>() / (12.0 * h);
    let d2 = |g: &dyn Fn(f64) -> f64, x: f64, h: f64| {
        (-g(x + 2.0 * h) + 16.0 * g(x + h) - 30.0 * g(x) + 16.0 * g(x - h) - g(x - 2.0 * h)) / (12.0 * h * h)
    };
    let f11 = d2(&|t| f(t, x2), x1, h1);
    let f2 = d1(&|t| f(x1, t), x2, h2);
    let f22 = d2(&|t| f(x1, t), x2, h2);
    let f12 = d1(&|t| d1(&|u| f(t, u), x2, h2), x1, h1);
    [f11 - 2.0 * f2, f12, f22]
}

fn scan(f: impl Fn(f64, f64) -> f64, edge: f64, opts: &JnOptions, rep: &mut JnReport) {
    let n = opts.grid.max(2);
    let top = edge * (1.0 - opts.clip);
    for i in 0..n {
        let x1 = -opts.l + 2.0 * opts.l * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let x2 = top * j as f64 / (n - 1) as f64;
            // the stencil may dip below x₂ = 0, where the formula is still smooth
            let [a, b, c] = drift_matrix(&f, x1, x2, edge, opts.fd_step);
            let tr = a + c;
            let det = a * c - b * b;
            let disc = ((a - c).powi(2) + 4.0 * b * b).sqrt();
            let lmax = 0.5 * (tr + disc);
            let scale = a.abs().max(b.abs()).max(c.abs()).max(1.0);
            rep.max_eigenvalue = rep.max_eigenvalue.max(lmax / scale);
            rep.max_relative_det = rep.max_relative_det.max(det.abs() / (a * c).abs().max(b * b).max(f64::MIN_POSITIVE));
            rep.points += 1;
        }
    }
}

/// Checks `v_δ` and, for each `(ε, q)` in `family`, `φ_{ε,q}` on its own
/// domain `0 ≤ x₂ ≤ ε(1 - clip)`.
pub fn jn_bellman_check(delta: f64, opts: JnOptions, family: &[(f64, f64)]) -> Result<JnReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(param("delta", "need 0 < δ < 1"));
    }
    if !(opts.clip > 0.0) {
        return Err(param("clip", "the grid must stay away from x₂ = δ"));
    }
    let mut rep = JnReport {
        points: 0,
        max_eigenvalue: f64::NEG_INFINITY,
        max_relative_det: 0.0,
        min_obstacle_gap: f64::INFINITY,
        boundary_error: 0.0,
        warnings: vec![format!("grid clipped at x₂ = δ(1 - {}) to avoid the square-root branch", opts.clip)],
    };
    scan(|a, b| v_delta(a, b, delta), delta, &opts, &mut rep);
    let n = opts.grid.max(2);
    for i in 0..n {
        let x1 = -opts.l + 2.0 * opts.l * i as f64 / (n - 1) as f64;
        rep.boundary_error = rep.boundary_error.max((v_delta(x1, 0.0, delta) - x1.exp()).abs() / x1.exp());
        for j in 0..n {
            let x2 = delta * (1.0 - opts.clip) * j as f64 / (n - 1) as f64;
            rep.min_obstacle_gap = rep.min_obstacle_gap.min(v_delta(x1, x2, delta) - x1.exp());
        }
    }
    for &(eps, q) in family {
        if !(eps >= delta && eps < 1.0 && q >= 1.0) {
            return Err(param("family", format!("need δ ≤ ε < 1 and q ≥ 1, got ({eps}, {q})")));
        }
        scan(|a, b| phi_eps_q(a, b, eps, q), eps, &opts, &mut rep);
    }
    Ok(rep)
}
