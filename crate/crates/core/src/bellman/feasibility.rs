//! Homogeneous zigzag-concave majorants restricted to the section
//! `x + y = 1` (coordinates `x = (1-s)/2`, `y = (1+s)/2`).
//!
//! A majorant that is linear on the section is `g(s) = a((1+s)/2 - ρ(1-s)/2)`.
//! It must dominate `H_c(s) = ((1+s)/2)^p - c^p((1-s)/2)^p` on `[-1,1]` and
//! satisfy `2s g'(s) - p g(s) ≥ 0` at `s = ±1`. The score of `(ρ, a)` is the
//! smallest slack among all these constraints, so a pair is feasible exactly
//! when its score is nonnegative.

use rayon::prelude::*;

use super::burkholder::gamma_p;
use crate::error::{param, Result};
use crate::p_star;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feasibility {
    Feasible { rho: f64, a: f64, score: f64 },
    Infeasible { best_score: f64, rho: f64, a: f64 },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchGrid {
    /// Points in `ρ ∈ [0, 4p*]`.
    pub rho: usize,
    /// Points on `[-1, 1]` where domination is tested.
    pub s: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self { rho: 2000, s: 2001 }
    }
}

struct Problem {
    c: f64,
    p: f64,
    s: Vec<f64>,
    h: Vec<f64>,
    a_max: f64,
    tol: f64,
}

impl Problem {
    fn new(c: f64, p: f64, grid: SearchGrid) -> Self {
        let n = grid.s.max(3);
        let mut s: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        if c > 0.0 {
            s.push((c - 1.0) / (c + 1.0));
        }
        let h = s.iter().map(|&s| h_c(s, c, p)).collect();
        let g = gamma_p(p);
        Self { c, p, s, h, a_max: 4.0 * g, tol: 1e-8 * (1.0 + g) }
    }

    fn score(&self, rho: f64, a: f64) -> f64 {
        let g = |s: f64| a * ((1.0 + s) / 2.0 - rho * (1.0 - s) / 2.0);
        let dg = a * (1.0 + rho) / 2.0;
        let conv_right = 2.0 * dg - self.p * g(1.0);
        let conv_left = -2.0 * dg - self.p * g(-1.0);
        let dom = self.s.iter().zip(&self.h).map(|(&s, &h)| g(s) - h).fold(f64::INFINITY, f64::min);
        // extra points clustered around the sign change of g, where a
        // grid would blur the tangency
        let s0 = (rho - 1.0) / (rho + 1.0);
        let near = (2..=8)
            .flat_map(|k| [s0 - 10f64.powi(-k), s0 + 10f64.powi(-k)])
            .filter(|s| s.abs() <= 1.0)
            .map(|s| g(s) - h_c(s, self.c, self.p))
            .fold(f64::INFINITY, f64::min);
        dom.min(near).min(conv_right).min(conv_left)
    }

    /// Best `a` for fixed `ρ`; the score is concave in `a`.
    fn best_a(&self, rho: f64) -> (f64, f64) {
        let (a, v) = golden_max(|a| self.score(rho, a), 0.0, self.a_max, 80);
        (v, a)
    }
}

/// `H_c(s) = ((1+s)/2)^p - c^p ((1-s)/2)^p`.
pub fn h_c(s: f64, c: f64, p: f64) -> f64 {
    ((1.0 + s) / 2.0).powf(p) - (c * (1.0 - s) / 2.0).powf(p)
}

/// Golden-section maximization; returns `(argmax, max)`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Search `(ρ, a)` for a linear majorant of `H_c`; `ρ` on a grid refined by
/// golden section around the best cell, `a` by golden section (the score
/// is concave in `a`).
pub fn linear_majorant_feasibility(c: f64, p: f64, grid: SearchGrid) -> Result<Feasibility> {
    if !(c >= 0.0) {
        return Err(param("c", "need c ≥ 0"));
    }
    if !(p > 1.0) {
        return Err(param("p", "need p > 1"));
    }
    let prob = Problem::new(c, p, grid);
    let rho_max = 4.0 * p_star(p);
    let n = grid.rho.max(3);
    let d = rho_max / (n - 1) as f64;
    let scores: Vec<(f64, f64)> = (0..n).into_par_iter().map(|i| prob.best_a(i as f64 * d)).collect();
    let best = (0..n).max_by(|&i, &j| scores[i].0.total_cmp(&scores[j].0)).unwrap();
    let lo = (best as f64 - 1.0).max(0.0) * d;
    let hi = ((best + 1) as f64 * d).min(rho_max);
    let (rho, score) = golden_max(|r| prob.best_a(r).0, lo, hi, 100);
    let (score, rho, a) = if score >= scores[best].0 {
        (score, rho, prob.best_a(rho).1)
    } else {
        (scores[best].0, best as f64 * d, scores[best].1)
    };
    Ok(if score >= -prob.tol {
        Feasibility::Feasible { rho, a, score }
    } else {
        Feasibility::Infeasible { best_score: score, rho, a }
    })
}

/// Bisection on `c` between an infeasible `lo` and a feasible `hi`.
pub fn locate_transition(p: f64, mut lo: f64, mut hi: f64, tol: f64, grid: SearchGrid) -> Result<f64> {
    if linear_majorant_feasibility(lo, p, grid)?.is_feasible() || !linear_majorant_feasibility(hi, p, grid)?.is_feasible() {
        return Err(param("bracket", format!("[{lo}, {hi}] does not bracket the transition")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if linear_majorant_feasibility(mid, p, grid)?.is_feasible() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionReport {
    /// `max (s² H'' + (p-1)(-2s H' + p H))` over the grid.
    pub worst: f64,
    pub at: f64,
    pub s_p: f64,
}

/// The expression `s² H''(s) + (p-1)(-2s H'(s) + p H(s))` for
/// `H = H_{p*-1}` on `[-1 + eps, s_p]`, `s_p = (p*-2)/p*`.
pub fn h_section_inequality(p: f64, grid: usize, eps: f64) -> Result<SectionReport> {
    if !(p >= 2.0) {
        return Err(param("p", "need p ≥ 2"));
    }
    let ps = p_star(p);
    let c = ps - 1.0;
    let cp = c.powf(p);
    let s_p = (ps - 2.0) / ps;
    let expr = |s: f64| {
        let (u, v) = ((1.0 + s) / 2.0, (1.0 - s) / 2.0);
        let h = u.powf(p) - cp * v.powf(p);
        let h1 = p / 2.0 * (u.powf(p - 1.0) + cp * v.powf(p - 1.0));
        let h2 = p * (p - 1.0) / 4.0 * (u.powf(p - 2.0) - cp * v.powf(p - 2.0));
        s * s * h2 + (p - 1.0) * (-2.0 * s * h1 + p * h)
    };
    let n = grid.max(2);
    let lo = -1.0 + eps;
    let mut rep = SectionReport { worst: f64::NEG_INFINITY, at: lo, s_p };
    for i in 0..n {
        let s = lo + (s_p - lo) * i as f64 / (n - 1) as f64;
        let e = expr(s);
        if e > rep.worst {
            rep.worst = e;
            rep.at = s;
        }
    }
    Ok(rep)
}
