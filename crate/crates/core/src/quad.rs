//! Quadrature rules shared by the modules.
//!
//! Node generation comes from `gauss-quad`; the adaptive rule is the
//! tanh-sinh integrator of the `quadrature` crate.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct Legendre {
    pairs: Vec<(f64, f64)>,
}

impl Legendre {
    pub fn new(n: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
        Self { pairs: rule.as_node_weight_pairs().to_vec() }
    }

    /// Shared 24-point rule.
    pub fn standard() -> &'static Legendre {
        static RULE: OnceLock<Legendre> = OnceLock::new();
        RULE.get_or_init(|| Legendre::new(24))
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        h * self.pairs.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
    }

    /// Composite rule on `panels` equal subintervals.
    pub fn composite(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

/// Nodes `z` and weights `w` with `sum w g(z) ≈ E g(Z)`, `Z ~ N(0,1)`.
pub fn normal_rule(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussHermite::new(NonZeroUsize::new(n.max(1)).unwrap());
    let s = std::f64::consts::PI.sqrt();
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (std::f64::consts::SQRT_2 * x, w / s))
        .collect()
}

/// Adaptive tanh-sinh quadrature; returns `(integral, error estimate)`.
pub fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let out = quadrature::double_exponential::integrate(f, a, b, tol);
    (out.integral, out.error_estimate)
}
