//! Explicit Bellman candidates and the checks that certify their size and
//! concavity properties.
//!
//! Normalization: [`BurkholderVariant::Phi`] always carries the factor
//! `γ_p = p(1 - 1/p*)^{p-1}`. The Hessian-form identities in
//! [`burkholder::hessian_form_identity`] are stated for the unnormalized
//! function `(y - (p*-1)x)(x + y)^{p-1}` and say so.

pub mod burkholder;
pub mod constants;
pub mod feasibility;
pub mod jn;
pub mod power;

use std::fmt;
use std::sync::Arc;

use rand::RngExt;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::rng;

pub use burkholder::{eval_phi, gamma_p, hessian_form_identity, majorant_check, BurkholderVariant};
pub use constants::{interpolation_constant, interpolation_sweep, tau, tau_closed_form};
pub use feasibility::{h_section_inequality, linear_majorant_feasibility, locate_transition, Feasibility};
pub use jn::{jn_bellman_check, JnOptions, JnReport};
pub use power::bq_hessian_check;

type Eval = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type Hess = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;
type Domain = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A scalar function of a few real variables with an optional analytic
/// Hessian and a domain predicate.
#[derive(Clone)]
pub struct BellmanCandidate {
    pub name: String,
    pub arity: usize,
    eval: Eval,
    hessian: Option<Hess>,
    domain: Domain,
}

impl fmt::Debug for BellmanCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BellmanCandidate")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

impl BellmanCandidate {
    pub fn new(name: impl Into<String>, arity: usize, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), arity, eval: Arc::new(eval), hessian: None, domain: Arc::new(|_| true) }
    }

    pub fn with_hessian(mut self, h: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn with_domain(mut self, d: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Arc::new(d);
        self
    }

    /// Burkholder's function on the whole plane (through `|x|`, `|y|`).
    pub fn burkholder(variant: BurkholderVariant, p: f64) -> Result<Self> {
        eval_phi(0.0, 1.0, p, variant)?;
        let c = Self::new(format!("{variant}(p={p})"), 2, move |v| {
            burkholder::eval_unchecked(v[0].abs(), v[1].abs(), p, variant)
        });
        Ok(match variant {
            BurkholderVariant::Fp => c.with_domain(|v| v[0] >= 0.0 && v[1] >= 0.0),
            _ => c,
        })
    }

    /// `a x + b y + c`.
    pub fn affine(a: f64, b: f64, c: f64) -> Self {
        Self::new("affine", 2, move |v| a * v[0] + b * v[1] + c).with_hessian(|_| vec![vec![0.0; 2]; 2])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.arity && (self.domain)(x)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("{} at {x:?}", self.name)));
        }
        Ok((self.eval)(x))
    }

    pub fn analytic_hessian(&self, x: &[f64]) -> Option<Vec<Vec<f64>>> {
        self.hessian.as_ref().map(|h| h(x))
    }

    /// Centered second difference `d²φ(x)[d, d]` with step `h`.
    pub fn fd_form(&self, x: &[f64], d: &[f64], h: f64) -> f64 {
        let shift = |s: f64| x.iter().zip(d).map(|(a, b)| a + s * b).collect::<Vec<_>>();
        ((self.eval)(&shift(h)) - 2.0 * (self.eval)(x) + (self.eval)(&shift(-h))) / (h * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diagonal {
    /// `(x ± α, y ± α)`
    Unison,
    /// `(x ± α, y ∓ α)`
    Antiunison,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZigzagReport {
    pub samples: usize,
    /// Minimum of `φ(x,y) - (φ(P+) + φ(P-))/2` over all samples and both diagonals.
    pub worst_margin: f64,
    /// Minimum of the same expression divided by `max(1, |φ|)` over the three points.
    pub worst_relative: f64,
    pub witness: [f64; 2],
    pub alpha: f64,
    pub direction: Diagonal,
}

struct Sample {
    raw: f64,
    at: [f64; 2],
    alpha: f64,
    dir: Diagonal,
}

/// Midpoint concavity along both diagonals at random centers in
/// `[-half, half]²` with steps `|α| ≤ step`. Centers keep a distance of
/// `1e-6 · half` from the axes.
pub fn zigzag_check(c: &BellmanCandidate, samples: usize, half: f64, step: f64, seed: u64) -> Result<ZigzagReport> {
    if c.arity != 2 {
        return Err(param("candidate", "zigzag concavity needs arity 2"));
    }
    if !(half > 0.0 && step > 0.0) {
        return Err(param("step", "box and step must be positive"));
    }
    const SHARD: usize = 4096;
    let shards = samples.div_ceil(SHARD);
    let guard = 1e-6 * half;
    let quadrant = !c.contains(&[-half, -half]);
    let lo = if quadrant { guard } else { -half };
    let per_shard: Vec<(Option<Sample>, f64)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut r = rng::stream(seed, s as u64);
            let n = SHARD.min(samples - s * SHARD);
            let mut best: Option<Sample> = None;
            let mut rel_min = f64::INFINITY;
            for _ in 0..n {
                let mut pt = [0.0; 2];
                for v in &mut pt {
                    loop {
                        *v = lo + (half - lo) * r.random::<f64>();
                        if v.abs() >= guard {
                            break;
                        }
                    }
                }
                let mut alpha = step * (1.0 - r.random::<f64>());
                if quadrant {
                    alpha = alpha.min(pt[0].min(pt[1]));
                }
                let f0 = (c.eval)(&pt);
                for dir in [Diagonal::Unison, Diagonal::Antiunison] {
                    let sy = if dir == Diagonal::Unison { 1.0 } else { -1.0 };
                    let fp = (c.eval)(&[pt[0] + alpha, pt[1] + sy * alpha]);
                    let fm = (c.eval)(&[pt[0] - alpha, pt[1] - sy * alpha]);
                    let raw = f0 - 0.5 * (fp + fm);
                    let scale = f0.abs().max(fp.abs()).max(fm.abs()).max(1.0);
                    rel_min = rel_min.min(raw / scale);
                    if best.as_ref().is_none_or(|b| raw < b.raw) {
                        best = Some(Sample { raw, at: pt, alpha, dir });
                    }
                }
            }
            (best, rel_min)
        })
        .collect();
    let mut worst_rel = f64::INFINITY;
    let mut best: Option<Sample> = None;
    for (s, rel) in per_shard {
        worst_rel = worst_rel.min(rel);
        if let Some(s) = s {
            if best.as_ref().is_none_or(|b| s.raw < b.raw) {
                best = Some(s);
            }
        }
    }
    let b = best.ok_or_else(|| param("samples", "need at least one sample"))?;
    Ok(ZigzagReport {
        samples,
        worst_margin: b.raw,
        worst_relative: worst_rel,
        witness: b.at,
        alpha: b.alpha,
        direction: b.dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_functions_have_zero_margin() {
        let r = zigzag_check(&BellmanCandidate::affine(1.3, -0.7, 2.0), 20_000, 5.0, 5.0, 1).unwrap();
        assert!(r.worst_margin.abs() < 1e-13, "{r:?}");
    }

    #[test]
    fn convex_function_is_caught() {
        let c = BellmanCandidate::new("x²+y²", 2, |v| v[0] * v[0] + v[1] * v[1]);
        let r = zigzag_check(&c, 1000, 5.0, 1.0, 2).unwrap();
        assert!(r.worst_margin < -1e-3);
    }

    #[test]
    fn burkholder_is_zigzag_concave_at_p3() {
        let c = BellmanCandidate::burkholder(BurkholderVariant::Phi, 3.0).unwrap();
        let r = zigzag_check(&c, 100_000, 5.0, 5.0, 3).unwrap();
        assert!(r.worst_relative >= -1e-9, "{r:?}");
    }

    #[test]
    fn fp_checks_stay_in_the_quadrant() {
        let c = BellmanCandidate::burkholder(BurkholderVariant::Fp, 3.0).unwrap();
        assert!(c.eval(&[-1.0, 1.0]).is_err());
        let r = zigzag_check(&c, 10_000, 2.0, 1.0, 4).unwrap();
        assert!(r.worst_relative >= -1e-9, "{r:?}");
    }

    #[test]
    fn arity_is_enforced() {
        let c = BellmanCandidate::new("t", 3, |v| v[0]);
        assert!(zigzag_check(&c, 10, 1.0, 1.0, 0).is_err());
    }
}
