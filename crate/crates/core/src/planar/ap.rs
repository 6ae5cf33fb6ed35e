//! Classical and heat `A_p` characteristics of a weight on the torus.

use rayon::prelude::*;

use super::{heat_extension, GridField};
use crate::error::{param, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlanarWeight {
    field: GridField,
}

impl PlanarWeight {
    /// Needs real, strictly positive samples.
    pub fn new(field: GridField) -> Result<Self> {
        if !field.is_real(0.0) || field.values().iter().any(|v| !(v.re > 0.0 && v.re.is_finite())) {
            return Err(param("w", "weight samples must be real, finite and > 0"));
        }
        Ok(Self { field })
    }

    pub fn constant(n: usize, l: f64, c: f64) -> Result<Self> {
        Self::new(GridField::from_real_fn(n, l, |_, _| c)?)
    }

    /// `|z|^a` with `|z|` the distance to the origin on the torus, floored
    /// at half a grid cell.
    pub fn power(n: usize, l: f64, a: f64) -> Result<Self> {
        let floor = 0.5 * l / n as f64;
        Self::new(GridField::from_real_fn(n, l, |x, y| x.hypot(y).max(floor).powf(a))?)
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.field.map(|v| v * c))
    }

    fn dual(&self, p: f64) -> Vec<f64> {
        let e = -1.0 / (p - 1.0);
        self.field.values().iter().map(|v| v.re.powf(e)).collect()
    }
}

/// Discs centred on every `stride`-th grid point with the given radii.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscSampling {
    pub stride: usize,
    pub radii: Vec<f64>,
}

impl DiscSampling {
    /// Stride `N/32`, radii `L/4, L/8, …` down to two grid cells.
    pub fn dyadic(n: usize, l: f64) -> Self {
        let dx = l / n as f64;
        let mut radii = Vec::new();
        let mut r = 0.25 * l;
        while r >= 2.0 * dx {
            radii.push(r);
            r *= 0.5;
        }
        Self { stride: (n / 32).max(1), radii }
    }
}

/// Centres on every `stride`-th grid point, heat times `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatSampling {
    pub stride: usize,
    pub times: Vec<f64>,
}

impl HeatSampling {
    /// Stride `N/32`, times `(L/N)² 4^k` up to `2(L/4)²`.
    pub fn dyadic(n: usize, l: f64) -> Self {
        let dx = l / n as f64;
        let mut times = Vec::new();
        let mut t = dx * dx;
        while t <= 2.0 * (0.25 * l).powi(2) {
            times.push(t);
            t *= 4.0;
        }
        Self { stride: (n / 32).max(1), times }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApValue {
    pub value: f64,
    pub center: [f64; 2],
    /// Radius of the extremal disc, or the extremal heat time.
    pub scale: f64,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(param("p", "need p > 1"));
    }
    Ok(())
}

fn centers(n: usize, stride: usize) -> Vec<(usize, usize)> {
    let s = stride.max(1);
    (0..n).step_by(s).flat_map(|j| (0..n).step_by(s).map(move |i| (i, j))).collect()
}

fn pick(a: ApValue, b: ApValue) -> ApValue {
    if b.value > a.value {
        b
    } else {
        a
    }
}

const NONE: ApValue = ApValue { value: f64::NEG_INFINITY, center: [0.0; 2], scale: 0.0 };

/// `sup_B ⟨w⟩_B ⟨w^{-1/(p-1)}⟩_B^{p-1}` over the sampled discs; averages are
/// plain means over the grid points inside each (periodized) disc.
pub fn ap_class(w: &PlanarWeight, p: f64, discs: &DiscSampling) -> Result<ApValue> {
    check_p(p)?;
    let f = w.field();
    let (n, dx) = (f.n(), f.dx());
    let sigma = w.dual(p);
    let wv: Vec<f64> = f.values().iter().map(|v| v.re).collect();
    let cs = centers(n, discs.stride);
    let mut best = NONE;
    for &r in &discs.radii {
        if !(r >= dx && r < 0.5 * f.l()) {
            return Err(param("radii", format!("disc radius {r} must lie in [L/N, L/2)")));
        }
        let m = (r / dx).floor() as i64;
        let offsets: Vec<(i64, i64)> = (-m..=m)
            .flat_map(|dj| (-m..=m).map(move |di| (di, dj)))
            .filter(|&(di, dj)| ((di * di + dj * dj) as f64) * dx * dx <= r * r)
            .collect();
        let cnt = offsets.len() as f64;
        let local = cs
            .par_iter()
            .map(|&(i, j)| {
                let (mut a, mut b) = (0.0, 0.0);
                for &(di, dj) in &offsets {
                    let ii = (i as i64 + di).rem_euclid(n as i64) as usize;
                    let jj = (j as i64 + dj).rem_euclid(n as i64) as usize;
                    a += wv[jj * n + ii];
                    b += sigma[jj * n + ii];
                }
                let v = (a / cnt) * (b / cnt).powf(p - 1.0);
                ApValue { value: v, center: [f.coord(i), f.coord(j)], scale: r }
            })
            .reduce(|| NONE, pick);
        best = pick(best, local);
    }
    if best.value == f64::NEG_INFINITY {
        return Err(param("discs", "no discs sampled"));
    }
    Ok(best)
}

/// `sup_{(x,t)} w(x,t) (w^{-1/(p-1)}(x,t))^{p-1}` over the sampled points,
/// with heat extensions for the kernel `(πt)⁻¹ exp(-|x|²/t)`.
pub fn ap_heat(w: &PlanarWeight, p: f64, nodes: &HeatSampling) -> Result<ApValue> {
    check_p(p)?;
    let f = w.field();
    let sigma = f.with_values(w.dual(p).into_iter().map(|v| v.into()).collect());
    let cs = centers(f.n(), nodes.stride);
    let mut best = NONE;
    for &t in &nodes.times {
        let a = heat_extension(f, t)?;
        let b = heat_extension(&sigma, t)?;
        for &(i, j) in &cs {
            let v = a.get(i, j).re * b.get(i, j).re.powf(p - 1.0);
            best = pick(best, ApValue { value: v, center: [f.coord(i), f.coord(j)], scale: t });
        }
    }
    if best.value == f64::NEG_INFINITY {
        return Err(param("nodes", "no heat times sampled"));
    }
    Ok(best)
}
