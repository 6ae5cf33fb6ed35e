//! Monte-Carlo Itô calculus on keyed Brownian paths.
//!
//! Every path is generated from its own stream `(seed, path index)`, so a
//! run is reproducible regardless of how the paths are split across
//! threads. Heat extensions follow `∂_t - ½Δ` (variance `t` per axis),
//! which is `planar::heat_extension` at time `2t`.

mod heat;
mod martingale;

pub use heat::{Affine, Bump, GaussianMixture, HeatSurface, HermiteSurface};
pub use martingale::{
    ab_by_conditioning, ab_star, heat_martingale, subordination_constants_mc, terminal_gap_sweep, Agreement, BinCell,
    BinGrid, BinnedEstimate, ConstantsOptions, ConstantsReport, GapSweep, MartingalePath, RatioEstimate, Transform,
};

use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::rng;
use crate::stats::{Estimate, Moments};

/// Paths per parallel work item.
pub(crate) const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeGrid {
    /// `t_i = iT/n`.
    Uniform,
    /// `t_i = T(1 - (1 - i/n)²)`: steps shrink linearly toward `T`, where
    /// heat-martingale integrands vary fastest.
    Graded,
}

/// `dim`-dimensional Brownian motion on `[0, T]` sampled on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianDriver {
    dim: usize,
    horizon: f64,
    seed: u64,
    grid: TimeGrid,
    times: Vec<f64>,
}

impl BrownianDriver {
    pub fn new(dim: usize, horizon: f64, steps: usize, seed: u64) -> Result<Self> {
        Self::with_grid(dim, horizon, steps, seed, TimeGrid::Uniform)
    }

    pub fn with_grid(dim: usize, horizon: f64, steps: usize, seed: u64, grid: TimeGrid) -> Result<Self> {
        if dim == 0 {
            return Err(param("dim", "need dimension ≥ 1"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(param("T", "need a finite horizon T > 0"));
        }
        if steps == 0 {
            return Err(param("steps", "need at least one step"));
        }
        let n = steps as f64;
        let times = (0..=steps)
            .map(|i| match grid {
                TimeGrid::Uniform => horizon * i as f64 / n,
                TimeGrid::Graded => horizon * (1.0 - (1.0 - i as f64 / n).powi(2)),
            })
            .collect();
        Ok(Self { dim, horizon, seed, grid, times })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Largest step.
    pub fn dt(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Same grid and seed, other horizon.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::with_grid(self.dim, horizon, self.steps(), self.seed, self.grid)
    }

    /// Increments of path `index`, step-major: `inc[i * dim + k]`.
    pub(crate) fn fill_increments(&self, index: u64, inc: &mut Vec<f64>) {
        let mut r = rng::stream(self.seed, index);
        inc.clear();
        for w in self.times.windows(2) {
            let s = (w[1] - w[0]).sqrt();
            for _ in 0..self.dim {
                inc.push(s * r.sample::<f64, _>(StandardNormal));
            }
        }
    }

    pub fn path(&self, index: u64) -> BrownianPath<'_> {
        let mut inc = Vec::with_capacity(self.steps() * self.dim);
        self.fill_increments(index, &mut inc);
        let mut pos = vec![0.0; (self.steps() + 1) * self.dim];
        for i in 0..self.steps() {
            for k in 0..self.dim {
                pos[(i + 1) * self.dim + k] = pos[i * self.dim + k] + inc[i * self.dim + k];
            }
        }
        BrownianPath { driver: self, positions: pos }
    }
}

/// One sampled path; positions `W(t_i)` with `W(0) = 0`.
#[derive(Debug, Clone)]
pub struct BrownianPath<'a> {
    driver: &'a BrownianDriver,
    positions: Vec<f64>,
}

impl<'a> BrownianPath<'a> {
    pub fn times(&self) -> &[f64] {
        &self.driver.times
    }

    pub fn position(&self, i: usize) -> &[f64] {
        let d = self.driver.dim;
        &self.positions[i * d..(i + 1) * d]
    }

    pub fn increment(&self, i: usize) -> Vec<f64> {
        let (a, b) = (self.position(i), self.position(i + 1));
        b.iter().zip(a).map(|(b, a)| b - a).collect()
    }

    /// View of the path as seen at step `step`.
    pub fn past(&self, step: usize) -> Past<'_> {
        Past { path: self, step }
    }

    /// Every `factor`-th point of a uniform path, which is a path of the
    /// coarser grid driven by the same Brownian motion.
    pub fn coarsened(&self, factor: usize) -> Result<Vec<[f64; 2]>> {
        if self.driver.grid != TimeGrid::Uniform || factor == 0 || !self.driver.steps().is_multiple_of(factor) || self.driver.dim != 2 {
            return Err(param("factor", "need a planar uniform path whose step count the factor divides"));
        }
        Ok((0..=self.driver.steps() / factor).map(|i| {
            let p = self.position(i * factor);
            [p[0], p[1]]
        })
        .collect())
    }
}

/// The part of a path up to the current step. Asking for a later index is
/// an adaptedness violation.
#[derive(Debug, Clone, Copy)]
pub struct Past<'a> {
    path: &'a BrownianPath<'a>,
    step: usize,
}

impl Past<'_> {
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.path.times()[self.step]
    }

    /// `W(t_i)` for `i ≤ step`.
    pub fn w(&self, i: usize) -> Result<&[f64]> {
        if i > self.step {
            return Err(Error::Adaptedness { requested: i, current: self.step });
        }
        Ok(self.path.position(i))
    }

    /// `W(t_step)`.
    pub fn now(&self) -> &[f64] {
        self.path.position(self.step)
    }
}

/// An adapted integrand: its value at `t_i` may read the path up to `t_i`.
pub type Integrand<'f> = &'f (dyn Fn(&Past) -> Result<f64> + Sync);

/// Samples of `∫_a^b f_k dw` (first coordinate of the driver) for a family
/// of integrands, with the pathwise `∫_a^b f_k f_l dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItoSamples {
    pub integrals: Vec<Vec<f64>>,
    /// Upper triangle, row-major over `k ≤ l`.
    pub cross: Vec<Vec<f64>>,
}

impl ItoSamples {
    pub fn count(&self) -> usize {
        self.integrals.first().map_or(0, Vec::len)
    }

    fn pair(&self, k: usize, l: usize) -> usize {
        let m = self.integrals.len();
        let (k, l) = (k.min(l), k.max(l));
        k * m - k * (k + 1) / 2 + l
    }

    pub fn mean(&self, k: usize) -> Estimate {
        Moments::from_slice(&self.integrals[k]).estimate()
    }

    /// `E ∫f_k f_l dt`.
    pub fn energy(&self, k: usize, l: usize) -> Estimate {
        Moments::from_slice(&self.cross[self.pair(k, l)]).estimate()
    }

    /// `E ∫f_k dw ∫f_l dw`.
    pub fn product(&self, k: usize, l: usize) -> Estimate {
        let v: Vec<f64> = self.integrals[k].iter().zip(&self.integrals[l]).map(|(a, b)| a * b).collect();
        Moments::from_slice(&v).estimate()
    }

    /// Paired estimate of `∫f_k dw ∫f_l dw - ∫f_k f_l dt`, whose mean is 0
    /// by the isometry (`k = l`) or the product identity.
    pub fn isometry_gap(&self, k: usize, l: usize) -> Estimate {
        let c = &self.cross[self.pair(k, l)];
        let v: Vec<f64> = (0..self.count()).map(|i| self.integrals[k][i] * self.integrals[l][i] - c[i]).collect();
        Moments::from_slice(&v).estimate()
    }
}

fn grid_index(times: &[f64], t: f64) -> Result<usize> {
    let tol = 1e-9 * times[times.len() - 1];
    times
        .iter()
        .position(|&s| (s - t).abs() <= tol)
        .ok_or_else(|| param("interval", format!("{t} is not a grid time")))
}

/// `Σ_i f_k(t_i) (w(t_{i+1}) - w(t_i))` over the grid times in `[a, b]`.
pub fn ito_integrals(driver: &BrownianDriver, paths: usize, a: f64, b: f64, fs: &[Integrand]) -> Result<ItoSamples> {
    if !(a <= b) {
        return Err(param("interval", "need a ≤ b"));
    }
    if fs.is_empty() {
        return Err(param("integrands", "need at least one integrand"));
    }
    let (ia, ib) = (grid_index(driver.times(), a)?, grid_index(driver.times(), b)?);
    let m = fs.len();
    let per_path = |index: usize| -> Result<(Vec<f64>, Vec<f64>)> {
        let path = driver.path(index as u64);
        let mut ints = vec![0.0; m];
        let mut cross = vec![0.0; m * (m + 1) / 2];
        let mut vals = vec![0.0; m];
        for i in ia..ib {
            let past = path.past(i);
            for (v, f) in vals.iter_mut().zip(fs) {
                *v = f(&past)?;
            }
            let dw = path.position(i + 1)[0] - path.position(i)[0];
            let dt = path.times()[i + 1] - path.times()[i];
            let mut c = 0;
            for k in 0..m {
                ints[k] += vals[k] * dw;
                for l in k..m {
                    cross[c] += vals[k] * vals[l] * dt;
                    c += 1;
                }
            }
        }
        Ok((ints, cross))
    };
    let rows = (0..paths).into_par_iter().map(per_path).collect::<Result<Vec<_>>>()?;
    let mut out = ItoSamples { integrals: vec![Vec::with_capacity(paths); m], cross: vec![Vec::with_capacity(paths); m * (m + 1) / 2] };
    for (ints, cross) in rows {
        for (dst, v) in out.integrals.iter_mut().zip(ints) {
            dst.push(v);
        }
        for (dst, v) in out.cross.iter_mut().zip(cross) {
            dst.push(v);
        }
    }
    Ok(out)
}

pub fn ito_integral(driver: &BrownianDriver, paths: usize, a: f64, b: f64, f: Integrand) -> Result<ItoSamples> {
    ito_integrals(driver, paths, a, b, &[f])
}

/// Monte-Carlo summary of the left- and right-endpoint sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannGap {
    /// `Σ w(t_{i-1}) Δw_i`, mean 0.
    pub sigma1: Estimate,
    /// `Σ w(t_i) Δw_i`, mean `b - a`.
    pub sigma2: Estimate,
    /// Paired `Σ₂ - Σ₁ = Σ (Δw_i)²`.
    pub gap: Estimate,
    pub sigma1_sq: Estimate,
    /// `Σ t_{i-1} Δt = E Σ₁²`.
    pub sigma1_sq_exact: f64,
    /// `b(b - a)`.
    pub bound: f64,
}

/// Both sums on the uniform partition of `[a, b]` into `steps` pieces;
/// `w(a) ~ N(0, a)` starts each path.
pub fn riemann_gap_demo(a: f64, b: f64, steps: usize, paths: usize, seed: u64) -> Result<RiemannGap> {
    if !(a >= 0.0 && a <= b && b.is_finite()) {
        return Err(param("interval", "need 0 ≤ a ≤ b < ∞"));
    }
    if steps == 0 || paths == 0 {
        return Err(param("steps", "need at least one step and one path"));
    }
    let dt = (b - a) / steps as f64;
    let chunk = |c: usize| {
        let mut acc = [Moments::default(); 4];
        for index in c * CHUNK..((c + 1) * CHUNK).min(paths) {
            let mut r = rng::stream(seed, index as u64);
            let mut w = a.sqrt() * r.sample::<f64, _>(StandardNormal);
            let (mut s1, mut s2) = (0.0, 0.0);
            if b > a {
                for _ in 0..steps {
                    let dw = dt.sqrt() * r.sample::<f64, _>(StandardNormal);
                    s1 += w * dw;
                    w += dw;
                    s2 += w * dw;
                }
            }
            for (m, v) in acc.iter_mut().zip([s1, s2, s2 - s1, s1 * s1]) {
                m.push(v);
            }
        }
        acc
    };
    let parts: Vec<[Moments; 4]> = (0..paths.div_ceil(CHUNK)).into_par_iter().map(chunk).collect();
    let acc = parts.into_iter().fold([Moments::default(); 4], |a, b| [0, 1, 2, 3].map(|k| a[k].merge(b[k])));
    let exact = if b > a { (0..steps).map(|i| (a + i as f64 * dt) * dt).sum() } else { 0.0 };
    Ok(RiemannGap {
        sigma1: acc[0].estimate(),
        sigma2: acc[1].estimate(),
        gap: acc[2].estimate(),
        sigma1_sq: acc[3].estimate(),
        sigma1_sq_exact: exact,
        bound: b * (b - a),
    })
}
