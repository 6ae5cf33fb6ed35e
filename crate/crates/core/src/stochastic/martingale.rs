//! Heat martingales `u^f(T - t, W_t)`, their transforms, and the
//! Monte-Carlo checks built on them.
//!
//! A planar martingale `dM = g₁ dw¹ + g₂ dw²` with complex `g_j` has rows
//! `R_j = (Re g_j, Im g_j)`. For `X` the coefficients are `∇u`; for
//! `Y = A⋆X` with `A = [[1, i], [i, -1]]` they are `(c, ic)`, `c = 2∂̄u`.

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::erf::erf;
use std::f64::consts::{SQRT_2, TAU};

use super::heat::HeatSurface;
use super::{BrownianDriver, GaussianMixture, TimeGrid, CHUNK};
use crate::error::{param, Result};
use crate::planar::GridField;
use crate::quad::Legendre;
use crate::rng;
use crate::stats::Moments;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Coefficient map applied to `∇u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    /// `A∇u = (c, ic)`.
    Beurling,
    /// `2 diag(1, -1) ∇u`: subordinate to `2X` but not conformal.
    Plain,
}

impl Transform {
    #[inline]
    fn apply(self, g: [Complex64; 2]) -> [Complex64; 2] {
        match self {
            Transform::Identity => g,
            Transform::Beurling => {
                let c = g[0] + I * g[1];
                [c, I * c]
            }
            Transform::Plain => [2.0 * g[0], -2.0 * g[1]],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartingalePath {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub increments: Vec<[f64; 2]>,
    /// `rows[i] = [R₁, R₂]` on `[t_i, t_{i+1})`.
    pub rows: Vec<[[f64; 2]; 2]>,
    /// `W_T`.
    pub terminal: [f64; 2],
}

impl MartingalePath {
    pub fn terminal_value(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    /// `max_i |M(t_i) - M(0) - Σ_{j<i} (R₁ dw¹ + R₂ dw²)|`, recomputed
    /// from the stored rows.
    pub fn reconstruction_residual(&self) -> f64 {
        let mut m = self.values[0];
        let mut worst: f64 = 0.0;
        for (i, (r, dw)) in self.rows.iter().zip(&self.increments).enumerate() {
            m += Complex64::new(r[0][0] * dw[0] + r[1][0] * dw[1], r[0][1] * dw[0] + r[1][1] * dw[1]);
            worst = worst.max((m - self.values[i + 1]).norm());
        }
        worst
    }

    /// `(max |R₁·R₂|, max |‖R₁‖ - ‖R₂‖|)`.
    pub fn conformality_residual(&self) -> (f64, f64) {
        self.rows.iter().fold((0.0f64, 0.0f64), |(a, b), r| {
            let dot = r[0][0] * r[1][0] + r[0][1] * r[1][1];
            let n = r[0][0].hypot(r[0][1]) - r[1][0].hypot(r[1][1]);
            (a.max(dot.abs()), b.max(n.abs()))
        })
    }

    /// `‖R₁‖² + ‖R₂‖²` per step.
    pub fn row_energy(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().flatten().map(|v| v * v).sum()).collect()
    }

    /// `max_i (‖K‖² - factor² ‖H‖²)/max(factor² ‖H‖², 1)` with `H` the rows of
    /// `dominant`; nonpositive when this path is subordinate to
    /// `factor · dominant`.
    pub fn subordination_excess(&self, dominant: &MartingalePath, factor: f64) -> f64 {
        self.row_energy()
            .iter()
            .zip(dominant.row_energy())
            .map(|(k, h)| (k - factor * factor * h) / (factor * factor * h).max(1.0))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn planar(driver: &BrownianDriver) -> Result<()> {
    if driver.dim() != 2 {
        return Err(param("driver", "heat martingales need a planar driver"));
    }
    Ok(())
}

fn simulate(f: &dyn HeatSurface, driver: &BrownianDriver, index: u64, tr: Transform, start: Complex64) -> Result<MartingalePath> {
    planar(driver)?;
    let big_t = driver.horizon();
    let path = driver.path(index);
    let times = driver.times().to_vec();
    let n = driver.steps();
    let mut values = Vec::with_capacity(n + 1);
    let mut rows = Vec::with_capacity(n);
    let mut increments = Vec::with_capacity(n);
    let mut m = start;
    values.push(m);
    for (i, t) in times[..n].iter().enumerate() {
        let x = path.position(i);
        let dw = path.increment(i);
        let g = tr.apply(f.gradient(big_t - t, [x[0], x[1]]));
        m += g[0] * dw[0] + g[1] * dw[1];
        values.push(m);
        rows.push([[g[0].re, g[0].im], [g[1].re, g[1].im]]);
        increments.push([dw[0], dw[1]]);
    }
    let w = path.position(n);
    Ok(MartingalePath { times, values, increments, rows, terminal: [w[0], w[1]] })
}

/// `X(t) = u^f(T, 0) + Σ ∇u^f(T - t_i, W_{t_i}) · ΔW_i` on path `index`.
pub fn heat_martingale(f: &dyn HeatSurface, driver: &BrownianDriver, index: u64) -> Result<MartingalePath> {
    simulate(f, driver, index, Transform::Identity, f.value(driver.horizon(), [0.0, 0.0]))
}

/// `Y(t) = Σ ΔW_i · A∇u^f(T - t_i, W_{t_i})`, `Y(0) = 0`, on the same path
/// as `heat_martingale(f, driver, index)`.
pub fn ab_star(f: &dyn HeatSurface, driver: &BrownianDriver, index: u64) -> Result<MartingalePath> {
    simulate(f, driver, index, Transform::Beurling, Complex64::new(0.0, 0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapSweep {
    /// Coarse to fine.
    pub dts: Vec<f64>,
    /// RMS of `X(T) - f(W_T)`.
    pub rms: Vec<f64>,
    /// Least-squares slope of `log rms` against `log Δt`.
    pub order: f64,
}

/// Terminal gap of the heat martingale at `levels` dyadic step sizes, all
/// driven by the same fine Brownian paths.
pub fn terminal_gap_sweep(f: &dyn HeatSurface, horizon: f64, coarse_steps: usize, levels: u32, paths: usize, seed: u64) -> Result<GapSweep> {
    if levels < 2 {
        return Err(param("levels", "need at least two levels for a slope"));
    }
    let fine = coarse_steps << (levels - 1);
    let driver = BrownianDriver::with_grid(2, horizon, fine, seed, TimeGrid::Uniform)?;
    let dt_fine = horizon / fine as f64;
    let chunk = |c: usize| -> Result<Vec<f64>> {
        let mut sq = vec![0.0; levels as usize];
        for index in c * CHUNK..((c + 1) * CHUNK).min(paths) {
            let path = driver.path(index as u64);
            for (l, s) in sq.iter_mut().enumerate() {
                let factor = 1usize << (levels as usize - 1 - l);
                let pts = path.coarsened(factor)?;
                let dt = dt_fine * factor as f64;
                let mut x = f.value(horizon, [0.0, 0.0]);
                for (i, w) in pts.windows(2).enumerate() {
                    let g = f.gradient(horizon - i as f64 * dt, w[0]);
                    x += g[0] * (w[1][0] - w[0][0]) + g[1] * (w[1][1] - w[0][1]);
                }
                *s += (x - f.initial(pts[pts.len() - 1])).norm_sqr();
            }
        }
        Ok(sq)
    };
    let parts = (0..paths.div_ceil(CHUNK)).into_par_iter().map(chunk).collect::<Result<Vec<_>>>()?;
    let mut rms = vec![0.0; levels as usize];
    for p in parts {
        for (a, b) in rms.iter_mut().zip(p) {
            *a += b;
        }
    }
    let rms: Vec<f64> = rms.iter().map(|s| (s / paths as f64).sqrt()).collect();
    let dts: Vec<f64> = (0..levels).map(|l| dt_fine * (1u64 << (levels - 1 - l)) as f64).collect();
    let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = rms.iter().map(|r| r.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / lx.len() as f64, ly.iter().sum::<f64>() / ly.len() as f64);
    let order = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    Ok(GapSweep { dts, rms, order })
}

/// Square window `[-half_width, half_width)²` cut into `bins × bins` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinGrid {
    pub bins: usize,
    pub half_width: f64,
    /// Cells with fewer samples are flagged and left unaveraged.
    pub min_count: u64,
}

impl BinGrid {
    pub fn new(bins: usize, half_width: f64, min_count: u64) -> Result<Self> {
        if bins == 0 || !(half_width > 0.0) {
            return Err(param("bins", "need at least one bin and a positive window"));
        }
        Ok(Self { bins, half_width, min_count })
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_width / self.bins as f64
    }

    pub fn locate(&self, x: [f64; 2]) -> Option<usize> {
        let cell = |v: f64| {
            let k = ((v + self.half_width) / self.width()).floor();
            (k >= 0.0 && k < self.bins as f64).then_some(k as usize)
        };
        Some(cell(x[1])? * self.bins + cell(x[0])?)
    }

    pub fn center(&self, cell: usize) -> [f64; 2] {
        let (i, j) = (cell % self.bins, cell / self.bins);
        let c = |k: usize| -self.half_width + (k as f64 + 0.5) * self.width();
        [c(i), c(j)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinCell {
    pub count: u64,
    /// Estimate of `AB f` on the cell; `None` when underpopulated.
    pub mean: Option<Complex64>,
    /// Standard errors of the real and imaginary parts of `mean`.
    pub sem: [f64; 2],
    /// Raw `E[Y(T) | W_T ∈ cell]`.
    pub conditional: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedEstimate {
    pub grid: BinGrid,
    pub horizon: f64,
    pub paths: usize,
    pub cells: Vec<BinCell>,
    /// Paths whose `W_T` left the window.
    pub outside: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    pub populated: usize,
    pub within: usize,
    pub fraction: f64,
    /// Largest `|estimate - oracle|/sem` over both parts.
    pub worst_z: f64,
}

impl BinnedEstimate {
    pub fn populated(&self) -> usize {
        self.cells.iter().filter(|c| c.mean.is_some()).count()
    }

    /// Average of the bilinear interpolant of `field` over each cell (8×8
    /// Gauss–Legendre points); `None` for cells not inside the grid's box.
    pub fn bin_average(&self, field: &GridField) -> Vec<Option<Complex64>> {
        let rule = Legendre::new(8);
        let (n, dx) = (field.n(), field.dx());
        let x0 = field.coord(0);
        let interp = |x: f64, y: f64| {
            let (u, v) = ((x - x0) / dx, (y - x0) / dx);
            let (i, j) = (u.floor(), v.floor());
            let (a, b) = (u - i, v - j);
            let idx = |k: f64| (k as i64).rem_euclid(n as i64) as usize;
            let (i0, i1, j0, j1) = (idx(i), idx(i + 1.0), idx(j), idx(j + 1.0));
            field.get(i0, j0) * ((1.0 - a) * (1.0 - b)) + field.get(i1, j0) * (a * (1.0 - b)) + field.get(i0, j1) * ((1.0 - a) * b) + field.get(i1, j1) * (a * b)
        };
        let inside = |v: f64| v >= x0 && v <= x0 + (n - 1) as f64 * dx;
        (0..self.cells.len())
            .map(|k| {
                let c = self.grid.center(k);
                let h = 0.5 * self.grid.width();
                if !(inside(c[0] - h) && inside(c[0] + h) && inside(c[1] - h) && inside(c[1] + h)) {
                    return None;
                }
                let mut total = Complex64::new(0.0, 0.0);
                for &(s, ws) in rule.pairs() {
                    for &(t, wt) in rule.pairs() {
                        total += interp(c[0] + h * s, c[1] + h * t) * (ws * wt);
                    }
                }
                Some(total / 4.0)
            })
            .collect()
    }

    /// Populated cells where both parts lie within `z·sem + tol` of the
    /// oracle.
    pub fn agreement(&self, oracle: &[Option<Complex64>], z: f64, tol: f64) -> Agreement {
        let mut a = Agreement { populated: 0, within: 0, fraction: 0.0, worst_z: 0.0 };
        for (cell, o) in self.cells.iter().zip(oracle) {
            let (Some(m), Some(o)) = (cell.mean, o) else { continue };
            a.populated += 1;
            let d = m - o;
            let ok = d.re.abs() <= z * cell.sem[0] + tol && d.im.abs() <= z * cell.sem[1] + tol;
            a.within += ok as usize;
            let zs = (d.re.abs() / cell.sem[0].max(f64::MIN_POSITIVE)).max(d.im.abs() / cell.sem[1].max(f64::MIN_POSITIVE));
            a.worst_z = a.worst_z.max(zs);
        }
        a.fraction = if a.populated == 0 { 0.0 } else { a.within as f64 / a.populated as f64 };
        a
    }
}

/// `Y(T) = ∫ dW · A∇u^f` for each path, binned by where `W_T` lands.
///
/// The per-cell mean is `E[Y(T) | W_T ∈ cell]`. Multiplying it by
/// `2πT P(W_T ∈ cell)/|cell|` gives `2πT E[Y(T) 1_cell]/|cell|`, the
/// quantity that converges to `AB f` in the stochastic representation; its
/// finite-`T` error is much smaller than that of the raw conditional mean
/// away from the origin. The probability is the exact Gaussian mass, so the
/// estimate stays normalized by the bin count.
///
/// Guideline: `T ≳ 50 R²` for support radius `R`, and a window of a few `R`.
pub fn ab_by_conditioning(f: &dyn HeatSurface, driver: &BrownianDriver, paths: usize, grid: BinGrid) -> Result<BinnedEstimate> {
    planar(driver)?;
    let big_t = driver.horizon();
    let times = driver.times();
    let cells = grid.bins * grid.bins;
    let chunk = |c: usize| {
        let mut acc = vec![[Moments::default(); 2]; cells];
        let mut outside = 0u64;
        let mut inc = Vec::new();
        for index in c * CHUNK..((c + 1) * CHUNK).min(paths) {
            driver.fill_increments(index as u64, &mut inc);
            let mut w = [0.0f64; 2];
            let mut y = Complex64::new(0.0, 0.0);
            for (i, dw) in inc.chunks_exact(2).enumerate() {
                let g = f.gradient(big_t - times[i], w);
                y += (g[0] + I * g[1]) * Complex64::new(dw[0], dw[1]);
                w[0] += dw[0];
                w[1] += dw[1];
            }
            match grid.locate(w) {
                Some(k) => {
                    acc[k][0].push(y.re);
                    acc[k][1].push(y.im);
                }
                None => outside += 1,
            }
        }
        (acc, outside)
    };
    // merged in chunk order so the result does not depend on scheduling
    let mut acc = vec![[Moments::default(); 2]; cells];
    let mut outside = 0;
    let chunks = paths.div_ceil(CHUNK);
    for batch in (0..chunks).collect::<Vec<_>>().chunks(64) {
        let parts: Vec<_> = batch.par_iter().map(|&c| chunk(c)).collect();
        for (part, out) in parts {
            outside += out;
            for (a, b) in acc.iter_mut().zip(part) {
                a[0] = a[0].merge(b[0]);
                a[1] = a[1].merge(b[1]);
            }
        }
    }
    let sd = big_t.sqrt();
    let mass = |a: f64, b: f64| 0.5 * (erf(b / (sd * SQRT_2)) - erf(a / (sd * SQRT_2)));
    let cells = acc
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let count = m[0].count();
            if count < grid.min_count.max(2) {
                return BinCell { count, mean: None, sem: [f64::NAN; 2], conditional: None };
            }
            let c = grid.center(k);
            let h = 0.5 * grid.width();
            let weight = TAU * big_t * mass(c[0] - h, c[0] + h) * mass(c[1] - h, c[1] + h) / grid.width().powi(2);
            let cond = Complex64::new(m[0].mean(), m[1].mean());
            BinCell { count, mean: Some(cond * weight), sem: [m[0].sem() * weight, m[1].sem() * weight], conditional: Some(cond) }
        })
        .collect();
    Ok(BinnedEstimate { grid, horizon: big_t, paths, cells, outside })
}

/// `(E|M|^p / E|N|^p)^{1/p}` with a delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub sem: f64,
}

impl RatioEstimate {
    fn from_samples(num: &[f64], den: &[f64], p: f64) -> Self {
        let n = num.len() as f64;
        let (a, b) = (num.iter().sum::<f64>() / n, den.iter().sum::<f64>() / n);
        let d = Moments::from_slice(&num.iter().zip(den).map(|(x, y)| x / a - y / b).collect::<Vec<_>>());
        let ratio = (a / b).powf(1.0 / p);
        Self { ratio, sem: ratio * d.sem() / p }
    }

    /// The estimate is consistent with `ratio ≤ bound` at `z` standard errors.
    pub fn below(&self, bound: f64, z: f64) -> bool {
        self.ratio - z * self.sem <= bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsOptions {
    /// Random Gaussian-mixture test functions.
    pub functions: usize,
    pub horizon: f64,
    pub steps: usize,
}

impl Default for ConstantsOptions {
    fn default() -> Self {
        Self { functions: 8, horizon: 16.0, steps: 128 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsReport {
    pub p: f64,
    pub trials: usize,
    /// Per test function: `(plain, conformal)`.
    pub rows: Vec<(RatioEstimate, RatioEstimate)>,
    /// Row with the largest point estimate.
    pub ratio_plain: RatioEstimate,
    pub ratio_conformal: RatioEstimate,
    /// `p* - 1`.
    pub bound_plain: f64,
    /// `√(p(p-1)/2)`; the theorem behind it needs `p > 2`.
    pub bound_conformal: f64,
}

impl ConstantsReport {
    pub fn conformal_applies(&self) -> bool {
        self.p > 2.0
    }
}

/// For each random test function, `trials` paths of `X = ∫ dW·∇u` (from 0),
/// `Y = A⋆X` and the non-conformal `Z = ∫ dW·2diag(1,-1)∇u`; both `Y` and
/// `Z` are subordinate to `2X`. Reports `(E|Z|^p/E|2X|^p)^{1/p}` and
/// `(E|Y|^p/E|2X|^p)^{1/p}`. `Y(0) = 0 ≤ |2X(0)|`, so the conformal theorem's
/// starting condition holds.
pub fn subordination_constants_mc(p: f64, trials: usize, seed: u64, opts: ConstantsOptions) -> Result<ConstantsReport> {
    if !(p >= 1.0) {
        return Err(param("p", "need p ≥ 1"));
    }
    if trials < 2 || opts.functions == 0 {
        return Err(param("trials", "need at least two trials and one function"));
    }
    let mut rows = Vec::with_capacity(opts.functions);
    for k in 0..opts.functions as u64 {
        let f = GaussianMixture::random(rng::subseed(seed, 0), k);
        let driver = BrownianDriver::with_grid(2, opts.horizon, opts.steps, rng::subseed(seed, k + 1), TimeGrid::Graded)?;
        let times = driver.times();
        let samples: Vec<[f64; 3]> = (0..trials)
            .into_par_iter()
            .map_init(Vec::new, |inc, index| {
                driver.fill_increments(index as u64, inc);
                let mut w = [0.0f64; 2];
                let mut m = [Complex64::new(0.0, 0.0); 3];
                for (i, dw) in inc.chunks_exact(2).enumerate() {
                    let g = f.gradient(opts.horizon - times[i], w);
                    for (acc, tr) in m.iter_mut().zip([Transform::Identity, Transform::Beurling, Transform::Plain]) {
                        let c = tr.apply(g);
                        *acc += c[0] * dw[0] + c[1] * dw[1];
                    }
                    w[0] += dw[0];
                    w[1] += dw[1];
                }
                [(2.0 * m[0]).norm().powf(p), m[1].norm().powf(p), m[2].norm().powf(p)]
            })
            .collect();
        let col = |j: usize| samples.iter().map(|s| s[j]).collect::<Vec<f64>>();
        let den = col(0);
        rows.push((RatioEstimate::from_samples(&col(2), &den, p), RatioEstimate::from_samples(&col(1), &den, p)));
    }
    let pick = |sel: fn(&(RatioEstimate, RatioEstimate)) -> RatioEstimate| {
        rows.iter().map(sel).max_by(|a, b| a.ratio.total_cmp(&b.ratio)).unwrap()
    };
    Ok(ConstantsReport {
        p,
        trials,
        ratio_plain: pick(|r| r.0),
        ratio_conformal: pick(|r| r.1),
        rows,
        bound_plain: crate::p_star(p) - 1.0,
        bound_conformal: (p * (p - 1.0) / 2.0).sqrt(),
    })
}
