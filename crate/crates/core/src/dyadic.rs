//! Dyadic lattice on `[0,1]`: Haar analysis, martingale transforms,
//! weight characteristics, weighted Haar functions and Carleson sequences.
//!
//! Functions are step functions on the finest level, so every average is a
//! finite mean of samples. Interval `(level, index)` is
//! `[index 2^-level, (index+1) 2^-level)`; its halves are `I-` (left) and
//! `I+` (right), and the Haar function `h_I` is positive on `I+`.

use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::rng;

/// Deepest supported tree.
pub const MAX_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub level: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub const UNIT: DyadicInterval = DyadicInterval { level: 0, index: 0 };

    pub fn new(level: u32, index: u64) -> Result<Self> {
        if level > MAX_DEPTH || index >= 1u64 << level {
            return Err(param("interval", format!("({level}, {index}) is not a dyadic interval")));
        }
        Ok(Self { level, index })
    }

    pub fn len(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left(&self) -> f64 {
        self.index as f64 * self.len()
    }

    /// Left half `I-`.
    pub fn minus(&self) -> Self {
        Self { level: self.level + 1, index: 2 * self.index }
    }

    /// Right half `I+`.
    pub fn plus(&self) -> Self {
        Self { level: self.level + 1, index: 2 * self.index + 1 }
    }

    /// Range of finest-level samples covered at `depth`.
    pub fn samples(&self, depth: u32) -> std::ops::Range<usize> {
        let shift = depth - self.level;
        let lo = (self.index << shift) as usize;
        lo..lo + (1usize << shift)
    }

    /// All intervals with `level < depth`, coarse to fine.
    pub fn all_above(depth: u32) -> impl Iterator<Item = DyadicInterval> {
        (0..depth).flat_map(|level| (0..1u64 << level).map(move |index| DyadicInterval { level, index }))
    }
}

/// Step function with `2^depth` samples on `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicFunction {
    depth: u32,
    values: Vec<f64>,
}

impl DyadicFunction {
    pub fn new(depth: u32, values: Vec<f64>) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(param("depth", format!("{depth} exceeds {MAX_DEPTH}")));
        }
        if values.len() != 1usize << depth {
            return Err(param("values", format!("expected {} samples, got {}", 1usize << depth, values.len())));
        }
        Ok(Self { depth, values })
    }

    /// Midpoint sampling of `f` on the finest level.
    pub fn from_fn(depth: u32, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = 1usize << depth.min(MAX_DEPTH);
        let h = 1.0 / n as f64;
        Self::new(depth, (0..n).map(|i| f((i as f64 + 0.5) * h)).collect())
    }

    pub fn constant(depth: u32, c: f64) -> Result<Self> {
        Self::new(depth, vec![c; 1usize << depth.min(MAX_DEPTH)])
    }

    /// The Haar function `h_I` sampled at `depth`.
    pub fn haar(depth: u32, i: DyadicInterval) -> Result<Self> {
        if i.level >= depth {
            return Err(param("interval", "Haar function needs a level above the finest"));
        }
        let mut values = vec![0.0; 1usize << depth];
        let s = 1.0 / i.len().sqrt();
        let r = i.samples(depth);
        let mid = r.start + r.len() / 2;
        values[r.start..mid].iter_mut().for_each(|v| *v = -s);
        values[mid..r.end].iter_mut().for_each(|v| *v = s);
        Self::new(depth, values)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { depth: self.depth, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Averages over every interval, `levels[l][k] = <f>_{(l,k)}`.
    pub fn averages(&self) -> Vec<Vec<f64>> {
        let mut levels = vec![self.values.clone()];
        for _ in 0..self.depth {
            let fine = levels.last().unwrap();
            let coarse = fine.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect();
            levels.push(coarse);
        }
        levels.reverse();
        levels
    }

    pub fn average(&self, i: DyadicInterval) -> f64 {
        let r = i.samples(self.depth);
        let n = r.len() as f64;
        self.values[r].iter().sum::<f64>() / n
    }

    /// `(∫ |f|^p w)^{1/p}`; `w = None` is Lebesgue measure.
    pub fn lp_norm(&self, p: f64, w: Option<&DyadicWeight>) -> f64 {
        let h = 1.0 / self.values.len() as f64;
        let s: f64 = match w {
            None => self.values.iter().map(|v| v.abs().powf(p)).sum(),
            Some(w) => self.values.iter().zip(&w.0.values).map(|(v, wv)| v.abs().powf(p) * wv).sum(),
        };
        (s * h).powf(1.0 / p)
    }

    /// `∫ f g w` (Lebesgue if `w = None`).
    pub fn inner(&self, g: &DyadicFunction, w: Option<&DyadicWeight>) -> f64 {
        let h = 1.0 / self.values.len() as f64;
        let s: f64 = match w {
            None => self.values.iter().zip(&g.values).map(|(a, b)| a * b).sum(),
            Some(w) => self.values.iter().zip(&g.values).zip(&w.0.values).map(|((a, b), c)| a * b * c).sum(),
        };
        s * h
    }
}

/// Haar coefficients `(f, h_I)` for every interval above the finest level.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    depth: u32,
    levels: Vec<Vec<f64>>,
}

impl HaarCoefficients {
    pub fn get(&self, i: DyadicInterval) -> f64 {
        self.levels[i.level as usize][i.index as usize]
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.levels.iter().flatten().map(|c| c * c).sum()
    }

    /// Inverse transform: `mean + Σ c_I h_I`.
    pub fn synthesize(&self, mean: f64) -> DyadicFunction {
        let mut cur = vec![mean];
        for (level, coeffs) in self.levels.iter().enumerate() {
            let s = (level as f64 / 2.0).exp2();
            cur = cur
                .iter()
                .zip(coeffs)
                .flat_map(|(&a, &c)| [a - c * s, a + c * s])
                .collect();
        }
        DyadicFunction { depth: self.depth, values: cur }
    }
}

pub fn haar_coefficients(f: &DyadicFunction) -> Result<HaarCoefficients> {
    if f.depth == 0 {
        return Err(param("depth", "Haar analysis needs depth >= 1"));
    }
    let avg = f.averages();
    let levels = (0..f.depth as usize)
        .map(|l| {
            let half_root = (-(l as f64) / 2.0).exp2() / 2.0;
            avg[l + 1].chunks_exact(2).map(|c| half_root * (c[1] - c[0])).collect()
        })
        .collect();
    Ok(HaarCoefficients { depth: f.depth, levels })
}

/// Sign choice `σ(I) ∈ {+1, -1}`; `0` marks an interval with no sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SignPattern {
    levels: Vec<Vec<i8>>,
}

impl SignPattern {
    pub fn constant(depth: u32, s: i8) -> Self {
        Self { levels: (0..depth).map(|l| vec![s.signum(); 1 << l]).collect() }
    }

    pub fn from_fn(depth: u32, f: impl Fn(DyadicInterval) -> i8) -> Self {
        Self {
            levels: (0..depth)
                .map(|level| (0..1u64 << level).map(|index| f(DyadicInterval { level, index }).signum()).collect())
                .collect(),
        }
    }

    pub fn random(depth: u32, rng: &mut impl RngExt) -> Self {
        Self {
            levels: (0..depth).map(|l| (0..1 << l).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()).collect(),
        }
    }

    pub fn get(&self, i: DyadicInterval) -> i8 {
        self.levels.get(i.level as usize).and_then(|l| l.get(i.index as usize)).copied().unwrap_or(0)
    }
}

/// `T_σ f = Σ σ(I) (f, h_I) h_I`; the mean of `f` is dropped.
pub fn martingale_transform(f: &DyadicFunction, signs: &SignPattern) -> Result<DyadicFunction> {
    let mut c = haar_coefficients(f)?;
    for (level, row) in c.levels.iter_mut().enumerate() {
        for (index, v) in row.iter_mut().enumerate() {
            let i = DyadicInterval { level: level as u32, index: index as u64 };
            match signs.get(i) {
                0 if *v != 0.0 => return Err(Error::MissingSign { level: i.level, index: i.index }),
                s => *v *= s as f64,
            }
        }
    }
    Ok(c.synthesize(0.0))
}

/// Strictly positive step function.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicWeight(DyadicFunction);

impl DyadicWeight {
    pub fn new(f: DyadicFunction) -> Result<Self> {
        if let Some(i) = f.values.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(param("weight", format!("sample {i} is {} (weights must be positive)", f.values[i])));
        }
        Ok(Self(f))
    }

    /// `|x - 1/2|^a` by midpoint sampling.
    pub fn power(depth: u32, a: f64) -> Result<Self> {
        Self::new(DyadicFunction::from_fn(depth, |x| (x - 0.5).abs().powf(a))?)
    }

    /// `u` on `[0, 1/2)`, `v` on `[1/2, 1)`.
    pub fn two_value(depth: u32, u: f64, v: f64) -> Result<Self> {
        if depth == 0 {
            return Err(param("depth", "a two-valued weight needs depth >= 1"));
        }
        Self::new(DyadicFunction::from_fn(depth, |x| if x < 0.5 { u } else { v })?)
    }

    pub fn function(&self) -> &DyadicFunction {
        &self.0
    }

    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// `σ = w^{-1}`.
    pub fn dual(&self) -> DyadicWeight {
        DyadicWeight(self.0.map(|v| 1.0 / v))
    }

    pub fn scaled(&self, c: f64) -> Result<DyadicWeight> {
        DyadicWeight::new(self.0.map(|v| c * v))
    }
}

/// `sup_I <w>_I <w^{-1}>_I` over the whole finite tree.
pub fn a2_dyadic(w: &DyadicWeight) -> f64 {
    let aw = w.0.averages();
    let asig = w.dual().0.averages();
    aw.iter()
        .zip(&asig)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y))
        .fold(1.0, f64::max)
}

/// `sup_J <w>_J exp(-<log w>_J)`.
pub fn a_infinity_constant(w: &DyadicWeight) -> f64 {
    let aw = w.0.averages();
    let alog = w.0.map(f64::ln).averages();
    aw.iter()
        .zip(&alog)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, l)| x * (-l).exp()))
        .fold(1.0, f64::max)
}

/// Weighted Haar function on `I`, with `h_I = α h_I^w + β χ_I / sqrt|I|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedHaar {
    pub interval: DyadicInterval,
    pub alpha: f64,
    pub beta: f64,
    /// Value of `h_I^w` on `I+`.
    pub on_plus: f64,
    /// Value of `h_I^w` on `I-`.
    pub on_minus: f64,
}

impl WeightedHaar {
    pub fn to_function(&self, depth: u32) -> DyadicFunction {
        let mut values = vec![0.0; 1usize << depth];
        let r = self.interval.samples(depth);
        let mid = r.start + r.len() / 2;
        values[r.start..mid].iter_mut().for_each(|v| *v = self.on_minus);
        values[mid..r.end].iter_mut().for_each(|v| *v = self.on_plus);
        DyadicFunction { depth, values }
    }
}

pub fn weighted_haar(w: &DyadicWeight, i: DyadicInterval) -> Result<WeightedHaar> {
    if i.level >= w.depth() {
        return Err(param("interval", "weighted Haar function needs a level above the finest"));
    }
    let wp = w.0.average(i.plus());
    let wm = w.0.average(i.minus());
    if !(wp > 0.0 && wm > 0.0) {
        return Err(Error::Domain(format!("weight has no mass on a half of ({}, {})", i.level, i.index)));
    }
    let mean = 0.5 * (wp + wm);
    let beta = (wp - wm) / (wp + wm);
    let alpha = (mean * (1.0 - beta * beta)).sqrt();
    let s = 1.0 / i.len().sqrt();
    Ok(WeightedHaar {
        interval: i,
        alpha,
        beta,
        on_plus: (1.0 - beta) * s / alpha,
        on_minus: (-1.0 - beta) * s / alpha,
    })
}

/// Nonnegative numbers attached to the intervals of levels `0..=max_level`.
#[derive(Debug, Clone, PartialEq)]
pub struct CarlesonSequence {
    levels: Vec<Vec<f64>>,
}

impl CarlesonSequence {
    pub fn from_fn(max_level: u32, f: impl Fn(DyadicInterval) -> f64) -> Result<Self> {
        if max_level > MAX_DEPTH {
            return Err(param("max_level", format!("{max_level} exceeds {MAX_DEPTH}")));
        }
        let levels: Vec<Vec<f64>> = (0..=max_level)
            .map(|level| (0..1u64 << level).map(|index| f(DyadicInterval { level, index })).collect())
            .collect();
        if levels.iter().flatten().any(|&v| !(v >= 0.0)) {
            return Err(param("sequence", "Carleson sequences are nonnegative"));
        }
        Ok(Self { levels })
    }

    /// `μ_I = (<w><σ>)^α ((Δw/<w>)² + (Δσ/<σ>)²)|I|` with `Δ = <·>_{I+} - <·>_{I-}`.
    pub fn from_weight(w: &DyadicWeight, alpha: f64) -> Result<Self> {
        if w.depth() == 0 {
            return Err(param("depth", "needs depth >= 1"));
        }
        let aw = w.0.averages();
        let asig = w.dual().0.averages();
        Self::from_fn(w.depth() - 1, |i| {
            let (l, k) = (i.level as usize, i.index as usize);
            let (mw, ms) = (aw[l][k], asig[l][k]);
            let dw = aw[l + 1][2 * k + 1] - aw[l + 1][2 * k];
            let ds = asig[l + 1][2 * k + 1] - asig[l + 1][2 * k];
            (mw * ms).powf(alpha) * ((dw / mw).powi(2) + (ds / ms).powi(2)) * i.len()
        })
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn get(&self, i: DyadicInterval) -> f64 {
        self.levels[i.level as usize][i.index as usize]
    }

    /// Subtree sums `S(J) = Σ_{I ⊆ J} seq(I)`.
    fn subtree_sums(&self) -> Vec<Vec<f64>> {
        let mut sums = self.levels.clone();
        for l in (0..sums.len() - 1).rev() {
            let (coarse, fine) = sums.split_at_mut(l + 1);
            for (k, s) in coarse[l].iter_mut().enumerate() {
                *s += fine[0][2 * k] + fine[0][2 * k + 1];
            }
        }
        sums
    }
}

/// `sup_J |J|^{-1} Σ_{I ⊆ J} seq(I)`.
pub fn carleson_intensity(seq: &CarlesonSequence) -> f64 {
    seq.subtree_sums()
        .iter()
        .enumerate()
        .flat_map(|(l, row)| {
            let len = (-(l as f64)).exp2();
            row.iter().map(move |s| s / len)
        })
        .fold(0.0, f64::max)
}

/// Constant used for the weighted half of the embedding check.
pub const EMBEDDING_C: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingCheck {
    pub intensity: f64,
    pub lhs1: f64,
    pub rhs1: f64,
    pub lhs2: f64,
    pub rhs2: f64,
}

impl EmbeddingCheck {
    pub fn holds(&self) -> bool {
        self.lhs1 <= self.rhs1 && self.lhs2 <= self.rhs2
    }

    /// Observed constants `lhs / (B ∫ ...)`.
    pub fn observed_constants(&self) -> (f64, f64) {
        (2.0 * self.lhs1 / self.rhs1, EMBEDDING_C * self.lhs2 / self.rhs2)
    }
}

/// Both sides of `Σ inf_L F α_L ≤ 2B∫F` and
/// `Σ inf_L F / <w>_L α_L ≤ C B ∫ F/w`.
pub fn carleson_embedding_check(seq: &CarlesonSequence, f: &DyadicFunction, w: &DyadicWeight) -> Result<EmbeddingCheck> {
    if f.depth != w.depth() {
        return Err(param("weight", "function and weight must share a depth"));
    }
    if seq.max_level() > f.depth {
        return Err(param("sequence", "sequence is finer than the function"));
    }
    if f.values.iter().any(|&v| v < 0.0) {
        return Err(param("F", "F must be nonnegative"));
    }
    let mut mins = vec![f.values.clone()];
    for _ in 0..f.depth {
        let fine = mins.last().unwrap();
        let coarse = fine.chunks_exact(2).map(|c| c[0].min(c[1])).collect();
        mins.push(coarse);
    }
    mins.reverse();
    let aw = w.0.averages();
    let (mut lhs1, mut lhs2) = (0.0, 0.0);
    for (l, row) in seq.levels.iter().enumerate() {
        for (k, a) in row.iter().enumerate() {
            lhs1 += mins[l][k] * a;
            lhs2 += mins[l][k] / aw[l][k] * a;
        }
    }
    let b = carleson_intensity(seq);
    let int_f = f.mean();
    let int_fw = f.values.iter().zip(&w.0.values).map(|(a, b)| a / b).sum::<f64>() / f.values.len() as f64;
    Ok(EmbeddingCheck { intensity: b, lhs1, rhs1: 2.0 * b * int_f, lhs2, rhs2: EMBEDDING_C * b * int_fw })
}

/// `|I|^{-1} Σ_{ℓ ⊆ I} ((<w>_{ℓ+} - <w>_{ℓ-}) / <w>_ℓ)² |ℓ|`.
pub fn buckley_sum(w: &DyadicWeight, i: DyadicInterval) -> Result<f64> {
    if i.level >= w.depth() {
        return Err(param("interval", "interval must lie above the finest level"));
    }
    let aw = w.0.averages();
    let mut total = 0.0;
    for l in i.level..w.depth() {
        let shift = l - i.level;
        let lo = (i.index << shift) as usize;
        let len = (-(l as f64)).exp2();
        for k in lo..lo + (1usize << shift) {
            let d = aw[l as usize + 1][2 * k + 1] - aw[l as usize + 1][2 * k];
            total += (d / aw[l as usize][k]).powi(2) * len;
        }
    }
    Ok(total / i.len())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformRatio {
    /// Largest observed `‖T_σ f‖ / ‖f‖` in `L^p(w)`.
    pub ratio: f64,
    /// `Q = [w]_{A2}` on the tree.
    pub a2: f64,
}

impl TransformRatio {
    /// Empirical envelope `ratio / Q`.
    pub fn envelope(&self) -> f64 {
        self.ratio / self.a2
    }
}

/// Largest `‖T_σ f‖_{L^p(w)} / ‖f‖_{L^p(w)}` over random Gaussian `f` and
/// random signs. Trial `t` draws from stream `(seed, t)`.
pub fn weighted_mt_ratio(w: &DyadicWeight, trials: usize, p: f64, seed: u64) -> Result<TransformRatio> {
    if trials == 0 {
        return Err(param("trials", "need at least one trial"));
    }
    if !(p >= 1.0) {
        return Err(param("p", "need p >= 1"));
    }
    let depth = w.depth();
    let ratio = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, t);
            let vals = (0..1usize << depth).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
            let f = DyadicFunction { depth, values: vals };
            let signs = SignPattern::random(depth, &mut r);
            let tf = martingale_transform(&f, &signs).expect("signs cover the tree");
            tf.lp_norm(p, Some(w)) / f.lp_norm(p, Some(w))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(TransformRatio { ratio, a2: a2_dyadic(w) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_function(depth: u32, seed: u64) -> DyadicFunction {
        let mut r = rng::stream(seed, 0);
        DyadicFunction::new(depth, (0..1 << depth).map(|_| r.sample(StandardNormal)).collect()).unwrap()
    }

    #[test]
    fn constants_have_no_haar_content() {
        let c = haar_coefficients(&DyadicFunction::constant(6, 3.5).unwrap()).unwrap();
        assert_eq!(c.sum_of_squares(), 0.0);
    }

    #[test]
    fn top_haar_function_has_unit_coefficient() {
        let h = DyadicFunction::haar(3, DyadicInterval::UNIT).unwrap();
        let c = haar_coefficients(&h).unwrap();
        for i in DyadicInterval::all_above(3) {
            let expect = if i == DyadicInterval::UNIT { 1.0 } else { 0.0 };
            assert_relative_eq!(c.get(i), expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn parseval_against_direct_sum() {
        for depth in [1, 8, 14] {
            let f = random_function(depth, depth as u64);
            let c = haar_coefficients(&f).unwrap();
            let direct = f.lp_norm(2.0, None).powi(2);
            let lhs = c.sum_of_squares() + f.mean().powi(2);
            assert_relative_eq!(lhs, direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn synthesis_inverts_analysis() {
        let f = random_function(9, 3);
        let g = haar_coefficients(&f).unwrap().synthesize(f.mean());
        for (a, b) in f.values().iter().zip(g.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn plus_signs_remove_the_mean_and_minus_is_an_involution() {
        let f = random_function(7, 11);
        let m = f.mean();
        let plus = martingale_transform(&f, &SignPattern::constant(7, 1)).unwrap();
        let minus = SignPattern::constant(7, -1);
        let twice = martingale_transform(&martingale_transform(&f, &minus).unwrap(), &minus).unwrap();
        for ((a, b), c) in f.values().iter().zip(plus.values()).zip(twice.values()) {
            assert!((a - m - b).abs() < 1e-12);
            assert!((a - m - c).abs() < 1e-12);
        }
    }

    #[test]
    fn missing_sign_is_an_error() {
        let f = random_function(4, 1);
        let holes = SignPattern::from_fn(4, |i| if i.level == 2 { 0 } else { 1 });
        assert!(matches!(martingale_transform(&f, &holes), Err(Error::MissingSign { level: 2, .. })));
    }

    #[test]
    fn burkholder_bound_at_p4() {
        let mut r = rng::stream(5, 0);
        for t in 0..50 {
            let f = random_function(8, 100 + t);
            let s = SignPattern::random(8, &mut r);
            let tf = martingale_transform(&f, &s).unwrap();
            assert!(tf.lp_norm(4.0, None) <= 3.0 * f.lp_norm(4.0, None));
        }
    }

    #[test]
    fn a2_examples() {
        assert_eq!(a2_dyadic(&DyadicWeight::new(DyadicFunction::constant(5, 2.0).unwrap()).unwrap()), 1.0);
        let w = DyadicWeight::two_value(4, 2.0, 1.0).unwrap();
        assert_relative_eq!(a2_dyadic(&w), 9.0 / 8.0, max_relative = 1e-15);
    }

    #[test]
    fn a2_refines_monotonically_for_the_power_weight() {
        let vals: Vec<f64> = (4..=12).map(|d| a2_dyadic(&DyadicWeight::power(d, 0.5).unwrap())).collect();
        assert!(vals.iter().all(|v| v.is_finite()));
        assert!(vals.windows(2).all(|p| p[1] >= p[0] - 1e-15), "{vals:?}");
    }

    #[test]
    fn nonpositive_weight_is_rejected() {
        assert!(DyadicWeight::new(DyadicFunction::new(1, vec![1.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn weighted_haar_for_unit_weight_is_plain_haar() {
        let w = DyadicWeight::new(DyadicFunction::constant(5, 1.0).unwrap()).unwrap();
        let i = DyadicInterval::new(2, 1).unwrap();
        let wh = weighted_haar(&w, i).unwrap();
        assert_relative_eq!(wh.alpha, 1.0, epsilon = 1e-15);
        assert_eq!(wh.beta, 0.0);
        assert_eq!(wh.to_function(5), DyadicFunction::haar(5, i).unwrap());
    }

    #[test]
    fn weighted_haar_against_the_two_by_two_system() {
        // w = 4 on I+, 1 on I-. Solve α a + β/√|I| = 1/√|I|, α b + β/√|I| = -1/√|I|
        // together with 4a + b = 0 (w-mean zero) and the L²(w) normalization.
        let w = DyadicWeight::two_value(3, 1.0, 4.0).unwrap();
        let wh = weighted_haar(&w, DyadicInterval::UNIT).unwrap();
        assert_relative_eq!(wh.beta, 0.6, epsilon = 1e-15);
        // a = -b/4, α(a - b) = 2  =>  b = -8/(5α), a = 2/(5α); norm: (4a² + b²)/2 = 1.
        let alpha: f64 = (((4.0 * 4.0 / 25.0) + 64.0 / 25.0) / 2.0_f64).sqrt();
        assert_relative_eq!(wh.alpha, alpha, epsilon = 1e-14);
        let h = DyadicFunction::haar(3, DyadicInterval::UNIT).unwrap();
        let hw = wh.to_function(3);
        for (a, b) in h.values().iter().zip(hw.values()) {
            assert!((a - (wh.alpha * b + wh.beta)).abs() < 1e-14);
        }
    }

    #[test]
    fn weighted_haar_gram_matrix() {
        let depth = 7;
        let mut r = rng::stream(9, 0);
        let w = DyadicWeight::new(DyadicFunction::new(depth, (0..1 << depth).map(|_| 0.05 + r.random::<f64>() * 3.0).collect()).unwrap()).unwrap();
        let fs: Vec<_> = DyadicInterval::all_above(depth).map(|i| weighted_haar(&w, i).unwrap().to_function(depth)).collect();
        for (a, fa) in fs.iter().enumerate() {
            for (b, fb) in fs.iter().enumerate() {
                let g = fa.inner(fb, Some(&w));
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-10, "gram[{a}][{b}] = {g}");
            }
        }
    }

    #[test]
    fn carleson_examples() {
        for d in [0, 3, 9] {
            let seq = CarlesonSequence::from_fn(d, |i| i.len()).unwrap();
            assert_relative_eq!(carleson_intensity(&seq), (d + 1) as f64, max_relative = 1e-14);
        }
        let flat = DyadicWeight::new(DyadicFunction::constant(6, 1.0).unwrap()).unwrap();
        assert_eq!(carleson_intensity(&CarlesonSequence::from_weight(&flat, 0.25).unwrap()), 0.0);
    }

    #[test]
    fn carleson_of_two_value_weight_by_hand() {
        // only [0,1] carries mass: (9/8)^{1/4} ((1/1.5)² + ((0.5)/0.75)²)
        let w = DyadicWeight::two_value(6, 2.0, 1.0).unwrap();
        let seq = CarlesonSequence::from_weight(&w, 0.25).unwrap();
        let expect = (9.0f64 / 8.0).powf(0.25) * (2.0 * (2.0f64 / 3.0).powi(2));
        assert_relative_eq!(carleson_intensity(&seq), expect, max_relative = 1e-14);
    }

    #[test]
    fn embedding_examples() {
        let d = 6;
        let seq = CarlesonSequence::from_fn(d, |i| i.len()).unwrap();
        let one = DyadicFunction::constant(d, 1.0).unwrap();
        let w = DyadicWeight::new(one.clone()).unwrap();
        let e = carleson_embedding_check(&seq, &one, &w).unwrap();
        assert_relative_eq!(e.lhs1, (d + 1) as f64, max_relative = 1e-14);
        assert_relative_eq!(e.rhs1, 2.0 * (d + 1) as f64, max_relative = 1e-14);
        assert_relative_eq!(e.lhs2, e.lhs1, max_relative = 1e-14);
        assert!(e.holds());
    }

    #[test]
    fn buckley_examples() {
        let flat = DyadicWeight::new(DyadicFunction::constant(6, 1.0).unwrap()).unwrap();
        assert_eq!(buckley_sum(&flat, DyadicInterval::UNIT).unwrap(), 0.0);
        // one split: ((1 - 2) / 1.5)² = 4/9
        let w = DyadicWeight::two_value(6, 2.0, 1.0).unwrap();
        assert_relative_eq!(buckley_sum(&w, DyadicInterval::UNIT).unwrap(), 4.0 / 9.0, max_relative = 1e-14);
    }

    #[test]
    fn a_infinity_examples() {
        let c = DyadicWeight::new(DyadicFunction::constant(4, 7.0).unwrap()).unwrap();
        assert_relative_eq!(a_infinity_constant(&c), 1.0, max_relative = 1e-14);
        let w = DyadicWeight::two_value(4, 2.0, 1.0).unwrap();
        assert_relative_eq!(a_infinity_constant(&w), 1.5 / 2f64.sqrt(), max_relative = 1e-14);
        for a in [-0.7, -0.3, 0.4, 0.9] {
            let w = DyadicWeight::power(10, a).unwrap();
            assert!(a_infinity_constant(&w) <= a2_dyadic(&w));
        }
    }

    #[test]
    fn transform_ratio_unit_weight_and_scaling() {
        let one = DyadicWeight::new(DyadicFunction::constant(6, 1.0).unwrap()).unwrap();
        assert!(weighted_mt_ratio(&one, 200, 2.0, 1).unwrap().ratio <= 1.0 + 1e-12);
        let w = DyadicWeight::two_value(6, 2.0, 1.0).unwrap();
        let a = weighted_mt_ratio(&w, 100, 2.0, 4).unwrap();
        let b = weighted_mt_ratio(&w.scaled(17.0).unwrap(), 100, 2.0, 4).unwrap();
        assert_relative_eq!(a.ratio, b.ratio, max_relative = 1e-12);
    }
}
