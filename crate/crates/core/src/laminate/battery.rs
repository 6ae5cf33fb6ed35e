//! Test functions for laminates and the inequality `f(a) ≥ ∫ f(a+z) dν(z)`.

use std::fmt;
use std::sync::Arc;

use rand::RngExt;
use rayon::prelude::*;

use super::{baricenter, ray_quadrature, Laminate, Ray};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    /// Meant to be separately concave; checked before use.
    BiconcaveCertified,
    /// Positively homogeneous, integrated on rays in closed form.
    Power,
    Custom,
}

type Eval = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct TestFunction2D {
    name: String,
    kind: TestKind,
    f: Eval,
    degree: Option<f64>,
    /// `min_i (c + aX + bY)` when the function is of that form.
    pieces: Option<Vec<[f64; 3]>>,
}

impl fmt::Debug for TestFunction2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction2D").field("name", &self.name).field("kind", &self.kind).field("degree", &self.degree).finish()
    }
}

impl TestFunction2D {
    fn build(name: &str, kind: TestKind, degree: Option<f64>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), kind, f: Arc::new(f), degree, pieces: None }
    }

    /// `|X + Y|^p`.
    pub fn phi1(p: f64) -> Self {
        Self::build("phi1", TestKind::Power, Some(p), move |x, y| (x + y).abs().powf(p))
    }

    /// `|X - Y|^p`.
    pub fn phi2(p: f64) -> Self {
        Self::build("phi2", TestKind::Power, Some(p), move |x, y| (x - y).abs().powf(p))
    }

    /// `f(tX, tY) = t^degree f(X, Y)` for `t > 0`.
    pub fn homogeneous(name: &str, degree: f64, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::build(name, TestKind::Power, Some(degree), f)
    }

    pub fn custom(name: &str, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::build(name, TestKind::Custom, None, f)
    }

    pub fn biconcave(name: &str, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::build(name, TestKind::BiconcaveCertified, None, f)
    }

    /// `min_i (c_i + a_i X + b_i Y)` for pieces `[c, a, b]`.
    pub fn min_affine(name: &str, pieces: Vec<[f64; 3]>) -> Self {
        let p = pieces.clone();
        let f = move |x: f64, y: f64| p.iter().map(|[c, a, b]| c + a * x + b * y).fold(f64::INFINITY, f64::min);
        Self { pieces: Some(pieces), ..Self::build(name, TestKind::BiconcaveCertified, None, f) }
    }

    /// Minimum of `k` affine functions with standard normal coefficients.
    pub fn random_min_affine(k: usize, seed: u64, key: u64) -> Self {
        let mut r = rng::stream(seed, key);
        let pieces = (0..k.max(1))
            .map(|_| [0; 3].map(|_| r.sample::<f64, _>(rand_distr::StandardNormal)))
            .collect();
        Self::min_affine(&format!("min-affine#{key}"), pieces)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> TestKind {
        self.kind
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    /// Second differences along both axes at `samples` random points of
    /// `[-box, box]²`. A sampled test, so passing is evidence and failing is
    /// proof.
    pub fn certify(&self, samples: usize, half: f64, seed: u64) -> Result<()> {
        let mut r = rng::stream(seed, 0x6269_636f);
        for _ in 0..samples {
            let (x, y) = (half * (2.0 * r.random::<f64>() - 1.0), half * (2.0 * r.random::<f64>() - 1.0));
            let h = 1e-3 * half * (0.01 + r.random::<f64>());
            let c = self.eval(x, y);
            let scale = 1.0 + c.abs();
            for (dx, dy) in [(h, 0.0), (0.0, h)] {
                let d2 = self.eval(x + dx, y + dy) + self.eval(x - dx, y - dy) - 2.0 * c;
                if d2 > 1e-9 * scale {
                    return Err(Error::NotCertified {
                        name: self.name.clone(),
                        witness: format!("({x}, {y}) along {}: second difference {d2:.3e}", if dx > 0.0 { "X" } else { "Y" }),
                    });
                }
            }
        }
        Ok(())
    }
}

/// `∫₁^∞ f(shift + t·dir) t^{-e-1} dt`.
pub(super) fn ray_integral(f: &TestFunction2D, r: &Ray, shift: [f64; 2]) -> Result<f64> {
    let e = r.exponent;
    let origin = shift == [0.0, 0.0];
    if let (Some(a), true) = (f.degree, origin) {
        if a >= e {
            return Err(Error::Divergent(format!("`{}` has degree {a} ≥ {e}", f.name)));
        }
        return Ok(f.eval(r.dir[0], r.dir[1]) / (e - a));
    }
    if let Some(pieces) = &f.pieces {
        return min_affine_on_ray(pieces, r, shift);
    }
    ray_quadrature(&|t| f.eval(shift[0] + t * r.dir[0], shift[1] + t * r.dir[1]), e)
}

/// Exact integral of a piecewise-linear envelope against `t^{-e-1}`.
fn min_affine_on_ray(pieces: &[[f64; 3]], r: &Ray, shift: [f64; 2]) -> Result<f64> {
    let e = r.exponent;
    let lines: Vec<(f64, f64)> = pieces
        .iter()
        .map(|[c, a, b]| (c + a * shift[0] + b * shift[1], a * r.dir[0] + b * r.dir[1]))
        .collect();
    let mut cuts = vec![1.0];
    for (i, &(ci, mi)) in lines.iter().enumerate() {
        for &(cj, mj) in &lines[i + 1..] {
            if mi != mj {
                let t = (cj - ci) / (mi - mj);
                if t > 1.0 && t.is_finite() {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let lower = |t: f64| {
        lines.iter().copied().min_by(|a, b| (a.0 + a.1 * t).total_cmp(&(b.0 + b.1 * t))).expect("at least one piece")
    };
    // ∫_lo^hi (c + m t) t^{-e-1} dt, with hi = ∞ allowed
    let piece = |c: f64, m: f64, lo: f64, hi: f64| -> Result<f64> {
        let pw = |t: f64, k: f64| if t.is_infinite() { 0.0 } else { t.powf(k) };
        let mut v = c * (lo.powf(-e) - pw(hi, -e)) / e;
        if m != 0.0 {
            if hi.is_infinite() && e <= 1.0 {
                return Err(Error::Divergent("linear growth against a density with exponent ≤ 1".into()));
            }
            v += if (e - 1.0).abs() < 1e-300 { m * (hi.ln() - lo.ln()) } else { m * (lo.powf(1.0 - e) - pw(hi, 1.0 - e)) / (e - 1.0) };
        }
        Ok(v)
    };
    let mut total = 0.0;
    for (k, &lo) in cuts.iter().enumerate() {
        let hi = cuts.get(k + 1).copied().unwrap_or(f64::INFINITY);
        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
        let (c, m) = lower(mid);
        total += piece(c, m, lo, hi)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    /// `f(a) - ∫ f(a + z - b) dλ(z)` per battery member, `b` the baricenter.
    pub margins: Vec<(String, f64)>,
    pub worst: f64,
    pub worst_member: String,
}

/// Certification box, sample count and seed for [`laminate_inequality_check`].
const CERT_SAMPLES: usize = 10_000;
const CERT_BOX: f64 = 10.0;

/// Re-centres `lam` at its baricenter and evaluates the laminate inequality
/// at `a` for every member of `battery`, after certifying each one.
pub fn laminate_inequality_check(lam: &Laminate, a: [f64; 2], battery: &[TestFunction2D]) -> Result<InequalityReport> {
    let bar = baricenter(lam)?;
    for f in battery {
        f.certify(CERT_SAMPLES, CERT_BOX, 0)?;
    }
    let shift = [a[0] - bar.x, a[1] - bar.y];
    let margins = battery
        .par_iter()
        .map(|f| {
            let mut integral: f64 = lam.atoms.iter().map(|t| t.mass * f.eval(shift[0] + t.x, shift[1] + t.y)).sum();
            for r in &lam.rays {
                integral += r.weight * ray_integral(f, r, shift)?;
            }
            Ok((f.name().to_string(), f.eval(a[0], a[1]) - integral))
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst_member, worst) = margins
        .iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(n, v)| (n.clone(), *v))
        .unwrap_or_default();
    Ok(InequalityReport { margins, worst, worst_member })
}

#[cfg(test)]
mod tests {
    use super::super::Params;
    use super::*;

    fn pair() -> Laminate {
        Laminate::nu_pair(&Params::tied(3.0, 0.05).unwrap())
    }

    #[test]
    fn affine_margin_vanishes() {
        let f = TestFunction2D::min_affine("affine", vec![[0.3, -1.2, 2.5]]);
        let r = laminate_inequality_check(&pair(), [0.4, -2.0], &[f]).unwrap();
        assert!(r.worst.abs() < 1e-13, "{r:?}");
    }

    #[test]
    fn concave_in_x_only() {
        let f = TestFunction2D::biconcave("-x^2", |x, _| -x * x);
        let r = laminate_inequality_check(&pair(), [1.0, 1.0], &[f]).unwrap();
        assert!(r.worst >= 0.0, "{r:?}");
    }

    #[test]
    fn random_min_affine_battery() {
        let battery: Vec<_> = (0..40).map(|k| TestFunction2D::random_min_affine(5, 11, k)).collect();
        let q = Params::tied(3.0, 1e-2).unwrap();
        for lam in [Laminate::nu_pair(&q), Laminate::mu(&q), Laminate::sigma(&q)] {
            let r = laminate_inequality_check(&lam, [0.3, 0.7], &battery).unwrap();
            if lam == Laminate::nu_pair(&q) {
                assert!(r.worst >= -1e-10, "{r:?}");
            }
            assert_eq!(r.margins.len(), 40);
        }
    }

    #[test]
    fn exact_envelope_matches_quadrature() {
        let f = TestFunction2D::random_min_affine(5, 3, 0);
        let g = TestFunction2D::custom("same", {
            let f = f.clone();
            move |x, y| f.eval(x, y)
        });
        let r = Ray { dir: [1.0, 0.4], weight: 1.0, exponent: 3.2 };
        let a = ray_integral(&f, &r, [0.2, -0.1]).unwrap();
        let b = ray_integral(&g, &r, [0.2, -0.1]).unwrap();
        // Gauss–Legendre only sees the kinks as roughness
        assert!((a - b).abs() < 1e-5 * (1.0 + a.abs()), "{a} vs {b}");
    }

    #[test]
    fn convex_member_is_rejected() {
        let f = TestFunction2D::phi1(3.0);
        match laminate_inequality_check(&pair(), [1.0, 1.0], &[f]) {
            Err(Error::NotCertified { name, .. }) => assert_eq!(name, "phi1"),
            other => panic!("{other:?}"),
        }
    }
}
