//! Acceptance battery: one PASS/FAIL line per criterion, with the
//! sub-checks underneath. Every tolerance is pinned here.
//!
//! Sub-checks marked `red` are expected to fail at desk scale (see the
//! decisions ledger); they print FAIL but do not fail the target. Any
//! other failure, including a blown runtime budget, exits nonzero.

use std::time::Instant;

use bellman_lab::bellman::burkholder::observed_order;
use bellman_lab::bellman::feasibility::SearchGrid;
use bellman_lab::bellman::{
    hessian_form_identity, interpolation_sweep, jn_bellman_check, locate_transition, majorant_check, tau, tau_closed_form, zigzag_check, BellmanCandidate, BurkholderVariant,
    JnOptions,
};
use bellman_lab::dyadic::{
    a2_dyadic, buckley_sum, carleson_intensity, haar_coefficients, weighted_haar, CarlesonSequence, DyadicFunction, DyadicInterval, DyadicWeight,
};
use bellman_lab::laminate::eta_sweep;
use bellman_lab::planar::{ab_transform, beurling, identity_1_13_check, norm_ratio_ascent, AscentOptions, GridField, SpectralMultiplier};
use bellman_lab::qc::{distortion_exponent, locate_sobolev_threshold, weight_growth, RadialMap};
use bellman_lab::stochastic::{
    ab_by_conditioning, ab_star, heat_martingale, ito_integrals, riemann_gap_demo, subordination_constants_mc, BinGrid, BrownianDriver, ConstantsOptions, GaussianMixture,
    HeatSurface, Integrand, TimeGrid,
};
use bellman_lab::{p_star, rng};
use bellman_lab_cli::{ExperimentConfig, Status};
use num_complex::Complex64;
use rand::RngExt;
use rand_distr::StandardNormal;

struct Criterion {
    lines: Vec<String>,
    failed: bool,
    red: Vec<String>,
}

impl Criterion {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.lines.push(format!("    {} {name}: {detail}", if ok { "ok  " } else { "FAIL" }));
        self.failed |= !ok;
    }

    /// A check expected to fail; reported, never fatal.
    fn red(&mut self, name: &str, ok: bool, detail: String) {
        self.lines.push(format!("    {} {name}: {detail} [known red]", if ok { "ok  " } else { "FAIL" }));
        if !ok {
            self.red.push(name.to_string());
        }
    }
}

#[derive(Default)]
struct Battery {
    unexpected: Vec<String>,
}

impl Battery {
    fn run(&mut self, id: u32, title: &str, budget_s: f64, f: impl FnOnce(&mut Criterion)) {
        let start = Instant::now();
        let mut c = Criterion { lines: vec![], failed: false, red: vec![] };
        f(&mut c);
        let secs = start.elapsed().as_secs_f64();
        let in_budget = secs <= budget_s;
        c.check("runtime", in_budget, format!("{secs:.1} s (budget {budget_s} s)"));
        let status = if c.failed || !c.red.is_empty() { "FAIL" } else { "PASS" };
        let note = if !c.failed && !c.red.is_empty() { format!(" (known red: {})", c.red.join(", ")) } else { String::new() };
        println!("{status} criterion {id:>2}: {title}{note}");
        for l in &c.lines {
            println!("{l}");
        }
        if c.failed {
            self.unexpected.push(format!("criterion {id}"));
        }
    }
}

fn max_abs_diff(a: &GridField, b: &GridField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn laminate_limit(c: &mut Criterion) {
    let s = eta_sweep(3.0, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
    let root = s.rows.last().unwrap().root;
    c.check("ratio^(1/p) at eta=1e-4 within 5e-3 of 2", (root - 2.0).abs() <= 5e-3, format!("{root:.6}"));
    let roots: Vec<String> = s.rows.iter().map(|r| format!("{:.5}", r.root)).collect();
    c.check("sweep monotone toward the limit", s.monotone, roots.join(" -> "));
}

fn tau_chain(c: &mut Criterion) {
    let mut worst = 0.0f64;
    for i in 0..99 {
        let p = 1.0 + 49.0 * i as f64 / 98.0;
        worst = worst.max((tau(p).unwrap() / tau_closed_form(p) - 1.0).abs());
    }
    c.check("tau quadrature vs Gamma closed form on [1, 50]", worst <= 1e-10, format!("max relative error {worst:.2e}"));
    let s = interpolation_sweep(2.1, 50.0, 200).unwrap();
    c.red("sup C(q)/(q-1) over [2.1, 50] <= 1.7", s.sup_ratio <= 1.7, format!("{:.6} at q = {:.4}", s.sup_ratio, s.argsup));
}

fn zigzag_suite(c: &mut Criterion) {
    for p in [2.0, 2.5, 3.0, 5.0, 8.0] {
        for v in [BurkholderVariant::Phi, BurkholderVariant::Phi0, BurkholderVariant::Fp] {
            let cand = BellmanCandidate::burkholder(v, p).unwrap();
            let z = zigzag_check(&cand, 100_000, 5.0, 5.0, 1).unwrap();
            c.check(&format!("zigzag {v:?} p={p}"), z.worst_relative >= -1e-9, format!("worst relative margin {:.2e}", z.worst_relative));
        }
        let m = majorant_check(BurkholderVariant::Phi, p, 100_000, 5.0, 2).unwrap();
        c.check(&format!("majorant p={p}"), m.worst_relative >= -1e-9, format!("worst relative gap {:.2e}", m.worst_relative));
    }
    let mut g = rng::stream(3, 0);
    let mut orders = vec![];
    while orders.len() < 200 {
        let mut v = || [2.0 * g.random::<f64>() - 1.0, 2.0 * g.random::<f64>() - 1.0];
        let (x, y, dx, dy) = (v(), v(), v(), v());
        if x[0].hypot(x[1]) < 0.1 || y[0].hypot(y[1]) < 0.1 {
            continue;
        }
        let f = hessian_form_identity(x, y, dx, dy, 3.0, 1e-3).unwrap();
        assert!(f.analytic.is_finite());
        orders.push(observed_order(x, y, dx, dy, 3.0, 1e-2, 1e-3).unwrap());
    }
    orders.sort_by(f64::total_cmp);
    let median = orders[orders.len() / 2];
    c.check("Hessian analytic vs FD: observed order 2", (median - 2.0).abs() <= 0.25, format!("median order {median:.4} over 200 points"));
}

fn transition(c: &mut Criterion) {
    for p in [2.5, 3.0, 4.0] {
        let target = p_star(p) - 1.0;
        let t = locate_transition(p, 0.5 * target, 2.0 * target, 1e-5, SearchGrid { rho: 400, s: 801 }).unwrap();
        c.check(&format!("transition p={p}"), (t - target).abs() <= 1e-3, format!("{t:.6} vs p*-1 = {target:.6}"));
    }
}

fn spectral(c: &mut Criterion) {
    let n = 512;
    let mut g = rng::stream(5, 0);
    let vals = (0..n * n).map(|_| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5)).collect();
    let (f, _) = GridField::new(n, 5.0, vals).unwrap().split_mean();
    let iso = (ab_transform(&f).l2_norm() / f.l2_norm() - 1.0).abs();
    c.check("AB L2 isometry at N=512", iso <= 1e-12, format!("{iso:.2e}"));

    let s2 = 0.6;
    let u = |x: f64, y: f64| (-(x * x + y * y) / (2.0 * s2)).exp();
    let du = GridField::from_fn(n, 16.0, |x, y| -Complex64::new(x, -y) * u(x, y) / (2.0 * s2)).unwrap();
    let dbu = GridField::from_fn(n, 16.0, |x, y| -Complex64::new(x, y) * u(x, y) / (2.0 * s2)).unwrap();
    let e = max_abs_diff(&beurling(&dbu), &du) / du.max_abs();
    c.check("T f_zbar = f_z on a Gaussian bump", e <= 1e-6, format!("relative {e:.2e}"));

    let bump = |n: usize| {
        GridField::from_real_fn(n, 8.0, |x, y| {
            let r2 = (x * x + y * y) / 4.0;
            if r2 < 1.0 {
                (-1.0 / (1.0 - r2)).exp()
            } else {
                0.0
            }
        })
        .unwrap()
    };
    let gaps: Vec<f64> = [(64, 32), (128, 64), (256, 128)]
        .iter()
        .map(|&(n, nt)| {
            let f = bump(n);
            identity_1_13_check(&f, &f, 10.0, nt).unwrap().gap
        })
        .collect();
    c.check("heat identity gap at N=256", gaps[2] <= 1e-3, format!("{:.2e} (log-t trapezoid, 128 nodes on [(L/N)^2, 10], closed-form tail)", gaps[2]));
    c.check("gap decreases under refinement", gaps.windows(2).all(|w| w[1] < w[0]), format!("{:.2e} -> {:.2e} -> {:.2e}", gaps[0], gaps[1], gaps[2]));
}

fn norm_ascent(c: &mut Criterion) {
    let op = SpectralMultiplier::r11_minus_r22();
    let a = norm_ratio_ascent(&op, 4.0, &AscentOptions { n: 256, l: std::f64::consts::TAU, iters: 500, seed: 1 }).unwrap();
    c.red("achieved ratio >= 0.85 (p-1) = 2.55", a.ratio >= 2.55, format!("{:.6}", a.ratio));
    c.check("monotone in iterations", a.history.windows(2).all(|w| w[1] >= w[0]), format!("{} iterations", a.history.len()));
    let again = op.apply(&a.witness).lp_norm(4.0) / a.witness.lp_norm(4.0);
    c.check("witness recomputes the ratio (valid lower bound)", (again - a.ratio).abs() <= 1e-10 * a.ratio, format!("{again:.12}"));
}

fn dyadic_suite(c: &mut Criterion) {
    let d = 14;
    let mut g = rng::stream(7, 0);
    let f = DyadicFunction::new(d, (0..1usize << d).map(|_| g.sample(StandardNormal)).collect()).unwrap();
    let parseval = ((haar_coefficients(&f).unwrap().sum_of_squares() + f.mean().powi(2)) / f.lp_norm(2.0, None).powi(2) - 1.0).abs();
    c.check("Haar Parseval", parseval <= 1e-12, format!("relative {parseval:.2e}"));

    let wd = 7;
    let mut g = rng::stream(7, 1);
    let random = DyadicWeight::new(DyadicFunction::new(wd, (0..1usize << wd).map(|_| 0.05 + 3.0 * g.random::<f64>()).collect()).unwrap()).unwrap();
    let (mut bound, mut gram) = (f64::NEG_INFINITY, 0.0f64);
    for w in [random, DyadicWeight::power(wd, -0.5).unwrap(), DyadicWeight::two_value(wd, 4.0, 1.0).unwrap()] {
        let mut hs = vec![];
        for i in DyadicInterval::all_above(wd) {
            let h = weighted_haar(&w, i).unwrap();
            let m = w.function().average(i);
            let delta = w.function().average(i.plus()) - w.function().average(i.minus());
            bound = bound.max(h.alpha.abs() - m.sqrt()).max(h.beta.abs() - delta.abs() / m);
            hs.push(h.to_function(wd));
        }
        for (a, fa) in hs.iter().enumerate() {
            for (b, fb) in hs.iter().enumerate().skip(a) {
                gram = gram.max((fa.inner(fb, Some(&w)) - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
    }
    c.check("decomposition bounds |alpha| <= sqrt<w>, |beta| <= |Dw|/<w>", bound <= 1e-14, format!("largest excess {bound:.2e}"));
    c.check("L2(w) orthonormality", gram <= 1e-10, format!("Gram defect {gram:.2e}"));

    // partial sums of the finest Buckley series
    for a in [0.5, -0.5] {
        let w = DyadicWeight::power(16, a).unwrap();
        let levels = w.function().averages();
        let sums: Vec<f64> = (10..=16)
            .map(|l| buckley_sum(&DyadicWeight::new(DyadicFunction::new(l, levels[l as usize].clone()).unwrap()).unwrap(), DyadicInterval::UNIT).unwrap())
            .collect();
        let incs: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
        let ratio = incs[incs.len() - 1] / incs[incs.len() - 2];
        c.check(&format!("Buckley sums bounded under refinement, |x-1/2|^{a}"), ratio <= 0.75, format!("sum {:.6}, increment ratio {ratio:.3}", sums[sums.len() - 1]));
    }

    let alpha = 0.25;
    let env: Vec<f64> = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]
        .iter()
        .map(|&u| {
            let w = DyadicWeight::two_value(12, u, 1.0).unwrap();
            carleson_intensity(&CarlesonSequence::from_weight(&w, alpha).unwrap()) / a2_dyadic(&w).powf(alpha)
        })
        .collect();
    let n = env.len();
    let step = (env[n - 1] - env[n - 2]) / env[n - 1];
    c.check("Carleson envelope B/Q^alpha monotone and saturating", env.windows(2).all(|w| w[1] >= w[0]) && step <= 1e-2, format!("envelope {:.4}, last step {step:.2e}", env[n - 1]));
}

fn stochastic_suite(c: &mut Criterion) {
    let r = riemann_gap_demo(0.0, 1.0, 1000, 100_000, 11).unwrap();
    c.check("E(S2 - S1) contains b - a at 3 sigma", r.gap.contains(1.0, 3.0), format!("{:.5} +- {:.5}", r.gap.mean, 3.0 * r.gap.sem));

    let d = BrownianDriver::new(1, 1.0, 200, 12).unwrap();
    let w: Integrand = &|p| Ok(p.now()[0]);
    let t: Integrand = &|p| Ok(p.time());
    let sign: Integrand = &|p| Ok(p.now()[0].signum());
    let s = ito_integrals(&d, 100_000, 0.0, 1.0, &[w, t, sign]).unwrap();
    let all = (0..3).all(|k| s.isometry_gap(k, k).contains(0.0, 3.0) && s.mean(k).contains(0.0, 3.0));
    c.check("Ito isometry and zero mean at 3 sigma (w, t, sign w)", all, format!("E(int w dw)^2 = {:.4} vs 1/2", s.product(0, 0).mean));

    let dr = BrownianDriver::new(2, 4.0, 200, 13).unwrap();
    let (mut conf, mut sub) = (0.0f64, f64::NEG_INFINITY);
    for k in 0..4 {
        let f = GaussianMixture::random(13, k);
        let scale = f.bumps().iter().map(|b| b.amp.norm()).sum::<f64>().max(1.0);
        for i in 0..200 {
            let (x, y) = (heat_martingale(&f, &dr, i).unwrap(), ab_star(&f, &dr, i).unwrap());
            let (a, b) = y.conformality_residual();
            conf = conf.max(a / (scale * scale)).max(b / scale);
            sub = sub.max(y.subordination_excess(&x, 2.0));
        }
    }
    c.check("conformality of (K1, K2) pathwise", conf <= 1e-10, format!("{conf:.2e}"));
    c.check("subordination of Y to 2X pathwise", sub <= 1e-10, format!("excess {sub:.2e}"));

    let f = GaussianMixture::bump(0.25).unwrap();
    let dg = BrownianDriver::with_grid(2, 50.0, 400, 14, TimeGrid::Graded).unwrap();
    let est = ab_by_conditioning(&f, &dg, 1_000_000, BinGrid::new(32, 4.0, 100).unwrap()).unwrap();
    let field = GridField::from_fn(512, 16.0, |x, y| f.initial([x, y])).unwrap();
    let a = est.agreement(&est.bin_average(&ab_transform(&field)), 3.0, 0.0);
    c.check("conditioning vs FFT oracle: >= 95% of populated bins at 3 sigma", a.fraction >= 0.95, format!("{}/{} bins", a.within, a.populated));

    let k = subordination_constants_mc(4.0, 10_000, 15, ConstantsOptions::default()).unwrap();
    let rc = k.ratio_conformal;
    c.check("conformal ratio <= sqrt(p(p-1)/2) at p=4 within CI", rc.below(k.bound_conformal, 3.0), format!("{:.4} +- {:.4} vs {:.4}", rc.ratio, 3.0 * rc.sem, k.bound_conformal));
}

fn jn(c: &mut Criterion) {
    for delta in [0.1, 0.25] {
        let j = jn_bellman_check(delta, JnOptions { grid: 200, clip: 1e-3, ..Default::default() }, &[]).unwrap();
        c.check(&format!("delta={delta}: relative determinant"), j.max_relative_det <= 1e-5, format!("{:.2e}", j.max_relative_det));
        c.check(&format!("delta={delta}: eigenvalues"), j.max_eigenvalue <= 1e-6, format!("{:.2e}", j.max_eigenvalue));
        c.check(&format!("delta={delta}: obstacle"), j.min_obstacle_gap >= -1e-12, format!("min gap {:.2e}", j.min_obstacle_gap));
    }
}

fn qc(c: &mut Criterion) {
    let radii: Vec<f64> = (1..=10).map(|j| 2f64.powi(-j)).collect();
    for big_k in [1.5, 2.0, 3.0] {
        let d = distortion_exponent(&RadialMap::regular(big_k).unwrap(), &radii).unwrap();
        c.check(&format!("distortion slope K={big_k}"), (d.slope - 1.0 / big_k).abs() <= 1e-10, format!("{:.12}", d.slope));
        let map = RadialMap::singular(big_k).unwrap();
        let q = locate_sobolev_threshold(&map, 1.0, 2.0, 1e-4, 1e-6).unwrap();
        c.check(&format!("Sobolev threshold K={big_k}"), (q - 1.0 - map.k()).abs() <= 1e-3, format!("{q:.5} vs 1+k = {:.5}", 1.0 + map.k()));
        let reg = RadialMap::regular(big_k).unwrap();
        let top = 1.0 + 1.0 / reg.k();
        let ps: Vec<f64> = (0..6).map(|j| top - (top - 2.0) * 2f64.powi(-j)).collect();
        let g = weight_growth(&reg, &ps, 256, 4.0).unwrap();
        let shown: Vec<String> = g.classes.iter().map(|v| format!("{v:.3}")).collect();
        c.check(&format!("[w] monotone on [2, 1+1/k), K={big_k}"), g.monotone, shown.join(" "));
    }
}

fn reproducibility(c: &mut Criterion) {
    let run = |seed| bellman_lab_cli::run(&ExperimentConfig::new("suite full").seeded(seed)).unwrap();
    let (a, again, b) = (run(1), run(1), run(2));
    c.check("suite full is bit-identical per seed", a.to_json() == again.to_json(), format!("{} checks", a.checks.len()));
    let pattern = |r: &bellman_lab_cli::RunReport| r.checks.iter().map(|c| (c.name.clone(), c.status)).collect::<Vec<_>>();
    let diff: Vec<String> = pattern(&a).iter().zip(pattern(&b)).filter(|(x, y)| **x != *y).map(|(x, _)| x.0.clone()).collect();
    c.check("seeds 1 and 2 give identical pass/fail patterns", diff.is_empty() && a.checks.len() == b.checks.len(), format!("differences: {diff:?}"));
    let fails: Vec<&str> = a.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect();
    c.lines.push(format!("    note failing suite checks: {fails:?}"));
}

fn main() {
    let mut b = Battery::default();
    b.run(1, "laminate limit", 5.0, laminate_limit);
    b.run(2, "tau(p) and the interpolation chain", 10.0, tau_chain);
    b.run(3, "zigzag and Hessian suite", 60.0, zigzag_suite);
    b.run(4, "majorant sharpness", 30.0, transition);
    b.run(5, "spectral identities", 60.0, spectral);
    b.run(6, "norm ascent", 300.0, norm_ascent);
    b.run(7, "dyadic suite", 60.0, dyadic_suite);
    b.run(8, "stochastic suite", 900.0, stochastic_suite);
    b.run(9, "John-Nirenberg Bellman function", 10.0, jn);
    b.run(10, "quasiconformal models", 60.0, qc);
    b.run(11, "reproducibility", 1800.0, reproducibility);
    if !b.unexpected.is_empty() {
        eprintln!("unexpected failures: {}", b.unexpected.join(", "));
        std::process::exit(1);
    }
}
