use bellman_lab::planar::{ab_transform, GridField};
use bellman_lab::stochastic::{
    ab_by_conditioning, ab_star, heat_martingale, ito_integrals, riemann_gap_demo, subordination_constants_mc, BinGrid, BrownianDriver, ConstantsOptions, GaussianMixture, HeatSurface,
    Integrand, TimeGrid,
};
use bellman_lab::stats::Estimate;
use bellman_lab::p_star;
use serde_json::json;

use super::{int, real, text, CommandSpec, Outcome};
use crate::anchors;
use crate::config::Resolved;
use crate::error::CliError;
use crate::report::{Check, Table};

pub const SPECS: &[CommandSpec] = &[
    CommandSpec {
        module: "stoch",
        op: "riemann-gap",
        about: "left- and right-endpoint Riemann sums of w dw differ by b - a",
        params: &[real("a", "0", "left end ≥ 0"), real("b", "1", "right end"), int("paths", "1e5", "Monte-Carlo paths"), int("steps", "1e3", "partition size"), real("z", "3", "interval width in standard errors")],
        run: riemann_gap,
    },
    CommandSpec {
        module: "stoch",
        op: "isometry",
        about: "Itô isometry and product identity for a battery of adapted step processes",
        params: &[real("a", "0", "left end (a grid time)"), real("b", "1", "right end (a grid time)"), int("paths", "1e5", "Monte-Carlo paths"), int("steps", "200", "steps on [0, b]"), real("z", "3", "interval width in standard errors")],
        run: isometry,
    },
    CommandSpec {
        module: "stoch",
        op: "conformal",
        about: "pathwise conformality and subordination of the transformed heat martingale",
        params: &[int("functions", "4", "random Gaussian-mixture test functions"), int("paths", "200", "paths per function"), real("T", "4", "horizon"), int("steps", "200", "time steps")],
        run: conformal,
    },
    CommandSpec {
        module: "stoch",
        op: "ab-mc",
        about: "Ahlfors-Beurling transform by conditioning the terminal value against the FFT oracle",
        params: &[
            text("f", "bump", "bump or random:<key>"),
            real("s2", "0.25", "variance of the bump"),
            real("T", "50", "horizon"),
            int("paths", "1e6", "Monte-Carlo paths"),
            int("steps", "400", "graded time steps"),
            int("bins", "32", "bins per axis"),
            real("window", "4", "half-width of the binning window"),
            int("min-count", "100", "smallest populated bin"),
            int("n", "512", "oracle grid size"),
            real("l", "16", "oracle torus side"),
            real("z", "3", "agreement width in standard errors"),
            real("fraction", "0.95", "asserted fraction of populated bins in agreement"),
        ],
        run: ab_mc,
    },
    CommandSpec {
        module: "stoch",
        op: "constants",
        about: "Monte-Carlo subordination ratios against p*-1 and the conformal constant",
        params: &[real("p", "4", "exponent"), int("trials", "1e4", "paths per test function"), int("functions", "8", "random test functions"), real("horizon", "16", "horizon"), int("steps", "128", "time steps"), real("z", "3", "allowance in standard errors")],
        run: constants,
    },
];

/// `|mean - target| ≤ z·sem`.
fn contains(name: &str, anchor: &'static str, e: Estimate, target: f64, z: f64) -> Check {
    Check::within(name, anchor, e.mean, target, z * e.sem)
}

fn ci(e: Estimate, z: f64) -> serde_json::Value {
    let (lo, hi) = e.interval(z);
    json!({ "mean": e.mean, "sem": e.sem, "lo": lo, "hi": hi, "n": e.n })
}

fn riemann_gap(r: &Resolved) -> Result<Outcome, CliError> {
    let (a, b, z) = (r.real("a"), r.real("b"), r.real("z"));
    let g = riemann_gap_demo(a, b, r.int("steps"), r.int("paths"), r.seed)?;
    let mut out = Outcome::default();
    out.check(contains("sigma1_mean", anchors::RIEMANN_GAP, g.sigma1, 0.0, z))
        .check(contains("sigma2_mean", anchors::RIEMANN_GAP, g.sigma2, b - a, z))
        .check(contains("gap", anchors::RIEMANN_GAP, g.gap, b - a, z))
        .check(contains("sigma1_second_moment", anchors::RIEMANN_GAP, g.sigma1_sq, g.sigma1_sq_exact, z))
        .check(Check::at_most("sigma1_second_moment_bound", anchors::RIEMANN_GAP, g.sigma1_sq.mean, g.bound, z * g.sigma1_sq.sem))
        .data("sigma1", ci(g.sigma1, z))
        .data("sigma2", ci(g.sigma2, z))
        .data("gap_ci", ci(g.gap, z));
    Ok(out)
}

fn isometry(r: &Resolved) -> Result<Outcome, CliError> {
    let (a, b, z) = (r.real("a"), r.real("b"), r.real("z"));
    let d = BrownianDriver::new(1, b, r.int("steps"), r.seed)?;
    let names = ["w", "one", "t", "sign_w", "w_at_a"];
    let w: Integrand = &|p| Ok(p.now()[0]);
    let one: Integrand = &|_| Ok(1.0);
    let t: Integrand = &|p| Ok(p.time());
    let sign: Integrand = &|p| Ok(p.now()[0].signum());
    // reads the path at the first grid time, a non-anticipating step process
    let frozen: Integrand = &|p| Ok(p.w(0)?[0]);
    let s = ito_integrals(&d, r.int("paths"), a, b, &[w, one, t, sign, frozen])?;
    let mut table = Table::new(&["integrand", "mean", "mean_sem", "second_moment", "energy", "gap", "gap_sem"]);
    let mut out = Outcome::default();
    for (k, name) in names.iter().enumerate() {
        let (m, e, pr, g) = (s.mean(k), s.energy(k, k), s.product(k, k), s.isometry_gap(k, k));
        table.push(vec![(*name).into(), m.mean.into(), m.sem.into(), pr.mean.into(), e.mean.into(), g.mean.into(), g.sem.into()]);
        out.check(contains(&format!("{name}/mean"), anchors::ITO_ISOMETRY, m, 0.0, z))
            .check(contains(&format!("{name}/isometry"), anchors::ITO_ISOMETRY, g, 0.0, z));
    }
    for (k, l) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        out.check(contains(&format!("{}*{}/product", names[k], names[l]), anchors::ITO_ISOMETRY, s.isometry_gap(k, l), 0.0, z));
    }
    out.check(contains("w/second_moment", anchors::ITO_ISOMETRY, s.product(0, 0), (b * b - a * a) / 2.0, z));
    out.table = Some(table);
    Ok(out)
}

fn conformal(r: &Resolved) -> Result<Outcome, CliError> {
    let d = BrownianDriver::new(2, r.real("T"), r.int("steps"), r.seed)?;
    let (mut dot, mut len, mut rec, mut sub) = (0.0f64, 0.0f64, 0.0f64, f64::NEG_INFINITY);
    for k in 0..r.int("functions") as u64 {
        let f = GaussianMixture::random(r.seed, k);
        let scale = f.bumps().iter().map(|b| b.amp.norm()).sum::<f64>().max(1.0);
        for i in 0..r.int("paths") as u64 {
            let x = heat_martingale(&f, &d, i)?;
            let y = ab_star(&f, &d, i)?;
            let (a, b) = y.conformality_residual();
            dot = dot.max(a / (scale * scale));
            len = len.max(b / scale);
            rec = rec.max(x.reconstruction_residual().max(y.reconstruction_residual()) / scale);
            sub = sub.max(y.subordination_excess(&x, 2.0));
        }
    }
    let mut out = Outcome::default();
    out.check(Check::at_most("orthogonality", anchors::CONFORMAL_PATHS, dot, 0.0, 1e-10))
        .check(Check::at_most("equal_length", anchors::CONFORMAL_PATHS, len, 0.0, 1e-10))
        .check(Check::at_most("subordination_excess", anchors::CONFORMAL_PATHS, sub, 0.0, 1e-10))
        .check(Check::at_most("reconstruction", anchors::CONFORMAL_PATHS, rec, 0.0, 1e-10));
    Ok(out)
}

fn surface(r: &Resolved) -> Result<GaussianMixture, CliError> {
    let f = r.text("f");
    if f == "bump" {
        return Ok(GaussianMixture::bump(r.real("s2"))?);
    }
    match f.strip_prefix("random:").map(str::parse::<u64>) {
        Some(Ok(key)) => Ok(GaussianMixture::random(r.seed, key)),
        _ => Err(CliError::schema("f", format!("expected bump or random:<key>, got `{f}`"))),
    }
}

fn ab_mc(r: &Resolved) -> Result<Outcome, CliError> {
    let f = surface(r)?;
    let d = BrownianDriver::with_grid(2, r.real("T"), r.int("steps"), r.seed, TimeGrid::Graded)?;
    let grid = BinGrid::new(r.int("bins"), r.real("window"), r.int("min-count") as u64)?;
    let est = ab_by_conditioning(&f, &d, r.int("paths"), grid)?;
    let field = GridField::from_fn(r.int("n"), r.real("l"), |x, y| f.initial([x, y]))?;
    let oracle = est.bin_average(&ab_transform(&field));
    let z = r.real("z");
    let agree = est.agreement(&oracle, z, 0.0);
    let mut table = Table::new(&["x", "y", "count", "estimate_re", "estimate_im", "sem_re", "sem_im", "oracle_re", "oracle_im", "exact_re", "exact_im"]);
    for (k, (cell, o)) in est.cells.iter().zip(&oracle).enumerate() {
        let (Some(m), Some(o)) = (cell.mean, o) else { continue };
        let c = grid.center(k);
        let e = f.ab_exact(c);
        table.push(vec![c[0].into(), c[1].into(), (cell.count as f64).into(), m.re.into(), m.im.into(), cell.sem[0].into(), cell.sem[1].into(), o.re.into(), o.im.into(), e.re.into(), e.im.into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::at_least("fraction_within", anchors::AB_CONDITIONING, agree.fraction, r.real("fraction"), 0.0))
        .check(Check::at_least("populated_bins", anchors::AB_CONDITIONING, agree.populated as f64, 1.0, 0.0))
        .check(Check::report("worst_z", anchors::AB_CONDITIONING, agree.worst_z))
        .data("outside_window", est.outside)
        .data("within", agree.within);
    out.table = Some(table);
    Ok(out)
}

fn constants(r: &Resolved) -> Result<Outcome, CliError> {
    let (p, z) = (r.real("p"), r.real("z"));
    let opts = ConstantsOptions { functions: r.int("functions"), horizon: r.real("horizon"), steps: r.int("steps") };
    let c = subordination_constants_mc(p, r.int("trials"), r.seed, opts)?;
    let mut out = Outcome::default();
    out.check(Check::at_most("plain_ratio", anchors::SUBORDINATION_CONSTANTS, c.ratio_plain.ratio, c.bound_plain, z * c.ratio_plain.sem));
    if c.conformal_applies() {
        out.check(Check::at_most("conformal_ratio", anchors::SUBORDINATION_CONSTANTS, c.ratio_conformal.ratio, c.bound_conformal, z * c.ratio_conformal.sem));
    } else {
        out.check(Check::report("conformal_ratio", anchors::SUBORDINATION_CONSTANTS, c.ratio_conformal.ratio));
    }
    let mut table = Table::new(&["function", "plain", "plain_sem", "conformal", "conformal_sem"]);
    for (k, (pl, co)) in c.rows.iter().enumerate() {
        table.push(vec![k.into(), pl.ratio.into(), pl.sem.into(), co.ratio.into(), co.sem.into()]);
    }
    out.data("bound_plain", c.bound_plain).data("bound_conformal", c.bound_conformal).data("p_star_minus_one", p_star(p) - 1.0);
    out.table = Some(table);
    Ok(out)
}
