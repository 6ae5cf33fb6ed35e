use bellman_lab::planar::{
    ab_transform, ap_class, ap_heat, beurling, identity_1_13_check, norm_ratio_ascent, read_field, riesz_mixed, riesz_sq, write_field, AscentOptions,
    DiscSampling, GridField, HeatSampling, PlanarWeight, SpectralMultiplier,
};
use bellman_lab::{p_star, rng};
use num_complex::Complex64;
use rand::RngExt;
use serde_json::json;

use super::{int, real, text, CommandSpec, Outcome};
use crate::anchors;
use crate::config::Resolved;
use crate::error::CliError;
use crate::report::{Check, Table};

pub const SPECS: &[CommandSpec] = &[
    CommandSpec {
        module: "planar",
        op: "norm-ascent",
        about: "projected ascent on ||T f||_p / ||f||_p over real fields",
        params: &[
            text("op", "r11-r22", "ab or r11-r22"),
            real("p", "4", "exponent ≥ 2"),
            int("n", "256", "grid size"),
            real("l", "6.283185307179586", "torus side"),
            int("iters", "500", "ascent iterations"),
            real("fraction", "0.85", "asserted fraction of p*-1"),
        ],
        run: norm_ascent,
    },
    CommandSpec {
        module: "planar",
        op: "identity113",
        about: "heat-extension representation of the second Riesz transform on a radial bump",
        params: &[
            int("n", "256", "finest grid size"),
            real("tmax", "10", "upper end of the log-t quadrature"),
            int("nt", "128", "log-t nodes at the finest level"),
            real("l", "8", "torus side"),
            real("radius", "2", "support radius of the bump"),
        ],
        run: identity113,
    },
    CommandSpec {
        module: "planar",
        op: "spectral",
        about: "Ahlfors-Beurling isometry, Riesz decomposition and the derivative exchange",
        params: &[int("n", "512", "grid size"), real("l", "5", "torus side for the random field"), real("s2", "0.6", "variance of the Gaussian bump")],
        run: spectral,
    },
    CommandSpec {
        module: "planar",
        op: "ap",
        about: "classical and heat A_p characteristics of a planar weight",
        params: &[
            text("weight", "power:0.5", "power:a, constant:c or file:<field file>"),
            real("p", "2", "exponent > 1"),
            text("mode", "both", "heat, class or both"),
            int("n", "256", "grid size (ignored for files)"),
            real("l", "8", "torus side (ignored for files)"),
        ],
        run: ap,
    },
    CommandSpec {
        module: "planar",
        op: "transform",
        about: "applies a multiplier to a field file and writes the result",
        params: &[
            text("op", "ab", "ab, beurling, r11, r22, r12, r11-r22 or heat:<t>"),
            text("input", "", "field file to read"),
            text("result", "", "field file to write"),
        ],
        run: transform,
    },
];

fn operator(name: &str) -> Result<SpectralMultiplier, CliError> {
    Ok(match name {
        "ab" => SpectralMultiplier::ahlfors_beurling(),
        "beurling" => SpectralMultiplier::beurling(),
        "r11" => SpectralMultiplier::riesz_sq(1)?,
        "r22" => SpectralMultiplier::riesz_sq(2)?,
        "r12" => SpectralMultiplier::riesz_mixed(),
        "r11-r22" => SpectralMultiplier::r11_minus_r22(),
        _ => match name.strip_prefix("heat:").map(str::parse::<f64>) {
            Some(Ok(t)) => SpectralMultiplier::heat(t)?,
            _ => return Err(CliError::schema("op", format!("unknown operator `{name}`"))),
        },
    })
}

fn norm_ascent(r: &Resolved) -> Result<Outcome, CliError> {
    let op = match r.text("op") {
        o @ ("ab" | "r11-r22") => operator(o)?,
        o => return Err(CliError::schema("op", format!("norm-ascent takes ab or r11-r22, got `{o}`"))),
    };
    let p = r.real("p");
    let opts = AscentOptions { n: r.int("n"), l: r.real("l"), iters: r.int("iters"), seed: r.seed };
    let a = norm_ratio_ascent(&op, p, &opts)?;
    let again = op.apply(&a.witness).lp_norm(p) / a.witness.lp_norm(p);
    let target = r.real("fraction") * (p_star(p) - 1.0);
    let mut table = Table::new(&["iteration", "ratio"]);
    for (i, v) in a.history.iter().enumerate() {
        table.push(vec![i.into(), (*v).into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::at_least("achieved_ratio", anchors::NORM_ASCENT, a.ratio, target, 0.0))
        .check(Check::holds("monotone_history", anchors::NORM_ASCENT, a.history.windows(2).all(|w| w[1] >= w[0])))
        .check(Check::within("recomputed_ratio", anchors::NORM_ASCENT, again, a.ratio, 1e-10 * a.ratio))
        .check(Check::report("ratio_over_p_star_minus_one", anchors::NORM_ASCENT, a.ratio / (p_star(p) - 1.0)))
        .data("start", a.start);
    out.table = Some(table);
    Ok(out)
}

/// `exp(-1/(1 - (r/R)²))` inside `r < R`.
fn bump(n: usize, l: f64, radius: f64) -> Result<GridField, CliError> {
    Ok(GridField::from_real_fn(n, l, |x, y| {
        let r2 = (x * x + y * y) / (radius * radius);
        if r2 < 1.0 {
            (-1.0 / (1.0 - r2)).exp()
        } else {
            0.0
        }
    })?)
}

fn identity113(r: &Resolved) -> Result<Outcome, CliError> {
    let (n, tmax, nt, l, radius) = (r.int("n"), r.real("tmax"), r.int("nt"), r.real("l"), r.real("radius"));
    if n < 16 || n % 4 != 0 || nt < 8 {
        return Err(CliError::schema("n", "need n ≥ 16 divisible by 4 and nt ≥ 8"));
    }
    // grid and log-t nodes refined together; the tail beyond tmax is exact
    let ladder = [(n / 4, nt / 4, tmax), (n / 2, nt / 2, tmax), (n, nt, tmax)];
    let mut table = Table::new(&["n", "nodes", "tmax", "lhs", "rhs", "gap"]);
    let mut gaps = vec![];
    let mut warnings = vec![];
    for (n, nt, tmax) in ladder {
        let f = bump(n, l, radius)?;
        let c = identity_1_13_check(&f, &f, tmax, nt)?;
        table.push(vec![n.into(), nt.into(), tmax.into(), c.lhs.into(), c.rhs.into(), c.gap.into()]);
        gaps.push(c.gap);
        warnings.extend(c.warnings);
    }
    let mut out = Outcome::default();
    out.check(Check::at_most("relative_gap", anchors::HEAT_IDENTITY, gaps[2], 0.0, 1e-3))
        .check(Check::holds("gap_decreases_under_refinement", anchors::HEAT_IDENTITY, gaps.windows(2).all(|w| w[1] < w[0])))
        .data("quadrature", "trapezoid in log t on [(L/N)², tmax], trapezoid on [0, (L/N)²], closed-form torus tail beyond tmax")
        .data("warnings", json!(warnings));
    out.table = Some(table);
    Ok(out)
}

fn max_diff(a: &GridField, b: &GridField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn spectral(r: &Resolved) -> Result<Outcome, CliError> {
    let (n, l, s2) = (r.int("n"), r.real("l"), r.real("s2"));
    let mut g = rng::stream(r.seed, 0);
    let vals = (0..n * n).map(|_| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5)).collect();
    let (f, _) = GridField::new(n, l, vals)?.split_mean();
    let t = ab_transform(&f);
    let iso = (t.l2_norm() / f.l2_norm() - 1.0).abs();
    let (r11, r22, r12) = (riesz_sq(1, &f)?, riesz_sq(2, &f)?, riesz_mixed(&f));
    let i = Complex64::new(0.0, 1.0);
    let parts = GridField::new(n, l, (0..n * n).map(|k| r11.values()[k] - r22.values()[k] + 2.0 * i * r12.values()[k]).collect())?;
    let decomposition = max_diff(&t, &parts) / t.max_abs();

    // u = exp(-|x|²/(2s²)): ∂u = -z̄u/(2s²), ∂̄u = -zu/(2s²)
    let lb = 16.0;
    let u = |x: f64, y: f64| (-(x * x + y * y) / (2.0 * s2)).exp();
    let du = GridField::from_fn(n, lb, |x, y| -Complex64::new(x, -y) * u(x, y) / (2.0 * s2))?;
    let dbu = GridField::from_fn(n, lb, |x, y| -Complex64::new(x, y) * u(x, y) / (2.0 * s2))?;
    let exchange = max_diff(&beurling(&dbu), &du) / du.max_abs();
    let forward = max_diff(&ab_transform(&du), &dbu) / dbu.max_abs();

    let mut out = Outcome::default();
    out.check(Check::at_most("l2_isometry", anchors::AB_ISOMETRY, iso, 0.0, 1e-12))
        .check(Check::at_most("riesz_decomposition", anchors::AB_ISOMETRY, decomposition, 0.0, 1e-12))
        .check(Check::at_most("dzbar_to_dz", anchors::AB_DERIVATIVES, exchange, 0.0, 1e-6))
        .check(Check::at_most("dz_to_dzbar", anchors::AB_DERIVATIVES, forward, 0.0, 1e-6));
    Ok(out)
}

fn planar_weight(spec: &str, n: usize, l: f64) -> Result<PlanarWeight, CliError> {
    let bad = |why: String| CliError::schema("weight", why);
    let (family, arg) = spec.split_once(':').ok_or_else(|| bad(format!("`{spec}`: expected family:parameter")))?;
    let num = || arg.trim().parse::<f64>().map_err(|_| bad(format!("`{arg}` is not a number")));
    Ok(match family {
        "power" => PlanarWeight::power(n, l, num()?)?,
        "constant" => PlanarWeight::constant(n, l, num()?)?,
        "file" => PlanarWeight::new(read_field(arg)?)?,
        _ => return Err(bad(format!("unknown family `{family}` (power, constant, file)"))),
    })
}

fn ap(r: &Resolved) -> Result<Outcome, CliError> {
    let w = planar_weight(r.text("weight"), r.int("n"), r.real("l"))?;
    let (n, l, p) = (w.field().n(), w.field().l(), r.real("p"));
    let mode = r.text("mode");
    if !matches!(mode, "heat" | "class" | "both") {
        return Err(CliError::schema("mode", format!("expected heat, class or both, got `{mode}`")));
    }
    let mut out = Outcome::default();
    let mut values = (None, None);
    if mode != "heat" {
        let c = ap_class(&w, p, &DiscSampling::dyadic(n, l))?;
        out.check(Check::report("ap_class", anchors::AP_HEAT, c.value)).data("class_center", json!(c.center)).data("class_radius", c.scale);
        values.0 = Some(c.value);
    }
    if mode != "class" {
        let h = ap_heat(&w, p, &HeatSampling::dyadic(n, l))?;
        out.check(Check::report("ap_heat", anchors::AP_HEAT, h.value)).data("heat_center", json!(h.center)).data("heat_time", h.scale);
        values.1 = Some(h.value);
    }
    if let (Some(c), Some(h)) = values {
        out.check(Check::report("heat_over_class", anchors::AP_HEAT, h / c));
    }
    Ok(out)
}

fn transform(r: &Resolved) -> Result<Outcome, CliError> {
    let (input, result) = (r.text("input"), r.text("result"));
    if input.is_empty() {
        return Err(CliError::schema("input", "a field file is required"));
    }
    if result.is_empty() {
        return Err(CliError::schema("result", "an output field file is required"));
    }
    let f = read_field(input)?;
    let g = operator(r.text("op"))?.apply(&f);
    write_field(result, &g)?;
    let mut out = Outcome::default();
    out.check(Check::report("input_l2", anchors::MULTIPLIER, f.l2_norm()))
        .check(Check::report("output_l2", anchors::MULTIPLIER, g.l2_norm()))
        .data("n", f.n())
        .data("l", f.l());
    Ok(out)
}
