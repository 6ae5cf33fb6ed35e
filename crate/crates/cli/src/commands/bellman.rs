use bellman_lab::bellman::burkholder::observed_order;
use bellman_lab::bellman::constants::endpoint_bound;
use bellman_lab::bellman::feasibility::SearchGrid;
use bellman_lab::bellman::{
    bq_hessian_check, h_section_inequality, hessian_form_identity, interpolation_sweep, jn_bellman_check, locate_transition, majorant_check, tau, tau_closed_form, zigzag_check, BellmanCandidate, BurkholderVariant, JnOptions,
};
use bellman_lab::{p_star, rng};
use rand::RngExt;
use serde_json::json;

use super::{int, json_f64s, real, text, CommandSpec, Outcome};
use crate::anchors;
use crate::config::Resolved;
use crate::error::CliError;
use crate::report::{Check, Table};

pub const SPECS: &[CommandSpec] = &[
    CommandSpec {
        module: "bellman",
        op: "zigzag",
        about: "midpoint concavity of a Burkholder variant along both diagonals",
        params: &[
            text("variant", "phi", "phi, phi0 or fp"),
            real("p", "3", "exponent"),
            int("samples", "1e5", "random centres"),
            real("half", "5", "centres in [-half, half]²"),
            real("step", "5", "largest diagonal step"),
        ],
        run: zigzag,
    },
    CommandSpec {
        module: "bellman",
        op: "majorant",
        about: "the variant sits above |y|^p - (p*-1)^p |x|^p",
        params: &[text("variant", "phi", "phi, phi0 or fp"), real("p", "3", "exponent"), int("samples", "1e5", "random points"), real("half", "5", "box half-width")],
        run: majorant,
    },
    CommandSpec {
        module: "bellman",
        op: "hessian",
        about: "closed-form second variation of Phi on vectors against centred differences",
        params: &[real("p", "3", "exponent"), int("points", "200", "random base points and directions"), real("h1", "1e-2", "coarse step"), real("h2", "1e-3", "fine step")],
        run: hessian,
    },
    CommandSpec {
        module: "bellman",
        op: "tau",
        about: "tau(p) by quadrature against the Gamma-function closed form",
        params: &[real("p", "4", "exponent")],
        run: tau_one,
    },
    CommandSpec {
        module: "bellman",
        op: "tau-scan",
        about: "tau(p) quadrature against the closed form on a grid of p",
        params: &[real("pmin", "1", "smallest p"), real("pmax", "50", "largest p"), int("points", "99", "grid points")],
        run: tau_scan,
    },
    CommandSpec {
        module: "bellman",
        op: "interp-sweep",
        about: "interpolated constant C(q) against q-1",
        params: &[real("qmin", "2.1", "smallest q"), real("qmax", "50", "largest q"), int("points", "200", "log-spaced q values"), real("bound", "1.7", "asserted bound on sup C(q)/(q-1)")],
        run: interp_sweep,
    },
    CommandSpec {
        module: "bellman",
        op: "transition",
        about: "bisection in c for the smallest c with a linear zigzag majorant",
        params: &[real("p", "3", "exponent"), real("tol", "1e-5", "bisection width"), int("rho", "400", "grid in rho"), int("s", "801", "domination grid")],
        run: transition,
    },
    CommandSpec {
        module: "bellman",
        op: "section",
        about: "the section expression for H_{p*-1} is nonpositive on [-1, s_p]",
        params: &[real("p", "4", "exponent ≥ 2"), int("grid", "10000", "grid points"), real("eps", "1e-9", "distance kept from -1")],
        run: section,
    },
    CommandSpec {
        module: "bellman",
        op: "power",
        about: "Hessian estimate for x^a y^a on 1 < xy ≤ Q",
        params: &[real("Q", "8", "A2 bound"), real("alpha", "0.25", "exponent in (0, 1/2)"), int("samples", "1e5", "random points")],
        run: power,
    },
    CommandSpec {
        module: "bellman",
        op: "jn",
        about: "John-Nirenberg Bellman function: eigenvalue, determinant and obstacle checks",
        params: &[real("delta", "0.25", "BMO bound in (0, 1)"), int("grid", "200", "points per axis"), real("clip", "1e-3", "fraction of delta kept from the branch")],
        run: jn,
    },
];

fn variant(r: &Resolved) -> Result<BurkholderVariant, CliError> {
    r.text("variant").parse().map_err(|e: bellman_lab::Error| CliError::schema("variant", e.to_string()))
}

fn zigzag(r: &Resolved) -> Result<Outcome, CliError> {
    let (v, p) = (variant(r)?, r.real("p"));
    let c = BellmanCandidate::burkholder(v, p)?;
    let z = zigzag_check(&c, r.int("samples"), r.real("half"), r.real("step"), r.seed)?;
    let mut out = Outcome::default();
    out.check(Check::at_least("relative_margin", anchors::ZIGZAG, z.worst_relative, 0.0, 1e-9))
        .check(Check::report("margin", anchors::ZIGZAG, z.worst_margin))
        .data("operation", "zigzag")
        .data("witness", json_f64s(&z.witness))
        .data("alpha", z.alpha)
        .data("direction", format!("{:?}", z.direction).to_lowercase())
        .data("samples", z.samples);
    Ok(out)
}

fn majorant(r: &Resolved) -> Result<Outcome, CliError> {
    let m = majorant_check(variant(r)?, r.real("p"), r.int("samples"), r.real("half"), r.seed)?;
    let mut out = Outcome::default();
    out.check(Check::at_least("relative_gap", anchors::MAJORANT, m.worst_relative, 0.0, 1e-9))
        .check(Check::report("gap", anchors::MAJORANT, m.worst_gap))
        .data("operation", "majorant")
        .data("witness", json_f64s(&m.witness));
    Ok(out)
}

fn hessian(r: &Resolved) -> Result<Outcome, CliError> {
    let (p, h1, h2) = (r.real("p"), r.real("h1"), r.real("h2"));
    if !(h1 > h2 && h2 > 0.0) {
        return Err(CliError::schema("h2", "need h1 > h2 > 0"));
    }
    let mut g = rng::stream(r.seed, 0);
    let (mut orders, mut worst) = (vec![], 0.0f64);
    while orders.len() < r.int("points") {
        let mut v = || [2.0 * g.random::<f64>() - 1.0, 2.0 * g.random::<f64>() - 1.0];
        let (x, y, dx, dy) = (v(), v(), v(), v());
        if x[0].hypot(x[1]) < 0.1 || y[0].hypot(y[1]) < 0.1 {
            continue;
        }
        let f = hessian_form_identity(x, y, dx, dy, p, h2)?;
        worst = worst.max(f.error() / (1.0 + f.analytic.abs()));
        orders.push(observed_order(x, y, dx, dy, p, h1, h2)?);
    }
    orders.sort_by(f64::total_cmp);
    let median = orders[orders.len() / 2];
    let mut out = Outcome::default();
    out.check(Check::within("median_order", anchors::HESSIAN_FORM, median, 2.0, 0.25))
        .check(Check::at_most("relative_error_fine", anchors::HESSIAN_FORM, worst, 0.0, 1e-4))
        .check(Check::report("min_order", anchors::HESSIAN_FORM, orders[0]));
    Ok(out)
}

fn tau_one(r: &Resolved) -> Result<Outcome, CliError> {
    let p = r.real("p");
    let (t, c) = (tau(p)?, tau_closed_form(p));
    let mut out = Outcome::default();
    out.check(Check::within("tau", anchors::TAU, t, c, 1e-10 * c)).data("operation", "tau").data("closed_form", c);
    Ok(out)
}

fn tau_scan(r: &Resolved) -> Result<Outcome, CliError> {
    let (a, b, n) = (r.real("pmin"), r.real("pmax"), r.int("points").max(2));
    let mut table = Table::new(&["p", "quadrature", "closed_form", "relative_error"]);
    let mut worst = 0.0f64;
    for i in 0..n {
        let p = a + (b - a) * i as f64 / (n - 1) as f64;
        let (t, c) = (tau(p)?, tau_closed_form(p));
        let e = (t / c - 1.0).abs();
        worst = worst.max(e);
        table.push(vec![p.into(), t.into(), c.into(), e.into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::at_most("max_relative_error", anchors::TAU, worst, 0.0, 1e-10));
    out.table = Some(table);
    Ok(out)
}

fn interp_sweep(r: &Resolved) -> Result<Outcome, CliError> {
    let s = interpolation_sweep(r.real("qmin"), r.real("qmax"), r.int("points"))?;
    let mut table = Table::new(&["q", "constant", "ratio", "endpoint_p", "endpoint_bound"]);
    for c in &s.points {
        table.push(vec![c.q.into(), c.value.into(), (c.value / (c.q - 1.0)).into(), c.p.into(), endpoint_bound(c.q).into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::at_most("sup_ratio", anchors::INTERPOLATION, s.sup_ratio, r.real("bound"), 0.0))
        .check(Check::report("argsup", anchors::INTERPOLATION, s.argsup))
        .data("operation", "interp-sweep");
    out.table = Some(table);
    Ok(out)
}

fn transition(r: &Resolved) -> Result<Outcome, CliError> {
    let p = r.real("p");
    let target = p_star(p) - 1.0;
    let grid = SearchGrid { rho: r.int("rho"), s: r.int("s") };
    let c = locate_transition(p, 0.5 * target, 2.0 * target, r.real("tol"), grid)?;
    let mut out = Outcome::default();
    out.check(Check::within("transition", anchors::TRANSITION, c, target, 1e-3));
    Ok(out)
}

fn section(r: &Resolved) -> Result<Outcome, CliError> {
    let s = h_section_inequality(r.real("p"), r.int("grid"), r.real("eps"))?;
    let mut out = Outcome::default();
    out.check(Check::at_most("max_expression", anchors::SECTION, s.worst, 0.0, 1e-10)).data("at", s.at).data("s_p", s.s_p);
    Ok(out)
}

fn power(r: &Resolved) -> Result<Outcome, CliError> {
    let b = bq_hessian_check(r.real("Q"), r.real("alpha"), r.int("samples"), r.seed)?;
    let mut out = Outcome::default();
    out.check(Check::at_least("relative_margin", anchors::POWER_BELLMAN, b.worst_relative, 0.0, 1e-9))
        .check(Check::at_most("size_excess", anchors::POWER_BELLMAN, b.worst_size, 0.0, 0.0))
        .data("witness", json_f64s(&b.witness));
    Ok(out)
}

fn jn(r: &Resolved) -> Result<Outcome, CliError> {
    let opts = JnOptions { grid: r.int("grid"), clip: r.real("clip"), ..Default::default() };
    let j = jn_bellman_check(r.real("delta"), opts, &[])?;
    let mut out = Outcome::default();
    out.check(Check::at_most("max_eigenvalue", anchors::JN, j.max_eigenvalue, 0.0, 1e-6))
        .check(Check::at_most("relative_determinant", anchors::JN, j.max_relative_det, 0.0, 1e-5))
        .check(Check::at_least("obstacle_gap", anchors::JN, j.min_obstacle_gap, 0.0, 1e-12))
        .check(Check::at_most("boundary_error", anchors::JN, j.boundary_error, 0.0, 1e-12))
        .data("operation", "jn")
        .data("points", j.points)
        .data("warnings", json!(j.warnings));
    Ok(out)
}
