use bellman_lab::laminate::{baricenter, eta_sweep, laminate_inequality_check, ratio, s0_k_p_relations, Laminate, Params, TestFunction2D};

use super::{int, pair, real, reals, text, CommandSpec, Outcome};
use crate::anchors;
use crate::config::Resolved;
use crate::error::CliError;
use crate::report::{Check, Table};

pub const SPECS: &[CommandSpec] = &[
    CommandSpec {
        module: "laminate",
        op: "ratio",
        about: "ratio of the two test integrals against the measure mu for K tied to p + eta",
        params: &[real("p", "3", "exponent"), real("eta", "1e-3", "regularization > 0")],
        run: one_ratio,
    },
    CommandSpec {
        module: "laminate",
        op: "sweep",
        about: "ratio^{1/p} along a decreasing sequence of eta",
        params: &[real("p", "3", "exponent"), reals("etas", "1e-1,1e-2,1e-3,1e-4", "comma-separated eta values"), real("tol", "5e-3", "asserted distance to p-1 at the last eta")],
        run: sweep,
    },
    CommandSpec {
        module: "laminate",
        op: "check",
        about: "Jensen inequality of nu, mu or sigma against certified bi-concave test functions",
        params: &[
            text("which", "nu", "nu, mu or sigma"),
            real("p", "3", "exponent"),
            real("eta", "1e-2", "regularization > 0"),
            int("members", "40", "random min-affine battery members"),
            int("pieces", "5", "affine pieces per member"),
            reals("at", "0.3,0.7", "point a where the inequality is evaluated"),
        ],
        run: check,
    },
];

fn row(table: &mut Table, r: &bellman_lab::laminate::RatioReport) {
    table.push(vec![r.params.eta.into(), r.direct.into(), r.root.into(), r.target.into(), r.params.k.into(), r.printed.into()]);
}

const COLUMNS: &[&str] = &["eta", "ratio", "ratio_root", "target", "K", "printed_ratio"];

fn one_ratio(r: &Resolved) -> Result<Outcome, CliError> {
    let (p, eta) = (r.real("p"), r.real("eta"));
    let q = Params::tied(p, eta)?;
    let rep = ratio(&q)?;
    let mut table = Table::new(COLUMNS);
    row(&mut table, &rep);
    let mut out = Outcome::default();
    out.check(Check::report("ratio_root", anchors::LAMINATE_LIMIT, rep.root))
        .check(Check::report("target", anchors::LAMINATE_LIMIT, rep.target))
        .check(Check::at_most("tie_residual", anchors::LAMINATE_LIMIT, s0_k_p_relations(p, eta)?.residual, 0.0, 1e-12))
        .check(Check::report("printed_over_direct_minus_one", anchors::LAMINATE_PRINTED, rep.discrepancy));
    out.table = Some(table);
    Ok(out)
}

fn sweep(r: &Resolved) -> Result<Outcome, CliError> {
    let p = r.real("p");
    if r.reals("etas").is_empty() {
        return Err(CliError::schema("etas", "need at least one eta"));
    }
    let s = eta_sweep(p, r.reals("etas"))?;
    let mut table = Table::new(COLUMNS);
    for x in &s.rows {
        row(&mut table, x);
    }
    let last = s.rows.last().expect("at least one eta");
    let mut out = Outcome::default();
    out.check(Check::within("limit", anchors::LAMINATE_LIMIT, last.root, p - 1.0, r.real("tol")))
        .check(Check::holds("monotone_toward_limit", anchors::LAMINATE_LIMIT, s.monotone))
        .check(Check::report("c_estimate", anchors::LAMINATE_LIMIT, s.c_estimate));
    out.table = Some(table);
    Ok(out)
}

/// Random min-affine members plus a few smooth separately concave ones.
pub(crate) fn battery(members: usize, pieces: usize, seed: u64) -> Vec<TestFunction2D> {
    let mut b: Vec<_> = (0..members as u64).map(|k| TestFunction2D::random_min_affine(pieces, seed, k)).collect();
    b.push(TestFunction2D::biconcave("-x^2-y^2", |x, y| -x * x - y * y));
    b.push(TestFunction2D::biconcave("-x^2", |x, _| -x * x));
    b.push(TestFunction2D::biconcave("-sqrt(1+x^2)-sqrt(1+y^2)", |x, y| -(1.0 + x * x).sqrt() - (1.0 + y * y).sqrt()));
    b
}

fn check(r: &Resolved) -> Result<Outcome, CliError> {
    let q = Params::tied(r.real("p"), r.real("eta"))?;
    let lam = match r.text("which") {
        "nu" => Laminate::nu_pair(&q),
        "mu" => Laminate::mu(&q),
        "sigma" => Laminate::sigma(&q),
        w => return Err(CliError::schema("which", format!("expected nu, mu or sigma, got `{w}`"))),
    };
    let bar = baricenter(&lam)?;
    let rep = laminate_inequality_check(&lam, pair(r, "at")?, &battery(r.int("members"), r.int("pieces"), r.seed))?;
    let mut table = Table::new(&["member", "margin"]);
    for (name, m) in &rep.margins {
        table.push(vec![name.clone().into(), (*m).into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::at_least("worst_margin", anchors::LAMINATE_INEQUALITY, rep.worst, 0.0, 1e-10))
        .check(Check::report("baricenter_x", anchors::LAMINATE_BARICENTER, bar.x))
        .check(Check::report("baricenter_y", anchors::LAMINATE_BARICENTER, bar.y))
        .check(Check::within("mass", anchors::LAMINATE_BARICENTER, bar.mass, 1.0, 1e-12))
        .data("worst_member", rep.worst_member);
    out.table = Some(table);
    Ok(out)
}
