use bellman_lab::planar::{ap_class, DiscSampling};
use bellman_lab::qc::{beltrami_residual, distortion_exponent, jacobian_weight, locate_sobolev_threshold, sobolev_threshold, weight_growth, RadialMap, Verdict};

use super::{int, json_f64s, real, reals, CommandSpec, Outcome};
use crate::anchors;
use crate::config::Resolved;
use crate::error::CliError;
use crate::report::{Check, Table};

pub const SPECS: &[CommandSpec] = &[
    CommandSpec {
        module: "qc",
        op: "distortion",
        about: "area distortion exponent of z|z|^{1/K-1} on small discs",
        params: &[real("K", "3", "distortion ≥ 1"), int("levels", "10", "radii 2^-1 .. 2^-levels")],
        run: distortion,
    },
    CommandSpec {
        module: "qc",
        op: "sobolev",
        about: "convergence of the derivative integral of |z|^{1-1/K}/z at exponent q",
        params: &[real("K", "2", "distortion > 1"), real("q", "1.3", "integrability exponent"), real("eps-min", "1e-6", "smallest inner radius")],
        run: sobolev,
    },
    CommandSpec {
        module: "qc",
        op: "threshold",
        about: "bisection for the critical Sobolev exponent of the singular map",
        params: &[real("K", "2", "distortion > 1"), real("tol", "1e-4", "bisection width"), real("eps-min", "1e-6", "smallest inner radius")],
        run: threshold,
    },
    CommandSpec {
        module: "qc",
        op: "weight",
        about: "A2 characteristic over discs of the Jacobian weight J^{1-p/2}",
        params: &[real("K", "2", "distortion > 1"), real("p", "3.5", "exponent in [2, 1+1/k)"), int("n", "512", "grid size"), real("l", "4", "torus side")],
        run: weight,
    },
    CommandSpec {
        module: "qc",
        op: "weight-growth",
        about: "A2 characteristic of J^{1-p/2} as p approaches 1+1/k",
        params: &[
            real("K", "2", "distortion > 1"),
            reals("ps", "", "exponents in [2, 1+1/k); empty for 1+1/k - (1/k-1)2^-j"),
            int("levels", "6", "ladder length when ps is empty"),
            int("n", "512", "grid size"),
            real("l", "4", "torus side"),
        ],
        run: growth,
    },
];

fn distortion(r: &Resolved) -> Result<Outcome, CliError> {
    let map = RadialMap::regular(r.real("K"))?;
    let radii: Vec<f64> = (1..=r.int("levels") as i32).map(|j| 2f64.powi(-j)).collect();
    let d = distortion_exponent(&map, &radii)?;
    let mut table = Table::new(&["radius", "image_area", "ratio"]);
    for i in 0..radii.len() {
        table.push(vec![d.radii[i].into(), d.image_areas[i].into(), d.ratios[i].into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::within("slope", anchors::QC_DISTORTION, d.slope, 1.0 / map.big_k(), 1e-10))
        .check(Check::at_most("fit_residual", anchors::QC_DISTORTION, d.residual, 0.0, 1e-10))
        .check(Check::at_most("beltrami_residual", anchors::QC_DISTORTION, beltrami_residual(&map, 1000, r.seed), 0.0, 1e-8));
    out.table = Some(table);
    Ok(out)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Converges => "converges",
        Verdict::Diverges => "diverges",
        Verdict::Borderline => "borderline",
    }
}

fn sobolev(r: &Resolved) -> Result<Outcome, CliError> {
    let map = RadialMap::singular(r.real("K"))?;
    let q = r.real("q");
    let s = sobolev_threshold(&map, q, r.real("eps-min"))?;
    let expected = if q < s.threshold - 1e-6 {
        Some(Verdict::Converges)
    } else if q > s.threshold + 1e-6 {
        Some(Verdict::Diverges)
    } else {
        None
    };
    let mut table = Table::new(&["eps", "integral"]);
    for (e, i) in s.eps.iter().zip(&s.integrals) {
        table.push(vec![(*e).into(), (*i).into()]);
    }
    let mut out = Outcome::default();
    match expected {
        Some(v) => out.check(Check::holds("verdict", anchors::QC_SOBOLEV, s.verdict == v)),
        None => out.check(Check::report("verdict_borderline", anchors::QC_SOBOLEV, s.rate)),
    };
    out.check(Check::within("rate", anchors::QC_SOBOLEV, s.rate, s.rate_exact, 1e-6))
        .check(Check::report("threshold", anchors::QC_SOBOLEV, s.threshold))
        .data("verdict", verdict_name(s.verdict));
    out.table = Some(table);
    Ok(out)
}

fn threshold(r: &Resolved) -> Result<Outcome, CliError> {
    let map = RadialMap::singular(r.real("K"))?;
    let q = locate_sobolev_threshold(&map, 1.0, 2.0, r.real("tol"), r.real("eps-min"))?;
    let mut out = Outcome::default();
    out.check(Check::within("threshold", anchors::QC_SOBOLEV, q, 1.0 + map.k(), 1e-3));
    Ok(out)
}

fn weight(r: &Resolved) -> Result<Outcome, CliError> {
    let map = RadialMap::regular(r.real("K"))?;
    let (n, l) = (r.int("n"), r.real("l"));
    let w = jacobian_weight(&map, r.real("p"), n, l)?;
    let a = ap_class(&w, 2.0, &DiscSampling::dyadic(n, l))?;
    let mut out = Outcome::default();
    out.check(Check::report("a2_class", anchors::QC_WEIGHT, a.value)).data("center", json_f64s(&a.center)).data("radius", a.scale);
    Ok(out)
}

fn growth(r: &Resolved) -> Result<Outcome, CliError> {
    let map = RadialMap::regular(r.real("K"))?;
    let top = 1.0 + 1.0 / map.k();
    let ps: Vec<f64> = match r.reals("ps") {
        [] => (0..r.int("levels") as i32).map(|j| top - (top - 2.0) * 2f64.powi(-j)).collect(),
        v => v.to_vec(),
    };
    let g = weight_growth(&map, &ps, r.int("n"), r.real("l"))?;
    let mut table = Table::new(&["p", "a2_class", "shape"]);
    for i in 0..ps.len() {
        table.push(vec![g.ps[i].into(), g.classes[i].into(), g.shape[i].into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::holds("monotone", anchors::QC_WEIGHT, g.monotone)).check(Check::report("fitted_exponent", anchors::QC_WEIGHT, g.fitted_exponent));
    out.table = Some(table);
    Ok(out)
}
