use bellman_lab::dyadic::{
    a2_dyadic, a_infinity_constant, buckley_sum, carleson_intensity, haar_coefficients, weighted_haar, weighted_mt_ratio, CarlesonSequence,
    DyadicFunction, DyadicInterval, DyadicWeight,
};
use bellman_lab::rng;
use rand::RngExt;
use rand_distr::StandardNormal;

use super::{int, real, reals, text, CommandSpec, Outcome};
use crate::anchors;
use crate::config::Resolved;
use crate::error::CliError;
use crate::report::{Check, Table};

pub const SPECS: &[CommandSpec] = &[
    CommandSpec {
        module: "dyadic",
        op: "buckley",
        about: "Buckley partial sums of a weight under depth refinement",
        params: &[
            text("weight", "power:0.5", "power:a, twovalue:u,v or file:<path> with 2^depth samples"),
            int("depth", "14", "finest level"),
            int("from", "2", "coarsest level reported"),
        ],
        run: buckley,
    },
    CommandSpec {
        module: "dyadic",
        op: "mt-ratio",
        about: "largest observed weighted martingale-transform ratio against [w]_A2",
        params: &[
            text("weight", "twovalue:2,1", "weight spec"),
            int("depth", "8", "finest level"),
            int("trials", "1e4", "random (f, signs) pairs"),
            real("p", "2", "exponent"),
            real("envelope", "2", "asserted bound on ratio/[w]_A2"),
        ],
        run: mt_ratio,
    },
    CommandSpec {
        module: "dyadic",
        op: "haar",
        about: "Parseval identity and the weighted Haar decomposition",
        params: &[int("depth", "14", "depth of the Parseval test function"), int("wdepth", "7", "depth of the weighted Haar tests")],
        run: haar,
    },
    CommandSpec {
        module: "dyadic",
        op: "carleson",
        about: "intensity of the weight-built Carleson sequence across two-valued weights",
        params: &[
            real("alpha", "0.25", "exponent in (0, 1/2)"),
            int("depth", "12", "finest level"),
            reals("u", "2,4,8,16,32,64,128,256,512,1024", "left values u of twovalue:u,1"),
        ],
        run: carleson,
    },
];

/// Parses a weight spec at the given depth.
pub(crate) fn weight(spec: &str, depth: u32) -> Result<DyadicWeight, CliError> {
    let bad = |why: String| CliError::schema("weight", why);
    let (family, arg) = spec.split_once(':').ok_or_else(|| bad(format!("`{spec}`: expected family:parameters")))?;
    let nums = || arg.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number")))).collect::<Result<Vec<_>, _>>();
    if depth > bellman_lab::dyadic::MAX_DEPTH {
        return Err(CliError::schema("depth", format!("at most {}", bellman_lab::dyadic::MAX_DEPTH)));
    }
    Ok(match family {
        "power" => match nums()?[..] {
            [a] => DyadicWeight::power(depth, a)?,
            _ => return Err(bad("power takes one exponent".into())),
        },
        "twovalue" => match nums()?[..] {
            [u, v] => DyadicWeight::two_value(depth, u, v)?,
            _ => return Err(bad("twovalue takes two values".into())),
        },
        "file" => {
            let text = std::fs::read_to_string(arg).map_err(|e| bad(format!("{arg}: {e}")))?;
            let vals = text
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|_| bad(format!("{arg}: `{s}` is not a number"))))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != 1 << depth {
                return Err(CliError::schema("depth", format!("{arg} holds {} samples, depth {depth} needs {}", vals.len(), 1usize << depth)));
            }
            DyadicWeight::new(DyadicFunction::new(depth, vals)?)?
        }
        _ => return Err(bad(format!("unknown family `{family}` (power, twovalue, file)"))),
    })
}

fn depth(r: &Resolved, name: &str) -> Result<u32, CliError> {
    u32::try_from(r.int(name)).map_err(|_| CliError::schema(name, "too large"))
}

fn buckley(r: &Resolved) -> Result<Outcome, CliError> {
    let (spec, d, from) = (r.text("weight"), depth(r, "depth")?, depth(r, "from")?);
    if !(1 <= from && from < d) {
        return Err(CliError::schema("from", "need 1 ≤ from < depth"));
    }
    let w = weight(spec, d)?;
    // coarse levels are exact averages of the finest one, so the sums at
    // depth ℓ are partial sums of the finest series
    let levels = w.function().averages();
    let mut table = Table::new(&["quantity", "value", "depth", "params"]);
    let mut sums = vec![];
    for l in from..=d {
        let wl = DyadicWeight::new(DyadicFunction::new(l, levels[l as usize].clone())?)?;
        let s = buckley_sum(&wl, DyadicInterval::UNIT)?;
        sums.push(s);
        for (q, v) in [("buckley", s), ("a_infinity", a_infinity_constant(&wl)), ("a2", a2_dyadic(&wl))] {
            table.push(vec![q.into(), v.into(), (l as usize).into(), spec.into()]);
        }
    }
    let n = sums.len();
    let (last, prev) = (sums[n - 1] - sums[n - 2], if n > 2 { sums[n - 2] - sums[n - 3] } else { f64::NAN });
    let ratio = if last == 0.0 { 0.0 } else { last / prev };
    let mut out = Outcome::default();
    out.check(Check::report("buckley_sum", anchors::BUCKLEY, sums[n - 1]))
        .check(Check::at_most("increment_ratio", anchors::BUCKLEY, ratio, 0.75, 0.0))
        .check(Check::report("a_infinity", anchors::BUCKLEY, a_infinity_constant(&w)));
    if ratio < 1.0 {
        out.check(Check::report("extrapolated_sum", anchors::BUCKLEY, sums[n - 1] + last * ratio / (1.0 - ratio)));
    }
    out.table = Some(table);
    Ok(out)
}

fn mt_ratio(r: &Resolved) -> Result<Outcome, CliError> {
    let (spec, d) = (r.text("weight"), depth(r, "depth")?);
    let w = weight(spec, d)?;
    let t = weighted_mt_ratio(&w, r.int("trials"), r.real("p"), r.seed)?;
    let mut table = Table::new(&["quantity", "value", "depth", "params"]);
    for (q, v) in [("ratio", t.ratio), ("a2", t.a2), ("envelope", t.envelope())] {
        table.push(vec![q.into(), v.into(), (d as usize).into(), spec.into()]);
    }
    let mut out = Outcome::default();
    out.check(Check::report("ratio", anchors::MT_RATIO, t.ratio))
        .check(Check::report("a2", anchors::MT_RATIO, t.a2))
        .check(Check::at_most("envelope", anchors::MT_RATIO, t.envelope(), r.real("envelope"), 0.0));
    out.table = Some(table);
    Ok(out)
}

/// Largest violations of the two decomposition bounds, the Gram defect and
/// the reconstruction error over every interval above the finest level.
fn decomposition(w: &DyadicWeight) -> Result<[f64; 5], CliError> {
    let d = w.depth();
    let mut worst = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0, 0.0, 0.0];
    let mut fs = vec![];
    for i in DyadicInterval::all_above(d) {
        let h = weighted_haar(w, i)?;
        let mean = w.function().average(i);
        let delta = w.function().average(i.plus()) - w.function().average(i.minus());
        worst[0] = worst[0].max(h.alpha.abs() - mean.sqrt());
        worst[1] = worst[1].max(h.beta.abs() - delta.abs() / mean);
        let hw = h.to_function(d);
        let plain = DyadicFunction::haar(d, i)?;
        let s = 1.0 / i.len().sqrt();
        for (k, (a, b)) in plain.values().iter().zip(hw.values()).enumerate() {
            let chi = if i.samples(d).contains(&k) { s } else { 0.0 };
            worst[3] = worst[3].max((a - h.alpha * b - h.beta * chi).abs());
        }
        worst[4] = worst[4].max(hw.inner(&DyadicFunction::constant(d, 1.0)?, Some(w)).abs());
        fs.push(hw);
    }
    for (a, fa) in fs.iter().enumerate() {
        for (b, fb) in fs.iter().enumerate().skip(a) {
            let g = fa.inner(fb, Some(w)) - if a == b { 1.0 } else { 0.0 };
            worst[2] = worst[2].max(g.abs());
        }
    }
    Ok(worst)
}

fn haar(r: &Resolved) -> Result<Outcome, CliError> {
    let (d, wd) = (depth(r, "depth")?, depth(r, "wdepth")?);
    if wd == 0 || wd > 10 {
        return Err(CliError::schema("wdepth", "need 1 ≤ wdepth ≤ 10 (the Gram matrix is dense)"));
    }
    let mut g = rng::stream(r.seed, 0);
    let f = DyadicFunction::new(d, (0..1usize << d).map(|_| g.sample(StandardNormal)).collect())?;
    let c = haar_coefficients(&f)?;
    let direct = f.lp_norm(2.0, None).powi(2);
    let parseval = ((c.sum_of_squares() + f.mean().powi(2)) / direct - 1.0).abs();

    let mut g = rng::stream(r.seed, 1);
    let random = DyadicWeight::new(DyadicFunction::new(wd, (0..1usize << wd).map(|_| 0.05 + 3.0 * g.random::<f64>()).collect())?)?;
    let family = [("random", random), ("power:-0.5", DyadicWeight::power(wd, -0.5)?), ("twovalue:4,1", DyadicWeight::two_value(wd, 4.0, 1.0)?)];
    let mut worst = [f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0, 0.0, 0.0];
    let mut table = Table::new(&["weight", "alpha_excess", "beta_excess", "gram_defect", "reconstruction", "w_mean"]);
    for (name, w) in &family {
        let v = decomposition(w)?;
        table.push(vec![(*name).into(), v[0].into(), v[1].into(), v[2].into(), v[3].into(), v[4].into()]);
        for k in 0..5 {
            worst[k] = worst[k].max(v[k]);
        }
    }
    let mut out = Outcome::default();
    out.check(Check::at_most("parseval_relative_error", anchors::HAAR_PARSEVAL, parseval, 0.0, 1e-12))
        // bounds are exact inequalities; the tolerance covers rounding in
        // the averages only
        .check(Check::at_most("alpha_bound_excess", anchors::WEIGHTED_HAAR_BOUNDS, worst[0], 0.0, 1e-14))
        .check(Check::at_most("beta_bound_excess", anchors::WEIGHTED_HAAR_BOUNDS, worst[1], 0.0, 1e-14))
        .check(Check::at_most("gram_defect", anchors::WEIGHTED_HAAR_ORTHO, worst[2], 0.0, 1e-10))
        .check(Check::at_most("reconstruction_error", anchors::WEIGHTED_HAAR_BOUNDS, worst[3], 0.0, 1e-12))
        .check(Check::at_most("weighted_mean", anchors::WEIGHTED_HAAR_ORTHO, worst[4], 0.0, 1e-12));
    out.table = Some(table);
    Ok(out)
}

fn carleson(r: &Resolved) -> Result<Outcome, CliError> {
    let (alpha, d) = (r.real("alpha"), depth(r, "depth")?);
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(CliError::schema("alpha", "need 0 < α < 1/2"));
    }
    let mut table = Table::new(&["u", "Q", "intensity", "envelope"]);
    let mut rows = vec![];
    for &u in r.reals("u") {
        let w = weight(&format!("twovalue:{u},1"), d)?;
        let q = a2_dyadic(&w);
        let b = carleson_intensity(&CarlesonSequence::from_weight(&w, alpha)?);
        table.push(vec![u.into(), q.into(), b.into(), (b / q.powf(alpha)).into()]);
        rows.push((q, b));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let env: Vec<f64> = rows.iter().map(|(q, b)| b / q.powf(alpha)).collect();
    let c = env.iter().copied().fold(0.0, f64::max);
    // growth no faster than Q^α: the envelope b/Q^α is nondecreasing and
    // saturates, so its last relative step is small
    let n = env.len();
    let step = if n >= 2 { (env[n - 1] - env[n - 2]) / env[n - 1] } else { 0.0 };
    let mut out = Outcome::default();
    out.check(Check::holds("intensity_monotone_in_q", anchors::CARLESON_WEIGHT, rows.windows(2).all(|w| w[1].1 >= w[0].1)))
        .check(Check::holds("envelope_monotone_in_q", anchors::CARLESON_WEIGHT, env.windows(2).all(|w| w[1] >= w[0])))
        .check(Check::at_most("envelope_last_step", anchors::CARLESON_WEIGHT, step, 0.0, 1e-2))
        .check(Check::report("envelope_constant", anchors::CARLESON_WEIGHT, c));
    out.table = Some(table);
    Ok(out)
}
