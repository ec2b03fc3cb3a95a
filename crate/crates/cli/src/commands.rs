use std::f64::consts::PI;

use anyhow::{anyhow, bail, Context, Result};
use metric_jet::catalog::{self, cantor_locate_exact, default_probe_rs, fractal_from_periodic, CatalogEntry};
use metric_jet::classify::{check_ladder, classify_point, counterexample_suite, mismatches};
use metric_jet::contact::{estimate_contact_variant, homogeneity_check};
use metric_jet::extrema::first_order_min_test;
use metric_jet::spaces::{ContractingSpace, Norm, ValuedMonoid, Variant};
use metric_jet::tangency::{
    jet_distance, lipschitz_ratio_homog, norm_homog, quotient_trace, HomogClass, SamplingConfig,
};
use metric_jet::FunctionHandle;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::expr::ExprFunction;
use crate::report::{write_traces, Report, TraceTable};
use crate::{ClassArg, Command, Common, FnArgs, MonoidArg, MonoidArgs, NormArg, VariantArg};

/// Everything a command hands back before it is written out.
struct Outcome {
    inputs: Value,
    results: Value,
    tables: Vec<TraceTable>,
    summary: Vec<String>,
    ok: bool,
}

/// Runs one command; `Ok(false)` means it completed but did not pass.
pub fn run(cmd: Command) -> Result<bool> {
    let (name, common, out) = match cmd {
        Command::Contact { f, monoid, common } => ("contact", common.clone(), contact(&f, &monoid, &config(&common)?)?),
        Command::Classify { f, probe_r, common } => ("classify", common.clone(), classify(&f, &probe_r, &config(&common)?)?),
        Command::Jetdist { f, g, common } => ("jetdist", common.clone(), jetdist(&f, g.as_deref(), &config(&common)?)?),
        Command::Rho { f, class, r, r_exp, eps, common } => {
            ("rho", common.clone(), rho(&f, class, r, r_exp.as_deref(), eps, &config(&common)?)?)
        }
        Command::Extremum { f, monoid, common } => ("extremum", common.clone(), extremum(&f, &monoid, &config(&common)?)?),
        Command::Cantor { at, common } => ("cantor", common, cantor(&at)?),
        Command::Fractalize { func, period, at, common } => {
            ("fractalize", common.clone(), fractalize(&func, &period, &at, &config(&common)?)?)
        }
        Command::Catalog { name, common } => ("catalog", common, list_catalog(name.as_deref())?),
        Command::Suite { common } => ("suite", common.clone(), suite(&config(&common)?)?),
    };
    let report = Report::new(name, out.inputs, out.results, &out.tables, common.seed, common.reproducible);
    if let Some(dir) = &common.csv_traces {
        write_traces(dir, name, &out.tables)?;
    }
    match common.json.as_deref() {
        Some(path) => {
            report.write_json(path)?;
            if path != "-" {
                print_summary(&out.summary);
            }
        }
        None => print_summary(&out.summary),
    }
    Ok(out.ok)
}

fn print_summary(lines: &[String]) {
    for l in lines {
        println!("{l}");
    }
}

fn config(c: &Common) -> Result<SamplingConfig> {
    let mut cfg = SamplingConfig::default().with_seed(c.seed);
    if let Some(t) = c.tol {
        cfg.tol_rel = t;
    }
    if let Some(t) = c.tol_zero {
        cfg.tol_zero = t;
    }
    if !c.radii.is_empty() {
        cfg.radii = c.radii.clone();
    }
    if let Some(d) = c.dirs {
        cfg.direction_count = d;
    }
    if let Some(s) = c.samples {
        cfg.samples_per_shell = s;
    }
    if let Some(n) = c.norm {
        cfg.norm = match n {
            NormArg::L1 => Norm::L1,
            NormArg::L2 => Norm::L2,
            NormArg::Linf => Norm::LInf,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn config_json(cfg: &SamplingConfig) -> Value {
    serde_json::to_value(cfg).unwrap_or(Value::Null)
}

/// `2pi`, `pi` or a plain number.
fn parse_scalar(s: &str) -> Result<f64> {
    let t = s.trim();
    let (coef, rest) = match t.find("pi") {
        Some(i) if t.ends_with("pi") => (&t[..i], true),
        _ => (t, false),
    };
    let c = if rest && coef.is_empty() {
        1.0
    } else {
        coef.trim_end_matches('*').parse::<f64>().with_context(|| format!("not a number: `{s}`"))?
    };
    Ok(if rest { c * PI } else { c })
}

fn ratio(r: Option<f64>, r_exp: Option<&str>) -> Result<Option<f64>> {
    match (r, r_exp) {
        (Some(_), Some(_)) => bail!("give either --r or --r-exp, not both"),
        (Some(r), None) => Ok(Some(r)),
        (None, Some(e)) => Ok(Some((-parse_scalar(e)?).exp())),
        (None, None) => Ok(None),
    }
}

fn monoid(args: &MonoidArgs) -> Result<ValuedMonoid> {
    let r = ratio(args.r, args.r_exp.as_deref())?;
    Ok(match args.monoid {
        MonoidArg::Reals => ValuedMonoid::Reals,
        MonoidArg::Rplus => ValuedMonoid::NonnegReals,
        MonoidArg::Unit => ValuedMonoid::UnitInterval,
        MonoidArg::Nr => ValuedMonoid::nr(r.ok_or_else(|| anyhow!("--monoid nr needs --r or --r-exp"))?)?,
    })
}

fn variant(args: &MonoidArgs) -> Variant {
    match args.variant {
        VariantArg::Canonical => Variant::Canonical,
        VariantArg::Standard => Variant::StandardReal,
    }
}

/// A resolved `--fn`: the handle, the base point and the catalog entry if any.
struct Resolved {
    handle: FunctionHandle,
    point: Vec<f64>,
    entry: Option<CatalogEntry>,
}

fn resolve_spec(spec: &str, at: &[f64], value_at_0: &[f64]) -> Result<Resolved> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        let e = if at.is_empty() { catalog::entry(name)? } else { catalog::entry_with_dim(name, at.len())? };
        let point = if at.is_empty() { vec![0.0; e.dim_in()] } else { at.to_vec() };
        return Ok(Resolved { handle: e.handle.clone(), point, entry: Some(e) });
    }
    let mut ef = ExprFunction::parse(spec).with_context(|| format!("cannot parse `{spec}`"))?;
    let dim = if at.is_empty() { ef.arity().max(1) } else { at.len() };
    if !value_at_0.is_empty() {
        if value_at_0.len() != ef.dim_out() {
            bail!("--value-at-0 has {} components, the map has {}", value_at_0.len(), ef.dim_out());
        }
        ef = ef.with_override(vec![0.0; dim], value_at_0.to_vec());
    }
    let point = if at.is_empty() { vec![0.0; dim] } else { at.to_vec() };
    Ok(Resolved { handle: ef.into_handle(dim)?, point, entry: None })
}

fn resolve(f: &FnArgs) -> Result<Resolved> {
    let r = resolve_spec(&f.func, &f.at, &f.value_at_0)?;
    if !r.handle.in_domain(&r.point) {
        bail!("{:?} is outside the domain of `{}` (try --value-at-0)", r.point, f.func);
    }
    Ok(r)
}

fn fn_inputs(f: &FnArgs, point: &[f64], cfg: &SamplingConfig) -> Value {
    json!({ "fn": f.func, "at": point, "value_at_0": f.value_at_0, "config": config_json(cfg) })
}

fn contact(f: &FnArgs, m_args: &MonoidArgs, cfg: &SamplingConfig) -> Result<Outcome> {
    let r = resolve(f)?;
    let m = monoid(m_args)?;
    let v = variant(m_args);
    let verdict = estimate_contact_variant(&r.handle, &r.point, &m, v, cfg)?;
    let mut summary = vec![format!("status: {:?}", verdict.status)];
    let mut values = Vec::new();
    if let Some(h) = &verdict.contact_eval {
        for t in &verdict.traces {
            let y = h.eval(&t.direction);
            summary.push(format!("  k({}) = {}", fmt_vec(&t.direction), fmt_vec(&y)));
            values.push(json!({ "x": t.direction, "value": y }));
        }
    }
    if let Some(w) = &verdict.oscillation_witness {
        summary.push(format!("  witness direction {} ({:?}, tail range {:.3e})", fmt_vec(&w.direction), w.status, w.tail_range));
    }
    let mut closed = Value::Null;
    if let (Some(e), Some(h)) = (&r.entry, &verdict.contact_eval) {
        if let Ok(cf) = e.closed_contact(&r.point, &m) {
            let gap = verdict
                .traces
                .iter()
                .map(|t| cfg.norm.dist(&h.eval(&t.direction), &cf.eval(&t.direction)))
                .fold(0.0, f64::max);
            summary.push(format!("  closed form: max gap {gap:.3e}"));
            closed = json!({ "label": cf.label, "max_gap": gap, "agrees": gap <= cfg.tol_zero });
        }
    }
    let directions: Vec<Value> = verdict
        .traces
        .iter()
        .map(|t| {
            json!({
                "direction": t.direction, "status": t.status, "limit": t.limit,
                "tail_range": t.tail_range, "domain_exits": t.domain_exits,
            })
        })
        .collect();
    let tables = verdict
        .traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let header: Vec<String> = (1..=r.handle.dim_out).map(|k| format!("value{k}")).collect();
            let mut head = vec!["scale"];
            head.extend(header.iter().map(String::as_str));
            TraceTable::new(format!("dir{i}"), &head, t.rows())
        })
        .collect();
    let mut inputs = fn_inputs(f, &r.point, cfg);
    inputs["monoid"] = json!(m);
    inputs["variant"] = json!(v);
    Ok(Outcome {
        inputs,
        results: json!({
            "status": verdict.status, "monoid": m.label(), "directions": directions,
            "oscillation_witness": verdict.oscillation_witness, "odd_defect": verdict.odd_defect,
            "values": values, "closed_form": closed,
        }),
        tables,
        summary,
        ok: true,
    })
}

fn classify(f: &FnArgs, probe_r: &[String], cfg: &SamplingConfig) -> Result<Outcome> {
    let r = resolve(f)?;
    let truth = r.entry.as_ref().and_then(|e| e.truth_at(&r.point).cloned());
    let probe_rs: Vec<f64> = if !probe_r.is_empty() {
        probe_r.iter().map(|s| if s.contains("pi") { parse_scalar(s).map(|e| (-e).exp()) } else { parse_scalar(s) }).collect::<Result<_>>()?
    } else if let Some(t) = &truth {
        t.probe_rs.clone()
    } else {
        default_probe_rs()
    };
    let rep = classify_point(&r.handle, &r.point, &probe_rs, cfg)?;
    let ladder = check_ladder(&rep);
    let mut summary: Vec<String> = rep.flags.labelled().iter().map(|(l, t)| format!("{l}: {t}")).collect();
    let mut expected = Value::Null;
    let mut ok = ladder.is_empty();
    if let Some(t) = &truth {
        let mism = mismatches(&t.flags, &rep.flags);
        summary.push(format!("ground truth ({}): {} mismatch(es)", t.row, mism.len()));
        ok &= mism.is_empty();
        expected = json!({ "row": t.row, "flags": t.flags, "mismatches": mism });
    }
    for v in &ladder {
        summary.push(format!("ladder violation: {v}"));
    }
    let mut inputs = fn_inputs(f, &r.point, cfg);
    inputs["probe_rs"] = json!(probe_rs);
    Ok(Outcome {
        inputs,
        results: json!({
            "flags": rep.flags, "labelled": rep.flags.labelled(), "evidence": rep.evidence,
            "ladder_violations": ladder, "expected": expected,
        }),
        tables: vec![],
        summary,
        ok,
    })
}

fn jetdist(f: &FnArgs, g: Option<&str>, cfg: &SamplingConfig) -> Result<Outcome> {
    let r = resolve(f)?;
    let other = match g {
        Some(spec) => {
            let o = resolve_spec(spec, &r.point, &f.value_at_0)?;
            if o.handle.dim_in != r.handle.dim_in {
                bail!("`{spec}` has dimension {}, expected {}", o.handle.dim_in, r.handle.dim_in);
            }
            o.handle
        }
        None => FunctionHandle::constant(r.handle.dim_in, r.handle.eval(&r.point)),
    };
    let trace = quotient_trace(&r.handle, &other, &r.point, cfg)?;
    let d = jet_distance(&r.handle, &other, &r.point, cfg);
    let (value, err) = match &d {
        Ok(v) => (json!(v), Value::Null),
        Err(e) => (Value::Null, json!(e.to_string())),
    };
    let summary = vec![match &d {
        Ok(v) => format!("jet distance: {v}"),
        Err(e) => format!("jet distance: {e}"),
    }];
    let rows = trace.radii.iter().zip(&trace.sup_quotients).map(|(r, q)| vec![*r, *q]).collect();
    let mut inputs = fn_inputs(f, &r.point, cfg);
    inputs["gn"] = json!(g);
    Ok(Outcome {
        inputs,
        results: json!({ "distance": value, "error": err, "trace": trace }),
        tables: vec![TraceTable::new("quotients", &["radius", "sup_quotient"], rows)],
        summary,
        ok: d.is_ok(),
    })
}

fn rho(f: &FnArgs, class: ClassArg, r: Option<f64>, r_exp: Option<&str>, eps: f64, cfg: &SamplingConfig) -> Result<Outcome> {
    let res = resolve(f)?;
    let ratio = ratio(r, r_exp)?;
    let (hc, m) = match class {
        ClassArg::General => (HomogClass::General, ValuedMonoid::Reals),
        ClassArg::Rplus => (HomogClass::RplusHomog, ValuedMonoid::NonnegReals),
        ClassArg::Fractal => {
            let r = ratio.ok_or_else(|| anyhow!("--class fractal needs --r or --r-exp"))?;
            (HomogClass::RFractal(r), ValuedMonoid::nr(r)?)
        }
    };
    let space = ContractingSpace::new(res.point.clone(), cfg.norm, Variant::Canonical, m)?;
    let ratio_v = lipschitz_ratio_homog(&res.handle, &space, hc, eps, cfg);
    let norm_v = norm_homog(&res.handle, &space, hc, cfg);
    let good = (ratio_v - norm_v).abs() <= cfg.tol_rel * (1.0 + ratio_v);
    let mut inputs = fn_inputs(f, &res.point, cfg);
    inputs["class"] = json!(hc);
    inputs["eps"] = json!(eps);
    Ok(Outcome {
        inputs,
        results: json!({ "ratio": ratio_v, "norm": norm_v, "good_jet": good }),
        tables: vec![],
        summary: vec![format!("ratio: {ratio_v}"), format!("norm: {norm_v}"), format!("good jet: {good}")],
        ok: true,
    })
}

fn extremum(f: &FnArgs, m_args: &MonoidArgs, cfg: &SamplingConfig) -> Result<Outcome> {
    let r = resolve(f)?;
    let m = monoid(m_args)?;
    let v = first_order_min_test(&r.handle, &r.point, &m, cfg)?;
    let mut inputs = fn_inputs(f, &r.point, cfg);
    inputs["monoid"] = json!(m);
    Ok(Outcome {
        inputs,
        summary: vec![
            format!("status: {:?}", v.status),
            format!("sphere min: {} at {}", v.sphere_min, fmt_vec(&v.witness)),
        ],
        results: serde_json::to_value(&v)?,
        tables: vec![],
        ok: true,
    })
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().with_context(|| format!("bad numerator in `{s}`"))?;
        let q: BigInt = q.trim().parse().with_context(|| format!("bad denominator in `{s}`"))?;
        if q == BigInt::from(0) {
            bail!("zero denominator in `{s}`");
        }
        return Ok(BigRational::new(p, q));
    }
    // decimals are read exactly: 0.1 is 1/10
    let (neg, body) = t.strip_prefix('-').map_or((false, t), |b| (true, b));
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        bail!("not a decimal or fraction: `{s}`");
    }
    let digits: BigInt = format!("{int}{frac}").parse()?;
    let den = BigInt::from(10).pow(frac.len() as u32);
    let q = BigRational::new(digits, den);
    Ok(if neg { -q } else { q })
}

fn cantor(at: &str) -> Result<Outcome> {
    let x = parse_rational(at)?;
    let (loc, exact) = cantor_locate_exact(&x);
    let mut summary = vec![format!("distance: {} = {}", exact, loc.distance)];
    if let Some((lo, hi)) = loc.bracket {
        summary.push(format!("bracket: ({lo}, {hi})"));
    } else if loc.in_kinf {
        summary.push("in the Cantor union".into());
    }
    Ok(Outcome {
        inputs: json!({ "at": at, "exact": x.to_string() }),
        results: json!({
            "distance": loc.distance, "distance_exact": exact.to_string(), "in_kinf": loc.in_kinf,
            "in_kplus": loc.in_kplus, "in_kminus": loc.in_kminus, "bracket": loc.bracket, "truncated": loc.truncated,
        }),
        tables: vec![],
        summary,
        ok: true,
    })
}

fn fractalize(func: &str, period: &str, at: &[f64], cfg: &SamplingConfig) -> Result<Outcome> {
    let t = parse_scalar(period)?;
    let fp = resolve_spec(func, &[0.0], &[])?.handle;
    if fp.dim_in != 1 || fp.dim_out != 1 {
        bail!("the periodic function must be real of one variable");
    }
    let phi = fractal_from_periodic(&fp, t)?;
    let r = (-t).exp();
    let m = ValuedMonoid::nr(r)?;
    let s = ContractingSpace::origin(1, m);
    let rep = homogeneity_check(&phi, &m, &s, &s, cfg)?;
    let pts: Vec<f64> = if at.is_empty() { vec![-1.0, -0.5, -r, 0.0, r, 0.1, 0.5, 1.0, 2.0] } else { at.to_vec() };
    let rows: Vec<Vec<f64>> = pts.iter().map(|x| vec![*x, phi.eval(&[*x])[0]]).collect();
    let table: Vec<Value> = rows.iter().map(|r| json!({ "x": r[0], "value": r[1] })).collect();
    Ok(Outcome {
        inputs: json!({ "fn": func, "period": t, "at": pts, "config": config_json(cfg) }),
        results: json!({
            "ratio": r, "homogeneous": rep.holds, "max_defect": rep.max_defect, "witness": rep.witness, "values": table,
        }),
        tables: vec![TraceTable::new("values", &["x", "value"], rows)],
        summary: vec![
            format!("r = e^-T = {r}"),
            format!("homogeneous: {} (max defect {:.3e})", rep.holds, rep.max_defect),
        ],
        ok: rep.holds,
    })
}

fn list_catalog(name: Option<&str>) -> Result<Outcome> {
    let list = match name {
        Some(n) => vec![catalog::entry(n)?],
        None => catalog::entries(),
    };
    let summary = list.iter().map(|e| format!("{:<16} R^{} -> R^{}  {}", e.name, e.dim_in(), e.dim_out(), e.formula)).collect();
    let items: Vec<Value> = list
        .iter()
        .map(|e| {
            json!({
                "name": e.name, "formula": e.formula, "dim_in": e.dim_in(), "dim_out": e.dim_out(),
                "ground_truth": e.ground_truth,
            })
        })
        .collect();
    Ok(Outcome { inputs: json!({ "name": name }), results: json!({ "entries": items }), tables: vec![], summary, ok: true })
}

fn suite(cfg: &SamplingConfig) -> Result<Outcome> {
    let rows = counterexample_suite(cfg)?;
    let all = rows.iter().all(|r| r.pass);
    let mut summary: Vec<String> = rows
        .iter()
        .map(|r| {
            let flags: Vec<String> = r.computed.labelled().iter().map(|(l, t)| format!("{l}={t}")).collect();
            format!("{} {:<14} {:<8} {}", if r.pass { "PASS" } else { "FAIL" }, r.entry, r.row, flags.join(" "))
        })
        .collect();
    summary.push(format!("{} of {} rows pass", rows.iter().filter(|r| r.pass).count(), rows.len()));
    Ok(Outcome {
        inputs: json!({ "config": config_json(cfg) }),
        results: json!({ "rows": rows, "all_pass": all }),
        tables: vec![],
        summary,
        ok: all,
    })
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    if parts.len() == 1 {
        parts[0].clone()
    } else {
        format!("({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_and_rationals() {
        assert_eq!(parse_scalar("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_scalar("pi").unwrap(), PI);
        assert_eq!(parse_scalar("0.25").unwrap(), 0.25);
        assert!(parse_scalar("abc").is_err());
        assert_eq!(parse_rational("1/2").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("0.1").unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(parse_rational("-3").unwrap(), BigRational::from_integer((-3).into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
