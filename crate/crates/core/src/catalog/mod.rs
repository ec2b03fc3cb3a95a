//! Example maps with exact evaluators, closed-form contacts and ground-truth labels.

pub mod cantor;

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::classify::{Flags, Tri};
use crate::handle::FunctionHandle;
use crate::spaces::{Norm, ValuedMonoid};

pub use cantor::{cantor_distance, cantor_distance_exact, cantor_locate, cantor_locate_exact, CantorLocation, TriadicCode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    Unknown(String),
    #[error("entry `{0}` has no closed-form contact at {1:?} for this monoid")]
    NoClosedForm(String, Vec<f64>),
    #[error("entry `{0}` needs dimension in {1}")]
    BadDimension(String, &'static str),
    #[error("periodicity check failed at x = {x}: f(x) = {fx}, f(x+T) = {fxt}")]
    NotPeriodic { x: f64, fx: f64, fxt: f64 },
    #[error("period must be positive and finite, got {0}")]
    BadPeriod(f64),
}

/// Default tie tolerance for the index sets of the max/min/norm contact formulas.
pub const TIE_TOL: f64 = 1e-12;

/// `e^{−2π}`.
pub fn r_2pi() -> f64 {
    (-2.0 * PI).exp()
}

/// The ratios used for neo-fractal probes by default.
pub fn default_probe_rs() -> Vec<f64> {
    vec![0.5, 1.0 / 3.0, r_2pi()]
}

/// Expected classification at one point.
#[derive(Debug, Clone, Serialize)]
pub struct GroundTruth {
    pub point: Vec<f64>,
    /// Short label of the row this point stands for.
    pub row: String,
    pub flags: Flags,
    /// Ratios probed for neo-fractality at this point.
    pub probe_rs: Vec<f64>,
    /// `Some(true)` for a strict local minimum, `Some(false)` when not a local minimum.
    pub local_min: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub formula: String,
    pub handle: FunctionHandle,
    pub ground_truth: Vec<GroundTruth>,
}

impl CatalogEntry {
    pub fn dim_in(&self) -> usize {
        self.handle.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.handle.dim_out
    }

    pub fn truth_at(&self, a: &[f64]) -> Option<&GroundTruth> {
        self.ground_truth.iter().find(|g| g.point == a)
    }

    pub fn closed_contact(&self, a: &[f64], m: &ValuedMonoid) -> Result<FunctionHandle, CatalogError> {
        contact_closed_form(&self.name, a, m)
    }
}

/// Registered names, in listing order.
pub const NAMES: [&str; 21] = [
    "theta",
    "identity",
    "square",
    "cube_root",
    "x_sin_inv_x",
    "x2_sin_inv_x",
    "x2_sin_inv_x2",
    "x_sin_log",
    "x_sin_log_log",
    "x_sin_y_over_x",
    "xy2_over_x2y2",
    "giseh",
    "max",
    "min",
    "n1",
    "n2",
    "ninf",
    "fp1",
    "fp2",
    "fpinf",
    "fractal_sin",
];

/// Parses flag strings such as `"c0 lsl !ll tang gdiff nf !diff stdr"`.
///
/// A bare label is Yes, `!label` is No, missing labels stay Unknown. `nf`
/// applies to every probed ratio; `nf@0.5` and `!nf@0.5` set one ratio.
fn flags(spec: &str, probe_rs: &[f64]) -> Flags {
    let mut f = Flags::unknown(probe_rs);
    for tok in spec.split_whitespace() {
        let (v, name) = match tok.strip_prefix('!') {
            Some(rest) => (Tri::No, rest),
            None => (Tri::Yes, tok),
        };
        let (name, r) = match name.split_once('@') {
            Some((n, r)) => (n, Some(r.parse::<f64>().expect("ratio in flag spec"))),
            None => (name, None),
        };
        match name {
            "c0" => f.c0 = v,
            "lsl" => f.lsl = v,
            "ll" => f.ll = v,
            "tang" => f.tangentiable = v,
            "gdiff" => f.gdiff = v,
            "diff" => f.differentiable = v,
            "stdr" => f.std_r_contactable = v,
            "nf" => {
                for (rr, t) in f.neo_fractal.iter_mut() {
                    if r.is_none_or(|r| (r - *rr).abs() < 1e-12 * (1.0 + r.abs())) {
                        *t = v;
                    }
                }
            }
            other => panic!("unknown flag {other}"),
        }
    }
    f
}

fn truth(point: Vec<f64>, row: &str, spec: &str, local_min: Option<bool>) -> GroundTruth {
    let rs = default_probe_rs();
    GroundTruth { point, row: row.into(), flags: flags(spec, &rs), probe_rs: rs, local_min }
}

fn truth_rs(point: Vec<f64>, row: &str, spec: &str, rs: Vec<f64>) -> GroundTruth {
    GroundTruth { point, row: row.into(), flags: flags(spec, &rs), probe_rs: rs, local_min: None }
}

fn real_at_zero(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> FunctionHandle {
    FunctionHandle::real(label, move |x| if x == 0.0 { 0.0 } else { f(x) })
}

fn max_of(x: &[f64]) -> f64 {
    x.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(x: &[f64]) -> f64 {
    x.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `f^p(x) = sin(log ‖x‖_p)·x`, with `0 ↦ 0`.
pub fn fp_map(p: Norm, n: usize) -> FunctionHandle {
    let label = match p {
        Norm::L1 => "fp1",
        Norm::L2 => "fp2",
        Norm::LInf => "fpinf",
    };
    FunctionHandle::new(label, n, n, move |x| {
        let s = p.norm(x);
        if s == 0.0 {
            return vec![0.0; x.len()];
        }
        let l = s.ln().sin();
        x.iter().map(|v| l * v).collect()
    })
}

/// `ϕ(x) = x·fp(log|x|)`, `ϕ(0) = 0`, for a `T`-periodic `fp`.
/// Periodicity is spot-checked at 32 points.
pub fn fractal_from_periodic(fp: &FunctionHandle, period: f64) -> Result<FunctionHandle, CatalogError> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(CatalogError::BadPeriod(period));
    }
    for i in 0..32 {
        let x = -7.0 + 14.0 * (i as f64 + 0.37) / 32.0;
        if !fp.in_domain(&[x]) || !fp.in_domain(&[x + period]) {
            continue;
        }
        let (fx, fxt) = (fp.eval(&[x])[0], fp.eval(&[x + period])[0]);
        if (fx - fxt).abs() > 1e-9 * (1.0 + fx.abs()) {
            return Err(CatalogError::NotPeriodic { x, fx, fxt });
        }
    }
    let g = fp.clone();
    let label = format!("x·{}(log|x|)", fp.label);
    Ok(FunctionHandle::real(label, move |x| if x == 0.0 { 0.0 } else { x * g.eval(&[x.abs().ln()])[0] }))
}

fn handle_for(name: &str, dim: usize) -> Result<(FunctionHandle, String), CatalogError> {
    let need1 = |d: usize| if d == 1 { Ok(()) } else { Err(CatalogError::BadDimension(name.into(), "{1}")) };
    let need2 = |d: usize| if d == 2 { Ok(()) } else { Err(CatalogError::BadDimension(name.into(), "{2}")) };
    let need_pos = |d: usize| if d >= 1 { Ok(()) } else { Err(CatalogError::BadDimension(name.into(), "1..")) };
    Ok(match name {
        "theta" => {
            need1(dim)?;
            (FunctionHandle::real("theta", f64::abs), "|x|".into())
        }
        "identity" => {
            need_pos(dim)?;
            (FunctionHandle::identity(dim).with_label("identity"), "x".into())
        }
        "square" => {
            need1(dim)?;
            (FunctionHandle::real("square", |x| x * x), "x^2".into())
        }
        "cube_root" => {
            need1(dim)?;
            (FunctionHandle::real("cube_root", f64::cbrt), "x^(1/3)".into())
        }
        "x_sin_inv_x" => {
            need1(dim)?;
            (real_at_zero("x_sin_inv_x", |x| x * (1.0 / x).sin()), "x sin(1/x), 0 at 0".into())
        }
        "x2_sin_inv_x" => {
            need1(dim)?;
            (real_at_zero("x2_sin_inv_x", |x| x * x * (1.0 / x).sin()), "x^2 sin(1/x), 0 at 0".into())
        }
        "x2_sin_inv_x2" => {
            need1(dim)?;
            (real_at_zero("x2_sin_inv_x2", |x| x * x * (1.0 / (x * x)).sin()), "x^2 sin(1/x^2), 0 at 0".into())
        }
        "x_sin_log" => {
            need1(dim)?;
            (real_at_zero("x_sin_log", |x| x * x.abs().ln().sin()), "x sin(log|x|), 0 at 0".into())
        }
        "x_sin_log_log" => {
            need1(dim)?;
            let f = FunctionHandle::real("x_sin_log_log", |x| {
                if x == 0.0 || x.abs() == 1.0 {
                    0.0
                } else {
                    x * x.abs().ln().abs().ln().sin()
                }
            })
            .with_domain(|x| x[0].abs() != 1.0);
            (f, "x sin(log|log|x||), 0 at 0".into())
        }
        "x_sin_y_over_x" => {
            need2(dim)?;
            let f = FunctionHandle::scalar("x_sin_y_over_x", 2, |p| if p[0] == 0.0 { 0.0 } else { p[0] * (p[1] / p[0]).sin() });
            (f, "x sin(y/x), 0 on x = 0".into())
        }
        "xy2_over_x2y2" => {
            need2(dim)?;
            let f = FunctionHandle::scalar("xy2_over_x2y2", 2, |p| {
                let d = p[0] * p[0] + p[1] * p[1];
                if d == 0.0 {
                    0.0
                } else {
                    p[0] * p[1] * p[1] / d
                }
            });
            (f, "x y^2/(x^2+y^2), 0 at 0".into())
        }
        "giseh" => {
            need1(dim)?;
            (FunctionHandle::real("giseh", cantor_distance), "distance to the union of 3^n K".into())
        }
        "max" => {
            need_pos(dim)?;
            (FunctionHandle::scalar("max", dim, max_of), "max_i x_i".into())
        }
        "min" => {
            need_pos(dim)?;
            (FunctionHandle::scalar("min", dim, min_of), "min_i x_i".into())
        }
        "n1" => {
            need_pos(dim)?;
            (FunctionHandle::scalar("n1", dim, |x| Norm::L1.norm(x)), "sum_i |x_i|".into())
        }
        "n2" => {
            need_pos(dim)?;
            (FunctionHandle::scalar("n2", dim, |x| Norm::L2.norm(x)), "euclidean norm".into())
        }
        "ninf" => {
            need_pos(dim)?;
            (FunctionHandle::scalar("ninf", dim, |x| Norm::LInf.norm(x)), "max_i |x_i|".into())
        }
        "fp1" => (fp_map(Norm::L1, dim), "sin(log ||x||_1) x".into()),
        "fp2" => (fp_map(Norm::L2, dim), "sin(log ||x||_2) x".into()),
        "fpinf" => (fp_map(Norm::LInf, dim), "sin(log ||x||_inf) x".into()),
        "fractal_sin" => {
            need1(dim)?;
            let sin = FunctionHandle::real("sin", f64::sin);
            let f = fractal_from_periodic(&sin, 2.0 * PI).expect("sin is 2π-periodic").with_label("fractal_sin");
            (f, "x sin(log|x|) built from sin with period 2 pi".into())
        }
        _ => return Err(CatalogError::Unknown(name.into())),
    })
}

fn default_dim(name: &str) -> usize {
    match name {
        "x_sin_y_over_x" | "xy2_over_x2y2" | "max" | "min" | "n1" | "n2" | "ninf" | "fp1" | "fp2" | "fpinf" => 2,
        _ => 1,
    }
}

fn ground_truth(name: &str, dim: usize) -> Vec<GroundTruth> {
    let z = vec![0.0; dim];
    let third = vec![1.0 / 3.0];
    match name {
        "theta" => vec![truth(z, "2/2''/5", "c0 lsl ll tang gdiff nf !diff !stdr", Some(true))],
        "identity" => vec![truth(z, "linear", "c0 lsl ll tang gdiff nf diff stdr", Some(false))],
        "square" => vec![truth(z, "smooth", "c0 lsl ll tang gdiff nf diff stdr", None)],
        "cube_root" => vec![truth(z, "8", "c0 !lsl !ll !tang !gdiff !nf !diff !stdr", Some(false))],
        "x_sin_inv_x" => vec![truth(z, "7", "c0 lsl !ll !tang !gdiff !nf !diff !stdr", None)],
        "x2_sin_inv_x" => vec![truth(z, "1", "c0 lsl ll tang gdiff nf diff stdr", None)],
        "x2_sin_inv_x2" => vec![truth(z, "6", "c0 lsl !ll tang gdiff nf diff stdr", None)],
        "x_sin_log" => {
            let spec = format!("c0 lsl ll tang !gdiff !nf@0.5 !nf@{} nf@{} !diff !stdr", 1.0 / 3.0, r_2pi());
            vec![truth(z, "3", &spec, None)]
        }
        "x_sin_log_log" => vec![truth(z, "4", "c0 lsl ll !gdiff !nf !diff !stdr", None)],
        "x_sin_y_over_x" => vec![truth(z, "R-homogeneous", "c0 lsl !ll !tang !gdiff !nf !diff !stdr", None)],
        "xy2_over_x2y2" => vec![truth(z, "2'", "c0 lsl ll tang gdiff nf !diff stdr", None)],
        "giseh" => vec![
            truth_rs(vec![2.0], "K+ point", "c0 lsl ll tang !gdiff nf !diff !stdr", third.clone()),
            truth_rs(vec![1.0], "K- point", "c0 lsl ll tang !gdiff nf !diff !stdr", third),
        ],
        "max" => vec![truth(z, "max at 0", "c0 lsl ll tang gdiff nf !diff !stdr", Some(false))],
        "min" => vec![truth(z, "min at 0", "c0 lsl ll tang gdiff nf !diff !stdr", Some(false))],
        "n1" | "n2" | "ninf" => vec![truth(z, "norm at 0", "c0 lsl ll tang gdiff nf !diff !stdr", Some(true))],
        _ => vec![],
    }
}

/// The entry with its default dimension.
pub fn entry(name: &str) -> Result<CatalogEntry, CatalogError> {
    entry_with_dim(name, default_dim(name))
}

pub fn entry_with_dim(name: &str, dim: usize) -> Result<CatalogEntry, CatalogError> {
    let (handle, formula) = handle_for(name, dim)?;
    Ok(CatalogEntry { name: name.into(), formula, handle, ground_truth: ground_truth(name, dim) })
}

pub fn entries() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| entry(n).expect("registered")).collect()
}

/// Indices attaining `max_i key(a_i)` up to `tie`.
fn ties(values: &[f64], tie: f64, want_max: bool) -> Vec<usize> {
    let best = if want_max { max_of(values) } else { min_of(values) };
    (0..values.len())
        .filter(|&i| if want_max { values[i] >= best - tie } else { values[i] <= best + tie })
        .collect()
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Exact contact of a catalog entry at `a` for the monoid `m`.
///
/// The max/min/norm formulas use index sets computed with tie tolerance
/// [`TIE_TOL`]; near-ties flip the contact discontinuously, as the sets do.
pub fn contact_closed_form(name: &str, a: &[f64], m: &ValuedMonoid) -> Result<FunctionHandle, CatalogError> {
    let none = || CatalogError::NoClosedForm(name.into(), a.to_vec());
    let n = a.len();
    let zero = a.iter().all(|v| *v == 0.0);
    let label = format!("k {name}");
    let real_monoid = m.is_real();
    let h = match name {
        "theta" if n == 1 => {
            if a[0] == 0.0 {
                FunctionHandle::real(label, f64::abs)
            } else {
                FunctionHandle::linear(vec![vec![sgn(a[0])]])
            }
        }
        "identity" => FunctionHandle::identity(n),
        "square" if n == 1 => FunctionHandle::linear(vec![vec![2.0 * a[0]]]),
        "max" | "min" => {
            let idx = ties(a, TIE_TOL, name == "max");
            let is_max = name == "max";
            FunctionHandle::scalar(label, n, move |x| {
                let v: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
                if is_max {
                    max_of(&v)
                } else {
                    min_of(&v)
                }
            })
        }
        "n1" => {
            let a1 = a.to_vec();
            FunctionHandle::scalar(label, n, move |x| {
                x.iter()
                    .zip(&a1)
                    .map(|(xi, ai)| if ai.abs() <= TIE_TOL { xi.abs() } else { sgn(*ai) * xi })
                    .sum()
            })
        }
        "n2" => {
            if zero {
                FunctionHandle::scalar(label, n, |x| Norm::L2.norm(x))
            } else {
                let s = Norm::L2.norm(a);
                FunctionHandle::linear(vec![a.iter().map(|v| v / s).collect()]).with_label(label)
            }
        }
        "ninf" => {
            if zero {
                FunctionHandle::scalar(label, n, |x| Norm::LInf.norm(x))
            } else {
                let abs: Vec<f64> = a.iter().map(|v| v.abs()).collect();
                let idx = ties(&abs, TIE_TOL, true);
                let signs: Vec<f64> = a.iter().map(|v| sgn(*v)).collect();
                FunctionHandle::scalar(label, n, move |x| max_of(&idx.iter().map(|&i| signs[i] * x[i]).collect::<Vec<_>>()))
            }
        }
        "xy2_over_x2y2" if zero => entry("xy2_over_x2y2")?.handle,
        "x_sin_y_over_x" if zero && real_monoid => entry("x_sin_y_over_x")?.handle,
        "x_sin_log" | "fractal_sin" if zero => {
            let r = m.ratio().ok_or_else(none)?;
            // ratios e^{−2πk}
            let k = r.ln() / (-2.0 * PI);
            if (k - k.round()).abs() > 1e-9 || k.round() < 1.0 {
                return Err(none());
            }
            entry("x_sin_log")?.handle
        }
        "fp1" | "fp2" | "fpinf" if zero => {
            let r = m.ratio().ok_or_else(none)?;
            let k = r.ln() / (-2.0 * PI);
            if (k - k.round()).abs() > 1e-9 || k.round() < 1.0 {
                return Err(none());
            }
            entry_with_dim(name, n)?.handle
        }
        "giseh" if n == 1 => {
            let power_of_third = m.ratio().is_some_and(|r| {
                let k = -r.ln() / 3f64.ln();
                (k - k.round()).abs() < 1e-9 && k.round() >= 1.0
            });
            let loc = cantor_locate(a[0]);
            if loc.in_kinf {
                if !power_of_third {
                    return Err(none());
                }
                if a[0] == 0.0 || loc.in_kplus {
                    FunctionHandle::real(label, cantor_distance)
                } else if loc.in_kminus {
                    FunctionHandle::real(label, |x| cantor_distance(-x))
                } else {
                    return Err(none());
                }
            } else if let Some((lo, hi)) = loc.bracket {
                let (dl, dr) = (a[0] - lo, hi - a[0]);
                if (dl - dr).abs() <= TIE_TOL * a[0].abs().max(1.0) {
                    FunctionHandle::real(label, |x| -x.abs())
                } else {
                    FunctionHandle::linear(vec![vec![if dl < dr { 1.0 } else { -1.0 }]])
                }
            } else {
                // negative a: g(x) = −x nearby
                FunctionHandle::linear(vec![vec![-1.0]])
            }
        }
        _ => return Err(none()),
    };
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_resolve() {
        for e in entries() {
            assert!(!e.formula.is_empty());
            assert_eq!(e.handle.eval(&vec![0.0; e.dim_in()]).len(), e.dim_out());
        }
        assert!(matches!(entry("nope"), Err(CatalogError::Unknown(_))));
        assert!(entry_with_dim("theta", 2).is_err());
    }

    #[test]
    fn entry_examples() {
        let t = entry("theta").unwrap();
        assert_eq!(t.handle.eval(&[-3.0]), vec![3.0]);
        let g = &t.truth_at(&[0.0]).unwrap().flags;
        assert_eq!((g.c0, g.lsl, g.ll, g.tangentiable, g.gdiff, g.differentiable), (Tri::Yes, Tri::Yes, Tri::Yes, Tri::Yes, Tri::Yes, Tri::No));
        let s = entry("x_sin_inv_x").unwrap();
        assert_eq!(s.handle.eval(&[0.0]), vec![0.0]);
        let g = &s.truth_at(&[0.0]).unwrap().flags;
        assert_eq!((g.c0, g.lsl, g.tangentiable), (Tri::Yes, Tri::Yes, Tri::No));
        let x = entry("xy2_over_x2y2").unwrap();
        let g = &x.truth_at(&[0.0, 0.0]).unwrap().flags;
        assert_eq!((g.std_r_contactable, g.differentiable), (Tri::Yes, Tri::No));
    }

    #[test]
    fn closed_forms() {
        let m = ValuedMonoid::NonnegReals;
        let h = contact_closed_form("max", &[1.0, 1.0, 0.0], &m).unwrap();
        assert_eq!(h.eval(&[0.2, -0.5, 9.0]), vec![0.2]);
        let h = contact_closed_form("n1", &[0.0, 2.0], &m).unwrap();
        assert_eq!(h.eval(&[-1.5, -1.0]), vec![0.5]);
        let h = contact_closed_form("n2", &[0.0, 0.0], &m).unwrap();
        assert_eq!(h.eval(&[3.0, 4.0]), vec![5.0]);
        let h = contact_closed_form("ninf", &[-2.0, 2.0], &m).unwrap();
        assert_eq!(h.eval(&[1.0, -3.0]), vec![-1.0]);
        assert!(contact_closed_form("x_sin_inv_x", &[0.0], &m).is_err());
        let h = contact_closed_form("giseh", &[0.5], &m).unwrap();
        assert_eq!(h.eval(&[1.0]), vec![-1.0]);
    }

    #[test]
    fn fp_examples() {
        let f = fp_map(Norm::L2, 2);
        let e = std::f64::consts::E;
        let v = f.eval(&[e, 0.0]);
        assert!((v[0] - 1f64.sin() * e).abs() < 1e-15 && v[1] == 0.0);
        assert_eq!(fp_map(Norm::L1, 3).eval(&[0.0; 3]), vec![0.0; 3]);
        let r = r_2pi();
        for x in [[0.3, -0.2], [1.7, 4.0]] {
            let lhs = f.eval(&[r * x[0], r * x[1]]);
            let rhs: Vec<f64> = f.eval(&x).iter().map(|v| r * v).collect();
            assert!((lhs[0] - rhs[0]).abs() < 1e-15 && (lhs[1] - rhs[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn fractal_constructor() {
        let sin = FunctionHandle::real("sin", f64::sin);
        let phi = fractal_from_periodic(&sin, 2.0 * PI).unwrap();
        let x = entry("x_sin_log").unwrap().handle;
        for t in [-2.0, 0.0, 0.1, 3.3] {
            assert_eq!(phi.eval(&[t]), x.eval(&[t]));
        }
        let c = FunctionHandle::real("c", |_| 2.5);
        let lin = fractal_from_periodic(&c, 1.0).unwrap();
        assert_eq!(lin.eval(&[-4.0]), vec![-10.0]);
        assert!(fractal_from_periodic(&sin, 3.0).is_err());
    }
}
