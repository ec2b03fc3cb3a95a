//! Estimators for tangency, (semi-)lipschitzian behaviour, jet distances and
//! lipschitzian ratios of homogeneous maps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::handle::FunctionHandle;
use crate::search::{self, maximize, rng_for, Region};
use crate::spaces::{ContractingSpace, Norm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TangencyError {
    #[error("maps differ at the base point: {fa:?} vs {ga:?}")]
    NotComparable { fa: Vec<f64>, ga: Vec<f64> },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("base point {0:?} is outside the domain")]
    OutOfDomain(Vec<f64>),
    #[error("quotient trace is unbounded (last value {last})")]
    Unbounded { last: f64, trace: Vec<f64> },
    #[error("invalid sampling configuration: {0}")]
    InvalidConfig(String),
}

/// Sampling and tolerance settings shared by every estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub radii: Vec<f64>,
    pub samples_per_shell: usize,
    /// Seeded directions, on top of the `±e_i`.
    pub direction_count: usize,
    pub tol_zero: f64,
    pub tol_rel: f64,
    pub seed: u64,
    pub divergence_bound: f64,
    pub norm: Norm,
    /// Ratio of the geometric scalar schedule for real monoids.
    pub seed_ratio: f64,
    /// Longest scalar schedule, also the `r^n` depth cap.
    pub depth_cap: usize,
    /// Smallest valuation used away from a fixed origin, relative to the size of `a` and `f(a)`.
    pub scale_floor: f64,
    /// Local refinement steps after sampling.
    pub refine_iters: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            radii: (1..=10).map(|k| 10f64.powi(-k)).collect(),
            samples_per_shell: 256,
            direction_count: 64,
            tol_zero: 1e-6,
            tol_rel: 1e-3,
            seed: 0,
            divergence_bound: 1e9,
            norm: Norm::L2,
            seed_ratio: 0.5,
            depth_cap: 40,
            scale_floor: 1e-9,
            refine_iters: 60,
        }
    }
}

impl SamplingConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), TangencyError> {
        if self.radii.is_empty() {
            return Err(TangencyError::InvalidConfig("no radii".into()));
        }
        if self.radii.iter().any(|r| !(*r > 0.0)) || self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(TangencyError::InvalidConfig("radii must be positive and strictly decreasing".into()));
        }
        if !(self.seed_ratio > 0.0 && self.seed_ratio < 1.0) {
            return Err(TangencyError::InvalidConfig("seed_ratio must lie in (0,1)".into()));
        }
        if self.depth_cap < 3 {
            return Err(TangencyError::InvalidConfig("depth_cap must be at least 3".into()));
        }
        Ok(())
    }
}

/// Sup of the tangency quotient per radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientTrace {
    pub radii: Vec<f64>,
    pub sup_quotients: Vec<f64>,
    pub argmax_points: Vec<Vec<f64>>,
}

impl QuotientTrace {
    /// Rows of `(radius, sup_quotient, argmax…)`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.radii
            .iter()
            .zip(&self.sup_quotients)
            .zip(&self.argmax_points)
            .map(|((r, q), p)| {
                let mut row = vec![*r, *q];
                row.extend(p);
                row
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TangencyStatus {
    Tangent,
    NotTangent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangencyVerdict {
    pub status: TangencyStatus,
    pub limit_estimate: f64,
    pub trace: QuotientTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    pub holds: bool,
    pub k_estimate: f64,
    pub trace: Vec<f64>,
}

/// Which sup formula applies to a homogeneous map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HomogClass {
    General,
    RplusHomog,
    RFractal(f64),
}

/// Last value, if the last three entries agree pairwise within `tol_rel·(1+|v|)`.
pub fn converged(values: &[f64], tol_rel: f64) -> Option<f64> {
    if values.len() < 3 {
        return None;
    }
    let w = &values[values.len() - 3..];
    let last = w[2];
    if !w.iter().all(|v| v.is_finite()) {
        return None;
    }
    let ok = (0..3).all(|i| (i + 1..3).all(|j| (w[i] - w[j]).abs() < tol_rel * (1.0 + last.abs())));
    ok.then_some(last)
}

/// `(max − min, mean)` over the last `window` entries.
pub fn tail_range(values: &[f64], window: usize) -> (f64, f64) {
    let w = &values[values.len().saturating_sub(window)..];
    if w.is_empty() {
        return (0.0, 0.0);
    }
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
    (max - min, w.iter().sum::<f64>() / w.len() as f64)
}

/// The last four entries increase geometrically (factor at least 1.5 per step).
pub fn grows(values: &[f64]) -> bool {
    if values.len() < 4 {
        return false;
    }
    let w = &values[values.len() - 4..];
    w[0] > 0.0 && w.windows(2).all(|p| p[1] >= 1.5 * p[0])
}

/// The last four entries decrease geometrically toward 0.
pub fn decays(values: &[f64]) -> bool {
    if values.len() < 4 {
        return false;
    }
    let w = &values[values.len() - 4..];
    w.windows(2).all(|p| p[1] <= p[0] / 1.5)
}

fn check_pair(f: &FunctionHandle, g: &FunctionHandle, a: &[f64], cfg: &SamplingConfig) -> Result<(), TangencyError> {
    if f.dim_in != g.dim_in || f.dim_out != g.dim_out || a.len() != f.dim_in {
        return Err(TangencyError::DimensionMismatch(format!(
            "{} and {} at a point of length {}",
            f.label,
            g.label,
            a.len()
        )));
    }
    if !f.in_domain(a) || !g.in_domain(a) {
        return Err(TangencyError::OutOfDomain(a.to_vec()));
    }
    let (fa, ga) = (f.eval(a), g.eval(a));
    if cfg.norm.dist(&fa, &ga) > cfg.tol_zero {
        return Err(TangencyError::NotComparable { fa, ga });
    }
    Ok(())
}

fn quotient_sup_at(
    f: &FunctionHandle,
    g: &FunctionHandle,
    a: &[f64],
    r: f64,
    cfg: &SamplingConfig,
    salt: u64,
) -> (f64, Vec<f64>) {
    let norm = cfg.norm;
    let region = Region::ball(a, r, norm);
    let keep = |x: &[f64]| f.in_domain(x) && g.in_domain(x);
    let mut rng = rng_for(cfg.seed, "quotient", salt);
    let pts = region.samples(cfg.direction_count, cfg.samples_per_shell, &keep, &mut rng);
    let obj = |x: &[f64]| {
        let d = norm.dist(x, a);
        (d > 0.0).then(|| norm.dist(&f.eval(x), &g.eval(x)) / d)
    };
    let accept = |x: &[f64]| region.contains(x) && keep(x);
    let best = maximize(&obj, &pts, &accept, r, cfg.refine_iters, &mut rng);
    (best.value, best.argmax)
}

/// `d^r(f,g)`: sup of `d(f(x),g(x))/d(x,a)` over `B'(a,r)`, estimated by sampling.
pub fn quotient_sup(
    f: &FunctionHandle,
    g: &FunctionHandle,
    a: &[f64],
    r: f64,
    cfg: &SamplingConfig,
) -> Result<f64, TangencyError> {
    check_pair(f, g, a, cfg)?;
    Ok(quotient_sup_at(f, g, a, r, cfg, r.to_bits()).0)
}

pub fn quotient_trace(
    f: &FunctionHandle,
    g: &FunctionHandle,
    a: &[f64],
    cfg: &SamplingConfig,
) -> Result<QuotientTrace, TangencyError> {
    cfg.validate()?;
    check_pair(f, g, a, cfg)?;
    let mut trace = QuotientTrace { radii: vec![], sup_quotients: vec![], argmax_points: vec![] };
    for &r in &cfg.radii {
        let (v, p) = quotient_sup_at(f, g, a, r, cfg, r.to_bits());
        trace.radii.push(r);
        trace.sup_quotients.push(v);
        trace.argmax_points.push(p);
    }
    Ok(trace)
}

pub fn tangency_test(
    f: &FunctionHandle,
    g: &FunctionHandle,
    a: &[f64],
    cfg: &SamplingConfig,
) -> Result<TangencyVerdict, TangencyError> {
    let trace = quotient_trace(f, g, a, cfg)?;
    let q = &trace.sup_quotients;
    let last = *q.last().unwrap();
    let (status, limit) = if last <= cfg.tol_zero || decays(q) {
        (TangencyStatus::Tangent, last)
    } else if let Some(v) = converged(q, cfg.tol_rel) {
        (TangencyStatus::NotTangent, v)
    } else {
        (TangencyStatus::Inconclusive, last)
    };
    Ok(TangencyVerdict { status, limit_estimate: limit, trace })
}

fn tail_max(values: &[f64]) -> f64 {
    values[values.len().saturating_sub(3)..].iter().cloned().fold(0.0, f64::max)
}

/// `d(f,g) = lim d^r(f,g)`, extrapolated from the tail of the quotient trace.
pub fn jet_distance(f: &FunctionHandle, g: &FunctionHandle, a: &[f64], cfg: &SamplingConfig) -> Result<f64, TangencyError> {
    let trace = quotient_trace(f, g, a, cfg)?;
    let q = trace.sup_quotients;
    let last = *q.last().unwrap();
    if q.iter().any(|v| *v > cfg.divergence_bound) || grows(&q) {
        return Err(TangencyError::Unbounded { last, trace: q });
    }
    if last <= cfg.tol_zero || decays(&q) {
        return Ok(0.0);
    }
    Ok(tail_max(&q))
}

/// Semi-lipschitz estimate at `a`: sup of `d(f(x),f(a))/d(x,a)` over shrinking balls.
pub fn lsl_test(f: &FunctionHandle, a: &[f64], cfg: &SamplingConfig) -> LipschitzEstimate {
    if !f.in_domain(a) {
        return LipschitzEstimate { holds: false, k_estimate: f64::INFINITY, trace: vec![] };
    }
    let c = FunctionHandle::constant(f.dim_in, f.eval(a));
    let q: Vec<f64> = cfg.radii.iter().map(|&r| quotient_sup_at(f, &c, a, r, cfg, r.to_bits() ^ 0x5151).0).collect();
    let unbounded = q.iter().any(|v| *v > cfg.divergence_bound) || grows(&q);
    let k = if decays(&q) { 0.0 } else { tail_max(&q) };
    LipschitzEstimate { holds: !unbounded, k_estimate: k, trace: q }
}

/// Smallest step whose difference quotient is above floating-point rounding.
fn diff_floor(p: &[f64], fp: &[f64]) -> f64 {
    1e-9 * p.iter().chain(fp).fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Sup of `d(f(p+δu), f(p))/δ` over sampled base points, directions and offsets,
/// one value per entry of `deltas` (absolute step lengths). Pairs stay in the ball;
/// differences within `100·noise` of 0 are ignored.
fn slope_profile(
    f: &FunctionHandle,
    a: &[f64],
    r: f64,
    deltas: &[f64],
    bases: usize,
    cfg: &SamplingConfig,
    salt: u64,
) -> Vec<f64> {
    let norm = cfg.norm;
    let region = Region::ball(a, r, norm);
    let keep = |x: &[f64]| f.in_domain(x);
    let mut rng = rng_for(cfg.seed, "slope", salt);
    let mut pts = region.samples(4, bases, &keep, &mut rng);
    pts.push(a.to_vec());
    // points at geometric distances from each coordinate hyperplane through `a`
    for i in 0..f.dim_in {
        for k in 2..=16 {
            for _ in 0..2 {
                let mut p = search::offset(a, &search::random_unit(f.dim_in, norm, &mut rng), 0.5 * r);
                p[i] = a[i] + 10f64.powf(-0.5 * k as f64) * r;
                if region.contains(&p) && keep(&p) {
                    pts.push(p);
                }
            }
        }
    }
    let dirs = search::direction_set(f.dim_in, 2, norm, &mut rng);
    let mut out = vec![0.0f64; deltas.len()];
    for p in &pts {
        let fp = f.eval(p);
        let floor = diff_floor(p, &fp);
        for (k, &d) in deltas.iter().enumerate() {
            if d < floor {
                continue;
            }
            for u in &dirs {
                let q = search::offset(p, u, d);
                if norm.dist(&q, a) > r || !f.in_domain(&q) {
                    continue;
                }
                let diff = norm.dist(&f.eval(&q), &fp);
                if diff <= 100.0 * f.noise {
                    continue;
                }
                let v = diff / d;
                if v.is_finite() && v > out[k] {
                    out[k] = v;
                }
            }
        }
    }
    out
}

/// True when slopes keep growing as the step shrinks: at least ×8 over the
/// last three decades and ×10 overall.
fn refinement_blowup(profile: &[f64]) -> bool {
    let resolved: Vec<f64> = profile.iter().cloned().filter(|v| *v > 0.0).collect();
    if resolved.len() < 4 {
        return false;
    }
    let n = resolved.len();
    resolved[n - 1] >= 8.0 * resolved[n - 4] && resolved[n - 1] >= 10.0 * resolved[0]
}

const PROFILE_DELTAS: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Local lipschitz estimate at `a`: sup of pairwise quotients over shrinking balls.
pub fn ll_test(f: &FunctionHandle, a: &[f64], cfg: &SamplingConfig) -> LipschitzEstimate {
    if !f.in_domain(a) {
        return LipschitzEstimate { holds: false, k_estimate: f64::INFINITY, trace: vec![] };
    }
    let mut trace = Vec::new();
    for &r in &cfg.radii {
        let deltas = [r * 1e-1, r * 1e-3, r * 1e-5, r * 1e-7];
        let prof = slope_profile(f, a, r, &deltas, cfg.samples_per_shell, cfg, r.to_bits());
        let v = prof.iter().cloned().fold(0.0, f64::max);
        if v > 0.0 {
            trace.push(v);
        }
    }
    let r0 = cfg.radii[0];
    let deltas: Vec<f64> = PROFILE_DELTAS.iter().map(|d| d * r0).collect();
    let prof = slope_profile(f, a, r0, &deltas, cfg.samples_per_shell, cfg, 0xb10b);
    let unbounded = trace.iter().any(|v| *v > cfg.divergence_bound) || grows(&trace) || refinement_blowup(&prof);
    LipschitzEstimate { holds: !unbounded, k_estimate: tail_max(&trace), trace }
}

/// Lipschitz check for a map homogeneous about `center`: slope profile on the unit ball.
pub fn homogeneous_lipschitz(h: &FunctionHandle, center: &[f64], cfg: &SamplingConfig, bases: usize) -> LipschitzEstimate {
    let deltas: Vec<f64> = PROFILE_DELTAS.to_vec();
    let prof = slope_profile(h, center, 1.0, &deltas, bases, cfg, 0x40b0);
    let k = prof.iter().cloned().fold(0.0, f64::max);
    let holds = k <= cfg.divergence_bound && !refinement_blowup(&prof);
    LipschitzEstimate { holds, k_estimate: k, trace: prof }
}

/// Evidence against tangentiability from pairs at a fixed relative separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalePairEvidence {
    pub refutes: bool,
    /// `c·Q_c(r) / LSL(r)` with `c = 10⁻³`, for the last radii.
    pub statistic: Vec<f64>,
}

/// If `g` is `k`-lipschitz near `a` and tangent to `f`, pairs `x, y` with
/// `d(x,y) = c·d(x,a)` satisfy `d(f(x),f(y)) ≤ (k + (2+c)ε/c)·d(x,y)` with `ε → 0`.
/// A statistic `c·Q_c / LSL` that stays of order 1 at the smallest radii refutes this.
pub fn scale_pair_test(f: &FunctionHandle, a: &[f64], cfg: &SamplingConfig) -> ScalePairEvidence {
    let c = 1e-3;
    let norm = cfg.norm;
    let fa = f.eval(a);
    let mut stats = Vec::new();
    for &r in cfg.radii.iter().rev().take(3) {
        let region = Region::ball(a, r, norm);
        let mut rng = rng_for(cfg.seed, "scale-pair", r.to_bits());
        let keep = |x: &[f64]| f.in_domain(x);
        let pts = region.samples(cfg.direction_count / 4, cfg.samples_per_shell, &keep, &mut rng);
        let dirs = search::direction_set(f.dim_in, 4, norm, &mut rng);
        let (mut q, mut lsl) = (0.0f64, 0.0f64);
        for p in &pts {
            let dp = norm.dist(p, a);
            let fp = f.eval(p);
            lsl = lsl.max(norm.dist(&fp, &fa) / dp);
            if c * dp < diff_floor(p, &fp) {
                continue;
            }
            for u in &dirs {
                let y = search::offset(p, u, c * dp);
                if !f.in_domain(&y) {
                    continue;
                }
                q = q.max(norm.dist(&f.eval(&y), &fp) / (c * dp));
            }
        }
        stats.push(if lsl > cfg.tol_zero { c * q / lsl } else { 0.0 });
    }
    let refutes = stats.len() == 3 && stats.iter().all(|s| *s >= 0.5);
    ScalePairEvidence { refutes, statistic: stats }
}

fn homog_region(s: &ContractingSpace, class: HomogClass, eps: Option<f64>) -> Region {
    let base = s.base.clone();
    match (class, eps) {
        (HomogClass::General, _) => Region::ball(&base, 1.0, s.norm),
        (HomogClass::RplusHomog, None) => Region { center: base, inner: 1.0 - 1e-9, outer: 1.0, open: false, norm: s.norm },
        (HomogClass::RplusHomog, Some(e)) => Region { center: base, inner: (1.0 - e).max(0.0), outer: 1.0 + e, open: true, norm: s.norm },
        (HomogClass::RFractal(r), None) => Region { center: base, inner: r, outer: 1.0, open: false, norm: s.norm },
        (HomogClass::RFractal(r), Some(e)) => Region { center: base, inner: r, outer: 1.0 + e, open: true, norm: s.norm },
    }
}

/// `‖h‖` for a homogeneous map, using the sup formula of its class.
pub fn norm_homog(h: &FunctionHandle, s: &ContractingSpace, class: HomogClass, cfg: &SamplingConfig) -> f64 {
    let norm = s.norm;
    let w = &s.base;
    let hw = h.eval(w);
    let mut rng = rng_for(cfg.seed, "norm-homog", 0);
    let on_sphere = matches!(class, HomogClass::RplusHomog);
    let project = |x: &[f64]| -> Option<Vec<f64>> {
        let d = norm.dist(x, w);
        if d == 0.0 {
            return None;
        }
        Some(if on_sphere { w.iter().zip(x).map(|(c, v)| c + (v - c) / d).collect() } else { x.to_vec() })
    };
    let region = homog_region(s, class, None);
    let keep = |x: &[f64]| h.in_domain(x);
    let pts = if on_sphere {
        let mut p = search::direction_set(s.dim, cfg.direction_count + cfg.samples_per_shell, norm, &mut rng);
        p.iter_mut().for_each(|u| *u = search::offset(w, u, 1.0));
        p
    } else {
        region.samples(cfg.direction_count, cfg.samples_per_shell, &keep, &mut rng)
    };
    let obj = |x: &[f64]| {
        let y = project(x)?;
        if !h.in_domain(&y) {
            return None;
        }
        Some(norm.dist(&h.eval(&y), &hw) / norm.dist(&y, w))
    };
    let accept = |x: &[f64]| if on_sphere { project(x).is_some() } else { region.contains(x) && keep(x) };
    maximize(&obj, &pts, &accept, 1.0, cfg.refine_iters, &mut rng).value
}

/// `ρ` for a homogeneous map: sup of pairwise quotients over the class region
/// (unit ball, annulus `1−ε < ‖x‖ < 1+ε`, or fractal annulus `r < ‖x‖ < 1+ε`).
pub fn lipschitz_ratio_homog(
    h: &FunctionHandle,
    s: &ContractingSpace,
    class: HomogClass,
    eps: f64,
    cfg: &SamplingConfig,
) -> f64 {
    let norm = s.norm;
    let n = s.dim;
    let region = homog_region(s, class, if matches!(class, HomogClass::General) { None } else { Some(eps) });
    let scale = region.outer;
    let mut rng = rng_for(cfg.seed, "ratio-homog", 0);
    let keep = |x: &[f64]| h.in_domain(x);
    let pts = region.samples(cfg.direction_count, cfg.samples_per_shell, &keep, &mut rng);
    let dirs = search::direction_set(n, 4, norm, &mut rng);
    let min_sep = 1e-9 * scale + 1e4 * h.noise;
    let inside = |x: &[f64]| region.contains(x) && keep(x);
    let mut pairs: Vec<Vec<f64>> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        for &d in &[1e-1, 1e-3, 1e-5] {
            for u in &dirs {
                let q = search::offset(p, u, d * scale);
                if inside(&q) {
                    pairs.push(p.iter().chain(&q).cloned().collect());
                }
            }
        }
        let q = &pts[(i * 7 + 3) % pts.len()];
        if q != p {
            pairs.push(p.iter().chain(q).cloned().collect());
        }
    }
    let obj = |z: &[f64]| {
        let (x, y) = z.split_at(n);
        let d = norm.dist(x, y);
        (d >= min_sep).then(|| norm.dist(&h.eval(x), &h.eval(y)) / d)
    };
    let accept = |z: &[f64]| {
        let (x, y) = z.split_at(n);
        inside(x) && inside(y)
    };
    let joint = maximize(&obj, &pairs, &accept, scale, 2 * cfg.refine_iters, &mut rng).value;
    let q = |x: &[f64], y: &[f64]| {
        let d = norm.dist(x, y);
        (d >= min_sep && inside(x) && inside(y)).then(|| norm.dist(&h.eval(x), &h.eval(y)) / d)
    };
    let starts: Vec<(Vec<f64>, Vec<f64>)> =
        pairs.iter().map(|z| (z[..n].to_vec(), z[n..].iter().zip(&z[..n]).map(|(b, a)| b - a).collect())).collect();
    joint.max(search::maximize_pairs(&q, &starts, scale, 2 * cfg.refine_iters, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SamplingConfig {
        SamplingConfig::default()
    }

    #[test]
    fn quotient_sup_examples() {
        let id = FunctionHandle::identity(1);
        assert_eq!(quotient_sup(&id, &id, &[0.0], 1.0, &cfg()).unwrap(), 0.0);
        let sq = FunctionHandle::real("sq", |x| x * x);
        let z = FunctionHandle::zero(1, 1);
        let v = quotient_sup(&sq, &z, &[0.0], 0.1, &cfg()).unwrap();
        assert!((v - 0.1).abs() < 1e-12, "{v}");
        let abs = FunctionHandle::real("abs", f64::abs);
        assert_eq!(quotient_sup(&abs, &z, &[0.0], 0.37, &cfg()).unwrap(), 1.0);
        let one = FunctionHandle::constant(1, vec![1.0]);
        assert!(matches!(quotient_sup(&one, &z, &[0.0], 0.1, &cfg()), Err(TangencyError::NotComparable { .. })));
    }

    #[test]
    fn tangency_examples() {
        let f = FunctionHandle::real("x+x^2", |x| x + x * x);
        let id = FunctionHandle::identity(1);
        assert_eq!(tangency_test(&f, &id, &[0.0], &cfg()).unwrap().status, TangencyStatus::Tangent);
        let abs = FunctionHandle::real("abs", f64::abs);
        let v = tangency_test(&abs, &id, &[0.0], &cfg()).unwrap();
        assert_eq!(v.status, TangencyStatus::NotTangent);
        assert!((v.limit_estimate - 2.0).abs() < 1e-9);
        let f2 = FunctionHandle::real("x2sin", |x| if x == 0.0 { 0.0 } else { x * x * (1.0 / (x * x)).sin() });
        let z = FunctionHandle::zero(1, 1);
        assert_eq!(tangency_test(&f2, &z, &[0.0], &cfg()).unwrap().status, TangencyStatus::Tangent);
    }

    #[test]
    fn jet_distance_examples() {
        let l = FunctionHandle::linear(vec![vec![2.0]]);
        let z = FunctionHandle::zero(1, 1);
        assert!((jet_distance(&l, &z, &[0.0], &cfg()).unwrap() - 2.0).abs() < 1e-9);
        let f = FunctionHandle::real("xsinlog", |x| if x == 0.0 { 0.0 } else { x * x.abs().ln().sin() });
        let d = jet_distance(&f, &z, &[0.0], &cfg()).unwrap();
        assert!((d - 1.0).abs() < 1e-3, "{d}");
        assert_eq!(jet_distance(&f, &f, &[0.0], &cfg()).unwrap(), 0.0);
        let cube = FunctionHandle::real("cbrt", f64::cbrt);
        assert!(matches!(jet_distance(&cube, &z, &[0.0], &cfg()), Err(TangencyError::Unbounded { .. })));
    }

    #[test]
    fn lsl_examples() {
        let cube = FunctionHandle::real("cbrt", f64::cbrt);
        assert!(!lsl_test(&cube, &[0.0], &cfg()).holds);
        let f = FunctionHandle::real("xsin1/x", |x| if x == 0.0 { 0.0 } else { x * (1.0 / x).sin() });
        let e = lsl_test(&f, &[0.0], &cfg());
        assert!(e.holds && (e.k_estimate - 1.0).abs() < 1e-2, "{e:?}");
        let c = FunctionHandle::constant(1, vec![3.0]);
        let e = lsl_test(&c, &[0.5], &cfg());
        assert!(e.holds && e.k_estimate == 0.0);
    }

    #[test]
    fn ll_examples() {
        let abs = FunctionHandle::real("abs", f64::abs);
        let e = ll_test(&abs, &[0.0], &cfg());
        assert!(e.holds && (e.k_estimate - 1.0).abs() < 1e-9, "{e:?}");
        let f2 = FunctionHandle::real("x2sin", |x| if x == 0.0 { 0.0 } else { x * x * (1.0 / (x * x)).sin() });
        assert!(!ll_test(&f2, &[0.0], &cfg()).holds);
        let l = FunctionHandle::linear(vec![vec![3.0]]);
        let e = ll_test(&l, &[0.0], &cfg());
        assert!(e.holds && (e.k_estimate - 3.0).abs() < 1e-6);
        let f = FunctionHandle::scalar("xsin(y/x)", 2, |p| if p[0] == 0.0 { 0.0 } else { p[0] * (p[1] / p[0]).sin() });
        assert!(!ll_test(&f, &[0.0, 0.0], &cfg()).holds);
        let g = FunctionHandle::scalar("xy2", 2, |p| {
            let d = p[0] * p[0] + p[1] * p[1];
            if d == 0.0 { 0.0 } else { p[0] * p[1] * p[1] / d }
        });
        assert!(ll_test(&g, &[0.0, 0.0], &cfg()).holds);
    }

    #[test]
    fn homogeneous_norms() {
        let s = ContractingSpace::origin(1, crate::spaces::ValuedMonoid::NonnegReals);
        let abs = FunctionHandle::real("abs", f64::abs);
        assert!((norm_homog(&abs, &s, HomogClass::RplusHomog, &cfg()) - 1.0).abs() < 1e-12);
        let l = FunctionHandle::linear(vec![vec![3.0]]);
        let rho = lipschitz_ratio_homog(&l, &s, HomogClass::General, 0.5, &cfg());
        assert!((rho - 3.0).abs() < 1e-9, "{rho}");
    }

    #[test]
    fn scale_pairs_separate_oscillation_from_tangency() {
        let f = FunctionHandle::real("xsin1/x", |x| if x == 0.0 { 0.0 } else { x * (1.0 / x).sin() });
        assert!(scale_pair_test(&f, &[0.0], &cfg()).refutes);
        let g = FunctionHandle::real("xsinlog", |x| if x == 0.0 { 0.0 } else { x * x.abs().ln().sin() });
        assert!(!scale_pair_test(&g, &[0.0], &cfg()).refutes);
        let abs = FunctionHandle::real("abs", f64::abs);
        assert!(!scale_pair_test(&abs, &[0.0], &cfg()).refutes);
    }

    #[test]
    fn trace_helpers() {
        assert_eq!(converged(&[5.0, 1.0, 1.0005, 1.0], 1e-3), Some(1.0));
        assert_eq!(converged(&[1.0, 2.0], 1e-3), None);
        assert!(grows(&[1.0, 2.0, 4.0, 8.0]));
        assert!(!grows(&[1.0, 1.1, 1.2, 1.3]));
        assert!(decays(&[1.0, 0.1, 0.01, 0.001]));
        assert_eq!(tail_range(&[0.0, 1.0, 3.0], 2), (2.0, 2.0));
    }
}
