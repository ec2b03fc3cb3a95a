//! Contacts by the limit formula `kf_a(x) = lim (f(a + v(t)x) − f(a)) / v(t)`,
//! homogeneity checks and contact verification.

use serde::Serialize;
use thiserror::Error;

use crate::handle::FunctionHandle;
use crate::search::{self, rng_for, Region};
use crate::spaces::{star, valuation, scalar_schedule, ContractingSpace, Scalar, SpaceError, ValuedMonoid, Variant};
use crate::tangency::{self, tangency_test, SamplingConfig, TangencyError, TangencyStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("base point {0:?} is not an interior point of the domain")]
    NotInterior(Vec<f64>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TraceStatus {
    Converged,
    Oscillating,
    Diverged,
    Inconclusive,
}

/// Difference quotients along the scalar schedule, in one direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionalTrace {
    pub direction: Vec<f64>,
    /// `v(t_k)` for the kept schedule entries.
    pub scales: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub status: TraceStatus,
    pub limit: Option<Vec<f64>>,
    /// Largest pairwise distance among the last five values.
    pub tail_range: f64,
    /// Schedule entries skipped because `a + v x` left the domain.
    pub domain_exits: usize,
}

impl DirectionalTrace {
    /// Rows of `(v, q…)`.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.scales
            .iter()
            .zip(&self.values)
            .map(|(v, q)| std::iter::once(*v).chain(q.iter().cloned()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContactStatus {
    Contactable,
    NotContactable,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationWitness {
    pub direction: Vec<f64>,
    pub tail_range: f64,
    pub status: TraceStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContactVerdict {
    pub status: ContactStatus,
    pub monoid: ValuedMonoid,
    pub variant: Variant,
    pub base: Vec<f64>,
    pub traces: Vec<DirectionalTrace>,
    pub oscillation_witness: Option<OscillationWitness>,
    /// Set when the contact is not odd under the standard real action.
    pub odd_defect: Option<f64>,
    #[serde(skip)]
    pub contact_eval: Option<FunctionHandle>,
}

/// One-sided derivatives of a real function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GDiff1D {
    pub left: f64,
    pub right: f64,
}

impl GDiff1D {
    /// `t ↦ t·right` for `t ≥ 0`, `t·left` for `t ≤ 0`.
    pub fn assemble(&self) -> FunctionHandle {
        let (l, r) = (self.left, self.right);
        FunctionHandle::real("gdiff", move |t| if t >= 0.0 { t * r } else { t * l })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GDiffOutcome {
    GDiff(GDiff1D),
    NoGDiff { left: TraceStatus, right: TraceStatus },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub holds: bool,
    pub max_defect: f64,
    pub witness: Option<(Scalar, Vec<f64>)>,
}

/// Valuations below this are not used: products of several small coordinates
/// would underflow.
pub const MIN_SCALE: f64 = 1e-40;

fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Smallest usable valuation away from a fixed origin.
fn schedule_floor(a: &[f64], fa: &[f64], cfg: &SamplingConfig) -> f64 {
    if inf_norm(a) == 0.0 && inf_norm(fa) == 0.0 {
        0.0
    } else {
        cfg.scale_floor * (1.0 + inf_norm(a) + inf_norm(fa))
    }
}

fn classify_trace(values: &[Vec<f64>], cfg: &SamplingConfig) -> (TraceStatus, f64) {
    let norm = cfg.norm;
    let n = values.len();
    let tail = &values[n.saturating_sub(5)..];
    let mut range = 0.0f64;
    for i in 0..tail.len() {
        for j in i + 1..tail.len() {
            range = range.max(norm.dist(&tail[i], &tail[j]));
        }
    }
    if n == 0 {
        return (TraceStatus::Inconclusive, range);
    }
    let sizes: Vec<f64> = values.iter().map(|q| norm.norm(q)).collect();
    if sizes.iter().any(|s| !s.is_finite() || *s > cfg.divergence_bound) || tangency::grows(&sizes) {
        return (TraceStatus::Diverged, range);
    }
    if n >= 3 {
        let w = &values[n - 3..];
        let tol = cfg.tol_rel * (1.0 + norm.norm(&w[2]));
        if norm.dist(&w[0], &w[1]) < tol && norm.dist(&w[0], &w[2]) < tol && norm.dist(&w[1], &w[2]) < tol {
            return (TraceStatus::Converged, range);
        }
    }
    if tail.len() == 5 {
        let dim = tail[0].len();
        let mean: Vec<f64> = (0..dim).map(|k| tail.iter().map(|q| q[k]).sum::<f64>() / 5.0).collect();
        if range > cfg.tol_rel * (1.0 + norm.norm(&mean)) {
            return (TraceStatus::Oscillating, range);
        }
    }
    (TraceStatus::Inconclusive, range)
}

/// Quotients `(f(a + v(t_k)x) − f(a)) / v(t_k)` along `scalar_schedule(m)`.
pub fn directional_quotient(
    f: &FunctionHandle,
    a: &[f64],
    x: &[f64],
    m: &ValuedMonoid,
    cfg: &SamplingConfig,
) -> DirectionalTrace {
    let fa = f.eval(a);
    let floor = schedule_floor(a, &fa, cfg);
    let xn = inf_norm(x);
    let mut trace = DirectionalTrace {
        direction: x.to_vec(),
        scales: vec![],
        values: vec![],
        status: TraceStatus::Inconclusive,
        limit: None,
        tail_range: 0.0,
        domain_exits: 0,
    };
    let mut exited_last = false;
    for t in scalar_schedule(m, cfg.depth_cap + 1, cfg.seed_ratio) {
        let v = valuation(m, &t).expect("schedule scalars belong to the monoid");
        // the offset must stay well above the rounding of `a`
        if v < MIN_SCALE || v < floor || v * xn < 1e-3 * floor {
            break;
        }
        let p = search::offset(a, x, v);
        if !f.in_domain(&p) {
            trace.domain_exits += 1;
            exited_last = true;
            continue;
        }
        exited_last = false;
        let q: Vec<f64> = f.eval(&p).iter().zip(&fa).map(|(u, w)| (u - w) / v).collect();
        trace.scales.push(v);
        trace.values.push(q);
    }
    let (status, range) = classify_trace(&trace.values, cfg);
    trace.tail_range = range;
    trace.status = if exited_last && status != TraceStatus::Diverged { TraceStatus::Inconclusive } else { status };
    if trace.status == TraceStatus::Converged {
        trace.limit = trace.values.last().cloned();
    }
    trace
}

/// Scale `s` with `x / s` on the unit shell of the monoid: `‖x‖` for real monoids,
/// `r^k` with `r < ‖x/r^k‖ ≤ 1` for `ℕ_r`.
fn shell_scale(m: &ValuedMonoid, nx: f64) -> f64 {
    match m.ratio() {
        None => nx,
        Some(r) => {
            let mut k = (nx.ln() / r.ln()).floor() as i32;
            // guard the rounding of the logarithm
            while nx / r.powi(k) > 1.0 {
                k -= 1;
            }
            while nx / r.powi(k) <= r {
                k += 1;
            }
            r.powi(k)
        }
    }
}

/// The contact as a handle: each evaluation replays the limit on the unit shell
/// and rescales by homogeneity.
/// `spread` is the largest disagreement among the last values of the probed traces,
/// and serves as the noise level of the handle together with rounding.
fn contact_handle(f: &FunctionHandle, a: &[f64], m: ValuedMonoid, spread: f64, cfg: &SamplingConfig) -> FunctionHandle {
    let fa = f.eval(a);
    let floor = schedule_floor(a, &fa, cfg);
    let rounding = if floor == 0.0 { 0.0 } else { 4.0 * f64::EPSILON * (1.0 + inf_norm(a) + inf_norm(&fa)) / floor };
    let noise = rounding.max(spread);
    let (f1, a1, cfg1) = (f.clone(), a.to_vec(), cfg.clone());
    let dim_out = f.dim_out;
    let norm = cfg.norm;
    FunctionHandle::new(format!("k{}", f.label), f.dim_in, f.dim_out, move |x| {
        let nx = norm.norm(x);
        if nx == 0.0 {
            return vec![0.0; dim_out];
        }
        let s = shell_scale(&m, nx);
        let y: Vec<f64> = x.iter().map(|c| c / s).collect();
        let tr = directional_quotient(&f1, &a1, &y, &m, &cfg1);
        match tr.values.last() {
            Some(q) => q.iter().map(|c| c * s).collect(),
            None => vec![f64::NAN; dim_out],
        }
    })
    .with_noise(noise)
}

fn check_base(f: &FunctionHandle, a: &[f64]) -> Result<(), ContactError> {
    if a.len() != f.dim_in {
        return Err(ContactError::DimensionMismatch { expected: f.dim_in, got: a.len() });
    }
    if !f.in_domain(a) {
        return Err(ContactError::NotInterior(a.to_vec()));
    }
    Ok(())
}

/// Canonical contact for the monoid `m`.
pub fn estimate_contact(
    f: &FunctionHandle,
    a: &[f64],
    m: &ValuedMonoid,
    cfg: &SamplingConfig,
) -> Result<ContactVerdict, ContactError> {
    estimate_contact_variant(f, a, m, Variant::Canonical, cfg)
}

/// As [`estimate_contact`]; `Variant::StandardReal` also requires an odd contact.
pub fn estimate_contact_variant(
    f: &FunctionHandle,
    a: &[f64],
    m: &ValuedMonoid,
    variant: Variant,
    cfg: &SamplingConfig,
) -> Result<ContactVerdict, ContactError> {
    check_base(f, a)?;
    if variant == Variant::StandardReal && !m.is_real() {
        return Err(SpaceError::StandardNeedsReals(*m).into());
    }
    let mut rng = rng_for(cfg.seed, "contact-dirs", f.dim_in as u64);
    let dirs = search::direction_set(f.dim_in, cfg.direction_count, cfg.norm, &mut rng);
    let traces: Vec<DirectionalTrace> = dirs.iter().map(|u| directional_quotient(f, a, u, m, cfg)).collect();
    let witness = traces
        .iter()
        .find(|t| matches!(t.status, TraceStatus::Oscillating | TraceStatus::Diverged))
        .map(|t| OscillationWitness { direction: t.direction.clone(), tail_range: t.tail_range, status: t.status });
    let mut status = if witness.is_some() {
        ContactStatus::NotContactable
    } else if traces.iter().all(|t| t.status == TraceStatus::Converged) {
        ContactStatus::Contactable
    } else {
        ContactStatus::Inconclusive
    };
    let mut odd_defect = None;
    if status == ContactStatus::Contactable && variant == Variant::StandardReal {
        // directions come in ± pairs
        let mut worst = 0.0f64;
        for pair in traces.chunks(2) {
            let (p, q) = (pair[0].limit.as_ref().unwrap(), pair[1].limit.as_ref().unwrap());
            let sum: Vec<f64> = p.iter().zip(q).map(|(u, v)| u + v).collect();
            worst = worst.max(cfg.norm.norm(&sum) / (1.0 + cfg.norm.norm(p)));
        }
        if worst > cfg.tol_rel {
            status = ContactStatus::NotContactable;
            odd_defect = Some(worst);
        }
    }
    let spread = traces
        .iter()
        .map(|t| {
            let w = &t.values[t.values.len().saturating_sub(3)..];
            w.iter().flat_map(|p| w.iter().map(move |q| cfg.norm.dist(p, q))).fold(0.0, f64::max)
                / cfg.norm.norm(&t.direction).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    let contact_eval = (status == ContactStatus::Contactable).then(|| contact_handle(f, a, *m, spread, cfg));
    Ok(ContactVerdict {
        status,
        monoid: *m,
        variant,
        base: a.to_vec(),
        traces,
        oscillation_witness: witness,
        odd_defect,
        contact_eval,
    })
}

/// Left and right derivatives at `a`, or `NoGDiff` if either side fails to converge.
pub fn gdiff_1d(f: &FunctionHandle, a: f64, cfg: &SamplingConfig) -> GDiffOutcome {
    let m = ValuedMonoid::NonnegReals;
    if f.dim_in != 1 || !f.in_domain(&[a]) {
        return GDiffOutcome::NoGDiff { left: TraceStatus::Inconclusive, right: TraceStatus::Inconclusive };
    }
    let r = directional_quotient(f, &[a], &[1.0], &m, cfg);
    let l = directional_quotient(f, &[a], &[-1.0], &m, cfg);
    match (&r.limit, &l.limit) {
        (Some(rv), Some(lv)) => GDiffOutcome::GDiff(GDiff1D { left: -lv[0], right: rv[0] }),
        _ => GDiffOutcome::NoGDiff { left: l.status, right: r.status },
    }
}

fn test_scalars(m: &ValuedMonoid, variant: Variant) -> Vec<Scalar> {
    let reals = |v: &[f64]| v.iter().map(|t| Scalar::Real(*t)).collect::<Vec<_>>();
    match (m, variant) {
        (ValuedMonoid::NrMonoid(_), _) => {
            let mut s = vec![Scalar::Infinity];
            s.extend((0..=8).map(Scalar::Nat));
            s.push(Scalar::Nat(20));
            s
        }
        (ValuedMonoid::UnitInterval, _) => reals(&[0.0, 1.0, 0.5, 0.25, 0.1, 1e-3, 0.731, 0.0625]),
        (ValuedMonoid::Reals, Variant::StandardReal) => {
            reals(&[0.0, 1.0, 0.5, 0.25, 0.1, 1e-3, 2.0, 1.7, -1.0, -0.5, -2.0, -0.3])
        }
        _ => reals(&[0.0, 1.0, 0.5, 0.25, 0.1, 1e-3, 2.0, 1.7]),
    }
}

/// Checks `h(t⋆x) = t⋆h(x)` on sampled scalars and points of the ball of radius 2.
pub fn homogeneity_check(
    h: &FunctionHandle,
    m: &ValuedMonoid,
    s_dom: &ContractingSpace,
    s_cod: &ContractingSpace,
    cfg: &SamplingConfig,
) -> Result<HomogeneityReport, ContactError> {
    if h.dim_in != s_dom.dim || h.dim_out != s_cod.dim {
        return Err(ContactError::DimensionMismatch { expected: s_dom.dim, got: h.dim_in });
    }
    let dom = ContractingSpace { monoid: *m, ..s_dom.clone() };
    let cod = ContractingSpace { monoid: *m, ..s_cod.clone() };
    let mut rng = rng_for(cfg.seed, "homogeneity", 0);
    let keep = |x: &[f64]| h.in_domain(x);
    let pts = Region::ball(&dom.base, 2.0, dom.norm).samples(cfg.direction_count / 4, 64, &keep, &mut rng);
    let mut report = HomogeneityReport { holds: true, max_defect: 0.0, witness: None };
    let mut worst = 0.0f64;
    for t in test_scalars(m, dom.variant) {
        for x in &pts {
            let tx = star(&dom, &t, x)?;
            if !h.in_domain(&tx) {
                continue;
            }
            let lhs = h.eval(&tx);
            let rhs = star(&cod, &t, &h.eval(x))?;
            let d = cod.dist(&lhs, &rhs);
            if !d.is_finite() {
                continue;
            }
            report.max_defect = report.max_defect.max(d);
            let rel = d / (1.0 + dom.dist(x, &dom.base));
            if rel > worst {
                worst = rel;
                report.witness = Some((t, x.clone()));
            }
        }
    }
    report.holds = worst <= cfg.tol_zero;
    Ok(report)
}

/// Whether `x ↦ f(a) + h(x − a)` is tangent to `f` at `a`.
pub fn verify_contact(f: &FunctionHandle, a: &[f64], h: &FunctionHandle, cfg: &SamplingConfig) -> Result<bool, TangencyError> {
    let t = FunctionHandle::translate(h, a, &f.eval(a));
    Ok(tangency_test(f, &t, a, cfg)?.status == TangencyStatus::Tangent)
}

fn unit_pairs(dim: usize, cfg: &SamplingConfig, salt: &str) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = rng_for(cfg.seed, salt, dim as u64);
    let region = Region::ball(&vec![0.0; dim], 1.0, cfg.norm);
    let pts = region.samples(0, 128, &|_| true, &mut rng);
    let n = pts.len();
    (0..64).map(|i| (pts[(2 * i) % n].clone(), pts[(2 * i + 1) % n].clone())).collect()
}

/// Largest additivity or scaling defect of `h` on 64 random pairs of the unit ball,
/// relative to `1 + ‖x‖ + ‖y‖`.
pub fn linearity_defect(h: &FunctionHandle, cfg: &SamplingConfig) -> f64 {
    let norm = cfg.norm;
    let mut worst = 0.0f64;
    for (x, y) in unit_pairs(h.dim_in, cfg, "linearity") {
        let s: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        let (hx, hy, hs) = (h.eval(&x), h.eval(&y), h.eval(&s));
        let add: Vec<f64> = hs.iter().zip(&hx).zip(&hy).map(|((a, b), c)| a - b - c).collect();
        let scale = 1.0 + norm.norm(&x) + norm.norm(&y);
        worst = worst.max(norm.norm(&add) / scale);
        for c in [-1.0, -2.5, 0.3] {
            let cx: Vec<f64> = x.iter().map(|u| c * u).collect();
            let d: Vec<f64> = h.eval(&cx).iter().zip(&hx).map(|(a, b)| a - c * b).collect();
            worst = worst.max(norm.norm(&d) / scale);
        }
    }
    worst
}

/// Largest `‖h(x) + h(−x)‖ / (1 + ‖x‖)` on sampled points of the unit ball.
pub fn oddness_defect(h: &FunctionHandle, cfg: &SamplingConfig) -> f64 {
    let norm = cfg.norm;
    let mut worst = 0.0f64;
    for (x, _) in unit_pairs(h.dim_in, cfg, "oddness") {
        let nx: Vec<f64> = x.iter().map(|u| -u).collect();
        let s: Vec<f64> = h.eval(&x).iter().zip(h.eval(&nx)).map(|(a, b)| a + b).collect();
        worst = worst.max(norm.norm(&s) / (1.0 + norm.norm(&x)));
    }
    worst
}
