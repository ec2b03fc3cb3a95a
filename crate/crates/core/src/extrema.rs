//! First-order minimum certificates from the sign of the contact on the unit sphere.

use serde::Serialize;
use thiserror::Error;

use crate::contact::{directional_quotient, TraceStatus};
use crate::handle::FunctionHandle;
use crate::search::{self, rng_for};
use crate::spaces::ValuedMonoid;
use crate::tangency::SamplingConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtremaError {
    #[error("first-order test needs a scalar map, got codomain dimension {0}")]
    NonScalar(usize),
    #[error("base point {0:?} is outside the domain")]
    OutOfDomain(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExtremumStatus {
    StrictLocalMin,
    NotLocalMin,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremumVerdict {
    pub status: ExtremumStatus,
    /// Min of the estimated contact over converged sphere directions.
    pub sphere_min: f64,
    pub witness: Vec<f64>,
    pub pos_margin: f64,
    pub directions: usize,
    pub nonconverged: usize,
}

/// Unit-sphere probes: `±e_i`, seeded directions, and in dims 2 and 3 a grid of
/// 256 points on each coordinate great circle.
pub fn sphere_points(dim: usize, cfg: &SamplingConfig) -> Vec<Vec<f64>> {
    let norm = cfg.norm;
    let mut rng = rng_for(cfg.seed, "sphere", dim as u64);
    let mut pts = search::direction_set(dim, cfg.direction_count, norm, &mut rng);
    if (2..=3).contains(&dim) {
        for i in 0..dim {
            for j in i + 1..dim {
                for k in 0..256 {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
                    let mut p = vec![0.0; dim];
                    p[i] = th.cos();
                    p[j] = th.sin();
                    let s = norm.norm(&p);
                    pts.push(p.into_iter().map(|v| v / s).collect());
                }
            }
        }
    }
    pts
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Strict local minimum if the contact is bounded away from 0 on the probed sphere,
/// not a local minimum if it is negative in some converged direction.
pub fn first_order_min_test(
    f: &FunctionHandle,
    a: &[f64],
    m: &ValuedMonoid,
    cfg: &SamplingConfig,
) -> Result<ExtremumVerdict, ExtremaError> {
    if f.dim_out != 1 {
        return Err(ExtremaError::NonScalar(f.dim_out));
    }
    if a.len() != f.dim_in || !f.in_domain(a) {
        return Err(ExtremaError::OutOfDomain(a.to_vec()));
    }
    let dirs = sphere_points(f.dim_in, cfg);
    let mut values = Vec::with_capacity(dirs.len());
    let mut nonconverged = 0;
    for u in &dirs {
        let t = directional_quotient(f, a, u, m, cfg);
        match (t.status, t.limit) {
            (TraceStatus::Converged, Some(l)) => values.push((l[0], u.clone())),
            _ => nonconverged += 1,
        }
    }
    let pos_margin = 10.0 * cfg.tol_rel * (1.0 + median(values.iter().map(|(v, _)| v.abs()).collect()));
    let (sphere_min, witness) = values
        .iter()
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(v, u)| (*v, u.clone()))
        .unwrap_or((f64::NAN, vec![]));
    let status = if values.iter().any(|(v, _)| *v < -pos_margin) {
        ExtremumStatus::NotLocalMin
    } else if nonconverged == 0 && sphere_min > pos_margin {
        ExtremumStatus::StrictLocalMin
    } else {
        ExtremumStatus::Inconclusive
    };
    Ok(ExtremumVerdict { status, sphere_min, witness, pos_margin, directions: dirs.len(), nonconverged })
}

/// Whether a homogeneous `h` is nonnegative on the probed unit sphere.
pub fn contact_global_min_check(h: &FunctionHandle, cfg: &SamplingConfig) -> bool {
    sphere_points(h.dim_in, cfg).iter().all(|u| h.eval(u)[0] >= -cfg.tol_zero)
}
