//! Per-point classification along the ladder
//! differentiable ⟹ ℝ-contactable ⟹ G-differentiable ⟹ neo-fractal ⟹ tangentiable ⟹ LSL ⟹ C⁰,
//! with LL ⟹ tangentiable.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::catalog::{self, GroundTruth};
use crate::contact::{
    estimate_contact, homogeneity_check, linearity_defect, oddness_defect, ContactError, ContactStatus, ContactVerdict,
};
use crate::handle::FunctionHandle;
use crate::search::{maximize, rng_for, Region};
use crate::spaces::{ContractingSpace, ValuedMonoid, Variant};
use crate::tangency::{self, homogeneous_lipschitz, ll_test, lsl_test, scale_pair_test, SamplingConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tri::Yes => "Y",
            Tri::No => "N",
            Tri::Unknown => "?",
        }
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Flags {
    pub c0: Tri,
    pub lsl: Tri,
    pub ll: Tri,
    pub tangentiable: Tri,
    pub gdiff: Tri,
    /// One entry per probed ratio `r`.
    pub neo_fractal: Vec<(f64, Tri)>,
    pub differentiable: Tri,
    pub std_r_contactable: Tri,
}

impl Flags {
    pub fn unknown(probe_rs: &[f64]) -> Flags {
        Flags {
            c0: Tri::Unknown,
            lsl: Tri::Unknown,
            ll: Tri::Unknown,
            tangentiable: Tri::Unknown,
            gdiff: Tri::Unknown,
            neo_fractal: probe_rs.iter().map(|r| (*r, Tri::Unknown)).collect(),
            differentiable: Tri::Unknown,
            std_r_contactable: Tri::Unknown,
        }
    }

    /// `(label, value)` pairs in ladder order; neo-fractal labels carry the ratio.
    pub fn labelled(&self) -> Vec<(String, Tri)> {
        let mut out = vec![
            ("C0".to_string(), self.c0),
            ("LSL".into(), self.lsl),
            ("LL".into(), self.ll),
            ("Tangentiable".into(), self.tangentiable),
            ("Gdiff".into(), self.gdiff),
        ];
        for (r, t) in &self.neo_fractal {
            out.push((format!("NeoFractal({r:.6})"), *t));
        }
        out.push(("Differentiable".into(), self.differentiable));
        out.push(("StdRContactable".into(), self.std_r_contactable));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub summary: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub point: Vec<f64>,
    pub flags: Flags,
    pub evidence: BTreeMap<String, Evidence>,
}

fn ev(summary: impl Into<String>, values: Vec<f64>) -> Evidence {
    Evidence { summary: summary.into(), values }
}

/// Sup of `d(f(x), f(a))` over `B'(a, r)` for each radius.
pub fn oscillation_trace(f: &FunctionHandle, a: &[f64], cfg: &SamplingConfig) -> Vec<f64> {
    let fa = f.eval(a);
    let norm = cfg.norm;
    cfg.radii
        .iter()
        .map(|&r| {
            let region = Region::ball(a, r, norm);
            let keep = |x: &[f64]| f.in_domain(x);
            let mut rng = rng_for(cfg.seed, "oscillation", r.to_bits());
            let pts = region.samples(cfg.direction_count, cfg.samples_per_shell, &keep, &mut rng);
            let obj = |x: &[f64]| Some(norm.dist(&f.eval(x), &fa));
            let accept = |x: &[f64]| region.contains(x) && keep(x);
            maximize(&obj, &pts, &accept, r, cfg.refine_iters / 2, &mut rng).value
        })
        .collect()
}

/// Continuity at `a` from the shrinking oscillation.
pub fn c0_test(f: &FunctionHandle, a: &[f64], cfg: &SamplingConfig) -> (Tri, Vec<f64>) {
    let osc = oscillation_trace(f, a, cfg);
    let n = osc.len();
    let last = osc[n - 1];
    let shrinking = n >= 3 && osc[n - 3] > osc[n - 2] && osc[n - 2] > osc[n - 1] && last <= 1e-2 * osc[0];
    let t = if last <= cfg.tol_zero || shrinking {
        Tri::Yes
    } else if tangency::converged(&osc, cfg.tol_rel).is_some() {
        Tri::No
    } else {
        Tri::Unknown
    };
    (t, osc)
}

/// Outcome of a contact estimate once the lipschitz requirement is applied.
struct ContactOutcome {
    flag: Tri,
    /// Limits exist but the limit map is not lipschitzian.
    nonlipschitz: bool,
    verdict: ContactVerdict,
}

fn contact_outcome(f: &FunctionHandle, a: &[f64], m: &ValuedMonoid, f_is_ll: bool, cfg: &SamplingConfig) -> Result<ContactOutcome, ContactError> {
    let verdict = estimate_contact(f, a, m, cfg)?;
    let (flag, nonlipschitz) = match verdict.status {
        ContactStatus::NotContactable => (Tri::No, false),
        ContactStatus::Inconclusive => (Tri::Unknown, false),
        ContactStatus::Contactable => {
            // the contact of an LL map is lipschitzian with the same constant
            let lip = f_is_ll || {
                let h = verdict.contact_eval.as_ref().expect("contactable verdicts carry a contact");
                homogeneous_lipschitz(h, &vec![0.0; f.dim_in], cfg, 64).holds
            };
            if lip {
                (Tri::Yes, false)
            } else {
                (Tri::No, true)
            }
        }
    };
    Ok(ContactOutcome { flag, nonlipschitz, verdict })
}

fn summarize_contact(o: &ContactOutcome) -> Evidence {
    let limits: Vec<f64> = o.verdict.traces.iter().filter_map(|t| t.limit.as_ref().map(|l| l[0])).collect();
    let mut s = format!("{:?}", o.verdict.status);
    if let Some(w) = &o.verdict.oscillation_witness {
        s.push_str(&format!(", {:?} along {:?} (tail range {:.3e})", w.status, w.direction, w.tail_range));
    }
    if o.nonlipschitz {
        s.push_str(", limit map is not lipschitzian");
    }
    ev(s, limits)
}

/// Classifies `f` at `a` for every ladder label.
pub fn classify_point(
    f: &FunctionHandle,
    a: &[f64],
    probe_rs: &[f64],
    cfg: &SamplingConfig,
) -> Result<ClassificationReport, ContactError> {
    if a.len() != f.dim_in {
        return Err(ContactError::DimensionMismatch { expected: f.dim_in, got: a.len() });
    }
    if !f.in_domain(a) {
        return Err(ContactError::NotInterior(a.to_vec()));
    }
    let mut evidence = BTreeMap::new();
    let mut flags = Flags::unknown(probe_rs);

    let (c0, osc) = c0_test(f, a, cfg);
    flags.c0 = c0;
    evidence.insert("C0".into(), ev("oscillation sup per radius", osc));

    let lsl = lsl_test(f, a, cfg);
    flags.lsl = Tri::from_bool(lsl.holds);
    evidence.insert("LSL".into(), ev(format!("k ≈ {:.6}", lsl.k_estimate), lsl.trace.clone()));

    let ll = ll_test(f, a, cfg);
    flags.ll = Tri::from_bool(ll.holds);
    evidence.insert("LL".into(), ev(format!("k ≈ {:.6}", ll.k_estimate), ll.trace.clone()));

    let plus = contact_outcome(f, a, &ValuedMonoid::NonnegReals, ll.holds, cfg)?;
    flags.gdiff = plus.flag;
    evidence.insert("Gdiff".into(), summarize_contact(&plus));
    let mut nonlipschitz = plus.nonlipschitz;

    for (r, t) in flags.neo_fractal.iter_mut() {
        let m = ValuedMonoid::nr(*r).map_err(ContactError::Space)?;
        let o = contact_outcome(f, a, &m, ll.holds, cfg)?;
        *t = o.flag;
        nonlipschitz |= o.nonlipschitz;
        evidence.insert(format!("NeoFractal({r:.6})"), summarize_contact(&o));
    }

    match (&plus.flag, &plus.verdict.contact_eval) {
        (Tri::Yes, Some(h)) => {
            let thr = cfg.tol_zero.max(10.0 * h.noise);
            let lin = linearity_defect(h, cfg);
            let odd = oddness_defect(h, cfg);
            flags.differentiable = Tri::from_bool(lin <= thr);
            flags.std_r_contactable = Tri::from_bool(odd <= thr);
            evidence.insert("Differentiable".into(), ev("linearity defect of the contact", vec![lin]));
            evidence.insert("StdRContactable".into(), ev("oddness defect of the contact", vec![odd]));
        }
        (Tri::No, _) => {
            flags.differentiable = Tri::No;
            flags.std_r_contactable = Tri::No;
        }
        _ => {}
    }

    let some_contact = flags.gdiff == Tri::Yes || flags.neo_fractal.iter().any(|(_, t)| *t == Tri::Yes);
    let tangent_to_constant = lsl.holds && lsl.k_estimate <= cfg.tol_zero;
    flags.tangentiable = if ll.holds {
        evidence.insert("Tangentiable".into(), ev("LL at the point", vec![]));
        Tri::Yes
    } else if some_contact {
        evidence.insert("Tangentiable".into(), ev("a lipschitzian contact exists", vec![]));
        Tri::Yes
    } else if tangent_to_constant {
        evidence.insert("Tangentiable".into(), ev("tangent to the constant map", lsl.trace.clone()));
        Tri::Yes
    } else if !lsl.holds {
        evidence.insert("Tangentiable".into(), ev("not LSL", lsl.trace.clone()));
        Tri::No
    } else if nonlipschitz {
        evidence.insert("Tangentiable".into(), ev("homogeneous limit exists but is not lipschitzian", vec![]));
        Tri::No
    } else {
        let sp = scale_pair_test(f, a, cfg);
        if sp.refutes {
            evidence.insert("Tangentiable".into(), ev("scale-pair statistic stays of order 1", sp.statistic));
            Tri::No
        } else {
            evidence.insert("Tangentiable".into(), ev("no certificate either way", sp.statistic));
            Tri::Unknown
        }
    };

    Ok(ClassificationReport { point: a.to_vec(), flags, evidence })
}

/// Violated implications, as `"premise ⟹ conclusion"` strings. Implications are
/// checked transitively, so an Unknown in between does not hide a violation.
pub fn check_ladder(rep: &ClassificationReport) -> Vec<String> {
    let f = &rep.flags;
    let mut chain: Vec<(String, Tri, bool)> = vec![
        ("Differentiable".into(), f.differentiable, false),
        ("StdRContactable".into(), f.std_r_contactable, false),
        ("Gdiff".into(), f.gdiff, false),
    ];
    for (r, t) in &f.neo_fractal {
        chain.push((format!("NeoFractal({r:.6})"), *t, true));
    }
    chain.push(("Tangentiable".into(), f.tangentiable, false));
    chain.push(("LSL".into(), f.lsl, false));
    chain.push(("C0".into(), f.c0, false));
    let mut out = Vec::new();
    for i in 0..chain.len() {
        for j in i + 1..chain.len() {
            let (p, c) = (&chain[i], &chain[j]);
            if p.2 && c.2 {
                continue;
            }
            if p.1 == Tri::Yes && c.1 == Tri::No {
                out.push(format!("{} ⟹ {}", p.0, c.0));
            }
        }
    }
    if f.ll == Tri::Yes {
        for c in &chain[chain.len() - 3..] {
            if c.1 == Tri::No {
                out.push(format!("LL ⟹ {}", c.0));
            }
        }
    }
    out
}

/// Labels where ground truth says Yes/No and the computed flag differs.
pub fn mismatches(expected: &Flags, computed: &Flags) -> Vec<String> {
    expected
        .labelled()
        .into_iter()
        .zip(computed.labelled())
        .filter(|((_, e), (_, c))| *e != Tri::Unknown && e != c)
        .map(|((l, e), (_, c))| format!("{l}: expected {e}, got {c}"))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteRow {
    pub entry: String,
    pub row: String,
    pub point: Vec<f64>,
    pub expected: Flags,
    pub computed: Flags,
    pub mismatches: Vec<String>,
    pub ladder_violations: Vec<String>,
    /// Extra checks attached to the row, with their outcome.
    pub extra: Vec<(String, bool)>,
    pub pass: bool,
}

/// Entries of the counter-example table, in row order.
pub const SUITE_ENTRIES: [&str; 9] = [
    "x2_sin_inv_x",
    "theta",
    "xy2_over_x2y2",
    "x_sin_log",
    "x_sin_log_log",
    "x2_sin_inv_x2",
    "x_sin_inv_x",
    "cube_root",
    "x_sin_y_over_x",
];

pub fn suite_row(name: &str, truth: &GroundTruth, cfg: &SamplingConfig) -> Result<SuiteRow, ContactError> {
    let e = catalog::entry(name).expect("suite entries are registered");
    let rep = classify_point(&e.handle, &truth.point, &truth.probe_rs, cfg)?;
    let mism = mismatches(&truth.flags, &rep.flags);
    let ladder = check_ladder(&rep);
    let mut extra = Vec::new();
    if name == "x_sin_y_over_x" {
        let s = ContractingSpace::new(vec![0.0, 0.0], cfg.norm, Variant::StandardReal, ValuedMonoid::Reals)?;
        let c = ContractingSpace::new(vec![0.0], cfg.norm, Variant::StandardReal, ValuedMonoid::Reals)?;
        let h = homogeneity_check(&e.handle, &ValuedMonoid::Reals, &s, &c, cfg)?;
        extra.push(("standard R-homogeneous".to_string(), h.holds));
        extra.push(("not LL at the origin".to_string(), rep.flags.ll == Tri::No));
    }
    let pass = mism.is_empty() && ladder.is_empty() && extra.iter().all(|(_, ok)| *ok);
    Ok(SuiteRow {
        entry: name.into(),
        row: truth.row.clone(),
        point: truth.point.clone(),
        expected: truth.flags.clone(),
        computed: rep.flags,
        mismatches: mism,
        ladder_violations: ladder,
        extra,
        pass,
    })
}

/// Classifies every counter-example row and compares against ground truth.
pub fn counterexample_suite(cfg: &SamplingConfig) -> Result<Vec<SuiteRow>, ContactError> {
    let mut rows = Vec::new();
    for name in SUITE_ENTRIES {
        let e = catalog::entry(name).expect("registered");
        for t in &e.ground_truth {
            rows.push(suite_row(name, t, cfg)?);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_flags_violation() {
        let mut rep = ClassificationReport { point: vec![0.0], flags: Flags::unknown(&[0.5]), evidence: BTreeMap::new() };
        assert!(check_ladder(&rep).is_empty());
        rep.flags.differentiable = Tri::Yes;
        rep.flags.gdiff = Tri::No;
        assert_eq!(check_ladder(&rep).len(), 1);
    }

    #[test]
    fn theta_at_zero() {
        let e = catalog::entry("theta").unwrap();
        let t = e.truth_at(&[0.0]).unwrap();
        let rep = classify_point(&e.handle, &[0.0], &t.probe_rs, &SamplingConfig::default()).unwrap();
        assert!(mismatches(&t.flags, &rep.flags).is_empty(), "{:?}", rep.flags);
        assert!(check_ladder(&rep).is_empty());
    }

    #[test]
    fn c0_detects_jump() {
        let step = FunctionHandle::real("step", |x| if x > 0.0 { 1.0 } else { 0.0 });
        assert_eq!(c0_test(&step, &[0.0], &SamplingConfig::default()).0, Tri::No);
        let sq = FunctionHandle::real("sq", |x| x * x);
        assert_eq!(c0_test(&sq, &[0.0], &SamplingConfig::default()).0, Tri::Yes);
    }
}
