//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use metric_jet::catalog::{
    cantor_distance, cantor_distance_exact, contact_closed_form, entry, entry_with_dim, fractal_from_periodic, r_2pi,
};
use metric_jet::classify::counterexample_suite;
use metric_jet::contact::{estimate_contact, gdiff_1d, homogeneity_check, verify_contact, ContactStatus, GDiffOutcome};
use metric_jet::extrema::{first_order_min_test, ExtremumStatus};
use metric_jet::spaces::{ContractingSpace, Norm, ValuedMonoid};
use metric_jet::tangency::{
    jet_distance, lipschitz_ratio_homog, lsl_test, norm_homog, HomogClass, SamplingConfig,
};
use metric_jet::FunctionHandle;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;

fn cfg() -> SamplingConfig {
    SamplingConfig::default()
}

/// Smaller config for the randomized inequality suite.
fn light_cfg(seed: u64) -> SamplingConfig {
    SamplingConfig {
        radii: (1..=4).map(|k| 10f64.powi(-k)).collect(),
        samples_per_shell: 128,
        direction_count: 32,
        refine_iters: 30,
        ..SamplingConfig::default()
    }
    .with_seed(seed)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn unit_dirs(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut *rng)).collect();
            let n = Norm::L2.norm(&v);
            v.into_iter().map(|x| x / n).collect()
        })
        .collect()
}

fn c1_rho() -> Outcome {
    let f = entry("x_sin_log").unwrap().handle;
    let r = r_2pi();
    let s = ContractingSpace::origin(1, ValuedMonoid::nr(r).unwrap());
    let rho = lipschitz_ratio_homog(&f, &s, HomogClass::RFractal(r), 0.5, &cfg());
    let nrm = norm_homog(&f, &s, HomogClass::RFractal(r), &cfg());
    ensure(
        close(rho, 2f64.sqrt(), 1e-3) && close(nrm, 1.0, 1e-3),
        format!("rho = {rho:.6} (want sqrt 2), norm = {nrm:.6} (want 1)"),
    )
}

/// Left endpoints of the level-22 intervals of 9K, each of width 3^-20.
fn cantor_intervals() -> Vec<f64> {
    let depth = 22;
    let mut lefts = vec![0.0f64];
    let mut width = 9.0;
    for _ in 0..depth {
        width /= 3.0;
        let mut next = Vec::with_capacity(lefts.len() * 2);
        for l in &lefts {
            next.push(*l);
            next.push(l + 2.0 * width);
        }
        lefts = next;
    }
    lefts.sort_by(f64::total_cmp);
    lefts
}

fn oracle_distance(lefts: &[f64], width: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return -x;
    }
    let i = lefts.partition_point(|l| *l <= x);
    let mut best = f64::INFINITY;
    if i > 0 {
        let l = lefts[i - 1];
        best = best.min((x - (l + width)).max(0.0));
    }
    if i < lefts.len() {
        best = best.min(lefts[i] - x);
    }
    best
}

fn c2_giseh() -> Outcome {
    let g = entry("giseh").unwrap().handle;
    let third = 1.0 / 3.0;
    let s = ContractingSpace::origin(1, ValuedMonoid::nr(third).unwrap());
    let nrm = norm_homog(&g, &s, HomogClass::RFractal(third), &cfg());
    let rho = lipschitz_ratio_homog(&g, &s, HomogClass::RFractal(third), 0.5, &cfg());

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut self_similar = 0;
    for _ in 0..1000 {
        let x = BigRational::new(BigInt::from(rng.random_range(-3000i64..30000)), BigInt::from(rng.random_range(1i64..1000)));
        let lhs = cantor_distance_exact(&(&x / BigInt::from(3)));
        let rhs = cantor_distance_exact(&x) / BigInt::from(3);
        if lhs == rhs {
            self_similar += 1;
        }
    }

    let width = 3f64.powi(-20);
    let lefts = cantor_intervals();
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let x = rng.random_range(-1.0..10.0);
        worst = worst.max((cantor_distance(x) - oracle_distance(&lefts, width, x)).abs());
    }
    ensure(
        close(nrm, 1.0, 1e-3) && close(rho, 1.0, 1e-3) && self_similar == 1000 && worst <= width,
        format!(
            "norm = {nrm:.6}, ratio = {rho:.6}, self-similar {self_similar}/1000, oracle gap {worst:.3e} (<= {width:.3e})"
        ),
    )
}

fn c3_contact_formulas() -> Outcome {
    let m = ValuedMonoid::NonnegReals;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut count = 0;
    for name in ["max", "min", "n1", "n2", "ninf"] {
        for dim in [2, 3] {
            let f = entry_with_dim(name, dim).unwrap().handle;
            let probes = unit_dirs(dim, 16, &mut rng);
            for k in 0..100 {
                let mut a: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                match k % 4 {
                    0 => a[1] = a[0],
                    1 => a[rng.random_range(0..dim)] = 0.0,
                    2 if k % 8 == 2 => a.iter_mut().for_each(|v| *v = 0.0),
                    2 => a[dim - 1] = -a[0],
                    _ => {}
                }
                count += 1;
                let v = estimate_contact(&f, &a, &m, &cfg()).unwrap();
                let Some(h) = v.contact_eval else {
                    failures.push(format!("{name}@{a:?}: {:?}", v.status));
                    continue;
                };
                let cf = contact_closed_form(name, &a, &m).unwrap();
                for u in &probes {
                    let d = (h.eval(u)[0] - cf.eval(u)[0]).abs();
                    worst = worst.max(d);
                    if d > 1e-6 {
                        failures.push(format!("{name}@{a:?} dir {u:?}: {d:.3e}"));
                        break;
                    }
                }
            }
        }
    }
    ensure(
        failures.is_empty(),
        format!("{count} points, worst gap {worst:.3e}{}", first_failures(&failures)),
    )
}

fn first_failures(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!("; {} failures, first: {}", f.len(), f[..f.len().min(3)].join(" | "))
    }
}

fn c4_linear() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let n = 1 + i % 3;
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
        let mat = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
        let op = mat.singular_values().max();
        let l = FunctionHandle::linear(rows);
        let zero = FunctionHandle::zero(n, n);
        let origin = vec![0.0; n];
        let jd = jet_distance(&l, &zero, &origin, &cfg()).map_err(|e| e.to_string())?;
        let s = ContractingSpace::origin(n, ValuedMonoid::NonnegReals);
        let rho = lipschitz_ratio_homog(&l, &s, HomogClass::General, 0.0, &cfg());
        worst = worst.max((jd - op).abs()).max((rho - op).abs());
    }
    ensure(worst <= 1e-3, format!("20 maps, worst gap to the spectral norm {worst:.3e}"))
}

fn c5_suite() -> Outcome {
    let rows = counterexample_suite(&cfg()).map_err(|e| e.to_string())?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass || !r.ladder_violations.is_empty())
        .map(|r| format!("{} {}: {:?} {:?}", r.entry, r.row, r.mismatches, r.ladder_violations))
        .collect();
    ensure(bad.is_empty(), format!("{} rows, {} failing{}", rows.len(), bad.len(), first_failures(&bad)))
}

fn c6_gdiff() -> Outcome {
    let abs = FunctionHandle::real("abs", f64::abs);
    let GDiffOutcome::GDiff(d) = gdiff_1d(&abs, 0.0, &cfg()) else {
        return Err("|x| gave NoGDiff".into());
    };
    let verified = verify_contact(&abs, &[0.0], &d.assemble(), &cfg()).map_err(|e| e.to_string())?;
    let cube = entry("cube_root").unwrap().handle;
    let no = matches!(gdiff_1d(&cube, 0.0, &cfg()), GDiffOutcome::NoGDiff { .. });
    ensure(
        close(d.left, -1.0, 1e-9) && close(d.right, 1.0, 1e-9) && verified && no,
        format!("|x| -> ({}, {}), verified {verified}, cube root NoGDiff {no}", d.left, d.right),
    )
}

fn c7_extrema() -> Outcome {
    let m = ValuedMonoid::NonnegReals;
    let cases: Vec<(FunctionHandle, usize, ExtremumStatus)> = vec![
        (FunctionHandle::real("abs", f64::abs), 1, ExtremumStatus::StrictLocalMin),
        (entry("n1").unwrap().handle, 2, ExtremumStatus::StrictLocalMin),
        (entry("n2").unwrap().handle, 2, ExtremumStatus::StrictLocalMin),
        (entry("ninf").unwrap().handle, 2, ExtremumStatus::StrictLocalMin),
        (entry("identity").unwrap().handle, 1, ExtremumStatus::NotLocalMin),
        (entry("max").unwrap().handle, 2, ExtremumStatus::NotLocalMin),
        (entry("square").unwrap().handle, 1, ExtremumStatus::Inconclusive),
    ];
    let mut bad = Vec::new();
    for (f, dim, want) in &cases {
        let got = first_order_min_test(f, &vec![0.0; *dim], &m, &cfg()).map_err(|e| e.to_string())?.status;
        if got != *want {
            bad.push(format!("{}: {got:?} (want {want:?})", f.label));
        }
    }
    ensure(bad.is_empty(), format!("{} maps{}", cases.len(), first_failures(&bad)))
}

/// A random homogeneous map R^2 -> R^2 built from catalog maps and a linear factor.
fn random_jet(rng: &mut ChaCha8Rng) -> FunctionHandle {
    let rows: Vec<Vec<f64>> = (0..2).map(|_| (0..2).map(|_| rng.random_range(-1.5..1.5)).collect()).collect();
    let lin = FunctionHandle::linear(rows);
    let pair = |a: &str, b: &str| {
        let (fa, fb) = (entry(a).unwrap().handle, entry(b).unwrap().handle);
        FunctionHandle::new(format!("({a},{b})"), 2, 2, move |x| vec![fa.eval(x)[0], fb.eval(x)[0]])
    };
    let block = match rng.random_range(0..6) {
        0 => entry("fp1").unwrap().handle,
        1 => entry("fp2").unwrap().handle,
        2 => entry("fpinf").unwrap().handle,
        3 => pair("max", "min"),
        4 => pair("n1", "ninf"),
        _ => FunctionHandle::identity(2),
    };
    if rng.random_bool(0.5) {
        lin.compose(&block)
    } else {
        block.compose(&lin)
    }
}

fn c8_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let z = [0.0, 0.0];
    let o = FunctionHandle::zero(2, 2);
    let ball = ContractingSpace::origin(2, ValuedMonoid::NonnegReals);
    let slack = |rhs: f64| 5e-3 * (1.0 + rhs);
    let mut bad = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for trial in 0..50u64 {
        let c = light_cfg(trial);
        let (phi0, phi1, psi0, psi1) = (random_jet(&mut rng), random_jet(&mut rng), random_jet(&mut rng), random_jet(&mut rng));
        let phi = phi1.compose(&phi0);
        let psi = psi1.compose(&psi0);
        let full = cfg().with_seed(trial);
        let rho = |f: &FunctionHandle| lipschitz_ratio_homog(f, &ball, HomogClass::General, 0.0, &full);
        let dist = |f: &FunctionHandle, g: &FunctionHandle| jet_distance(f, g, &z, &c).unwrap_or(f64::INFINITY);
        let nrm = |f: &FunctionHandle| norm_homog(f, &ball, HomogClass::General, &c);

        let mut check = |label: &str, lhs: f64, rhs: f64| {
            worst_margin = worst_margin.min(rhs + slack(rhs) - lhs);
            if !(lhs <= rhs + slack(rhs)) {
                bad.push(format!("trial {trial} {label}: {lhs:.5} > {rhs:.5}"));
            }
        };
        let (r0, r1, r10) = (rho(&phi0), rho(&phi1), rho(&phi));
        check("ratio of composite", r10, r1 * r0);
        check("distance to O below ratio", dist(&phi, &o), r10);
        check(
            "composite distance",
            dist(&psi, &phi),
            dist(&psi1, &phi1) * dist(&psi0, &o) + r1 * dist(&psi0, &phi0),
        );
        check("composite distance to O", dist(&psi, &o), dist(&psi1, &o) * dist(&psi0, &o));

        let (n0, n1) = (nrm(&phi0), nrm(&phi1));
        for u in unit_dirs(2, 8, &mut rng) {
            let t = rng.random_range(0.01..3.0);
            let x: Vec<f64> = u.iter().map(|v| v * t).collect();
            check("norm bound", Norm::L2.norm(&phi0.eval(&x)), n0 * t);
        }
        check("norm of composite", nrm(&phi), n1 * n0);

        // mean value bound along a random segment
        let p: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..2).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (p2, v2) = (p.clone(), v.clone());
        let f = phi.clone();
        let seg = FunctionHandle::new("segment", 1, 2, move |t| {
            let x: Vec<f64> = p2.iter().zip(&v2).map(|(a, b)| a + t[0] * b).collect();
            f.eval(&x)
        });
        let k = (1..64)
            .map(|i| lsl_test(&seg, &[i as f64 / 64.0], &c).k_estimate)
            .fold(0.0f64, f64::max);
        check("mean value bound", Norm::L2.dist(&seg.eval(&[1.0]), &seg.eval(&[0.0])), k);
    }
    ensure(
        bad.is_empty(),
        format!("50 compositions, smallest margin {worst_margin:.3e}{}", first_failures(&bad)),
    )
}

fn c9_fractal() -> Outcome {
    let r = r_2pi();
    let m = ValuedMonoid::nr(r).unwrap();
    let s = ContractingSpace::origin(1, m);
    let mut maps = Vec::new();
    let mut worst_defect = 0.0f64;
    for n in 1..=8 {
        let k = n as f64;
        let fp = FunctionHandle::real(format!("sin({n}x)"), move |x| (2.0 * PI * k * x / (2.0 * PI)).sin());
        let phi = fractal_from_periodic(&fp, 2.0 * PI).map_err(|e| e.to_string())?;
        let rep = homogeneity_check(&phi, &m, &s, &s, &cfg()).map_err(|e| e.to_string())?;
        worst_defect = worst_defect.max(rep.max_defect);
        maps.push(phi);
    }
    let z = FunctionHandle::zero(1, 1);
    let d0: Vec<f64> = maps.iter().map(|f| jet_distance(f, &z, &[0.0], &cfg()).unwrap_or(f64::NAN)).collect();
    let mut g = DMatrix::zeros(8, 8);
    for i in 0..8 {
        for j in 0..8 {
            let dij = if i == j { 0.0 } else { jet_distance(&maps[i], &maps[j], &[0.0], &cfg()).unwrap_or(f64::NAN) };
            g[(i, j)] = (d0[i] * d0[i] + d0[j] * d0[j] - dij * dij) / 2.0;
        }
    }
    let smin = g.singular_values().min();
    ensure(
        worst_defect < 1e-12 && smin > 1e-6,
        format!("max homogeneity defect {worst_defect:.3e}, smallest Gram singular value {smin:.3e}"),
    )
}

fn c10_restriction() -> Outcome {
    let corpus: Vec<(&str, Vec<f64>)> = vec![
        ("theta", vec![0.0]),
        ("max", vec![0.0, 0.0]),
        ("min", vec![1.0, 1.0, 0.0]),
        ("n1", vec![0.0, 2.0]),
        ("n2", vec![1.0, 2.0]),
        ("ninf", vec![0.0, 0.0]),
        ("square", vec![1.0]),
        ("xy2_over_x2y2", vec![0.0, 0.0]),
        ("x2_sin_inv_x", vec![0.0]),
    ];
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (name, a) in &corpus {
        let f = entry_with_dim(name, a.len()).unwrap().handle;
        let plus = estimate_contact(&f, a, &ValuedMonoid::NonnegReals, &cfg()).map_err(|e| e.to_string())?;
        let Some(hp) = plus.contact_eval else {
            bad.push(format!("{name}: R+ contact {:?}", plus.status));
            continue;
        };
        for r in [0.5, 1.0 / 3.0, r_2pi()] {
            let v = estimate_contact(&f, a, &ValuedMonoid::nr(r).unwrap(), &cfg()).map_err(|e| e.to_string())?;
            let Some(h) = v.contact_eval.filter(|_| v.status == ContactStatus::Contactable) else {
                bad.push(format!("{name} r={r}: {:?}", v.status));
                continue;
            };
            for t in &plus.traces {
                let d = Norm::L2.dist(&h.eval(&t.direction), &hp.eval(&t.direction));
                worst = worst.max(d);
                if d > 1e-6 {
                    bad.push(format!("{name} r={r} dir {:?}: {d:.3e}", t.direction));
                    break;
                }
            }
        }
    }
    ensure(bad.is_empty(), format!("{} points, worst gap {worst:.3e}{}", corpus.len(), first_failures(&bad)))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("lipschitz ratio and norm of x sin(log|x|)", c1_rho),
        ("distance to the Cantor union", c2_giseh),
        ("closed-form contacts of max, min and norms", c3_contact_formulas),
        ("linear maps: jet distance and ratio equal the operator norm", c4_linear),
        ("counter-example suite and ladder", c5_suite),
        ("one-dimensional G-differential", c6_gdiff),
        ("first-order extremum verdicts", c7_extrema),
        ("jet inequalities on random compositions", c8_inequalities),
        ("fractal constructor and independent jets", c9_fractal),
        ("neo-fractal contacts agree with the R+ contact", c10_restriction),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
