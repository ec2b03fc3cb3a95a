//! Seeded stratified sampling and local refinement of sup estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::spaces::Norm;

pub(crate) fn rng_for(seed: u64, salt: &str, idx: u64) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in salt.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h ^ idx.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub(crate) fn gaussian_vec(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Uniform direction, normalised to the unit sphere of `norm`.
pub(crate) fn random_unit(dim: usize, norm: Norm, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let g = gaussian_vec(dim, rng);
        let n = norm.norm(&g);
        if n > 1e-12 {
            return g.into_iter().map(|v| v / n).collect();
        }
    }
}

pub(crate) fn axis(dim: usize, i: usize, sign: f64) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = sign;
    e
}

pub(crate) fn axes(dim: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        out.push(axis(dim, i, 1.0));
        out.push(axis(dim, i, -1.0));
    }
    out
}

/// `±e_i` plus `extra` seeded directions, closed under negation.
pub(crate) fn direction_set(dim: usize, extra: usize, norm: Norm, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut dirs = axes(dim);
    if dim == 1 {
        return dirs;
    }
    for _ in 0..extra.div_ceil(2) {
        let u = random_unit(dim, norm, rng);
        let v: Vec<f64> = u.iter().map(|c| -c).collect();
        dirs.push(u);
        dirs.push(v);
    }
    dirs
}

pub(crate) fn offset(center: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    center.iter().zip(dir).map(|(c, d)| c + t * d).collect()
}

/// Points `x` with `inner < ‖x − center‖ ≤ outer` (or `< outer` when open).
#[derive(Debug, Clone)]
pub(crate) struct Region {
    pub center: Vec<f64>,
    pub inner: f64,
    pub outer: f64,
    pub open: bool,
    pub norm: Norm,
}

impl Region {
    pub fn ball(center: &[f64], r: f64, norm: Norm) -> Region {
        Region { center: center.to_vec(), inner: 0.0, outer: r, open: false, norm }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let d = self.norm.dist(x, &self.center);
        d > self.inner && d > 0.0 && if self.open { d < self.outer } else { d <= self.outer }
    }

    fn top(&self) -> f64 {
        if self.open {
            self.outer * (1.0 - 1e-9)
        } else {
            self.outer
        }
    }

    fn bottom(&self) -> f64 {
        if self.inner > 0.0 {
            self.inner * (1.0 + 1e-9)
        } else {
            self.outer * 1e-4
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Radii used for deterministic axis probes.
    fn probe_radii(&self) -> Vec<f64> {
        let (lo, hi) = (self.bottom(), self.top());
        let mut out = vec![hi];
        let mut r = hi;
        while r * 0.5 > lo && out.len() < 8 {
            r *= 0.5;
            out.push(r);
        }
        if lo < hi {
            out.push(lo);
        }
        out
    }

    fn random_point(&self, kind: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.dim();
        let (lo, hi) = (self.bottom(), self.top());
        match kind % 3 {
            0 => {
                // uniform in volume over the shell
                let u: f64 = rng.random();
                let lo_n = (lo / hi).powi(n as i32);
                let rad = hi * (lo_n + (1.0 - lo_n) * u).powf(1.0 / n as f64);
                offset(&self.center, &random_unit(n, self.norm, rng), rad)
            }
            1 => {
                let u: f64 = rng.random();
                let rad = lo * (hi / lo).powf(u);
                offset(&self.center, &random_unit(n, self.norm, rng), rad)
            }
            _ => {
                // coordinates of log-uniform magnitude, to reach near-hyperplane regions
                let mut d: Vec<f64> = (0..n)
                    .map(|_| {
                        let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        s * 10f64.powf(-8.0 * rng.random::<f64>())
                    })
                    .collect();
                let m = self.norm.norm(&d);
                d.iter_mut().for_each(|c| *c /= m);
                let u: f64 = rng.random();
                let rad = lo * (hi / lo).powf(u);
                offset(&self.center, &d, rad)
            }
        }
    }

    /// Axis probes, seeded directions at the outer radius, then random points,
    /// all filtered by `keep`; rejected random draws are retried up to 10 times over.
    pub fn samples(
        &self,
        directions: usize,
        count: usize,
        keep: &dyn Fn(&[f64]) -> bool,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = Vec::new();
        for rad in self.probe_radii() {
            for e in axes(n) {
                let p = offset(&self.center, &e, rad);
                if self.contains(&p) && keep(&p) {
                    out.push(p);
                }
            }
        }
        if n > 1 {
            for _ in 0..directions {
                let p = offset(&self.center, &random_unit(n, self.norm, rng), self.top());
                if self.contains(&p) && keep(&p) {
                    out.push(p);
                }
            }
        }
        let mut got = 0;
        let mut tries = 0;
        while got < count && tries < 10 * count.max(1) {
            let p = self.random_point(tries, rng);
            tries += 1;
            if self.contains(&p) && keep(&p) {
                out.push(p);
                got += 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SupResult {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// Sup of `obj` over `init`, then local random refinement of the best starts.
pub(crate) fn maximize(
    obj: &dyn Fn(&[f64]) -> Option<f64>,
    init: &[Vec<f64>],
    accept: &dyn Fn(&[f64]) -> bool,
    scale: f64,
    iters: usize,
    rng: &mut ChaCha8Rng,
) -> SupResult {
    let mut scored: Vec<(f64, usize)> = init
        .iter()
        .enumerate()
        .filter_map(|(i, p)| obj(p).filter(|v| v.is_finite()).map(|v| (v, i)))
        .collect();
    if scored.is_empty() {
        return SupResult { value: 0.0, argmax: init.first().cloned().unwrap_or_default() };
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = SupResult { value: scored[0].0, argmax: init[scored[0].1].clone() };
    if iters == 0 {
        return best;
    }
    for &(v0, i) in scored.iter().take(6) {
        let mut x = init[i].clone();
        let mut v = v0;
        let mut sigma = 0.1 * scale;
        for _ in 0..iters {
            if sigma < 1e-13 * scale {
                break;
            }
            let mut moved = false;
            for _ in 0..3 {
                let step = gaussian_vec(x.len(), rng);
                let y: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + sigma * s).collect();
                if !accept(&y) {
                    continue;
                }
                if let Some(w) = obj(&y).filter(|w| w.is_finite()) {
                    if w > v {
                        v = w;
                        x = y;
                        moved = true;
                        break;
                    }
                }
            }
            sigma *= if moved { 1.5 } else { 0.5 };
        }
        if v > best.value {
            best = SupResult { value: v, argmax: x };
        }
    }
    best
}

/// Sup of a pair quotient `q(x, x + w)`, polishing the position `x` and the offset `w`
/// separately from the best starts, so that short offsets survive the search.
pub(crate) fn maximize_pairs(
    q: &dyn Fn(&[f64], &[f64]) -> Option<f64>,
    starts: &[(Vec<f64>, Vec<f64>)],
    scale: f64,
    iters: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let eval = |x: &[f64], w: &[f64]| {
        let y: Vec<f64> = x.iter().zip(w).map(|(a, b)| a + b).collect();
        q(x, &y).filter(|v| v.is_finite())
    };
    let mut scored: Vec<(f64, usize)> =
        starts.iter().enumerate().filter_map(|(i, (x, w))| eval(x, w).map(|v| (v, i))).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = scored.first().map_or(0.0, |s| s.0);
    for &(v0, i) in scored.iter().take(12) {
        let (mut x, mut w) = starts[i].clone();
        let mut v = v0;
        let (mut sx, mut sw) = (0.1 * scale, 0.5);
        for _ in 0..iters {
            if sx < 1e-13 * scale && sw < 1e-10 {
                break;
            }
            let g = gaussian_vec(x.len(), rng);
            let x2: Vec<f64> = x.iter().zip(&g).map(|(a, s)| a + sx * s).collect();
            match eval(&x2, &w).filter(|u| *u > v) {
                Some(u) => (v, x, sx) = (u, x2, sx * 1.5),
                None => sx *= 0.5,
            }
            let len = w.iter().map(|c| c * c).sum::<f64>().sqrt();
            let g = gaussian_vec(w.len(), rng);
            let w2: Vec<f64> = w.iter().zip(&g).map(|(a, s)| a + sw * len * s).collect();
            match eval(&x, &w2).filter(|u| *u > v) {
                Some(u) => (v, w, sw) = (u, w2, (sw * 1.5).min(1.0)),
                None => sw *= 0.5,
            }
        }
        best = best.max(v);
    }
    best
}
