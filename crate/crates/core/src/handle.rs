use std::fmt;
use std::sync::Arc;

type EvalFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A black-box map between coordinate spaces, with an open-domain predicate.
#[derive(Clone)]
pub struct FunctionHandle {
    pub dim_in: usize,
    pub dim_out: usize,
    pub label: String,
    /// Absolute evaluation noise, used as a floor for finite differences.
    pub noise: f64,
    eval: Arc<EvalFn>,
    domain: Arc<DomainFn>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionHandle({}: R^{} -> R^{})", self.label, self.dim_in, self.dim_out)
    }
}

impl FunctionHandle {
    pub fn new<F>(label: impl Into<String>, dim_in: usize, dim_out: usize, eval: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        FunctionHandle {
            dim_in,
            dim_out,
            label: label.into(),
            noise: 0.0,
            eval: Arc::new(eval),
            domain: Arc::new(|x: &[f64]| x.iter().all(|v| v.is_finite())),
        }
    }

    /// Scalar map of one or more variables.
    pub fn scalar<F>(label: impl Into<String>, dim_in: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, dim_in, 1, move |x| vec![f(x)])
    }

    /// Real function of one real variable.
    pub fn real<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, 1, 1, move |x| vec![f(x[0])])
    }

    pub fn with_domain<D>(mut self, domain: D) -> Self
    where
        D: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.domain = Arc::new(move |x: &[f64]| x.iter().all(|v| v.is_finite()) && domain(x));
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim_in && (self.domain)(x)
    }

    /// `x ↦ c` on the same domain.
    pub fn constant(dim_in: usize, value: Vec<f64>) -> Self {
        let d = value.len();
        FunctionHandle::new("const", dim_in, d, move |_| value.clone())
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        Self::constant(dim_in, vec![0.0; dim_out]).with_label("0")
    }

    pub fn identity(dim: usize) -> Self {
        FunctionHandle::new("id", dim, dim, |x| x.to_vec())
    }

    /// `x ↦ Lx` for a row-major matrix.
    pub fn linear(rows: Vec<Vec<f64>>) -> Self {
        let dim_out = rows.len();
        let dim_in = rows.first().map_or(0, |r| r.len());
        FunctionHandle::new("linear", dim_in, dim_out, move |x| {
            rows.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &FunctionHandle) -> FunctionHandle {
        let (o, i) = (self.clone(), inner.clone());
        let (o2, i2) = (self.clone(), inner.clone());
        FunctionHandle::new(format!("{}∘{}", self.label, inner.label), inner.dim_in, self.dim_out, move |x| {
            o.eval(&i.eval(x))
        })
        .with_domain(move |x| i2.in_domain(x) && o2.in_domain(&i2.eval(x)))
    }

    pub fn scale(&self, c: f64) -> FunctionHandle {
        let f = self.clone();
        let g = self.clone();
        FunctionHandle::new(format!("{c}·{}", self.label), self.dim_in, self.dim_out, move |x| {
            f.eval(x).into_iter().map(|v| c * v).collect()
        })
        .with_domain(move |x| g.in_domain(x))
    }

    /// `x ↦ f(a) + h(x − a)`, the translate of a map fixing the origin.
    pub fn translate(h: &FunctionHandle, a: &[f64], fa: &[f64]) -> FunctionHandle {
        let (h1, a1, fa1) = (h.clone(), a.to_vec(), fa.to_vec());
        let (h2, a2) = (h.clone(), a.to_vec());
        FunctionHandle::new(format!("{} at a", h.label), h.dim_in, h.dim_out, move |x| {
            let d: Vec<f64> = x.iter().zip(&a1).map(|(u, v)| u - v).collect();
            h1.eval(&d).iter().zip(&fa1).map(|(u, v)| u + v).collect()
        })
        .with_domain(move |x| {
            let d: Vec<f64> = x.iter().zip(&a2).map(|(u, v)| u - v).collect();
            h2.in_domain(&d)
        })
    }
}
