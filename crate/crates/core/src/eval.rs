//! Evaluation of φ_ξ^K(x) = ∫_K exp(i·b(x, k(ξ))) dμ_K(k).
//!
//! The method follows the handle: exact means over finite groups, periodic
//! trapezoidal quadrature for SO(2)/O(2) and tori, factorized products for
//! block groups, and Monte Carlo over Haar samples otherwise.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::closed_form_at;
use crate::error::{check_dim, Error, Result};
use crate::group::{block_ranges, rotation2, GroupHandle, HaarSampler};
use crate::spectral::{guarded_exp_i, SpectralParam};

/// Agreement required between successive trapezoid refinements.
pub const QUADRATURE_TOL: f64 = 1e-12;
const MAX_CIRCLE_NODES: usize = 1 << 20;

/// How φ was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    MonteCarlo,
    FiniteSum,
    TorusQuadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::MonteCarlo => "MonteCarlo",
            Method::FiniteSum => "FiniteSum",
            Method::TorusQuadrature => "TorusQuadrature",
            Method::ClosedForm => "ClosedForm",
        }
    }

    fn combine(self, other: Method) -> Method {
        use Method::*;
        let rank = |m: Method| match m {
            MonteCarlo => 3,
            TorusQuadrature => 2,
            FiniteSum => 1,
            ClosedForm => 0,
        };
        if rank(self) >= rank(other) {
            self
        } else {
            other
        }
    }
}

/// Which evaluator to prefer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodPreference {
    /// Exact where possible, Monte Carlo otherwise.
    #[default]
    Auto,
    /// Closed form for sphere-transitive K; other groups fall back to `Auto`.
    ClosedForm,
    /// Monte Carlo whenever a sampler exists, even for exactly evaluable groups.
    MonteCarlo,
}

/// Sampling, quadrature and tolerance settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub samples: usize,
    pub seed: u64,
    pub quadrature_nodes: usize,
    pub tol: f64,
    pub method: MethodPreference,
    /// Number of motions in a Gram-matrix test.
    pub gram_points: usize,
    /// Radius of the ball translations are drawn from in a Gram-matrix test.
    pub gram_radius: f64,
    /// Degree cap for invariant bases; `None` uses the group order.
    pub max_degree: Option<usize>,
    /// Largest accepted quadrature error estimate of a spherical transform,
    /// relative to max(1, |value|).
    pub transform_tol: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            samples: 100_000,
            seed: 0,
            quadrature_nodes: 256,
            tol: 1e-9,
            method: MethodPreference::Auto,
            gram_points: 24,
            gram_radius: 5.0,
            max_degree: None,
            transform_tol: 1e-6,
        }
    }
}

impl EvalConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        EvalConfig { seed, ..self.clone() }
    }

    pub fn with_samples(&self, samples: usize) -> Self {
        EvalConfig { samples, ..self.clone() }
    }

    pub fn with_method(&self, method: MethodPreference) -> Self {
        EvalConfig { method, ..self.clone() }
    }
}

/// A value of φ with its standard error (zero for deterministic methods).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: Complex64,
    pub stderr: f64,
    pub method: Method,
}

impl EvalResult {
    fn exact(value: Complex64, method: Method) -> Self {
        EvalResult { value, stderr: 0.0, method }
    }
}

/// The orbit points {k(ξ)} of a quadrature or sample set, stored row-wise.
pub(crate) struct OrbitSet {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl OrbitSet {
    pub(crate) fn from_matrices<'a, I: IntoIterator<Item = &'a DMatrix<f64>>>(xi: &SpectralParam, ks: I) -> Self {
        let (xr, xi_im) = (xi.re(), xi.im());
        let mut set = OrbitSet { n: xi.dim(), re: Vec::new(), im: Vec::new() };
        for k in ks {
            set.re.extend((k * &xr).iter());
            set.im.extend((k * &xi_im).iter());
        }
        set
    }

    fn len(&self) -> usize {
        self.re.len() / self.n.max(1)
    }

    pub(crate) fn terms<'a>(&'a self, x: &'a DVector<f64>) -> impl Iterator<Item = Result<Complex64>> + 'a {
        (0..self.len()).map(move |s| {
            let row = s * self.n..(s + 1) * self.n;
            let re: f64 = self.re[row.clone()].iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            let im: f64 = self.im[row].iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            guarded_exp_i(Complex64::new(re, im))
        })
    }

    pub(crate) fn mean(&self, x: &DVector<f64>) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for t in self.terms(x) {
            sum += t?;
        }
        Ok(sum / self.len() as f64)
    }

    /// Mean and stderr = √(var Re + var Im) / √N.
    pub(crate) fn mean_with_stderr(&self, x: &DVector<f64>) -> Result<(Complex64, f64)> {
        let vals: Vec<Complex64> = self.terms(x).collect::<Result<_>>()?;
        Ok(mean_and_stderr(&vals))
    }
}

pub(crate) fn mean_and_stderr(vals: &[Complex64]) -> (Complex64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<Complex64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Rotation angles θ_j = 2πj/N, plus their reflected copies for O(2).
pub(crate) fn circle_rule(nodes: usize, reflections: bool) -> Vec<DMatrix<f64>> {
    let step = std::f64::consts::TAU / nodes as f64;
    let mut out: Vec<DMatrix<f64>> = (0..nodes).map(|j| rotation2(j as f64 * step)).collect();
    if reflections {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let reflected: Vec<DMatrix<f64>> = out.iter().map(|r| r * &sigma).collect();
        out.extend(reflected);
    }
    out
}

fn is_origin(x: &DVector<f64>) -> bool {
    x.iter().all(|v| *v == 0.0)
}

/// φ_ξ^K(x).
pub fn eval_spherical(handle: &GroupHandle, xi: &SpectralParam, x: &DVector<f64>, cfg: &EvalConfig) -> Result<EvalResult> {
    Ok(eval_points(handle, xi, std::slice::from_ref(x), cfg)?.remove(0))
}

/// φ_ξ^K at several points. Monte Carlo evaluations share one sample set
/// (seeded by `cfg.seed`), so differences between points carry little noise.
pub fn eval_points(handle: &GroupHandle, xi: &SpectralParam, points: &[DVector<f64>], cfg: &EvalConfig) -> Result<Vec<EvalResult>> {
    check_dim(handle.ambient_dim(), xi.dim())?;
    for x in points {
        check_dim(handle.ambient_dim(), x.len())?;
    }
    if cfg.method == MethodPreference::ClosedForm && handle.is_sphere_transitive() {
        return points
            .iter()
            .map(|x| Ok(EvalResult::exact(closed_form_at(xi, x)?, Method::ClosedForm)))
            .collect();
    }
    let monte_carlo = match cfg.method {
        MethodPreference::MonteCarlo => handle.has_sampler(),
        _ => false,
    };
    if monte_carlo {
        return eval_monte_carlo(handle, xi, points, cfg);
    }
    if !handle.factors().is_empty() {
        return eval_product(handle, xi, points, cfg);
    }
    if let Some(elems) = handle.elements() {
        let orbit = OrbitSet::from_matrices(xi, elems.iter().map(|e| e.matrix()));
        return points.iter().map(|x| Ok(EvalResult::exact(orbit.mean(x)?, Method::FiniteSum))).collect();
    }
    if let Some(reflections) = handle.circle() {
        return eval_circle(xi, points, cfg.quadrature_nodes, reflections);
    }
    if handle.has_sampler() {
        return eval_monte_carlo(handle, xi, points, cfg);
    }
    Err(Error::UnsupportedSampler { group: handle.spec().to_string() })
}

fn eval_monte_carlo(handle: &GroupHandle, xi: &SpectralParam, points: &[DVector<f64>], cfg: &EvalConfig) -> Result<Vec<EvalResult>> {
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let mut sampler = HaarSampler::new(handle, cfg.seed)?;
    let ks: Vec<DMatrix<f64>> = (0..cfg.samples).map(|_| sampler.next_matrix()).collect();
    let orbit = OrbitSet::from_matrices(xi, ks.iter());
    points
        .iter()
        .map(|x| {
            if is_origin(x) || xi.is_zero() {
                // normalization, known without sampling
                return Ok(EvalResult::exact(Complex64::new(1.0, 0.0), Method::ClosedForm));
            }
            let (value, stderr) = orbit.mean_with_stderr(x)?;
            Ok(EvalResult { value, stderr, method: Method::MonteCarlo })
        })
        .collect()
}

fn eval_circle(xi: &SpectralParam, points: &[DVector<f64>], first_nodes: usize, reflections: bool) -> Result<Vec<EvalResult>> {
    let mut rules: Vec<(usize, OrbitSet)> = Vec::new();
    let rule_for = |nodes: usize, rules: &mut Vec<(usize, OrbitSet)>| -> usize {
        if let Some(i) = rules.iter().position(|(n, _)| *n == nodes) {
            return i;
        }
        rules.push((nodes, OrbitSet::from_matrices(xi, circle_rule(nodes, reflections).iter())));
        rules.len() - 1
    };
    let mut out = Vec::with_capacity(points.len());
    for x in points {
        let mut nodes = first_nodes.max(4);
        let i = rule_for(nodes, &mut rules);
        let mut prev = rules[i].1.mean(x)?;
        loop {
            if nodes >= MAX_CIRCLE_NODES {
                return Err(Error::QuadratureNotConverged { nodes });
            }
            nodes *= 2;
            let i = rule_for(nodes, &mut rules);
            let next = rules[i].1.mean(x)?;
            if (next - prev).norm() <= QUADRATURE_TOL * next.norm().max(1.0) {
                out.push(EvalResult::exact(next, Method::TorusQuadrature));
                break;
            }
            prev = next;
        }
    }
    Ok(out)
}

/// Block products factorize: φ_ξ^{K₁×K₂}(x₁, x₂) = φ_{ξ₁}^{K₁}(x₁) · φ_{ξ₂}^{K₂}(x₂).
fn eval_product(handle: &GroupHandle, xi: &SpectralParam, points: &[DVector<f64>], cfg: &EvalConfig) -> Result<Vec<EvalResult>> {
    let mut acc: Vec<EvalResult> = points.iter().map(|_| EvalResult::exact(Complex64::new(1.0, 0.0), Method::ClosedForm)).collect();
    for (idx, (factor, (start, len))) in handle.factors().iter().zip(block_ranges(handle.factors())).enumerate() {
        let sub_xi = xi.block(start, len);
        let sub_points: Vec<DVector<f64>> = points.iter().map(|x| x.rows(start, len).into_owned()).collect();
        let sub_cfg = cfg.with_seed(factor_seed(cfg.seed, idx));
        let values = eval_points(factor, &sub_xi, &sub_points, &sub_cfg)?;
        for (a, v) in acc.iter_mut().zip(values) {
            let stderr = ((a.stderr * v.value.norm()).powi(2) + (v.stderr * a.value.norm()).powi(2)).sqrt();
            *a = EvalResult { value: a.value * v.value, stderr, method: a.method.combine(v.method) };
        }
    }
    Ok(acc)
}

pub(crate) fn factor_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Evaluates each point independently with seed `cfg.seed ^ index`, in parallel.
/// Output order follows input order; results do not depend on the thread count.
pub fn eval_batch(handle: &GroupHandle, xi: &SpectralParam, points: &[DVector<f64>], cfg: &EvalConfig) -> Result<Vec<EvalResult>> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, x)| eval_spherical(handle, xi, x, &cfg.with_seed(cfg.seed ^ i as u64)))
        .collect()
}
