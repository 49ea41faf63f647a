//! Checks of the defining properties of φ_ξ^K: the functional equation,
//! the Laplacian eigenvalue, the induced-function identity and lattice
//! compatibility.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{closed_form_spherical, gamma_half_integer, ClosedFormQuery};
use crate::error::{check_dim, Error, Result};
use crate::eval::{circle_rule, eval_points, factor_seed, mean_and_stderr, EvalConfig, Method, MethodPreference, QUADRATURE_TOL};
use crate::group::{block_ranges, GroupElement, GroupHandle, HaarSampler};
use crate::motion::MotionElement;
use crate::quadrature::integrate;
use crate::spectral::{b_real, guarded_exp_i, SpectralParam};

/// Default finite-difference step for [`eigen_check`].
pub const DEFAULT_STEP: f64 = 1e-3;

/// Below this |φ(x)| an eigenvalue ratio is meaningless.
pub const PROBE_FLOOR: f64 = 1e-8;

const OUTER_SALT: u64 = 0xA5A5_5A5A_F00D_CAFE;
const FIRST_OUTER_NODES: usize = 32;
const MAX_OUTER_NODES: usize = 1 << 16;
const MAX_GL_NODES: usize = 4096;
const BLOCK_TOL: f64 = 1e-12;
const MEMBERSHIP_TOL: f64 = 1e-9;

/// Both sides of φ(g₁)φ(g₂) = ∫_K φ(g₁kg₂) dμ_K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Combined standard error of lhs − rhs; zero for exact evaluation.
    pub stderr: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mode {
    ClosedForm,
    MonteCarlo,
    Product,
    Finite,
    Circle(bool),
}

fn mode(handle: &GroupHandle, cfg: &EvalConfig) -> Result<Mode> {
    if cfg.method == MethodPreference::ClosedForm && handle.is_sphere_transitive() {
        return Ok(Mode::ClosedForm);
    }
    if cfg.method == MethodPreference::MonteCarlo && handle.has_sampler() {
        return Ok(Mode::MonteCarlo);
    }
    if !handle.factors().is_empty() {
        return Ok(Mode::Product);
    }
    if handle.is_finite() {
        return Ok(Mode::Finite);
    }
    if let Some(reflections) = handle.circle() {
        return Ok(Mode::Circle(reflections));
    }
    if handle.has_sampler() {
        return Ok(Mode::MonteCarlo);
    }
    Err(Error::UnsupportedSampler { group: handle.spec().to_string() })
}

/// Compares φ(g₁)φ(g₂) with the K-average of φ(g₁kg₂), where φ(x, k) := φ_ξ^K(x).
///
/// Finite groups use exact double sums, SO(2)/O(2) nested trapezoid rules,
/// sphere-transitive groups under [`MethodPreference::ClosedForm`] a reduction
/// to one angular integral, and everything else a Monte Carlo pair estimator
/// that reuses the inner sample set of the left side.
///
/// For finite K the rotation parts of g₁ and g₂ must be elements of K.
pub fn verify_functional_equation(
    handle: &GroupHandle,
    xi: &SpectralParam,
    g1: &MotionElement,
    g2: &MotionElement,
    cfg: &EvalConfig,
) -> Result<FunctionalCheck> {
    let n = handle.ambient_dim();
    check_dim(n, xi.dim())?;
    check_dim(n, g1.dim())?;
    check_dim(n, g2.dim())?;
    if let Some(elems) = handle.elements() {
        for (name, g) in [("g1", g1), ("g2", g2)] {
            if !elems.iter().any(|k| (k.matrix() - g.rotation.matrix()).amax() <= MEMBERSHIP_TOL) {
                return Err(Error::InvalidArgument(format!("rotation part of {name} is not an element of K")));
            }
        }
    }
    let (lhs, rhs, stderr, method) = functional_parts(handle, xi, &g1.translation, g1.rotation.matrix(), &g2.translation, cfg)?;
    Ok(FunctionalCheck { lhs, rhs, residual: (lhs - rhs).norm(), stderr, method })
}

/// The translation part of g₁·(0,k)·g₂ is x₁ + k₁k·x₂; only that enters φ.
fn functional_parts(
    handle: &GroupHandle,
    xi: &SpectralParam,
    x1: &DVector<f64>,
    k1: &DMatrix<f64>,
    x2: &DVector<f64>,
    cfg: &EvalConfig,
) -> Result<(Complex64, Complex64, f64, Method)> {
    match mode(handle, cfg)? {
        Mode::Finite => {
            let elems = handle.elements().expect("finite handle");
            let lhs = lhs_exact(handle, xi, x1, x2, cfg)?;
            let ys: Vec<DVector<f64>> = elems.iter().map(|k| x1 + k1 * (k.matrix() * x2)).collect();
            let vals = eval_points(handle, xi, &ys, cfg)?;
            let rhs = vals.iter().map(|r| r.value).sum::<Complex64>() / vals.len() as f64;
            Ok((lhs, rhs, 0.0, Method::FiniteSum))
        }
        Mode::Circle(reflections) => {
            let lhs = lhs_exact(handle, xi, x1, x2, cfg)?;
            let outer = |nodes: usize| -> Result<Complex64> {
                let ys: Vec<DVector<f64>> = circle_rule(nodes, reflections).iter().map(|k| x1 + k1 * (k * x2)).collect();
                let vals = eval_points(handle, xi, &ys, cfg)?;
                Ok(vals.iter().map(|r| r.value).sum::<Complex64>() / vals.len() as f64)
            };
            let rhs = refine(FIRST_OUTER_NODES, MAX_OUTER_NODES, outer)?;
            Ok((lhs, rhs, 0.0, Method::TorusQuadrature))
        }
        Mode::ClosedForm => {
            let n = handle.ambient_dim();
            let cf = |r: f64| closed_form_spherical(&ClosedFormQuery { n, lambda: xi.square().sqrt(), r });
            let (r1, r2) = (x1.norm(), x2.norm());
            let lhs = cf(r1)? * cf(r2)?;
            // k₁k·x₂ is uniform on the sphere of radius r₂; only the angle to x₁ matters
            let density = gamma_half_integer(n) / (std::f64::consts::PI.sqrt() * gamma_half_integer(n - 1));
            let angular = |nodes: usize| -> Result<Complex64> {
                let err = std::cell::Cell::new(None);
                let v: Complex64 = integrate(
                    |t: f64| {
                        let r = (r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * t.cos()).max(0.0).sqrt();
                        match cf(r) {
                            Ok(v) => v * t.sin().powi(n as i32 - 2),
                            Err(e) => {
                                err.set(Some(e));
                                Complex64::new(0.0, 0.0)
                            }
                        }
                    },
                    0.0,
                    std::f64::consts::PI,
                    nodes,
                );
                match err.into_inner() {
                    Some(e) => Err(e),
                    None => Ok(v * density),
                }
            };
            let rhs = refine(FIRST_OUTER_NODES, MAX_GL_NODES, angular)?;
            Ok((lhs, rhs, 0.0, Method::ClosedForm))
        }
        Mode::Product => {
            let mut lhs = Complex64::new(1.0, 0.0);
            let mut rhs = Complex64::new(1.0, 0.0);
            let (mut var_l, mut var_r) = (Vec::new(), Vec::new());
            let mut method = Method::ClosedForm;
            for (idx, (f, (start, len))) in handle.factors().iter().zip(block_ranges(handle.factors())).enumerate() {
                let k1_block = diagonal_block(k1, start, len)?;
                let sub = cfg.with_seed(factor_seed(cfg.seed, idx));
                let (l, r, s, m) = functional_parts(
                    f,
                    &xi.block(start, len),
                    &x1.rows(start, len).into_owned(),
                    &k1_block,
                    &x2.rows(start, len).into_owned(),
                    &sub,
                )?;
                var_l.push((l, s));
                var_r.push((r, s));
                lhs *= l;
                rhs *= r;
                method = if method == Method::ClosedForm || m == Method::MonteCarlo { m } else { method };
            }
            let stderr = (product_variance(&var_l) + product_variance(&var_r)).sqrt();
            Ok((lhs, rhs, stderr, method))
        }
        Mode::MonteCarlo => {
            let mc = cfg.with_method(MethodPreference::MonteCarlo);
            let sides = eval_points(handle, xi, &[x1.clone(), x2.clone()], &mc)?;
            let (p1, p2) = (sides[0], sides[1]);
            let lhs = p1.value * p2.value;
            let mut inner = HaarSampler::new(handle, cfg.seed)?;
            let mut outer = HaarSampler::new(handle, cfg.seed ^ OUTER_SALT)?;
            let (re, im) = (xi.re(), xi.im());
            let terms: Vec<Complex64> = (0..cfg.samples.max(1))
                .map(|_| {
                    let k = outer.next_matrix();
                    let s = inner.next_matrix();
                    let y = x1 + k1 * (k * x2);
                    let b = Complex64::new(y.dot(&(&s * &re)), y.dot(&(&s * &im)));
                    guarded_exp_i(b)
                })
                .collect::<Result<_>>()?;
            let (rhs, se_rhs) = mean_and_stderr(&terms);
            let se_lhs2 = (p2.value.norm() * p1.stderr).powi(2) + (p1.value.norm() * p2.stderr).powi(2);
            Ok((lhs, rhs, (se_rhs * se_rhs + se_lhs2).sqrt(), Method::MonteCarlo))
        }
    }
}

fn lhs_exact(handle: &GroupHandle, xi: &SpectralParam, x1: &DVector<f64>, x2: &DVector<f64>, cfg: &EvalConfig) -> Result<Complex64> {
    let v = eval_points(handle, xi, &[x1.clone(), x2.clone()], cfg)?;
    Ok(v[0].value * v[1].value)
}

/// σ² of a product Π vⱼ from per-factor (vⱼ, σⱼ).
fn product_variance(parts: &[(Complex64, f64)]) -> f64 {
    (0..parts.len())
        .map(|j| {
            let others: f64 = parts.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, (v, _))| v.norm_sqr()).product();
            parts[j].1 * parts[j].1 * others
        })
        .sum()
}

fn diagonal_block(k: &DMatrix<f64>, start: usize, len: usize) -> Result<DMatrix<f64>> {
    let n = k.nrows();
    for i in start..start + len {
        for j in (0..n).filter(|j| *j < start || *j >= start + len) {
            if k[(i, j)].abs() > BLOCK_TOL || k[(j, i)].abs() > BLOCK_TOL {
                return Err(Error::InvalidArgument("rotation is not block diagonal for this block group".into()));
            }
        }
    }
    Ok(k.view((start, start), (len, len)).into_owned())
}

/// Doubles the node count from `first` until successive values agree to
/// [`QUADRATURE_TOL`]·max(1, |value|).
fn refine<F: FnMut(usize) -> Result<Complex64>>(first: usize, cap: usize, mut f: F) -> Result<Complex64> {
    let mut nodes = first;
    let mut prev = f(nodes)?;
    while nodes < cap {
        nodes *= 2;
        let next = f(nodes)?;
        if (next - prev).norm() <= QUADRATURE_TOL * next.norm().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged { nodes })
}

/// Estimate of (Δφ)(x)/φ(x), Δ = −Σ∂ᵢ², from central second differences.
///
/// All 2n+1 stencil points go through one [`eval_points`] call, so Monte Carlo
/// evaluations share their samples and the noise largely cancels.
pub fn eigen_check(handle: &GroupHandle, xi: &SpectralParam, x: &DVector<f64>, h: f64, cfg: &EvalConfig) -> Result<Complex64> {
    let n = handle.ambient_dim();
    check_dim(n, xi.dim())?;
    check_dim(n, x.len())?;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if xi.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut points = vec![x.clone()];
    for i in 0..n {
        for s in [h, -h] {
            let mut p = x.clone();
            p[i] += s;
            points.push(p);
        }
    }
    let vals = eval_points(handle, xi, &points, cfg)?;
    let center = vals[0].value;
    if center.norm() < PROBE_FLOOR {
        return Err(Error::ProbeAtZero { magnitude: center.norm() });
    }
    let second: Complex64 = (0..n).map(|i| vals[1 + 2 * i].value - center * 2.0 + vals[2 + 2 * i].value).sum();
    Ok(-second / (h * h) / center)
}

/// Whether exp(i·b(ξ, γ)) = 1 on the lattice spanned by `basis`, i.e.
/// b(ξ, γⱼ) ∈ 2πZ within `tol` for every basis vector.
pub fn lattice_compatible(xi: &SpectralParam, basis: &[DVector<f64>], tol: f64) -> Result<bool> {
    let n = xi.dim();
    for g in basis {
        check_dim(n, g.len())?;
    }
    if basis.is_empty() {
        return Ok(true);
    }
    let m = DMatrix::from_columns(basis);
    let sv = m.singular_values();
    let top = sv.max();
    let rank = sv.iter().filter(|s| **s > 1e-10 * top.max(f64::MIN_POSITIVE)).count();
    if rank < basis.len() || top == 0.0 {
        return Err(Error::DegenerateBasis { rank, count: basis.len() });
    }
    Ok(basis.iter().all(|g| {
        let z = b_real(g, xi);
        let turns = z.re / std::f64::consts::TAU;
        z.im.abs() <= tol && (z.re - turns.round() * std::f64::consts::TAU).abs() <= tol
    }))
}

/// φ_ξ^K at g = (x, k₀) through both averaging pipelines on one rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InducedCheck {
    /// ∫_K φ_ξ((k₀k)⁻¹x) dμ_K(k), from the decomposition g·(0,k) = (0,k₀k)·((k₀k)⁻¹x, 1).
    pub induced: Complex64,
    /// ∫_K exp(i·b(x, k(ξ))) dμ_K(k).
    pub direct: Complex64,
    pub residual: f64,
}

/// Evaluates the function induced from the quasicharacter φ_ξ on Rⁿ at g and
/// the K-average of φ_ξ at the translation of g, on the same element list,
/// quadrature rule or sample set.
pub fn induced_spherical(handle: &GroupHandle, xi: &SpectralParam, g: &MotionElement, cfg: &EvalConfig) -> Result<InducedCheck> {
    check_dim(handle.ambient_dim(), xi.dim())?;
    check_dim(handle.ambient_dim(), g.dim())?;
    let (induced, direct) = induced_parts(handle, xi, &g.translation, g.rotation.matrix(), cfg)?;
    Ok(InducedCheck { induced, direct, residual: (induced - direct).norm() })
}

fn induced_parts(handle: &GroupHandle, xi: &SpectralParam, x: &DVector<f64>, k0: &DMatrix<f64>, cfg: &EvalConfig) -> Result<(Complex64, Complex64)> {
    let on_rule = |ks: &[DMatrix<f64>]| -> Result<(Complex64, Complex64)> {
        let (mut a, mut b) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for k in ks {
            let q = (k0 * k).transpose() * x;
            a += guarded_exp_i(b_real(&q, xi))?;
            b += guarded_exp_i(b_real(x, &xi.transformed(k)))?;
        }
        Ok((a / ks.len() as f64, b / ks.len() as f64))
    };
    match mode(handle, cfg)? {
        Mode::Finite => {
            let ks: Vec<DMatrix<f64>> = handle.elements().expect("finite handle").iter().map(|e| e.matrix().clone()).collect();
            on_rule(&ks)
        }
        Mode::Circle(reflections) => {
            let mut nodes = cfg.quadrature_nodes.max(4);
            let mut prev = on_rule(&circle_rule(nodes, reflections))?;
            while nodes < MAX_OUTER_NODES {
                nodes *= 2;
                let next = on_rule(&circle_rule(nodes, reflections))?;
                let settled = |u: Complex64, v: Complex64| (u - v).norm() <= QUADRATURE_TOL * u.norm().max(1.0);
                if settled(next.0, prev.0) && settled(next.1, prev.1) {
                    return Ok(next);
                }
                prev = next;
            }
            Err(Error::QuadratureNotConverged { nodes })
        }
        Mode::Product => {
            let (mut a, mut b) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
            for (idx, (f, (start, len))) in handle.factors().iter().zip(block_ranges(handle.factors())).enumerate() {
                let (u, v) = induced_parts(
                    f,
                    &xi.block(start, len),
                    &x.rows(start, len).into_owned(),
                    &diagonal_block(k0, start, len)?,
                    &cfg.with_seed(factor_seed(cfg.seed, idx)),
                )?;
                a *= u;
                b *= v;
            }
            Ok((a, b))
        }
        Mode::MonteCarlo => {
            let mut sampler = HaarSampler::new(handle, cfg.seed)?;
            let ks: Vec<DMatrix<f64>> = (0..cfg.samples.max(1)).map(|_| sampler.next_matrix()).collect();
            on_rule(&ks)
        }
        Mode::ClosedForm => Err(Error::InvalidArgument("the induced-function check averages over K; use an averaging method".into())),
    }
}

/// |φ_ξ^K(k·x) − φ_ξ^K(x)| maximized over the given group elements.
pub fn k_invariance_defect(handle: &GroupHandle, xi: &SpectralParam, x: &DVector<f64>, ks: &[GroupElement], cfg: &EvalConfig) -> Result<f64> {
    let mut points = vec![x.clone()];
    points.extend(ks.iter().map(|k| k.act(x)));
    let vals = eval_points(handle, xi, &points, cfg)?;
    Ok(vals[1..].iter().map(|v| (v.value - vals[0].value).norm()).fold(0.0, f64::max))
}
