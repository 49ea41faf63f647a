//! Invariant polynomials and fingerprints of spectral parameters.
//!
//! Two parameters give the same spherical function exactly when every
//! K-invariant polynomial takes the same value on them. For finite K a
//! generating set of the invariant ring is found degree by degree: the Molien
//! series fixes the dimension of each graded piece, products of earlier
//! generators are projected out, and Reynolds images of monomials fill the rest.
//! Sphere-transitive K has the single generator b(ξ,ξ).

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{check_dim, Error, Result};
use crate::eval::{eval_points, EvalConfig};
use crate::group::{block_ranges, GroupElement, GroupHandle};
use crate::spectral::SpectralParam;

/// Guard on the number of monomials of degree ≤ max_degree.
pub const MONOMIAL_CAP: usize = 200_000;

/// Default tolerance for fingerprint comparison.
pub const DEFAULT_EQUIV_TOL: f64 = 1e-9;

const RANK_TOL: f64 = 1e-9;
const PROBE_SEED: u64 = 0x5eed_1a7e;
const COEFF_FLOOR: f64 = 1e-14;

/// A polynomial on Cⁿ stored as exponent tuple → coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantPolynomial {
    terms: BTreeMap<Vec<u32>, Complex64>,
    degree: u32,
}

impl InvariantPolynomial {
    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Complex64> {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, xi: &DVector<Complex64>) -> Complex64 {
        self.terms
            .iter()
            .map(|(exps, c)| exps.iter().zip(xi.iter()).fold(*c, |acc, (&e, z)| acc * z.powu(e)))
            .sum()
    }

    fn constant(n: usize, c: f64) -> Self {
        InvariantPolynomial { terms: BTreeMap::from([(vec![0; n], Complex64::new(c, 0.0))]), degree: 0 }
    }

    fn mul(&self, other: &InvariantPolynomial) -> Self {
        let mut terms: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_default() += ca * cb;
            }
        }
        InvariantPolynomial { terms, degree: self.degree + other.degree }
    }

    fn add_scaled(&mut self, other: &InvariantPolynomial, s: f64) {
        for (e, c) in &other.terms {
            *self.terms.entry(e.clone()).or_default() += c * s;
        }
    }

    fn prune(mut self) -> Self {
        let scale = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        self.terms.retain(|_, c| c.norm() > COEFF_FLOOR * scale);
        self
    }
}

/// A generating set of the invariant ring up to `max_degree`.
#[derive(Debug, Clone)]
pub struct InvariantBasis {
    pub polynomials: Vec<InvariantPolynomial>,
    pub basis_id: String,
    pub max_degree: usize,
    /// Dimensions of the graded pieces, from the Molien series (index = degree).
    pub graded_dims: Vec<usize>,
    /// `max_degree` reaches the group order, so the set generates the whole ring.
    pub complete: bool,
}

/// Fingerprint of ξ: invariant values in a fixed order, tagged by the basis used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientPoint {
    /// Each value serializes as `[re, im]`.
    pub values: Vec<Complex64>,
    pub basis_id: String,
}

impl QuotientPoint {
    /// Entrywise |a − b| ≤ tol·(1 + max(|a|, |b|)).
    pub fn agrees(&self, other: &QuotientPoint, tol: f64) -> Result<bool> {
        if self.basis_id != other.basis_id || self.values.len() != other.values.len() {
            return Err(Error::BasisMismatch { left: self.basis_id.clone(), right: other.basis_id.clone() });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .all(|(a, b)| (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))))
    }
}

/// Generators of the invariant ring of a finite group, of degree ≤ max(max_degree, 2).
pub fn reynolds_basis(handle: &GroupHandle, max_degree: usize) -> Result<Vec<InvariantPolynomial>> {
    Ok(invariant_basis(handle, max_degree)?.polynomials.clone())
}

/// Like [`reynolds_basis`], returning the cached basis with its metadata.
pub fn invariant_basis(handle: &GroupHandle, max_degree: usize) -> Result<Arc<InvariantBasis>> {
    if !handle.is_finite() {
        return Err(Error::NotFinite);
    }
    // degree 2 always holds b(ξ,ξ), so it is never left out
    let degree = max_degree.max(2);
    let mut cache = handle.basis_cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(b) = cache.get(&degree) {
        return Ok(b.clone());
    }
    let basis = Arc::new(compute_basis(handle, degree)?);
    cache.insert(degree, basis.clone());
    Ok(basis)
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Exponent tuples of total degree `d` in `n` variables, lexicographically descending.
fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=d).rev() {
            prefix.push(e);
            rec(n, d - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Coefficients of det(I − tA) by Faddeev–LeVerrier.
fn reversed_char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * c[k - 1];
        let am = a * &m;
        c.push(-am.trace() / k as f64);
    }
    c
}

/// dim of the degree-d invariants for d ≤ max_degree: (1/|K|) Σ_k 1/det(I − tk).
fn molien_dims(elements: &[GroupElement], max_degree: usize) -> Vec<usize> {
    let mut sums = vec![0.0; max_degree + 1];
    for k in elements {
        let c = reversed_char_poly(k.matrix());
        let mut a = vec![0.0; max_degree + 1];
        a[0] = 1.0;
        for m in 1..=max_degree {
            a[m] = -(1..c.len().min(m + 1)).map(|j| c[j] * a[m - j]).sum::<f64>();
        }
        for (s, v) in sums.iter_mut().zip(&a) {
            *s += v;
        }
    }
    sums.iter().map(|s| (s / elements.len() as f64).round().max(0.0) as usize).collect()
}

/// Orthonormal basis of evaluation vectors, grown by modified Gram–Schmidt.
struct Span {
    vectors: Vec<DVector<Complex64>>,
}

impl Span {
    fn new() -> Self {
        Span { vectors: Vec::new() }
    }

    /// Adds `v` if it is independent of the span; returns whether it was added.
    fn try_add(&mut self, v: &DVector<Complex64>) -> bool {
        let scale = v.norm();
        if scale == 0.0 {
            return false;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &self.vectors {
                let proj = q.dotc(&r);
                r.axpy(-proj, q, Complex64::new(1.0, 0.0));
            }
        }
        let res = r.norm();
        if res <= RANK_TOL * scale {
            return false;
        }
        self.vectors.push(r / Complex64::new(res, 0.0));
        true
    }
}

fn compute_basis(handle: &GroupHandle, degree: usize) -> Result<InvariantBasis> {
    let elements = handle.elements().ok_or(Error::NotFinite)?;
    let n = handle.ambient_dim();
    let count = binomial(degree + n, n).saturating_sub(1);
    if count > MONOMIAL_CAP {
        return Err(Error::DegreeCapExceeded { count, cap: MONOMIAL_CAP });
    }
    let dims = molien_dims(elements, degree);
    let probe_count = (2 * dims.iter().copied().max().unwrap_or(1)).max(4);

    // Unit-norm complex Gaussian probes and their orbits.
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let probes: Vec<DVector<Complex64>> = (0..probe_count)
        .map(|_| {
            let v = DVector::<Complex64>::from_fn(n, |_, _| {
                Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            });
            let norm = v.norm();
            v / Complex64::new(norm, 0.0)
        })
        .collect();
    let orbits: Vec<Vec<DVector<Complex64>>> = probes
        .iter()
        .map(|p| elements.iter().map(|k| k.matrix().map(|v| Complex64::new(v, 0.0)) * p).collect())
        .collect();

    let reynolds_values = |alpha: &[u32]| -> DVector<Complex64> {
        DVector::from_iterator(
            probe_count,
            orbits.iter().map(|orbit| {
                orbit
                    .iter()
                    .map(|y| y.iter().zip(alpha).fold(Complex64::new(1.0, 0.0), |acc, (z, &e)| acc * z.powu(e)))
                    .sum::<Complex64>()
                    / elements.len() as f64
            }),
        )
    };

    // graded[d]: an orthonormal basis of the degree-d invariants reached so far
    let mut graded: Vec<Vec<DVector<Complex64>>> = vec![vec![DVector::from_element(probe_count, Complex64::new(1.0, 0.0))]];
    let mut generators: Vec<(usize, DVector<Complex64>, Vec<u32>)> = Vec::new();
    for d in 1..=degree {
        let mut span = Span::new();
        for (gd, gvals, _) in &generators {
            for s in &graded[d - gd] {
                if span.vectors.len() == dims[d] {
                    break;
                }
                span.try_add(&gvals.component_mul(s));
            }
        }
        if span.vectors.len() < dims[d] {
            for alpha in monomials(n, d as u32) {
                let vals = reynolds_values(&alpha);
                if span.try_add(&vals) {
                    generators.push((d, vals, alpha));
                }
                if span.vectors.len() == dims[d] {
                    break;
                }
            }
        }
        graded.push(span.vectors);
    }

    let polynomials: Vec<InvariantPolynomial> =
        generators.iter().map(|(_, _, alpha)| reynolds_polynomial(elements, alpha)).collect();
    let basis_id = basis_id(handle, degree, generators.iter().map(|(_, _, a)| a));
    Ok(InvariantBasis { polynomials, basis_id, max_degree: degree, graded_dims: dims, complete: degree >= elements.len() })
}

/// (1/|K|) Σ_k Π_i ((kξ)_i)^{α_i}, expanded symbolically.
fn reynolds_polynomial(elements: &[GroupElement], alpha: &[u32]) -> InvariantPolynomial {
    let n = alpha.len();
    let mut acc = InvariantPolynomial { terms: BTreeMap::new(), degree: alpha.iter().sum() };
    for k in elements {
        let m = k.matrix();
        let mut prod = InvariantPolynomial::constant(n, 1.0);
        for (i, &e) in alpha.iter().enumerate() {
            let mut linear = InvariantPolynomial { terms: BTreeMap::new(), degree: 1 };
            for j in 0..n {
                if m[(i, j)] != 0.0 {
                    let mut exps = vec![0; n];
                    exps[j] = 1;
                    linear.terms.insert(exps, Complex64::new(m[(i, j)], 0.0));
                }
            }
            for _ in 0..e {
                prod = prod.mul(&linear);
            }
        }
        acc.add_scaled(&prod, 1.0 / elements.len() as f64);
    }
    acc.prune()
}

fn basis_id<'a>(handle: &GroupHandle, degree: usize, alphas: impl Iterator<Item = &'a Vec<u32>>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_string(handle.spec()).unwrap_or_default().as_bytes());
    hasher.update(degree.to_le_bytes());
    for a in alphas {
        for e in a {
            hasher.update(e.to_le_bytes());
        }
        hasher.update(b";");
    }
    let digest = hasher.finalize();
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("reynolds:d{degree}:{hex}")
}

/// The quotient point of ξ, with the default degree bound.
pub fn fingerprint(handle: &GroupHandle, xi: &SpectralParam) -> Result<QuotientPoint> {
    fingerprint_with_degree(handle, xi, None)
}

/// The quotient point of ξ; finite factors use invariants up to `max_degree`
/// (default: the group order).
pub fn fingerprint_with_degree(handle: &GroupHandle, xi: &SpectralParam, max_degree: Option<usize>) -> Result<QuotientPoint> {
    check_dim(handle.ambient_dim(), xi.dim())?;
    if !handle.factors().is_empty() {
        let mut values = Vec::new();
        let mut ids = Vec::new();
        for (f, (start, len)) in handle.factors().iter().zip(block_ranges(handle.factors())) {
            let q = fingerprint_with_degree(f, &xi.block(start, len), max_degree)?;
            values.extend(q.values);
            ids.push(q.basis_id);
        }
        return Ok(QuotientPoint { values, basis_id: format!("block[{}]", ids.join(",")) });
    }
    if let Some(order) = handle.order() {
        let basis = invariant_basis(handle, max_degree.unwrap_or(order))?;
        let values = basis.polynomials.iter().map(|p| p.eval(xi.components())).collect();
        return Ok(QuotientPoint { values, basis_id: basis.basis_id.clone() });
    }
    if handle.is_sphere_transitive() {
        return Ok(QuotientPoint { values: vec![xi.square()], basis_id: format!("quadratic:n={}", handle.ambient_dim()) });
    }
    Err(Error::FingerprintUnsupported { group: handle.spec().to_string() })
}

/// Whether φ_ξ^K = φ_ξ′^K, decided by comparing fingerprints.
pub fn equivalent(handle: &GroupHandle, xi: &SpectralParam, xi2: &SpectralParam, tol: f64) -> Result<bool> {
    fingerprint(handle, xi)?.agrees(&fingerprint(handle, xi2)?, tol)
}

/// Deterministic probe points for separating two spherical functions:
/// the coordinate axes, their pairwise diagonals and a fixed pseudo-random
/// set of directions, each at several radii.
pub fn sweep_points(n: usize) -> Vec<DVector<f64>> {
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    for i in 0..n {
        dirs.push(DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }));
        for j in i + 1..n {
            for s in [1.0, -1.0] {
                dirs.push(DVector::from_fn(n, |k, _| if k == i { 1.0 } else if k == j { s } else { 0.0 }).normalize());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED ^ 1);
    for _ in 0..8 {
        let v = DVector::<f64>::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        dirs.push(v.normalize());
    }
    let radii = [0.3, 0.7, 1.1, 1.6, 2.3, 3.1];
    dirs.iter().flat_map(|d| radii.iter().map(move |r| d * *r)).collect()
}

/// The sweep point where |φ_ξ − φ_ξ′| is largest, with that difference.
pub fn separating_probe(
    handle: &GroupHandle,
    xi: &SpectralParam,
    xi2: &SpectralParam,
    cfg: &EvalConfig,
) -> Result<(DVector<f64>, f64)> {
    let points = sweep_points(handle.ambient_dim());
    let a = eval_points(handle, xi, &points, cfg)?;
    let b = eval_points(handle, xi2, &points, cfg)?;
    let (i, diff) = a
        .iter()
        .zip(&b)
        .map(|(u, v)| (u.value - v.value).norm())
        .enumerate()
        .fold((0, 0.0), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    Ok((points[i].clone(), diff))
}
