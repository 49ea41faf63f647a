//! Closed forms for sphere-transitive K.
//!
//! For these groups φ_ξ^K depends only on λ² = b(ξ, ξ) and r = |x|. The
//! authoritative evaluator is the normalized Poisson-type integral
//!
//! ```text
//! φ(r) = π^{-1/2} Γ(n/2) / Γ((n-1)/2) · ∫₀^π cos(λ r cos θ) sin^{n-2} θ dθ ,
//! ```
//!
//! which is entire and even in λ. The power series for J_ν serves as an
//! independent cross-check through φ(r) = c(n) (λr)^{-ν} J_ν(λr), ν = (n-2)/2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::spectral::{SpectralParam, EXPONENT_GUARD};

const SERIES_TERM_CAP: usize = 400;
const SERIES_REL_TOL: f64 = 1e-17;
const FIRST_NODES: usize = 32;
const MAX_NODES: usize = 4096;
const NODE_DOUBLING_TOL: f64 = 1e-13;

/// Parameters of a closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormQuery {
    pub n: usize,
    /// λ = √b(ξ, ξ), principal branch.
    pub lambda: Complex64,
    pub r: f64,
}

impl ClosedFormQuery {
    pub fn new(n: usize, lambda: Complex64, r: f64) -> Self {
        ClosedFormQuery { n, lambda, r }
    }

    /// λ = √b(ξ, ξ) and r = |x|.
    pub fn from_xi(xi: &SpectralParam, x: &nalgebra::DVector<f64>) -> Self {
        ClosedFormQuery { n: xi.dim(), lambda: xi.square().sqrt(), r: x.norm() }
    }
}

/// Γ(k/2) for a positive integer k, exact for the integer cases.
pub fn gamma_half_integer(k: usize) -> f64 {
    assert!(k > 0);
    let (mut value, mut s) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while s < target {
        value *= s;
        s += 1.0;
    }
    value
}

/// Power series Σ (−1)^m (z/2)^{ν+2m} / (m! Γ(ν+m+1)) on the principal branch.
pub fn bessel_j(nu: f64, z: Complex64) -> Result<Complex64> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidArgument(format!("Bessel order must be non-negative, got {nu}")));
    }
    if z.norm() > EXPONENT_GUARD {
        return Err(Error::OverflowRisk { exponent: z.norm() });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(if nu == 0.0 { 1.0 } else { 0.0 }, 0.0));
    }
    let half = z * 0.5;
    let mut term = half.powf(nu) / statrs::function::gamma::gamma(nu + 1.0);
    if nu == 0.0 {
        term = Complex64::new(1.0, 0.0);
    }
    let step = -(half * half);
    let mut sum = term;
    for m in 1..SERIES_TERM_CAP {
        term *= step / (m as f64 * (nu + m as f64));
        sum += term;
        if term.norm() < SERIES_REL_TOL * sum.norm() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged { terms: SERIES_TERM_CAP })
}

/// c(n) = π^{-1/2} 2^{(n-2)/2} Γ(1/2) Γ(n/2) = 2^{(n-2)/2} Γ(n/2).
pub fn normalization_constant(n: usize) -> f64 {
    assert!(n >= 2, "normalization constant needs n >= 2");
    2f64.powf((n as f64 - 2.0) / 2.0) * gamma_half_integer(n)
}

/// Normalized Poisson integral evaluated with an `nodes`-point Gauss–Legendre rule.
pub fn poisson_integral_form(n: usize, lambda: Complex64, r: f64, nodes: usize) -> Result<Complex64> {
    if n < 2 {
        return Err(Error::InvalidArgument("Poisson integral needs n >= 2".into()));
    }
    if nodes < 8 {
        return Err(Error::InvalidArgument("Poisson integral needs at least 8 nodes".into()));
    }
    let z = lambda * r;
    if z.im.abs() > EXPONENT_GUARD {
        return Err(Error::OverflowRisk { exponent: z.im.abs() });
    }
    let prefactor = std::f64::consts::PI.sqrt().recip() * gamma_half_integer(n) / gamma_half_integer(n - 1);
    let power = (n - 2) as i32;
    let integral: Complex64 = integrate(
        |theta: f64| (z * theta.cos()).cos() * theta.sin().powi(power),
        0.0,
        std::f64::consts::PI,
        nodes,
    );
    Ok(integral * prefactor)
}

/// φ_ξ^K for sphere-transitive K (any n ≥ 2) and for K = {±1} when n = 1.
pub fn closed_form_spherical(query: &ClosedFormQuery) -> Result<Complex64> {
    let ClosedFormQuery { n, lambda, r } = *query;
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be non-negative, got {r}")));
    }
    let one = Complex64::new(1.0, 0.0);
    if r == 0.0 || lambda == Complex64::new(0.0, 0.0) {
        return Ok(one);
    }
    if n == 1 {
        // cosh(iλr) = cos(λr)
        let z = lambda * r;
        if z.im.abs() > EXPONENT_GUARD {
            return Err(Error::OverflowRisk { exponent: z.im.abs() });
        }
        return Ok(z.cos());
    }
    let mut nodes = FIRST_NODES;
    let mut prev = poisson_integral_form(n, lambda, r, nodes)?;
    while nodes < MAX_NODES {
        nodes *= 2;
        let next = poisson_integral_form(n, lambda, r, nodes)?;
        if (next - prev).norm() <= NODE_DOUBLING_TOL * next.norm().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged { nodes })
}

/// Same as [`closed_form_spherical`] with λ and r taken from ξ and x.
pub fn closed_form_at(xi: &SpectralParam, x: &nalgebra::DVector<f64>) -> Result<Complex64> {
    closed_form_spherical(&ClosedFormQuery::from_xi(xi, x))
}
