//! The spherical transform f̂(φ_ξ^K) = ∫_{Rⁿ} f(x) φ_ξ^K(−x) dx of a compactly
//! supported K-invariant function.
//!
//! Radial profiles reduce to a one-dimensional integral against the radial
//! closed form. This is valid for every K: a radial f is O(n)-invariant, so
//! its integral against the quasicharacter depends on ξ only through b(ξ,ξ).
//! Functions on a tensor grid are integrated point by point against φ_ξ^K.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{closed_form_spherical, gamma_half_integer, ClosedFormQuery};
use crate::error::{check_dim, Error, Result};
use crate::eval::{eval_points, EvalConfig};
use crate::group::GroupHandle;
use crate::spectral::SpectralParam;

/// f(x) = g(|x|) sampled on a radial grid; zero beyond `support_radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    /// In JSON each value is a number or a `[re, im]` pair.
    #[serde(with = "crate::spectral::complex_list")]
    pub values: Vec<Complex64>,
    pub support_radius: f64,
}

impl RadialProfile {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, support_radius: f64) -> Result<Self> {
        let p = RadialProfile { grid, values, support_radius };
        p.validate()?;
        Ok(p)
    }

    /// Samples `f` at `points` equispaced radii on [0, support_radius].
    pub fn from_fn<F: Fn(f64) -> Complex64>(support_radius: f64, points: usize, f: F) -> Result<Self> {
        if points < 3 {
            return Err(Error::InvalidArgument("a radial grid needs at least 3 points".into()));
        }
        let grid: Vec<f64> = (0..points).map(|i| support_radius * i as f64 / (points - 1) as f64).collect();
        let values = grid.iter().map(|&r| f(r)).collect();
        RadialProfile::new(grid, values, support_radius)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.values.len() {
            return Err(Error::InvalidArgument(format!("{} radii but {} values", self.grid.len(), self.values.len())));
        }
        if self.grid.len() < 3 {
            return Err(Error::InvalidArgument("a radial grid needs at least 3 points".into()));
        }
        if !(self.grid[0] >= 0.0) || self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("radial grid must be non-negative and strictly increasing".into()));
        }
        if !self.support_radius.is_finite() || self.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("profile values and support radius must be finite".into()));
        }
        Ok(())
    }

    fn value(&self, i: usize) -> Complex64 {
        if self.grid[i] > self.support_radius {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i]
        }
    }
}

/// f sampled on the tensor grid {−L + i·h}ⁿ, i = 0..m−1, h = 2L/(m−1);
/// values are stored with the last coordinate varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub n: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    #[serde(with = "crate::spectral::complex_list")]
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_fn<F: Fn(&DVector<f64>) -> Complex64>(n: usize, half_width: f64, points_per_axis: usize, f: F) -> Result<Self> {
        let mut g = GridFunction { n, half_width, points_per_axis, values: Vec::new() };
        g.check_shape(false)?;
        g.values = (0..g.len()).map(|idx| f(&g.point(idx))).collect();
        Ok(g)
    }

    fn len(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    fn check_shape(&self, with_values: bool) -> Result<()> {
        if self.n == 0 || self.points_per_axis < 3 || self.points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidArgument("grid functions need n ≥ 1 and an odd number (≥ 3) of points per axis".into()));
        }
        if !(self.half_width > 0.0) || !self.half_width.is_finite() {
            return Err(Error::InvalidArgument("grid half-width must be positive".into()));
        }
        if (self.points_per_axis as f64).powi(self.n as i32) > 5e7 {
            return Err(Error::InvalidArgument("grid has too many points".into()));
        }
        if with_values && self.values.len() != self.len() {
            return Err(Error::InvalidArgument(format!("grid needs {} values, found {}", self.len(), self.values.len())));
        }
        Ok(())
    }

    fn indices(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.points_per_axis;
            idx /= self.points_per_axis;
        }
        out
    }

    fn point(&self, idx: usize) -> DVector<f64> {
        let h = self.spacing();
        DVector::from_iterator(self.n, self.indices(idx).into_iter().map(|i| -self.half_width + i as f64 * h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TransformInput {
    Radial(RadialProfile),
    Grid(GridFunction),
}

/// f̂ at one ξ with an estimate of its quadrature (and sampling) error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformValue {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// ∫ f(x) φ_ξ^K(−x) dx for each ξ.
///
/// Radial profiles use composite Simpson on the profile grid; grid functions
/// use the tensor trapezoid rule. The error estimate compares the rule on the
/// given grid with the same rule on every other grid point (divided by 15 and
/// 3 respectively). It fails with
/// [`Error::GridTooCoarse`] when that exceeds cfg.transform_tol·max(1, |f̂|).
pub fn spherical_transform(f: &TransformInput, handle: &GroupHandle, xis: &[SpectralParam], cfg: &EvalConfig) -> Result<Vec<TransformValue>> {
    let n = handle.ambient_dim();
    for xi in xis {
        check_dim(n, xi.dim())?;
    }
    let values = match f {
        TransformInput::Radial(p) => {
            p.validate()?;
            xis.iter().map(|xi| radial_transform(p, n, xi)).collect::<Result<Vec<_>>>()?
        }
        TransformInput::Grid(g) => {
            g.check_shape(true)?;
            check_dim(n, g.n)?;
            xis.iter().map(|xi| grid_transform(g, handle, xi, cfg)).collect::<Result<Vec<_>>>()?
        }
    };
    for v in &values {
        let tol = cfg.transform_tol * v.value.norm().max(1.0);
        if !(v.error_estimate <= tol) {
            return Err(Error::GridTooCoarse { estimate: v.error_estimate, tol });
        }
    }
    Ok(values)
}

/// Surface area of the unit sphere in Rⁿ, 2π^{n/2}/Γ(n/2).
pub fn sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

fn radial_transform(p: &RadialProfile, n: usize, xi: &SpectralParam) -> Result<TransformValue> {
    let lambda = xi.square().sqrt();
    let mut integrand = Vec::with_capacity(p.grid.len());
    for (i, &r) in p.grid.iter().enumerate() {
        let f = p.value(i);
        let term = if f == Complex64::new(0.0, 0.0) {
            f
        } else {
            // φ is even in x, so φ(−x) = φ(x)
            f * closed_form_spherical(&ClosedFormQuery { n, lambda, r })? * r.powi(n as i32 - 1)
        };
        integrand.push(term);
    }
    let area = sphere_area(n);
    let fine = simpson(&p.grid, &integrand, 1) * area;
    let coarse = simpson(&p.grid, &integrand, 2) * area;
    Ok(TransformValue { value: fine, error_estimate: (fine - coarse).norm() / 15.0 })
}

/// Composite Simpson through every `stride`-th sample, always keeping the last
/// one. Spacing may vary; an odd leftover interval is integrated with the
/// quadratic through the previous panel.
fn simpson(grid: &[f64], values: &[Complex64], stride: usize) -> Complex64 {
    let mut idx: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    if *idx.last().unwrap() != grid.len() - 1 {
        idx.push(grid.len() - 1);
    }
    if idx.len() == 2 {
        let (a, b) = (idx[0], idx[1]);
        return (values[a] + values[b]) * (0.5 * (grid[b] - grid[a]));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut panel = |j: [usize; 3], lo: f64, hi: f64| {
        let w = quadratic_weights([grid[j[0]], grid[j[1]], grid[j[2]]], lo, hi);
        total += values[j[0]] * w[0] + values[j[1]] * w[1] + values[j[2]] * w[2];
    };
    let mut i = 0;
    while i + 2 < idx.len() {
        panel([idx[i], idx[i + 1], idx[i + 2]], grid[idx[i]], grid[idx[i + 2]]);
        i += 2;
    }
    if i + 1 < idx.len() {
        let k = idx.len();
        panel([idx[k - 3], idx[k - 2], idx[k - 1]], grid[idx[k - 2]], grid[idx[k - 1]]);
    }
    total
}

/// ∫_lo^hi of the Lagrange basis through three nodes (two-point Gauss is exact).
fn quadratic_weights(x: [f64; 3], lo: f64, hi: f64) -> [f64; 3] {
    let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    let g = half / 3f64.sqrt();
    let mut w = [0.0; 3];
    for t in [mid - g, mid + g] {
        for j in 0..3 {
            let mut l = half;
            for m in 0..3 {
                if m != j {
                    l *= (t - x[m]) / (x[j] - x[m]);
                }
            }
            w[j] += l;
        }
    }
    w
}

fn grid_transform(g: &GridFunction, handle: &GroupHandle, xi: &SpectralParam, cfg: &EvalConfig) -> Result<TransformValue> {
    let support: Vec<usize> = (0..g.len()).filter(|&i| g.values[i] != Complex64::new(0.0, 0.0)).collect();
    let points: Vec<DVector<f64>> = support.iter().map(|&i| -g.point(i)).collect();
    let phis = eval_points(handle, xi, &points, cfg)?;
    let h = g.spacing();
    let m = g.points_per_axis;
    // tensor trapezoid weights on the fine grid and on the grid of even indices
    let weight = |idx: &[usize], stride: usize| -> f64 {
        let mut w = 1.0;
        for &i in idx {
            if i % stride != 0 {
                return 0.0;
            }
            w *= if i == 0 || i == m - 1 { 0.5 } else { 1.0 } * h * stride as f64;
        }
        w
    };
    let (mut fine, mut coarse, mut noise) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
    for (&i, phi) in support.iter().zip(&phis) {
        let idx = g.indices(i);
        let term = g.values[i] * phi.value;
        let wf = weight(&idx, 1);
        fine += term * wf;
        coarse += term * weight(&idx, 2);
        noise += wf * g.values[i].norm() * phi.stderr;
    }
    Ok(TransformValue { value: fine, error_estimate: (fine - coarse).norm() / 3.0 + noise })
}
