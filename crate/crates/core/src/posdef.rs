//! Positive-definiteness tests for φ_ξ^K through Gram matrices
//! [φ(g_j⁻¹g_i)] over finite sets of motions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::eval::{eval_points, EvalConfig};
use crate::group::{GroupElement, GroupHandle, HaarSampler};
use crate::motion::{motion_compose, motion_inverse, MotionElement};
use crate::spectral::SpectralParam;

const MOTION_SALT: u64 = 0x6A09_E667_F3BC_C908;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ConsistentPSD,
    ViolatedPSD,
}

/// A Gram matrix with its spectrum and verdict.
#[derive(Debug, Clone)]
pub struct GramReport {
    pub points: Vec<MotionElement>,
    /// Hermitian after symmetrization.
    pub matrix: DMatrix<Complex64>,
    /// Entrywise standard errors (zero for exact evaluation).
    pub stderr_matrix: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    /// Frobenius norm of `stderr_matrix`, a bound on the eigenvalue noise.
    pub propagated_stderr: f64,
    pub verdict: Verdict,
    /// Coefficients c with Σ φ(g_j⁻¹g_i) c̄_j c_i = `witness_form`, when violated.
    pub witness: Option<Vec<Complex64>>,
    pub witness_form: Option<f64>,
}

impl GramReport {
    /// Largest |entry| off the diagonal.
    pub fn max_off_diagonal(&self) -> f64 {
        let m = self.matrix.nrows();
        (0..m)
            .flat_map(|i| (0..m).filter(move |j| *j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.matrix[(i, j)].norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct MotionJson {
    translation: Vec<f64>,
    rotation: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct GramReportJson {
    points: Vec<MotionJson>,
    matrix_re: Vec<Vec<f64>>,
    matrix_im: Vec<Vec<f64>>,
    stderr: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    min_eigenvalue: f64,
    propagated_stderr: f64,
    verdict: Verdict,
    witness: Option<Vec<Complex64>>,
    witness_form: Option<f64>,
}

fn rows<T: Copy, U>(m: &DMatrix<T>, f: impl Fn(T) -> U) -> Vec<Vec<U>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(m[(i, j)])).collect()).collect()
}

impl Serialize for GramReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GramReportJson {
            points: self
                .points
                .iter()
                .map(|g| MotionJson { translation: g.translation.iter().copied().collect(), rotation: rows(g.rotation.matrix(), |v| v) })
                .collect(),
            matrix_re: rows(&self.matrix, |z| z.re),
            matrix_im: rows(&self.matrix, |z| z.im),
            stderr: rows(&self.stderr_matrix, |v| v),
            eigenvalues: self.eigenvalues.clone(),
            min_eigenvalue: self.min_eigenvalue,
            propagated_stderr: self.propagated_stderr,
            verdict: self.verdict,
            witness: self.witness.clone(),
            witness_form: self.witness_form,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GramReport {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = GramReportJson::deserialize(deserializer)?;
        let m = j.matrix_re.len();
        let bad = |what: &str| D::Error::custom(format!("malformed {what}"));
        if j.matrix_im.len() != m || j.stderr.len() != m || j.matrix_re.iter().chain(&j.matrix_im).chain(&j.stderr).any(|r| r.len() != m) {
            return Err(bad("matrix"));
        }
        let points = j
            .points
            .into_iter()
            .map(|p| {
                let n = p.translation.len();
                if p.rotation.len() != n || p.rotation.iter().any(|r| r.len() != n) {
                    return Err(bad("rotation"));
                }
                let k = GroupElement::new(DMatrix::from_fn(n, n, |i, j| p.rotation[i][j])).map_err(|e| D::Error::custom(e.to_string()))?;
                Ok(MotionElement { translation: DVector::from_vec(p.translation), rotation: k })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(GramReport {
            points,
            matrix: DMatrix::from_fn(m, m, |i, k| Complex64::new(j.matrix_re[i][k], j.matrix_im[i][k])),
            stderr_matrix: DMatrix::from_fn(m, m, |i, k| j.stderr[i][k]),
            eigenvalues: j.eigenvalues,
            min_eigenvalue: j.min_eigenvalue,
            propagated_stderr: j.propagated_stderr,
            verdict: j.verdict,
            witness: j.witness,
            witness_form: j.witness_form,
        })
    }
}

/// The Gram matrix [φ_ξ^K(g_j⁻¹g_i)] with its spectrum.
///
/// An exact evaluation counts as violated when the smallest eigenvalue is
/// below −cfg.tol. With Monte Carlo noise σ (the propagated stderr) it counts
/// as consistent above −(cfg.tol + 3σ) and as violated only below −(cfg.tol + 5σ).
pub fn gram_matrix(handle: &GroupHandle, xi: &SpectralParam, motions: &[MotionElement], cfg: &EvalConfig) -> Result<GramReport> {
    if motions.is_empty() {
        return Err(Error::InvalidArgument("Gram matrix needs at least one motion".into()));
    }
    let n = handle.ambient_dim();
    check_dim(n, xi.dim())?;
    for g in motions {
        check_dim(n, g.dim())?;
    }
    let m = motions.len();
    let inverses: Vec<MotionElement> = motions.iter().map(motion_inverse).collect();
    let mut points = Vec::with_capacity(m * m);
    for gi in motions {
        for inv_j in &inverses {
            points.push(motion_compose(inv_j, gi)?.translation);
        }
    }
    let vals = eval_points(handle, xi, &points, cfg)?;
    let raw = DMatrix::from_fn(m, m, |i, j| vals[i * m + j].value);
    let se = DMatrix::from_fn(m, m, |i, j| vals[i * m + j].stderr);
    let matrix = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let stderr_matrix = (&se + se.transpose()) * 0.5;
    let propagated_stderr = stderr_matrix.norm();

    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let min_eigenvalue = eigenvalues[0];

    let violated = if propagated_stderr == 0.0 {
        min_eigenvalue < -cfg.tol
    } else {
        min_eigenvalue < -(cfg.tol + 5.0 * propagated_stderr)
    };
    let (verdict, witness, witness_form) = if violated {
        // c = conj(u) for the bottom eigenvector u gives Σ A_ij c̄_j c_i = uᴴAu
        let c: Vec<Complex64> = eig.eigenvectors.column(order[0]).iter().map(|z| z.conj()).collect();
        let form = quadratic_form(&matrix, &c);
        (Verdict::ViolatedPSD, Some(c), Some(form))
    } else {
        (Verdict::ConsistentPSD, None, None)
    };
    Ok(GramReport {
        points: motions.to_vec(),
        matrix,
        stderr_matrix,
        eigenvalues,
        min_eigenvalue,
        propagated_stderr,
        verdict,
        witness,
        witness_form,
    })
}

/// Σ_{i,j} A_ij c̄_j c_i, real for Hermitian A.
pub fn quadratic_form(a: &DMatrix<Complex64>, c: &[Complex64]) -> f64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            s += a[(i, j)] * cj.conj() * ci;
        }
    }
    s.re
}

/// `cfg.gram_points` motions with translations uniform in the ball of radius
/// `cfg.gram_radius` and Haar-random rotations from K (the identity when K
/// has no sampler). Reproducible from `cfg.seed`.
pub fn sample_motions(handle: &GroupHandle, cfg: &EvalConfig) -> Result<Vec<MotionElement>> {
    let n = handle.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ MOTION_SALT);
    let mut rotations: Box<dyn Iterator<Item = GroupElement>> = if handle.has_sampler() {
        Box::new(HaarSampler::new(handle, cfg.seed ^ MOTION_SALT.rotate_left(17))?)
    } else {
        Box::new(std::iter::repeat(GroupElement::identity(n)))
    };
    Ok((0..cfg.gram_points)
        .map(|_| {
            let dir = loop {
                let v = DVector::<f64>::from_fn(n, |_, _| rng.sample(StandardNormal));
                if v.norm() > 1e-12 {
                    break v.normalize();
                }
            };
            let radius = cfg.gram_radius * rng.random::<f64>().powf(1.0 / n as f64);
            let k = rotations.next().expect("endless rotation stream");
            MotionElement { translation: dir * radius, rotation: k }
        })
        .collect())
}

/// Gram report over [`sample_motions`].
pub fn posdef_verdict(handle: &GroupHandle, xi: &SpectralParam, cfg: &EvalConfig) -> Result<GramReport> {
    let motions = sample_motions(handle, cfg)?;
    gram_matrix(handle, xi, &motions, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, rotation2, GroupSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small_cfg() -> EvalConfig {
        EvalConfig { gram_points: 10, ..EvalConfig::default() }
    }

    #[test]
    fn single_motion() {
        let h = build_group(&GroupSpec::cyclic(4)).unwrap();
        let g = MotionElement::new(DVector::from_vec(vec![0.3, 0.2]), GroupElement::new(rotation2(std::f64::consts::FRAC_PI_2)).unwrap()).unwrap();
        let r = gram_matrix(&h, &SpectralParam::real(&[1.0, 2.0]), &[g], &EvalConfig::default()).unwrap();
        assert_eq!(r.matrix, DMatrix::from_element(1, 1, c(1.0, 0.0)));
        assert_eq!(r.verdict, Verdict::ConsistentPSD);
    }

    #[test]
    fn zero_parameter_gives_all_ones() {
        let h = build_group(&GroupSpec::SpecialOrthogonal { n: 2 }).unwrap();
        let r = posdef_verdict(&h, &SpectralParam::zeros(2), &small_cfg()).unwrap();
        assert!(r.matrix.iter().all(|z| *z == c(1.0, 0.0)));
        assert!(r.min_eigenvalue.abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::ConsistentPSD);
    }

    #[test]
    fn real_parameters_are_positive_definite() {
        for spec in [GroupSpec::cyclic(4), GroupSpec::dihedral(4), GroupSpec::SpecialOrthogonal { n: 2 }] {
            let h = build_group(&spec).unwrap();
            let r = posdef_verdict(&h, &SpectralParam::real(&[0.8, -1.4]), &small_cfg()).unwrap();
            assert!(r.min_eigenvalue >= -1e-9, "{spec}: {}", r.min_eigenvalue);
            assert_eq!(r.verdict, Verdict::ConsistentPSD);
            for i in 0..r.matrix.nrows() {
                assert!((r.matrix[(i, i)] - c(1.0, 0.0)).norm() < 1e-12);
            }
            assert_eq!(r.matrix, r.matrix.adjoint());
        }
    }

    #[test]
    fn imaginary_parameter_violates() {
        let h = build_group(&GroupSpec::SpecialOrthogonal { n: 2 }).unwrap();
        let xi = SpectralParam::new(vec![c(0.0, 1.0), c(0.0, 0.0)]);
        let motions = [MotionElement::identity(2), MotionElement::translation(DVector::from_vec(vec![3.0, 0.0]))];
        let r = gram_matrix(&h, &xi, &motions, &EvalConfig::default()).unwrap();
        // I₀(3), by a 64-node Gauss–Legendre rule for (1/π)∫₀^π e^{3cos θ} dθ
        let i0: f64 = crate::quadrature::integrate(|t: f64| (3.0 * t.cos()).exp(), 0.0, std::f64::consts::PI, 64) / std::f64::consts::PI;
        assert!((r.matrix[(0, 1)].re - i0).abs() < 1e-10, "{} vs {i0}", r.matrix[(0, 1)]);
        assert!((i0 - 4.880_792_585_865_024).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::ViolatedPSD);
        let form = r.witness_form.unwrap();
        assert!(form < -1e-9);
        assert!((form - quadratic_form(&r.matrix, r.witness.as_ref().unwrap())).abs() < 1e-12);
        assert!((form - (1.0 - i0)).abs() < 1e-9);

        let sampled = posdef_verdict(&h, &xi, &small_cfg()).unwrap();
        assert_eq!(sampled.verdict, Verdict::ViolatedPSD);
        assert!(sampled.max_off_diagonal() > 1.0);
    }

    #[test]
    fn orbit_partners_share_gram_matrices() {
        let h = build_group(&GroupSpec::dihedral(4)).unwrap();
        let xi = SpectralParam::real(&[0.4, 1.1]);
        let k = h.elements().unwrap()[3].matrix().clone();
        let motions = sample_motions(&h, &small_cfg()).unwrap();
        let a = gram_matrix(&h, &xi, &motions, &EvalConfig::default()).unwrap();
        let b = gram_matrix(&h, &xi.transformed(&k), &motions, &EvalConfig::default()).unwrap();
        assert!((a.matrix - b.matrix).iter().all(|z| z.norm() <= 1e-10));
    }

    #[test]
    fn monte_carlo_gram() {
        let h = build_group(&GroupSpec::SpecialOrthogonal { n: 3 }).unwrap();
        let cfg = EvalConfig { gram_points: 6, samples: 4000, ..EvalConfig::default() };
        let r = posdef_verdict(&h, &SpectralParam::real(&[0.5, 0.2, -0.3]), &cfg).unwrap();
        assert!(r.propagated_stderr > 0.0);
        assert!(r.min_eigenvalue >= -3.0 * r.propagated_stderr);
        assert_eq!(r.verdict, Verdict::ConsistentPSD);
    }

    #[test]
    fn json_round_trip() {
        let h = build_group(&GroupSpec::cyclic(4)).unwrap();
        let r = posdef_verdict(&h, &SpectralParam::real(&[1.0, 0.5]), &EvalConfig { gram_points: 3, ..EvalConfig::default() }).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"verdict\":\"ConsistentPSD\""));
        let back: GramReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.matrix, r.matrix);
        assert_eq!(back.points, r.points);
    }
}
