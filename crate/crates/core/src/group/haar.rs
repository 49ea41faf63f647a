//! Haar-distributed samples from the supported compact groups.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::realify::{qconj, qmul, quaternion_right, realify_quaternion, realify_unchecked, Quaternion};
use super::{block_diag, GroupElement, GroupHandle, SamplerId, SymplecticExtension};
use crate::error::{Error, Result};

/// Deterministic stream of Haar samples from one handle.
pub struct HaarSampler<'a> {
    handle: &'a GroupHandle,
    rng: ChaCha8Rng,
}

impl<'a> HaarSampler<'a> {
    pub fn new(handle: &'a GroupHandle, seed: u64) -> Result<Self> {
        if !handle.has_sampler() {
            return Err(Error::UnsupportedSampler { group: handle.spec().to_string() });
        }
        Ok(HaarSampler { handle, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn next_matrix(&mut self) -> DMatrix<f64> {
        sample(self.handle, &mut self.rng)
    }
}

impl Iterator for HaarSampler<'_> {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        Some(GroupElement::from_matrix_unchecked(self.next_matrix()))
    }
}

/// `count` i.i.d. Haar samples, reproducible from `seed`.
pub fn haar_samples(handle: &GroupHandle, seed: u64, count: usize) -> Result<Vec<GroupElement>> {
    Ok(HaarSampler::new(handle, seed)?.take(count).collect())
}

fn sample<R: Rng + ?Sized>(handle: &GroupHandle, rng: &mut R) -> DMatrix<f64> {
    match handle.sampler_id() {
        SamplerId::FiniteUniform => {
            let elems = handle.elements().expect("finite handle");
            elems[rng.random_range(0..elems.len())].matrix().clone()
        }
        SamplerId::Orthogonal { n } => {
            let mut q = haar_special_orthogonal(n, rng);
            if rng.random_bool(0.5) {
                q.column_mut(0).neg_mut();
            }
            q
        }
        SamplerId::SpecialOrthogonal { n } => haar_special_orthogonal(n, rng),
        SamplerId::Unitary { m } => realify_unchecked(&haar_unitary(m, rng)),
        SamplerId::SpecialUnitary { m } => {
            let mut u = haar_unitary(m, rng);
            let det = u.determinant();
            let phase = det.conj() / det.norm();
            let mut col = u.column_mut(0);
            col *= phase;
            realify_unchecked(&u)
        }
        SamplerId::Symplectic { m, extension } => {
            let a = realify_quaternion(&haar_symplectic(m, rng), m);
            let scalar: Option<Quaternion> = match extension {
                SymplecticExtension::None => None,
                SymplecticExtension::U1 => {
                    let theta = rng.random_range(0.0..std::f64::consts::TAU);
                    Some([theta.cos(), theta.sin(), 0.0, 0.0])
                }
                SymplecticExtension::Sp1 => Some(unit_quaternion(rng)),
            };
            match scalar {
                None => a,
                Some(z) => {
                    let r = quaternion_right(&z);
                    block_diag(&vec![r; m]) * a
                }
            }
        }
        SamplerId::Product => {
            let blocks: Vec<DMatrix<f64>> = handle.factors().iter().map(|f| sample(f, rng)).collect();
            block_diag(&blocks)
        }
        SamplerId::Unsupported => unreachable!("checked by HaarSampler::new"),
    }
}

/// Gaussian matrix, QR, columns rescaled by the signs of diag(R), then forced into SO(n).
fn haar_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Complex Ginibre matrix, QR, columns rescaled by the phases of diag(R).
fn haar_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(m, m, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            let mut col = q.column_mut(j);
            col *= phase;
        }
    }
    q
}

fn unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let v = DVector::<f64>::from_fn(4, |_, _| rng.sample(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return [v[0] / norm, v[1] / norm, v[2] / norm, v[3] / norm];
        }
    }
}

/// Gram–Schmidt on a quaternionic Gaussian matrix (right scalar multiplication);
/// the resulting positive-diagonal factor makes the law left-Sp(m)-invariant.
/// Returned row-major.
fn haar_symplectic<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<Quaternion> {
    let mut cols: Vec<Vec<Quaternion>> = Vec::with_capacity(m);
    for _ in 0..m {
        let mut v: Vec<Quaternion> = (0..m)
            .map(|_| {
                [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)]
            })
            .collect();
        for u in &cols {
            // ⟨u, v⟩ = Σ conj(u_i) v_i ; v ← v − u⟨u, v⟩
            let mut ip = [0.0; 4];
            for i in 0..m {
                let t = qmul(&qconj(&u[i]), &v[i]);
                for k in 0..4 {
                    ip[k] += t[k];
                }
            }
            for i in 0..m {
                let t = qmul(&u[i], &ip);
                for k in 0..4 {
                    v[i][k] -= t[k];
                }
            }
        }
        let norm = v.iter().flat_map(|q| q.iter()).map(|x| x * x).sum::<f64>().sqrt();
        for q in &mut v {
            for x in q.iter_mut() {
                *x /= norm;
            }
        }
        cols.push(v);
    }
    let mut out = vec![[0.0; 4]; m * m];
    for (j, col) in cols.iter().enumerate() {
        for (i, q) in col.iter().enumerate() {
            out[i * m + j] = *q;
        }
    }
    out
}
