//! Real forms of complex and quaternionic matrices.
//!
//! C^m is identified with R^{2m} by z_j = x_j + i y_j ↦ (x_j, y_j), so each
//! complex entry becomes a 2×2 block. H^m is identified with R^{4m} by
//! q = a + bi + cj + dk ↦ (a, b, c, d); quaternionic matrices act on the left
//! of column vectors and scalars act on the right.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const UNITARY_TOL: f64 = 1e-12;

/// Embeds an m×m unitary matrix into O(2m).
pub fn realify(a: &DMatrix<Complex64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("realify expects a square matrix".into()));
    }
    let m = a.nrows();
    let defect = (a.adjoint() * a - DMatrix::<Complex64>::identity(m, m))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > UNITARY_TOL {
        return Err(Error::NonUnitaryInput { deviation: defect });
    }
    Ok(realify_unchecked(a))
}

pub(crate) fn realify_unchecked(a: &DMatrix<Complex64>) -> DMatrix<f64> {
    let m = a.nrows();
    let mut out = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            let z = a[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Quaternion a + bi + cj + dk as `[a, b, c, d]`.
pub type Quaternion = [f64; 4];

pub(crate) fn qmul(p: &Quaternion, q: &Quaternion) -> Quaternion {
    [
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

pub(crate) fn qconj(q: &Quaternion) -> Quaternion {
    [q[0], -q[1], -q[2], -q[3]]
}

/// Matrix of p ↦ q·p on R^4.
pub fn quaternion_left(q: &Quaternion) -> DMatrix<f64> {
    let [a, b, c, d] = *q;
    DMatrix::from_row_slice(4, 4, &[a, -b, -c, -d, b, a, -d, c, c, d, a, -b, d, -c, b, a])
}

/// Matrix of p ↦ p·q on R^4.
pub fn quaternion_right(q: &Quaternion) -> DMatrix<f64> {
    let [a, b, c, d] = *q;
    DMatrix::from_row_slice(4, 4, &[a, -b, -c, -d, b, a, d, -c, c, -d, a, b, d, c, -b, a])
}

/// Real 4m×4m matrix of a quaternionic m×m matrix acting on the left of H^m.
/// `entries` is row-major.
pub fn realify_quaternion(entries: &[Quaternion], m: usize) -> DMatrix<f64> {
    assert_eq!(entries.len(), m * m);
    let mut out = DMatrix::zeros(4 * m, 4 * m);
    for i in 0..m {
        for j in 0..m {
            out.view_mut((4 * i, 4 * j), (4, 4)).copy_from(&quaternion_left(&entries[i * m + j]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::orthogonality_defect;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_i() {
        let one = DMatrix::from_element(1, 1, c(1.0, 0.0));
        assert_eq!(realify(&one).unwrap(), DMatrix::<f64>::identity(2, 2));
        let i = DMatrix::from_element(1, 1, c(0.0, 1.0));
        assert_eq!(realify(&i).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn rejects_non_unitary() {
        let a = DMatrix::from_element(1, 1, c(2.0, 0.0));
        assert!(matches!(realify(&a), Err(Error::NonUnitaryInput { .. })));
    }

    #[test]
    fn left_and_right_commute() {
        let p = [0.5, 0.5, 0.5, 0.5];
        let q = [0.0, 0.6, 0.0, 0.8];
        let l = quaternion_left(&p);
        let r = quaternion_right(&q);
        assert!((&l * &r - &r * &l).amax() < 1e-15);
        let x = [1.0, 2.0, -1.0, 0.5];
        let lx = &l * nalgebra::DVector::from_column_slice(&x);
        let expect = qmul(&p, &x);
        for k in 0..4 {
            assert!((lx[k] - expect[k]).abs() < 1e-15);
        }
        let rx = &r * nalgebra::DVector::from_column_slice(&x);
        let expect = qmul(&x, &q);
        for k in 0..4 {
            assert!((rx[k] - expect[k]).abs() < 1e-15);
        }
        assert!(orthogonality_defect(&l) < 1e-15);
    }

    fn unitary_from(angles: &[f64]) -> DMatrix<Complex64> {
        // product of a phase matrix and a complex Givens rotation
        let (t, p1, p2, phi) = (angles[0], angles[1], angles[2], angles[3]);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::from_polar(1.0, p1), Complex64::from_polar(1.0, p2)]));
        let g = DMatrix::from_row_slice(
            2,
            2,
            &[c(t.cos(), 0.0), -Complex64::from_polar(t.sin(), -phi), Complex64::from_polar(t.sin(), phi), c(t.cos(), 0.0)],
        );
        d * g
    }

    proptest! {
        #[test]
        fn realify_is_a_homomorphism(a in proptest::collection::vec(-3.0f64..3.0, 4), b in proptest::collection::vec(-3.0f64..3.0, 4)) {
            let ua = unitary_from(&a);
            let ub = unitary_from(&b);
            let lhs = realify(&(&ua * &ub)).unwrap();
            let rhs = realify(&ua).unwrap() * realify(&ub).unwrap();
            prop_assert!((lhs - rhs).amax() < 1e-12);
        }
    }
}
