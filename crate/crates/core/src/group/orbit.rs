use nalgebra::DVector;

use super::{block_ranges, GroupHandle};
use crate::error::{check_dim, Error, Result};

/// Decides whether `xi2` lies in the K-orbit of `xi` (real vectors).
///
/// Exact for finite K (membership in the enumerated orbit), sphere-transitive
/// K (equal norms), tori (equal norms per plane) and block products of those.
pub fn orbit_equal_real(handle: &GroupHandle, xi: &DVector<f64>, xi2: &DVector<f64>, tol: f64) -> Result<bool> {
    check_dim(handle.ambient_dim(), xi.len())?;
    check_dim(handle.ambient_dim(), xi2.len())?;
    if !handle.factors().is_empty() {
        for (f, (start, len)) in handle.factors().iter().zip(block_ranges(handle.factors())) {
            let a = xi.rows(start, len).into_owned();
            let b = xi2.rows(start, len).into_owned();
            if !orbit_equal_real(f, &a, &b, tol)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if let Some(elems) = handle.elements() {
        return Ok(elems.iter().any(|k| (k.act(xi) - xi2).amax() <= tol));
    }
    if handle.is_sphere_transitive() {
        return Ok((xi.norm() - xi2.norm()).abs() <= tol);
    }
    Err(Error::OrbitTestUnsupported { group: handle.spec().to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn cyclic_orbits() {
        let h = build_group(&GroupSpec::cyclic(4)).unwrap();
        assert!(orbit_equal_real(&h, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 1e-12).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(!orbit_equal_real(&h, &v(&[1.0, 0.0]), &v(&[s, s]), 1e-12).unwrap());
    }

    #[test]
    fn transitive_orbits_are_spheres() {
        let h = build_group(&GroupSpec::SpecialOrthogonal { n: 3 }).unwrap();
        assert!(orbit_equal_real(&h, &v(&[1.0, 2.0, 2.0]), &v(&[3.0, 0.0, 0.0]), 1e-12).unwrap());
        assert!(!orbit_equal_real(&h, &v(&[1.0, 2.0, 2.0]), &v(&[3.1, 0.0, 0.0]), 1e-12).unwrap());
    }

    #[test]
    fn torus_compares_planes() {
        let h = build_group(&GroupSpec::Torus { planes: 2 }).unwrap();
        assert!(orbit_equal_real(&h, &v(&[3.0, 4.0, 1.0, 0.0]), &v(&[0.0, 5.0, 0.0, -1.0]), 1e-12).unwrap());
        assert!(!orbit_equal_real(&h, &v(&[3.0, 4.0, 1.0, 0.0]), &v(&[0.0, 1.0, 0.0, -5.0]), 1e-12).unwrap());
    }

    #[test]
    fn unsupported_and_mismatch() {
        let h = build_group(&GroupSpec::Block { factors: vec![GroupSpec::Torus { planes: 1 }] }).unwrap();
        assert!(orbit_equal_real(&h, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 1e-12).unwrap());
        let h = build_group(&GroupSpec::SpecialOrthogonal { n: 3 }).unwrap();
        assert!(matches!(
            orbit_equal_real(&h, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn orbit_relation_is_an_equivalence(pts in proptest::collection::vec((-2i32..3, -2i32..3), 3)) {
            let h = build_group(&GroupSpec::dihedral(4)).unwrap();
            let vs: Vec<DVector<f64>> = pts.iter().map(|&(a, b)| v(&[a as f64, b as f64])).collect();
            let rel = |a: &DVector<f64>, b: &DVector<f64>| orbit_equal_real(&h, a, b, 1e-12).unwrap();
            for a in &vs {
                prop_assert!(rel(a, a));
                for b in &vs {
                    prop_assert_eq!(rel(a, b), rel(b, a));
                    for c in &vs {
                        if rel(a, b) && rel(b, c) {
                            prop_assert!(rel(a, c));
                        }
                    }
                }
            }
        }
    }
}
