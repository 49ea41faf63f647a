//! Build isotropy groups and draw Haar samples from them.
//!
//!     cargo run --example groups_and_haar

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use sphfn::{build_group, haar_samples, orbit_equal_real, realify, GroupSpec};

fn main() -> sphfn::Result<()> {
    // finite groups are closed under multiplication from their generators
    let d4 = build_group(&GroupSpec::dihedral(4))?;
    println!("D4 has {} elements", d4.order().unwrap());

    let u2 = build_group(&GroupSpec::Unitary { m: 2 })?;
    println!("U(2) acts on R^{}; sphere-transitive: {}", u2.ambient_dim(), u2.is_sphere_transitive());

    // a unitary matrix becomes a real orthogonal one twice its size
    let i = Complex64::new(0.0, 1.0);
    let a = DMatrix::from_row_slice(2, 2, &[i, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), -i]);
    println!("realified diag(i, -i):{}", realify(&a)?);

    // Haar samples of SO(3) spread a unit vector evenly over the sphere
    let so3 = build_group(&GroupSpec::SpecialOrthogonal { n: 3 })?;
    let e3 = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
    let ks = haar_samples(&so3, 1, 20_000)?;
    let mean_z2 = ks.iter().map(|k| k.act(&e3)[2].powi(2)).sum::<f64>() / ks.len() as f64;
    println!("E[z^2] over SO(3)·e3 = {mean_z2:.4} (uniform sphere: 1/3)");

    let c4 = build_group(&GroupSpec::cyclic(4))?;
    let (p, q) = (DVector::from_column_slice(&[1.0, 2.0]), DVector::from_column_slice(&[-2.0, 1.0]));
    println!("(1,2) and (-2,1) in one C4 orbit: {}", orbit_equal_real(&c4, &p, &q, 1e-9)?);
    Ok(())
}
