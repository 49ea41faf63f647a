//! Check φ(g₁)φ(g₂) = ∫_K φ(g₁kg₂) dk and Δφ = b(ξ,ξ)φ.
//!
//!     cargo run --release --example functional_equation

use std::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use num_complex::Complex64;
use sphfn::group::rotation2;
use sphfn::verify::DEFAULT_STEP;
use sphfn::{build_group, eigen_check, verify_functional_equation, EvalConfig, GroupElement, GroupSpec, MethodPreference, MotionElement, SpectralParam};

fn main() -> sphfn::Result<()> {
    let cfg = EvalConfig::default();
    let xi = SpectralParam::new(vec![Complex64::new(1.2, 0.3), Complex64::new(-0.4, 0.8)]);
    let g2 = MotionElement::translation(DVector::from_column_slice(&[-0.2, 1.5]));

    // the rotation part of g₁ has to lie in K: a quarter turn is in all three groups
    let quarter = GroupElement::new(rotation2(FRAC_PI_2))?;
    let g1 = MotionElement::new(DVector::from_column_slice(&[0.7, -1.1]), quarter)?;
    for (name, spec) in [("C4", GroupSpec::cyclic(4)), ("D4", GroupSpec::dihedral(4)), ("SO(2)", GroupSpec::SpecialOrthogonal { n: 2 })] {
        let h = build_group(&spec)?;
        let c = verify_functional_equation(&h, &xi, &g1, &g2, &cfg)?;
        println!("{name:<26} residual {:.1e} ({})", c.residual, c.method.as_str());
    }

    let so3 = build_group(&GroupSpec::SpecialOrthogonal { n: 3 })?;
    let xi3 = SpectralParam::real(&[1.0, 0.5, 0.0]);
    let m = |x: [f64; 3]| MotionElement::translation(DVector::from_column_slice(&x));
    let c = verify_functional_equation(&so3, &xi3, &m([0.3, 0.0, 0.2]), &m([0.0, 0.9, 0.0]), &cfg.with_method(MethodPreference::MonteCarlo))?;
    println!("SO(3) Monte Carlo          residual {:.1e}, stderr {:.1e}", c.residual, c.stderr);

    let so2 = build_group(&GroupSpec::SpecialOrthogonal { n: 2 })?;
    let x = DVector::from_column_slice(&[0.3, 0.7]);
    let est = eigen_check(&so2, &xi, &x, DEFAULT_STEP, &cfg)?;
    println!("\nLaplacian eigenvalue: finite differences {est:.8}, b(ξ,ξ) = {:.8}", xi.square());
    Ok(())
}
