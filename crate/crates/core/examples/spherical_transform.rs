//! Spherical transform of radial profiles and of functions on a grid.
//!
//!     cargo run --release --example spherical_transform

use num_complex::Complex64;
use sphfn::{build_group, spherical_transform, EvalConfig, GridFunction, GroupSpec, RadialProfile, SpectralParam, TransformInput};

fn main() -> sphfn::Result<()> {
    let cfg = EvalConfig::default();
    let so2 = build_group(&GroupSpec::SpecialOrthogonal { n: 2 })?;
    let xis: Vec<_> = (0..4).map(|l| SpectralParam::real(&[l as f64, 0.0])).collect();

    // the Gaussian e^{-r²} transforms to π e^{-λ²/4}
    let gauss = TransformInput::Radial(RadialProfile::from_fn(6.0, 2001, |r| Complex64::new((-r * r).exp(), 0.0))?);
    for (xi, v) in xis.iter().zip(spherical_transform(&gauss, &so2, &xis, &cfg)?) {
        let l = xi.re()[0];
        println!("λ = {l}: {:.10} (exact {:.10}, est. error {:.1e})", v.value.re, std::f64::consts::PI * (-l * l / 4.0).exp(), v.error_estimate);
    }

    // a non-radial function sampled on a square, transformed against C4
    let c4 = build_group(&GroupSpec::cyclic(4))?;
    let f = GridFunction::from_fn(2, 5.0, 201, |x| Complex64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp() * (1.0 + x[0]), 0.0))?;
    let cfg = EvalConfig { transform_tol: 1e-4, ..cfg };
    let v = spherical_transform(&TransformInput::Grid(f), &c4, &xis[1..2], &cfg)?;
    println!("grid function against C4 at ξ = (1, 0): {:.6} (est. error {:.1e})", v[0].value, v[0].error_estimate);
    Ok(())
}
