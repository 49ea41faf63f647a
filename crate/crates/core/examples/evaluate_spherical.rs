//! Evaluate φ_ξ(x) with each available method.
//!
//!     cargo run --release --example evaluate_spherical

use nalgebra::DVector;
use num_complex::Complex64;
use sphfn::{build_group, eval_batch, eval_spherical, EvalConfig, GroupSpec, MethodPreference, SpectralParam};

fn main() -> sphfn::Result<()> {
    let cfg = EvalConfig::default();
    let x = DVector::from_column_slice(&[0.8, -0.3]);
    let xi = SpectralParam::new(vec![Complex64::new(1.0, 0.2), Complex64::new(-0.5, 0.0)]);

    for (name, spec) in [("C3", GroupSpec::cyclic(3)), ("D5", GroupSpec::dihedral(5)), ("SO(2)", GroupSpec::SpecialOrthogonal { n: 2 })] {
        let h = build_group(&spec)?;
        let r = eval_spherical(&h, &xi, &x, &cfg)?;
        println!("{name:<6} {:.12}  ({})", r.value, r.method.as_str());
    }

    // SO(3): Monte Carlo against the closed form
    let so3 = build_group(&GroupSpec::SpecialOrthogonal { n: 3 })?;
    let xi3 = SpectralParam::real(&[2.0, 0.0, 0.0]);
    let x3 = DVector::from_column_slice(&[0.0, 1.0, 0.5]);
    for method in [MethodPreference::MonteCarlo, MethodPreference::ClosedForm] {
        let r = eval_spherical(&so3, &xi3, &x3, &cfg.with_method(method))?;
        println!("SO(3) {:<16} {:.6} ± {:.1e}", r.method.as_str(), r.value.re, r.stderr);
    }

    // a batch along a ray is evaluated in parallel and independent of the thread count
    let ray: Vec<_> = (0..5).map(|i| DVector::from_column_slice(&[0.0, 0.5 * i as f64, 0.0])).collect();
    for (p, r) in ray.iter().zip(eval_batch(&so3, &xi3, &ray, &cfg.with_samples(20_000))?) {
        println!("  |x| = {:.1}: {:+.4} ± {:.4}", p.norm(), r.value.re, r.stderr);
    }
    Ok(())
}
