//! Gram-matrix test of positive definiteness, with a witness when it fails.
//!
//!     cargo run --release --example positive_definite

use num_complex::Complex64;
use sphfn::posdef::quadratic_form;
use sphfn::{build_group, posdef_verdict, EvalConfig, GroupSpec, SpectralParam};

fn main() -> sphfn::Result<()> {
    let cfg = EvalConfig::default();
    let so2 = build_group(&GroupSpec::SpecialOrthogonal { n: 2 })?;
    let cases = [
        ("real (1.5, -0.5)", SpectralParam::real(&[1.5, -0.5])),
        ("(i, 0)", SpectralParam::new(vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)])),
        ("(2, 0.6i)", SpectralParam::new(vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.6)])),
    ];
    for (name, xi) in cases {
        let r = posdef_verdict(&so2, &xi, &cfg)?;
        println!("SO(2) {name:<18} {:?}, min eigenvalue {:+.3e}", r.verdict, r.min_eigenvalue);
        if let Some(w) = &r.witness {
            println!("    witness gives Σ φ(g_j⁻¹g_i) c̄_j c_i = {:+.4}", quadratic_form(&r.matrix, w));
        }
    }

    let so3 = build_group(&GroupSpec::SpecialOrthogonal { n: 3 })?;
    let r = posdef_verdict(&so3, &SpectralParam::real(&[1.0, 1.0, 0.0]), &cfg.with_samples(20_000))?;
    println!("SO(3) real ξ (Monte Carlo): {:?}, min eigenvalue {:+.2e} ± {:.1e}", r.verdict, r.min_eigenvalue, r.propagated_stderr);
    Ok(())
}
