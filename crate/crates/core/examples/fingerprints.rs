//! Invariant polynomials, fingerprints and parameter equivalence.
//!
//!     cargo run --example fingerprints

use num_complex::Complex64;
use sphfn::{build_group, equivalent, fingerprint, reynolds_basis, GroupSpec, SpectralParam};

fn main() -> sphfn::Result<()> {
    let c4 = build_group(&GroupSpec::cyclic(4))?;
    for p in reynolds_basis(&c4, 4)? {
        let terms: Vec<String> = p.terms().iter().map(|(e, c)| format!("{:+.3}·x^{e:?}", c.re)).collect();
        println!("degree {}: {}", p.degree(), terms.join(" "));
    }

    let s = 0.5f64.sqrt();
    let a = SpectralParam::real(&[1.0, 0.0]);
    for b in [SpectralParam::real(&[0.0, 1.0]), SpectralParam::real(&[s, s]), SpectralParam::real(&[-1.0, 0.0])] {
        println!("C4: {:?} ~ {:?}: {}", a.re().as_slice(), b.re().as_slice(), equivalent(&c4, &a, &b, 1e-9)?);
    }

    // for SO(2) the only invariant is b(ξ,ξ), so the null vector (1, i) looks like 0
    let so2 = build_group(&GroupSpec::SpecialOrthogonal { n: 2 })?;
    let null = SpectralParam::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
    let fp = fingerprint(&so2, &null)?;
    println!("SO(2) fingerprint of (1, i): {:?} [{}]", fp.values, fp.basis_id);
    println!("(1, i) ~ 0: {}", equivalent(&so2, &null, &SpectralParam::zeros(2), 1e-9)?);
    Ok(())
}
