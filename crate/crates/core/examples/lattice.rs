//! Which parameters give functions periodic under a lattice.
//!
//!     cargo run --example lattice

use std::f64::consts::PI;

use nalgebra::DVector;
use sphfn::{lattice_compatible, SpectralParam};

fn main() -> sphfn::Result<()> {
    let square = [DVector::from_column_slice(&[1.0, 0.0]), DVector::from_column_slice(&[0.0, 1.0])];
    let hex = [DVector::from_column_slice(&[1.0, 0.0]), DVector::from_column_slice(&[0.5, 3f64.sqrt() / 2.0])];
    let cases = [
        ("2π e₁", SpectralParam::real(&[2.0 * PI, 0.0])),
        ("e₁", SpectralParam::real(&[1.0, 0.0])),
        ("2π (1, -1)", SpectralParam::real(&[2.0 * PI, -2.0 * PI])),
        ("2π (1, -1/√3)", SpectralParam::real(&[2.0 * PI, -2.0 * PI / 3f64.sqrt()])),
    ];
    println!("{:<16} {:>6} {:>6}", "ξ", "Z²", "hex");
    for (name, xi) in cases {
        println!("{name:<16} {:>6} {:>6}", lattice_compatible(&xi, &square, 1e-12)?, lattice_compatible(&xi, &hex, 1e-12)?);
    }
    Ok(())
}
