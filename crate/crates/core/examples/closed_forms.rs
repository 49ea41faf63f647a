//! Closed forms for sphere-transitive groups: the Bessel expression and
//! the Poisson integral it comes from.
//!
//!     cargo run --example closed_forms

use num_complex::Complex64;
use sphfn::{closed_form_spherical, normalization_constant, poisson_integral_form, ClosedFormQuery};

fn main() -> sphfn::Result<()> {
    println!(" n   c(n)");
    for n in 2..=8 {
        println!("{n:>2}   {:.10}", normalization_constant(n));
    }

    println!("\n n   λ        r    closed form                 Poisson integral");
    for (n, lambda, r) in [(2, Complex64::new(2.0, 0.0), 1.0), (3, Complex64::new(1.5, 0.0), 2.0), (4, Complex64::new(1.0, 1.0), 1.5), (7, Complex64::new(0.0, 1.0), 2.0)] {
        let cf = closed_form_spherical(&ClosedFormQuery::new(n, lambda, r))?;
        let pi = poisson_integral_form(n, lambda, r, 64)?;
        println!("{n:>2}   {lambda:<8} {r:<4} {cf:<27.12} {pi:.12}");
    }
    println!("\nsin(3)/3 = {:.12}", 3f64.sin() / 3.0);
    Ok(())
}
