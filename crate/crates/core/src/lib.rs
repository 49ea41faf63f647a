//! Spherical functions on Euclidean space Eⁿ = G/K, G = Rⁿ·K, for compact K ⊆ O(n).
//!
//! * [`group`]: isotropy groups, closure, Haar sampling, orbit tests
//! * [`eval`]: φ_ξ^K by exact sums, circle quadrature or Monte Carlo
//! * [`bessel`]: closed forms for sphere-transitive K
//! * [`verify`]: functional equation, Laplacian eigenvalue, lattice compatibility
//! * [`invariants`]: invariant-polynomial fingerprints and parameter equivalence
//! * [`posdef`] and [`transform`]: Gram-matrix positive definiteness and the spherical transform
//! * [`cli`]: the `sphfn` command-line front end

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod cli;
pub mod error;
pub mod eval;
pub mod group;
pub mod invariants;
pub mod motion;
pub mod posdef;
pub mod quadrature;
pub mod spectral;
pub mod transform;
pub mod verify;

pub use bessel::{bessel_j, closed_form_spherical, normalization_constant, poisson_integral_form, ClosedFormQuery};
pub use error::{Error, Result};
pub use eval::{eval_batch, eval_points, eval_spherical, EvalConfig, EvalResult, Method, MethodPreference};
pub use group::{build_group, haar_samples, orbit_equal_real, realify, GroupElement, GroupHandle, GroupSpec};
pub use invariants::{equivalent, fingerprint, reynolds_basis, InvariantPolynomial, QuotientPoint};
pub use motion::{motion_compose, motion_inverse, MotionElement};
pub use posdef::{gram_matrix, posdef_verdict, GramReport, Verdict};
pub use spectral::{bilinear_b, quasicharacter, SpectralParam};
pub use transform::{spherical_transform, GridFunction, RadialProfile, TransformInput, TransformValue};
pub use verify::{eigen_check, induced_spherical, lattice_compatible, verify_functional_equation, FunctionalCheck};


