//! Spectral parameters, the complex bilinear form and quasicharacters.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Largest real part allowed in an exponent before evaluation refuses to continue.
pub const EXPONENT_GUARD: f64 = 700.0;

/// A parameter ξ ∈ Cⁿ of the spherical function φ_ξ^K.
///
/// In JSON each component is either a number or a `[re, im]` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralParam(pub DVector<Complex64>);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Component {
    Real(f64),
    Pair([f64; 2]),
}

/// Serde adapter for `Vec<Complex64>`: writes `[re, im]` pairs, reads numbers or pairs.
pub(crate) mod complex_list {
    use super::Component;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(values: &[Complex64], serializer: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<Component> = values.iter().map(|z| Component::Pair([z.re, z.im])).collect();
        parts.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<Component>::deserialize(deserializer)?
            .into_iter()
            .map(|c| match c {
                Component::Real(x) => Complex64::new(x, 0.0),
                Component::Pair([re, im]) => Complex64::new(re, im),
            })
            .collect())
    }
}

impl Serialize for SpectralParam {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        complex_list::serialize(self.0.as_slice(), serializer)
    }
}

impl<'de> Deserialize<'de> for SpectralParam {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(SpectralParam::new(complex_list::deserialize(deserializer)?))
    }
}

impl SpectralParam {
    pub fn new(components: Vec<Complex64>) -> Self {
        SpectralParam(DVector::from_vec(components))
    }

    pub fn real(components: &[f64]) -> Self {
        SpectralParam(DVector::from_iterator(components.len(), components.iter().map(|&x| Complex64::new(x, 0.0))))
    }

    /// Builds ξ = re + i·im.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        check_dim(re.len(), im.len())?;
        Ok(SpectralParam::new(re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()))
    }

    pub fn zeros(n: usize) -> Self {
        SpectralParam(DVector::from_element(n, Complex64::new(0.0, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn re(&self) -> DVector<f64> {
        self.0.map(|z| z.re)
    }

    pub fn im(&self) -> DVector<f64> {
        self.0.map(|z| z.im)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// k(ξ) for a real matrix k acting by complexification.
    pub fn transformed(&self, k: &nalgebra::DMatrix<f64>) -> SpectralParam {
        let re = k * self.re();
        let im = k * self.im();
        SpectralParam(DVector::from_iterator(re.len(), re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b))))
    }

    /// b(ξ, ξ).
    pub fn square(&self) -> Complex64 {
        self.0.iter().map(|z| z * z).sum()
    }

    /// Slice of coordinates `start..start+len`.
    pub fn block(&self, start: usize, len: usize) -> SpectralParam {
        SpectralParam(self.0.rows(start, len).into_owned())
    }
}

/// The C-bilinear extension of the Euclidean inner product, Σ uᵢvᵢ (no conjugation).
pub fn bilinear_b(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Result<Complex64> {
    check_dim(u.len(), v.len())?;
    Ok(u.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
}

/// b(x, ξ) for a real x.
pub(crate) fn b_real(x: &DVector<f64>, xi: &SpectralParam) -> Complex64 {
    x.iter().zip(xi.0.iter()).map(|(a, z)| z * *a).sum()
}

/// exp(i·z), refusing exponents whose real part would overflow.
pub(crate) fn guarded_exp_i(z: Complex64) -> Result<Complex64> {
    let exponent = -z.im;
    if exponent > EXPONENT_GUARD {
        return Err(Error::OverflowRisk { exponent });
    }
    Ok((Complex64::i() * z).exp())
}

/// The quasicharacter φ_ξ(x) = exp(i·b(x, ξ)).
pub fn quasicharacter(x: &DVector<f64>, xi: &SpectralParam) -> Result<Complex64> {
    check_dim(xi.dim(), x.len())?;
    guarded_exp_i(b_real(x, xi))
}
