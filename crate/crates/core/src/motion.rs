//! Elements of the motion group G = Rⁿ·K.

use nalgebra::DVector;

use crate::error::{check_dim, Result};
use crate::group::GroupElement;

/// g = (x, k) acting on Rⁿ by y ↦ k·y + x.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionElement {
    pub translation: DVector<f64>,
    pub rotation: GroupElement,
}

impl MotionElement {
    pub fn new(translation: DVector<f64>, rotation: GroupElement) -> Result<Self> {
        check_dim(rotation.dim(), translation.len())?;
        Ok(MotionElement { translation, rotation })
    }

    pub fn identity(n: usize) -> Self {
        MotionElement { translation: DVector::zeros(n), rotation: GroupElement::identity(n) }
    }

    pub fn translation(x: DVector<f64>) -> Self {
        let n = x.len();
        MotionElement { translation: x, rotation: GroupElement::identity(n) }
    }

    pub fn rotation(k: GroupElement) -> Self {
        MotionElement { translation: DVector::zeros(k.dim()), rotation: k }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        self.rotation.act(y) + &self.translation
    }
}

/// (x₁, k₁)(x₂, k₂) = (x₁ + k₁x₂, k₁k₂).
pub fn motion_compose(g1: &MotionElement, g2: &MotionElement) -> Result<MotionElement> {
    check_dim(g1.dim(), g2.dim())?;
    Ok(MotionElement {
        translation: &g1.translation + g1.rotation.act(&g2.translation),
        rotation: g1.rotation.compose(&g2.rotation),
    })
}

/// (x, k)⁻¹ = (−k⁻¹x, k⁻¹).
pub fn motion_inverse(g: &MotionElement) -> MotionElement {
    let inv = g.rotation.inverse();
    MotionElement { translation: -inv.act(&g.translation), rotation: inv }
}
