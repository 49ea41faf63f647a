//! Compact isotropy groups K ⊆ O(n).
//!
//! A [`GroupSpec`] names a group (a classical family, a torus, a finite group
//! given by generators, or a block-diagonal product of those). [`build_group`]
//! turns it into an immutable [`GroupHandle`]: finite groups are enumerated by
//! closure, continuous families get a Haar sampler, and every handle records
//! whether K acts transitively on the unit spheres of its ambient space.

mod closure;
mod haar;
mod orbit;
mod realify;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::InvariantBasis;

pub use closure::DEFAULT_ORDER_CAP;
pub use haar::{haar_samples, HaarSampler};
pub use orbit::orbit_equal_real;
pub use realify::{quaternion_left, quaternion_right, realify, realify_quaternion, Quaternion};

/// Tolerance on `MᵀM = I` for floating-point generators and sampled elements.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// How Sp(m) is extended by scalars acting on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymplecticExtension {
    #[default]
    None,
    /// Sp(m)·U(1)
    U1,
    /// Sp(m)·Sp(1)
    Sp1,
}

/// Description of a compact subgroup of O(n).
///
/// Serialized with an internal `kind` tag, e.g. `{"kind": "so", "n": 3}` or
/// `{"kind": "finite", "generators": [[[0,-1],[1,0]]], "dim": 2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    #[serde(rename = "o")]
    Orthogonal { n: usize },
    #[serde(rename = "so")]
    SpecialOrthogonal { n: usize },
    #[serde(rename = "u")]
    Unitary { m: usize },
    #[serde(rename = "su")]
    SpecialUnitary { m: usize },
    #[serde(rename = "sp")]
    Symplectic {
        m: usize,
        #[serde(default)]
        extension: SymplecticExtension,
    },
    /// `planes` independent rotations, one per coordinate plane of R^{2·planes}.
    Torus { planes: usize },
    /// Finite group generated by real orthogonal matrices (row-major rows).
    Finite {
        generators: Vec<Vec<Vec<f64>>>,
        dim: usize,
    },
    /// Block-diagonal product acting on the direct sum of the factor spaces.
    Block { factors: Vec<GroupSpec> },
    G2,
    Spin7,
    Spin9,
}

impl GroupSpec {
    /// Real dimension of the space the group acts on.
    pub fn ambient_dim(&self) -> usize {
        match self {
            GroupSpec::Orthogonal { n } | GroupSpec::SpecialOrthogonal { n } => *n,
            GroupSpec::Unitary { m } | GroupSpec::SpecialUnitary { m } => 2 * m,
            GroupSpec::Symplectic { m, .. } => 4 * m,
            GroupSpec::Torus { planes } => 2 * planes,
            GroupSpec::Finite { dim, .. } => *dim,
            GroupSpec::Block { factors } => factors.iter().map(GroupSpec::ambient_dim).sum(),
            GroupSpec::G2 => 7,
            GroupSpec::Spin7 => 8,
            GroupSpec::Spin9 => 16,
        }
    }

    /// Finite group generated by the given matrices.
    pub fn finite(generators: Vec<DMatrix<f64>>) -> Result<Self> {
        let dim = generators
            .first()
            .map(|g| g.nrows())
            .ok_or_else(|| Error::InvalidSpec("finite group needs at least one generator".into()))?;
        let generators = generators
            .iter()
            .map(|g| (0..g.nrows()).map(|i| g.row(i).iter().copied().collect()).collect())
            .collect();
        Ok(GroupSpec::Finite { generators, dim })
    }

    /// Cyclic group of rotations of the plane by multiples of 2π/order.
    pub fn cyclic(order: usize) -> Self {
        GroupSpec::Finite {
            generators: vec![matrix_rows(&rotation2(std::f64::consts::TAU / order as f64))],
            dim: 2,
        }
    }

    /// Dihedral group of order `2·sides` (symmetries of a regular polygon).
    pub fn dihedral(sides: usize) -> Self {
        let reflection = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        GroupSpec::Finite {
            generators: vec![
                matrix_rows(&rotation2(std::f64::consts::TAU / sides as f64)),
                matrix_rows(&reflection),
            ],
            dim: 2,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GroupSpec::Orthogonal { n } | GroupSpec::SpecialOrthogonal { n } if *n == 0 => {
                Err(Error::InvalidSpec("n must be positive".into()))
            }
            GroupSpec::Unitary { m } | GroupSpec::SpecialUnitary { m } | GroupSpec::Symplectic { m, .. }
                if *m == 0 =>
            {
                Err(Error::InvalidSpec("m must be positive".into()))
            }
            GroupSpec::Torus { planes: 0 } => Err(Error::InvalidSpec("torus needs at least one plane".into())),
            GroupSpec::Block { factors } if factors.is_empty() => {
                Err(Error::InvalidSpec("block product needs at least one factor".into()))
            }
            GroupSpec::Finite { generators, dim } => {
                if *dim == 0 || generators.is_empty() {
                    return Err(Error::InvalidSpec("finite group needs dim > 0 and generators".into()));
                }
                for (i, g) in generators.iter().enumerate() {
                    if g.len() != *dim || g.iter().any(|row| row.len() != *dim) {
                        return Err(Error::InvalidSpec(format!("generator {i} is not {dim}x{dim}")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Orthogonal { n } => write!(f, "O({n})"),
            GroupSpec::SpecialOrthogonal { n } => write!(f, "SO({n})"),
            GroupSpec::Unitary { m } => write!(f, "U({m})"),
            GroupSpec::SpecialUnitary { m } => write!(f, "SU({m})"),
            GroupSpec::Symplectic { m, extension } => match extension {
                SymplecticExtension::None => write!(f, "Sp({m})"),
                SymplecticExtension::U1 => write!(f, "Sp({m})·U(1)"),
                SymplecticExtension::Sp1 => write!(f, "Sp({m})·Sp(1)"),
            },
            GroupSpec::Torus { planes } => write!(f, "T^{planes}"),
            GroupSpec::Finite { generators, dim } => {
                write!(f, "finite<{} generators in O({dim})>", generators.len())
            }
            GroupSpec::Block { factors } => {
                let parts: Vec<String> = factors.iter().map(|s| s.to_string()).collect();
                write!(f, "{}", parts.join(" x "))
            }
            GroupSpec::G2 => write!(f, "G2"),
            GroupSpec::Spin7 => write!(f, "Spin(7)"),
            GroupSpec::Spin9 => write!(f, "Spin(9)"),
        }
    }
}

/// An element of K, stored as its real orthogonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(DMatrix<f64>);

impl GroupElement {
    /// Wraps a matrix after checking `MᵀM = I` within [`ORTHOGONALITY_TOL`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument("group element must be square".into()));
        }
        let deviation = orthogonality_defect(&matrix);
        if deviation > ORTHOGONALITY_TOL {
            return Err(Error::NonOrthogonalGenerator { index: 0, deviation });
        }
        Ok(GroupElement(matrix))
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        GroupElement(matrix)
    }

    pub fn identity(n: usize) -> Self {
        GroupElement(DMatrix::identity(n, n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement(&self.0 * &other.0)
    }

    /// The inverse, which is the transpose.
    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.transpose())
    }

    pub fn act(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.0 * v
    }
}

/// Which Haar sampler a handle uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerId {
    /// Uniform draws from the enumerated element list.
    FiniteUniform,
    Orthogonal { n: usize },
    SpecialOrthogonal { n: usize },
    Unitary { m: usize },
    SpecialUnitary { m: usize },
    Symplectic { m: usize, extension: SymplecticExtension },
    /// Independent draws per block factor.
    Product,
    /// G₂, Spin(7), Spin(9): flagged transitive but not sampled.
    Unsupported,
}

/// An immutable, thread-safe group handle produced by [`build_group`].
pub struct GroupHandle {
    spec: GroupSpec,
    dim: usize,
    elements: Option<Vec<GroupElement>>,
    factors: Vec<GroupHandle>,
    sampler_id: SamplerId,
    is_sphere_transitive: bool,
    pub(crate) basis_cache: Mutex<HashMap<usize, Arc<InvariantBasis>>>,
}

impl fmt::Debug for GroupHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupHandle")
            .field("spec", &self.spec.to_string())
            .field("dim", &self.dim)
            .field("order", &self.order())
            .field("sampler_id", &self.sampler_id)
            .field("is_sphere_transitive", &self.is_sphere_transitive)
            .finish()
    }
}

impl GroupHandle {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// The enumerated element list, present exactly when K is finite.
    pub fn elements(&self) -> Option<&[GroupElement]> {
        self.elements.as_deref()
    }

    pub fn order(&self) -> Option<usize> {
        self.elements.as_ref().map(Vec::len)
    }

    pub fn is_finite(&self) -> bool {
        self.elements.is_some()
    }

    /// Block factors; empty unless the spec is a block product or a torus.
    pub fn factors(&self) -> &[GroupHandle] {
        &self.factors
    }

    pub fn sampler_id(&self) -> SamplerId {
        self.sampler_id
    }

    pub fn is_sphere_transitive(&self) -> bool {
        self.is_sphere_transitive
    }

    pub fn has_sampler(&self) -> bool {
        match self.sampler_id {
            SamplerId::Unsupported => false,
            SamplerId::Product => self.factors.iter().all(GroupHandle::has_sampler),
            _ => true,
        }
    }

    /// SO(2) or O(2) acting on the plane; evaluated by trapezoidal quadrature.
    pub(crate) fn circle(&self) -> Option<bool> {
        if self.elements.is_some() {
            return None;
        }
        match self.spec {
            GroupSpec::SpecialOrthogonal { n: 2 } | GroupSpec::Unitary { m: 1 } => Some(false),
            GroupSpec::Orthogonal { n: 2 } => Some(true),
            GroupSpec::Torus { planes: 1 } => Some(false),
            _ => None,
        }
    }
}

/// Builds a handle with the default group-order cap.
pub fn build_group(spec: &GroupSpec) -> Result<GroupHandle> {
    build_group_with_cap(spec, DEFAULT_ORDER_CAP)
}

/// Builds a handle, failing with [`Error::GroupTooLarge`] if a finite closure exceeds `cap`.
pub fn build_group_with_cap(spec: &GroupSpec, cap: usize) -> Result<GroupHandle> {
    spec.validate()?;
    let dim = spec.ambient_dim();
    let mut factors = Vec::new();
    let mut elements = None;
    let sampler_id = match spec {
        GroupSpec::Finite { generators, dim } => {
            let gens: Vec<DMatrix<f64>> = generators
                .iter()
                .map(|rows| DMatrix::from_fn(*dim, *dim, |i, j| rows[i][j]))
                .collect();
            elements = Some(closure::enumerate(&gens, cap)?);
            SamplerId::FiniteUniform
        }
        // O(1), SO(1) and SU(1) are finite.
        GroupSpec::Orthogonal { n: 1 } => {
            elements = Some(vec![GroupElement::identity(1), GroupElement(DMatrix::from_element(1, 1, -1.0))]);
            SamplerId::FiniteUniform
        }
        GroupSpec::SpecialOrthogonal { n: 1 } => {
            elements = Some(vec![GroupElement::identity(1)]);
            SamplerId::FiniteUniform
        }
        GroupSpec::SpecialUnitary { m: 1 } => {
            elements = Some(vec![GroupElement::identity(2)]);
            SamplerId::FiniteUniform
        }
        GroupSpec::Orthogonal { n } => SamplerId::Orthogonal { n: *n },
        GroupSpec::SpecialOrthogonal { n } => SamplerId::SpecialOrthogonal { n: *n },
        GroupSpec::Unitary { m } => SamplerId::Unitary { m: *m },
        GroupSpec::SpecialUnitary { m } => SamplerId::SpecialUnitary { m: *m },
        GroupSpec::Symplectic { m, extension } => SamplerId::Symplectic { m: *m, extension: *extension },
        GroupSpec::Torus { planes } if *planes == 1 => SamplerId::SpecialOrthogonal { n: 2 },
        GroupSpec::Torus { planes } => {
            for _ in 0..*planes {
                factors.push(build_group_with_cap(&GroupSpec::SpecialOrthogonal { n: 2 }, cap)?);
            }
            SamplerId::Product
        }
        GroupSpec::Block { factors: specs } => {
            for s in specs {
                factors.push(build_group_with_cap(s, cap)?);
            }
            if factors.iter().all(GroupHandle::is_finite) {
                elements = Some(closure::block_product(&factors, cap)?);
            }
            SamplerId::Product
        }
        GroupSpec::G2 | GroupSpec::Spin7 | GroupSpec::Spin9 => SamplerId::Unsupported,
    };
    let is_sphere_transitive = sphere_transitive(spec, &factors);
    Ok(GroupHandle {
        spec: spec.clone(),
        dim,
        elements,
        factors,
        sampler_id,
        is_sphere_transitive,
        basis_cache: Mutex::new(HashMap::new()),
    })
}

/// Membership in the list of groups transitive on spheres about the origin.
fn sphere_transitive(spec: &GroupSpec, factors: &[GroupHandle]) -> bool {
    match spec {
        GroupSpec::Orthogonal { n } | GroupSpec::SpecialOrthogonal { n } => *n > 1,
        GroupSpec::Unitary { .. } => true,
        GroupSpec::SpecialUnitary { m } => *m > 1,
        GroupSpec::Symplectic { .. } => true,
        GroupSpec::Torus { planes } => *planes == 1,
        GroupSpec::Block { .. } => factors.len() == 1 && factors[0].is_sphere_transitive,
        GroupSpec::Finite { .. } => false,
        GroupSpec::G2 | GroupSpec::Spin7 | GroupSpec::Spin9 => true,
    }
}

/// Max entry of |MᵀM - I|.
pub fn orthogonality_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.ncols();
    (m.transpose() * m - DMatrix::<f64>::identity(n, n)).amax()
}

/// Counter-clockwise rotation of the plane by `theta`.
pub fn rotation2(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    // exact entries for quarter turns keep integer closure available
    let snap = |v: f64| {
        let r = v.round();
        if (v - r).abs() < 1e-15 {
            r
        } else {
            v
        }
    };
    DMatrix::from_row_slice(2, 2, &[snap(c), -snap(s), snap(s), snap(c)])
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Block-diagonal matrix from square blocks.
pub(crate) fn block_diag(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

/// Start offsets and sizes of the factor blocks.
pub(crate) fn block_ranges(factors: &[GroupHandle]) -> Vec<(usize, usize)> {
    let mut offset = 0;
    factors
        .iter()
        .map(|f| {
            let r = (offset, f.ambient_dim());
            offset += f.ambient_dim();
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot90() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
    }

    #[test]
    fn cyclic_four() {
        let h = build_group(&GroupSpec::finite(vec![rot90()]).unwrap()).unwrap();
        assert_eq!(h.order(), Some(4));
        assert!(!h.is_sphere_transitive());
    }

    #[test]
    fn dihedral_square() {
        let refl = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let h = build_group(&GroupSpec::finite(vec![rot90(), refl]).unwrap()).unwrap();
        assert_eq!(h.order(), Some(8));
        assert_eq!(build_group(&GroupSpec::dihedral(4)).unwrap().order(), Some(8));
        assert_eq!(build_group(&GroupSpec::dihedral(5)).unwrap().order(), Some(10));
        assert_eq!(build_group(&GroupSpec::cyclic(6)).unwrap().order(), Some(6));
    }

    #[test]
    fn so3_is_transitive_with_sampler() {
        let h = build_group(&GroupSpec::SpecialOrthogonal { n: 3 }).unwrap();
        assert!(h.is_sphere_transitive());
        assert!(h.has_sampler());
        assert!(h.elements().is_none());
    }

    #[test]
    fn transitive_list() {
        let yes = [
            GroupSpec::Orthogonal { n: 5 },
            GroupSpec::Unitary { m: 1 },
            GroupSpec::SpecialUnitary { m: 3 },
            GroupSpec::Symplectic { m: 2, extension: SymplecticExtension::Sp1 },
            GroupSpec::Torus { planes: 1 },
            GroupSpec::G2,
            GroupSpec::Spin7,
            GroupSpec::Spin9,
        ];
        for s in &yes {
            assert!(build_group(s).unwrap().is_sphere_transitive(), "{s}");
        }
        let no = [
            GroupSpec::SpecialUnitary { m: 1 },
            GroupSpec::Torus { planes: 2 },
            GroupSpec::cyclic(4),
            GroupSpec::Block { factors: vec![GroupSpec::SpecialOrthogonal { n: 2 }, GroupSpec::SpecialOrthogonal { n: 3 }] },
        ];
        for s in &no {
            assert!(!build_group(s).unwrap().is_sphere_transitive(), "{s}");
        }
    }

    #[test]
    fn exceptional_groups_have_no_sampler() {
        for (s, n) in [(GroupSpec::G2, 7), (GroupSpec::Spin7, 8), (GroupSpec::Spin9, 16)] {
            let h = build_group(&s).unwrap();
            assert_eq!(h.ambient_dim(), n);
            assert!(!h.has_sampler());
            assert!(matches!(haar_samples(&h, 0, 1), Err(Error::UnsupportedSampler { .. })));
        }
    }

    #[test]
    fn non_orthogonal_generator_rejected() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        let err = build_group(&GroupSpec::finite(vec![bad]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonOrthogonalGenerator { index: 0, .. }));
    }

    #[test]
    fn irrational_rotation_hits_cap() {
        let spec = GroupSpec::finite(vec![rotation2(1.0)]).unwrap();
        assert_eq!(build_group_with_cap(&spec, 500).unwrap_err(), Error::GroupTooLarge { cap: 500 });
    }

    #[test]
    fn block_dims_add_up() {
        let spec = GroupSpec::Block {
            factors: vec![GroupSpec::cyclic(4), GroupSpec::SpecialOrthogonal { n: 3 }],
        };
        assert_eq!(spec.ambient_dim(), 5);
        let h = build_group(&spec).unwrap();
        assert_eq!(h.factors().len(), 2);
        assert!(!h.is_finite());

        let finite = GroupSpec::Block { factors: vec![GroupSpec::cyclic(4), GroupSpec::cyclic(2)] };
        assert_eq!(build_group(&finite).unwrap().order(), Some(8));
    }

    #[test]
    fn spec_json_forms() {
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"finite","generators":[[[0,-1],[1,0]]],"dim":2}"#).unwrap();
        assert_eq!(build_group(&s).unwrap().order(), Some(4));
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"sp","m":1,"extension":"u1"}"#).unwrap();
        assert_eq!(s, GroupSpec::Symplectic { m: 1, extension: SymplecticExtension::U1 });
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"block","factors":[{"kind":"so","n":2},{"kind":"g2"}]}"#).unwrap();
        assert_eq!(s.ambient_dim(), 9);
        let back: GroupSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn invalid_specs() {
        assert!(build_group(&GroupSpec::SpecialOrthogonal { n: 0 }).is_err());
        assert!(build_group(&GroupSpec::Block { factors: vec![] }).is_err());
        let ragged = GroupSpec::Finite { generators: vec![vec![vec![1.0, 0.0], vec![0.0]]], dim: 2 };
        assert!(matches!(build_group(&ragged), Err(Error::InvalidSpec(_))));
    }
}
