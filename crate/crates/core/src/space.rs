use crate::error::Result;
use crate::sphere::{SpectralField, Sphere};
use crate::symmetry::{self, InvariantBasis, Projector, RotationGroup};

/// Shared analysis context: transforms, the tetrahedral projector, the
/// zero-mean invariant basis and `Y*`, all at one `l_max`.
///
/// Building the projector dominates the cost; build once and share.
#[derive(Debug, Clone)]
pub struct TetraSpace {
    sphere: Sphere,
    group: RotationGroup,
    projector: Projector,
    basis: InvariantBasis,
    y_star: SpectralField,
}

impl TetraSpace {
    pub fn new(l_max: usize) -> Result<Self> {
        Self::from_sphere(Sphere::new(l_max)?)
    }

    pub fn from_sphere(sphere: Sphere) -> Result<Self> {
        let y_star = symmetry::y_star(sphere.l_max())?;
        let group = RotationGroup::tetrahedral();
        let projector = Projector::new(&sphere, &group)?;
        let basis = InvariantBasis::new(&projector, true)?;
        Ok(Self { sphere, group, projector, basis, y_star })
    }

    pub fn l_max(&self) -> usize {
        self.sphere.l_max()
    }

    pub fn sphere(&self) -> &Sphere {
        &self.sphere
    }

    pub fn group(&self) -> &RotationGroup {
        &self.group
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    /// Zero-mean orthonormal basis of `X_T`.
    pub fn basis(&self) -> &InvariantBasis {
        &self.basis
    }

    pub fn y_star(&self) -> &SpectralField {
        &self.y_star
    }
}
