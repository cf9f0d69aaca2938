//! Liapunov–Schmidt expansion of the tetrahedral branch
//! `psi(eps) = eps Y* + eps^2 psi2`, `lambda(eps) = lambda* + eps^2 lambda2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ProfileModel;
use crate::sphere::{SpectralField, Sphere};
use crate::symmetry::y_star;

/// Relative Fredholm solvability threshold for the pseudo-inverse.
pub const FREDHOLM_TOL: f64 = 1e-10;

/// Largest admissible branch amplitude.
pub const MAX_AMPLITUDE: f64 = 0.5;

/// Lowest degree able to hold `(Y*)^2`.
pub const MIN_BRANCH_DEGREE: usize = 6;

/// Inverse of `L0 = -Lap - 12` on the complement of its kernel.
///
/// `L0` is diagonal in the degree, so the inverse is the per-degree factor
/// `1 / (l(l+1) - 12)`, with the degree-3 block excluded. The constant mode
/// keeps its factor `-1/12`.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    diagonal: Vec<f64>,
    y_star: SpectralField,
}

impl PseudoInverse {
    pub fn new(l_max: usize) -> Result<Self> {
        let diagonal = (0..=l_max).map(|l| if l == 3 { 0.0 } else { 1.0 / ((l * (l + 1)) as f64 - 12.0) }).collect();
        Ok(Self { diagonal, y_star: y_star(l_max)? })
    }

    /// Factor applied to degree `l`; zero on the kernel.
    pub fn factor(&self, l: usize) -> f64 {
        self.diagonal[l]
    }

    /// Unique `u` with `L0 u = f` and `u` orthogonal to the kernel.
    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        let norm = f.norm();
        if norm == 0.0 {
            return Ok(f.clone());
        }
        let along = f.dot(&self.y_star);
        let kernel_part = f.degree_block(3).iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm * norm - kernel_part * kernel_part).max(0.0).sqrt() <= FREDHOLM_TOL * norm {
            return Err(Error::Kernel);
        }
        if kernel_part > FREDHOLM_TOL * norm {
            return Err(Error::Fredholm { projection: along.abs().max(kernel_part), norm });
        }
        let mut out = f.clone();
        for l in 0..=f.l_max() {
            let d = self.diagonal[l];
            out.degree_block_mut(l).iter_mut().for_each(|v| *v *= d);
        }
        Ok(out)
    }
}

/// `L0 u = -Lap u - 12 u`.
pub fn apply_l0(u: &SpectralField) -> SpectralField {
    let mut out = u.laplacian().scaled(-1.0);
    out.axpy(-12.0, u);
    out
}

/// Leading-order data of the bifurcating branch.
#[derive(Debug, Clone, Serialize)]
pub struct BranchExpansion {
    pub model: ProfileModel,
    pub lambda_star: f64,
    pub gamma_prime: f64,
    pub lambda2: f64,
    #[serde(skip)]
    pub y_star: SpectralField,
    #[serde(skip)]
    pub psi2: SpectralField,
}

fn require_branch_resolution(sphere: &Sphere) -> Result<()> {
    if sphere.l_max() < MIN_BRANCH_DEGREE {
        return Err(Error::Resolution(format!(
            "branch expansion needs l_max >= {MIN_BRANCH_DEGREE} to represent (Y*)^2, got {}",
            sphere.l_max()
        )));
    }
    if !sphere.resolves_products() {
        return Err(Error::Resolution("branch expansion needs a de-aliasing grid".into()));
    }
    Ok(())
}

/// `psi2 = -1/2 S_L[ P(d2 (Y*)^2) ]`, `P` removing the mean for the
/// mass-constrained model.
pub fn compute_psi2(sphere: &Sphere, model: &ProfileModel) -> Result<SpectralField> {
    require_branch_resolution(sphere)?;
    model.validate()?;
    let ys = y_star(sphere.l_max())?;
    let d2 = model.derivative_bundle().d2;
    let mut rhs = sphere.product(&ys, &ys)?.scaled(d2);
    if model.is_mass_constrained() {
        rhs = rhs.zero_mean();
    }
    Ok(PseudoInverse::new(sphere.l_max())?.apply(&rhs)?.scaled(-0.5))
}

/// `lambda2` from order-`eps^3` solvability:
/// `-[<d2 Y* psi2, Y*> + d3/6 <(Y*)^4>] / gamma'(lambda*)`.
///
/// The mean terms of the mass-constrained model are constants and drop out
/// against `Y*`.
pub fn compute_lambda2(sphere: &Sphere, model: &ProfileModel, psi2: &SpectralField) -> Result<f64> {
    require_branch_resolution(sphere)?;
    let b = model.derivative_bundle();
    if b.dl.abs() < 1e-14 {
        return Err(Error::DegenerateBifurcation(b.dl));
    }
    let ys = y_star(sphere.l_max())?;
    let ys2 = sphere.product(&ys, &ys)?;
    let quadratic = sphere.product(&ys, psi2)?.scaled(b.d2).dot(&ys);
    let quartic = ys2.dot(&ys2);
    Ok(-(quadratic + b.d3 / 6.0 * quartic) / b.dl)
}

/// Full leading-order expansion for one model.
pub fn expand(sphere: &Sphere, model: &ProfileModel) -> Result<BranchExpansion> {
    let psi2 = compute_psi2(sphere, model)?;
    let lambda2 = compute_lambda2(sphere, model, &psi2)?;
    let ls = model.critical_lambda();
    Ok(BranchExpansion {
        model: *model,
        lambda_star: ls,
        gamma_prime: model.gamma_prime(ls),
        lambda2,
        y_star: y_star(sphere.l_max())?,
        psi2,
    })
}

impl BranchExpansion {
    /// `(lambda*, + eps^2 lambda2, eps Y* + eps^2 psi2)`.
    pub fn branch(&self, epsilon: f64) -> Result<(f64, SpectralField)> {
        if epsilon.is_nan() || epsilon.abs() > MAX_AMPLITUDE {
            return Err(Error::AmplitudeGuard(epsilon.abs()));
        }
        let e2 = epsilon * epsilon;
        let mut psi = self.y_star.scaled(epsilon);
        psi.axpy(e2, &self.psi2);
        Ok((self.lambda_star + e2 * self.lambda2, psi))
    }

    /// `lambda(eps)` only.
    pub fn lambda_at(&self, epsilon: f64) -> f64 {
        self.lambda_star + epsilon * epsilon * self.lambda2
    }
}

/// `R = -Lap psi + F(lambda, psi)`, with `F` evaluated on the grid and
/// analyzed to `l_max`.
pub fn residual(sphere: &Sphere, model: &ProfileModel, lambda: f64, psi: &SpectralField) -> Result<SpectralField> {
    let grid_psi = sphere.synthesize(psi)?;
    let f = model.apply_f(sphere.grid(), lambda, &grid_psi)?;
    let mut r = sphere.analyze(&f, sphere.l_max())?;
    r.axpy(-1.0, &psi.laplacian().resized(sphere.l_max()));
    Ok(r)
}
