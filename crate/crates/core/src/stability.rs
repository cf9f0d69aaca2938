//! Energy-Casimir second variation along the branch: the perturbed
//! eigenvalues of the linearized operator and of the Hessian, the Hessian
//! matrix on the invariant basis, and the stability classifier.

use std::fmt;

use serde::Serialize;

use crate::bifurcation::{expand, BranchExpansion, PseudoInverse};
use crate::error::{Error, Result};
use crate::linalg::{relative_asymmetry, symmetric_eigen};
use crate::models::{ModelKind, ProfileModel};
use crate::space::TetraSpace;
use crate::sphere::{GridField, SpectralField, Sphere};
use crate::symmetry::InvariantBasis;

/// Smallest admissible `|d_psi F|` on the grid.
pub const PREFACTOR_GUARD: f64 = 1.0;

/// Minimum overlap of the tracked eigenvector with `Y*`.
pub const TRACKING_OVERLAP: f64 = 0.9;

/// Agreement required between the two quadratic-form routes.
pub const FORM_TOL: f64 = 1e-10;

/// Relative size of the mean tolerated by the inverse Laplacian.
pub const MEAN_TOL: f64 = 1e-12;

/// `|lambda2|` below which the branch direction is undecided.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Amplitude at which `classify` checks the sign of the tracked eigenvalue.
pub const PROBE_EPSILON: f64 = 0.02;

/// `eta_l = -(l(l+1)/12) (l(l+1) - 12)`, the Hessian spectrum at `eps = 0`.
pub fn unperturbed_hessian_eigenvalue(l: usize) -> f64 {
    let k = (l * (l + 1)) as f64;
    -(k / 12.0) * (k - 12.0)
}

/// `d_psi F(lambda(eps), psi(eps)) = -12 + eps V1 + eps^2 V2 + ...`
#[derive(Debug, Clone)]
pub struct PotentialExpansion {
    pub v1: SpectralField,
    pub v2: SpectralField,
}

/// `V1 = d2 Y*`, `V2 = dl lambda2 + d2 psi2 + d3/2 (Y*)^2`.
///
/// For the mass-constrained model these are the local potentials of
/// `lambda e^psi`; the mean removal acts on perturbations, not on the
/// multiplier.
pub fn potentials(sphere: &Sphere, b: &BranchExpansion) -> Result<PotentialExpansion> {
    let d = b.model.derivative_bundle();
    let v1 = b.y_star.scaled(d.d2);
    let ys2 = sphere.product(&b.y_star, &b.y_star)?;
    let mut v2 = sphere.constant(d.dl * b.lambda2);
    v2.axpy(d.d2, &b.psi2);
    v2.axpy(0.5 * d.d3, &ys2);
    Ok(PotentialExpansion { v1, v2 })
}

/// First and second eigenvalue corrections of one operator expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corrections {
    pub first: f64,
    pub second: f64,
}

fn first_order_scale(v1: &SpectralField) -> f64 {
    1e-12 * (1.0 + v1.norm())
}

/// Linearized-operator route: `mu1 = <V1 Y*, Y*>`,
/// `mu2 = <V2 Y*, Y*> - <V1 Y*, S_L V1 Y*>`.
pub fn mu_corrections(sphere: &Sphere, b: &BranchExpansion, pot: &PotentialExpansion) -> Result<Corrections> {
    let ys = &b.y_star;
    let w = sphere.product(&pot.v1, ys)?;
    let first = w.dot(ys);
    if first.abs() > first_order_scale(&pot.v1) {
        return Err(Error::Inconsistency(format!("mu1 = {first:e} does not vanish")));
    }
    let sl = PseudoInverse::new(sphere.l_max())?;
    let correction = if w.max_abs() == 0.0 { 0.0 } else { w.dot(&sl.apply(&w)?) };
    let second = sphere.product(&pot.v2, ys)?.dot(ys) - correction;
    Ok(Corrections { first, second })
}

/// `Lap^{-1}` on zero-mean fields.
pub fn inverse_laplacian(f: &SpectralField) -> Result<SpectralField> {
    let a00 = f.get(0, 0);
    if a00.abs() > MEAN_TOL * f.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::MeanProjection(a00));
    }
    let mut out = f.clone();
    out.set(0, 0, 0.0);
    for l in 1..=f.l_max() {
        let s = -1.0 / (l * (l + 1)) as f64;
        out.degree_block_mut(l).iter_mut().for_each(|v| *v *= s);
    }
    Ok(out)
}

/// `-1/144 Lap(W Lap f)` evaluated with explicit operator applications.
fn weighted_fourth_order(sphere: &Sphere, w: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
    Ok(sphere.product(w, &f.laplacian())?.laplacian().scaled(-1.0 / 144.0))
}

/// Hessian route: `eta1 = <H1 Y*, Y*>`,
/// `eta2 = <H2 Y*, Y*> - <S_H H1 Y*, H1 Y*>` with `S_H = 12 S_L Lap^{-1}`.
pub fn eta_corrections(sphere: &Sphere, b: &BranchExpansion, pot: &PotentialExpansion) -> Result<Corrections> {
    let ys = &b.y_star;
    let h1 = weighted_fourth_order(sphere, &pot.v1, ys)?;
    let first = h1.dot(ys);
    if first.abs() > first_order_scale(&pot.v1) {
        return Err(Error::Inconsistency(format!("eta1 = {first:e} does not vanish")));
    }
    let mut w2 = pot.v2.clone();
    w2.axpy(1.0 / 12.0, &sphere.product(&pot.v1, &pot.v1)?);
    let h2 = weighted_fourth_order(sphere, &w2, ys)?;
    let correction = if h1.max_abs() == 0.0 {
        0.0
    } else {
        let sl = PseudoInverse::new(sphere.l_max())?;
        sl.apply(&inverse_laplacian(&h1)?)?.scaled(12.0).dot(&h1)
    };
    Ok(Corrections { first, second: h2.dot(ys) - correction })
}

/// `1 / d_psi F(lambda(eps), psi(eps))` on the grid, with the sign guard.
pub fn hessian_prefactor(sphere: &Sphere, b: &BranchExpansion, epsilon: f64) -> Result<GridField> {
    let (lambda, psi) = b.branch(epsilon)?;
    let q = b.model.apply_dpsi(lambda, &sphere.synthesize(&psi)?)?;
    let min = q.min_abs();
    if min.is_nan() || min < PREFACTOR_GUARD {
        return Err(Error::SingularHessian(min));
    }
    Ok(q.map(|v| 1.0 / v))
}

/// `H f = -Lap f + Lap(P Lap f)` for a prefactor `P` sampled on the grid.
pub fn apply_hessian(sphere: &Sphere, prefactor: &GridField, f: &SpectralField) -> Result<SpectralField> {
    let lf = f.laplacian();
    let g = sphere.synthesize(&lf)?.zip_with(prefactor, |a, p| a * p);
    let mut out = sphere.analyze(&g, f.l_max())?.laplacian();
    out.axpy(-1.0, &lf);
    Ok(out)
}

/// Dense Hessian on the zero-mean invariant basis.
#[derive(Debug, Clone, Serialize)]
pub struct HessianMatrix {
    pub model: ProfileModel,
    pub epsilon: f64,
    pub degrees: Vec<usize>,
    /// Row-major `n x n`.
    pub entries: Vec<f64>,
}

pub fn assemble_hessian(
    sphere: &Sphere,
    b: &BranchExpansion,
    epsilon: f64,
    basis: &InvariantBasis,
) -> Result<HessianMatrix> {
    if !basis.is_zero_mean() {
        return Err(Error::InvalidArgument("the Hessian acts on the zero-mean basis".into()));
    }
    let p = hessian_prefactor(sphere, b, epsilon)?;
    let n = basis.len();
    let mut entries = vec![0.0; n * n];
    for (j, bj) in basis.vectors().iter().enumerate() {
        let col = apply_hessian(sphere, &p, bj)?;
        for (i, bi) in basis.vectors().iter().enumerate() {
            entries[i * n + j] = bi.dot(&col);
        }
    }
    Ok(HessianMatrix { model: b.model, epsilon, degrees: basis.degrees().to_vec(), entries })
}

/// Eigenpair tracked from the critical mode.
#[derive(Debug, Clone, Serialize)]
pub struct HessianSpectrum {
    /// All eigenvalues, ascending.
    pub values: Vec<f64>,
    pub critical: f64,
    pub critical_overlap: f64,
    /// Largest eigenvalue whose eigenvector lies mostly on degrees `l >= 4`.
    pub gap_max: f64,
}

impl HessianMatrix {
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim() + j]
    }

    pub fn asymmetry(&self) -> f64 {
        relative_asymmetry(&self.entries, self.dim())
    }

    /// `1/2 v^T H v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += v[i] * self.entries[i * n + j] * v[j];
            }
        }
        0.5 * s
    }

    /// Eigen-decomposition with the critical eigenvalue picked by overlap
    /// with `y_coords`, the coordinates of `Y*`.
    pub fn spectrum(&self, y_coords: &[f64]) -> Result<HessianSpectrum> {
        let n = self.dim();
        let e = symmetric_eigen(&self.entries, n);
        let mut best = (0usize, -1.0f64);
        let mut gap_max = f64::NEG_INFINITY;
        for k in 0..n {
            let v = e.vector(k);
            let overlap: f64 = v.iter().zip(y_coords).map(|(a, b)| a * b).sum::<f64>().abs();
            if overlap > best.1 {
                best = (k, overlap);
            }
            let high: f64 = v.iter().zip(&self.degrees).filter(|(_, &l)| l >= 4).map(|(a, _)| a * a).sum();
            if high > TRACKING_OVERLAP * TRACKING_OVERLAP {
                gap_max = gap_max.max(e.values[k]);
            }
        }
        if best.1 < TRACKING_OVERLAP {
            return Err(Error::TrackingAmbiguity(best.1));
        }
        let mut values = e.values.clone();
        values.sort_by(f64::total_cmp);
        Ok(HessianSpectrum { values, critical: e.values[best.0], critical_overlap: best.1, gap_max })
    }
}

/// Tracked eigenvalue `eta(eps)` of the Hessian.
pub fn critical_eigenvalue(space: &TetraSpace, b: &BranchExpansion, epsilon: f64) -> Result<HessianSpectrum> {
    let h = assemble_hessian(space.sphere(), b, epsilon, space.basis())?;
    h.spectrum(&space.basis().coordinates(space.y_star()))
}

/// `delta^2 H_C[dpsi] = 1/2 \iint dpsi (-Lap dpsi) + (-Lap dpsi)^2 / d_psi F`,
/// checked against `1/2 \iint (-Lap dpsi) / d_psi F * L(dpsi)` where
/// `L = -Lap + d_psi F`.
pub fn second_variation(sphere: &Sphere, b: &BranchExpansion, epsilon: f64, dpsi: &SpectralField) -> Result<f64> {
    let p = hessian_prefactor(sphere, b, epsilon)?;
    let (lambda, psi) = b.branch(epsilon)?;
    let q = b.model.apply_dpsi(lambda, &sphere.synthesize(&psi)?)?;
    let grid = sphere.grid();
    let d = sphere.synthesize(dpsi)?;
    let w = sphere.synthesize(&dpsi.laplacian().scaled(-1.0))?;

    let kinetic = grid.integrate(&d.zip_with(&w, |a, b| a * b));
    let casimir = grid.integrate(&w.zip_with(&p, |a, p| p * a * a));
    let direct = 0.5 * (kinetic + casimir);

    // L(dpsi) = -Lap dpsi + d_psi F dpsi
    let lv = w.zip_with(&q.zip_with(&d, |a, b| a * b), |a, c| a + c);
    let via_l = 0.5 * grid.integrate(&w.zip_with(&p, |a, pp| a * pp).zip_with(&lv, |a, c| a * c));

    let scale = direct.abs().max(via_l.abs()).max(kinetic.abs());
    if (direct - via_l).abs() > FORM_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistency(format!("second variation routes disagree: {direct:e} vs {via_l:e}")));
    }
    Ok(direct)
}

/// `eta(eps)` against its quadratic approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub eta_eps: f64,
    pub eps2_eta2: f64,
    pub abs_diff: f64,
}

pub fn eigen_sweep(space: &TetraSpace, b: &BranchExpansion, epsilons: &[f64]) -> Result<Vec<SweepPoint>> {
    let pot = potentials(space.sphere(), b)?;
    let eta2 = eta_corrections(space.sphere(), b, &pot)?.second;
    epsilons
        .iter()
        .map(|&e| {
            let eta_eps = critical_eigenvalue(space, b, e)?.critical;
            let eps2_eta2 = e * e * eta2;
            Ok(SweepPoint { epsilon: e, eta_eps, eps2_eta2, abs_diff: (eta_eps - eps2_eta2).abs() })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Stable,
    Unstable,
}

impl Classification {
    /// Character of the critical point of the Energy-Casimir functional.
    pub fn critical_point(self) -> &'static str {
        match self {
            Classification::Stable => "Maximum",
            Classification::Unstable => "Saddle",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = match self {
            Classification::Stable => "Stable",
            Classification::Unstable => "Unstable",
        };
        write!(f, "{word} ({})", self.critical_point())
    }
}

/// One row of the stability summary.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub model: ModelKind,
    pub lambda_star: f64,
    pub gamma_prime: f64,
    pub lambda2: f64,
    pub psi2_norm: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub sign_product: f64,
    pub classification: Classification,
    pub probe_epsilon: f64,
    pub probe_eigenvalue: f64,
    pub probe_gap_max: f64,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Full analysis of one model with every sign cross-check enforced.
pub fn classify(space: &TetraSpace, model: &ProfileModel) -> Result<StabilityReport> {
    let sphere = space.sphere();
    let b = expand(sphere, model)?;
    let pot = potentials(sphere, &b)?;
    let mu = mu_corrections(sphere, &b, &pot)?;
    let eta = eta_corrections(sphere, &b, &pot)?;
    if b.lambda2.abs() <= DEGENERACY_TOL {
        return Err(Error::DegenerateBifurcation(b.lambda2));
    }
    let sign_product = sign(b.lambda2 * b.gamma_prime);
    let classification = if sign_product < 0.0 { Classification::Stable } else { Classification::Unstable };
    let probe = critical_eigenvalue(space, &b, PROBE_EPSILON)?;
    let checks = [
        ("sign(mu2) = -sign(lambda2 gamma')", sign(mu.second) == -sign_product),
        ("sign(eta2) = sign(lambda2 gamma')", sign(eta.second) == sign_product),
        ("sign(eta(eps)) = sign(eta2)", sign(probe.critical) == sign(eta.second)),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(Error::Inconsistency(format!("{}: {name} fails", model.kind())));
    }
    Ok(StabilityReport {
        model: model.kind(),
        lambda_star: b.lambda_star,
        gamma_prime: b.gamma_prime,
        lambda2: b.lambda2,
        psi2_norm: b.psi2.norm(),
        mu1: mu.first,
        mu2: mu.second,
        eta1: eta.first,
        eta2: eta.second,
        sign_product,
        classification,
        probe_epsilon: PROBE_EPSILON,
        probe_eigenvalue: probe.critical,
        probe_gap_max: probe.gap_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::loglog_slope;
    use std::f64::consts::PI;

    const Q4: f64 = 315.0 / (572.0 * PI);

    fn models() -> [ProfileModel; 4] {
        [
            ProfileModel::Polynomial { mu: 9.0, mu1: 3.0 },
            ProfileModel::SineGordon,
            ProfileModel::SinhGordon,
            ProfileModel::Exponential,
        ]
    }

    fn space() -> TetraSpace {
        TetraSpace::new(12).unwrap()
    }

    #[test]
    fn unperturbed_values() {
        assert_eq!(unperturbed_hessian_eigenvalue(3), 0.0);
        assert!((unperturbed_hessian_eigenvalue(4) + 40.0 / 3.0).abs() < 1e-14);
        assert_eq!(unperturbed_hessian_eigenvalue(6), -105.0);
    }

    #[test]
    fn potentials_of_odd_models() {
        let s = Sphere::new(8).unwrap();
        for (m, c) in [(ProfileModel::SineGordon, 6.0), (ProfileModel::SinhGordon, -6.0)] {
            let b = expand(&s, &m).unwrap();
            let p = potentials(&s, &b).unwrap();
            assert_eq!(p.v1.max_abs(), 0.0);
            let mut want = s.product(&b.y_star, &b.y_star).unwrap().scaled(c);
            want.axpy(1.0, &s.constant(-b.lambda2));
            assert!((&p.v2 - &want).max_abs() < 1e-14);
        }
        let b = expand(&s, &models()[0]).unwrap();
        let p = potentials(&s, &b).unwrap();
        assert!((&p.v1 - &b.y_star.scaled(18.0)).max_abs() < 1e-13);
    }

    #[test]
    fn odd_model_corrections_closed_form() {
        let s = Sphere::new(8).unwrap();
        for (m, want) in [(ProfileModel::SineGordon, 4.0 * Q4), (ProfileModel::SinhGordon, -4.0 * Q4)] {
            let b = expand(&s, &m).unwrap();
            let p = potentials(&s, &b).unwrap();
            assert!((mu_corrections(&s, &b, &p).unwrap().second - want).abs() < 1e-13);
            assert!((eta_corrections(&s, &b, &p).unwrap().second + want).abs() < 1e-13);
        }
    }

    #[test]
    fn identity_and_first_order_cancellation() {
        let s = Sphere::new(12).unwrap();
        for m in models() {
            let b = expand(&s, &m).unwrap();
            let p = potentials(&s, &b).unwrap();
            let mu = mu_corrections(&s, &b, &p).unwrap();
            let eta = eta_corrections(&s, &b, &p).unwrap();
            assert!(mu.first.abs() <= 1e-12 && eta.first.abs() <= 1e-12, "{m:?}");
            assert!((eta.second + mu.second).abs() <= 1e-8 * mu.second.abs(), "{m:?} {mu:?} {eta:?}");
            // transversality form of the crossing rate
            if !m.is_mass_constrained() {
                assert!((mu.second + 2.0 * b.lambda2 * b.gamma_prime).abs() < 1e-10, "{m:?}");
            }
        }
    }

    #[test]
    fn divergence_lemma_and_mean_guard() {
        let s = Sphere::new(10).unwrap();
        let b = expand(&s, &models()[0]).unwrap();
        let p = potentials(&s, &b).unwrap();
        let lap = s.product(&p.v1, &b.y_star).unwrap().laplacian();
        assert_eq!(lap.get(0, 0), 0.0);
        assert!(inverse_laplacian(&lap).is_ok());
        assert!(matches!(inverse_laplacian(&s.constant(1.0)), Err(Error::MeanProjection(_))));
    }

    #[test]
    fn hessian_at_bifurcation_point_is_diagonal() {
        let sp = space();
        for m in models() {
            let b = expand(sp.sphere(), &m).unwrap();
            let h = assemble_hessian(sp.sphere(), &b, 0.0, sp.basis()).unwrap();
            let n = h.dim();
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { unperturbed_hessian_eigenvalue(h.degrees[i]) } else { 0.0 };
                    assert!((h.get(i, j) - want).abs() < 1e-10, "{m:?} {i} {j}");
                }
            }
            let spec = h.spectrum(&sp.basis().coordinates(sp.y_star())).unwrap();
            assert!(spec.critical.abs() < 1e-11);
            assert!(spec.gap_max <= -40.0 / 3.0 + 1e-10);
        }
    }

    #[test]
    fn gap_persists_and_tracking_converges() {
        let sp = space();
        let eps = [0.04, 0.02, 0.01];
        for m in models() {
            let b = expand(sp.sphere(), &m).unwrap();
            let p = potentials(sp.sphere(), &b).unwrap();
            let eta2 = eta_corrections(sp.sphere(), &b, &p).unwrap().second;
            let mut err = Vec::new();
            for &e in &eps {
                let h = assemble_hessian(sp.sphere(), &b, e, sp.basis()).unwrap();
                assert!(h.asymmetry() <= 1e-10);
                let spec = h.spectrum(&sp.basis().coordinates(sp.y_star())).unwrap();
                assert!(spec.gap_max < -5.0);
                assert_eq!(spec.critical.signum(), eta2.signum(), "{m:?} {e}");
                err.push((spec.critical - e * e * eta2).abs());
            }
            assert!(loglog_slope(&eps, &err) >= 2.7, "{m:?} {err:?}");
        }
        let b = expand(sp.sphere(), &ProfileModel::SinhGordon).unwrap();
        assert!(critical_eigenvalue(&sp, &b, 0.05).unwrap().critical > 0.0);
    }

    #[test]
    fn second_variation_cases() {
        let sp = space();
        let s = sp.sphere();
        let b = expand(s, &ProfileModel::SineGordon).unwrap();
        assert_eq!(second_variation(s, &b, 0.0, &s.zeros()).unwrap(), 0.0);
        let (b4, _) = sp.basis().vectors().iter().zip(sp.basis().degrees()).find(|(_, &l)| l == 4).unwrap();
        assert!((second_variation(s, &b, 0.0, b4).unwrap() + 20.0 / 3.0).abs() < 1e-11);
        assert!(second_variation(s, &b, 0.0, sp.y_star()).unwrap().abs() < 1e-11);
    }

    #[test]
    fn quadratic_form_routes_agree() {
        let sp = space();
        let s = sp.sphere();
        let n = sp.basis().len();
        for m in models() {
            let b = expand(s, &m).unwrap();
            let h = assemble_hessian(s, &b, 0.03, sp.basis()).unwrap();
            let coords: Vec<f64> = (0..n).map(|k| ((k * 7 + 3) % 11) as f64 / 11.0 - 0.5).collect();
            let v = sp.basis().combine(&coords);
            let direct = second_variation(s, &b, 0.03, &v).unwrap();
            let matrix = h.quadratic_form(&coords);
            assert!((direct - matrix).abs() <= 1e-9 * direct.abs(), "{m:?} {direct} {matrix}");
        }
    }

    #[test]
    fn prefactor_guard_trips_far_from_branch() {
        let s = Sphere::new(8).unwrap();
        let mut b = expand(&s, &ProfileModel::SineGordon).unwrap();
        b.lambda_star = 0.5;
        assert!(matches!(hessian_prefactor(&s, &b, 0.0), Err(Error::SingularHessian(_))));
    }

    #[test]
    fn classification_reproduces_summary_table() {
        let sp = space();
        let want = [
            (-1.0, 1.0, 1.0, Classification::Stable),
            (1.0, -1.0, 1.0, Classification::Stable),
            (-1.0, -1.0, -1.0, Classification::Unstable),
            (1.0, 1.0, -1.0, Classification::Unstable),
        ];
        for (m, (l2, gp, mu2, c)) in models().iter().zip(want) {
            let r = classify(&sp, m).unwrap();
            assert_eq!((sign(r.lambda2), sign(r.gamma_prime), sign(r.mu2), r.classification), (l2, gp, mu2, c));
        }
        assert_eq!(Classification::Stable.to_string(), "Stable (Maximum)");
        let flat = ProfileModel::Polynomial { mu: 18.0, mu1: 2.0 };
        assert!(matches!(classify(&sp, &flat), Err(Error::DegenerateBifurcation(_))));
        assert_eq!(Classification::Unstable.to_string(), "Unstable (Saddle)");
    }
}
