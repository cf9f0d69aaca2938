//! Runtime verification suite: every structural identity the analysis relies
//! on, measured at a given resolution and reported check by check.

use serde::Serialize;

use crate::bifurcation::{expand, residual, BranchExpansion};
use crate::convergence::loglog_slope;
use crate::error::Result;
use crate::models::{ModelKind, ProfileModel};
use crate::space::TetraSpace;
use crate::sphere::{SpectralField, Sphere};
use crate::stability::{
    assemble_hessian, eta_corrections, mu_corrections, potentials, second_variation, unperturbed_hessian_eigenvalue,
};
use crate::symmetry::{invariant_dimension, RotationGroup};

/// Amplitudes used by the convergence-order checks.
pub const ORDER_EPSILONS: [f64; 4] = [0.005, 0.01, 0.02, 0.04];

/// Amplitude of the gap-persistence and symmetry checks.
pub const GAP_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn at_most(name: &str, model: Option<ModelKind>, value: f64, threshold: f64) -> Self {
        Self::measured(name, model, value, threshold, value <= threshold)
    }

    fn at_least(name: &str, model: Option<ModelKind>, value: f64, threshold: f64) -> Self {
        Self::measured(name, model, value, threshold, value >= threshold)
    }

    fn measured(name: &str, model: Option<ModelKind>, value: f64, threshold: f64, passed: bool) -> Self {
        Self { name: name.into(), model, passed, value: Some(value), threshold: Some(threshold), error: None }
    }

    fn flag(name: &str, model: Option<ModelKind>, passed: bool) -> Self {
        Self { name: name.into(), model, passed, value: None, threshold: None, error: None }
    }

    fn failed(name: &str, model: Option<ModelKind>, err: impl ToString) -> Self {
        Self { name: name.into(), model, passed: false, value: None, threshold: None, error: Some(err.to_string()) }
    }
}

/// Deterministic band-limited test field with every coefficient populated.
pub fn probe_field(l_max: usize, seed: f64) -> SpectralField {
    let n = (l_max + 1) * (l_max + 1);
    let coeffs = (0..n).map(|k| (seed * (k as f64 + 1.0)).sin() / (1.0 + (k as f64).sqrt())).collect();
    SpectralField::from_coeffs(l_max, coeffs).expect("length matches")
}

fn structural_checks(space: &TetraSpace, out: &mut Vec<Check>) {
    let s = space.sphere();
    let f = probe_field(s.l_max(), 0.731);
    let round_trip = s.synthesize(&f).and_then(|g| s.analyze(&g, s.l_max())).map(|h| (&h - &f).max_abs());
    out.push(match round_trip {
        Ok(err) => Check::at_most("transform round trip", None, err, 1e-12),
        Err(e) => Check::failed("transform round trip", None, e),
    });

    let g = RotationGroup::tetrahedral();
    out.push(Check::flag("group closure", None, g.order() == 12 && g.is_closed()));

    let rank_ok = (0..=s.l_max()).all(|l| space.projector().rank(l) == invariant_dimension(l));
    out.push(Check::flag("projector rank matches character formula", None, rank_ok));

    let min_k = space.basis().degrees().iter().map(|&l| (l * (l + 1)) as f64).fold(f64::INFINITY, f64::min);
    out.push(Check::measured("zero-mean invariant spectrum starts at 12", None, min_k, 12.0, min_k == 12.0));
}

fn slope_check<F>(name: &str, kind: ModelKind, threshold: f64, mut sample: F) -> Check
where
    F: FnMut(f64) -> Result<f64>,
{
    let values: Result<Vec<f64>> = ORDER_EPSILONS.iter().map(|&e| sample(e)).collect();
    match values {
        Ok(v) if v.iter().all(|&x| x < 1e-15) => Check::measured(name, Some(kind), f64::INFINITY, threshold, true),
        Ok(v) => Check::at_least(name, Some(kind), loglog_slope(&ORDER_EPSILONS, &v), threshold),
        Err(e) => Check::failed(name, Some(kind), e),
    }
}

fn model_checks(space: &TetraSpace, model: &ProfileModel, out: &mut Vec<Check>) {
    let kind = model.kind();
    let s = space.sphere();
    let b = match expand(s, model) {
        Ok(b) => b,
        Err(e) => return out.push(Check::failed("branch expansion", Some(kind), e)),
    };
    match corrections(s, &b) {
        Ok((mu, eta)) => {
            out.push(Check::at_most("mu1 vanishes", Some(kind), mu.first.abs(), 1e-12));
            out.push(Check::at_most("eta1 vanishes", Some(kind), eta.first.abs(), 1e-12));
            let rel = (eta.second + mu.second).abs() / mu.second.abs();
            out.push(Check::at_most("eta2 = -mu2 (relative)", Some(kind), rel, 1e-8));
        }
        Err(e) => out.push(Check::failed("eigenvalue corrections", Some(kind), e)),
    }

    out.push(slope_check("residual order", kind, 2.7, |e| {
        let (l, psi) = b.branch(e)?;
        Ok(residual(s, model, l, &psi)?.norm())
    }));
    out.push(slope_check("residual projection order", kind, 3.7, |e| {
        let (l, psi) = b.branch(e)?;
        Ok(residual(s, model, l, &psi)?.dot(&b.y_star).abs())
    }));

    hessian_checks(space, &b, out);
}

fn corrections(
    s: &Sphere,
    b: &BranchExpansion,
) -> Result<(crate::stability::Corrections, crate::stability::Corrections)> {
    let p = potentials(s, b)?;
    Ok((mu_corrections(s, b, &p)?, eta_corrections(s, b, &p)?))
}

fn hessian_checks(space: &TetraSpace, b: &BranchExpansion, out: &mut Vec<Check>) {
    let kind = b.model.kind();
    let s = space.sphere();
    let basis = space.basis();
    let y = basis.coordinates(space.y_star());

    match assemble_hessian(s, b, 0.0, basis) {
        Ok(h) => {
            let n = h.dim();
            let mut err = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { unperturbed_hessian_eigenvalue(h.degrees[i]) } else { 0.0 };
                    err = err.max((h.get(i, j) - want).abs());
                }
            }
            out.push(Check::at_most("unperturbed Hessian spectrum", Some(kind), err, 1e-10));
        }
        Err(e) => out.push(Check::failed("unperturbed Hessian spectrum", Some(kind), e)),
    }

    match assemble_hessian(s, b, GAP_EPSILON, basis).and_then(|h| Ok((h.asymmetry(), h.spectrum(&y)?))) {
        Ok((asym, spec)) => {
            out.push(Check::at_most("Hessian symmetry", Some(kind), asym, 1e-10));
            out.push(Check::at_most("spectral gap persists", Some(kind), spec.gap_max, -5.0));
        }
        Err(e) => out.push(Check::failed("Hessian at gap amplitude", Some(kind), e)),
    }

    let eta2 = match corrections(s, b) {
        Ok((_, eta)) => eta.second,
        Err(e) => return out.push(Check::failed("eigenvalue curve", Some(kind), e)),
    };
    let mut sign_ok = true;
    out.push(slope_check("eigenvalue curve order", kind, 2.7, |e| {
        let spec = assemble_hessian(s, b, e, basis)?.spectrum(&y)?;
        sign_ok &= spec.critical.signum() == eta2.signum();
        Ok((spec.critical - e * e * eta2).abs())
    }));
    out.push(Check::flag("eigenvalue curve sign", Some(kind), sign_ok));

    let coords: Vec<f64> = (0..basis.len()).map(|k| ((k * 7 + 3) % 11) as f64 / 11.0 - 0.5).collect();
    let v = basis.combine(&coords);
    let form = assemble_hessian(s, b, 0.03, basis)
        .and_then(|h| Ok((second_variation(s, b, 0.03, &v)?, h.quadratic_form(&coords))));
    out.push(match form {
        Ok((direct, matrix)) => {
            Check::at_most("quadratic form equivalence", Some(kind), (direct - matrix).abs() / direct.abs(), 1e-9)
        }
        Err(e) => Check::failed("quadratic form equivalence", Some(kind), e),
    });
}

/// Runs the suite for the given models. Construction failures of the shared
/// context are reported as a single failed check.
pub fn run_suite(l_max: usize, models: &[ProfileModel]) -> Vec<Check> {
    let mut out = Vec::new();
    let space = match TetraSpace::new(l_max) {
        Ok(s) => s,
        Err(e) => {
            out.push(Check::failed("analysis context", None, e));
            return out;
        }
    };
    structural_checks(&space, &mut out);
    for m in models {
        model_checks(&space, m, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_at_moderate_resolution() {
        let models = [ProfileModel::Polynomial { mu: 9.0, mu1: 3.0 }, ProfileModel::Exponential];
        let checks = run_suite(8, &models);
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(checks.len() > 20);
    }

    #[test]
    fn low_resolution_reports_failures() {
        let checks = run_suite(4, &[ProfileModel::SineGordon]);
        assert!(checks.iter().any(|c| !c.passed && c.error.as_deref().is_some_and(|e| e.contains("l_max"))));
    }
}
