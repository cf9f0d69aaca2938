use std::f64::consts::PI;

use tetrastab::bifurcation::expand;
use tetrastab::models::{ModelKind, ProfileModel};
use tetrastab::space::TetraSpace;
use tetrastab::sphere::eval_at;
use tetrastab::stability::{classify, eigen_sweep};

/// Upper bound on the demo resolution; keeps the page responsive.
pub const MAX_DEMO_LMAX: usize = 24;

pub struct Params<'a> {
    pub model: &'a str,
    pub mu: f64,
    pub mu1: f64,
    pub lmax: usize,
}

impl Params<'_> {
    fn model(&self) -> Result<ProfileModel, String> {
        let kind: ModelKind = self.model.parse().map_err(|e: tetrastab::Error| e.to_string())?;
        ProfileModel::from_kind(kind, self.mu, self.mu1).map_err(|e| e.to_string())
    }

    fn space(&self) -> Result<TetraSpace, String> {
        if !(8..=MAX_DEMO_LMAX).contains(&self.lmax) {
            return Err(format!("lmax must lie in [8, {MAX_DEMO_LMAX}]"));
        }
        TetraSpace::new(self.lmax).map_err(|e| e.to_string())
    }
}

pub fn branch_raster(p: &Params, epsilon: f64, n_lat: usize, n_lon: usize) -> Result<Vec<f64>, String> {
    if n_lat < 2 || n_lon < 2 || n_lat * n_lon > 1 << 20 {
        return Err("raster size out of range".into());
    }
    let model = p.model()?;
    let space = p.space()?;
    let b = expand(space.sphere(), &model).map_err(|e| e.to_string())?;
    let (_, psi) = b.branch(epsilon).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(n_lat * n_lon);
    for i in 0..n_lat {
        let lat = PI / 2.0 - PI * (i as f64 + 0.5) / n_lat as f64;
        for j in 0..n_lon {
            let lon = 2.0 * PI * j as f64 / n_lon as f64;
            let point = [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()];
            out.push(eval_at(&psi, point));
        }
    }
    Ok(out)
}

pub fn eta_curve(p: &Params, eps_max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if !(2..=64).contains(&steps) {
        return Err("steps must lie in [2, 64]".into());
    }
    let model = p.model()?;
    let space = p.space()?;
    let b = expand(space.sphere(), &model).map_err(|e| e.to_string())?;
    let eps: Vec<f64> = (1..=steps).map(|k| eps_max * k as f64 / steps as f64).collect();
    let points = eigen_sweep(&space, &b, &eps).map_err(|e| e.to_string())?;
    Ok(points.iter().flat_map(|q| [q.epsilon, q.eta_eps, q.eps2_eta2]).collect())
}

pub fn stability_report(p: &Params) -> Result<String, String> {
    let model = p.model()?;
    let space = p.space()?;
    let r = classify(&space, &model).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&r).map_err(|e| e.to_string())?;
    v["classification_label"] = r.classification.to_string().into();
    Ok(v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(model: &str) -> Params<'_> {
        Params { model, mu: 9.0, mu1: 3.0, lmax: 10 }
    }

    #[test]
    fn raster_matches_cartesian_leading_order() {
        let eps = 1e-4;
        let v = branch_raster(&params("sine-gordon"), eps, 8, 16).unwrap();
        assert_eq!(v.len(), 128);
        let lat = PI / 2.0 - PI * 2.5 / 8.0;
        let lon = 2.0 * PI * 3.0 / 16.0;
        let (x, y, z) = (lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin());
        let want = eps * (105.0 / (4.0 * PI)).sqrt() * x * y * z;
        assert!((v[2 * 16 + 3] - want).abs() < 1e-15);
    }

    #[test]
    fn curve_signs_follow_classification() {
        let c = eta_curve(&params("sinh-gordon"), 0.04, 4).unwrap();
        assert_eq!(c.len(), 12);
        assert!(c.chunks(3).all(|t| t[1] > 0.0 && t[2] > 0.0));
    }

    #[test]
    fn report_is_json() {
        let s = stability_report(&params("polynomial")).unwrap();
        assert!(s.contains("\"classification_label\":\"Stable (Maximum)\""));
        assert!(stability_report(&Params { mu: -1.0, ..params("polynomial") }).unwrap_err().contains("positive"));
        assert!(stability_report(&params("cubic")).is_err());
        assert!(stability_report(&Params { lmax: 4, ..params("exponential") }).is_err());
    }
}
