//! Profile nonlinearities `F(lambda, psi)` of the stationary equation
//! `-Lap psi + F(lambda, psi) = 0`.
//!
//! Every model satisfies `F(lambda, 0) = 0` and is normalized so that
//! `d_psi F(lambda*, 0) = -12` at its critical parameter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{GridField, SphericalGrid};

/// Largest `|psi|` accepted by the exponential model.
pub const EXP_OVERFLOW_GUARD: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Polynomial,
    SineGordon,
    SinhGordon,
    Exponential,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] =
        [ModelKind::Polynomial, ModelKind::SineGordon, ModelKind::SinhGordon, ModelKind::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Polynomial => "polynomial",
            ModelKind::SineGordon => "sine-gordon",
            ModelKind::SinhGordon => "sinh-gordon",
            ModelKind::Exponential => "exponential",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model '{s}'")))
    }
}

/// One of the four nonlinearities.
///
/// The polynomial constants `mu` and `mu1` are model parameters; they are
/// unrelated to the eigenvalue corrections computed in [`crate::stability`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileModel {
    /// `mu1 (3 lambda psi^2 + psi^3) + (3 mu1 lambda^2 - (mu + 12)) psi`
    Polynomial { mu: f64, mu1: f64 },
    /// `-lambda sin(psi)`
    SineGordon,
    /// `-lambda sinh(psi)`
    SinhGordon,
    /// `lambda e^psi` minus its spherical mean, with `\iint psi = 0`.
    Exponential,
}

/// Derivatives of `F` at the bifurcation point `(lambda*, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBundle {
    /// `d_psi F`, always -12.
    pub d1: f64,
    /// `d_psi^2 F`
    pub d2: f64,
    /// `d_psi^3 F`
    pub d3: f64,
    /// `d_lambda d_psi F`, equal to `gamma'(lambda*)`.
    pub dl: f64,
}

impl ProfileModel {
    pub fn polynomial(mu: f64, mu1: f64) -> Result<Self> {
        let m = ProfileModel::Polynomial { mu, mu1 };
        m.validate()?;
        Ok(m)
    }

    pub fn from_kind(kind: ModelKind, mu: f64, mu1: f64) -> Result<Self> {
        match kind {
            ModelKind::Polynomial => Self::polynomial(mu, mu1),
            ModelKind::SineGordon => Ok(ProfileModel::SineGordon),
            ModelKind::SinhGordon => Ok(ProfileModel::SinhGordon),
            ModelKind::Exponential => Ok(ProfileModel::Exponential),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ProfileModel::Polynomial { .. } => ModelKind::Polynomial,
            ProfileModel::SineGordon => ModelKind::SineGordon,
            ProfileModel::SinhGordon => ModelKind::SinhGordon,
            ProfileModel::Exponential => ModelKind::Exponential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ProfileModel::Polynomial { mu, mu1 } = *self {
            if !(mu > 0.0 && mu1 > 0.0 && mu.is_finite() && mu1.is_finite()) {
                return Err(Error::InvalidModel("polynomial parameters must be positive".into()));
            }
        }
        Ok(())
    }

    /// Whether the model carries the mass constraint `\iint psi = 0`.
    pub fn is_mass_constrained(&self) -> bool {
        matches!(self, ProfileModel::Exponential)
    }

    /// Local (pointwise) part of `F`. For the exponential model this is
    /// `lambda e^psi` without the mean subtraction.
    pub fn local_f(&self, lambda: f64, psi: f64) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu, mu1 } => {
                mu1 * (3.0 * lambda * psi * psi + psi * psi * psi) + (3.0 * mu1 * lambda * lambda - (mu + 12.0)) * psi
            }
            ProfileModel::SineGordon => -lambda * psi.sin(),
            ProfileModel::SinhGordon => -lambda * psi.sinh(),
            ProfileModel::Exponential => lambda * psi.exp(),
        }
    }

    /// `d_psi F(lambda, psi)` of the local part.
    pub fn dpsi(&self, lambda: f64, psi: f64) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu, mu1 } => {
                mu1 * (6.0 * lambda * psi + 3.0 * psi * psi) + 3.0 * mu1 * lambda * lambda - mu - 12.0
            }
            ProfileModel::SineGordon => -lambda * psi.cos(),
            ProfileModel::SinhGordon => -lambda * psi.cosh(),
            ProfileModel::Exponential => lambda * psi.exp(),
        }
    }

    /// `d_psi^2 F(lambda, psi)` of the local part.
    pub fn dpsi2(&self, lambda: f64, psi: f64) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu1, .. } => 6.0 * mu1 * (lambda + psi),
            ProfileModel::SineGordon => lambda * psi.sin(),
            ProfileModel::SinhGordon => -lambda * psi.sinh(),
            ProfileModel::Exponential => lambda * psi.exp(),
        }
    }

    /// `d_psi^3 F(lambda, psi)` of the local part.
    pub fn dpsi3(&self, lambda: f64, psi: f64) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu1, .. } => 6.0 * mu1,
            ProfileModel::SineGordon => lambda * psi.cos(),
            ProfileModel::SinhGordon => -lambda * psi.cosh(),
            ProfileModel::Exponential => lambda * psi.exp(),
        }
    }

    /// `d_lambda d_psi F(lambda, psi)` of the local part.
    pub fn dlambda_dpsi(&self, lambda: f64, psi: f64) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu1, .. } => 6.0 * mu1 * (psi + lambda),
            ProfileModel::SineGordon => -psi.cos(),
            ProfileModel::SinhGordon => -psi.cosh(),
            ProfileModel::Exponential => psi.exp(),
        }
    }

    /// Trivial-branch eigenvalue `gamma(lambda) = 12 + d_psi F(lambda, 0)`.
    pub fn gamma(&self, lambda: f64) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu, mu1 } => 3.0 * mu1 * lambda * lambda - mu,
            ProfileModel::SineGordon | ProfileModel::SinhGordon => 12.0 - lambda,
            ProfileModel::Exponential => 12.0 + lambda,
        }
    }

    pub fn gamma_prime(&self, lambda: f64) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu1, .. } => 6.0 * mu1 * lambda,
            ProfileModel::SineGordon | ProfileModel::SinhGordon => -1.0,
            ProfileModel::Exponential => 1.0,
        }
    }

    /// Root of `gamma` where the branch bifurcates (positive root for the polynomial).
    pub fn critical_lambda(&self) -> f64 {
        match *self {
            ProfileModel::Polynomial { mu, mu1 } => (mu / (3.0 * mu1)).sqrt(),
            ProfileModel::SineGordon | ProfileModel::SinhGordon => 12.0,
            ProfileModel::Exponential => -12.0,
        }
    }

    /// Derivatives at `(lambda*, 0)`. The exponential bundle describes the
    /// local part `lambda e^psi`; consumers apply the mean projection.
    pub fn derivative_bundle(&self) -> DerivativeBundle {
        let ls = self.critical_lambda();
        DerivativeBundle {
            d1: self.dpsi(ls, 0.0),
            d2: self.dpsi2(ls, 0.0),
            d3: self.dpsi3(ls, 0.0),
            dl: self.dlambda_dpsi(ls, 0.0),
        }
    }

    /// Pointwise `F(lambda, psi)` on the grid; the exponential model returns
    /// `lambda e^psi` minus its spherical mean.
    pub fn apply_f(&self, grid: &SphericalGrid, lambda: f64, psi: &GridField) -> Result<GridField> {
        self.validate()?;
        if self.is_mass_constrained() {
            guard_exponent(psi)?;
            let local = psi.map(|v| lambda * v.exp());
            let mean = grid.mean(&local);
            Ok(local.map(|v| v - mean))
        } else {
            Ok(psi.map(|v| self.local_f(lambda, v)))
        }
    }

    /// Pointwise `d_psi F(lambda, psi)` on the grid (local part).
    pub fn apply_dpsi(&self, lambda: f64, psi: &GridField) -> Result<GridField> {
        self.validate()?;
        if self.is_mass_constrained() {
            guard_exponent(psi)?;
        }
        Ok(psi.map(|v| self.dpsi(lambda, v)))
    }
}

fn guard_exponent(psi: &GridField) -> Result<()> {
    let m = psi.max_abs();
    if m.is_nan() || m > EXP_OVERFLOW_GUARD {
        return Err(Error::Domain(format!(
            "exponential model needs |psi| <= {EXP_OVERFLOW_GUARD}, got max |psi| = {m:e}"
        )));
    }
    Ok(())
}
