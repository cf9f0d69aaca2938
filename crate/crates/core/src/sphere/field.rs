use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Real orthonormal spherical-harmonic expansion up to degree `l_max`.
///
/// Coefficient `a(l, m)` multiplies
/// `Y_l^m = sqrt(2) Pbar_l^|m|(sin lat) cos(m lon)` for `m > 0`,
/// `Y_l^0 = Pbar_l^0(sin lat)` and
/// `Y_l^m = sqrt(2) Pbar_l^|m|(sin lat) sin(|m| lon)` for `m < 0`.
/// `Pbar` is the orthonormal associated Legendre function without the
/// Condon–Shortley phase, so `<Y_l^m, Y_l'^m'> = delta delta` over the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    l_max: usize,
    coeffs: Vec<f64>,
}

#[inline]
pub fn coeff_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

impl SpectralField {
    pub fn zeros(l_max: usize) -> Self {
        Self { l_max, coeffs: vec![0.0; (l_max + 1) * (l_max + 1)] }
    }

    /// Single harmonic `Y_l^m` with unit coefficient.
    pub fn harmonic(l_max: usize, l: usize, m: i64) -> Self {
        let mut f = Self::zeros(l_max);
        f.set(l, m, 1.0);
        f
    }

    /// Constant field of value `c` (coefficient `c sqrt(4 pi)` on `Y_0^0`).
    pub fn constant(l_max: usize, c: f64) -> Self {
        let mut f = Self::zeros(l_max);
        f.set(0, 0, c * (4.0 * std::f64::consts::PI).sqrt());
        f
    }

    pub fn from_coeffs(l_max: usize, coeffs: Vec<f64>) -> Option<Self> {
        (coeffs.len() == (l_max + 1) * (l_max + 1)).then_some(Self { l_max, coeffs })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.l_max {
            return 0.0;
        }
        self.coeffs[coeff_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: f64) {
        self.coeffs[coeff_index(l, m)] = v;
    }

    /// Coefficients of degree `l` ordered `m = -l..=l`.
    pub fn degree_block(&self, l: usize) -> &[f64] {
        &self.coeffs[l * l..(l + 1) * (l + 1)]
    }

    pub fn degree_block_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.coeffs[l * l..(l + 1) * (l + 1)]
    }

    /// Copy with coefficients above `l_max` dropped or zero-padded.
    pub fn resized(&self, l_max: usize) -> Self {
        let mut out = Self::zeros(l_max);
        let n = out.coeffs.len().min(self.coeffs.len());
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// `<f, g>` over the unit sphere (Parseval in the orthonormal basis).
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Spherical mean `(1 / 4 pi) \iint f`.
    pub fn mean(&self) -> f64 {
        self.coeffs[0] / (4.0 * std::f64::consts::PI).sqrt()
    }

    /// Drops the `l = 0` coefficient.
    pub fn zero_mean(mut self) -> Self {
        self.coeffs[0] = 0.0;
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { l_max: self.l_max, coeffs: self.coeffs.iter().map(|v| v * s).collect() }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Self) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    /// Highest degree carrying a coefficient with magnitude above `tol`.
    pub fn effective_degree(&self, tol: f64) -> Option<usize> {
        (0..=self.l_max).rev().find(|&l| self.degree_block(l).iter().any(|v| v.abs() > tol))
    }

    /// `a(l, m) -> -l(l+1) a(l, m)`.
    pub fn laplacian(&self) -> Self {
        let mut out = self.clone();
        for l in 0..=self.l_max {
            let e = -((l * (l + 1)) as f64);
            out.degree_block_mut(l).iter_mut().for_each(|v| *v *= e);
        }
        out
    }

    /// Kinetic energy `1/2 \iint |grad f|^2 = 1/2 sum l(l+1) a^2`.
    pub fn energy(&self) -> f64 {
        0.5 * (0..=self.l_max)
            .map(|l| (l * (l + 1)) as f64 * self.degree_block(l).iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
    }

    /// Longitude derivative, closed in spectral space.
    pub fn d_longitude(&self) -> Self {
        let mut out = Self::zeros(self.l_max);
        for l in 1..=self.l_max {
            for m in 1..=l as i64 {
                let c = self.get(l, m);
                let s = self.get(l, -m);
                let mf = m as f64;
                out.set(l, -m, -mf * c);
                out.set(l, m, mf * s);
            }
        }
        out
    }

    /// Rotates the field about the polar axis: returns `f(lon + angle, lat)`.
    pub fn shift_longitude(&self, angle: f64) -> Self {
        let mut out = self.clone();
        for l in 1..=self.l_max {
            for m in 1..=l as i64 {
                let (s, c) = (m as f64 * angle).sin_cos();
                let a = self.get(l, m);
                let b = self.get(l, -m);
                out.set(l, m, a * c + b * s);
                out.set(l, -m, b * c - a * s);
            }
        }
        out
    }
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

/// Samples on the Gauss–Legendre x equiangular grid, latitude-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub(crate) n_lat: usize,
    pub(crate) n_lon: usize,
    pub(crate) values: Vec<f64>,
}

impl GridField {
    pub fn zeros(n_lat: usize, n_lon: usize) -> Self {
        Self { n_lat, n_lon, values: vec![0.0; n_lat * n_lon] }
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, lat: usize, lon: usize) -> f64 {
        self.values[lat * self.n_lon + lon]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { n_lat: self.n_lat, n_lon: self.n_lon, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        Self {
            n_lat: self.n_lat,
            n_lon: self.n_lon,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }
}
