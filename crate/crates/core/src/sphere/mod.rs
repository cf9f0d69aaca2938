//! Real spherical-harmonic transforms on the unit sphere.
//!
//! Latitude nodes are Gauss–Legendre points in `z = sin(latitude)`, longitude
//! nodes are equiangular. Longitude sums are carried out directly, there is
//! no FFT. A [`Sphere`] owns the grid and the Legendre tables for one `l_max`
//! and performs all transforms, products and the Jacobian.

mod field;
pub mod legendre;
mod quadrature;

use std::f64::consts::{PI, SQRT_2};

pub use field::{coeff_index, GridField, SpectralField};
pub use quadrature::gauss_legendre;

use crate::error::{Error, Result};
use legendre::{latitude_derivative, normalized_legendre, tri_index, tri_len};

/// Gauss–Legendre x equiangular-longitude grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    n_lat: usize,
    n_lon: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl SphericalGrid {
    pub fn new(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lon == 0 {
            return Err(Error::InvalidArgument("grid needs at least one longitude".into()));
        }
        let (nodes, weights) = gauss_legendre(n_lat)?;
        Ok(Self { n_lat, n_lon, nodes, weights })
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    /// `sin(latitude)` of each latitude row, increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn longitude(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_lon as f64
    }

    /// Cartesian position of node `(i, j)` on the unit sphere.
    pub fn point(&self, i: usize, j: usize) -> [f64; 3] {
        let z = self.nodes[i];
        let c = (1.0 - z * z).sqrt();
        let (s, co) = self.longitude(j).sin_cos();
        [c * co, c * s, z]
    }

    /// Quadrature weight of a node, summing to `4 pi` over the grid.
    pub fn area_weight(&self, i: usize) -> f64 {
        self.weights[i] * 2.0 * PI / self.n_lon as f64
    }

    /// Samples a function of the Cartesian position at every node.
    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> GridField {
        let mut out = GridField::zeros(self.n_lat, self.n_lon);
        for i in 0..self.n_lat {
            for j in 0..self.n_lon {
                out.values[i * self.n_lon + j] = f(self.point(i, j));
            }
        }
        out
    }

    /// `\iint v dsigma` by the product rule.
    pub fn integrate(&self, v: &GridField) -> f64 {
        (0..self.n_lat)
            .map(|i| {
                let row: f64 = v.values[i * self.n_lon..(i + 1) * self.n_lon].iter().sum();
                self.area_weight(i) * row
            })
            .sum()
    }

    pub fn mean(&self, v: &GridField) -> f64 {
        self.integrate(v) / (4.0 * PI)
    }
}

/// Smallest latitude count satisfying the cubic de-aliasing bound, rounded up to even.
pub fn dealiasing_n_lat(l_max: usize) -> usize {
    let n = (3 * l_max).div_ceil(2) + 1;
    n + n % 2
}

/// Transform context for fields of degree `<= l_max`.
#[derive(Debug, Clone)]
pub struct Sphere {
    l_max: usize,
    grid: SphericalGrid,
    /// Per latitude row: `Pbar_l^m`, with the `sqrt 2` of the real basis folded in for `m > 0`.
    plm: Vec<Vec<f64>>,
    /// Per latitude row: latitude derivative of `plm`.
    dplm: Vec<Vec<f64>>,
    /// `cos(m lon_j)` and `sin(m lon_j)` for `m <= l_max`, indexed `[m][j]`.
    cos_tab: Vec<Vec<f64>>,
    sin_tab: Vec<Vec<f64>>,
}

impl Sphere {
    /// Context with the default de-aliasing grid
    /// (`n_lat = dealiasing_n_lat(l_max)`, `n_lon = 2 n_lat`; 32 x 64 at `l_max = 20`).
    pub fn new(l_max: usize) -> Result<Self> {
        let n_lat = dealiasing_n_lat(l_max);
        Self::with_grid(l_max, n_lat, 2 * n_lat)
    }

    /// Context on an explicit grid. The grid must at least resolve the
    /// analysis of degree-`l_max` fields exactly.
    pub fn with_grid(l_max: usize, n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat < l_max + 1 || n_lon < 2 * l_max + 1 {
            return Err(Error::Resolution(format!(
                "grid {n_lat} x {n_lon} cannot transform degree {l_max} exactly \
                 (needs n_lat >= {} and n_lon >= {})",
                l_max + 1,
                2 * l_max + 1
            )));
        }
        let grid = SphericalGrid::new(n_lat, n_lon)?;
        let len = tri_len(l_max);
        let mut plm = Vec::with_capacity(n_lat);
        let mut dplm = Vec::with_capacity(n_lat);
        for &z in grid.nodes() {
            let mut p = vec![0.0; len];
            let mut d = vec![0.0; len];
            normalized_legendre(l_max, z, &mut p);
            latitude_derivative(l_max, z, &p, &mut d);
            for l in 0..=l_max {
                for m in 1..=l {
                    p[tri_index(l, m)] *= SQRT_2;
                    d[tri_index(l, m)] *= SQRT_2;
                }
            }
            plm.push(p);
            dplm.push(d);
        }
        let mut cos_tab = vec![vec![0.0; n_lon]; l_max + 1];
        let mut sin_tab = vec![vec![0.0; n_lon]; l_max + 1];
        for m in 0..=l_max {
            for j in 0..n_lon {
                let (s, c) = (m as f64 * grid.longitude(j)).sin_cos();
                cos_tab[m][j] = c;
                sin_tab[m][j] = s;
            }
        }
        Ok(Self { l_max, grid, plm, dplm, cos_tab, sin_tab })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn grid(&self) -> &SphericalGrid {
        &self.grid
    }

    /// Whether the grid resolves the projection of a product of two
    /// degree-`l_max` fields onto degree `<= l_max` exactly.
    pub fn resolves_products(&self) -> bool {
        self.grid.n_lat > (3 * self.l_max).div_ceil(2) && self.grid.n_lon > 3 * self.l_max
    }

    fn require_products(&self) -> Result<()> {
        if self.resolves_products() {
            Ok(())
        } else {
            Err(Error::Resolution(format!(
                "grid {} x {} does not de-alias products at l_max = {} (needs n_lat >= {} and n_lon >= {})",
                self.grid.n_lat,
                self.grid.n_lon,
                self.l_max,
                (3 * self.l_max).div_ceil(2) + 1,
                3 * self.l_max + 1
            )))
        }
    }

    fn check_field(&self, f: &SpectralField) -> Result<()> {
        if f.l_max() > self.l_max {
            return Err(Error::Resolution(format!(
                "field of degree {} exceeds transform degree {}",
                f.l_max(),
                self.l_max
            )));
        }
        Ok(())
    }

    fn check_grid_field(&self, v: &GridField) -> Result<()> {
        if v.n_lat != self.grid.n_lat || v.n_lon != self.grid.n_lon {
            return Err(Error::Resolution(format!(
                "grid field {} x {} does not match grid {} x {}",
                v.n_lat, v.n_lon, self.grid.n_lat, self.grid.n_lon
            )));
        }
        Ok(())
    }

    pub fn zeros(&self) -> SpectralField {
        SpectralField::zeros(self.l_max)
    }

    pub fn constant(&self, c: f64) -> SpectralField {
        SpectralField::constant(self.l_max, c)
    }

    /// Pointwise values of `f` on the grid.
    pub fn synthesize(&self, f: &SpectralField) -> Result<GridField> {
        self.check_field(f)?;
        Ok(self.synthesize_with(f, &self.plm))
    }

    fn synthesize_with(&self, f: &SpectralField, table: &[Vec<f64>]) -> GridField {
        let (n_lat, n_lon) = (self.grid.n_lat, self.grid.n_lon);
        let lf = f.l_max();
        let mut out = GridField::zeros(n_lat, n_lon);
        let mut cm = vec![0.0; lf + 1];
        let mut sm = vec![0.0; lf + 1];
        for i in 0..n_lat {
            let p = &table[i];
            for m in 0..=lf {
                let (mut c, mut s) = (0.0, 0.0);
                for l in m..=lf {
                    let pv = p[tri_index(l, m)];
                    c += f.get(l, m as i64) * pv;
                    if m > 0 {
                        s += f.get(l, -(m as i64)) * pv;
                    }
                }
                cm[m] = c;
                sm[m] = s;
            }
            let row = &mut out.values[i * n_lon..(i + 1) * n_lon];
            for (j, v) in row.iter_mut().enumerate() {
                let mut acc = cm[0];
                for m in 1..=lf {
                    acc += cm[m] * self.cos_tab[m][j] + sm[m] * self.sin_tab[m][j];
                }
                *v = acc;
            }
        }
        out
    }

    /// Harmonic coefficients of `v` up to degree `l_max` by quadrature.
    pub fn analyze(&self, v: &GridField, l_max: usize) -> Result<SpectralField> {
        self.check_grid_field(v)?;
        if l_max > self.l_max {
            return Err(Error::Resolution(format!("analysis degree {l_max} exceeds transform degree {}", self.l_max)));
        }
        let (n_lat, n_lon) = (self.grid.n_lat, self.grid.n_lon);
        let mut out = SpectralField::zeros(l_max);
        let dphi = 2.0 * PI / n_lon as f64;
        let mut cm = vec![0.0; l_max + 1];
        let mut sm = vec![0.0; l_max + 1];
        for i in 0..n_lat {
            let row = &v.values[i * n_lon..(i + 1) * n_lon];
            for m in 0..=l_max {
                let (mut c, mut s) = (0.0, 0.0);
                let (ct, st) = (&self.cos_tab[m], &self.sin_tab[m]);
                for j in 0..n_lon {
                    c += row[j] * ct[j];
                    s += row[j] * st[j];
                }
                let w = self.grid.weights[i] * dphi;
                cm[m] = c * w;
                sm[m] = s * w;
            }
            let p = &self.plm[i];
            for l in 0..=l_max {
                for m in 0..=l {
                    let pv = p[tri_index(l, m)];
                    let k = coeff_index(l, m as i64);
                    out.coeffs_mut()[k] += cm[m] * pv;
                    if m > 0 {
                        let k = coeff_index(l, -(m as i64));
                        out.coeffs_mut()[k] += sm[m] * pv;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Evaluates `f` at an arbitrary point of the unit sphere.
    pub fn eval_at(&self, f: &SpectralField, point: [f64; 3]) -> f64 {
        eval_at(f, point)
    }

    /// `\iint f g dsigma` via Parseval.
    pub fn inner_product(&self, f: &SpectralField, g: &SpectralField) -> Result<f64> {
        if f.l_max() != g.l_max() {
            return Err(Error::InvalidArgument(format!(
                "inner product of fields with l_max {} and {}",
                f.l_max(),
                g.l_max()
            )));
        }
        Ok(f.dot(g))
    }

    /// Projection of the pointwise product `f g` onto degree `<= l_max`.
    pub fn product(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.require_products()?;
        let fv = self.synthesize(f)?;
        let gv = self.synthesize(g)?;
        self.analyze(&fv.zip_with(&gv, |a, b| a * b), self.l_max)
    }

    /// Latitude derivative of `f` sampled on the grid.
    pub fn d_latitude_grid(&self, f: &SpectralField) -> Result<GridField> {
        self.check_field(f)?;
        Ok(self.synthesize_with(f, &self.dplm))
    }

    /// Spherical Jacobian `J(f, g) = (d_lon f d_lat g - d_lat f d_lon g) / cos(lat)`,
    /// evaluated pseudospectrally.
    pub fn jacobian(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        self.require_products()?;
        let f_lon = self.synthesize(&f.d_longitude())?;
        let g_lon = self.synthesize(&g.d_longitude())?;
        let f_lat = self.d_latitude_grid(f)?;
        let g_lat = self.d_latitude_grid(g)?;
        let n_lon = self.grid.n_lon;
        let mut out = GridField::zeros(self.grid.n_lat, n_lon);
        for i in 0..self.grid.n_lat {
            let z = self.grid.nodes[i];
            let inv_c = 1.0 / (1.0 - z * z).sqrt();
            for j in 0..n_lon {
                let k = i * n_lon + j;
                out.values[k] = inv_c * (f_lon.values[k] * g_lat.values[k] - f_lat.values[k] * g_lon.values[k]);
            }
        }
        self.analyze(&out, self.l_max)
    }

    /// Stream function of the wave seen in a frame rotating at `omega`:
    /// `psi0(lon + omega t, lat) + omega sin(lat)`.
    pub fn traveling_wave(&self, psi0: &SpectralField, omega: f64, t: f64) -> SpectralField {
        let mut out = psi0.shift_longitude(omega * t);
        if out.l_max() >= 1 {
            let c = out.get(1, 0) + omega * polar_axis_coefficient();
            out.set(1, 0, c);
        }
        out
    }
}

/// Coefficient of `Y_1^0` in the polar coordinate `x_3 = sin(latitude)`.
pub fn polar_axis_coefficient() -> f64 {
    (4.0 * PI / 3.0).sqrt()
}

/// Evaluates `f` at a point of the unit sphere by direct synthesis.
pub fn eval_at(f: &SpectralField, point: [f64; 3]) -> f64 {
    let l_max = f.l_max();
    let mut p = vec![0.0; tri_len(l_max)];
    eval_with_buffer(f, point, &mut p)
}

pub(crate) fn eval_with_buffer(f: &SpectralField, point: [f64; 3], p: &mut [f64]) -> f64 {
    let l_max = f.l_max();
    let [x, y, z] = point;
    normalized_legendre(l_max, z.clamp(-1.0, 1.0), p);
    let lon = y.atan2(x);
    let mut acc = 0.0;
    for m in 0..=l_max {
        let (s, c) = (m as f64 * lon).sin_cos();
        let mut cm = 0.0;
        let mut sm = 0.0;
        for l in m..=l_max {
            let pv = p[tri_index(l, m)];
            cm += f.get(l, m as i64) * pv;
            if m > 0 {
                sm += f.get(l, -(m as i64)) * pv;
            }
        }
        if m == 0 {
            acc += cm;
        } else {
            acc += SQRT_2 * (cm * c + sm * s);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ystar_cartesian([x, y, z]: [f64; 3]) -> f64 {
        (105.0 / (4.0 * PI)).sqrt() * x * y * z
    }

    #[test]
    fn default_grid_is_32_by_64_at_degree_20() {
        let s = Sphere::new(20).unwrap();
        assert_eq!((s.grid().n_lat(), s.grid().n_lon()), (32, 64));
        assert!(s.resolves_products());
    }

    #[test]
    fn undersized_grid_is_a_resolution_error() {
        assert!(matches!(Sphere::with_grid(10, 8, 40), Err(Error::Resolution(_))));
        let s = Sphere::with_grid(10, 11, 21).unwrap();
        let f = s.constant(1.0);
        assert!(matches!(s.product(&f, &f), Err(Error::Resolution(_))));
    }

    #[test]
    fn constant_synthesizes_to_one() {
        let s = Sphere::new(6).unwrap();
        let v = s.synthesize(&s.constant(1.0)).unwrap();
        assert!(v.values().iter().all(|x| (x - 1.0).abs() < 1e-14));
        let zero = s.synthesize(&s.zeros()).unwrap();
        assert!(zero.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn y3_minus2_is_the_cartesian_xyz_harmonic() {
        let s = Sphere::new(8).unwrap();
        let f = SpectralField::harmonic(8, 3, -2);
        let v = s.synthesize(&f).unwrap();
        let want = s.grid().sample(ystar_cartesian);
        for (a, b) in v.values().iter().zip(want.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn analyzing_xyz_gives_only_degree_three() {
        let s = Sphere::new(10).unwrap();
        let v = s.grid().sample(|[x, y, z]| x * y * z);
        let f = s.analyze(&v, 10).unwrap();
        for l in (0..=10).filter(|&l| l != 3) {
            assert!(f.degree_block(l).iter().all(|c| c.abs() < 1e-12), "degree {l}");
        }
        assert!((f.get(3, -2) - (4.0 * PI / 105.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn analyze_constant() {
        let s = Sphere::new(6).unwrap();
        let v = s.grid().sample(|_| 2.5);
        let f = s.analyze(&v, 6).unwrap();
        assert!((f.get(0, 0) - 2.5 * (4.0 * PI).sqrt()).abs() < 1e-13);
        assert!(f.coeffs()[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn harmonics_are_orthonormal_under_quadrature() {
        let s = Sphere::new(7).unwrap();
        for l in 0..=7 {
            for m in -(l as i64)..=l as i64 {
                let v = s.synthesize(&SpectralField::harmonic(7, l, m)).unwrap();
                let sq = s.grid().integrate(&v.map(|x| x * x));
                assert!((sq - 1.0).abs() < 1e-13, "Y_{l}^{m}");
            }
        }
    }

    #[test]
    fn laplacian_eigenvalues() {
        let f = SpectralField::harmonic(8, 4, 1);
        let lf = f.laplacian();
        assert!((lf.get(4, 1) + 20.0).abs() < 1e-15);
        let c = SpectralField::constant(8, 3.0).laplacian();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn energy_of_unit_degree_three_mode() {
        let f = SpectralField::harmonic(6, 3, -2);
        assert!((f.energy() - 6.0).abs() < 1e-14);
        assert!((f.scaled(0.1).energy() - 0.06).abs() < 1e-15);
        assert_eq!(SpectralField::constant(6, 4.0).energy(), 0.0);
    }

    #[test]
    fn traveling_wave_cases() {
        let s = Sphere::new(6).unwrap();
        let mut psi0 = s.zeros();
        psi0.set(3, -2, 1.0);
        psi0.set(4, 3, 0.2);
        assert_eq!(s.traveling_wave(&psi0, 0.0, 3.0), psi0);

        let omega = 0.3;
        let moved = s.traveling_wave(&psi0, omega, 0.0);
        let x3 = s.grid().sample(|p| p[2]);
        let want = &psi0 + &s.analyze(&x3, 6).unwrap().scaled(omega);
        assert!((&moved - &want).max_abs() < 1e-13);
        let e_gain = moved.energy() - psi0.energy();
        assert!((e_gain - 4.0 * PI * omega * omega / 3.0).abs() < 1e-13);

        let full_turn = s.traveling_wave(&psi0, omega, 2.0 * PI / omega);
        assert!((&full_turn - &moved).max_abs() < 1e-12);
    }

    #[test]
    fn traveling_wave_shifts_longitude() {
        let s = Sphere::new(5).unwrap();
        let mut f = s.zeros();
        f.set(3, -2, 1.0);
        f.set(5, 4, -0.4);
        f.set(2, 1, 0.7);
        let (omega, t) = (0.7, 1.3);
        let g = s.traveling_wave(&f, omega, t);
        let lat: f64 = 0.4;
        for lon in [0.1f64, 1.7, 4.0] {
            let p = [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()];
            let lon2 = lon + omega * t;
            let q = [lat.cos() * lon2.cos(), lat.cos() * lon2.sin(), lat.sin()];
            assert!((eval_at(&g, p) - eval_at(&f, q) - omega * lat.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn eval_at_matches_grid_synthesis() {
        let s = Sphere::new(9).unwrap();
        let mut f = s.zeros();
        for (k, c) in f.coeffs_mut().iter_mut().enumerate() {
            *c = ((k * 37 % 11) as f64 - 5.0) / 7.0;
        }
        let v = s.synthesize(&f).unwrap();
        for &(i, j) in &[(0, 0), (3, 7), (14, 29)] {
            assert!((eval_at(&f, s.grid().point(i, j)) - v.get(i, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobian_of_ystar_and_its_laplacian_vanishes() {
        let s = Sphere::new(12).unwrap();
        let y = SpectralField::harmonic(12, 3, -2);
        let j = s.jacobian(&y, &y.laplacian()).unwrap();
        assert!(j.max_abs() < 1e-11);
    }

    #[test]
    fn jacobian_of_polar_axis_is_longitude_derivative() {
        // J(x3, g) = cos(lat) d_lon x3 ... = -d_lon g since d_lat x3 = cos(lat).
        let s = Sphere::new(8).unwrap();
        let x3 = s.analyze(&s.grid().sample(|p| p[2]), 8).unwrap();
        let mut g = s.zeros();
        g.set(4, 2, 1.0);
        g.set(3, -1, 0.5);
        let j = s.jacobian(&x3, &g).unwrap();
        assert!((&j + &g.d_longitude()).max_abs() < 1e-12);
    }
}
