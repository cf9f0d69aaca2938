//! The rotation group of the tetrahedron and its invariant subspace `X_T`.
//!
//! The group is realized by the tetrahedron inscribed in the cube
//! `[-1, 1]^3` with a vertex at `(1, 1, 1)`: cyclic permutations of the axes
//! combined with sign flips of an even number of coordinates. With this
//! choice the degree-3 invariant is exactly proportional to `xyz`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sphere::legendre::tri_len;
use crate::sphere::{eval_at, GridField, SpectralField, Sphere};

pub type Rotation = [[f64; 3]; 3];

/// Drop tolerance for Gram–Schmidt rank detection on projected columns.
const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RotationGroup {
    elements: Vec<Rotation>,
}

fn mat_mul(a: &Rotation, b: &Rotation) -> Rotation {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn transpose(a: &Rotation) -> Rotation {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

fn apply(a: &Rotation, p: [f64; 3]) -> [f64; 3] {
    [
        a[0][0] * p[0] + a[0][1] * p[1] + a[0][2] * p[2],
        a[1][0] * p[0] + a[1][1] * p[1] + a[1][2] * p[2],
        a[2][0] * p[0] + a[2][1] * p[1] + a[2][2] * p[2],
    ]
}

fn close(a: &Rotation, b: &Rotation, tol: f64) -> bool {
    (0..3).all(|i| (0..3).all(|j| (a[i][j] - b[i][j]).abs() <= tol))
}

pub fn trace(a: &Rotation) -> f64 {
    a[0][0] + a[1][1] + a[2][2]
}

pub fn determinant(a: &Rotation) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

impl RotationGroup {
    /// The 12 orientation-preserving symmetries of the cube-inscribed tetrahedron.
    pub fn tetrahedral() -> Self {
        let perms: [[usize; 3]; 3] = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
        let signs: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
        let mut elements = Vec::with_capacity(12);
        for p in &perms {
            for s in &signs {
                let mut r = [[0.0; 3]; 3];
                for i in 0..3 {
                    r[i][p[i]] = s[i];
                }
                elements.push(r);
            }
        }
        Self { elements }
    }

    pub fn elements(&self) -> &[Rotation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, r: &Rotation) -> bool {
        self.elements.iter().any(|g| close(g, r, 1e-12))
    }

    /// Every product and every inverse stays in the group.
    pub fn is_closed(&self) -> bool {
        self.elements
            .iter()
            .all(|a| self.contains(&transpose(a)) && self.elements.iter().all(|b| self.contains(&mat_mul(a, b))))
    }

    /// `f(g^{-1} x)`: the field rotated by `g`.
    pub fn act(&self, g: &Rotation, f: &SpectralField, point: [f64; 3]) -> f64 {
        eval_at(f, apply(&transpose(g), point))
    }
}

/// Group average `(1/|G|) sum_g f(g^{-1} x)`, computed by sampling `f` at the
/// rotated grid nodes and re-analyzing. Exact for band-limited `f`.
pub fn project(sphere: &Sphere, group: &RotationGroup, f: &SpectralField) -> Result<SpectralField> {
    if f.l_max() > sphere.l_max() {
        return Err(Error::Resolution(format!(
            "field of degree {} exceeds transform degree {}",
            f.l_max(),
            sphere.l_max()
        )));
    }
    let grid = sphere.grid();
    let inverses: Vec<Rotation> = group.elements().iter().map(transpose).collect();
    let mut buf = vec![0.0; tri_len(f.l_max())];
    let mut v = GridField::zeros(grid.n_lat(), grid.n_lon());
    let scale = 1.0 / group.order() as f64;
    for i in 0..grid.n_lat() {
        for j in 0..grid.n_lon() {
            let x = grid.point(i, j);
            let s: f64 = inverses.iter().map(|gi| crate::sphere::eval_with_buffer(f, apply(gi, x), &mut buf)).sum();
            v.values_mut()[i * grid.n_lon() + j] = s * scale;
        }
    }
    sphere.analyze(&v, f.l_max())
}

/// Multiplicity of the trivial representation of `T` in the degree-`l`
/// harmonics, from the character formula.
pub fn invariant_dimension(l: usize) -> usize {
    let chi = |alpha: f64| {
        if alpha == 0.0 {
            (2 * l + 1) as f64
        } else {
            ((l as f64 + 0.5) * alpha).sin() / (0.5 * alpha).sin()
        }
    };
    let total = chi(0.0) + 8.0 * chi(2.0 * PI / 3.0) + 3.0 * chi(PI);
    (total / 12.0).round() as usize
}

/// The unit-norm degree-3 invariant `Y* = sqrt(105 / 4 pi) xyz`.
///
/// In the real basis this is the single harmonic `Y_3^{-2}`, positive where
/// `x = y = z > 0`.
pub fn y_star(l_max: usize) -> Result<SpectralField> {
    if l_max < 3 {
        return Err(Error::Resolution(format!("Y* needs l_max >= 3, got {l_max}")));
    }
    Ok(SpectralField::harmonic(l_max, 3, -2))
}

/// Group-averaging operator restricted to each degree block.
#[derive(Debug, Clone)]
pub struct Projector {
    l_max: usize,
    /// Row-major `(2l+1) x (2l+1)` block per degree, ordered `m = -l..=l`.
    blocks: Vec<Vec<f64>>,
}

impl Projector {
    /// Builds the block matrices by projecting every standard harmonic.
    pub fn new(sphere: &Sphere, group: &RotationGroup) -> Result<Self> {
        let l_max = sphere.l_max();
        let grid = sphere.grid();
        let n_nodes = grid.n_lat() * grid.n_lon();
        let n_coeffs = (l_max + 1) * (l_max + 1);
        // Averaged samples of every standard harmonic, one grid per coefficient.
        let mut averaged = vec![GridField::zeros(grid.n_lat(), grid.n_lon()); n_coeffs];
        let inverses: Vec<Rotation> = group.elements().iter().map(transpose).collect();
        let scale = 1.0 / group.order() as f64;
        let mut values = vec![0.0; n_coeffs];
        let mut buf = vec![0.0; tri_len(l_max)];
        for k in 0..n_nodes {
            let x = grid.point(k / grid.n_lon(), k % grid.n_lon());
            for gi in &inverses {
                all_harmonics_at(l_max, apply(gi, x), &mut buf, &mut values);
                for (c, v) in values.iter().enumerate() {
                    averaged[c].values_mut()[k] += v * scale;
                }
            }
        }
        let mut blocks = Vec::with_capacity(l_max + 1);
        for l in 0..=l_max {
            let n = 2 * l + 1;
            let mut block = vec![0.0; n * n];
            for col in 0..n {
                let coeffs = sphere.analyze(&averaged[l * l + col], l)?;
                for (row, v) in coeffs.degree_block(l).iter().enumerate() {
                    block[row * n + col] = *v;
                }
            }
            blocks.push(block);
        }
        Ok(Self { l_max, blocks })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn block(&self, l: usize) -> &[f64] {
        &self.blocks[l]
    }

    /// Applies the projector block by block.
    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(f.l_max());
        for l in 0..=f.l_max().min(self.l_max) {
            let n = 2 * l + 1;
            let src = f.degree_block(l).to_vec();
            let dst = out.degree_block_mut(l);
            for r in 0..n {
                dst[r] = (0..n).map(|c| self.blocks[l][r * n + c] * src[c]).sum();
            }
        }
        out
    }

    /// Orthonormal basis of the range of the degree-`l` block, by modified
    /// Gram–Schmidt on its columns.
    pub fn range_basis(&self, l: usize) -> Vec<Vec<f64>> {
        let n = 2 * l + 1;
        let block = &self.blocks[l];
        let mut q: Vec<Vec<f64>> = Vec::new();
        for col in 0..n {
            let mut v: Vec<f64> = (0..n).map(|r| block[r * n + col]).collect();
            for _ in 0..2 {
                for b in &q {
                    let d: f64 = b.iter().zip(&v).map(|(a, c)| a * c).sum();
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > RANK_TOL {
                v.iter_mut().for_each(|x| *x /= norm);
                q.push(v);
            }
        }
        for v in &mut q {
            let lead = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() + 1e-12 { x } else { m });
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        q
    }

    pub fn rank(&self, l: usize) -> usize {
        self.range_basis(l).len()
    }
}

/// Values of every real harmonic of degree `<= l_max` at `point`, in coefficient order.
fn all_harmonics_at(l_max: usize, point: [f64; 3], buf: &mut [f64], out: &mut [f64]) {
    use crate::sphere::coeff_index;
    use crate::sphere::legendre::{normalized_legendre, tri_index};
    let [x, y, z] = point;
    normalized_legendre(l_max, z.clamp(-1.0, 1.0), buf);
    let lon = y.atan2(x);
    for m in 0..=l_max {
        let (s, c) = (m as f64 * lon).sin_cos();
        for l in m..=l_max {
            let p = buf[tri_index(l, m)];
            if m == 0 {
                out[coeff_index(l, 0)] = p;
            } else {
                out[coeff_index(l, m as i64)] = std::f64::consts::SQRT_2 * p * c;
                out[coeff_index(l, -(m as i64))] = std::f64::consts::SQRT_2 * p * s;
            }
        }
    }
}

/// Orthonormal basis of `X_T` up to `l_max`, grouped by degree.
#[derive(Debug, Clone)]
pub struct InvariantBasis {
    l_max: usize,
    zero_mean: bool,
    vectors: Vec<SpectralField>,
    degrees: Vec<usize>,
}

impl InvariantBasis {
    pub fn new(projector: &Projector, zero_mean: bool) -> Result<Self> {
        let l_max = projector.l_max();
        if l_max < 3 {
            return Err(Error::InvalidArgument(format!("invariant basis needs l_max >= 3, got {l_max}")));
        }
        let mut vectors = Vec::new();
        let mut degrees = Vec::new();
        for l in usize::from(zero_mean)..=l_max {
            for q in projector.range_basis(l) {
                let mut f = SpectralField::zeros(l_max);
                f.degree_block_mut(l).copy_from_slice(&q);
                vectors.push(f);
                degrees.push(l);
            }
        }
        Ok(Self { l_max, zero_mean, vectors, degrees })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn is_zero_mean(&self) -> bool {
        self.zero_mean
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[SpectralField] {
        &self.vectors
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Field with the given coordinates in this basis.
    pub fn combine(&self, coords: &[f64]) -> SpectralField {
        let mut f = SpectralField::zeros(self.l_max);
        for (c, v) in coords.iter().zip(&self.vectors) {
            f.axpy(*c, v);
        }
        f
    }

    /// Coordinates of `f` in this basis.
    pub fn coordinates(&self, f: &SpectralField) -> Vec<f64> {
        self.vectors.iter().map(|v| v.dot(f)).collect()
    }
}

/// Convenience: projector and basis for a sphere context.
pub fn invariant_basis(sphere: &Sphere, zero_mean: bool) -> Result<InvariantBasis> {
    let projector = Projector::new(sphere, &RotationGroup::tetrahedral())?;
    InvariantBasis::new(&projector, zero_mean)
}
