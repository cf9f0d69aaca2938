//! Dense symmetric eigensolver by cyclic Jacobi rotations.

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub n: usize,
    /// Unsorted eigenvalues.
    pub values: Vec<f64>,
    /// Row-major; column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }
}

/// Off-diagonal Frobenius norm at which the sweeps stop, relative to the full norm.
pub const JACOBI_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Diagonalizes the row-major symmetric `n x n` matrix `a`.
///
/// The input is symmetrized first. Sweeps continue
/// until the off-diagonal norm falls below `JACOBI_TOL` times the matrix norm
/// (or an absolute floor for the zero matrix).
pub fn symmetric_eigen(a: &[f64], n: usize) -> SymmetricEigen {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut m: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            0.5 * (a[i * n + j] + a[j * n + i])
        })
        .collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOL * total.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m[i * n + i]).collect();
    SymmetricEigen { n, values, vectors: v }
}

/// `||A - A^T||_F / ||A||_F`.
pub fn relative_asymmetry(a: &[f64], n: usize) -> f64 {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = a[i * n + j] - a[j * n + i];
            diff += d * d;
            norm += a[i * n + j] * a[i * n + j];
        }
    }
    if norm == 0.0 {
        0.0
    } else {
        (diff / norm).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn matvec(a: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
        (0..n).map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum()).collect()
    }

    #[test]
    fn two_by_two() {
        let e = symmetric_eigen(&[2.0, 1.0, 1.0, 2.0], 2);
        let mut vals = e.values.clone();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_is_untouched() {
        let e = symmetric_eigen(&[-3.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0], 3);
        assert_eq!(e.values, vec![-3.0, 5.0, 0.0]);
    }

    proptest! {
        #[test]
        fn residuals_and_orthogonality(entries in proptest::collection::vec(-2.0f64..2.0, 36)) {
            let n = 6;
            let a: Vec<f64> = (0..n * n).map(|k| {
                let (i, j) = (k / n, k % n);
                entries[i.min(j) * n + i.max(j)]
            }).collect();
            let e = symmetric_eigen(&a, n);
            for k in 0..n {
                let v = e.vector(k);
                let av = matvec(&a, n, &v);
                for i in 0..n {
                    prop_assert!((av[i] - e.values[k] * v[i]).abs() < 1e-10);
                }
                for l in 0..n {
                    let d: f64 = v.iter().zip(e.vector(l)).map(|(x, y)| x * y).sum();
                    let want = if k == l { 1.0 } else { 0.0 };
                    prop_assert!((d - want).abs() < 1e-12);
                }
            }
            let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
            prop_assert!((e.values.iter().sum::<f64>() - trace).abs() < 1e-11);
        }
    }
}
