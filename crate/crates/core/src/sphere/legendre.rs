//! Orthonormal associated Legendre functions without the Condon–Shortley phase.
//!
//! `Pbar(l, m, z) = sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(z)` with
//! `z = sin(latitude)`. Values for `0 <= m <= l <= l_max` are stored in a
//! triangular array indexed by [`tri_index`].

use std::f64::consts::PI;

#[inline]
pub fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

#[inline]
pub fn tri_len(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 2) / 2
}

/// Fills `out` with `Pbar(l, m, z)` for all `m <= l <= l_max`.
pub fn normalized_legendre(l_max: usize, z: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= tri_len(l_max));
    let s = (1.0 - z * z).max(0.0).sqrt();
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        out[tri_index(m, m)] = pmm;
        if m == l_max {
            break;
        }
        let mut p_lm2 = pmm;
        let mut p_lm1 = (2.0 * m as f64 + 3.0).sqrt() * z * pmm;
        out[tri_index(m + 1, m)] = p_lm1;
        let mut a_prev = recurrence_a(m + 1, m);
        for l in m + 2..=l_max {
            let a = recurrence_a(l, m);
            let p = a * (z * p_lm1 - p_lm2 / a_prev);
            out[tri_index(l, m)] = p;
            p_lm2 = p_lm1;
            p_lm1 = p;
            a_prev = a;
        }
    }
}

#[inline]
fn recurrence_a(l: usize, m: usize) -> f64 {
    let (l, m) = (l as f64, m as f64);
    ((4.0 * l * l - 1.0) / (l * l - m * m)).sqrt()
}

/// Latitude derivative `d Pbar / d theta` given the values from
/// [`normalized_legendre`] at the same `z`. Requires `|z| < 1`.
pub fn latitude_derivative(l_max: usize, z: f64, values: &[f64], out: &mut [f64]) {
    let c = (1.0 - z * z).sqrt();
    for l in 0..=l_max {
        let lf = l as f64;
        for m in 0..=l {
            let mf = m as f64;
            let mut d = -lf * z * values[tri_index(l, m)];
            if l > m {
                let k = ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt();
                d += k * values[tri_index(l - 1, m)];
            }
            // (1 - z^2) dP/dz = d, and dz/dtheta = cos(theta) = c.
            out[tri_index(l, m)] = d / c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form(l: usize, m: usize, z: f64) -> f64 {
        let s = (1.0 - z * z).sqrt();
        let raw = match (l, m) {
            (0, 0) => 1.0,
            (1, 0) => z,
            (1, 1) => s,
            (2, 0) => 0.5 * (3.0 * z * z - 1.0),
            (2, 1) => 3.0 * z * s,
            (2, 2) => 3.0 * s * s,
            (3, 0) => 0.5 * (5.0 * z * z * z - 3.0 * z),
            (3, 1) => 1.5 * (5.0 * z * z - 1.0) * s,
            (3, 2) => 15.0 * z * s * s,
            (3, 3) => 15.0 * s * s * s,
            _ => unreachable!(),
        };
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * fact(l - m) / fact(l + m)).sqrt();
        norm * raw
    }

    #[test]
    fn matches_closed_forms_up_to_degree_three() {
        let mut buf = vec![0.0; tri_len(3)];
        for &z in &[-0.93, -0.2, 0.0, 0.41, 0.77] {
            normalized_legendre(3, z, &mut buf);
            for l in 0..=3 {
                for m in 0..=l {
                    let want = closed_form(l, m, z);
                    assert!((buf[tri_index(l, m)] - want).abs() < 1e-14, "l={l} m={m} z={z}");
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let l_max = 12;
        let theta: f64 = 0.37;
        let h = 1e-6;
        let mut v = vec![0.0; tri_len(l_max)];
        let mut vp = v.clone();
        let mut vm = v.clone();
        let mut d = v.clone();
        normalized_legendre(l_max, theta.sin(), &mut v);
        normalized_legendre(l_max, (theta + h).sin(), &mut vp);
        normalized_legendre(l_max, (theta - h).sin(), &mut vm);
        latitude_derivative(l_max, theta.sin(), &v, &mut d);
        for i in 0..tri_len(l_max) {
            let fd = (vp[i] - vm[i]) / (2.0 * h);
            assert!((fd - d[i]).abs() < 1e-7 * (1.0 + d[i].abs()), "index {i}");
        }
    }

    #[test]
    fn stable_at_high_degree() {
        let l_max = 60;
        let mut buf = vec![0.0; tri_len(l_max)];
        normalized_legendre(l_max, 0.3, &mut buf);
        assert!(buf.iter().all(|v| v.is_finite() && v.abs() < 10.0));
    }
}
