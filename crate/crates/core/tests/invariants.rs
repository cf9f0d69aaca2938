use std::f64::consts::PI;

use proptest::prelude::*;
use tetrastab::bifurcation::{apply_l0, expand, PseudoInverse};
use tetrastab::models::ProfileModel;
use tetrastab::space::TetraSpace;
use tetrastab::sphere::{gauss_legendre, SpectralField, Sphere, SphericalGrid};
use tetrastab::symmetry::{project, RotationGroup};

const L: usize = 10;

fn field(l_max: usize) -> impl Strategy<Value = SpectralField> {
    proptest::collection::vec(-1.0f64..1.0, (l_max + 1) * (l_max + 1))
        .prop_map(move |c| SpectralField::from_coeffs(l_max, c).unwrap())
}

fn odd_double_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (2 * k - 1) as f64).product()
}

fn moment(a: u32, b: u32, c: u32) -> f64 {
    4.0 * PI * odd_double_factorial(a) * odd_double_factorial(b) * odd_double_factorial(c)
        / odd_double_factorial(a + b + c + 1)
}

#[test]
fn gauss_rule_integrates_sextic_moment() {
    let (nodes, _) = gauss_legendre(24).unwrap();
    assert_eq!(nodes.len(), 24);
    let grid = SphericalGrid::new(24, 48).unwrap();
    let v = grid.integrate(&grid.sample(|[x, y, z]| (x * y * z).powi(4)));
    assert!((v - 4.0 * PI * 27.0 / 135135.0).abs() < 1e-15);
}

#[test]
fn monomial_moments_match_double_factorials() {
    let s = Sphere::new(L).unwrap();
    let grid = s.grid();
    for a in 0..=4u32 {
        for b in 0..=(L as u32 - a).min(4) {
            for c in 0..=(L as u32 - a - b).min(3) {
                let v = grid.integrate(
                    &grid.sample(|[x, y, z]| x.powi(2 * a as i32) * y.powi(2 * b as i32) * z.powi(2 * c as i32)),
                );
                assert!((v - moment(a, b, c)).abs() < 1e-12, "{a} {b} {c}");
            }
        }
    }
}

#[test]
fn traveling_wave_energy_adds_polar_mode() {
    let s = Sphere::new(8).unwrap();
    let sp = TetraSpace::from_sphere(s.clone()).unwrap();
    let psi0 = sp.y_star().scaled(0.3);
    let w = s.traveling_wave(&psi0, 0.7, 0.0);
    // x3 has squared norm 4 pi / 3 and Laplacian eigenvalue -2
    assert!((w.energy() - psi0.energy() - 0.49 * 4.0 * PI / 3.0).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip(f in field(L)) {
        let s = Sphere::new(L).unwrap();
        let g = s.analyze(&s.synthesize(&f).unwrap(), L).unwrap();
        prop_assert!((&g - &f).max_abs() <= 1e-12);
    }

    #[test]
    fn green_identity_and_divergence(f in field(L), g in field(L)) {
        prop_assert!((f.dot(&g.laplacian()) - f.laplacian().dot(&g)).abs() < 1e-11 * (1.0 + f.norm() * g.norm()));
        prop_assert_eq!(f.laplacian().get(0, 0), 0.0);
    }

    #[test]
    fn parseval(f in field(L), g in field(L)) {
        let s = Sphere::new(L).unwrap();
        let grid = s.grid();
        let prod = s.synthesize(&f).unwrap().zip_with(&s.synthesize(&g).unwrap(), |a, b| a * b);
        prop_assert!((grid.integrate(&prod) - f.dot(&g)).abs() < 1e-11);
    }

    #[test]
    fn jacobian_is_antisymmetric(f in field(6), g in field(6)) {
        let s = Sphere::new(6).unwrap();
        let fg = s.jacobian(&f, &g).unwrap();
        let gf = s.jacobian(&g, &f).unwrap();
        prop_assert!((&fg + &gf).max_abs() < 1e-11);
        prop_assert!(s.jacobian(&f, &f).unwrap().max_abs() < 1e-11);
    }

    #[test]
    fn projector_is_an_orthogonal_projection(f in field(8), g in field(8)) {
        let s = Sphere::new(8).unwrap();
        let grp = RotationGroup::tetrahedral();
        let pf = project(&s, &grp, &f).unwrap();
        let ppf = project(&s, &grp, &pf).unwrap();
        prop_assert!((&ppf - &pf).max_abs() < 1e-11);
        let pg = project(&s, &grp, &g).unwrap();
        prop_assert!((pf.dot(&g) - f.dot(&pg)).abs() < 1e-11);
        prop_assert!(pf.degree_block(1).iter().chain(pf.degree_block(2)).all(|v| v.abs() < 1e-11));
    }

    #[test]
    fn pseudo_inverse_solves_on_complement(c in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let sp = TetraSpace::new(L).unwrap();
        let basis = sp.basis();
        let mut coords: Vec<f64> = c.into_iter().cycle().take(basis.len()).collect();
        coords[0] = 0.0; // the Y* direction
        let f = basis.combine(&coords);
        let u = PseudoInverse::new(L).unwrap().apply(&f).unwrap();
        prop_assert!((&apply_l0(&u) - &f).max_abs() < 1e-11);
        prop_assert!(u.dot(sp.y_star()).abs() < 1e-14);
    }

    #[test]
    fn branch_parameter_is_even(e in 0.0f64..0.5) {
        let s = Sphere::new(8).unwrap();
        let b = expand(&s, &ProfileModel::Exponential).unwrap();
        let (lp, pp) = b.branch(e).unwrap();
        let (lm, pm) = b.branch(-e).unwrap();
        prop_assert_eq!(lp, lm);
        prop_assert!((pp.dot(&b.y_star) + pm.dot(&b.y_star)).abs() < 1e-15);
    }
}
