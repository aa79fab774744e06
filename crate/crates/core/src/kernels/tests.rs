use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::rng::{stream, Role};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hard_flat(n: usize) -> GasSpec {
    GasSpec::lebesgue(n, 1.0, RadialPotential::HardEdgeFlat { inner: 0.0 }).unwrap()
}

#[test]
fn hard_flat_single_particle_kernel_at_origin() {
    let k = RadialKernel::from_gas(&hard_flat(1)).unwrap();
    let v = k.eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!((v.re - 1.0 / PI).abs() < 1e-14 && v.im == 0.0);
}

#[test]
fn hard_flat_coefficients() {
    let a = radial_coefficients(&hard_flat(20)).unwrap();
    for (k, la) in a.iter().enumerate() {
        assert!((la.exp() * PI / (k + 1) as f64 - 1.0).abs() < 1e-13);
    }
}

#[test]
fn circle_log_coefficients() {
    let n = 15;
    let spec = GasSpec::lebesgue(n, 1.0, RadialPotential::CircleLog).unwrap();
    for (k, la) in radial_coefficients(&spec).unwrap().iter().enumerate() {
        let exact = ((k + 1) * (n - k)) as f64 / (PI * (n + 1) as f64);
        assert!((la.exp() / exact - 1.0).abs() < 1e-13);
    }
}

#[test]
fn divergent_weight_is_rejected() {
    assert!(GasSpec::lebesgue(10, 0.0, RadialPotential::PowerQ { q: 0.1 })
        .and_then(|s| radial_coefficients(&s))
        .is_err());
}

#[test]
fn bergman_kernels_at_base_points() {
    assert!((bergman_disk(c(0.0, 0.0), c(0.0, 0.0)).unwrap().re - 1.0 / PI).abs() < 1e-15);
    let v = bergman_halfplane(c(-0.5, 0.0), c(-0.5, 0.0)).unwrap();
    assert!((v.re - 1.0 / PI).abs() < 1e-15);
    assert!(bergman_disk(c(1.0, 0.0), c(0.0, 0.0)).is_err());
    assert!(bergman_halfplane(c(0.0, 0.0), c(-1.0, 0.0)).is_err());
    assert!(bergman_disk(c(f64::NAN, 0.0), c(0.0, 0.0)).is_err());
}

#[test]
fn weighted_kernel_vanishes_off_support() {
    let k = RadialKernel::from_gas(&hard_flat(5)).unwrap();
    assert_eq!(k.eval(c(1.5, 0.0), c(0.2, 0.0)).unwrap(), c(0.0, 0.0));
}

#[test]
fn log_series_survives_huge_coefficients() {
    let logs: Vec<f64> = (0..200).map(|k| 700.0 - 4.0 * k as f64).collect();
    let x = c(0.5, 0.5);
    let direct: Complex64 = logs
        .iter()
        .enumerate()
        .map(|(k, l)| (l - 700.0).exp() * x.powu(k as u32))
        .sum();
    let v = log_series(&logs, x) / 700f64.exp();
    assert!((v - direct).norm() < 1e-13 * direct.norm());
}

#[test]
fn gram_matrix_is_positive_semidefinite() {
    let spec = GasSpec::lebesgue(12, 1.0, RadialPotential::CircleLog).unwrap();
    let k = RadialKernel::from_gas(&spec).unwrap();
    let mut rng = stream(7, 0, Role::Test);
    for _ in 0..20 {
        let pts: Vec<Complex64> = (0..8)
            .map(|_| Complex64::from_polar(1.4 * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>()))
            .collect();
        let g = DMatrix::from_fn(8, 8, |i, j| k.eval(pts[i], pts[j]).unwrap());
        for ev in g.symmetric_eigenvalues().iter() {
            assert!(*ev >= -1e-9, "eigenvalue {ev}");
        }
    }
}

#[test]
fn coefficients_sit_between_disk_and_annulus_bounds() {
    let v = RadialPotential::Tabulated {
        radii: vec![0.0, 0.3, 0.5, 1.0],
        values: vec![2.0, 1.0, 0.0, 0.0],
    };
    let big_r: f64 = 0.5;
    for n in [5usize, 20, 60] {
        let a = radial_coefficients(&GasSpec::lebesgue(n, 1.0, v.clone()).unwrap()).unwrap();
        for (k, la) in a.iter().enumerate() {
            let lower = (k + 1) as f64 / PI;
            let upper = lower / (1.0 - big_r.powi(2 * k as i32 + 2));
            let ak = la.exp();
            assert!(ak >= lower * (1.0 - 1e-12) && ak <= upper * (1.0 + 1e-12), "n={n} k={k}: {ak}");
        }
    }
}

#[test]
fn hard_edge_kernel_converges() {
    let err = |n: usize| {
        let k = RadialKernel::from_gas(&hard_flat(n)).unwrap();
        let nf = n as f64;
        let mut worst: f64 = 0.0;
        for (a, b) in [(c(1.0, 0.5), c(0.5, -1.0)), (c(2.0, 0.0), c(-1.5, 1.0)), (c(0.25, 0.0), c(0.75, 0.25))] {
            let lhs = k.eval_series(1.0 - a / nf, 1.0 - b / nf).unwrap() / (nf * nf);
            worst = worst.max((lhs - limit_edge_kernel_hard(a + b.conj()) / PI).norm());
        }
        worst
    };
    let (e1, e2, e3) = (err(100), err(400), err(1600));
    assert!(e2 < e1 && e3 < e2, "{e1} {e2} {e3}");
}

proptest! {
    #[test]
    fn kernel_is_hermitian(zr in -1.2f64..1.2, zi in -1.2f64..1.2, wr in -1.2f64..1.2, wi in -1.2f64..1.2) {
        let spec = GasSpec::lebesgue(9, 1.0, RadialPotential::CircleLog).unwrap();
        let k = RadialKernel::from_gas(&spec).unwrap();
        let (z, w) = (c(zr, zi), c(wr, wi));
        let a = k.eval(z, w).unwrap();
        let b = k.eval(w, z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(1e-300));
    }
}

#[test]
fn tabulated_weight_vanishes_outside_grid() {
    let v = RadialPotential::Tabulated {
        radii: vec![0.0, 0.5, 1.0],
        values: vec![1.0, 0.0, 0.0],
    };
    let k = RadialKernel::from_gas(&GasSpec::lebesgue(4, 1.0, v).unwrap()).unwrap();
    assert_eq!(k.eval(c(1.2, 0.0), c(0.3, 0.0)).unwrap(), c(0.0, 0.0));
    assert!(k.eval(c(0.9, 0.0), c(0.3, 0.0)).unwrap().re > 0.0);
}
