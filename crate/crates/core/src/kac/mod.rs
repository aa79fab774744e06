//! Kac random polynomials `Σ a_k z^k` and their zeros.

mod roots;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{open_unit, stream, Role};

pub use roots::{find_roots, RootSet, RESIDUAL_TOL};

/// Roots this close to the unit circle are tallied separately.
pub const BOUNDARY_TOL: f64 = 1e-14;

/// Laws of i.i.d. coefficients with `E a = 0`, `E a² = 0`, `E|a|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientLaw {
    /// `(X + iY)/√2` with independent standard normals.
    ComplexGaussian,
    /// Uniform on the disk of radius `√2`.
    UniformDiskNormalized,
    /// `(±1 ± i)/√2` with independent fair signs.
    ComplexRademacher,
}

impl CoefficientLaw {
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Complex64 {
        match self {
            CoefficientLaw::ComplexGaussian => {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
            }
            CoefficientLaw::UniformDiskNormalized => {
                let r = (2.0 * open_unit(rng)).sqrt();
                Complex64::from_polar(r, 2.0 * std::f64::consts::PI * open_unit(rng))
            }
            CoefficientLaw::ComplexRademacher => {
                let s = |b: bool| if b { 1.0 } else { -1.0 };
                Complex64::new(s(rng.gen()), s(rng.gen())) * std::f64::consts::FRAC_1_SQRT_2
            }
        }
    }
}

/// `n + 1` i.i.d. coefficients `a_0, …, a_n`.
pub fn sample_polynomial<R: Rng + ?Sized>(n: usize, law: CoefficientLaw, rng: &mut R) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("Kac polynomial needs degree n >= 1".into()));
    }
    Ok((0..=n).map(|_| law.sample(rng)).collect())
}

/// Roots of the degree-`n` polynomial drawn for `(seed, replica)`.
pub fn sample_roots(n: usize, law: CoefficientLaw, seed: u64, replica: u64) -> Result<RootSet> {
    let mut rng = stream(seed, replica, Role::Coefficients);
    find_roots(&sample_polynomial(n, law, &mut rng)?)
}

/// Zeros inside the unit disk and inverted zeros outside it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InnerOuter {
    pub inner: Vec<Complex64>,
    /// `1/z` for the zeros with `|z| > 1`.
    pub outer: Vec<Complex64>,
    /// Zeros within [`BOUNDARY_TOL`] of the unit circle, already assigned
    /// by the sign of `|z| − 1`.
    pub boundary: usize,
}

pub fn split_inner_outer(roots: &[Complex64]) -> InnerOuter {
    let mut out = InnerOuter::default();
    for &z in roots {
        let r = z.norm();
        if (r - 1.0).abs() < BOUNDARY_TOL {
            out.boundary += 1;
        }
        if r <= 1.0 {
            out.inner.push(z);
        } else {
            out.outer.push(z.inv());
        }
    }
    out
}

/// `n(z − 1)` for every root.
pub fn rescale_near_one(roots: &[Complex64], n: usize) -> Vec<Complex64> {
    roots.iter().map(|z| n as f64 * (z - 1.0)).collect()
}

/// Points with `|z − center| < radius`.
pub fn count_in_disk(points: &[Complex64], center: Complex64, radius: f64) -> usize {
    points.iter().filter(|z| (**z - center).norm() < radius).count()
}
