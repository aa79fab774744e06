//! Reproducing kernels of radial gases and their limits.

mod blocks;
mod edge;
mod limit;
mod nonradial;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kostlan::{GasSampler, GasSpec};
use crate::potentials::{RadialPotential, Reference};

pub use blocks::{union_kernel, Block, InnerOuterKernel, Side};
pub use edge::{
    edge_bergman_conjugated, first_intensity_limit_hard, gaf_covariance, gaf_covariance_finite,
    gaf_intensity, limit_edge_kernel_e, limit_edge_kernel_hard, poly_exp_integral,
};
pub use limit::{eval_limit_kernel, LimitKernelSpec, LimitKernelValue};
pub use nonradial::{DiskBump, NonRadialKernel, NonRadialOptions, PlanarWeight, RadialPlanar, RayPiece};

pub(crate) fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("kernel evaluated at non-finite point {z}")))
    }
}

/// `ln a_k^{(n)}` for `k < n`, where
/// `1/a_k^{(n)} = 2π ∫₀^∞ r^{2k+1+e} e^{-2(n+χ)V(r)} dr`.
pub fn radial_coefficients(spec: &GasSpec) -> Result<Vec<f64>> {
    let sampler = GasSampler::new(spec.clone())?;
    let log_2pi = (2.0 * PI).ln();
    Ok(sampler
        .components()
        .iter()
        .map(|law| -log_2pi - law.log_normalizer())
        .collect())
}

/// Radial weight `e^{-factor·V(|z|)}` multiplying each kernel argument.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelWeight {
    Unit,
    Potential { potential: RadialPotential, factor: f64 },
}

impl KernelWeight {
    /// `ln weight(z)`; `-∞` where `V = ∞`.
    pub fn log_value(&self, z: Complex64) -> Result<f64> {
        match self {
            KernelWeight::Unit => Ok(0.0),
            KernelWeight::Potential { potential, factor } => {
                let r = z.norm();
                let (lo, hi) = potential.support();
                if r < lo || r > hi {
                    return Ok(f64::NEG_INFINITY);
                }
                let v = potential.eval(r)?;
                Ok(match v.finite() {
                    Some(v) => -factor * v,
                    None => f64::NEG_INFINITY,
                })
            }
        }
    }
}

/// `K(z,w) = Σ a_k z^k w̄^k · weight(z) weight(w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialKernel {
    pub log_coeffs: Vec<f64>,
    pub weight: KernelWeight,
    pub reference: Reference,
}

impl RadialKernel {
    pub fn new(log_coeffs: Vec<f64>, weight: KernelWeight, reference: Reference) -> Result<Self> {
        if log_coeffs.is_empty() {
            return Err(Error::InvalidParameter("kernel needs at least one coefficient".into()));
        }
        if log_coeffs.iter().any(|c| c.is_nan() || *c == f64::INFINITY) {
            return Err(Error::InvalidParameter("kernel coefficients must be finite".into()));
        }
        Ok(RadialKernel {
            log_coeffs,
            weight,
            reference,
        })
    }

    /// Finite-`n` kernel of a gas with weight `e^{-(n+χ)V}`.
    pub fn from_gas(spec: &GasSpec) -> Result<Self> {
        let weight = KernelWeight::Potential {
            potential: spec.potential.clone(),
            factor: spec.n as f64 + spec.chi,
        };
        Self::new(radial_coefficients(spec)?, weight, spec.reference)
    }

    /// Unweighted kernel with `a_k = exp(log_coeffs[k])`.
    pub fn unweighted(log_coeffs: Vec<f64>) -> Result<Self> {
        Self::new(log_coeffs, KernelWeight::Unit, Reference::Lebesgue)
    }

    pub fn len(&self) -> usize {
        self.log_coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_coeffs.is_empty()
    }

    /// `Σ a_k (z w̄)^k`, scaled by the largest term so that no partial sum
    /// overflows.
    pub fn eval_series(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        check_finite(z)?;
        check_finite(w)?;
        Ok(log_series(&self.log_coeffs, z * w.conj()))
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let lw = self.weight.log_value(z)? + self.weight.log_value(w)?;
        if lw == f64::NEG_INFINITY {
            check_finite(z)?;
            check_finite(w)?;
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.eval_series(z, w)? * lw.exp())
    }
}

/// `Σ_k exp(log_coeffs[k]) x^k` by Horner's rule on the unit-modulus
/// variable `x/|x|` with magnitudes normalized by the largest term.
pub(crate) fn log_series(log_coeffs: &[f64], x: Complex64) -> Complex64 {
    let rho = x.norm();
    if rho == 0.0 {
        return Complex64::new(log_coeffs[0].exp(), 0.0);
    }
    let lr = rho.ln();
    let top = log_coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c + k as f64 * lr)
        .fold(f64::NEG_INFINITY, f64::max);
    let u = x / rho;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in log_coeffs.iter().enumerate().rev() {
        acc = acc * u + (c + k as f64 * lr - top).exp();
    }
    acc * top.exp()
}

/// `1/(π(1 − z w̄)²)` on the unit disk.
pub fn bergman_disk(z: Complex64, w: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    check_finite(w)?;
    if z.norm() >= 1.0 || w.norm() >= 1.0 {
        return Err(Error::Domain("Bergman disk kernel needs |z|, |w| < 1".into()));
    }
    let d = Complex64::new(1.0, 0.0) - z * w.conj();
    Ok(1.0 / (PI * d * d))
}

/// `1/(π(z + w̄)²)` on the left half-plane.
pub fn bergman_halfplane(z: Complex64, w: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    check_finite(w)?;
    if z.re >= 0.0 || w.re >= 0.0 {
        return Err(Error::Domain("half-plane Bergman kernel needs Re z, Re w < 0".into()));
    }
    let s = z + w.conj();
    Ok(1.0 / (PI * s * s))
}

#[cfg(test)]
mod tests;
