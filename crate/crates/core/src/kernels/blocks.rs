//! Inner/outer block kernels of background gases and kernels of disjoint
//! unions.

use num_complex::Complex64;

use super::{check_finite, log_series, radial_coefficients};
use crate::error::{Error, Result};
use crate::kostlan::GasSpec;
use crate::potentials::RadialPotential;

/// Block of the joint kernel of `{x : |x| < R} ⊔ {1/x : |x| > R̄}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Block {
    /// Both points inner.
    II,
    /// `z` inner, `w` outer (inverted).
    IO,
    /// `z` outer (inverted), `w` inner.
    OI,
    /// Both points outer (inverted).
    OO,
}

/// Which piece of a disjoint union a point belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    First,
    Second,
}

/// Conjugated block kernels built from `b_k^{(n)}` and
/// `f = e^{−(n+χ)(V(R̄) − ln R̄)}`:
///
/// * `II = Σ b_k z^k w̄^k`
/// * `IO = Σ b_k f z^k w̄^{n−1−k}`, `OI(z, w) = conj(IO(w, z))`
/// * `OO = Σ b_k f² z^{n−1−k} w̄^{n−1−k}`
#[derive(Clone, Debug, PartialEq)]
pub struct InnerOuterKernel {
    log_b: Vec<f64>,
    log_factor: f64,
}

impl InnerOuterKernel {
    /// `outer_radius` is `R̄`, the outer edge of the background measure.
    pub fn new(spec: &GasSpec, outer_radius: f64) -> Result<Self> {
        if !(outer_radius > 0.0) || !outer_radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "outer radius must be positive (got {outer_radius})"
            )));
        }
        let v = spec.potential.eval(outer_radius)?.finite().ok_or_else(|| {
            Error::InvalidParameter("potential must be finite at the outer radius".into())
        })?;
        Ok(InnerOuterKernel {
            log_b: radial_coefficients(spec)?,
            log_factor: -(spec.n as f64 + spec.chi) * (v - outer_radius.ln()),
        })
    }

    /// The `V = max{0, ln r}` gas with `χ = 1`, where `R = R̄ = 1` and `f = 1`.
    pub fn circle_log(n: usize) -> Result<Self> {
        Self::new(&GasSpec::lebesgue(n, 1.0, RadialPotential::CircleLog)?, 1.0)
    }

    pub fn n(&self) -> usize {
        self.log_b.len()
    }

    pub fn log_coefficients(&self) -> &[f64] {
        &self.log_b
    }

    pub fn eval(&self, block: Block, z: Complex64, w: Complex64) -> Result<Complex64> {
        check_finite(z)?;
        check_finite(w)?;
        let n = self.n();
        Ok(match block {
            Block::II => log_series(&self.log_b, z * w.conj()),
            Block::OO => {
                let rev: Vec<f64> = self.log_b.iter().rev().map(|b| b + 2.0 * self.log_factor).collect();
                log_series(&rev, z * w.conj())
            }
            Block::IO => mixed_sum(&self.log_b, self.log_factor, z, w.conj(), |k| (k, n - 1 - k)),
            Block::OI => mixed_sum(&self.log_b, self.log_factor, z, w.conj(), |k| (n - 1 - k, k)),
        })
    }
}

/// `Σ_k exp(log_b[k] + shift) z^{i_k} y^{j_k}` with `(i_k, j_k) = powers(k)`,
/// normalized by the largest term.
fn mixed_sum(
    log_b: &[f64],
    shift: f64,
    z: Complex64,
    y: Complex64,
    powers: impl Fn(usize) -> (usize, usize),
) -> Complex64 {
    let (rz, tz) = z.to_polar();
    let (ry, ty) = y.to_polar();
    let log_pow = |r: f64, e: usize| {
        if e == 0 {
            0.0
        } else if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            e as f64 * r.ln()
        }
    };
    let terms: Vec<(f64, f64)> = log_b
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let (i, j) = powers(k);
            (b + shift + log_pow(rz, i) + log_pow(ry, j), i as f64 * tz + j as f64 * ty)
        })
        .collect();
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Complex64::new(0.0, 0.0);
    }
    let sum: Complex64 = terms
        .iter()
        .map(|&(l, phase)| Complex64::from_polar((l - top).exp(), phase))
        .sum();
    sum * top.exp()
}

/// Kernel of the union of independent processes on disjoint sets:
/// `K₁` on the first piece, `K₂` on the second and `0` across.
pub fn union_kernel<F1, F2>(k1: F1, k2: F2, z: (Complex64, Side), w: (Complex64, Side)) -> Result<Complex64>
where
    F1: Fn(Complex64, Complex64) -> Result<Complex64>,
    F2: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    match (z.1, w.1) {
        (Side::First, Side::First) => k1(z.0, w.0),
        (Side::Second, Side::Second) => k2(z.0, w.0),
        _ => Ok(Complex64::new(0.0, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::bergman_disk;
    use crate::potentials::RadialMeasureSpec;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_log_coefficients_have_closed_form() {
        let n = 30;
        let k = InnerOuterKernel::circle_log(n).unwrap();
        for (j, lb) in k.log_coefficients().iter().enumerate() {
            let exact = ((j + 1) * (n - j)) as f64 / (PI * (n + 1) as f64);
            assert!((lb.exp() / exact - 1.0).abs() < 1e-13, "k={j}");
        }
    }

    #[test]
    fn inner_block_at_origin_tends_to_one_over_pi() {
        for n in [10usize, 100, 1000] {
            let k = InnerOuterKernel::circle_log(n).unwrap();
            let v = k.eval(Block::II, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
            let b0 = n as f64 / (PI * (n + 1) as f64);
            assert!((v.re - b0).abs() < 1e-15);
        }
    }

    #[test]
    fn cross_block_vanishes_at_origin_and_pairs_hermitian() {
        let k = InnerOuterKernel::circle_log(12).unwrap();
        assert_eq!(k.eval(Block::IO, c(0.0, 0.0), c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let (z, w) = (c(0.3, -0.4), c(-0.2, 0.6));
        let io = k.eval(Block::IO, w, z).unwrap();
        let oi = k.eval(Block::OI, z, w).unwrap();
        assert!((oi - io.conj()).norm() < 1e-15);
    }

    #[test]
    fn blocks_match_direct_sums() {
        let n = 9;
        let nu = RadialMeasureSpec::circle(0.8, 0.5).with_atom(1.3, 0.5);
        let spec = GasSpec::lebesgue(n, 1.0, RadialPotential::Background { measure: nu }).unwrap();
        let k = InnerOuterKernel::new(&spec, 1.3).unwrap();
        let b: Vec<f64> = k.log_coefficients().iter().map(|x| x.exp()).collect();
        let f = k.log_factor.exp();
        let (z, w) = (c(0.2, 0.5), c(-0.6, 0.1));
        let wb = w.conj();
        let mut sums = [c(0.0, 0.0); 4];
        for j in 0..n {
            let r = n - 1 - j;
            sums[0] += b[j] * z.powu(j as u32) * wb.powu(j as u32);
            sums[1] += b[j] * f * z.powu(j as u32) * wb.powu(r as u32);
            sums[2] += b[j] * f * z.powu(r as u32) * wb.powu(j as u32);
            sums[3] += b[j] * f * f * z.powu(r as u32) * wb.powu(r as u32);
        }
        for (blk, s) in [Block::II, Block::IO, Block::OI, Block::OO].iter().zip(sums) {
            let v = k.eval(*blk, z, w).unwrap();
            assert!((v - s).norm() < 1e-13 * s.norm().max(1e-300), "{blk:?}");
        }
    }

    #[test]
    fn inner_and_outer_blocks_approach_bergman() {
        let k = InnerOuterKernel::circle_log(2000).unwrap();
        let (z, w) = (c(0.3, 0.1), c(-0.2, 0.25));
        let limit = bergman_disk(z, w).unwrap();
        assert!((k.eval(Block::II, z, w).unwrap() - limit).norm() < 0.01);
        assert!((k.eval(Block::OO, z, w).unwrap() - limit).norm() < 0.01);
    }

    #[test]
    fn cross_block_decays_with_n() {
        let sup = |n: usize| {
            let k = InnerOuterKernel::circle_log(n).unwrap();
            let z = c(0.7, 0.0);
            k.eval(Block::IO, z, z).unwrap().norm()
        };
        assert!(sup(100) < 0.5 * sup(50));
    }

    #[test]
    fn union_kernel_is_block_diagonal() {
        let k1 = |z: Complex64, w: Complex64| bergman_disk(z, w);
        let k2 = |z: Complex64, w: Complex64| Ok(2.0 * bergman_disk(z, w)?);
        let a = (c(0.1, 0.2), Side::First);
        let b = (c(-0.3, 0.1), Side::Second);
        assert_eq!(union_kernel(k1, k2, a, b).unwrap(), c(0.0, 0.0));
        assert_eq!(union_kernel(k1, k2, a, a).unwrap(), bergman_disk(a.0, a.0).unwrap());
        assert_eq!(union_kernel(k1, k2, b, b).unwrap(), 2.0 * bergman_disk(b.0, b.0).unwrap());
    }
}
