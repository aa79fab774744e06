//! Simultaneous root finding by the Aberth–Ehrlich iteration.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;
const MOVE_TOL: f64 = 1e-14;
/// Largest accepted backward error `|p(z)| / Σ|a_k||z|^k`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Roots of a polynomial with their normalized residuals.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub degree: usize,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Newton correction `p(z)/p'(z)` and backward error
/// `|p(z)| / Σ|a_k||z|^k`. Outside the unit disk the reversed polynomial
/// is evaluated at `1/z`.
fn newton_and_residual(coeffs: &[Complex64], z: Complex64) -> (Complex64, f64) {
    let n = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let r = z.norm();
        let (mut p, mut dp) = (coeffs[n], Complex64::new(0.0, 0.0));
        let mut scale = coeffs[n].norm();
        for a in coeffs[..n].iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
            scale = scale * r + a.norm();
        }
        (p / dp, p.norm() / scale)
    } else {
        // p(z) = zⁿ q(y), y = 1/z, q(y) = Σ a_{n−k} y^k
        let y = z.inv();
        let r = y.norm();
        let (mut q, mut dq) = (coeffs[0], Complex64::new(0.0, 0.0));
        let mut scale = coeffs[0].norm();
        for a in coeffs[1..].iter() {
            dq = dq * y + q;
            q = q * y + a;
            scale = scale * r + a.norm();
        }
        let denom = n as f64 * q - y * dq;
        (z * q / denom, q.norm() / scale)
    }
}

/// All roots of `Σ coeffs[k] z^k`, leading coefficient last.
pub fn find_roots(coeffs: &[Complex64]) -> Result<RootSet> {
    let Some(lead) = coeffs.last() else {
        return Err(Error::InvalidParameter("empty coefficient list".into()));
    };
    if *lead == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("leading coefficient must be nonzero".into()));
    }
    if coeffs.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
        return Err(Error::InvalidParameter("coefficients must be finite".into()));
    }
    let degree = coeffs.len() - 1;
    let zeros_at_origin = coeffs.iter().take_while(|a| a.norm() == 0.0).count();
    let reduced = &coeffs[zeros_at_origin..];
    let m = reduced.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if m > 0 {
        roots.extend(aberth(reduced)?);
    }
    let residuals = roots.iter().map(|&z| newton_and_residual(coeffs, z).1).collect();
    Ok(RootSet {
        roots,
        residuals,
        degree,
    })
}

fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let radius = (coeffs[0].norm() / coeffs[n].norm()).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut active = false;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, _) = newton_and_residual(coeffs, z[i]);
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    sum += (z[i] - zj).inv();
                }
            }
            let step = ratio / (1.0 - ratio * sum);
            if !(step.re.is_finite() && step.im.is_finite()) {
                done[i] = true;
                continue;
            }
            z[i] -= step;
            if step.norm() < MOVE_TOL * (1.0 + z[i].norm()) {
                done[i] = true;
            } else {
                active = true;
            }
        }
        if !active {
            break;
        }
    }
    let worst = z
        .iter()
        .map(|&r| newton_and_residual(coeffs, r).1)
        .fold(0.0, f64::max);
    if !(worst <= RESIDUAL_TOL) {
        return Err(Error::NoConvergence {
            iterations: MAX_ITERATIONS,
            reason: format!("root finder worst residual {worst:e}"),
        });
    }
    Ok(z)
}
