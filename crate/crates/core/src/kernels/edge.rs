//! Edge kernels built from `∫ (quadratic) · e^{st} dt`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::check_finite;
use crate::error::{Error, Result};

/// `∫_a^b (c₀ + c₁t + c₂t²) e^{st + shift} dt`.
///
/// Closed form by integration by parts, or the Taylor series of `e^{st}`
/// about `a` when `|s|(b − a) < 1`, where the closed form cancels.
pub fn poly_exp_integral(c: [f64; 3], a: f64, b: f64, s: Complex64, shift: f64) -> Complex64 {
    let len = b - a;
    if len == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let p = |t: f64| c[0] + t * (c[1] + t * c[2]);
    let dp = |t: f64| c[1] + 2.0 * c[2] * t;
    if s.norm() * len.abs() < 1.0 {
        let d = [p(a), dp(a), c[2]];
        let mut sum = Complex64::new(0.0, 0.0);
        let mut coef = Complex64::new(1.0, 0.0);
        let mut lp = len;
        for m in 0..80 {
            let mf = m as f64;
            let moment = lp * (d[0] / (mf + 1.0) + len * (d[1] / (mf + 2.0) + len * d[2] / (mf + 3.0)));
            let term = coef * moment;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
            coef *= s / (mf + 1.0);
            lp *= len;
        }
        return (s * a + shift).exp() * sum;
    }
    let ddp = 2.0 * c[2];
    let s2 = s * s;
    let f = |t: f64| (s * t + shift).exp() * (p(t) / s - dp(t) / s2 + ddp / (s2 * s));
    f(b) - f(a)
}

/// `∫₀¹ t e^{-st} dt = −e^{−s}/s + (1 − e^{−s})/s²`, the hard-edge limit
/// of `(π/n²) K_n(1 − α/n, 1 − β/n)` at `s = α + β̄`.
pub fn limit_edge_kernel_hard(s: Complex64) -> Complex64 {
    poly_exp_integral([0.0, 1.0, 0.0], 0.0, 1.0, -s, 0.0)
}

/// Limiting first intensity of `n(1 − |x|)` at the hard edge.
pub fn first_intensity_limit_hard(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("first intensity needs r >= 0 (got {r})")));
    }
    if r == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(limit_edge_kernel_hard(Complex64::new(2.0 * r, 0.0)).re / PI)
}

fn check_edge_params(q: f64, big_q: f64) -> Result<()> {
    if !(q >= 0.0 && q < big_q && q < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "edge kernel needs 0 <= q < Q and q < 1 (got q = {q}, Q = {big_q})"
        )));
    }
    Ok(())
}

fn edge_profile(q: f64, big_q: f64) -> [f64; 3] {
    if big_q.is_infinite() {
        [-q, 1.0, 0.0]
    } else {
        let d = big_q - q;
        [-big_q * q / d, (big_q + q) / d, -1.0 / d]
    }
}

fn edge_exponent(q: f64, big_q: f64, x: f64) -> f64 {
    if x >= 0.0 {
        if x == 0.0 {
            0.0
        } else {
            big_q * x
        }
    } else {
        q * x
    }
}

/// `(e^{−P(α)} e^{−P(β̄)}/π) ∫_q^{Q∧1} ((Q − t)(t − q)/(Q − q)) e^{(α+β̄)t} dt`
/// with `P(x) = Q·Re x` for `Re x ≥ 0` and `q·Re x` otherwise. `Q = ∞`
/// is the hard-edge limit of the profile.
pub fn limit_edge_kernel_e(q: f64, big_q: f64, alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    check_edge_params(q, big_q)?;
    check_finite(alpha)?;
    check_finite(beta)?;
    let shift = -edge_exponent(q, big_q, alpha.re) - edge_exponent(q, big_q, beta.re);
    if shift == f64::NEG_INFINITY {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let upper = big_q.min(1.0);
    let s = alpha + beta.conj();
    Ok(poly_exp_integral(edge_profile(q, big_q), q, upper, s, shift) / PI)
}

/// `e^{−iq Im(nz)} n² K_E(nz, nw) e^{iq Im(nw)}
/// = (1/π) ∫₀^{n(Q∧1 − q)} (1 − u/(n(Q − q))) u e^{(z+w̄)u} du`
/// on the left half-plane.
pub fn edge_bergman_conjugated(q: f64, big_q: f64, n: f64, z: Complex64, w: Complex64) -> Result<Complex64> {
    check_edge_params(q, big_q)?;
    check_finite(z)?;
    check_finite(w)?;
    if !(z.re < 0.0 && w.re < 0.0) {
        return Err(Error::Domain("edge rescaling needs Re z, Re w < 0".into()));
    }
    if !(n > 0.0) {
        return Err(Error::InvalidParameter(format!("scale n must be positive (got {n})")));
    }
    let c2 = if big_q.is_infinite() {
        0.0
    } else {
        -1.0 / (n * (big_q - q))
    };
    let upper = n * (big_q.min(1.0) - q);
    Ok(poly_exp_integral([0.0, 1.0, c2], 0.0, upper, z + w.conj(), 0.0) / PI)
}

/// `(e^{z+w̄} − 1)/(z + w̄)`, equal to 1 on `z + w̄ = 0`.
pub fn gaf_covariance(z: Complex64, w: Complex64) -> Complex64 {
    poly_exp_integral([1.0, 0.0, 0.0], 0.0, 1.0, z + w.conj(), 0.0)
}

/// `(1/n) Σ_{k=0}^n (1 + z/n)^k (1 + w̄/n)^k`, the covariance of a
/// Kac polynomial of degree `n` at `1 + z/n`, `1 + w/n`.
pub fn gaf_covariance_finite(n: usize, z: Complex64, w: Complex64) -> Complex64 {
    let nf = n as f64;
    let x = (1.0 + z / nf) * (1.0 + w.conj() / nf);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        acc = acc * x + 1.0;
    }
    acc / nf
}

/// `B_{2m}` for `m = 1..=10`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Second derivative of `s ↦ ln((e^s − 1)/s)`, i.e.
/// `1/s² − 1/(4 sinh²(s/2))`.
fn log_cov_second_derivative(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let s2 = s * s;
        let mut fact = 2.0;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for (i, b) in BERNOULLI.iter().enumerate() {
            let m = (i + 1) as f64;
            if i > 0 {
                fact *= (2.0 * m - 1.0) * (2.0 * m);
                pow *= s2;
            }
            sum += b * (2.0 * m - 1.0) * pow / fact;
        }
        sum
    } else {
        let sh = (0.5 * s).sinh();
        1.0 / (s * s) - 1.0 / (4.0 * sh * sh)
    }
}

/// First intensity of the zeros of the limiting Gaussian analytic
/// function, `(1/4π) Δ ln K_F(z, z)`.
pub fn gaf_intensity(z: Complex64) -> f64 {
    log_cov_second_derivative(2.0 * z.re) / PI
}
