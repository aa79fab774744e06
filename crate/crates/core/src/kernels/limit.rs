//! Limiting kernels, evaluated as truncated series with a certified tail.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{bergman_disk, bergman_halfplane, check_finite};
use super::edge::{gaf_covariance, limit_edge_kernel_e, limit_edge_kernel_hard};
use crate::error::{Error, Result};
use crate::special::ln_gamma;

const TAIL_REL: f64 = 1e-12;
const MAX_TERMS: usize = 1_000_000;
/// Tolerance for detecting the boundary case `2k + 2χ = α`.
pub(crate) const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum LimitKernelSpec {
    /// Points outside the disk of radius `R` under a potential equal to
    /// `ln r` beyond `R`.
    #[serde(rename = "b_r")]
    BR { radius: f64, chi: f64 },
    /// Points on the annulus `1 < |x| ≤ R`.
    #[serde(rename = "a_r")]
    AR { radius: f64, chi: f64 },
    /// Finitely many particles at infinity.
    #[serde(rename = "f_alpha")]
    FAlpha {
        alpha: f64,
        chi: f64,
        gamma: f64,
        l_plus: f64,
        l_minus: f64,
    },
    /// Infinitely many particles at infinity.
    #[serde(rename = "i_alpha")]
    IAlpha { alpha: f64, chi: f64, gamma: f64 },
    /// Finitely many particles at zero.
    #[serde(rename = "g_alpha")]
    GAlpha {
        alpha: f64,
        chi: f64,
        lambda: f64,
        l_plus: f64,
        l_minus: f64,
    },
    /// Infinitely many particles at zero.
    #[serde(rename = "g_alpha_infinite")]
    GAlphaInfinite { alpha: f64, chi: f64, lambda: f64 },
    /// Particles where the potential vanishes; `intervals` is the zero set
    /// `A` as disjoint radial intervals.
    #[serde(rename = "m_a")]
    MA { intervals: Vec<(f64, f64)>, chi: f64 },
    EdgeHard {},
    EdgeE { q: f64, big_q: f64 },
    BergmanDisk {},
    BergmanHalfplane {},
    GafF {},
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitKernelValue {
    pub value: Complex64,
    /// Bound on the modulus of the neglected series tail.
    pub tail_bound: f64,
}

impl LimitKernelValue {
    fn exact(value: Complex64) -> Self {
        LimitKernelValue {
            value,
            tail_bound: 0.0,
        }
    }
}

fn invalid<T>(msg: String) -> Result<T> {
    Err(Error::InvalidParameter(msg))
}

fn outside<T>(msg: &str) -> Result<T> {
    Err(Error::Domain(msg.to_string()))
}

/// One series term: `exp(log_coeff) x^k` and a bound `ratio` on
/// `|t_{j+1}| / |t_j|` valid for every `j ≥ k`, applied to `majorant ≥ |t_k|`.
struct Term {
    log_coeff: f64,
    majorant_log: Option<f64>,
    ratio: f64,
}

/// `Σ_k exp(log_coeff_k) x^k` until the certified tail falls below
/// `TAIL_REL · |sum|`; returns `(sum, tail bound)`.
fn sum_series(x: Complex64, limit: Option<usize>, term: impl Fn(usize) -> Term) -> Result<(Complex64, f64)> {
    let (rho, theta) = x.to_polar();
    let lr = rho.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let end = limit.unwrap_or(MAX_TERMS);
    for k in 0..end {
        let t = term(k);
        let klr = if k == 0 { 0.0 } else { k as f64 * lr };
        let log_mag = t.log_coeff + klr;
        if log_mag > f64::NEG_INFINITY {
            sum += Complex64::from_polar(log_mag.exp(), k as f64 * theta);
        }
        if limit.is_some() {
            continue;
        }
        if t.ratio < 1.0 {
            let maj = t.majorant_log.map_or(log_mag, |m| m + klr).exp();
            let tail = maj * t.ratio / (1.0 - t.ratio);
            if tail <= TAIL_REL * sum.norm() || (tail == 0.0) {
                return Ok((sum, tail));
            }
        }
    }
    if limit.is_some() {
        return Ok((sum, 0.0));
    }
    Err(Error::NoConvergence {
        iterations: MAX_TERMS,
        reason: "limit kernel series tail did not fall below tolerance".into(),
    })
}

/// `ln a_k` for the gamma-type coefficients
/// `1/a_k = 2π ∫₀^∞ r^{2k+2χ−1} e^{−2γ r^α} dr = 2πΓ(s)/(α(2γ)^s)`,
/// `s = (2k+2χ)/α`.
fn gamma_log_coeff(p: f64, alpha: f64, gamma: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let s = p / alpha;
    -(2.0 * PI).ln() - ln_gamma(s) + alpha.ln() + s * (2.0 * gamma).ln()
}

/// Ratio bound `(2γ)^{2/α} Γ(s)/Γ(s + 2/α)` of consecutive gamma-type
/// coefficients, decreasing in `s`.
fn gamma_ratio(p: f64, alpha: f64, gamma: f64) -> f64 {
    let s = (p / alpha).max(1e-300);
    let d = 2.0 / alpha;
    (d * (2.0 * gamma).ln() + ln_gamma(s) - ln_gamma(s + d)).exp()
}

/// Three-case coefficient table: `a_k = 0` above the threshold, the gamma
/// integral below it and the one-sided-slope term on it.
fn finite_log_coeff(k: usize, alpha: f64, chi: f64, gamma: f64, l_plus: f64, l_minus: f64) -> f64 {
    let p = 2.0 * k as f64 + 2.0 * chi;
    if (p - alpha).abs() < BOUNDARY_TOL {
        -(PI * (1.0 / (alpha * gamma) + 1.0 / l_plus + 1.0 / l_minus)).ln()
    } else if p < alpha {
        gamma_log_coeff(p, alpha, gamma)
    } else {
        f64::NEG_INFINITY
    }
}

/// Number of nonzero terms of the finite three-case table.
fn finite_len(alpha: f64, chi: f64) -> usize {
    let top = (alpha / 2.0 - chi + BOUNDARY_TOL).floor();
    if top < 0.0 {
        0
    } else {
        top as usize + 1
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return invalid(format!("{name} must be positive and finite (got {v})"));
    }
    Ok(())
}

fn check_chi(chi: f64) -> Result<()> {
    if !(chi >= 0.0) || !chi.is_finite() {
        return invalid(format!("χ must be nonnegative (got {chi})"));
    }
    Ok(())
}

/// `ln(2π ∫_A r^{p−1} dr)` for a union of radial intervals.
fn log_interval_mass(intervals: &[(f64, f64)], p: f64, top: f64) -> f64 {
    if p == 0.0 {
        let total: f64 = intervals.iter().map(|&(a, b)| (b / a).ln()).sum();
        return (2.0 * PI * total).ln();
    }
    let lt = top.ln();
    let rel: f64 = intervals
        .iter()
        .map(|&(a, b)| (p * (b.ln() - lt)).exp() - if a > 0.0 { (p * (a.ln() - lt)).exp() } else { 0.0 })
        .sum();
    (2.0 * PI).ln() + p * lt + rel.ln() - p.ln()
}

fn validate_intervals(intervals: &[(f64, f64)]) -> Result<()> {
    if intervals.is_empty() {
        return invalid("zero set A needs at least one interval".into());
    }
    let mut prev = 0.0;
    for (i, &(a, b)) in intervals.iter().enumerate() {
        if !(a >= prev) || !(b > a) || !b.is_finite() || (i > 0 && a <= prev) {
            return invalid(format!(
                "intervals of A must be disjoint, increasing and bounded (bad interval {i}: [{a}, {b}])"
            ));
        }
        prev = b;
    }
    Ok(())
}

impl LimitKernelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LimitKernelSpec::BR { radius, chi } => {
                check_chi(*chi)?;
                if !(*radius >= 1.0) || !radius.is_finite() {
                    return invalid(format!("B_R needs R >= 1 (got {radius})"));
                }
            }
            LimitKernelSpec::AR { radius, chi } => {
                check_chi(*chi)?;
                if !(*radius > 1.0) || !radius.is_finite() {
                    return invalid(format!("A_R needs R > 1 (got {radius})"));
                }
            }
            LimitKernelSpec::FAlpha {
                alpha,
                chi,
                gamma,
                l_plus,
                l_minus,
            } => {
                check_chi(*chi)?;
                check_positive("α", *alpha)?;
                check_positive("γ", *gamma)?;
                check_positive("L₊", *l_plus)?;
                if !(*l_minus >= 1.0) {
                    return invalid(format!("L₋ must be >= 1 (got {l_minus})"));
                }
                if *alpha < 2.0 * chi {
                    return invalid(format!("F_α needs α >= 2χ (got α = {alpha}, χ = {chi})"));
                }
            }
            LimitKernelSpec::IAlpha { alpha, chi, gamma } => {
                check_chi(*chi)?;
                check_positive("α", *alpha)?;
                check_positive("γ", *gamma)?;
            }
            LimitKernelSpec::GAlpha {
                alpha,
                chi,
                lambda,
                l_plus,
                l_minus,
            } => {
                check_chi(*chi)?;
                check_positive("α", *alpha)?;
                check_positive("λ", *lambda)?;
                check_positive("l₊", *l_plus)?;
                check_positive("l₋", *l_minus)?;
            }
            LimitKernelSpec::GAlphaInfinite { alpha, chi, lambda } => {
                check_chi(*chi)?;
                check_positive("α", *alpha)?;
                check_positive("λ", *lambda)?;
            }
            LimitKernelSpec::MA { intervals, chi } => {
                check_chi(*chi)?;
                validate_intervals(intervals)?;
            }
            LimitKernelSpec::EdgeE { q, big_q } => {
                if !(*q >= 0.0 && q < big_q && *q < 1.0) {
                    return invalid(format!("edge E needs 0 <= q < Q, q < 1 (got {q}, {big_q})"));
                }
            }
            LimitKernelSpec::EdgeHard {}
            | LimitKernelSpec::BergmanDisk {}
            | LimitKernelSpec::BergmanHalfplane {}
            | LimitKernelSpec::GafF {} => {}
        }
        Ok(())
    }

    /// Reference measure exponent `e` with `dΛ = |x|^e dℓ`.
    pub fn measure_exponent(&self) -> f64 {
        match self {
            LimitKernelSpec::GAlpha { chi, .. }
            | LimitKernelSpec::GAlphaInfinite { chi, .. }
            | LimitKernelSpec::MA { chi, .. } => 2.0 * (chi - 1.0),
            _ => 0.0,
        }
    }
}

/// Evaluates a limiting kernel at `(z, w)`.
pub fn eval_limit_kernel(spec: &LimitKernelSpec, z: Complex64, w: Complex64) -> Result<LimitKernelValue> {
    spec.validate()?;
    check_finite(z)?;
    check_finite(w)?;
    match spec {
        LimitKernelSpec::BR { radius, chi } => {
            let (r, chi) = (*radius, *chi);
            if !(z.norm() > r && w.norm() > r) {
                return outside("B_R needs |z|, |w| > R");
            }
            let x = 1.0 / (z * w.conj());
            let lr = r.ln();
            let geo = r * r * x.norm();
            let (sum, tail) = sum_series(x, None, |k| {
                let kc = k as f64 + chi;
                Term {
                    log_coeff: if kc > 0.0 { kc.ln() + 2.0 * kc * lr } else { f64::NEG_INFINITY },
                    majorant_log: None,
                    ratio: if kc > 0.0 { (kc + 1.0) / kc * geo } else { f64::INFINITY },
                }
            })?;
            let pre = 1.0 / (PI * (z * w.conj()).norm().powf(chi + 1.0));
            Ok(LimitKernelValue {
                value: sum * pre,
                tail_bound: tail * pre,
            })
        }
        LimitKernelSpec::AR { radius, chi } => {
            let (r, chi) = (*radius, *chi);
            if !(z.norm() > 1.0 && w.norm() > 1.0) {
                return outside("A_R needs |z|, |w| > 1");
            }
            if z.norm() > r || w.norm() > r {
                return Ok(LimitKernelValue::exact(Complex64::new(0.0, 0.0)));
            }
            let x = 1.0 / (z * w.conj());
            let lr = r.ln();
            let xm = x.norm();
            let (sum, tail) = sum_series(x, None, |k| {
                let kc = k as f64 + chi;
                if kc <= 0.0 {
                    return Term {
                        log_coeff: f64::NEG_INFINITY,
                        majorant_log: None,
                        ratio: f64::INFINITY,
                    };
                }
                Term {
                    log_coeff: kc.ln() - (-(-2.0 * kc * lr).exp_m1()).ln(),
                    majorant_log: None,
                    ratio: (kc + 1.0) / kc * xm,
                }
            })?;
            let pre = 1.0 / (PI * (z * w.conj()).norm().powf(chi + 1.0));
            Ok(LimitKernelValue {
                value: sum * pre,
                tail_bound: tail * pre,
            })
        }
        LimitKernelSpec::FAlpha {
            alpha,
            chi,
            gamma,
            l_plus,
            l_minus,
        } => {
            if z.norm() == 0.0 || w.norm() == 0.0 {
                return outside("F_α is defined off the origin");
            }
            let n = finite_len(*alpha, *chi);
            let x = 1.0 / (z * w.conj());
            let (sum, _) = sum_series(x, Some(n), |k| Term {
                log_coeff: finite_log_coeff(k, *alpha, *chi, *gamma, *l_plus, *l_minus),
                majorant_log: None,
                ratio: 0.0,
            })?;
            let lw = -gamma * (z.norm().powf(-alpha) + w.norm().powf(-alpha))
                - (chi + 1.0) * (z * w.conj()).norm().ln();
            Ok(LimitKernelValue::exact(sum * lw.exp()))
        }
        LimitKernelSpec::IAlpha { alpha, chi, gamma } => {
            if z.norm() == 0.0 || w.norm() == 0.0 {
                return outside("I_α is defined off the origin");
            }
            let x = 1.0 / (z * w.conj());
            let xm = x.norm();
            let (sum, tail) = sum_series(x, None, |k| {
                let p = 2.0 * k as f64 + 2.0 * chi;
                Term {
                    log_coeff: gamma_log_coeff(p, *alpha, *gamma),
                    majorant_log: None,
                    ratio: if p > 0.0 { gamma_ratio(p, *alpha, *gamma) * xm } else { f64::INFINITY },
                }
            })?;
            let lw = -gamma * (z.norm().powf(-alpha) + w.norm().powf(-alpha))
                - (chi + 1.0) * (z * w.conj()).norm().ln();
            let pre = lw.exp();
            Ok(LimitKernelValue {
                value: sum * pre,
                tail_bound: tail * pre,
            })
        }
        LimitKernelSpec::GAlpha {
            alpha,
            chi,
            lambda,
            l_plus,
            l_minus,
        } => {
            let n = finite_len(*alpha, *chi);
            let (sum, _) = sum_series(z * w.conj(), Some(n), |k| Term {
                log_coeff: finite_log_coeff(k, *alpha, *chi, *lambda, *l_plus, *l_minus),
                majorant_log: None,
                ratio: 0.0,
            })?;
            let lw = -lambda * (z.norm().powf(*alpha) + w.norm().powf(*alpha));
            Ok(LimitKernelValue::exact(sum * lw.exp()))
        }
        LimitKernelSpec::GAlphaInfinite { alpha, chi, lambda } => {
            let x = z * w.conj();
            let xm = x.norm();
            let (sum, tail) = sum_series(x, None, |k| {
                let p = 2.0 * k as f64 + 2.0 * chi;
                Term {
                    log_coeff: gamma_log_coeff(p, *alpha, *lambda),
                    majorant_log: None,
                    ratio: if p > 0.0 { gamma_ratio(p, *alpha, *lambda) * xm } else { f64::INFINITY },
                }
            })?;
            let pre = (-lambda * (z.norm().powf(*alpha) + w.norm().powf(*alpha))).exp();
            Ok(LimitKernelValue {
                value: sum * pre,
                tail_bound: tail * pre,
            })
        }
        LimitKernelSpec::MA { intervals, chi } => {
            let top = intervals[intervals.len() - 1].1;
            let last_lo = intervals[intervals.len() - 1].0;
            if !(z.norm() < top && w.norm() < top) {
                return outside("M_A needs |z|, |w| below the top of A");
            }
            let x = z * w.conj();
            let geo = x.norm() / (top * top);
            let lt = top.ln();
            let (sum, tail) = sum_series(x, None, |k| {
                let p = 2.0 * k as f64 + 2.0 * chi;
                if p == 0.0 {
                    let log_mass = log_interval_mass(intervals, 0.0, top);
                    return Term {
                        log_coeff: -log_mass,
                        majorant_log: None,
                        ratio: f64::INFINITY,
                    };
                }
                // a_j ≤ p_j / (2π R^{p_j} (1 − (a_last/R)^{p_j})) for all j
                let shrink = if last_lo > 0.0 {
                    -(p * (last_lo.ln() - lt)).exp_m1()
                } else {
                    1.0
                };
                Term {
                    log_coeff: -log_interval_mass(intervals, p, top),
                    majorant_log: Some(p.ln() - (2.0 * PI).ln() - p * lt - shrink.ln()),
                    ratio: (p + 2.0) / p * geo,
                }
            })?;
            Ok(LimitKernelValue {
                value: sum,
                tail_bound: tail,
            })
        }
        LimitKernelSpec::EdgeHard {} => Ok(LimitKernelValue::exact(
            limit_edge_kernel_hard(z + w.conj()) / PI,
        )),
        LimitKernelSpec::EdgeE { q, big_q } => Ok(LimitKernelValue::exact(limit_edge_kernel_e(*q, *big_q, z, w)?)),
        LimitKernelSpec::BergmanDisk {} => Ok(LimitKernelValue::exact(bergman_disk(z, w)?)),
        LimitKernelSpec::BergmanHalfplane {} => Ok(LimitKernelValue::exact(bergman_halfplane(z, w)?)),
        LimitKernelSpec::GafF {} => Ok(LimitKernelValue::exact(gaf_covariance(z, w))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_adaptive;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn b_r_converges_with_valid_tail() {
        let spec = LimitKernelSpec::BR { radius: 1.5, chi: 1.0 };
        let z = Complex64::from_polar(3.0, 0.4);
        let w = Complex64::from_polar(3.0, -1.1);
        let v = eval_limit_kernel(&spec, z, w).unwrap();
        assert!(v.tail_bound <= 1e-12 * v.value.norm());
        // closed form for χ = 1: Σ (k+1) y^k = 1/(1−y)², y = R²/(z w̄)
        let y = 1.5 * 1.5 / (z * w.conj());
        let exact = 1.5 * 1.5 / (PI * (z * w.conj()).norm().powi(2)) / ((1.0 - y) * (1.0 - y));
        assert!((v.value - exact).norm() <= v.tail_bound + 1e-13 * exact.norm());
        assert!(eval_limit_kernel(&spec, c(1.2, 0.0), z).is_err());
    }

    #[test]
    fn a_r_vanishes_outside_annulus() {
        let spec = LimitKernelSpec::AR { radius: 2.0, chi: 1.0 };
        let v = eval_limit_kernel(&spec, c(2.5, 0.0), c(1.5, 0.0)).unwrap();
        assert_eq!(v.value, c(0.0, 0.0));
        let v = eval_limit_kernel(&spec, c(1.5, 0.3), c(1.5, 0.3)).unwrap();
        assert!(v.value.re > 0.0 && v.value.im.abs() < 1e-15);
        assert!(eval_limit_kernel(&spec, c(0.5, 0.0), c(1.5, 0.0)).is_err());
    }

    #[test]
    fn a_r_dominates_b_one() {
        // (k+χ)/(1 − R^{−p}) > (k+χ), so on the diagonal A_R > B_1.
        let a = LimitKernelSpec::AR { radius: 2.0, chi: 1.0 };
        let b = LimitKernelSpec::BR { radius: 1.0, chi: 1.0 };
        for r in [1.1, 1.5, 1.9] {
            let z = c(r, 0.0);
            let ka = eval_limit_kernel(&a, z, z).unwrap().value.re;
            let kb = eval_limit_kernel(&b, z, z).unwrap().value.re;
            assert!(ka > kb);
        }
    }

    #[test]
    fn m_a_on_a_disk_is_a_bergman_series() {
        let r: f64 = 0.8;
        let spec = LimitKernelSpec::MA {
            intervals: vec![(0.0, r)],
            chi: 1.0,
        };
        let (z, w) = (c(0.3, 0.2), c(-0.1, 0.5));
        let v = eval_limit_kernel(&spec, z, w).unwrap();
        // a_k = (2k+2)/(2π R^{2k+2}) so K = (1/(π R²)) / (1 − z w̄/R²)²
        let y = z * w.conj() / (r * r);
        let exact = 1.0 / (PI * r * r) / ((1.0 - y) * (1.0 - y));
        assert!((v.value - exact).norm() < 1e-12 * exact.norm());
        assert!(v.tail_bound <= 1e-12 * v.value.norm());
    }

    #[test]
    fn m_a_coefficients_match_direct_integration() {
        let intervals = vec![(0.1, 0.3), (0.5, 0.9)];
        for p in [1.5, 2.0, 7.0] {
            let direct = integrate_adaptive(|r| r.powf(p - 1.0), 0.1, 0.3, 1e-14, 0.0, 100).value
                + integrate_adaptive(|r| r.powf(p - 1.0), 0.5, 0.9, 1e-14, 0.0, 100).value;
            let l = log_interval_mass(&intervals, p, 0.9);
            assert!(((2.0 * PI * direct).ln() - l).abs() < 1e-12);
        }
    }

    #[test]
    fn m_a_tail_bound_covers_remainder() {
        let spec = LimitKernelSpec::MA {
            intervals: vec![(0.2, 0.4), (0.7, 1.0)],
            chi: 0.5,
        };
        let (z, w) = (c(0.9, 0.1), c(0.85, -0.2));
        let v = eval_limit_kernel(&spec, z, w).unwrap();
        // brute-force with many more terms
        let x = z * w.conj();
        let mut sum = c(0.0, 0.0);
        let mut xp = c(1.0, 0.0);
        for k in 0..20_000 {
            let p = 2.0 * k as f64 + 1.0;
            sum += xp * (-log_interval_mass(&[(0.2, 0.4), (0.7, 1.0)], p, 1.0)).exp();
            xp *= x;
        }
        assert!((v.value - sum).norm() <= v.tail_bound + 1e-12 * sum.norm());
    }

    #[test]
    fn g_alpha_boundary_row() {
        let (alpha, chi, lambda, lp, lm) = (4.0, 1.0, 0.7, 2.0, 3.0);
        let spec = LimitKernelSpec::GAlpha {
            alpha,
            chi,
            lambda,
            l_plus: lp,
            l_minus: lm,
        };
        // terms k = 0 (p = 2 < α) and k = 1 (p = 4 = α)
        let z = c(0.6, 0.2);
        let v = eval_limit_kernel(&spec, z, z).unwrap().value;
        let a0 = 1.0
            / (2.0 * PI * integrate_adaptive(|r| r * (-2.0 * lambda * r.powf(alpha)).exp(), 0.0, 10.0, 1e-14, 0.0, 500).value);
        let a1 = 1.0 / (PI * (1.0 / (alpha * lambda) + 1.0 / lp + 1.0 / lm));
        let rr = z.norm_sqr();
        let exact = (a0 + a1 * rr) * (-2.0 * lambda * z.norm().powf(alpha)).exp();
        assert!((v.re - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn gamma_coefficient_matches_quadrature() {
        for (p, alpha, gamma) in [(2.0, 3.0, 1.0), (4.5, 2.0, 0.3), (1.0, 0.7, 2.0)] {
            let integral = integrate_adaptive(
                |r: f64| r.powf(p - 1.0) * (-2.0 * gamma * r.powf(alpha)).exp(),
                0.0,
                40.0,
                1e-13,
                0.0,
                4000,
            )
            .value;
            let la = -(2.0 * PI * integral).ln();
            assert!((la - gamma_log_coeff(p, alpha, gamma)).abs() < 1e-9, "p={p} α={alpha}");
        }
    }

    #[test]
    fn f_alpha_has_finitely_many_terms() {
        assert_eq!(finite_len(3.0, 1.0), 1);
        assert_eq!(finite_len(4.0, 1.0), 2);
        assert_eq!(finite_len(2.0, 1.0), 1);
        let spec = LimitKernelSpec::FAlpha {
            alpha: 3.0,
            chi: 1.0,
            gamma: 1.0,
            l_plus: 0.5,
            l_minus: 1.5,
        };
        let z = c(1.3, 0.4);
        let v = eval_limit_kernel(&spec, z, z).unwrap();
        let a0 = gamma_log_coeff(2.0, 3.0, 1.0).exp();
        let exact = a0 * (-2.0 * z.norm().powf(-3.0)).exp() / z.norm_sqr().powi(2);
        assert!((v.value.re - exact).abs() < 1e-14 * exact);
        assert_eq!(v.tail_bound, 0.0);
    }

    #[test]
    fn i_alpha_tail_bound_is_honest() {
        let spec = LimitKernelSpec::IAlpha {
            alpha: 1.5,
            chi: 0.5,
            gamma: 0.8,
        };
        let (z, w) = (c(0.4, 0.3), c(0.2, -0.5));
        let v = eval_limit_kernel(&spec, z, w).unwrap();
        let x = 1.0 / (z * w.conj());
        let mut s = c(0.0, 0.0);
        for k in 0..2000 {
            let p = 2.0 * k as f64 + 1.0;
            s += Complex64::from_polar((gamma_log_coeff(p, 1.5, 0.8) + k as f64 * x.norm().ln()).exp(), k as f64 * x.arg());
        }
        let lw = -0.8 * (z.norm().powf(-1.5) + w.norm().powf(-1.5)) - 1.5 * (z * w.conj()).norm().ln();
        let brute = s * lw.exp();
        assert!((v.value - brute).norm() <= v.tail_bound + 1e-12 * brute.norm());
    }

    #[test]
    fn kernels_are_hermitian() {
        let specs = [
            LimitKernelSpec::BR { radius: 1.0, chi: 2.0 },
            LimitKernelSpec::IAlpha {
                alpha: 2.0,
                chi: 1.0,
                gamma: 1.0,
            },
            LimitKernelSpec::GAlphaInfinite {
                alpha: 2.0,
                chi: 1.0,
                lambda: 1.0,
            },
            LimitKernelSpec::EdgeE { q: 0.1, big_q: 2.0 },
            LimitKernelSpec::EdgeHard {},
            LimitKernelSpec::GafF {},
        ];
        let (z, w) = (c(1.6, 0.7), c(-1.2, 1.9));
        for spec in &specs {
            let a = eval_limit_kernel(spec, z, w).unwrap().value;
            let b = eval_limit_kernel(spec, w, z).unwrap().value;
            assert!((a - b.conj()).norm() < 1e-13 * a.norm().max(1e-300), "{spec:?}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let z = c(2.0, 0.0);
        assert!(eval_limit_kernel(&LimitKernelSpec::BR { radius: 0.5, chi: 1.0 }, z, z).is_err());
        assert!(eval_limit_kernel(&LimitKernelSpec::EdgeE { q: 1.0, big_q: 0.5 }, z, z).is_err());
        assert!(eval_limit_kernel(
            &LimitKernelSpec::MA {
                intervals: vec![(0.5, 0.4)],
                chi: 1.0
            },
            z,
            z
        )
        .is_err());
        assert!(eval_limit_kernel(&LimitKernelSpec::GafF {}, c(f64::NAN, 0.0), z).is_err());
    }

    #[test]
    fn serde_tags() {
        let s: LimitKernelSpec = serde_json::from_str(r#"{"variant":"b_r","radius":2.0,"chi":1.0}"#).unwrap();
        assert_eq!(s, LimitKernelSpec::BR { radius: 2.0, chi: 1.0 });
        let s: LimitKernelSpec = serde_json::from_str(r#"{"variant":"edge_e","q":0.0,"big_q":1.0}"#).unwrap();
        assert_eq!(s, LimitKernelSpec::EdgeE { q: 0.0, big_q: 1.0 });
    }
}
