//! Limiting distributions of rescaled maximal moduli.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_gamma_q};

pub use crate::special::upper_incomplete_gamma;

/// Products stop once the remaining factors can move the result by less
/// than this.
const PRODUCT_TOL: f64 = 1e-16;
const MAX_FACTORS: usize = 50_000_000;
/// Tolerance deciding whether `α/2 − χ` is an integer.
const INTEGER_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum LimitLaw {
    /// `∏ₖ (1 − (R/t)^{2k+2χ})` on `t ≥ R`.
    VeryWeak { radius: f64, chi: f64 },
    /// `∏ₖ (1 − t^{−2k−2χ})/(1 − R^{−2k−2χ})` on `1 ≤ t ≤ R`.
    Annulus { radius: f64, chi: f64 },
    /// Finite product of `Γ(s_k, 2γt^{−α})/Γ(s_k)`, `s_k = (2k+2χ)/α`.
    FiniteParticles {
        alpha: f64,
        chi: f64,
        gamma: f64,
        l_plus: f64,
        l_minus: f64,
    },
    /// Infinite product of `Γ(s_k, 2γt^{−α})/Γ(s_k)`.
    InfiniteParticles { alpha: f64, chi: f64, gamma: f64 },
    /// `exp(−c e^{−2(q−1)a})` with `c = 1/(2q)`, or
    /// `c = (q̃+1)/(2(q̃+q))` when `q_tilde` is given.
    GumbelStrong {
        q: f64,
        #[serde(default)]
        q_tilde: Option<f64>,
    },
    /// `1 − e^{−t}`.
    HardExponential {},
    /// The `R = 1` very weak law at `t = 1 + ε_χ/2 + a/(2χ)`.
    GumbelWeak { chi: f64 },
}

/// A CDF value with a bound on the error committed by truncating an
/// infinite product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdfValue {
    pub cdf: f64,
    pub tail_bound: f64,
}

impl CdfValue {
    fn exact(cdf: f64) -> Self {
        CdfValue { cdf, tail_bound: 0.0 }
    }
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what.into()))
    }
}

impl LimitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LimitLaw::VeryWeak { radius, chi } => {
                require(radius >= 1.0 && radius.is_finite(), "very weak law needs finite R >= 1")?;
                require(chi > 0.0 && chi.is_finite(), "very weak law needs χ > 0")
            }
            LimitLaw::Annulus { radius, chi } => {
                require(radius > 1.0 && radius.is_finite(), "annulus law needs finite R > 1")?;
                require(chi > 0.0 && chi.is_finite(), "annulus law needs χ > 0")
            }
            LimitLaw::FiniteParticles {
                alpha,
                chi,
                gamma,
                l_plus,
                l_minus,
            } => {
                require(chi > 0.0 && chi.is_finite(), "finite-particle law needs χ > 0")?;
                require(alpha.is_finite() && alpha >= 2.0 * chi - INTEGER_TOL, "finite-particle law needs α >= 2χ")?;
                require(gamma > 0.0 && gamma.is_finite(), "finite-particle law needs γ > 0")?;
                require(l_plus > 0.0 && l_plus.is_finite(), "finite-particle law needs L₊ > 0")?;
                require(l_minus >= 1.0 && l_minus.is_finite(), "finite-particle law needs L₋ >= 1")
            }
            LimitLaw::InfiniteParticles { alpha, chi, gamma } => {
                require(alpha > 0.0 && alpha.is_finite(), "infinite-particle law needs α > 0")?;
                require(chi > 0.0 && chi.is_finite(), "infinite-particle law needs χ > 0")?;
                require(gamma > 0.0 && gamma.is_finite(), "infinite-particle law needs γ > 0")
            }
            LimitLaw::GumbelStrong { q, q_tilde } => {
                require(q > 1.0 && q.is_finite(), "strong Gumbel law needs q > 1")?;
                require(q_tilde.is_none_or(|t| t >= 0.0), "strong Gumbel law needs q̃ >= 0")
            }
            LimitLaw::HardExponential {} => Ok(()),
            LimitLaw::GumbelWeak { chi } => require(chi > 0.0 && chi.is_finite(), "weak Gumbel law needs χ > 0"),
        }
    }

    /// Closed interval on which [`cdf_max`](Self::cdf_max) is defined.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            LimitLaw::VeryWeak { radius, .. } => (radius, f64::INFINITY),
            LimitLaw::Annulus { radius, .. } => (1.0, radius),
            LimitLaw::FiniteParticles { .. } | LimitLaw::InfiniteParticles { .. } | LimitLaw::HardExponential {} => {
                (0.0, f64::INFINITY)
            }
            LimitLaw::GumbelStrong { .. } | LimitLaw::GumbelWeak { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `P(M ≤ t)` for `t` in the support.
    pub fn cdf_max(&self, t: f64) -> Result<CdfValue> {
        self.validate()?;
        let (lo, hi) = self.support();
        if !(t >= lo && t <= hi) {
            return Err(Error::Domain(format!("t = {t} outside the support [{lo}, {hi}]")));
        }
        Ok(match *self {
            LimitLaw::VeryWeak { radius, chi } => very_weak(radius, chi, t),
            LimitLaw::Annulus { radius, chi } => annulus(radius, chi, t),
            LimitLaw::FiniteParticles {
                alpha,
                chi,
                gamma,
                l_plus,
                l_minus,
            } => CdfValue::exact(finite_particles(alpha, chi, gamma, l_plus, l_minus, t)?),
            LimitLaw::InfiniteParticles { alpha, chi, gamma } => infinite_particles(alpha, chi, gamma, t)?,
            LimitLaw::GumbelStrong { q, q_tilde } => {
                let coef = match q_tilde {
                    None => 1.0 / (2.0 * q),
                    Some(qt) if qt.is_infinite() => 0.5,
                    Some(qt) => 0.5 * (qt + 1.0) / (qt + q),
                };
                CdfValue::exact((-coef * (-2.0 * (q - 1.0) * t).exp()).exp())
            }
            LimitLaw::HardExponential {} => CdfValue::exact(-(-t).exp_m1()),
            LimitLaw::GumbelWeak { chi } => {
                let x = 1.0 + solve_eps_chi(chi)? / 2.0 + t / (2.0 * chi);
                if x <= 1.0 {
                    CdfValue::exact(0.0)
                } else {
                    very_weak(1.0, chi, x)
                }
            }
        })
    }

    /// `P(M ≤ t)` on the whole line: `0` below the support and `1` above.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::Domain("CDF evaluated at NaN".into()));
        }
        self.validate()?;
        let (lo, hi) = self.support();
        if t < lo {
            Ok(0.0)
        } else if t > hi {
            Ok(1.0)
        } else {
            Ok(self.cdf_max(t)?.cdf)
        }
    }
}

/// `∏_{k≥0} (1 − u_k)` for `u_k = ratio^k · first`, `0 < ratio < 1`, with
/// the factors after the `k`-th bounded through `Σ_{j≥k} u_j/(1 − u_j)`.
fn geometric_product(first: f64, ratio: f64, mut extra: impl FnMut(usize) -> f64) -> CdfValue {
    if first >= 1.0 {
        return CdfValue::exact(0.0);
    }
    let mut log: f64 = 0.0;
    let mut u = first;
    for k in 0..MAX_FACTORS {
        let value = log.exp();
        let tail = u / ((1.0 - ratio) * (1.0 - u));
        if value * tail.min(1.0) <= PRODUCT_TOL {
            return CdfValue {
                cdf: value,
                tail_bound: value * tail.min(1.0),
            };
        }
        log += (-u).ln_1p() + extra(k);
        u *= ratio;
    }
    let value = log.exp();
    CdfValue {
        cdf: value,
        tail_bound: value * (u / ((1.0 - ratio) * (1.0 - u))).min(1.0),
    }
}

fn very_weak(radius: f64, chi: f64, t: f64) -> CdfValue {
    let y = (radius / t).powi(2);
    if y >= 1.0 {
        return CdfValue::exact(0.0);
    }
    geometric_product(y.powf(chi), y, |_| 0.0)
}

fn annulus(radius: f64, chi: f64, t: f64) -> CdfValue {
    if t == radius {
        return CdfValue::exact(1.0);
    }
    let y = t.powi(-2);
    let yr = radius.powi(-2);
    if y >= 1.0 {
        return CdfValue::exact(0.0);
    }
    let v0 = yr.powf(chi);
    geometric_product(y.powf(chi), y, |k| -(-(v0 * yr.powi(k as i32))).ln_1p())
}

fn finite_particles(alpha: f64, chi: f64, gamma: f64, l_plus: f64, l_minus: f64, t: f64) -> Result<f64> {
    let x = if t == 0.0 { f64::INFINITY } else { 2.0 * gamma * t.powf(-alpha) };
    let log_q = |k: usize| -> Result<f64> {
        if x.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        ln_gamma_q((2.0 * k as f64 + 2.0 * chi) / alpha, x)
    };
    let excess = alpha / 2.0 - chi;
    let nearest = excess.round();
    if (excess - nearest).abs() < INTEGER_TOL {
        let n = nearest.max(0.0) as usize;
        let mut log: f64 = 0.0;
        for k in 0..n {
            log += log_q(k)?;
        }
        let inv = 1.0 / l_plus + 1.0 / l_minus;
        let frac = inv / (1.0 / (alpha * gamma) + inv);
        let e = (-x).exp();
        Ok(log.exp() * (e + (1.0 - e) * frac))
    } else {
        let mut log: f64 = 0.0;
        for k in 0..=(excess.floor() as usize) {
            log += log_q(k)?;
        }
        Ok(log.exp())
    }
}

fn infinite_particles(alpha: f64, chi: f64, gamma: f64, t: f64) -> Result<CdfValue> {
    if t == 0.0 {
        return Ok(CdfValue::exact(0.0));
    }
    let x = 2.0 * gamma * t.powf(-alpha);
    let delta = 2.0 / alpha;
    let lx = x.ln();
    let mut log: f64 = 0.0;
    for k in 0..MAX_FACTORS {
        let s = (2.0 * k as f64 + 2.0 * chi) / alpha;
        // 1 − Q(s, x) ≤ b_k = x^s/Γ(s+1); b_{j+1}/b_j ≤ r_k for j ≥ k
        let log_b = s * lx - ln_gamma(s + 1.0);
        let ratio = (delta * lx + ln_gamma(s + 1.0) - ln_gamma(s + 1.0 + delta)).exp();
        let value = log.exp();
        if ratio < 1.0 && log_b < 0.0 {
            let b = log_b.exp();
            let tail = b / ((1.0 - ratio) * (1.0 - b));
            if value * tail.min(1.0) <= PRODUCT_TOL {
                return Ok(CdfValue {
                    cdf: value,
                    tail_bound: value * tail.min(1.0),
                });
            }
        }
        if value <= PRODUCT_TOL {
            return Ok(CdfValue {
                cdf: value,
                tail_bound: value,
            });
        }
        log += ln_gamma_q(s, x)?;
    }
    Err(Error::NoConvergence {
        iterations: MAX_FACTORS,
        reason: format!("gamma-ratio product at t = {t}"),
    })
}

/// Root of `ε e^{cε} = 1` by bisection on `ln ε + cε`.
fn solve_log_linear(c: f64) -> f64 {
    let g = |e: f64| e.ln() + c * e;
    let (mut lo, mut hi) = (1.0 / (1.0 + c), 1.0);
    if g(hi) <= 0.0 {
        return hi;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(hi).abs() < g(lo).abs() {
        hi
    } else {
        lo
    }
}

/// `ε_n` with `e^{2(q−1)nε} ε = 1`.
pub fn solve_eps_n(q: f64, n: usize) -> Result<f64> {
    require(q > 1.0 && q.is_finite(), "ε_n needs q > 1")?;
    require(n >= 1, "ε_n needs n >= 1")?;
    Ok(solve_log_linear(2.0 * (q - 1.0) * n as f64))
}

/// `ε_χ` with `e^{χε} ε = 1`.
pub fn solve_eps_chi(chi: f64) -> Result<f64> {
    require(chi > 0.0 && chi.is_finite(), "ε_χ needs χ > 0")?;
    Ok(solve_log_linear(chi))
}

/// `∏ (1 − m_k)` accumulated in log space.
pub fn radial_gap_probability(masses: &[f64]) -> Result<f64> {
    let mut log: f64 = 0.0;
    for &m in masses {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain(format!("tail mass {m} outside [0, 1]")));
        }
        log += (-m).ln_1p();
    }
    Ok(log.exp())
}
