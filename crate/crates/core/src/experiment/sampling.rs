//! Maximal-modulus experiments: sample, rescale, compare with a limit law.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{fmt, ExperimentConfig, ExperimentKind, Outcome, Table};
use crate::error::{Error, Result};
use crate::kostlan::{rescale_extreme, GasSampler, GasSpec, RescaleScheme};
use crate::limit_laws::{solve_eps_n, LimitLaw};
use crate::potentials::{check_circle_conditions, Reference};
use crate::stats::{ks_statistic, Ecdf};

const EQ_TOL: f64 = 1e-10;

fn hypothesis(msg: impl Into<String>) -> Error {
    Error::Hypothesis(msg.into())
}

/// `count` log-spaced radii in `[lo, hi]`.
fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn value(gas: &GasSpec, r: f64) -> Result<f64> {
    Ok(gas.potential.eval(r)?.to_f64())
}

/// Checks `pred(r, V(r))` on the grid and names `what` on failure.
fn on_grid(gas: &GasSpec, grid: &[f64], what: &str, pred: impl Fn(f64, f64) -> bool) -> Result<()> {
    for &r in grid {
        let v = value(gas, r).map_err(|e| hypothesis(format!("{what}: V({r}) undefined ({e})")))?;
        if !pred(r, v) {
            return Err(hypothesis(format!("{what} fails at r = {r} (V = {v})")));
        }
    }
    Ok(())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * (1.0 + b.abs())
}

fn circle_conditions(gas: &GasSpec) -> Result<()> {
    let report = check_circle_conditions(&gas.potential, &log_grid(1e-3, 1e3, 241));
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(hypothesis(format!("circle conditions: {} at r = {}", v.reason, v.r))),
    }
}

fn same_chi(gas: &GasSpec, chi: f64) -> Result<()> {
    if close(gas.chi, chi) {
        Ok(())
    } else {
        Err(hypothesis(format!("law χ = {chi} differs from gas χ = {}", gas.chi)))
    }
}

/// Verifies on grids that the gas meets the hypotheses under which `law`
/// is the limit of experiment `kind`, naming the first that fails.
pub fn check_hypotheses(kind: ExperimentKind, gas: &GasSpec, law: &LimitLaw) -> Result<()> {
    if gas.reference != Reference::Lebesgue {
        return Err(hypothesis("reference measure must be Lebesgue"));
    }
    match (kind, *law) {
        (ExperimentKind::HardExponential, LimitLaw::HardExponential {}) => {
            on_grid(gas, &log_grid(1.0 + 1e-9, 1e3, 61), "V = +∞ for r > 1", |_, v| v == f64::INFINITY)?;
            on_grid(gas, &[0.99, 0.999, 0.999_999, 1.0], "V = 0 on [R, 1] for some R < 1", |_, v| v == 0.0)
        }
        (ExperimentKind::GumbelStrong, LimitLaw::GumbelStrong { q, q_tilde }) => {
            let qt = q_tilde.unwrap_or(0.0);
            if qt.is_infinite() {
                return Err(hypothesis("q̃ = ∞ is a hard wall inside the disk, not a sampled gas"));
            }
            on_grid(gas, &log_grid(1e-3, 1.0, 61), "V = −q̃ ln r on (0, 1]", |r, v| close(v, -qt * r.ln()))?;
            on_grid(gas, &log_grid(1.0, 1.0 + 1e-2, 41), "V = q ln r on [1, R] for some R > 1", |r, v| {
                close(v, q * r.ln())
            })?;
            on_grid(gas, &log_grid(1.0, 1e6, 121), "V ≥ q ln r for r > 1", |r, v| {
                v >= q * r.ln() - EQ_TOL * (1.0 + v.abs())
            })
        }
        (ExperimentKind::VeryWeak, LimitLaw::VeryWeak { radius, chi }) => {
            same_chi(gas, chi)?;
            circle_conditions(gas)?;
            on_grid(gas, &log_grid(radius, radius * 1e6, 121), "V = ln r for r ≥ R", |r, v| close(v, r.ln()))?;
            if radius > 1.0 {
                let inside: Vec<f64> = log_grid(1.0, radius, 62)[1..61].to_vec();
                on_grid(gas, &inside, "V > ln r on (1, R)", |r, v| v > r.ln())?;
            }
            Ok(())
        }
        (ExperimentKind::Annulus, LimitLaw::Annulus { radius, chi }) => {
            same_chi(gas, chi)?;
            circle_conditions(gas)?;
            on_grid(gas, &log_grid(1.0, radius, 61), "V = ln r on [1, R]", |r, v| close(v, r.ln()))?;
            let outside: Vec<f64> = log_grid(radius, radius * 1e3, 122)[1..].to_vec();
            on_grid(gas, &outside, "V > ln r for r > R", |r, v| v > r.ln())
        }
        (
            ExperimentKind::FiniteParticles,
            LimitLaw::FiniteParticles {
                alpha,
                chi,
                gamma,
                l_plus,
                l_minus,
            },
        ) => {
            same_chi(gas, chi)?;
            if alpha < 2.0 * chi {
                return Err(hypothesis(format!("α ≥ 2χ fails (α = {alpha}, χ = {chi})")));
            }
            circle_conditions(gas)?;
            let above: Vec<f64> = log_grid(1.0, 1e3, 122)[1..].to_vec();
            on_grid(gas, &above, "V > ln r for r > 1", |r, v| v > r.ln())?;
            let h = 1e-7;
            let slope_plus = value(gas, 1.0 + h)? / h;
            if (slope_plus - (l_plus + 1.0)).abs() > 1e-4 * (l_plus + 1.0) {
                return Err(hypothesis(format!(
                    "V(r)/(r − 1) → L₊ + 1 = {} fails (≈ {slope_plus})",
                    l_plus + 1.0
                )));
            }
            let slope_minus = value(gas, 1.0 - h)? / h;
            if (slope_minus - (l_minus - 1.0)).abs() > 1e-4 * (1.0 + l_minus) {
                return Err(hypothesis(format!(
                    "V(r)/(1 − r) → L₋ − 1 = {} fails (≈ {slope_minus})",
                    l_minus - 1.0
                )));
            }
            let r: f64 = 1e4;
            let tail = r.powf(alpha) * (value(gas, r)? - r.ln());
            if (tail - gamma).abs() > 1e-2 * gamma {
                return Err(hypothesis(format!("r^α (V − ln r) → γ = {gamma} fails (≈ {tail})")));
            }
            Ok(())
        }
        (kind, law) => Err(Error::Config(format!("experiment {kind} cannot use limit law {law:?}"))),
    }
}

/// The rescaling under which the maxima of `gas` converge to `law`.
pub fn rescale_for(kind: ExperimentKind, gas: &GasSpec, law: &LimitLaw) -> Result<RescaleScheme> {
    Ok(match (kind, *law) {
        (ExperimentKind::HardExponential, _) => RescaleScheme::QuadraticHard { n: gas.n },
        (ExperimentKind::GumbelStrong, LimitLaw::GumbelStrong { q, .. }) => RescaleScheme::LinearGumbel {
            n: gas.n,
            eps: solve_eps_n(q, gas.n)?,
        },
        (ExperimentKind::FiniteParticles, LimitLaw::FiniteParticles { alpha, .. }) => {
            RescaleScheme::Power { n: gas.n, alpha }
        }
        _ => RescaleScheme::Identity {},
    })
}

pub(super) fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let kind = config.experiment;
    let gas = config.gas.clone().expect("validated");
    let law = config.law.expect("validated");
    let scheme = rescale_for(kind, &gas, &law)?;
    let sampler = GasSampler::new(gas)?;
    let raw: Vec<f64> = (0..config.replicas as u64)
        .into_par_iter()
        .map(|i| sampler.sample_max(config.seed, i))
        .collect::<Result<_>>()?;
    let rescaled: Vec<f64> = raw.iter().map(|&x| rescale_extreme(x, &scheme)).collect();

    let ecdf = Ecdf::new(rescaled.clone())?;
    let (lo, hi) = law.support();
    let mut tail_bound: f64 = 0.0;
    let ks = ks_statistic(&ecdf, |t| {
        if t >= lo && t <= hi {
            let v = law.cdf_max(t)?;
            tail_bound = tail_bound.max(v.tail_bound);
            Ok(v.cdf)
        } else {
            law.cdf(t)
        }
    })?;

    let mut table = Table::new(kind.name(), &["replica", "raw_extreme", "rescaled"]);
    for (i, (r, s)) in raw.iter().zip(&rescaled).enumerate() {
        table.push(vec![i.to_string(), fmt(*r), fmt(*s)]);
    }
    let mut details = BTreeMap::new();
    if let RescaleScheme::LinearGumbel { eps, .. } = scheme {
        details.insert("eps_n".into(), eps);
    }
    details.insert("mean_rescaled".into(), rescaled.iter().sum::<f64>() / rescaled.len() as f64);
    Ok(Outcome {
        statistic: ks,
        pass: ks <= config.tolerance,
        tail_bound,
        details,
        rescaled,
        tables: vec![table],
    })
}
