//! Kernel and limit-law convergence checks that need no sampling.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{fmt, ExperimentConfig, Outcome, Table};
use crate::error::Result;
use crate::kernels::{
    bergman_halfplane, edge_bergman_conjugated, gaf_covariance, gaf_covariance_finite, limit_edge_kernel_hard,
    Block, DiskBump, InnerOuterKernel, NonRadialKernel, NonRadialOptions, PlanarWeight, RadialKernel,
};
use crate::kostlan::{component_law, GasSpec};
use crate::limit_laws::LimitLaw;
use crate::potentials::{invert_potential, RadialPotential};
use crate::quadrature::GaussLegendre;

/// Points `x + iy` with `x, y ∈ {−radius, …, radius}` (step `step`) and
/// `|x + iy| ≤ radius`.
fn disk_grid(radius: f64, step: f64) -> Vec<Complex64> {
    let m = (radius / step).round() as i64;
    let mut pts = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            let z = Complex64::new(i as f64 * step, j as f64 * step);
            if z.norm() <= radius + 1e-12 {
                pts.push(z);
            }
        }
    }
    pts
}

fn sup_over_pairs(pts: &[Complex64], mut err: impl FnMut(Complex64, Complex64) -> Result<f64>) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for &z in pts {
        for &w in pts {
            sup = sup.max(err(z, w)?);
        }
    }
    Ok(sup)
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn error_table(name: &str, column: &str, sizes: &[usize], errors: &[f64]) -> Table {
    let mut t = Table::new(name, &[column, "sup_error"]);
    for (n, e) in sizes.iter().zip(errors) {
        t.push(vec![n.to_string(), fmt(*e)]);
    }
    t
}

fn outcome(statistic: f64, pass: bool, details: BTreeMap<String, f64>, tables: Vec<Table>) -> Outcome {
    Outcome {
        statistic,
        pass,
        tail_bound: 0.0,
        details,
        rescaled: Vec::new(),
        tables,
    }
}

/// Sup error of `(π/n²) K_n(1 − α/n, 1 − β/n)` for the flat hard disk
/// against its edge limit over `|α|, |β| ≤ 3`; must be within tolerance at
/// the largest `n` and strictly decreasing in `n`.
pub(super) fn hard_edge_kernel(config: &ExperimentConfig) -> Result<Outcome> {
    let pts = disk_grid(3.0, 0.25);
    let mut errors = Vec::new();
    for &n in &config.sizes {
        let kernel = RadialKernel::from_gas(&GasSpec::lebesgue(
            n,
            1.0,
            RadialPotential::HardEdgeFlat { inner: 0.0 },
        )?)?;
        let nf = n as f64;
        let scale = PI / (nf * nf);
        errors.push(sup_over_pairs(&pts, |a, b| {
            let k = kernel.eval_series(1.0 - a / nf, 1.0 - b / nf)? * scale;
            Ok((k - limit_edge_kernel_hard(a + b.conj())).norm())
        })?);
    }
    let last = *errors.last().expect("sizes nonempty");
    let decreasing = strictly_decreasing(&errors);
    let details = BTreeMap::from([("decreasing".into(), decreasing as u8 as f64)]);
    let table = error_table("hard_edge_kernel", "n", &config.sizes, &errors);
    Ok(outcome(last, last <= config.tolerance && decreasing, details, vec![table]))
}

/// Sup error of the finite Kac covariance against its scaling limit over
/// `|z|, |w| ≤ 3`.
pub(super) fn gaf_covariance_convergence(config: &ExperimentConfig) -> Result<Outcome> {
    let pts = disk_grid(3.0, 0.5);
    let mut errors = Vec::new();
    for &n in &config.sizes {
        errors.push(sup_over_pairs(&pts, |z, w| {
            Ok((gaf_covariance_finite(n, z, w) - gaf_covariance(z, w)).norm())
        })?);
    }
    let last = *errors.last().expect("sizes nonempty");
    let table = error_table("gaf_covariance", "n", &config.sizes, &errors);
    Ok(outcome(last, last <= config.tolerance, BTreeMap::new(), vec![table]))
}

/// Left half-plane grid `Re ∈ {−3, −2.5, …, −0.5}`, `Im ∈ {−1, −0.5, …, 1}`.
fn half_plane_grid() -> Vec<Complex64> {
    let mut pts = Vec::new();
    for i in 1..=6 {
        for j in -2..=2 {
            pts.push(Complex64::new(-0.5 * i as f64, 0.5 * j as f64));
        }
    }
    pts
}

/// Ratio of the sup errors of the rescaled edge kernel (`q = 0`, `Q = 1`)
/// against the half-plane Bergman kernel at the last and first size.
pub(super) fn edge_bergman(config: &ExperimentConfig) -> Result<Outcome> {
    let pts = half_plane_grid();
    let mut errors = Vec::new();
    for &n in &config.sizes {
        errors.push(sup_over_pairs(&pts, |z, w| {
            Ok((edge_bergman_conjugated(0.0, 1.0, n as f64, z, w)? - bergman_halfplane(z, w)?).norm())
        })?);
    }
    let ratio = errors[errors.len() - 1] / errors[0];
    let details = BTreeMap::from([
        ("first_error".into(), errors[0]),
        ("last_error".into(), errors[errors.len() - 1]),
    ]);
    let table = error_table("edge_bergman", "n", &config.sizes, &errors);
    Ok(outcome(ratio, ratio <= config.tolerance, details, vec![table]))
}

/// Ratio of `sup |IO block|` over `|z|, |w| ≤ 0.7` at the last and first
/// size for the `max{0, ln r}` gas.
pub(super) fn block_decay(config: &ExperimentConfig) -> Result<Outcome> {
    let pts = disk_grid(0.7, 0.1);
    let mut sups = Vec::new();
    for &n in &config.sizes {
        let kernel = InnerOuterKernel::circle_log(n)?;
        sups.push(sup_over_pairs(&pts, |z, w| Ok(kernel.eval(Block::IO, z, w)?.norm()))?);
    }
    let ratio = sups[sups.len() - 1] / sups[0];
    let details = BTreeMap::from([("first_sup".into(), sups[0]), ("last_sup".into(), sups[sups.len() - 1])]);
    let mut table = Table::new("block_decay", &["n", "sup_io"]);
    for (n, s) in config.sizes.iter().zip(&sups) {
        table.push(vec![n.to_string(), fmt(*s)]);
    }
    Ok(outcome(ratio, ratio <= config.tolerance, details, vec![table]))
}

/// Component CDFs of `1/X_k` for `max{0, 2 ln r}` against those of
/// `X_{n−1−k}` for the inverted gas, on 100 log-spaced points of
/// `[0.2, 5]`.
pub(super) fn inversion(config: &ExperimentConfig) -> Result<Outcome> {
    let n = config.sizes[0];
    let chi = 1.0;
    let direct = GasSpec::lebesgue(n, chi, RadialPotential::PowerQ { q: 2.0 })?;
    let inv = invert_potential(&direct.potential, chi);
    let inverted = GasSpec::new(n, chi, inv.potential, inv.reference)?;
    let grid: Vec<f64> = (0..100)
        .map(|i| (0.2f64.ln() + (25f64).ln() * i as f64 / 99.0).exp())
        .collect();
    let mut sup: f64 = 0.0;
    let mut table = Table::new("inversion", &["k", "t", "cdf_inverse_direct", "cdf_inverted"]);
    for k in 0..n {
        let a = component_law(&direct, k, false)?;
        let b = component_law(&inverted, n - 1 - k, true)?;
        for &t in &grid {
            let lhs = a.cdf_sf(1.0 / t).1;
            let rhs = b.cdf(t);
            sup = sup.max((lhs - rhs).abs());
            table.push(vec![k.to_string(), fmt(t), fmt(lhs), fmt(rhs)]);
        }
    }
    Ok(outcome(sup, sup <= config.tolerance, BTreeMap::new(), vec![table]))
}

/// Sup over `a ∈ [−2, 4]` of the distance between the recentred very weak
/// law and the standard Gumbel CDF, for each `χ` in `sizes`.
pub(super) fn gumbel_from_weak(config: &ExperimentConfig) -> Result<Outcome> {
    let grid: Vec<f64> = (0..=600).map(|i| -2.0 + 0.01 * i as f64).collect();
    let mut errors = Vec::new();
    for &chi in &config.sizes {
        let law = LimitLaw::GumbelWeak { chi: chi as f64 };
        let mut sup: f64 = 0.0;
        for &a in &grid {
            sup = sup.max((law.cdf(a)? - (-(-a).exp()).exp()).abs());
        }
        errors.push(sup);
    }
    let last = *errors.last().expect("sizes nonempty");
    let decreasing = strictly_decreasing(&errors);
    let details = BTreeMap::from([("decreasing".into(), decreasing as u8 as f64)]);
    let table = error_table("gumbel_from_weak", "chi", &config.sizes, &errors);
    Ok(outcome(last, last <= config.tolerance && decreasing, details, vec![table]))
}

const REPRODUCING_TOL: f64 = 1e-6;
const SANDWICH_TOL: f64 = 1e-8;

/// `∫ f(w) e^{−2(n+χ)V(w)} dℓ(w)` by Gauss–Legendre panels in the angle
/// and Gauss–Legendre on every ray piece, independent of the rule used to
/// assemble the Gram matrix.
fn weighted_integral(
    weight: &dyn PlanarWeight,
    kernel: &NonRadialKernel,
    mut f: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    let (panels, per_panel, radial) = (8, 32, 64);
    let gl_t = GaussLegendre::new(per_panel);
    let gl_r = GaussLegendre::new(radial);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let (t0, t1) = (2.0 * PI * p as f64 / panels as f64, 2.0 * PI * (p + 1) as f64 / panels as f64);
        for (theta, wt) in gl_t.mapped(t0, t1) {
            let dir = Complex64::from_polar(1.0, theta);
            for piece in weight.ray_pieces(theta) {
                for (r, wr) in gl_r.mapped(piece.a, piece.b) {
                    let z = dir * r;
                    let w = kernel.weight(z)?;
                    if w > 0.0 {
                        acc += f(z)? * (wt * wr * r * w);
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// Non-radial kernel of a disk bump inside `|z| ≤ 1/2`: reproducing
/// property and trace by an independent quadrature, containment between
/// the flat-disk and annulus kernels, and closeness of the rescaled
/// diagonal to the hard-edge limit on `α ∈ [0, 2]`.
pub(super) fn non_radial_kernel(config: &ExperimentConfig) -> Result<Outcome> {
    let n = config.sizes[0];
    let chi = 1.0;
    let bump = DiskBump::new(Complex64::new(0.2, 0.0), 0.3, 5.0)?;
    let kernel = NonRadialKernel::new(bump, n, chi, NonRadialOptions::default())?;

    let trace = weighted_integral(&bump, &kernel, |w| Ok(Complex64::new(kernel.eval_diag(w)?, 0.0)))?.re;
    let trace_err = (trace - n as f64).abs() / n as f64;

    let probes = [
        (Complex64::new(0.9, 0.1), Complex64::new(-0.3, 0.6)),
        (Complex64::new(0.2, 0.0), Complex64::new(0.0, -0.95)),
        (Complex64::new(-0.7, -0.2), Complex64::new(-0.7, -0.2)),
    ];
    let mut repro_err: f64 = 0.0;
    for (z, u) in probes {
        let direct = kernel.eval(z, u)?;
        let via = weighted_integral(&bump, &kernel, |w| Ok(kernel.eval(z, w)? * kernel.eval(w, u)?))?;
        repro_err = repro_err.max((via - direct).norm() / direct.norm());
    }

    let flat: Vec<f64> = (0..n).map(|k| ((k + 1) as f64 / PI).ln()).collect();
    let inner = 0.5f64;
    let annulus: Vec<f64> = (0..n)
        .map(|k| ((k + 1) as f64 / PI).ln() - (-(inner.powi(2 * k as i32 + 2))).ln_1p())
        .collect();
    let lower = RadialKernel::unweighted(flat)?;
    let upper = RadialKernel::unweighted(annulus)?;
    let nf = n as f64;
    let mut points: Vec<Complex64> = disk_grid(0.95, 0.05);
    let alphas: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
    points.extend(alphas.iter().map(|a| Complex64::new(1.0 - a / nf, 0.0)));
    let mut sandwich: f64 = 0.0;
    for &z in &points {
        let k = kernel.eval_diag(z)?;
        let lo = lower.eval_series(z, z)?.re;
        let hi = upper.eval_series(z, z)?.re;
        sandwich = sandwich.max((lo - k) / k).max((k - hi) / k);
    }

    let mut edge_err: f64 = 0.0;
    let mut table = Table::new(
        "non_radial_kernel",
        &["alpha", "rescaled_kernel", "hard_edge_limit", "lower", "upper"],
    );
    let scale = PI / (nf * nf);
    for &a in &alphas {
        let z = Complex64::new(1.0 - a / nf, 0.0);
        let k = kernel.eval_diag(z)? * scale;
        let lim = limit_edge_kernel_hard(Complex64::new(2.0 * a, 0.0)).re;
        edge_err = edge_err.max((k - lim).abs() / lim);
        table.push(vec![
            fmt(a),
            fmt(k),
            fmt(lim),
            fmt(lower.eval_series(z, z)?.re * scale),
            fmt(upper.eval_series(z, z)?.re * scale),
        ]);
    }

    let details = BTreeMap::from([
        ("trace_rel_error".into(), trace_err),
        ("reproducing_rel_error".into(), repro_err),
        ("sandwich_violation".into(), sandwich.max(0.0)),
        ("edge_rel_error".into(), edge_err),
        ("condition_estimate".into(), kernel.condition_estimate()),
    ]);
    let pass = trace_err <= REPRODUCING_TOL
        && repro_err <= REPRODUCING_TOL
        && sandwich <= SANDWICH_TOL
        && edge_err <= config.tolerance;
    Ok(outcome(edge_err, pass, details, vec![table]))
}
