//! Experiments on the zeros of Kac polynomials.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{fmt, ExperimentConfig, Outcome, Table};
use crate::error::{Error, Result};
use crate::kac::{count_in_disk, rescale_near_one, sample_roots, split_inner_outer, CoefficientLaw};
use crate::kernels::{gaf_intensity, limit_edge_kernel_e};
use crate::stats::{binned_intensity, pearson_corr, Bin, BinEstimate};

/// Zeros of one sampled polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct KacReplica {
    pub replica: u64,
    pub roots: Vec<Complex64>,
    pub max_residual: f64,
}

/// Zeros of `replicas` independent degree-`n` polynomials, replica `i`
/// drawn from stream `(seed, i)`.
pub fn kac_replicas(n: usize, law: CoefficientLaw, seed: u64, replicas: usize) -> Result<Vec<KacReplica>> {
    (0..replicas as u64)
        .into_par_iter()
        .map(|i| {
            let set = sample_roots(n, law, seed, i)?;
            Ok(KacReplica {
                replica: i,
                max_residual: set.max_residual(),
                roots: set.roots,
            })
        })
        .collect()
}

/// Binned intensity of rescaled zeros with the two limiting intensities
/// at the bin centre: `gaf` for Kac zeros, `coulomb = K_E(z, z)` for the
/// Coulomb gas with `q = 0`, `Q = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeIntensityRow {
    pub estimate: BinEstimate,
    pub gaf: f64,
    pub coulomb: f64,
}

pub fn edge_intensity(rescaled: &[Vec<Complex64>], bins: &[Bin]) -> Result<Vec<EdgeIntensityRow>> {
    binned_intensity(rescaled, bins)?
        .into_iter()
        .map(|estimate| {
            let b = estimate.bin;
            let centre = Complex64::new(0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1));
            Ok(EdgeIntensityRow {
                estimate,
                gaf: gaf_intensity(centre),
                coulomb: limit_edge_kernel_e(0.0, 1.0, centre, centre)?.re,
            })
        })
        .collect()
}

fn coefficients(config: &ExperimentConfig) -> CoefficientLaw {
    config.coefficients.unwrap_or(CoefficientLaw::ComplexGaussian)
}

const ANCHOR_TOL: f64 = 1e-10;
/// Minimum distance, in standard errors, from the Coulomb intensity.
const SEPARATION_SE: f64 = 5.0;

/// Intensity of rescaled Kac zeros in `[−1/2, 1/2)²`: within `tolerance`
/// standard errors of the zero intensity `1/(12π)` of the limiting
/// Gaussian analytic function and at least five away from the Coulomb
/// edge intensity `1/(6π)`; plus the deterministic ratio of the two.
pub(super) fn edge_distinction(config: &ExperimentConfig) -> Result<Outcome> {
    let n = config.sizes[0];
    let coulomb = limit_edge_kernel_e(0.0, 1.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))?.re;
    let gaf = gaf_intensity(Complex64::new(0.0, 0.0));
    let ratio = coulomb / gaf;
    let anchor_ok = (ratio - 2.0).abs() <= ANCHOR_TOL
        && (coulomb - 1.0 / (6.0 * PI)).abs() <= ANCHOR_TOL
        && (gaf - 1.0 / (12.0 * PI)).abs() <= ANCHOR_TOL;

    let reps = kac_replicas(n, coefficients(config), config.seed, config.replicas)?;
    let rescaled: Vec<Vec<Complex64>> = reps.iter().map(|r| rescale_near_one(&r.roots, n)).collect();
    let bin = Bin {
        x0: -0.5,
        x1: 0.5,
        y0: -0.5,
        y1: 0.5,
    };
    let est = binned_intensity(&rescaled, &[bin])?[0];
    if est.std_error == 0.0 {
        return Err(Error::Domain("no zeros landed in the central bin; increase replicas".into()));
    }
    let se_gaf = (est.mean - 1.0 / (12.0 * PI)).abs() / est.std_error;
    let se_coulomb = (est.mean - 1.0 / (6.0 * PI)).abs() / est.std_error;

    let mut per_replica = Table::new("edge_distinction", &["replica", "zeros_in_bin", "max_residual"]);
    for (r, pts) in reps.iter().zip(&rescaled) {
        let count = pts.iter().filter(|z| bin.contains(**z)).count();
        per_replica.push(vec![r.replica.to_string(), count.to_string(), fmt(r.max_residual)]);
    }
    let mut profile = Table::new(
        "edge_distinction_bins",
        &["x0", "x1", "y0", "y1", "intensity", "std_error", "gaf", "coulomb"],
    );
    for row in edge_intensity(&rescaled, &Bin::grid(-3.0, 3.0, -3.0, 3.0, 12, 12))? {
        let b = row.estimate.bin;
        profile.push(
            [b.x0, b.x1, b.y0, b.y1, row.estimate.mean, row.estimate.std_error, row.gaf, row.coulomb]
                .iter()
                .map(|v| fmt(*v))
                .collect(),
        );
    }
    let details = BTreeMap::from([
        ("coulomb_intensity".into(), coulomb),
        ("gaf_intensity".into(), gaf),
        ("anchor_ratio".into(), ratio),
        ("bin_intensity".into(), est.mean),
        ("bin_std_error".into(), est.std_error),
        ("se_from_gaf".into(), se_gaf),
        ("se_from_coulomb".into(), se_coulomb),
        (
            "max_residual".into(),
            reps.iter().map(|r| r.max_residual).fold(0.0, f64::max),
        ),
    ]);
    let pass = anchor_ok && se_gaf <= config.tolerance && se_coulomb >= SEPARATION_SE;
    Ok(Outcome {
        statistic: se_gaf,
        pass,
        tail_bound: 0.0,
        details,
        rescaled: Vec::new(),
        tables: vec![per_replica, profile],
    })
}

/// Correlation between the number of zeros in `|z| < 0.8` and the number
/// of inverted zeros in `|z| < 0.8`.
pub(super) fn kac_independence(config: &ExperimentConfig) -> Result<Outcome> {
    let n = config.sizes[0];
    let radius = 0.8;
    let origin = Complex64::new(0.0, 0.0);
    let reps = kac_replicas(n, coefficients(config), config.seed, config.replicas)?;
    let mut inner = Vec::with_capacity(reps.len());
    let mut outer = Vec::with_capacity(reps.len());
    let mut boundary = 0;
    let mut table = Table::new("kac_independence", &["replica", "inner_count", "outer_count"]);
    for r in &reps {
        let split = split_inner_outer(&r.roots);
        boundary += split.boundary;
        let (a, b) = (count_in_disk(&split.inner, origin, radius), count_in_disk(&split.outer, origin, radius));
        table.push(vec![r.replica.to_string(), a.to_string(), b.to_string()]);
        inner.push(a as f64);
        outer.push(b as f64);
    }
    let corr = pearson_corr(&inner, &outer)?;
    let m = reps.len() as f64;
    let details = BTreeMap::from([
        ("correlation".into(), corr),
        ("mean_inner".into(), inner.iter().sum::<f64>() / m),
        ("mean_outer".into(), outer.iter().sum::<f64>() / m),
        ("boundary_zeros".into(), boundary as f64),
    ]);
    Ok(Outcome {
        statistic: corr.abs(),
        pass: corr.abs() <= config.tolerance,
        tail_bound: 0.0,
        details,
        rescaled: Vec::new(),
        tables: vec![table],
    })
}
