//! Named, seeded experiments with CSV/JSON artifacts and pass/fail
//! verdicts.

mod deterministic;
mod sampling;
mod zeros;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kac::CoefficientLaw;
use crate::kostlan::GasSpec;
use crate::limit_laws::LimitLaw;
use crate::potentials::RadialPotential;

pub use sampling::{check_hypotheses, rescale_for};
pub use zeros::{edge_intensity, kac_replicas, EdgeIntensityRow, KacReplica};

/// Every acceptance experiment, in order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    HardExponential,
    GumbelStrong,
    VeryWeak,
    Annulus,
    FiniteParticles,
    HardEdgeKernel,
    GafCovariance,
    EdgeBergman,
    EdgeDistinction,
    KacIndependence,
    BlockDecay,
    Inversion,
    GumbelFromWeak,
    NonRadialKernel,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 14] = [
        ExperimentKind::HardExponential,
        ExperimentKind::GumbelStrong,
        ExperimentKind::VeryWeak,
        ExperimentKind::Annulus,
        ExperimentKind::FiniteParticles,
        ExperimentKind::HardEdgeKernel,
        ExperimentKind::GafCovariance,
        ExperimentKind::EdgeBergman,
        ExperimentKind::EdgeDistinction,
        ExperimentKind::KacIndependence,
        ExperimentKind::BlockDecay,
        ExperimentKind::Inversion,
        ExperimentKind::GumbelFromWeak,
        ExperimentKind::NonRadialKernel,
    ];

    /// Acceptance criterion number (1-based).
    pub fn criterion(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::HardExponential => "hard_exponential",
            ExperimentKind::GumbelStrong => "gumbel_strong",
            ExperimentKind::VeryWeak => "very_weak",
            ExperimentKind::Annulus => "annulus",
            ExperimentKind::FiniteParticles => "finite_particles",
            ExperimentKind::HardEdgeKernel => "hard_edge_kernel",
            ExperimentKind::GafCovariance => "gaf_covariance",
            ExperimentKind::EdgeBergman => "edge_bergman",
            ExperimentKind::EdgeDistinction => "edge_distinction",
            ExperimentKind::KacIndependence => "kac_independence",
            ExperimentKind::BlockDecay => "block_decay",
            ExperimentKind::Inversion => "inversion",
            ExperimentKind::GumbelFromWeak => "gumbel_from_weak",
            ExperimentKind::NonRadialKernel => "non_radial_kernel",
        }
    }

    /// Experiments whose verdict depends on random sampling.
    pub fn is_monte_carlo(self) -> bool {
        matches!(
            self,
            ExperimentKind::HardExponential
                | ExperimentKind::GumbelStrong
                | ExperimentKind::VeryWeak
                | ExperimentKind::Annulus
                | ExperimentKind::FiniteParticles
                | ExperimentKind::EdgeDistinction
                | ExperimentKind::KacIndependence
        )
    }

    pub fn is_sampling(self) -> bool {
        self.criterion() <= 5
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Reduced sizes at 1.5 times the tolerance.
    Fast,
    Full,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Suite::Fast),
            "full" => Ok(Suite::Full),
            _ => Err(Error::Config(format!("unknown suite '{s}' (expected fast or full)"))),
        }
    }
}

/// One experiment run, as read from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Gas of the sampling experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gas: Option<GasSpec>,
    /// Limit law of the sampling experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<LimitLaw>,
    /// Monte Carlo replicas; ignored by deterministic experiments.
    #[serde(default)]
    pub replicas: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub tolerance: f64,
    /// Sizes swept by deterministic experiments, or the polynomial degree
    /// of the Kac experiments.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientLaw>,
}

const ACCEPTANCE_SEED: u64 = 20_240_917;

fn gas(n: usize, chi: f64, potential: RadialPotential) -> Option<GasSpec> {
    Some(GasSpec::lebesgue(n, chi, potential).expect("acceptance gas is valid"))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// The configuration of acceptance criterion `kind`.
    pub fn acceptance(kind: ExperimentKind, suite: Suite) -> Self {
        let fast = suite == Suite::Fast;
        let pick = |full: usize, reduced: usize| if fast { reduced } else { full };
        let base = ExperimentConfig {
            experiment: kind,
            gas: None,
            law: None,
            replicas: 0,
            seed: ACCEPTANCE_SEED + kind.criterion() as u64,
            output_dir: None,
            tolerance: 0.0,
            sizes: Vec::new(),
            coefficients: None,
        };
        let mut cfg = match kind {
            ExperimentKind::HardExponential => ExperimentConfig {
                gas: gas(pick(1000, 250), 1.0, RadialPotential::HardEdgeFlat { inner: 0.0 }),
                law: Some(LimitLaw::HardExponential {}),
                replicas: pick(4000, 2000),
                tolerance: 0.035,
                ..base
            },
            ExperimentKind::GumbelStrong => ExperimentConfig {
                gas: gas(pick(5000, 1000), 1.0, RadialPotential::PowerQ { q: 2.0 }),
                law: Some(LimitLaw::GumbelStrong { q: 2.0, q_tilde: None }),
                replicas: pick(4000, 2000),
                tolerance: 0.05,
                ..base
            },
            ExperimentKind::VeryWeak => ExperimentConfig {
                gas: gas(pick(500, 200), 1.0, RadialPotential::CircleLog),
                law: Some(LimitLaw::VeryWeak { radius: 1.0, chi: 1.0 }),
                replicas: pick(4000, 2000),
                tolerance: 0.04,
                ..base
            },
            ExperimentKind::Annulus => ExperimentConfig {
                gas: gas(pick(500, 200), 1.0, RadialPotential::Annulus { radius: 1.5, tail_q: 2.0 }),
                law: Some(LimitLaw::Annulus { radius: 1.5, chi: 1.0 }),
                replicas: pick(4000, 2000),
                tolerance: 0.04,
                ..base
            },
            ExperimentKind::FiniteParticles => ExperimentConfig {
                gas: gas(
                    pick(2000, 500),
                    1.0,
                    RadialPotential::PowerTail {
                        alpha: 3.0,
                        gamma: 1.0,
                        l_plus: 0.5,
                        l_minus: 1.5,
                    },
                ),
                law: Some(LimitLaw::FiniteParticles {
                    alpha: 3.0,
                    chi: 1.0,
                    gamma: 1.0,
                    l_plus: 0.5,
                    l_minus: 1.5,
                }),
                replicas: pick(4000, 2000),
                tolerance: 0.05,
                ..base
            },
            ExperimentKind::HardEdgeKernel => ExperimentConfig {
                sizes: if fast { vec![125, 250, 500, 1000] } else { vec![250, 500, 1000, 2000] },
                tolerance: 0.01,
                ..base
            },
            ExperimentKind::GafCovariance => ExperimentConfig {
                sizes: vec![pick(10_000, 2_500)],
                tolerance: 5e-3,
                ..base
            },
            ExperimentKind::EdgeBergman => ExperimentConfig {
                sizes: vec![50, 200],
                tolerance: 0.5,
                ..base
            },
            ExperimentKind::EdgeDistinction => ExperimentConfig {
                sizes: vec![pick(500, 200)],
                replicas: pick(4000, 2000),
                coefficients: Some(CoefficientLaw::ComplexGaussian),
                tolerance: 3.0,
                ..base
            },
            ExperimentKind::KacIndependence => ExperimentConfig {
                sizes: vec![pick(300, 150)],
                replicas: 2000,
                coefficients: Some(CoefficientLaw::ComplexGaussian),
                tolerance: 3.0 / 2000f64.sqrt(),
                ..base
            },
            ExperimentKind::BlockDecay => ExperimentConfig {
                sizes: vec![100, 200],
                tolerance: 0.5,
                ..base
            },
            ExperimentKind::Inversion => ExperimentConfig {
                sizes: vec![20],
                tolerance: 1e-6,
                ..base
            },
            ExperimentKind::GumbelFromWeak => ExperimentConfig {
                sizes: vec![50, 100, 200, 400],
                tolerance: 0.05,
                ..base
            },
            ExperimentKind::NonRadialKernel => ExperimentConfig {
                sizes: vec![50],
                tolerance: 0.15,
                ..base
            },
        };
        if fast {
            cfg.tolerance *= 1.5;
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.experiment;
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::Config(format!("{kind}: tolerance must be positive")));
        }
        if kind.is_monte_carlo() && self.replicas == 0 {
            return Err(Error::Config(format!("{kind}: replicas must be >= 1")));
        }
        if kind.is_sampling() {
            let (Some(gas), Some(law)) = (&self.gas, &self.law) else {
                return Err(Error::Config(format!("{kind}: both [gas] and [law] are required")));
            };
            gas.validate()?;
            law.validate()?;
            check_hypotheses(kind, gas, law)?;
        } else {
            if self.gas.is_some() || self.law.is_some() {
                return Err(Error::Config(format!("{kind}: [gas] and [law] apply only to sampling experiments")));
            }
            if self.sizes.is_empty() || self.sizes.contains(&0) {
                return Err(Error::Config(format!("{kind}: sizes must be a nonempty list of positive integers")));
            }
        }
        Ok(())
    }

    /// Headline size reported in summaries.
    pub fn n(&self) -> usize {
        match &self.gas {
            Some(g) => g.n,
            None => self.sizes.last().copied().unwrap_or(0),
        }
    }
}

/// A CSV artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.write_to(fs::File::create(path)?)
    }

    /// Writes the table as CSV: comma separated, header row, LF endings.
    pub fn write_to(&self, sink: impl std::io::Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(sink);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("CSV error: {other:?}")),
    }
}

/// Outcome of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub replicas: usize,
    pub seed: u64,
    /// KS distance for sampling experiments; the experiment's headline
    /// error statistic otherwise.
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Largest truncation bound of the limit CDF over the sample.
    pub tail_bound: f64,
    pub wall_time_s: f64,
    pub details: BTreeMap<String, f64>,
    pub rescaled: Vec<f64>,
    pub tables: Vec<Table>,
}

/// Summary written next to the CSV artifacts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub replicas: usize,
    pub seed: u64,
    pub ks: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub tail_bound: f64,
    pub wall_time_s: f64,
    pub details: BTreeMap<String, f64>,
}

impl ExperimentResult {
    pub fn summary(&self) -> Summary {
        Summary {
            experiment: self.experiment,
            n: self.n,
            replicas: self.replicas,
            seed: self.seed,
            ks: self.statistic,
            tolerance: self.tolerance,
            pass: self.pass,
            tail_bound: self.tail_bound,
            wall_time_s: self.wall_time_s,
            details: self.details.clone(),
        }
    }

    /// Writes every table as `<name>.csv` and the summary as
    /// `<experiment>_summary.json` under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            t.write(&dir.join(format!("{}.csv", t.name)))?;
        }
        let json = serde_json::to_string_pretty(&self.summary()).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(dir.join(format!("{}_summary.json", self.experiment)), json + "\n")?;
        Ok(())
    }

    pub fn verdict_line(&self) -> String {
        format!(
            "{} criterion {:>2} {:<18} statistic = {:.6e} tolerance = {:.3e} ({:.1} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.experiment.criterion(),
            self.experiment.name(),
            self.statistic,
            self.tolerance,
            self.wall_time_s
        )
    }
}

pub(crate) struct Outcome {
    pub statistic: f64,
    pub pass: bool,
    pub tail_bound: f64,
    pub details: BTreeMap<String, f64>,
    pub rescaled: Vec<f64>,
    pub tables: Vec<Table>,
}

/// Runs one experiment and writes its artifacts when `output_dir` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let out = match config.experiment {
        k if k.is_sampling() => sampling::run(config)?,
        ExperimentKind::HardEdgeKernel => deterministic::hard_edge_kernel(config)?,
        ExperimentKind::GafCovariance => deterministic::gaf_covariance_convergence(config)?,
        ExperimentKind::EdgeBergman => deterministic::edge_bergman(config)?,
        ExperimentKind::EdgeDistinction => zeros::edge_distinction(config)?,
        ExperimentKind::KacIndependence => zeros::kac_independence(config)?,
        ExperimentKind::BlockDecay => deterministic::block_decay(config)?,
        ExperimentKind::Inversion => deterministic::inversion(config)?,
        ExperimentKind::GumbelFromWeak => deterministic::gumbel_from_weak(config)?,
        ExperimentKind::NonRadialKernel => deterministic::non_radial_kernel(config)?,
        _ => unreachable!(),
    };
    let result = ExperimentResult {
        experiment: config.experiment,
        n: config.n(),
        replicas: config.replicas,
        seed: config.seed,
        statistic: out.statistic,
        tolerance: config.tolerance,
        pass: out.pass,
        tail_bound: out.tail_bound,
        wall_time_s: start.elapsed().as_secs_f64(),
        details: out.details,
        rescaled: out.rescaled,
        tables: out.tables,
    };
    if let Some(dir) = &config.output_dir {
        result.write(dir)?;
    }
    Ok(result)
}

/// Aggregated verdicts of a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub results: Vec<ExperimentResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failed(&self) -> Vec<ExperimentKind> {
        self.results.iter().filter(|r| !r.pass).map(|r| r.experiment).collect()
    }
}

/// Runs every acceptance experiment; artifacts go under `output_dir/<name>`
/// when a directory is given. `on_result` sees each result as it lands.
pub fn verify_all(
    suite: Suite,
    output_dir: Option<&Path>,
    mut on_result: impl FnMut(&ExperimentResult),
) -> Result<SuiteReport> {
    let mut results = Vec::with_capacity(ExperimentKind::ALL.len());
    for kind in ExperimentKind::ALL {
        let mut cfg = ExperimentConfig::acceptance(kind, suite);
        cfg.output_dir = output_dir.map(|d| d.join(kind.name()));
        let r = run_experiment(&cfg)?;
        on_result(&r);
        results.push(r);
    }
    Ok(SuiteReport { suite, results })
}

pub(crate) fn fmt(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests;
