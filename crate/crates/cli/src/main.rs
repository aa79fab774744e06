//! `coulomb`: seeded experiments on radial Coulomb gases and Kac zeros.
//!
//! Exit status is 0 on a passing verdict (or a plain tabulation), 1 when
//! an experiment runs but fails its tolerance, 2 on usage, configuration
//! or runtime errors.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use coulomb_core::experiment::{edge_intensity, kac_replicas, Table};
use coulomb_core::kac::{count_in_disk, rescale_near_one, split_inner_outer, CoefficientLaw};
use coulomb_core::kernels::{eval_limit_kernel, LimitKernelSpec, RadialKernel};
use coulomb_core::limit_laws::LimitLaw;
use coulomb_core::stats::Bin;
use coulomb_core::{run_experiment, verify_all, ExperimentConfig, ExperimentResult, GasSpec, Suite};

/// Radius of the disk in which inner and inverted outer zeros are counted.
const COUNT_RADIUS: f64 = 0.8;

#[derive(Parser)]
#[command(name = "coulomb", version, about = "Extremes and kernels of radial Coulomb gases, and Kac polynomial zeros")]
struct Cli {
    /// Master seed; overrides the seed of a config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV/JSON artifacts; tables go to stdout without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for replica loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample maximal moduli for a sampling config and test them against the limit law.
    SampleMax { config: PathBuf },
    /// Run any experiment config.
    Run { config: PathBuf },
    /// Tabulate a limit law CDF: columns t, cdf, tail_bound.
    LimitCdf {
        /// Law as JSON, e.g. '{"law":"hard_exponential"}'.
        #[arg(long)]
        law: String,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Evaluate a kernel at every pair of points: columns re_z, im_z, re_w, im_w, re_K, im_K.
    KernelEval {
        /// Limit kernel as JSON, e.g. '{"variant":"edge_hard"}'.
        #[arg(long, conflicts_with = "gas", required_unless_present = "gas")]
        limit: Option<String>,
        /// Finite-n weighted kernel of a gas given as JSON.
        #[arg(long)]
        gas: Option<String>,
        /// Point `re,im`; repeatable.
        #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Vec<Complex64>,
        /// Point `re,im`; repeatable.
        #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_complex)]
        w: Vec<Complex64>,
    },
    /// Zeros of Kac polynomials: per-replica inner/outer counts, plus the rescaled zeros n(z − 1) under --out.
    KacZeros {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        replicas: usize,
        #[arg(long, value_enum, default_value_t = Coefficients::ComplexGaussian)]
        law: Coefficients,
    },
    /// Binned intensity of rescaled Kac zeros n(z − 1) against both edge intensities.
    EdgeIntensity {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        replicas: usize,
        /// Bins per side of the square [−extent, extent]².
        #[arg(long, default_value_t = 12)]
        bins: usize,
        #[arg(long, default_value_t = 3.0)]
        extent: f64,
        #[arg(long, value_enum, default_value_t = Coefficients::ComplexGaussian)]
        law: Coefficients,
    },
    /// Run the acceptance suite.
    VerifyAll { suite: SuiteArg },
}

#[derive(Clone, Copy, ValueEnum)]
enum Coefficients {
    ComplexGaussian,
    UniformDiskNormalized,
    ComplexRademacher,
}

impl From<Coefficients> for CoefficientLaw {
    fn from(c: Coefficients) -> Self {
        match c {
            Coefficients::ComplexGaussian => CoefficientLaw::ComplexGaussian,
            Coefficients::UniformDiskNormalized => CoefficientLaw::UniformDiskNormalized,
            Coefficients::ComplexRademacher => CoefficientLaw::ComplexRademacher,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    let part = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Ok(Complex64::new(part(re)?, part(im)?))
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes `tables` as `<out>/<name>.csv`, or the first one to stdout.
fn emit(out: Option<&Path>, tables: &[Table]) -> anyhow::Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for t in tables {
                let path = dir.join(format!("{}.csv", t.name));
                t.write(&path).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        None => tables[0].write_to(io::stdout().lock())?,
    }
    Ok(())
}

fn report(r: &ExperimentResult) {
    println!("{}", r.verdict_line());
}

fn run_config(cli: &Cli, path: &Path, sampling_only: bool) -> anyhow::Result<bool> {
    let mut cfg = ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if sampling_only && !cfg.experiment.is_sampling() {
        bail!("{} is not a maximal-modulus experiment; use `run`", cfg.experiment);
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    let r = run_experiment(&cfg)?;
    report(&r);
    Ok(r.pass)
}

fn limit_cdf(law: &str, from: f64, to: f64, points: usize) -> anyhow::Result<Table> {
    let law: LimitLaw = serde_json::from_str(law).context("parsing --law")?;
    law.validate()?;
    if points < 2 || !(from < to) {
        bail!("need --points >= 2 and --from < --to");
    }
    let (lo, hi) = law.support();
    let mut table = Table::new("limit_cdf", &["t", "cdf", "tail_bound"]);
    for i in 0..points {
        let t = from + (to - from) * i as f64 / (points - 1) as f64;
        let (cdf, bound) = if t >= lo && t <= hi {
            let v = law.cdf_max(t)?;
            (v.cdf, v.tail_bound)
        } else {
            (law.cdf(t)?, 0.0)
        };
        table.push(vec![num(t), num(cdf), num(bound)]);
    }
    Ok(table)
}

fn kernel_eval(limit: Option<&str>, gas: Option<&str>, zs: &[Complex64], ws: &[Complex64]) -> anyhow::Result<Table> {
    let eval: Box<dyn Fn(Complex64, Complex64) -> coulomb_core::Result<Complex64>> = match (limit, gas) {
        (Some(spec), _) => {
            let spec: LimitKernelSpec = serde_json::from_str(spec).context("parsing --limit")?;
            spec.validate()?;
            Box::new(move |z, w| Ok(eval_limit_kernel(&spec, z, w)?.value))
        }
        (None, Some(gas)) => {
            let gas: GasSpec = serde_json::from_str(gas).context("parsing --gas")?;
            gas.validate()?;
            let kernel = RadialKernel::from_gas(&gas)?;
            Box::new(move |z, w| kernel.eval(z, w))
        }
        (None, None) => bail!("one of --limit or --gas is required"),
    };
    let mut table = Table::new("kernel_eval", &["re_z", "im_z", "re_w", "im_w", "re_K", "im_K"]);
    for &z in zs {
        for &w in ws {
            let k = eval(z, w)?;
            table.push([z.re, z.im, w.re, w.im, k.re, k.im].map(num).to_vec());
        }
    }
    Ok(table)
}

fn kac_zeros(degree: usize, replicas: usize, law: CoefficientLaw, seed: u64) -> anyhow::Result<Vec<Table>> {
    let sets = kac_replicas(degree, law, seed, replicas)?;
    let mut counts = Table::new(
        "kac_zeros",
        &["replica", "n", "n_inner", "n_outer", "inner_count_disk", "outer_count_disk"],
    );
    let mut points = Table::new("kac_points", &["replica", "re", "im"]);
    let origin = Complex64::new(0.0, 0.0);
    for set in &sets {
        let split = split_inner_outer(&set.roots);
        counts.push(vec![
            set.replica.to_string(),
            degree.to_string(),
            split.inner.len().to_string(),
            split.outer.len().to_string(),
            count_in_disk(&split.inner, origin, COUNT_RADIUS).to_string(),
            count_in_disk(&split.outer, origin, COUNT_RADIUS).to_string(),
        ]);
        for z in rescale_near_one(&set.roots, degree) {
            points.push(vec![set.replica.to_string(), num(z.re), num(z.im)]);
        }
    }
    Ok(vec![counts, points])
}

fn edge_table(
    degree: usize,
    replicas: usize,
    bins: usize,
    extent: f64,
    law: CoefficientLaw,
    seed: u64,
) -> anyhow::Result<Table> {
    if bins == 0 || !(extent > 0.0) {
        bail!("need --bins >= 1 and --extent > 0");
    }
    let rescaled: Vec<Vec<Complex64>> = kac_replicas(degree, law, seed, replicas)?
        .iter()
        .map(|r| rescale_near_one(&r.roots, degree))
        .collect();
    let grid = Bin::grid(-extent, extent, -extent, extent, bins, bins);
    let mut table = Table::new(
        "edge_intensity",
        &["x0", "x1", "y0", "y1", "intensity", "std_error", "gaf", "coulomb"],
    );
    for row in edge_intensity(&rescaled, &grid)? {
        let b = row.estimate.bin;
        table.push(
            [b.x0, b.x1, b.y0, b.y1, row.estimate.mean, row.estimate.std_error, row.gaf, row.coulomb]
                .map(num)
                .to_vec(),
        );
    }
    Ok(table)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let out = cli.out.as_deref();
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::SampleMax { config } => run_config(cli, config, true),
        Command::Run { config } => run_config(cli, config, false),
        Command::LimitCdf { law, from, to, points } => {
            emit(out, &[limit_cdf(law, *from, *to, *points)?])?;
            Ok(true)
        }
        Command::KernelEval { limit, gas, z, w } => {
            emit(out, &[kernel_eval(limit.as_deref(), gas.as_deref(), z, w)?])?;
            Ok(true)
        }
        Command::KacZeros { degree, replicas, law } => {
            emit(out, &kac_zeros(*degree, *replicas, (*law).into(), seed)?)?;
            Ok(true)
        }
        Command::EdgeIntensity {
            degree,
            replicas,
            bins,
            extent,
            law,
        } => {
            emit(out, &[edge_table(*degree, *replicas, *bins, *extent, (*law).into(), seed)?])?;
            Ok(true)
        }
        Command::VerifyAll { suite } => {
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::Full => Suite::Full,
            };
            let report = verify_all(suite, out, report)?;
            let failed = report.failed();
            if failed.is_empty() {
                println!("all {} criteria passed", report.results.len());
            } else {
                let names: Vec<String> = failed.iter().map(|k| k.to_string()).collect();
                println!("{} of {} criteria failed: {}", failed.len(), report.results.len(), names.join(", "));
            }
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
