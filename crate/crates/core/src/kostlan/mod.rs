//! Kostlan decomposition of radial gases.
//!
//! For a radial determinantal gas of `n` particles the set of moduli has the
//! law of `{X_0, …, X_{n-1}}`, independent, with `X_k` of density
//! proportional to `r^{2k+1+e} e^{-2(n+χ)V(r)}` where `|x|^e dℓ(x)` is the
//! reference measure. Extremes are therefore sampled one component at a time.

mod table;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{RadialPotential, Reference};
use crate::rng::{self, Role};

pub use table::QuadTable;

fn lebesgue() -> Reference {
    Reference::Lebesgue
}

/// One finite gas: `n` particles, parameter `χ`, potential and reference
/// measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSpec {
    pub n: usize,
    pub chi: f64,
    pub potential: RadialPotential,
    #[serde(default = "lebesgue")]
    pub reference: Reference,
}

impl GasSpec {
    pub fn new(n: usize, chi: f64, potential: RadialPotential, reference: Reference) -> Result<Self> {
        let spec = GasSpec {
            n,
            chi,
            potential,
            reference,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lebesgue(n: usize, chi: f64, potential: RadialPotential) -> Result<Self> {
        Self::new(n, chi, potential, Reference::Lebesgue)
    }

    pub fn measure_exponent(&self) -> f64 {
        self.reference.measure_exponent()
    }

    /// `2(n + χ)`, the coefficient of `V` in the component densities.
    pub fn strength(&self) -> f64 {
        2.0 * (self.n as f64 + self.chi)
    }

    /// Radial exponent `p_k = 2k + 2 + e`: component `k` has density
    /// `∝ e^{p_k s − 2(n+χ)V(e^s)}` in `s = ln r`.
    pub fn power(&self, k: usize) -> f64 {
        2.0 * k as f64 + 2.0 + self.measure_exponent()
    }

    /// Checks parameters and integrability of every component.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("gas needs n >= 1".into()));
        }
        if !(self.chi >= 0.0) || !self.chi.is_finite() {
            return Err(Error::InvalidParameter(format!("gas needs χ >= 0 (got {})", self.chi)));
        }
        if let Reference::LambdaChi { chi } = self.reference {
            if !(chi >= 0.0) || !chi.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "reference Λ_χ needs χ >= 0 (got {chi})"
                )));
            }
        }
        self.potential.validate()?;
        let growth = self.potential.log_growth();
        let c = self.strength();
        let e = self.measure_exponent();
        if growth.at_infinity.is_finite() {
            let slope = self.power(self.n - 1) - c * growth.at_infinity;
            if slope >= 0.0 {
                let first = ((c * growth.at_infinity - 2.0 - e) / 2.0).ceil().max(0.0) as usize;
                return Err(Error::Divergent {
                    k: first.min(self.n - 1),
                    reason: format!(
                        "density decays like r^{} at infinity",
                        self.power(first.min(self.n - 1)) - 1.0 - c * growth.at_infinity
                    ),
                });
            }
        }
        if growth.at_zero.is_finite() && self.power(0) + c * growth.at_zero <= 0.0 {
            return Err(Error::Divergent {
                k: 0,
                reason: "density is not integrable at the origin".into(),
            });
        }
        Ok(())
    }
}

/// The sorted moduli of one replica.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuliSample {
    pub moduli: Vec<f64>,
    pub seed: u64,
    pub replica_index: u64,
}

impl ModuliSample {
    pub fn max(&self) -> f64 {
        *self.moduli.last().expect("n >= 1")
    }
}

/// Law of a single Kostlan component.
#[derive(Clone, Debug)]
pub enum ComponentLaw {
    /// `V = q·max{0, ln r}`: density `∝ r^{p−1}` on `[0, 1]` and
    /// `∝ r^{p−1−c}` beyond, with `c = 2q(n+χ)`.
    Power { p: f64, c: f64 },
    /// `V = 0` on `[inner, 1]`, `+∞` elsewhere.
    HardFlat { p: f64, inner: f64 },
    Tabulated(Box<QuadTable>),
}

impl ComponentLaw {
    /// `ln ∫₀^∞ r^{p−1} e^{−2(n+χ)V(r)} dr`.
    pub fn log_normalizer(&self) -> f64 {
        match self {
            ComponentLaw::Power { p, c } => (1.0 / p + 1.0 / (c - p)).ln(),
            ComponentLaw::HardFlat { p, inner } => {
                let outer_mass = if *inner > 0.0 {
                    -(p * inner.ln()).exp_m1()
                } else {
                    1.0
                };
                outer_mass.ln() - p.ln()
            }
            ComponentLaw::Tabulated(t) => t.log_normalizer(),
        }
    }

    /// `(P(X ≤ m), P(X > m))`.
    pub fn cdf_sf(&self, m: f64) -> (f64, f64) {
        if m <= 0.0 {
            return (0.0, 1.0);
        }
        if m == f64::INFINITY {
            return (1.0, 0.0);
        }
        let s = m.ln();
        match self {
            ComponentLaw::Power { p, c } => {
                let pz = 1.0 + p / (c - p);
                if s <= 0.0 {
                    let f = (p * s).exp() / pz;
                    (f, 1.0 - f)
                } else {
                    let g = ((p - c) * s).exp() / ((c - p) / p * pz);
                    (1.0 - g, g)
                }
            }
            ComponentLaw::HardFlat { p, inner } => {
                if s >= 0.0 {
                    return (1.0, 0.0);
                }
                if *inner > 0.0 && m <= *inner {
                    return (0.0, 1.0);
                }
                let ps = p * s;
                let (lo_pow, denom) = if *inner > 0.0 {
                    let a = p * inner.ln();
                    (a.exp(), -a.exp_m1())
                } else {
                    (0.0, 1.0)
                };
                let f = (ps.exp() - lo_pow) / denom;
                let g = -ps.exp_m1() / denom;
                (f, g)
            }
            ComponentLaw::Tabulated(t) => t.cdf_sf_log(s),
        }
    }

    pub fn cdf(&self, m: f64) -> f64 {
        self.cdf_sf(m).0
    }

    /// Quantile of `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile needs u in (0,1) (got {u})")));
        }
        self.quantile_pair(u, 1.0 - u)
    }

    /// Quantile given `u` and its complement `v = 1 − u`; the smaller of the
    /// two drives the computation so both tails keep full precision.
    pub fn quantile_pair(&self, u: f64, v: f64) -> Result<f64> {
        let s = match self {
            ComponentLaw::Power { p, c } => {
                let pz = 1.0 + p / (c - p);
                let p_in = 1.0 / pz;
                if u <= p_in {
                    (u / p_in).ln() / p
                } else {
                    (v * (c - p) / p * pz).ln() / (p - c)
                }
            }
            ComponentLaw::HardFlat { p, inner } => {
                let (lo_pow, denom) = if *inner > 0.0 {
                    let a = p * inner.ln();
                    (a.exp(), -a.exp_m1())
                } else {
                    (0.0, 1.0)
                };
                if u <= 0.5 {
                    (lo_pow + u * denom).ln() / p
                } else {
                    (-v * denom).ln_1p() / p
                }
            }
            ComponentLaw::Tabulated(t) => t.quantile_log(u, v)?,
        };
        Ok(s.exp())
    }
}

fn closed_form(spec: &GasSpec, k: usize) -> Option<ComponentLaw> {
    let p = spec.power(k);
    let c = spec.strength();
    match &spec.potential {
        RadialPotential::CircleLog => Some(ComponentLaw::Power { p, c }),
        RadialPotential::PowerQ { q } => Some(ComponentLaw::Power { p, c: c * q }),
        RadialPotential::HardEdgeFlat { inner } => Some(ComponentLaw::HardFlat { p, inner: *inner }),
        _ => None,
    }
}

/// Builds the law of component `k`, using a closed form when the family has
/// one unless `force_quadrature` is set.
pub fn component_law(spec: &GasSpec, k: usize, force_quadrature: bool) -> Result<ComponentLaw> {
    if k >= spec.n {
        return Err(Error::InvalidParameter(format!(
            "component index {k} out of range for n = {}",
            spec.n
        )));
    }
    if !force_quadrature {
        if let Some(law) = closed_form(spec, k) {
            return Ok(law);
        }
    }
    let table = QuadTable::build(
        Arc::new(spec.potential.clone()),
        spec.power(k),
        spec.strength(),
        k,
    )?;
    Ok(ComponentLaw::Tabulated(Box::new(table)))
}

/// `P(X_k ≤ m)`.
pub fn component_cdf(k: usize, spec: &GasSpec, m: f64) -> Result<f64> {
    if !(m >= 0.0) {
        return Err(Error::Domain(format!("component cdf needs m >= 0 (got {m})")));
    }
    Ok(component_law(spec, k, false)?.cdf(m))
}

/// The `u`-quantile of component `k`.
pub fn sample_component(k: usize, spec: &GasSpec, u: f64) -> Result<f64> {
    component_law(spec, k, false)?.quantile(u)
}

/// All component laws of one gas, ready for repeated sampling.
#[derive(Clone, Debug)]
pub struct GasSampler {
    spec: GasSpec,
    laws: Vec<ComponentLaw>,
}

impl GasSampler {
    pub fn new(spec: GasSpec) -> Result<Self> {
        Self::build(spec, false)
    }

    /// Uses the quadrature tables for every family.
    pub fn with_quadrature(spec: GasSpec) -> Result<Self> {
        Self::build(spec, true)
    }

    fn build(spec: GasSpec, force: bool) -> Result<Self> {
        spec.validate()?;
        let potential = Arc::new(spec.potential.clone());
        let laws = (0..spec.n)
            .into_par_iter()
            .map(|k| match (force, closed_form(&spec, k)) {
                (false, Some(law)) => Ok(law),
                _ => QuadTable::build(potential.clone(), spec.power(k), spec.strength(), k)
                    .map(|t| ComponentLaw::Tabulated(Box::new(t))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GasSampler { spec, laws })
    }

    pub fn spec(&self) -> &GasSpec {
        &self.spec
    }

    pub fn component(&self, k: usize) -> &ComponentLaw {
        &self.laws[k]
    }

    pub fn components(&self) -> &[ComponentLaw] {
        &self.laws
    }

    fn draw(&self, seed: u64, replica: u64) -> Result<Vec<f64>> {
        let mut stream = rng::stream(seed, replica, Role::Moduli);
        self.laws
            .iter()
            .map(|law| {
                let u = rng::open_unit(&mut stream);
                law.quantile_pair(u, 1.0 - u)
            })
            .collect()
    }

    /// Moduli of replica `replica`, sorted ascending. Component `k` consumes
    /// the `k`-th variate of the replica's stream.
    pub fn sample_moduli(&self, seed: u64, replica: u64) -> Result<ModuliSample> {
        let mut moduli = self.draw(seed, replica)?;
        moduli.sort_by(f64::total_cmp);
        Ok(ModuliSample {
            moduli,
            seed,
            replica_index: replica,
        })
    }

    /// Largest modulus of replica `replica`; equal to
    /// `sample_moduli(seed, replica).max()`.
    pub fn sample_max(&self, seed: u64, replica: u64) -> Result<f64> {
        Ok(self.draw(seed, replica)?.into_iter().fold(0.0, f64::max))
    }

    /// `P(max ≤ t) = ∏ₖ P(X_k ≤ t)`.
    pub fn max_cdf(&self, t: f64) -> f64 {
        let mut log = 0.0;
        for law in &self.laws {
            let (f, g) = law.cdf_sf(t);
            if f <= 0.0 {
                return 0.0;
            }
            log += if f > 0.5 { (-g).ln_1p() } else { f.ln() };
        }
        log.exp()
    }
}

/// Affine or power rescalings applied to an extreme before comparing it
/// with its limit law.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum RescaleScheme {
    Identity {},
    /// `n(x − 1 − ε_n)`.
    LinearGumbel { n: usize, eps: f64 },
    /// `n²(1 − x)`.
    QuadraticHard { n: usize },
    /// `n^{−1/α} x`.
    Power { n: usize, alpha: f64 },
    /// `2χ(x − 1 − ε_χ/2)`.
    WeakGumbel { chi: f64, eps: f64 },
}

pub fn rescale_extreme(x: f64, scheme: &RescaleScheme) -> f64 {
    match *scheme {
        RescaleScheme::Identity {} => x,
        RescaleScheme::LinearGumbel { n, eps } => n as f64 * (x - 1.0 - eps),
        RescaleScheme::QuadraticHard { n } => {
            let n = n as f64;
            n * n * (1.0 - x)
        }
        RescaleScheme::Power { n, alpha } => (n as f64).powf(-1.0 / alpha) * x,
        RescaleScheme::WeakGumbel { chi, eps } => 2.0 * chi * (x - 1.0 - eps / 2.0),
    }
}
