//! Radial confining potentials.
//!
//! Every potential is a function `V: [0, ∞) → [0, +∞]` evaluated through
//! [`RadialPotential::eval`]. Samplers work in the logarithmic variable
//! `s = ln r` and use [`RadialPotential::eval_log`], which stays finite-safe
//! for `r` that would overflow or underflow an `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real number or `+∞`. Addition and multiplication by a nonnegative
/// scalar saturate at `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The value as an `f64` (`f64::INFINITY` for `+∞`).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::Finite(rhs)
    }
}

/// Scaling by a nonnegative factor; `0 · ∞` is taken to be `∞`, matching
/// `e^{-0·V}` being irrelevant wherever `V = ∞` (the particle is excluded).
impl Mul<f64> for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: f64) -> ExtReal {
        debug_assert!(rhs >= 0.0);
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(a * rhs),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

/// How strongly a potential confines the gas at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Confinement {
    /// `V(r) - ln r` stays bounded.
    Weak,
    /// `V(r) - ln r → ∞`.
    Strong,
    /// Particles confined to a bounded set.
    Hard,
}

/// Reference measure the gas is defined against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reference {
    /// Lebesgue measure on the plane.
    Lebesgue,
    /// `dΛ_χ(x) = |x|^{2(χ-1)} dℓ(x)`.
    LambdaChi { chi: f64 },
}

impl Reference {
    /// Exponent `e` such that the reference measure is `|x|^e dℓ(x)`.
    pub fn measure_exponent(self) -> f64 {
        match self {
            Reference::Lebesgue => 0.0,
            Reference::LambdaChi { chi } => 2.0 * (chi - 1.0),
        }
    }
}

/// Point mass on the circle of the given radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub radius: f64,
    pub mass: f64,
}

/// Radial mass spread over annuli: `rates[i]` is the mass per unit radius on
/// `[breaks[i], breaks[i+1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialDensity {
    pub breaks: Vec<f64>,
    pub rates: Vec<f64>,
}

/// A positive radial measure `ν` built from circle atoms and a piecewise
/// constant radial density.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasureSpec {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub density: Option<RadialDensity>,
}

impl RadialMeasureSpec {
    /// Uniform measure of total mass `mass` on the circle of radius `radius`.
    pub fn circle(radius: f64, mass: f64) -> Self {
        RadialMeasureSpec {
            atoms: vec![Atom { radius, mass }],
            density: None,
        }
    }

    pub fn with_atom(mut self, radius: f64, mass: f64) -> Self {
        self.atoms.push(Atom { radius, mass });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut prev = 0.0;
        for a in &self.atoms {
            if !(a.radius > prev) || !a.radius.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "atom radii must be positive and strictly increasing (got {} after {})",
                    a.radius, prev
                )));
            }
            if !(a.mass > 0.0) || !a.mass.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "atom mass must be positive and finite (got {})",
                    a.mass
                )));
            }
            prev = a.radius;
        }
        if let Some(d) = &self.density {
            if d.breaks.len() != d.rates.len() + 1 || d.rates.is_empty() {
                return Err(Error::InvalidParameter(
                    "density needs one more break than rates".into(),
                ));
            }
            let mut prev = 0.0;
            for &b in &d.breaks {
                if !(b > prev) || !b.is_finite() {
                    return Err(Error::InvalidParameter(
                        "density breaks must be positive and strictly increasing".into(),
                    ));
                }
                prev = b;
            }
            if d.rates.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                return Err(Error::InvalidParameter(
                    "density rates must be nonnegative and finite".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass).sum();
        let dens: f64 = self
            .density
            .as_ref()
            .map(|d| {
                d.rates
                    .iter()
                    .zip(d.breaks.windows(2))
                    .map(|(c, w)| c * (w[1] - w[0]))
                    .sum()
            })
            .unwrap_or(0.0);
        atoms + dens
    }

    /// `ν(D_s)`, the mass of the open disk of radius `s`. An atom at radius
    /// `ρ` counts iff `s > ρ`.
    pub fn mass_in_disk(&self, s: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| s > a.radius)
            .map(|a| a.mass)
            .sum();
        atoms + self.density_mass_below(s)
    }

    /// Smallest and largest radius carrying mass.
    pub fn support(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for a in &self.atoms {
            lo = lo.min(a.radius);
            hi = hi.max(a.radius);
        }
        if let Some(d) = &self.density {
            for (c, w) in d.rates.iter().zip(d.breaks.windows(2)) {
                if *c > 0.0 {
                    lo = lo.min(w[0]);
                    hi = hi.max(w[1]);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    fn density_mass_below(&self, s: f64) -> f64 {
        let Some(d) = &self.density else { return 0.0 };
        let mut m = 0.0;
        for (c, w) in d.rates.iter().zip(d.breaks.windows(2)) {
            if s <= w[0] {
                break;
            }
            m += c * (s.min(w[1]) - w[0]);
        }
        m
    }

    fn density_rate_at(&self, s: f64) -> f64 {
        let Some(d) = &self.density else { return 0.0 };
        for (c, w) in d.rates.iter().zip(d.breaks.windows(2)) {
            if s >= w[0] && s < w[1] {
                return *c;
            }
        }
        0.0
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.atoms.iter().map(|a| a.radius).collect();
        if let Some(d) = &self.density {
            b.extend(d.breaks.iter().copied());
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }
}

/// `V^ν(r) = ∫₁^r ν(D_s)/s ds`, exact for atoms plus piecewise constant
/// radial density. Signed for `r < 1`.
pub fn background_potential(nu: &RadialMeasureSpec, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "background potential needs finite r > 0 (got {r})"
        )));
    }
    if r == 1.0 {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if r > 1.0 { (1.0, r, 1.0) } else { (r, 1.0, -1.0) };
    let mut cuts = vec![lo];
    cuts.extend(nu.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let rate = nu.density_rate_at(mid);
        // ν(D_s) = offset + rate·s on (a, b)
        let offset = nu.mass_in_disk(mid) - rate * mid;
        total += offset * (b / a).ln() + rate * (b - a);
    }
    Ok(sign * total)
}

/// The potential families used throughout the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialPotential {
    /// `max{0, ln r}`.
    CircleLog,
    /// `max{0, q ln r}`.
    PowerQ { q: f64 },
    /// `0` on `[inner, 1]`, `+∞` elsewhere. `inner = 0` is the flat hard disk.
    HardEdgeFlat {
        #[serde(default)]
        inner: f64,
    },
    /// `0` on `[0,1]`, `ln r` on `[1, R]`, `ln R + q_tail ln(r/R)` beyond.
    Annulus { radius: f64, tail_q: f64 },
    /// Potential generated by a positive radial measure.
    Background { measure: RadialMeasureSpec },
    /// Circle potential with `r^α (V - ln r) → γ` at infinity and one-sided
    /// slopes `L₊ + 1` and `L₋ - 1` at `r = 1`:
    /// `ln r + (r-1)(γ(r-1) + L₊) r^{-α-2}` for `r ≥ 1`, `(L₋-1)(1-r)` below.
    PowerTail {
        alpha: f64,
        gamma: f64,
        l_plus: f64,
        l_minus: f64,
    },
    /// Linear interpolation of `(radii, values)`; evaluation outside the
    /// grid is an error.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
    /// `V(1/r) + ln r`.
    Inverted { base: Box<RadialPotential> },
}

/// Growth of a potential in the log variable: `V(r) ≈ at_infinity · ln r`
/// as `r → ∞` and `V(r) ≈ -at_zero · ln r` as `r → 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogGrowth {
    pub at_infinity: f64,
    pub at_zero: f64,
}

impl RadialPotential {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            RadialPotential::CircleLog => Ok(()),
            RadialPotential::PowerQ { q } => {
                if !(*q > 0.0) || !q.is_finite() {
                    return bad(format!("power_q needs q > 0 (got {q})"));
                }
                Ok(())
            }
            RadialPotential::HardEdgeFlat { inner } => {
                if !(*inner >= 0.0 && *inner < 1.0) {
                    return bad(format!("hard_edge_flat needs inner in [0,1) (got {inner})"));
                }
                Ok(())
            }
            RadialPotential::Annulus { radius, tail_q } => {
                if !(*radius >= 1.0) || !radius.is_finite() {
                    return bad(format!("annulus needs R >= 1 (got {radius})"));
                }
                if !(*tail_q >= 1.0) || !tail_q.is_finite() {
                    return bad(format!("annulus needs tail_q >= 1 (got {tail_q})"));
                }
                Ok(())
            }
            RadialPotential::Background { measure } => measure.validate(),
            RadialPotential::PowerTail {
                alpha,
                gamma,
                l_plus,
                l_minus,
            } => {
                if !(*alpha > 0.0) || !(*gamma > 0.0) || !(*l_plus > 0.0) || !(*l_minus >= 1.0) {
                    return bad(format!(
                        "power_tail needs α > 0, γ > 0, L₊ > 0, L₋ >= 1 (got {alpha}, {gamma}, {l_plus}, {l_minus})"
                    ));
                }
                Ok(())
            }
            RadialPotential::Tabulated { radii, values } => {
                if radii.len() < 2 || radii.len() != values.len() {
                    return bad("tabulated potential needs >= 2 matching radii/values".into());
                }
                if radii[0] < 0.0 || radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("tabulated radii must be nonnegative and strictly increasing".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("tabulated values must be finite".into());
                }
                Ok(())
            }
            RadialPotential::Inverted { base } => base.validate(),
        }
    }

    /// `V(r)` for `r ≥ 0`.
    pub fn eval(&self, r: f64) -> Result<ExtReal> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("potential evaluated at r = {r}")));
        }
        match self {
            RadialPotential::Tabulated { radii, values } => tabulated(radii, values, r),
            RadialPotential::Background { measure } => {
                Ok(ExtReal::Finite(background_potential(measure, r)?))
            }
            RadialPotential::Inverted { base } => {
                if r == 0.0 {
                    return Err(Error::Domain(
                        "inverted potential is undefined at r = 0".into(),
                    ));
                }
                Ok(base.eval(1.0 / r)? + r.ln())
            }
            _ => self.eval_log(r.ln()),
        }
    }

    /// `V(e^s)`, evaluated without forming `e^s` where that would overflow.
    pub fn eval_log(&self, s: f64) -> Result<ExtReal> {
        if s.is_nan() {
            return Err(Error::Domain("potential evaluated at NaN".into()));
        }
        let v = match self {
            RadialPotential::CircleLog => ExtReal::Finite(s.max(0.0)),
            RadialPotential::PowerQ { q } => ExtReal::Finite(q * s.max(0.0)),
            RadialPotential::HardEdgeFlat { inner } => {
                if s > 0.0 || (*inner > 0.0 && s < inner.ln()) {
                    ExtReal::PosInf
                } else {
                    ExtReal::Finite(0.0)
                }
            }
            RadialPotential::Annulus { radius, tail_q } => {
                let lr = radius.ln();
                if s <= 0.0 {
                    ExtReal::Finite(0.0)
                } else if s <= lr {
                    ExtReal::Finite(s)
                } else {
                    ExtReal::Finite(lr + tail_q * (s - lr))
                }
            }
            RadialPotential::Background { measure } => {
                let (lo, hi) = measure.support().unwrap_or((1.0, 1.0));
                if s > 700.0 && s > hi.ln() {
                    let vh = background_potential(measure, hi * (1.0 + 1e-12))?;
                    let rest = s - (hi * (1.0 + 1e-12)).ln();
                    ExtReal::Finite(vh + measure.total_mass() * rest)
                } else if s < -700.0 && s < lo.ln() {
                    // ν(D_s) = 0 below the support, so V is constant there.
                    ExtReal::Finite(background_potential(measure, lo.min(1.0))?)
                } else {
                    ExtReal::Finite(background_potential(measure, s.exp())?)
                }
            }
            RadialPotential::PowerTail {
                alpha,
                gamma,
                l_plus,
                l_minus,
            } => {
                if s >= 0.0 {
                    let inv = (-s).exp();
                    let x = 1.0 - inv;
                    // (r-1)(γ(r-1)+L₊) r^{-α-2} written in powers of 1/r
                    let corr = x * (gamma * x + l_plus * inv) * (-alpha * s).exp();
                    ExtReal::Finite(s + corr)
                } else {
                    ExtReal::Finite((l_minus - 1.0) * (1.0 - s.exp()))
                }
            }
            RadialPotential::Tabulated { radii, values } => tabulated(radii, values, s.exp())?,
            RadialPotential::Inverted { base } => base.eval_log(-s)? + s,
        };
        Ok(v)
    }

    /// Radii where the potential is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = match self {
            RadialPotential::CircleLog
            | RadialPotential::PowerQ { .. }
            | RadialPotential::PowerTail { .. } => vec![1.0],
            RadialPotential::HardEdgeFlat { inner } => {
                if *inner > 0.0 {
                    vec![*inner, 1.0]
                } else {
                    vec![1.0]
                }
            }
            RadialPotential::Annulus { radius, .. } => vec![1.0, *radius],
            RadialPotential::Background { measure } => {
                let mut b = measure.breakpoints();
                b.push(1.0);
                b
            }
            RadialPotential::Tabulated { radii, .. } => radii.clone(),
            RadialPotential::Inverted { base } => base
                .breakpoints()
                .into_iter()
                .filter(|&x| x > 0.0)
                .map(|x| 1.0 / x)
                .collect(),
        };
        b.retain(|x| x.is_finite() && *x > 0.0);
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Closed interval of radii where `V < ∞` (up to its endpoints).
    pub fn support(&self) -> (f64, f64) {
        match self {
            RadialPotential::HardEdgeFlat { inner } => (*inner, 1.0),
            RadialPotential::Tabulated { radii, .. } => (radii[0], radii[radii.len() - 1]),
            RadialPotential::Inverted { base } => {
                let (lo, hi) = base.support();
                let lo_inv = if hi.is_infinite() { 0.0 } else { 1.0 / hi };
                let hi_inv = if lo == 0.0 { f64::INFINITY } else { 1.0 / lo };
                (lo_inv, hi_inv)
            }
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Asymptotic log-growth; meaningless directions of bounded support
    /// report `+∞`.
    pub fn log_growth(&self) -> LogGrowth {
        let (lo, hi) = self.support();
        let mut g = match self {
            RadialPotential::CircleLog | RadialPotential::PowerTail { .. } => LogGrowth {
                at_infinity: 1.0,
                at_zero: 0.0,
            },
            RadialPotential::PowerQ { q } => LogGrowth {
                at_infinity: *q,
                at_zero: 0.0,
            },
            RadialPotential::Annulus { tail_q, .. } => LogGrowth {
                at_infinity: *tail_q,
                at_zero: 0.0,
            },
            RadialPotential::Background { measure } => LogGrowth {
                at_infinity: measure.total_mass(),
                at_zero: 0.0,
            },
            RadialPotential::HardEdgeFlat { .. } | RadialPotential::Tabulated { .. } => LogGrowth {
                at_infinity: f64::INFINITY,
                at_zero: f64::INFINITY,
            },
            RadialPotential::Inverted { base } => {
                let b = base.log_growth();
                LogGrowth {
                    at_infinity: 1.0 - b.at_zero,
                    at_zero: b.at_infinity - 1.0,
                }
            }
        };
        if hi.is_finite() {
            g.at_infinity = f64::INFINITY;
        }
        if lo > 0.0 {
            g.at_zero = f64::INFINITY;
        }
        g
    }

    pub fn confinement(&self) -> Confinement {
        let (_, hi) = self.support();
        if hi.is_finite() {
            return Confinement::Hard;
        }
        let g = self.log_growth().at_infinity;
        if g > 1.0 {
            Confinement::Strong
        } else {
            Confinement::Weak
        }
    }
}

fn tabulated(radii: &[f64], values: &[f64], r: f64) -> Result<ExtReal> {
    let (lo, hi) = (radii[0], radii[radii.len() - 1]);
    // round trips through ln/exp may land a few ulps outside the grid
    let r = if r > hi && r <= hi * (1.0 + 1e-12) {
        hi
    } else if r < lo && r >= lo * (1.0 - 1e-12) {
        lo
    } else {
        r
    };
    if r < lo || r > hi {
        return Err(Error::Extrapolation { r, lo, hi });
    }
    let i = match radii.binary_search_by(|x| x.total_cmp(&r)) {
        Ok(i) => return Ok(ExtReal::Finite(values[i])),
        Err(i) => i,
    };
    let (r0, r1) = (radii[i - 1], radii[i]);
    let t = (r - r0) / (r1 - r0);
    Ok(ExtReal::Finite(values[i - 1] + t * (values[i] - values[i - 1])))
}

/// `V` pulled back by `z ↦ 1/z`, living against `Λ_χ`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertedPotential {
    pub potential: RadialPotential,
    pub reference: Reference,
}

/// `Ṽ(r) = V(1/r) + ln r`. The inverted gas is defined against `Λ_χ`.
pub fn invert_potential(v: &RadialPotential, chi: f64) -> InvertedPotential {
    let potential = match v {
        RadialPotential::Inverted { base } => (**base).clone(),
        other => RadialPotential::Inverted {
            base: Box::new(other.clone()),
        },
    };
    InvertedPotential {
        potential,
        reference: Reference::LambdaChi { chi },
    }
}

pub const CIRCLE_TOLERANCE_AT_ONE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CircleViolation {
    pub r: f64,
    pub value: Option<f64>,
    pub bound: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircleReport {
    pub value_at_one: Option<f64>,
    pub violations: Vec<CircleViolation>,
}

impl CircleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `V(1) = 0` (to [`CIRCLE_TOLERANCE_AT_ONE`]) and
/// `V(r) ≥ max{0, ln r}` with no slack on every grid point.
pub fn check_circle_conditions(v: &RadialPotential, grid: &[f64]) -> CircleReport {
    let mut violations = Vec::new();
    let value_at_one = match v.eval(1.0) {
        Ok(x) => x.finite(),
        Err(e) => {
            violations.push(CircleViolation {
                r: 1.0,
                value: None,
                bound: 0.0,
                reason: e.to_string(),
            });
            None
        }
    };
    match value_at_one {
        Some(x) if x.abs() <= CIRCLE_TOLERANCE_AT_ONE => {}
        Some(x) => violations.push(CircleViolation {
            r: 1.0,
            value: Some(x),
            bound: 0.0,
            reason: "V(1) != 0".into(),
        }),
        None if violations.is_empty() => violations.push(CircleViolation {
            r: 1.0,
            value: None,
            bound: 0.0,
            reason: "V(1) = +inf".into(),
        }),
        None => {}
    }
    for &r in grid {
        let bound = if r > 0.0 { r.ln().max(0.0) } else { 0.0 };
        match v.eval(r) {
            Ok(x) if x.to_f64() >= bound => {}
            Ok(x) => violations.push(CircleViolation {
                r,
                value: Some(x.to_f64()),
                bound,
                reason: "V(r) < max{0, ln r}".into(),
            }),
            Err(e) => violations.push(CircleViolation {
                r,
                value: None,
                bound,
                reason: e.to_string(),
            }),
        }
    }
    CircleReport {
        value_at_one,
        violations,
    }
}
