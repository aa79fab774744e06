//! Tabulated component law for arbitrary potentials.
//!
//! The density of `S = ln X` is proportional to `exp(φ(s))` with
//! `φ(s) = p·s − c·V(e^s)`. The support is cut where `φ` falls 60 below its
//! maximum and split into panels on which a 20-point Gauss–Legendre rule
//! matches the 10-point rule to 1e-12 relative. Panel masses are kept as
//! prefix and suffix sums so that both tails stay accurate.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::potentials::{ExtReal, RadialPotential};
use crate::quadrature::GaussLegendre;

const DROP: f64 = 60.0;
const SCAN_LO: f64 = -40.0;
const SCAN_HI: f64 = 40.0;
const SCAN_STEP: f64 = 0.1;
const REL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

#[derive(Clone, Debug)]
pub struct QuadTable {
    potential: Arc<RadialPotential>,
    p: f64,
    c: f64,
    /// `φ` at its maximum; every stored mass is relative to `e^{shift}`.
    shift: f64,
    edges: Vec<f64>,
    phi_edges: Vec<f64>,
    prefix: Vec<f64>,
    suffix: Vec<f64>,
    total: f64,
}

impl QuadTable {
    pub fn build(potential: Arc<RadialPotential>, p: f64, c: f64, k: usize) -> Result<Self> {
        let mut t = QuadTable {
            potential,
            p,
            c,
            shift: 0.0,
            edges: Vec::new(),
            phi_edges: Vec::new(),
            prefix: Vec::new(),
            suffix: Vec::new(),
            total: 0.0,
        };
        let (lo, hi) = t.potential.support();
        let s_min = if lo > 0.0 { lo.ln() } else { f64::NEG_INFINITY };
        let s_max = if hi.is_finite() { hi.ln() } else { f64::INFINITY };
        let breaks: Vec<f64> = t
            .potential
            .breakpoints()
            .into_iter()
            .map(f64::ln)
            .filter(|&b| b > s_min && b < s_max)
            .collect();

        let mut pts: Vec<f64> = Vec::new();
        let mut s = SCAN_LO;
        while s <= SCAN_HI {
            if s >= s_min && s <= s_max {
                pts.push(s);
            }
            s += SCAN_STEP;
        }
        for &b in &breaks {
            pts.extend([b - 1e-9, b, b + 1e-9]);
        }
        for end in [s_min, s_max] {
            if end.is_finite() {
                pts.push(end);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let vals: Vec<f64> = pts.iter().map(|&s| t.phi_raw(s)).collect::<Result<_>>()?;
        let (jmax, &m0) = vals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| divergent(k, "empty support"))?;
        if !m0.is_finite() {
            return Err(divergent(k, "density vanishes on the scanned range"));
        }
        let mut m = m0;
        if jmax > 0 && jmax + 1 < pts.len() {
            let refined = golden_max(
                |s| t.phi_raw(s).unwrap_or(f64::NEG_INFINITY),
                pts[jmax - 1],
                pts[jmax + 1],
            );
            m = m.max(refined);
        }
        t.shift = m;
        let cut = m - DROP;

        let first = vals.iter().position(|&v| v >= cut).expect("max is above cut");
        let last = vals.iter().rposition(|&v| v >= cut).expect("max is above cut");
        let s_lo = if first == 0 {
            t.extend(pts[0], -1.0, s_min, cut, k)?
        } else {
            t.crossing(pts[first - 1], pts[first], cut)
        };
        let s_hi = if last + 1 == pts.len() {
            t.extend(pts[last], 1.0, s_max, cut, k)?
        } else {
            t.crossing(pts[last + 1], pts[last], cut)
        };

        let mut cuts = vec![s_lo];
        cuts.extend(breaks.iter().copied().filter(|&b| b > s_lo && b < s_hi));
        cuts.push(s_hi);
        let mut init = Vec::new();
        for w in cuts.windows(2) {
            let pieces = ((w[1] - w[0]) / 0.5).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / pieces as f64;
            for i in 0..pieces {
                init.push((w[0] + i as f64 * h, if i + 1 == pieces { w[1] } else { w[0] + (i + 1) as f64 * h }));
            }
        }
        let floor: f64 = 1e-18;
        let g10 = GaussLegendre::cached(10);
        let g20 = GaussLegendre::cached(20);
        let mut panels: Vec<(f64, f64, f64)> = Vec::new();
        let mut stack: Vec<(f64, f64)> = init.into_iter().rev().collect();
        while let Some((a, b)) = stack.pop() {
            let i10 = g10.integrate(a, b, |s| t.density(s));
            let i20 = g20.integrate(a, b, |s| t.density(s));
            if !i20.is_finite() {
                return Err(divergent(k, "non-finite panel mass"));
            }
            let ok = (i20 - i10).abs() <= (REL_TOL * i20.abs()).max(floor * (b - a));
            if ok || b - a < 1e-10 {
                panels.push((a, b, i20));
            } else {
                let mid = 0.5 * (a + b);
                stack.push((mid, b));
                stack.push((a, mid));
            }
        }
        t.edges = Vec::with_capacity(panels.len() + 1);
        t.edges.push(panels[0].0);
        t.prefix = vec![0.0];
        for &(_, b, mass) in &panels {
            t.edges.push(b);
            let last = *t.prefix.last().expect("nonempty");
            t.prefix.push(last + mass);
        }
        t.suffix = vec![0.0; panels.len() + 1];
        for i in (0..panels.len()).rev() {
            t.suffix[i] = t.suffix[i + 1] + panels[i].2;
        }
        t.total = t.prefix[panels.len()];
        if !(t.total > 0.0) || !t.total.is_finite() {
            return Err(divergent(k, "zero or infinite normalizer"));
        }
        t.phi_edges = t.edges.iter().map(|&s| t.phi(s)).collect();
        Ok(t)
    }

    fn phi_raw(&self, s: f64) -> Result<f64> {
        Ok(match self.potential.eval_log(s)? {
            ExtReal::Finite(v) => self.p * s - self.c * v,
            ExtReal::PosInf => f64::NEG_INFINITY,
        })
    }

    fn phi(&self, s: f64) -> f64 {
        self.phi_raw(s).unwrap_or(f64::NEG_INFINITY) - self.shift
    }

    fn density(&self, s: f64) -> f64 {
        self.phi(s).exp()
    }

    /// Walks outward from `start` until `φ` drops below `cut` or the support
    /// ends, then locates the crossing.
    fn extend(&self, start: f64, dir: f64, bound: f64, cut: f64, k: usize) -> Result<f64> {
        let mut inside = start;
        let mut step = 1.0;
        loop {
            let next = inside + dir * step;
            let beyond = if dir < 0.0 { next <= bound } else { next >= bound };
            if beyond {
                return Ok(bound);
            }
            if self.phi_raw(next)? < cut {
                return Ok(self.crossing(next, inside, cut));
            }
            inside = next;
            step *= 2.0;
            if inside.abs() > 1e7 {
                return Err(divergent(k, "density does not decay"));
            }
        }
    }

    /// Bisection for `φ = cut` between `outside` (below) and `inside` (above).
    fn crossing(&self, mut outside: f64, mut inside: f64, cut: f64) -> f64 {
        for _ in 0..60 {
            let mid = 0.5 * (outside + inside);
            if self.phi_raw(mid).unwrap_or(f64::NEG_INFINITY) < cut {
                outside = mid;
            } else {
                inside = mid;
            }
        }
        outside
    }

    /// `ln ∫ e^{φ(s)} ds` with the unshifted `φ`.
    pub fn log_normalizer(&self) -> f64 {
        self.shift + self.total.ln()
    }

    pub fn support_log(&self) -> (f64, f64) {
        (self.edges[0], *self.edges.last().expect("nonempty"))
    }

    fn partial(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        GaussLegendre::cached(20).integrate(a, b, |s| self.density(s))
    }

    fn panel_of(&self, s: f64) -> usize {
        let i = self.edges.partition_point(|&e| e <= s);
        i.saturating_sub(1).min(self.edges.len() - 2)
    }

    /// `(P(S ≤ s), P(S > s))`, each accurate in its own small tail.
    pub fn cdf_sf_log(&self, s: f64) -> (f64, f64) {
        let (lo, hi) = self.support_log();
        if s <= lo {
            return (0.0, 1.0);
        }
        if s >= hi {
            return (1.0, 0.0);
        }
        let i = self.panel_of(s);
        let left = (self.prefix[i] + self.partial(self.edges[i], s)) / self.total;
        if left <= 0.5 {
            (left, 1.0 - left)
        } else {
            let right = (self.suffix[i + 1] + self.partial(s, self.edges[i + 1])) / self.total;
            (1.0 - right, right)
        }
    }

    /// Quantile in log space, given `u` and `v = 1 − u` (both exact).
    pub fn quantile_log(&self, u: f64, v: f64) -> Result<f64> {
        let from_left = u <= 0.5;
        let target = if from_left { u * self.total } else { v * self.total };
        let i = if from_left {
            self.prefix.partition_point(|&c| c <= target).clamp(1, self.edges.len() - 1) - 1
        } else {
            let n = self.edges.len() - 1;
            // suffix is decreasing: find i with suffix[i+1] <= target < suffix[i]
            let j = self.suffix.partition_point(|&c| c > target);
            j.clamp(1, n) - 1
        };
        let (a, b) = (self.edges[i], self.edges[i + 1]);
        let base = if from_left { self.prefix[i] } else { self.suffix[i + 1] };
        let need = (target - base).max(0.0);
        // g(x) is increasing in x in both forms
        let g = |x: f64| -> f64 {
            if from_left {
                self.partial(a, x) - need
            } else {
                need - self.partial(x, b)
            }
        };

        let (pa, pb) = (self.phi_edges[i], self.phi_edges[i + 1]);
        let beta = (pb - pa) / (b - a);
        let mut x = if from_left {
            exp_linear_inverse(a, pa.exp(), beta, need)
        } else {
            b - exp_linear_inverse(0.0, pb.exp(), -beta, need)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let (mut lo, mut hi) = (a, b);
        for _ in 0..MAX_ITER {
            let gx = g(x);
            if gx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.density(x);
            let mut next = if d > 0.0 { x - gx / d } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-13 * x.abs().max(1.0) || hi - lo <= 1e-13 * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::NoConvergence {
            iterations: MAX_ITER,
            reason: format!("quantile solve for u = {u}"),
        })
    }
}

/// Solves `∫_a^x f_a e^{β(t−a)} dt = need` for `x`.
fn exp_linear_inverse(a: f64, fa: f64, beta: f64, need: f64) -> f64 {
    if fa <= 0.0 {
        return f64::NAN;
    }
    if beta.abs() < 1e-12 {
        return a + need / fa;
    }
    let arg = 1.0 + beta * need / fa;
    if arg <= 0.0 {
        return f64::NAN;
    }
    a + arg.ln() / beta
}

/// Largest value of a locally unimodal `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

fn divergent(k: usize, reason: &str) -> Error {
    Error::Divergent {
        k,
        reason: reason.to_string(),
    }
}
