//! Kernel of polynomials of degree `< n` orthonormal for
//! `e^{−2(n+χ)V} dℓ` on the unit disk, for non-radial `V`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::check_finite;
use crate::error::{Error, Result};
use crate::potentials::RadialPotential;
use crate::quadrature::GaussLegendre;

/// A stretch `[a, b]` of a ray from the origin; `value` is the constant
/// value of `V` there, or `None` if it varies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayPiece {
    pub a: f64,
    pub b: f64,
    pub value: Option<f64>,
}

/// A potential on the open unit disk described ray by ray.
pub trait PlanarWeight: Send + Sync {
    /// `V(z)`, possibly `+∞`.
    fn value(&self, z: Complex64) -> Result<f64>;

    /// Partition of `[0, 1]` along the ray of angle `theta` into pieces on
    /// which `V` is smooth.
    fn ray_pieces(&self, theta: f64) -> Vec<RayPiece>;

    /// Angles in `[0, 2π)` where the ray partition changes non-smoothly.
    fn angular_breaks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `V = height` on the open disk `|z − center| < radius`, `0` elsewhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskBump {
    pub center: Complex64,
    pub radius: f64,
    pub height: f64,
}

impl DiskBump {
    pub fn new(center: Complex64, radius: f64, height: f64) -> Result<Self> {
        check_finite(center)?;
        if !(radius > 0.0) || center.norm() + radius >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "disk bump must sit inside the unit disk (center {center}, radius {radius})"
            )));
        }
        if !(height >= 0.0) {
            return Err(Error::InvalidParameter(format!("height must be >= 0 (got {height})")));
        }
        Ok(DiskBump {
            center,
            radius,
            height,
        })
    }

    /// Radii where the ray of angle `theta` crosses the circle.
    fn crossings(&self, theta: f64) -> Option<(f64, f64)> {
        let b = (self.center.conj() * Complex64::from_polar(1.0, theta)).re;
        let disc = b * b - self.center.norm_sqr() + self.radius * self.radius;
        if disc <= 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let (lo, hi) = ((b - root).max(0.0), b + root);
        (hi > lo).then_some((lo, hi))
    }
}

impl PlanarWeight for DiskBump {
    fn value(&self, z: Complex64) -> Result<f64> {
        check_finite(z)?;
        Ok(if (z - self.center).norm() < self.radius {
            self.height
        } else {
            0.0
        })
    }

    fn ray_pieces(&self, theta: f64) -> Vec<RayPiece> {
        let piece = |a, b, v| RayPiece { a, b, value: Some(v) };
        match self.crossings(theta) {
            None => vec![piece(0.0, 1.0, 0.0)],
            Some((lo, hi)) => {
                let mut out = Vec::with_capacity(3);
                if lo > 0.0 {
                    out.push(piece(0.0, lo, 0.0));
                }
                out.push(piece(lo, hi, self.height));
                out.push(piece(hi, 1.0, 0.0));
                out
            }
        }
    }

    fn angular_breaks(&self) -> Vec<f64> {
        let d = self.center.norm();
        if d <= self.radius {
            return Vec::new();
        }
        let half = (self.radius / d).asin();
        let mid = self.center.arg();
        [mid - half, mid + half]
            .iter()
            .map(|t| t.rem_euclid(2.0 * PI))
            .collect()
    }
}

/// A radial potential restricted to the unit disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialPlanar(pub RadialPotential);

impl PlanarWeight for RadialPlanar {
    fn value(&self, z: Complex64) -> Result<f64> {
        check_finite(z)?;
        Ok(self.0.eval(z.norm())?.to_f64())
    }

    fn ray_pieces(&self, _theta: f64) -> Vec<RayPiece> {
        let mut cuts = vec![0.0];
        cuts.extend(self.0.breakpoints().into_iter().filter(|&b| b > 0.0 && b < 1.0));
        cuts.push(1.0);
        cuts.windows(2)
            .map(|w| RayPiece {
                a: w[0],
                b: w[1],
                value: None,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonRadialOptions {
    /// Angular nodes (trapezoid when the ray partition is smooth in the
    /// angle, Gauss–Legendre per angular panel otherwise).
    pub angular_nodes: usize,
    /// Gauss–Legendre order on ray pieces where `V` varies.
    pub radial_order: usize,
}

impl Default for NonRadialOptions {
    fn default() -> Self {
        NonRadialOptions {
            angular_nodes: 400,
            radial_order: 400,
        }
    }
}

/// `K_n(z, w) = m(z)ᵀ G⁻¹ conj(m(w))` with `m(z) = (1, z, …, z^{n−1})`
/// and `G_{jk} = ∫ conj(z^j) z^k e^{−2(n+χ)V} dℓ`, through the Cholesky
/// factor `G = L Lᴴ`.
pub struct NonRadialKernel {
    weight: Box<dyn PlanarWeight>,
    n: usize,
    strength: f64,
    chol: Vec<Complex64>,
    condition: f64,
}

impl std::fmt::Debug for NonRadialKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonRadialKernel")
            .field("n", &self.n)
            .field("strength", &self.strength)
            .field("condition", &self.condition)
            .finish()
    }
}

/// `μ_p = ∫ r^{p−1} e^{−c V} dr` along one ray for `p = 1..=max_p`.
fn ray_moments(weight: &dyn PlanarWeight, theta: f64, c: f64, order: usize, max_p: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|m| *m = 0.0);
    let gl = GaussLegendre::cached(order);
    let dir = Complex64::from_polar(1.0, theta);
    for piece in weight.ray_pieces(theta) {
        if piece.b <= piece.a {
            continue;
        }
        match piece.value {
            Some(v) => {
                let w = if v.is_infinite() { 0.0 } else { (-c * v).exp() };
                if w == 0.0 {
                    continue;
                }
                let (mut pa, mut pb) = (piece.a, piece.b);
                for p in 1..=max_p {
                    out[p] += w * (pb - pa) / p as f64;
                    pa *= piece.a;
                    pb *= piece.b;
                }
            }
            None => {
                for (r, wr) in gl.mapped(piece.a, piece.b) {
                    let v = weight.value(dir * r).unwrap_or(f64::INFINITY);
                    let w = if v.is_infinite() { 0.0 } else { wr * (-c * v).exp() };
                    if w == 0.0 {
                        continue;
                    }
                    let mut rp = w;
                    for slot in out.iter_mut().take(max_p + 1).skip(1) {
                        *slot += rp;
                        rp *= r;
                    }
                }
            }
        }
    }
}

/// Angular nodes and weights for `∫₀^{2π} dθ`.
fn angular_rule(weight: &dyn PlanarWeight, nodes: usize) -> Vec<(f64, f64)> {
    let mut breaks = weight.angular_breaks();
    if breaks.is_empty() {
        let h = 2.0 * PI / nodes as f64;
        return (0..nodes).map(|i| (i as f64 * h, h)).collect();
    }
    breaks.sort_by(f64::total_cmp);
    let mut edges = breaks.clone();
    edges.push(breaks[0] + 2.0 * PI);
    let per = (nodes / breaks.len()).max(8);
    let gl = GaussLegendre::cached(per);
    edges
        .windows(2)
        .flat_map(|w| gl.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect()
}

impl NonRadialKernel {
    pub fn new<W: PlanarWeight + 'static>(weight: W, n: usize, chi: f64, options: NonRadialOptions) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("kernel needs n >= 1".into()));
        }
        if !(chi >= 0.0) {
            return Err(Error::InvalidParameter(format!("χ must be >= 0 (got {chi})")));
        }
        if options.angular_nodes < 8 || options.radial_order < 2 {
            return Err(Error::InvalidParameter("quadrature orders too small".into()));
        }
        let strength = 2.0 * (n as f64 + chi);
        let max_p = 2 * n;
        let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
        let mut mu = vec![0.0; max_p + 1];
        let mut phase = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
        for (theta, wt) in angular_rule(&weight, options.angular_nodes) {
            ray_moments(&weight, theta, strength, options.radial_order, max_p, &mut mu);
            // phase[d + n − 1] = e^{i d θ}
            for (i, ph) in phase.iter_mut().enumerate() {
                *ph = Complex64::from_polar(wt, (i as f64 - (n as f64 - 1.0)) * theta);
            }
            for j in 0..n {
                for k in 0..=j {
                    gram[j * n + k] += phase[k + n - 1 - j] * mu[j + k + 2];
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                gram[k * n + j] = gram[j * n + k].conj();
            }
            gram[j * n + j].im = 0.0;
        }
        let (chol, condition) = cholesky(gram, n)?;
        Ok(NonRadialKernel {
            weight: Box::new(weight),
            n,
            strength,
            chol,
            condition,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(max L_ii / min L_ii)²`, a cheap lower estimate of `cond(G)`.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// `e^{−2(n+χ)V(z)}`.
    pub fn weight(&self, z: Complex64) -> Result<f64> {
        let v = self.weight.value(z)?;
        Ok(if v.is_infinite() { 0.0 } else { (-self.strength * v).exp() })
    }

    /// `y = L⁻¹ conj(m(z))`.
    fn solve(&self, z: Complex64) -> Vec<Complex64> {
        let n = self.n;
        let zc = z.conj();
        let mut y = Vec::with_capacity(n);
        let mut pow = Complex64::new(1.0, 0.0);
        for j in 0..n {
            let mut acc = pow;
            for k in 0..j {
                acc -= self.chol[j * n + k] * y[k];
            }
            y.push(acc / self.chol[j * n + j].re);
            pow *= zc;
        }
        y
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        check_finite(z)?;
        check_finite(w)?;
        let yz = self.solve(z);
        let yw = self.solve(w);
        Ok(yz.iter().zip(&yw).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn eval_diag(&self, z: Complex64) -> Result<f64> {
        check_finite(z)?;
        Ok(self.solve(z).iter().map(|a| a.norm_sqr()).sum())
    }
}

/// Lower Cholesky factor of a Hermitian matrix (row-major), refusing
/// pivots below `1e−12 · max diagonal`.
fn cholesky(mut a: Vec<Complex64>, n: usize) -> Result<(Vec<Complex64>, f64)> {
    let max_diag = (0..n).map(|i| a[i * n + i].re).fold(0.0, f64::max);
    let tol = 1e-12 * max_diag;
    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        if !(d > tol) {
            let condition = if dmin.is_finite() { dmax / dmin } else { f64::INFINITY };
            return Err(Error::NotPositiveDefinite {
                pivot: j,
                value: d,
                condition: condition * max_diag / d.abs().max(f64::MIN_POSITIVE),
            });
        }
        let l = d.sqrt();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
        a[j * n + j] = Complex64::new(l, 0.0);
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s / l;
        }
        for k in j + 1..n {
            a[j * n + k] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((a, dmax / dmin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::RadialKernel;
    use crate::kostlan::GasSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_reconstructs() {
        let n = 3;
        let g = vec![
            c(4.0, 0.0),
            c(1.0, 1.0),
            c(0.0, -0.5),
            c(1.0, -1.0),
            c(3.0, 0.0),
            c(0.2, 0.0),
            c(0.0, 0.5),
            c(0.2, 0.0),
            c(2.0, 0.0),
        ];
        let (l, _) = cholesky(g.clone(), n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let mut s = c(0.0, 0.0);
                for k in 0..n {
                    s += l[i * n + k] * l[j * n + k].conj();
                }
                assert!((s - g[i * n + j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_reports_indefinite_matrix() {
        let g = vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)];
        match cholesky(g, 2) {
            Err(Error::NotPositiveDefinite { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn disk_bump_pieces_cover_the_ray() {
        let bump = DiskBump::new(c(0.2, 0.0), 0.3, 5.0).unwrap();
        for theta in [0.0, 1.0, PI, 4.0] {
            let pieces = bump.ray_pieces(theta);
            assert_eq!(pieces[0].a, 0.0);
            assert_eq!(pieces.last().unwrap().b, 1.0);
            for w in pieces.windows(2) {
                assert_eq!(w[0].b, w[1].a);
            }
            for p in &pieces {
                let mid = Complex64::from_polar(0.5 * (p.a + p.b), theta);
                assert_eq!(bump.value(mid).unwrap(), p.value.unwrap());
            }
        }
        assert!(bump.angular_breaks().is_empty());
        let off = DiskBump::new(c(0.5, 0.0), 0.2, 1.0).unwrap();
        assert_eq!(off.angular_breaks().len(), 2);
        assert!(DiskBump::new(c(0.8, 0.0), 0.3, 1.0).is_err());
    }

    #[test]
    fn flat_disk_gives_bergman_type_kernel() {
        let k = NonRadialKernel::new(RadialPlanar(RadialPotential::HardEdgeFlat { inner: 0.0 }), 6, 1.0, NonRadialOptions::default()).unwrap();
        let (z, w) = (c(0.3, 0.4), c(-0.5, 0.2));
        let x = z * w.conj();
        let exact: Complex64 = (0..6).map(|j| (j + 1) as f64 / PI * x.powu(j as u32)).sum();
        assert!((k.eval(z, w).unwrap() - exact).norm() < 1e-12);
    }

    #[test]
    fn radial_potential_matches_radial_construction() {
        let v = RadialPotential::Tabulated {
            radii: vec![0.0, 0.3, 0.5, 1.0],
            values: vec![0.05, 0.02, 0.0, 0.0],
        };
        let n = 8;
        let k = NonRadialKernel::new(RadialPlanar(v.clone()), n, 1.0, NonRadialOptions::default()).unwrap();
        let radial = RadialKernel::from_gas(&GasSpec::lebesgue(n, 1.0, v).unwrap()).unwrap();
        for (z, w) in [(c(0.1, 0.2), c(0.6, -0.3)), (c(0.9, 0.0), c(0.9, 0.1)), (c(0.0, 0.0), c(0.4, 0.4))] {
            let a = k.eval(z, w).unwrap();
            let b = radial.eval_series(z, w).unwrap();
            assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn kernel_is_hermitian_and_positive_on_diagonal() {
        let k = NonRadialKernel::new(DiskBump::new(c(0.1, 0.3), 0.4, 0.2).unwrap(), 10, 1.0, NonRadialOptions::default()).unwrap();
        let (z, w) = (c(0.2, -0.1), c(-0.7, 0.3));
        assert!((k.eval(z, w).unwrap() - k.eval(w, z).unwrap().conj()).norm() < 1e-12);
        assert!(k.eval_diag(z).unwrap() > 0.0);
        assert!((k.eval_diag(w).unwrap() - k.eval(w, w).unwrap().re).abs() < 1e-12);
        assert!(k.condition_estimate() >= 1.0);
    }
}
