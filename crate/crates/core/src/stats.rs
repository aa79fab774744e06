//! Empirical CDFs, Kolmogorov–Smirnov distances, correlations and binned
//! intensities.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Right-continuous empirical CDF.
#[derive(Clone, Debug, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut sample: Vec<f64>) -> Result<Self> {
        if sample.is_empty() {
            return Err(Error::InvalidParameter("empirical CDF of an empty sample".into()));
        }
        if sample.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("sample contains NaN".into()));
        }
        sample.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted: sample })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `#{x_i ≤ x}/n`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `#{x_i < x}/n`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.len() as f64
    }
}

/// `sup_x |F̂(x) − F(x)|`, attained at a sample point from the left or
/// the right. The left limit of `F` is taken one ulp below the point, so
/// step-function CDFs are handled exactly.
pub fn ks_statistic<F>(sample: &Ecdf, mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = sample.len() as f64;
    let xs = sample.sorted();
    let mut sup: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i])?;
        let f_left = cdf(xs[i].next_down())?;
        for v in [f, f_left] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("CDF value {v} near {} outside [0, 1]", xs[i])));
            }
        }
        sup = sup.max((i as f64 / n - f_left).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(sup)
}

/// Sample Pearson correlation.
pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs two equal-length samples of size >= 2 (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Domain("correlation of a constant sample".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Axis-aligned rectangle `[x0, x1) × [y0, y1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bin {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Bin {
    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re < self.x1 && z.im >= self.y0 && z.im < self.y1
    }

    fn overlaps(&self, other: &Bin) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    /// `nx × ny` grid of equal bins covering `[x0, x1) × [y0, y1)`.
    pub fn grid(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Vec<Bin> {
        let (dx, dy) = ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64);
        (0..ny)
            .flat_map(|j| {
                (0..nx).map(move |i| Bin {
                    x0: x0 + i as f64 * dx,
                    x1: x0 + (i + 1) as f64 * dx,
                    y0: y0 + j as f64 * dy,
                    y1: y0 + (j + 1) as f64 * dy,
                })
            })
            .collect()
    }
}

/// Intensity estimate of one bin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinEstimate {
    pub bin: Bin,
    pub mean: f64,
    pub std_error: f64,
}

/// Per-bin `count/(area · M)` over `M` replicas, with the standard error of
/// the mean of the per-replica counts.
pub fn binned_intensity(replicas: &[Vec<Complex64>], bins: &[Bin]) -> Result<Vec<BinEstimate>> {
    if replicas.is_empty() {
        return Err(Error::InvalidParameter("binned intensity needs at least one replica".into()));
    }
    for (i, b) in bins.iter().enumerate() {
        if !(b.area() > 0.0) || !b.area().is_finite() {
            return Err(Error::InvalidParameter(format!("bin {i} has zero or invalid area")));
        }
        if bins[..i].iter().any(|o| o.overlaps(b)) {
            return Err(Error::InvalidParameter(format!("bin {i} overlaps an earlier bin")));
        }
    }
    let m = replicas.len() as f64;
    Ok(bins
        .iter()
        .map(|bin| {
            let counts: Vec<f64> = replicas
                .iter()
                .map(|pts| pts.iter().filter(|z| bin.contains(**z)).count() as f64)
                .collect();
            let mean = counts.iter().sum::<f64>() / m;
            let var = if replicas.len() > 1 {
                counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            BinEstimate {
                bin: *bin,
                mean: mean / bin.area(),
                std_error: (var / m).sqrt() / bin.area(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{open_unit, stream, Role};
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::{Distribution, Poisson};

    #[test]
    fn ks_against_own_ecdf_is_zero() {
        let e = Ecdf::new(vec![0.3, 1.0, 1.0, 2.5, -4.0]).unwrap();
        let own = e.clone();
        assert_eq!(ks_statistic(&e, |x| Ok(own.eval(x))).unwrap(), 0.0);
    }

    #[test]
    fn ks_single_point() {
        let e = Ecdf::new(vec![0.7]).unwrap();
        assert_eq!(ks_statistic(&e, |_| Ok(0.5)).unwrap(), 0.5);
        assert!(Ecdf::new(vec![]).is_err());
    }

    #[test]
    fn ks_uniform_sample_is_small() {
        let mut rng = stream(2024, 0, Role::Test);
        let e = Ecdf::new((0..10_000).map(|_| open_unit(&mut rng)).collect()).unwrap();
        assert!(ks_statistic(&e, |x| Ok(x.clamp(0.0, 1.0))).unwrap() <= 0.03);
    }

    #[test]
    fn ks_rejects_improper_cdf() {
        let e = Ecdf::new(vec![0.0]).unwrap();
        assert!(ks_statistic(&e, |_| Ok(1.5)).is_err());
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson_corr(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson_corr(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert!(pearson_corr(&x, &[3.0; 4]).is_err());
        assert!(pearson_corr(&x, &x[..3]).is_err());
    }

    #[test]
    fn intensity_examples() {
        let bins = Bin::grid(0.0, 1.0, 0.0, 1.0, 2, 2);
        let empty = vec![vec![]; 3];
        assert!(binned_intensity(&empty, &bins).unwrap().iter().all(|b| b.mean == 0.0));
        let one = vec![vec![Complex64::new(0.1, 0.1)]; 5];
        let est = binned_intensity(&one, &bins).unwrap();
        assert!((est[0].mean - 4.0).abs() < 1e-14);
        assert_eq!(est[0].std_error, 0.0);
        let degenerate = [Bin {
            x0: 0.0,
            x1: 0.0,
            y0: 0.0,
            y1: 1.0,
        }];
        assert!(binned_intensity(&one, &degenerate).is_err());
        let overlapping = [bins[0], bins[0]];
        assert!(binned_intensity(&one, &overlapping).is_err());
    }

    #[test]
    fn poisson_intensity_recovered() {
        let lambda = 7.5;
        let window = (-1.0, 1.0, -0.5, 0.5);
        let area = 2.0;
        let mut rng = stream(99, 0, Role::Test);
        let pois = Poisson::new(lambda * area).unwrap();
        let replicas: Vec<Vec<Complex64>> = (0..3000)
            .map(|_| {
                let k = pois.sample(&mut rng) as usize;
                (0..k)
                    .map(|_| Complex64::new(rng.gen_range(window.0..window.1), rng.gen_range(window.2..window.3)))
                    .collect()
            })
            .collect();
        let bins = Bin::grid(window.0, window.1, window.2, window.3, 2, 1);
        for b in binned_intensity(&replicas, &bins).unwrap() {
            assert!((b.mean - lambda).abs() <= 3.0 * b.std_error, "{b:?}");
        }
    }

    proptest! {
        #[test]
        fn ks_invariant_under_increasing_maps(xs in proptest::collection::vec(-3.0f64..3.0, 1..60)) {
            let cdf = |x: f64| 1.0 / (1.0 + (-x).exp());
            let e = Ecdf::new(xs.clone()).unwrap();
            let mapped = Ecdf::new(xs.iter().map(|x| x.powi(3) + x).collect()).unwrap();
            // inverse of t ↦ t³ + t by bisection
            let inv = |y: f64| {
                let (mut lo, mut hi) = (-10.0f64, 10.0f64);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid.powi(3) + mid < y { lo = mid } else { hi = mid }
                }
                0.5 * (lo + hi)
            };
            let a = ks_statistic(&e, |x| Ok(cdf(x))).unwrap();
            let b = ks_statistic(&mapped, |y| Ok(cdf(inv(y)))).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }

        #[test]
        fn ecdf_matches_counting(xs in proptest::collection::vec(-5.0f64..5.0, 1..80), q in -6.0f64..6.0) {
            let e = Ecdf::new(xs.clone()).unwrap();
            let n = xs.len() as f64;
            prop_assert_eq!(e.eval(q), xs.iter().filter(|&&x| x <= q).count() as f64 / n);
            prop_assert_eq!(e.eval_left(q), xs.iter().filter(|&&x| x < q).count() as f64 / n);
        }
    }
}
