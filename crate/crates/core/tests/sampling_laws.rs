use coulomb_core::kostlan::{rescale_extreme, GasSampler, GasSpec, RescaleScheme};
use coulomb_core::limit_laws::{solve_eps_n, LimitLaw};
use coulomb_core::rng::{open_unit, stream, Role};
use coulomb_core::stats::{ks_statistic, Ecdf};
use coulomb_core::RadialPotential;

/// DKW radius at confidence `1 − 1e−3`.
fn dkw(m: usize) -> f64 {
    ((2.0f64 / 1e-3).ln() / (2.0 * m as f64)).sqrt()
}

fn sampled_max_ks(potential: RadialPotential, n: usize, m: usize, seed: u64) -> f64 {
    let sampler = GasSampler::new(GasSpec::lebesgue(n, 1.0, potential).unwrap()).unwrap();
    let maxima: Vec<f64> = (0..m as u64).map(|i| sampler.sample_max(seed, i).unwrap()).collect();
    ks_statistic(&Ecdf::new(maxima).unwrap(), |t| Ok(sampler.max_cdf(t))).unwrap()
}

#[test]
fn sampled_maxima_follow_the_exact_product_law() {
    let m = 2000;
    for (potential, n) in [
        (RadialPotential::Annulus { radius: 1.5, tail_q: 2.0 }, 60),
        (RadialPotential::PowerQ { q: 2.0 }, 200),
        (
            RadialPotential::PowerTail {
                alpha: 3.0,
                gamma: 1.0,
                l_plus: 0.5,
                l_minus: 1.5,
            },
            80,
        ),
    ] {
        let ks = sampled_max_ks(potential.clone(), n, m, 7);
        assert!(ks <= dkw(m), "{potential:?}: {ks}");
    }
}

#[test]
fn tabulated_component_draws_follow_their_cdf() {
    let spec = GasSpec::lebesgue(30, 1.0, RadialPotential::Annulus { radius: 2.0, tail_q: 3.0 }).unwrap();
    let sampler = GasSampler::new(spec).unwrap();
    let m = 4000;
    for k in [0, 15, 29] {
        let law = sampler.component(k);
        let mut rng = stream(3, k as u64, Role::Test);
        let draws: Vec<f64> = (0..m).map(|_| law.quantile(open_unit(&mut rng)).unwrap()).collect();
        let ks = ks_statistic(&Ecdf::new(draws).unwrap(), |t| Ok(law.cdf(t))).unwrap();
        assert!(ks <= dkw(m), "k = {k}: {ks}");
    }
}

/// On the flat hard disk `P(max ≤ x) = ∏ₖ x^{2k+2} = x^{n(n+1)}`.
#[test]
fn hard_disk_max_law_is_a_power() {
    let n = 300;
    let sampler = GasSampler::new(GasSpec::lebesgue(n, 1.0, RadialPotential::HardEdgeFlat { inner: 0.0 }).unwrap()).unwrap();
    for s in [0.1, 0.5, 1.0, 3.0] {
        let x = 1.0 - s / (n * n) as f64;
        let exact = x.powi((n * (n + 1)) as i32);
        assert!((sampler.max_cdf(x) - exact).abs() < 1e-12, "s = {s}");
    }
}

fn sup_distance(sampler: &GasSampler, law: &LimitLaw, scheme: RescaleScheme, grid: &[f64]) -> f64 {
    // invert the rescaling numerically through a monotone search over x
    grid.iter()
        .map(|&t| {
            let (mut lo, mut hi) = (0.0f64, 1e6f64);
            let increasing = rescale_extreme(2.0, &scheme) > rescale_extreme(1.0, &scheme);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let above = (rescale_extreme(mid, &scheme) > t) == increasing;
                if above {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            let x = 0.5 * (lo + hi);
            let exact = if increasing { sampler.max_cdf(x) } else { 1.0 - sampler.max_cdf(x) };
            (exact - law.cdf(t).unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

/// The exact finite-`n` law of the rescaled maximum approaches the
/// finite-particle limit, slowly: near-circle and far-field masses of the
/// last components differ by a power of `n`.
#[test]
fn finite_particle_law_is_approached_from_the_exact_product() {
    let law = LimitLaw::FiniteParticles {
        alpha: 3.0,
        chi: 1.0,
        gamma: 1.0,
        l_plus: 0.5,
        l_minus: 1.5,
    };
    let grid: Vec<f64> = (1..120).map(|i| 0.05 * i as f64).collect();
    let errors: Vec<f64> = [250, 1000, 4000]
        .iter()
        .map(|&n| {
            let spec = GasSpec::lebesgue(
                n,
                1.0,
                RadialPotential::PowerTail {
                    alpha: 3.0,
                    gamma: 1.0,
                    l_plus: 0.5,
                    l_minus: 1.5,
                },
            )
            .unwrap();
            let sampler = GasSampler::new(spec).unwrap();
            sup_distance(&sampler, &law, RescaleScheme::Power { n, alpha: 3.0 }, &grid)
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn strong_gumbel_law_is_approached_from_the_exact_product() {
    let law = LimitLaw::GumbelStrong { q: 2.0, q_tilde: None };
    let grid: Vec<f64> = (0..=60).map(|i| -2.0 + 0.1 * i as f64).collect();
    let errors: Vec<f64> = [250, 1000, 4000]
        .iter()
        .map(|&n| {
            let sampler = GasSampler::new(GasSpec::lebesgue(n, 1.0, RadialPotential::PowerQ { q: 2.0 }).unwrap()).unwrap();
            let scheme = RescaleScheme::LinearGumbel {
                n,
                eps: solve_eps_n(2.0, n).unwrap(),
            };
            sup_distance(&sampler, &law, scheme, &grid)
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    assert!(errors[2] < 0.05, "{errors:?}");
}

#[test]
fn hard_edge_exact_law_matches_exponential_limit() {
    let law = LimitLaw::HardExponential {};
    let grid: Vec<f64> = (0..=80).map(|i| 0.05 * i as f64).collect();
    let n = 1000;
    let sampler = GasSampler::new(GasSpec::lebesgue(n, 1.0, RadialPotential::HardEdgeFlat { inner: 0.0 }).unwrap()).unwrap();
    let err = sup_distance(&sampler, &law, RescaleScheme::QuadraticHard { n }, &grid);
    // x^{n(n+1)} at x = 1 − t/n² differs from e^{−t} by O(t/n)
    assert!(err < 2.0 / n as f64, "{err}");
}
