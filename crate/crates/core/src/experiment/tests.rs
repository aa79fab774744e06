use super::*;
use crate::potentials::RadialPotential;

fn small_hard_edge() -> ExperimentConfig {
    ExperimentConfig {
        gas: Some(GasSpec::lebesgue(40, 1.0, RadialPotential::HardEdgeFlat { inner: 0.0 }).unwrap()),
        replicas: 50,
        ..ExperimentConfig::acceptance(ExperimentKind::HardExponential, Suite::Fast)
    }
}

#[test]
fn kinds_round_trip_through_names() {
    for (i, k) in ExperimentKind::ALL.into_iter().enumerate() {
        assert_eq!(k.criterion(), i + 1);
        assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
    }
    assert!("".parse::<ExperimentKind>().is_err());
    assert!("".parse::<Suite>().is_err());
    assert_eq!("fast".parse::<Suite>().unwrap(), Suite::Fast);
}

#[test]
fn acceptance_configs_validate_and_round_trip() {
    for suite in [Suite::Fast, Suite::Full] {
        for k in ExperimentKind::ALL {
            let cfg = ExperimentConfig::acceptance(k, suite);
            cfg.validate().unwrap_or_else(|e| panic!("{k}: {e}"));
            assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
        }
    }
    let fast = ExperimentConfig::acceptance(ExperimentKind::HardExponential, Suite::Fast);
    let full = ExperimentConfig::acceptance(ExperimentKind::HardExponential, Suite::Full);
    assert!((fast.tolerance - 1.5 * full.tolerance).abs() < 1e-15);
}

#[test]
fn zero_replicas_is_a_config_error() {
    let cfg = ExperimentConfig {
        replicas: 0,
        ..small_hard_edge()
    };
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
}

#[test]
fn unknown_keys_are_rejected() {
    let text = "experiment = \"inversion\"\nseed = 1\ntolerance = 1e-6\nsizes = [20]\ncolour = \"red\"\n";
    assert!(matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_))));
    let text = "experiment = \"inversion\"\nseed = 1\ntolerance = 1e-6\nsizes = [20]\n";
    assert!(ExperimentConfig::from_toml(text).is_ok());
}

#[test]
fn mismatched_hypotheses_are_named() {
    let wrong_q = ExperimentConfig {
        law: Some(LimitLaw::GumbelStrong { q: 3.0, q_tilde: None }),
        ..ExperimentConfig::acceptance(ExperimentKind::GumbelStrong, Suite::Fast)
    };
    match wrong_q.validate() {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("q ln r"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let soft_edge = ExperimentConfig {
        gas: Some(GasSpec::lebesgue(40, 1.0, RadialPotential::CircleLog).unwrap()),
        ..small_hard_edge()
    };
    match soft_edge.validate() {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("r > 1"), "{msg}"),
        other => panic!("{other:?}"),
    }
    let wrong_radius = ExperimentConfig {
        law: Some(LimitLaw::VeryWeak { radius: 2.0, chi: 1.0 }),
        ..ExperimentConfig::acceptance(ExperimentKind::VeryWeak, Suite::Fast)
    };
    assert!(matches!(wrong_radius.validate(), Err(Error::Hypothesis(_))));
    let wrong_chi = ExperimentConfig {
        law: Some(LimitLaw::Annulus { radius: 1.5, chi: 2.0 }),
        ..ExperimentConfig::acceptance(ExperimentKind::Annulus, Suite::Fast)
    };
    assert!(matches!(wrong_chi.validate(), Err(Error::Hypothesis(_))));
    let wrong_law = ExperimentConfig {
        law: Some(LimitLaw::HardExponential {}),
        ..ExperimentConfig::acceptance(ExperimentKind::VeryWeak, Suite::Fast)
    };
    assert!(matches!(wrong_law.validate(), Err(Error::Config(_))));
}

/// The printed closed form `ln r + γr^{−α} + b r^{−α−1}` is not zero at
/// `r = 1`, so the circle conditions reject it.
#[test]
fn printed_finite_particle_potential_fails_circle_conditions() {
    let (alpha, gamma, lp) = (3.0f64, 1.0, 0.5);
    let b = -(alpha * gamma + lp) / (alpha + 1.0);
    let radii: Vec<f64> = (0..400).map(|i| 0.01 + 0.05 * i as f64).collect();
    let values: Vec<f64> = radii
        .iter()
        .map(|&r: &f64| {
            if r >= 1.0 {
                r.ln() + gamma * r.powf(-alpha) + b * r.powf(-alpha - 1.0)
            } else {
                0.5 * (1.0 - r)
            }
        })
        .collect();
    let cfg = ExperimentConfig {
        gas: Some(GasSpec::lebesgue(10, 1.0, RadialPotential::Tabulated { radii, values }).unwrap()),
        ..ExperimentConfig::acceptance(ExperimentKind::FiniteParticles, Suite::Fast)
    };
    match cfg.validate() {
        Err(Error::Hypothesis(msg)) => assert!(msg.contains("circle"), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rerun_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let cfg = ExperimentConfig {
            output_dir: Some(dir.path().join(sub)),
            ..small_hard_edge()
        };
        run_experiment(&cfg).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a.rescaled, b.rescaled);
    let csv_a = fs::read(dir.path().join("a/hard_exponential.csv")).unwrap();
    let csv_b = fs::read(dir.path().join("b/hard_exponential.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let text = String::from_utf8(csv_a).unwrap();
    assert!(text.starts_with("replica,raw_extreme,rescaled\n"));
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 51);

    let summary: Summary =
        serde_json::from_slice(&fs::read(dir.path().join("a/hard_exponential_summary.json")).unwrap()).unwrap();
    assert_eq!(summary.replicas, 50);
    assert_eq!(summary.n, 40);
    assert_eq!(summary.pass, summary.ks <= summary.tolerance);
}

#[test]
fn verdict_is_ks_against_tolerance() {
    let r = run_experiment(&small_hard_edge()).unwrap();
    assert_eq!(r.rescaled.len(), 50);
    assert!(r.rescaled.iter().all(|&x| x >= 0.0));
    assert_eq!(r.pass, r.statistic <= r.tolerance);
    let strict = ExperimentConfig {
        tolerance: 1e-9,
        ..small_hard_edge()
    };
    assert!(!run_experiment(&strict).unwrap().pass);
}

#[test]
fn small_deterministic_runs() {
    let inv = ExperimentConfig {
        sizes: vec![6],
        ..ExperimentConfig::acceptance(ExperimentKind::Inversion, Suite::Full)
    };
    let r = run_experiment(&inv).unwrap();
    assert!(r.pass, "{}", r.statistic);
    assert_eq!(r.tables[0].rows.len(), 6 * 100);

    let weak = ExperimentConfig {
        sizes: vec![5, 10, 20],
        tolerance: 1.0,
        ..ExperimentConfig::acceptance(ExperimentKind::GumbelFromWeak, Suite::Full)
    };
    let r = run_experiment(&weak).unwrap();
    assert_eq!(r.details["decreasing"], 1.0);

    let unsorted = ExperimentConfig {
        sizes: vec![20, 10],
        ..weak
    };
    assert!(!run_experiment(&unsorted).unwrap().pass);
}
