use std::path::Path;

use coulomb_core::{ExperimentConfig, ExperimentKind, Suite};

#[test]
fn shipped_configs_are_the_full_acceptance_configs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for kind in ExperimentKind::ALL {
        let path = dir.join(format!("{:02}_{}.toml", kind.criterion(), kind.name()));
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap();
        assert_eq!(cfg, ExperimentConfig::acceptance(kind, Suite::Full), "{}", path.display());
    }
}
