use std::path::Path;

use testrig_core::config::RigConfig;

fn configs_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs"))
}

#[test]
fn shipped_config_equals_built_in_defaults() {
    let shipped = RigConfig::load(&configs_dir().join("default.toml")).unwrap();
    assert_eq!(
        shipped.effective().to_toml(),
        RigConfig::default().effective().to_toml()
    );
}

#[test]
fn shipped_rulebase_equals_embedded_default() {
    let text = std::fs::read_to_string(configs_dir().join("rulebase.toml")).unwrap();
    let fuzzy = testrig_core::grasp::FuzzySystem::from_toml(&text).unwrap();
    assert_eq!(fuzzy.to_toml(), testrig_core::grasp::FuzzySystem::default().to_toml());
}

#[test]
fn empty_document_is_the_default_rig() {
    let cfg = RigConfig::from_toml("", None).unwrap();
    assert_eq!(cfg.to_toml(), RigConfig::default().to_toml());
}
