//! The shipped weighting fixtures must load, validate, and reproduce the
//! published ensemble columns.

use std::path::PathBuf;

use rvos_core::mask_io::load_weight_config;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/weights")
        .join(name)
}

#[test]
fn every_fixture_loads_and_validates() {
    let expected_entry_counts = [
        ("only_26b_uniform_plus.json", 1),
        ("only_26bx_uniform_plus.json", 1),
        ("pair_14b_26b.json", 7),
        ("best_mix.json", 9),
        ("broad_mix.json", 11),
        ("equal_all.json", 15),
        ("scaled_models.json", 15),
    ];
    for (name, count) in expected_entry_counts {
        let config = load_weight_config(fixture(name)).unwrap();
        assert_eq!(config.entries.len(), count, "{name}");
        assert_eq!(config.threshold, 0.5, "{name}");
        assert!(config.entries.values().all(|&w| w > 0.0), "{name}");
    }
}

#[test]
fn best_mix_carries_the_winning_weights() {
    let config = load_weight_config(fixture("best_mix.json")).unwrap();
    assert_eq!(config.entries["14B/uniform"], 2.0);
    assert_eq!(config.entries["14B/uniform+"], 2.5);
    for strategy in [
        "uniform",
        "uniform+",
        "qframe",
        "wrap_around",
        "wrap_around+",
    ] {
        assert_eq!(config.entries[&format!("26B/{strategy}")], 1.0);
    }
    assert_eq!(config.entries["26B\u{2021}/uniform+"], 2.0);
    assert_eq!(config.entries["26B\u{2021}/wrap_around"], 2.0);
}

#[test]
fn single_source_fixtures_name_the_uniform_plus_runs() {
    let a = load_weight_config(fixture("only_26b_uniform_plus.json")).unwrap();
    assert_eq!(a.entries["26B/uniform+"], 1.0);
    let b = load_weight_config(fixture("only_26bx_uniform_plus.json")).unwrap();
    assert_eq!(b.entries["26B\u{2021}/uniform+"], 1.0);
}
