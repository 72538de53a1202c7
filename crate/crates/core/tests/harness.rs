use sidewise::experiments::{ExperimentError, Lab, Scenario};
use sidewise::harness::{parse_scenario, preset, scenario_to_toml, to_csv, write_output, HarnessError, PRESETS};

#[test]
fn toml_round_trip_is_identity() {
    for (name, text) in PRESETS {
        let a = parse_scenario(text).unwrap();
        let b = parse_scenario(&scenario_to_toml(&a).unwrap()).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let a = Scenario::annulus();
    assert_eq!(parse_scenario(&scenario_to_toml(&a).unwrap()).unwrap(), a);
}

#[test]
fn annulus_preset_matches_the_builtin() {
    assert_eq!(preset("annulus").unwrap(), Scenario::annulus());
}

#[test]
fn unknown_keys_are_rejected() {
    let mut text = PRESETS[0].1.to_string();
    text.push_str("\n[extra]\nvalue = 1\n");
    assert!(matches!(parse_scenario(&text), Err(HarnessError::Parse(_))));
    let typo = PRESETS[0].1.replace("observation", "observaton");
    assert!(parse_scenario(&typo).is_err());
}

#[test]
fn missing_measurement_region_is_a_config_error() {
    let text = r#"
name = "broken"
[domain]
preset = "annulus"
inner = 1.0
outer = 2.0
[regions.source]
curve = 0
[times]
source-window = 1.0
observation = 2.0
"#;
    let err = parse_scenario(text).unwrap_err();
    assert!(err.to_string().contains("measurement"), "{err}");
    assert!(sidewise::Error::from(err).is_config());
}

#[test]
fn region_on_a_missing_curve_is_a_config_error() {
    let mut s = Scenario::annulus();
    s.regions.measurement.curve = 5;
    let err = Lab::new(&s).err().expect("curve 5 does not exist");
    assert!(err.is_config(), "{err}");
    assert!(matches!(err, ExperimentError::Geometry(_) | ExperimentError::Config(_)));
}

#[test]
fn outputs_are_written_under_the_directory() {
    let dir = std::env::temp_dir().join(format!("sidewise-harness-{}", std::process::id()));
    let csv = to_csv(&["a", "b"], &[vec!["1".into(), "2".into()]]);
    assert_eq!(csv, b"a,b\n1,2\n");
    let path = write_output(&dir.join("nested"), "t.csv", &csv).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), csv);
    std::fs::remove_dir_all(&dir).unwrap();
}
