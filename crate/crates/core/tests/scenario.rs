use std::path::Path;

use pipeflow::scenario::{self, InitialSpec, Scenario};
use pipeflow::Error;

#[test]
fn shipped_configs_parse_and_match_the_builders() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let builtin: Vec<Scenario> = scenario::standard_suite().into_iter().chain([scenario::smooth_section_study()]).collect();
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let sc = Scenario::from_toml(&std::fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        if let Some(b) = builtin.iter().find(|b| b.name == sc.name) {
            assert_eq!(&sc, b, "{path:?} is stale; regenerate with the export_scenarios example");
            seen += 1;
        }
    }
    assert_eq!(seen, builtin.len());
}

#[test]
fn suite_has_eight_distinct_scenarios() {
    let suite = scenario::standard_suite();
    assert_eq!(suite.len(), 8);
    let mut names: Vec<_> = suite.iter().map(|s| s.name.clone()).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), 8);
}

#[test]
fn epsilon_defaults_to_h_squared() {
    let mut sc = scenario::kink_pipe();
    assert!((sc.epsilon_for(0.05) - 0.0025).abs() < 1e-18);
    sc.numerics.epsilon = Some(1e-3);
    assert_eq!(sc.epsilon_for(sc.numerics.h), 1e-3);
    assert!((sc.epsilon_for(0.05) - 0.0025).abs() < 1e-18);
}

#[test]
fn window_defaults_to_inverse_coarsest_h() {
    let mut sc = scenario::arc_pipe();
    sc.numerics.window = None;
    sc.numerics.h_list = vec![0.25, 0.1];
    assert_eq!(sc.window(), (-4.0, 4.0));
}

#[test]
fn study_scenario_only_shrinks_the_pulse() {
    let (base, study) = (scenario::smooth_section(), scenario::smooth_section_study());
    assert_eq!(base.geometry, study.geometry);
    assert_eq!(study.numerics.horizon, 0.5);
    let delta = |sc: &Scenario| match &sc.initial {
        InitialSpec::Stationary { patches, .. } => patches[0].delta.clone(),
        _ => unreachable!(),
    };
    for (a, b) in delta(&base).iter().zip(delta(&study)) {
        assert!((a / b - 10.0).abs() < 1e-12);
    }
}

#[test]
fn wrong_state_dimension_is_a_config_error() {
    let mut sc = scenario::kink_pipe();
    sc.initial = InitialSpec::Constant { state: vec![1.0, 0.2, 3.0] };
    assert!(matches!(Scenario::from_toml(&sc.to_toml()), Err(Error::Config(_))));
}
