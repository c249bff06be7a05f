use corridor::fixtures::{self, random_scenario, RandomSpec};
use corridor::io::{load_scenario, parse_doc, parse_scenario, to_json, LoadError, ScenarioDoc};
use corridor_core::ModelError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;

fn scenarios_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios"))
}

#[test]
fn bundled_fixtures_match_their_builders() {
    for (name, built) in fixtures::named() {
        let loaded = load_scenario(&scenarios_dir().join(format!("{name}.json"))).unwrap();
        let a: ScenarioDoc = serde_json::from_str(&to_json(&loaded)).unwrap();
        let b = ScenarioDoc::from_scenario(&built);
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn documents_survive_a_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let s = random_scenario(&mut rng, &RandomSpec::bench());
        let text = to_json(&s);
        let back = parse_scenario(&text, "mem").unwrap();
        assert_eq!(to_json(&back), text);
    }
}

#[test]
fn parse_errors_carry_the_json_path() {
    let mut doc: serde_json::Value = serde_json::from_str(&to_json(&fixtures::overtake())).unwrap();
    doc["lanelets"][0]["width"] = serde_json::json!("wide");
    match parse_doc(&doc.to_string(), "bad.json") {
        Err(LoadError::Parse { file, at, .. }) => {
            assert_eq!(file, "bad.json");
            assert_eq!(at, "lanelets[0].width");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn unknown_fields_are_rejected() {
    let mut doc: serde_json::Value = serde_json::from_str(&to_json(&fixtures::overtake())).unwrap();
    doc["colour"] = serde_json::json!("red");
    assert!(matches!(parse_doc(&doc.to_string(), "x"), Err(LoadError::Parse { .. })));
}

#[test]
fn semantic_errors_are_reported_as_invalid() {
    let mut doc: serde_json::Value = serde_json::from_str(&to_json(&fixtures::overtake())).unwrap();
    doc["planning_problem"]["goal"]["lanelet"] = serde_json::json!(99);
    match parse_scenario(&doc.to_string(), "x") {
        Err(LoadError::Invalid { error: ModelError::UnknownLanelet(id), .. }) => assert_eq!(id.0, 99),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_scenario(Path::new("/nonexistent/x.json")), Err(LoadError::Io { .. })));
}
