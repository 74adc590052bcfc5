//! The shipped data files agree with the in-crate fixtures.

use std::fs;
use std::path::PathBuf;

use bellctx::fixtures;
use bellctx::geometry::io::nc_verdict_from_value;
use bellctx::geometry::NcVerdict;
use bellctx::model::io::{parse_behaviour, parse_correlation, parse_scenario};
use bellctx::quantum::io::realisation_from_value;
use bellctx::quantum::{max_abs, tsirelson_realisation};

fn read(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "data", name].iter().collect();
    fs::read_to_string(p).unwrap()
}

#[test]
fn correlation_and_behaviour_files() {
    assert_eq!(parse_correlation(&read("pr-box.json")).unwrap(), fixtures::pr());
    assert_eq!(parse_scenario(&read("h-scenario.json")).unwrap(), fixtures::scenario_h());
    assert_eq!(parse_behaviour(&read("qc.json")).unwrap(), fixtures::q_c());
    assert_eq!(parse_behaviour(&read("qc-prime.json")).unwrap(), fixtures::q_c_prime());
}

#[test]
fn model_file() {
    let v: serde_json::Value = serde_json::from_str(&read("qc-prime-model.json")).unwrap();
    let verdict = nc_verdict_from_value(&v, &fixtures::scenario_h_prime()).unwrap();
    assert_eq!(verdict, NcVerdict::NonContextual(fixtures::q_c_prime_model()));
}

#[test]
fn tsirelson_file() {
    let v: serde_json::Value = serde_json::from_str(&read("tsirelson.json")).unwrap();
    let r = realisation_from_value(&v).unwrap();
    let want = tsirelson_realisation();
    assert_eq!((r.da, r.db), (want.da, want.db));
    assert!(max_abs(&(&r.rho - &want.rho)) < 1e-15);
    for (got, want) in r.m.iter().chain(&r.n).zip(want.m.iter().chain(&want.n)) {
        for (g, w) in got.iter().zip(want) {
            assert!(max_abs(&(g - w)) < 1e-15);
        }
    }
}
