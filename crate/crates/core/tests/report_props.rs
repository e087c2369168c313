use ltwist::report::{render, report_all, Format, RunConfig, Status};

fn small() -> RunConfig {
    RunConfig { moduli: vec![5, 7], fock_moduli: vec![3], cutoff: 12, order: 20, terms: 20_000, ..RunConfig::default() }
}

#[test]
fn same_config_same_bytes() {
    let cfg = small();
    let a = report_all(&cfg).unwrap();
    let b = report_all(&cfg).unwrap();
    for f in [Format::Json, Format::Csv, Format::Text] {
        assert_eq!(render(&a, f), render(&b, f));
    }
    let serial = report_all(&RunConfig { jobs: 1, ..cfg }).unwrap();
    assert_eq!(serde_json::to_string(&a.checks).unwrap(), serde_json::to_string(&serial.checks).unwrap());
}

#[test]
fn config_is_serialized_and_counts_add_up() {
    let cfg = small();
    let r = report_all(&cfg).unwrap();
    let v: serde_json::Value = serde_json::from_str(&render(&r, Format::Json)).unwrap();
    assert_eq!(v["config"]["cutoff"], 12);
    assert_eq!(v["config"]["moduli"], serde_json::json!([5, 7]));
    assert_eq!(r.passed + r.failed + r.skipped, r.checks.len());
    assert!(r.checks.iter().any(|c| c.status == Status::Skipped));
}
