use exactcsg::shapes::{cube, torus, uv_sphere};
use exactcsg::{boolean, BooleanOp, BooleanOptions, Mesh};
use serde_json::Value;

fn validator() -> jsonschema::Validator {
    let text = include_str!("../schemas/run_report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn check(v: &jsonschema::Validator, meshes: &[Mesh], op: BooleanOp) {
    let r = boolean(meshes, op, &BooleanOptions::default()).unwrap();
    let json: Value = serde_json::from_str(&r.report.to_json()).unwrap();
    let errors: Vec<String> = v.iter_errors(&json).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{op}: {errors:?}");
}

#[test]
fn every_report_matches_the_committed_schema() {
    let v = validator();
    let fixtures = [
        vec![cube([0.0; 3], 1.0), cube([0.5, 0.25, 0.125], 1.0)],
        vec![uv_sphere([0.0; 3], 1.0, 10, 6), uv_sphere([4.0, 0.0, 0.0], 1.0, 10, 6)],
        vec![torus([0.0; 3], 1.0, 0.3, 12, 8), uv_sphere([1.0, 0.0, 0.0], 0.4, 9, 6)],
        vec![cube([0.0; 3], 1.0), cube([0.0; 3], 1.0)],
    ];
    for f in &fixtures {
        for op in BooleanOp::ALL {
            check(&v, f, op);
        }
    }
}

#[test]
fn schema_rejects_drift() {
    let v = validator();
    let r = boolean(
        &[cube([0.0; 3], 1.0), cube([0.5; 3], 1.0)],
        BooleanOp::Union,
        &BooleanOptions::default(),
    )
    .unwrap();
    let good: Value = serde_json::from_str(&r.report.to_json()).unwrap();
    assert!(v.is_valid(&good));

    let mut extra = good.clone();
    extra["counts"]["surprise"] = Value::from(1);
    assert!(!v.is_valid(&extra));

    let mut missing = good.clone();
    missing["times"].as_object_mut().unwrap().remove("snap");
    assert!(!v.is_valid(&missing));

    let mut negative = good;
    negative["times"]["total"] = Value::from(-1.0);
    assert!(!v.is_valid(&negative));
}
