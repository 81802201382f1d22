use midepth_demo::{depth_at_json, necessity_curve_json, polygon_scene_json};
use serde_json::Value;

const STRIP: &str = "[[0.5,0],[6.5,0],[6.5,1],[0.5,1]]";

#[test]
fn strip_scene() {
    let v: Value = serde_json::from_str(&polygon_scene_json(STRIP).unwrap()).unwrap();
    assert_eq!(v["fibers"].as_array().unwrap().len(), 6);
    assert!((v["total"].as_f64().unwrap() - 6.0).abs() < 1e-9);
    assert_eq!(v["hull"].as_array().unwrap().len(), 4);
    let f = &v["fibers"][0];
    assert_eq!((f["lo"].as_f64().unwrap(), f["hi"].as_f64().unwrap()), (0.0, 1.0));
}

#[test]
fn strip_depth() {
    let v: Value = serde_json::from_str(&depth_at_json(STRIP, 3.0, 0.5, 2000).unwrap()).unwrap();
    let r = v["ratio"].as_f64().unwrap();
    assert!((5.0 / 12.0 - 1e-9..=0.5).contains(&r));
    assert!(depth_at_json(STRIP, 2.5, 0.5, 100).is_err());
}

#[test]
fn curve_starts_at_the_threshold() {
    let v: Value = serde_json::from_str(&necessity_curve_json(1.0, 2, 12).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows[0]["m"], 6);
    assert_eq!(rows.len(), 7);
    assert!((rows[0]["ratio"].as_f64().unwrap() - 0.276786).abs() < 1e-6);
    assert!(necessity_curve_json(1.0, 2, 4).is_err());
}

#[test]
fn bad_points_are_rejected() {
    assert!(polygon_scene_json("[[0,0],[1,1]]").is_err());
    assert!(polygon_scene_json("not json").is_err());
}
