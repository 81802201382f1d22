mod common;

use common::*;
use midepth::harness::{check_comparison, check_envelopes, run_suite, InstanceKind, InstanceSpec};
use midepth::hull::MixedBody;
use midepth::measure::{body_volume, mixed_integer_volume};
use proptest::prelude::*;

#[test]
fn suites_are_deterministic() {
    let a = serde_json::to_string(&run_suite("all", 4, 7).unwrap()).unwrap();
    let b = serde_json::to_string(&run_suite("all", 4, 7).unwrap()).unwrap();
    assert_eq!(a, b);
    let c = serde_json::to_string(&run_suite("all", 4, 8).unwrap()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn comparison_on_a_hundred_planar_bodies() {
    let spec = InstanceSpec::new(InstanceKind::RandomPolytope, 2, 1, 1.0, 3).unwrap();
    let r = check_comparison(&spec, 100).unwrap();
    assert_eq!(r.instances, 100);
    assert!(r.passed(), "{r:?}");
    assert!(r.checks >= 2 * (100 - r.skipped));
}

#[test]
fn envelopes_on_a_random_body() {
    let spec = InstanceSpec::new(InstanceKind::RandomPolytope, 2, 1, 1.5, 11).unwrap();
    let b = spec.generate(0).unwrap();
    let r = check_envelopes(&b, 10_000, 5).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(r.checks >= 10_000);
}

#[test]
fn envelopes_on_a_thin_planar_body() {
    let b = planar_body(4, 0.2, 3.0, 5);
    let r = check_envelopes(&b, 2000, 1).unwrap();
    assert!(r.passed(), "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Boxes: the integer count and the fiber volume factor, so both sides are explicit.
    #[test]
    fn comparison_on_boxes_by_hand(lo in prop::collection::vec(-3.0f64..0.0, 2), w in prop::collection::vec(1.2f64..5.0, 2), h in 0.2f64..3.0) {
        let hi = [lo[0] + w[0], lo[1] + w[1], h];
        let b = MixedBody::cube(2, 1, &[lo[0], lo[1], 0.0], &hi).unwrap();
        let count: f64 = (0..2).map(|i| (hi[i].floor() - lo[i].ceil() + 1.0).max(0.0)).product();
        let hd = mixed_integer_volume(&b).unwrap().total;
        prop_assert!((hd - count * h).abs() < 1e-9);
        let vol = w[0] * w[1] * h;
        prop_assert!((body_volume(&b).unwrap() - vol).abs() < 1e-9);
        // The inscribed cube radius of the base is min(w)/2.
        let k = 0.5 * w[0].min(w[1]);
        let e = 1.0 / (2.0 * k);
        prop_assert!((1.0 - e).powi(3) * vol <= hd + 1e-6);
        prop_assert!(hd <= (1.0 + e).powi(3) * vol + 1e-6);
    }
}
