use proptest::prelude::*;
use weakot::attacks::cheat_report;
use weakot::catalog::{build_cks, build_trivial, random_complete_protocol};
use weakot::protocol::{all_final_states, parse_protocol, ProtocolSpec};
use weakot::Error;

fn same_behaviour(a: &ProtocolSpec, b: &ProtocolSpec) {
    assert_eq!(a.name(), b.name());
    assert_eq!(a.layout(), b.layout());
    let (fa, fb) = (all_final_states(a).unwrap(), all_final_states(b).unwrap());
    for (x, y) in fa.iter().zip(fb.iter()) {
        let ov = x.inner(y).unwrap();
        assert!((ov.re - 1.0).abs() < 1e-12 && ov.im.abs() < 1e-12);
    }
}

#[test]
fn catalog_roundtrip() {
    for spec in [build_cks(), build_trivial()] {
        let back = parse_protocol(&spec.to_json()).unwrap();
        same_behaviour(&spec, &back);
        assert_eq!(back.to_json(), spec.to_json());
    }
}

#[test]
fn malformed_inputs() {
    assert!(matches!(parse_protocol("[1, 2"), Err(Error::Json(_))));
    let mut v: serde_json::Value = serde_json::from_str(&build_cks().to_json()).unwrap();
    v["alice_prep"].as_array_mut().unwrap().pop();
    assert!(matches!(parse_protocol(&v.to_string()), Err(Error::Format(_))));
    let mut v: serde_json::Value = serde_json::from_str(&build_cks().to_json()).unwrap();
    v["factors"][0]["dim"] = serde_json::json!(1);
    assert!(matches!(parse_protocol(&v.to_string()), Err(Error::Spec(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_protocol_roundtrip(seed in any::<u64>()) {
        let spec = random_complete_protocol(seed);
        let back = parse_protocol(&spec.to_json()).unwrap();
        same_behaviour(&spec, &back);
        let (ra, rb) = (cheat_report(&spec).unwrap(), cheat_report(&back).unwrap());
        prop_assert!((ra.theorem1_lhs - rb.theorem1_lhs).abs() < 1e-9);
    }
}
