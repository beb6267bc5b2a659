use randcomp::oracle::exact_prob_uniform;
use randcomp::property::PropertySpec;
use serde::Deserialize;

#[derive(Deserialize)]
struct Case {
    n: u64,
    m: u64,
    property: PropertySpec,
    value: String,
}

#[test]
fn uniform_rationals_match_independent_enumeration() {
    let text = include_str!("data/golden_uniform.json");
    let cases: Vec<Case> = serde_json::from_str(text).unwrap();
    assert_eq!(cases.len(), 20);
    for case in cases {
        let prop = case.property.build().unwrap();
        let got = exact_prob_uniform(case.n, case.m, |c| prop.eval(c).unwrap()).unwrap();
        let r = got.rational.unwrap();
        let text = if r.denom() == &1.into() { format!("{}/1", r.numer()) } else { r.to_string() };
        assert_eq!(text, case.value, "n={} m={} {prop}", case.n, case.m);
    }
}
