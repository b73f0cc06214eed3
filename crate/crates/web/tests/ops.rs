use sato_tate_web::{
    angle_density_json, eta_coefficients_json, spacing_distribution_json, MAX_PRIMES,
};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn angle_density_for_preset_a() {
    let v = parse(angle_density_json("a", 2000, 40).unwrap());
    assert_eq!(v["sample_size"], 2000);
    assert_eq!(v["prime_limit"], 17389);
    assert_eq!(v["histogram"]["counts"].as_array().unwrap().len(), 40);
    let total: u64 = v["histogram"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(total, 2000);
    let chi = &v["chi_square"];
    assert!(chi["statistic"].as_f64().unwrap() < chi["critical_1pct"].as_f64().unwrap());
    assert_eq!(v["curve"].as_array().unwrap().len(), 201);
}

#[test]
fn spacing_distribution_for_delta() {
    let v = parse(spacing_distribution_json("c", 3000, 1, 30).unwrap());
    assert_eq!(v["spacings"], 2998);
    let mean = v["mean"].as_f64().unwrap();
    assert!((mean - 2.0).abs() <= v["mean_tolerance"].as_f64().unwrap());
    let ks = &v["ks"];
    assert!(ks["statistic"].as_f64().unwrap() < ks["critical_1pct"].as_f64().unwrap());
}

#[test]
fn coefficients_of_weight_two_product() {
    let v = parse(eta_coefficients_json("1^2,11^2", "11", 13).unwrap());
    assert_eq!(v["weight"], 2);
    let a: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["a_n"].as_str().unwrap())
        .collect();
    assert_eq!(
        a,
        ["1", "-2", "-1", "2", "1", "2", "-2", "0", "-2", "-2", "1", "-2", "4"]
    );
    assert_eq!(v["rows"][10]["within_bound"], Value::Null);
    assert_eq!(v["rows"][12]["within_bound"], true);
}

#[test]
fn rejects_bad_input() {
    assert!(angle_density_json("z", 100, 40).is_err());
    assert!(angle_density_json("a", MAX_PRIMES + 1, 40).is_err());
    assert!(angle_density_json("a", 100, 1).is_err());
    assert!(spacing_distribution_json("a", 1, 0, 20).is_err());
    assert!(eta_coefficients_json("1^3", "", 10).is_err());
    assert!(eta_coefficients_json("1^24", "x", 10).is_err());
    assert!(eta_coefficients_json("1^24", "", 0).is_err());
}
