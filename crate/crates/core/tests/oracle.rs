//! Sanity checks on the test-only big-integer Airy oracle itself.

// reference values are kept exactly as printed by the reference evaluation
#![allow(clippy::excessive_precision)]

mod common;

#[test]
fn gamma_constants_satisfy_reflection() {
    assert!(common::gamma_reflection_error() < 1e-95, "{}", common::gamma_reflection_error());
    assert_eq!(common::pi_f64(), std::f64::consts::PI);
}

#[test]
fn matches_reference_values() {
    // (t, Ai, Bi, Ai', Bi') from an independent 110-digit evaluation
    let table = [
        (-30.0, -0.08796818845684216283, -0.2244469422005663197, 1.228620602637485135, -0.4836947258276814928),
        (-12.5, -0.2762745613811602482, 0.1170333672573927766, -0.4193313304195051644, -0.9745165361671740722),
        (-1.0, 0.5355608832923521188, 0.10399738949694461189, -0.01016056711664520940, 0.5923756264227923508),
        (0.0, 0.3550280538878172393, 0.6149266274460007352, -0.2588194037928067984, 0.4482883573538263579),
        (0.5, 0.2316936064808334898, 0.8542770431031554933, -0.2249105326646838931, 0.5445725641405923018),
        (8.0, 4.692207616099231626e-8, 1199586.004124459931, -1.341439297906786574e-7, 3354342.312744538877),
    ];
    for (t, ai, bi, aip, bip) in table {
        let got = common::airy(t);
        for (g, want) in got.iter().zip([ai, bi, aip, bip]) {
            assert!(((g - want) / want).abs() < 4e-16, "t = {t}: {g} vs {want}");
        }
    }
}

#[test]
fn wronskian_holds_in_oracle() {
    for t in [-29.5, -7.25, 0.0, 3.0, 7.75] {
        let [ai, bi, aip, bip] = common::airy(t);
        let w = ai * bip - aip * bi;
        assert!((w * std::f64::consts::PI - 1.0).abs() < 1e-14, "t = {t}: {w}");
    }
}
