mod support;

use fuzzy_signal::fis::{build_traffic_fis, traffic::OUTPUT_RANGE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{brute_force_mamdani, output_center, INPUT_CENTERS, TABLE};

#[test]
fn grid_centers_defuzzify_onto_table_consequents() {
    let fis = build_traffic_fis();
    for (i, &w) in INPUT_CENTERS.iter().enumerate() {
        for (j, &q) in INPUT_CENTERS.iter().enumerate() {
            let want = output_center(TABLE[i][j]);
            let got = fis.infer(&[w, q]).unwrap().value;
            assert!((got - want).abs() <= 0.05, "({w},{q}): {got} vs {want}");
        }
    }
}

#[test]
fn oracle_values_at_corners() {
    let (lo, hi) = OUTPUT_RANGE;
    for (w, q, want) in [
        (0.0, 0.0, 0.0),
        (40.0, 40.0, 10.0),
        (0.0, 40.0, 5.0),
        (30.0, 30.0, 7.5),
    ] {
        let v = brute_force_mamdani(w, q, 100_001, lo, hi);
        assert!((v - want).abs() <= 0.05, "oracle ({w},{q}) = {v}");
    }
}

#[test]
fn matches_dense_oracle_on_random_inputs() {
    let fis = build_traffic_fis();
    let (lo, hi) = OUTPUT_RANGE;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w = rng.gen_range(0.0..=50.0);
        let q = rng.gen_range(0.0..=50.0);
        let got = fis.infer(&[w, q]).unwrap().value;
        let want = brute_force_mamdani(w, q, 100_001, lo, hi);
        worst = worst.max((got - want).abs());
        assert!((got - want).abs() <= 1e-3, "({w},{q}): {got} vs {want}");
    }
    eprintln!("worst deviation from oracle: {worst:e}");
}

#[test]
fn output_never_leaves_universe() {
    let fis = build_traffic_fis();
    let (lo, hi) = OUTPUT_RANGE;
    for w in (0..=60).step_by(3) {
        for q in (0..=60).step_by(3) {
            let v = fis.infer(&[w as f64, q as f64]).unwrap().value;
            assert!((lo..=hi).contains(&v));
        }
    }
}
