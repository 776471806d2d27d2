mod common;

use common::gaussian;
use opalg::io::{parse_algebra, write_algebra};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn algebra_files_round_trip_exactly(n in 1usize..=5, k in 0usize..=4, seed: u64) {
        let mats: Vec<_> = (0..k).map(|i| gaussian(n, n, seed ^ i as u64)).collect();
        let text = write_algebra(n, &mats);
        let (m, back) = parse_algebra(&text).unwrap();
        prop_assert_eq!(m, n);
        prop_assert_eq!(back, mats);
    }

    #[test]
    fn garbage_never_panics(text in ".{0,64}") {
        let _ = parse_algebra(&text);
    }
}

#[test]
fn non_finite_and_ragged_input_is_rejected() {
    assert!(parse_algebra(r#"{"ambient": 1, "matrices": [[[1e999, 0]]]}"#).is_err());
    assert!(parse_algebra(r#"{"ambient": 2, "matrices": [[[[1, 0], [0, 0]], [[0, 0]]]]}"#).is_err());
    assert!(parse_algebra(r#"{"ambient": 1, "matrices": [], "extra": 1}"#).is_err());
}
