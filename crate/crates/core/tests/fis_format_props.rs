mod support;

use fuzzy_signal::fis_format::{parse_fis, serialize_fis};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{fis_close, random_fis_document};

proptest! {
    #[test]
    fn generated_documents_round_trip(seed in any::<u64>()) {
        let doc = random_fis_document(&mut ChaCha8Rng::seed_from_u64(seed));
        let parsed = parse_fis(&doc).map_err(|e| TestCaseError::fail(format!("{e}\n{doc}")))?;
        let text = serialize_fis(&parsed);
        let again = parse_fis(&text).unwrap();
        prop_assert!(fis_close(&parsed, &again, 1e-9), "{doc}\n{text}");
        prop_assert_eq!(serialize_fis(&again), text);
    }

    #[test]
    fn arbitrary_numbers_survive_serialization(center in -1e6f64..1e6, sigma in 1e-3f64..1e3) {
        let doc = format!(
            "[System]\nName='n'\nNumInputs=1\nNumOutputs=1\nNumRules=1\n\n\
             [Input1]\nName='x'\nRange=[-1e7 1e7]\nNumMFs=1\nMF1='A':'gaussmf',[{sigma} {center}]\n\n\
             [Output1]\nName='y'\nRange=[0 1]\nNumMFs=1\nMF1='B':'gaussmf',[1 0.5]\n\n\
             [Rules]\n1, 1 (1) : 1\n"
        );
        let parsed = parse_fis(&doc).unwrap();
        let again = parse_fis(&serialize_fis(&parsed)).unwrap();
        prop_assert_eq!(parsed, again);
    }

    #[test]
    fn truncated_documents_never_panic(seed in any::<u64>(), cut in 0.0f64..1.0) {
        let doc = random_fis_document(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut at = (doc.len() as f64 * cut) as usize;
        while !doc.is_char_boundary(at) {
            at -= 1;
        }
        let _ = parse_fis(&doc[..at]);
    }
}

#[test]
fn shipped_rule_base_matches_the_built_in_one() {
    let text =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../traffic.fis")).unwrap();
    let builtin = fuzzy_signal::fis::build_traffic_fis();
    assert_eq!(text, serialize_fis(&builtin));
    assert_eq!(parse_fis(&text).unwrap(), builtin);
}
