use proptest::prelude::*;
use versidx::text::TextStore;

fn text() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        prop::collection::vec(any::<u8>(), 0..3000),
        (prop::collection::vec(b' '..b'~', 1..300), 1usize..30)
            .prop_map(|(unit, n)| unit.repeat(n)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn windows_match_for_every_sampling(t in text(), windows in prop::collection::vec((any::<u64>(), 0u64..800), 1..15)) {
        let store = TextStore::build(&t, 1).unwrap();
        let n = t.len() as u64;
        prop_assert_eq!(store.len(), n);
        for ct in [1u32, 3, 32, 4096] {
            let s = TextStore::from_bytes(&store.resample(ct).unwrap().to_bytes()).unwrap();
            prop_assert_eq!(s.sample_ct(), ct);
            for &(a, len) in &windows {
                let a = if n == 0 { 0 } else { a % (n + 1) };
                let b = (a + len).min(n);
                prop_assert_eq!(s.extract(a, b).unwrap(), &t[a as usize..b as usize]);
            }
        }
    }
}

#[test]
fn sparser_sampling_is_smaller() {
    // Pseudo-random word order keeps the Re-Pair sequence long.
    let words = [
        "the", "quick", "brown", "fox", "jumps", "over", "lazy", "dog",
    ];
    let mut x = 1u64;
    let t: Vec<u8> = (0..4000)
        .flat_map(|_| {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            format!("{} ", words[(x >> 61) as usize]).into_bytes()
        })
        .collect();
    let sizes: Vec<usize> = [1u32, 8, 64, 512]
        .iter()
        .map(|&ct| TextStore::build(&t, ct).unwrap().to_bytes().len())
        .collect();
    assert!(sizes.windows(2).all(|w| w[0] > w[1]), "{sizes:?}");
}

#[test]
fn bad_ranges_are_errors() {
    let s = TextStore::build(b"hello world", 4).unwrap();
    assert!(s.extract(5, 3).is_err());
    assert!(s.extract(0, 12).is_err());
    assert_eq!(s.extract(11, 11).unwrap(), b"");
}
