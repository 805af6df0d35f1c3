use std::collections::BTreeSet;

use proptest::prelude::*;
use versidx::codecs::{self, GapSequence};
use versidx::postings::IntersectStats;
use versidx::repair::{Grammar, RePairConfig, RpVariant};

const U: u32 = 50_000;

/// Lists that share long stretches, so pairs repeat across lists.
fn lists() -> impl Strategy<Value = Vec<Vec<u32>>> {
    let base = prop::collection::btree_set(1..=U, 1..400);
    (base, prop::collection::vec((0u32..4, 0u64..u64::MAX), 1..8)).prop_map(|(base, edits)| {
        let base: Vec<u32> = base.into_iter().collect();
        edits
            .into_iter()
            .map(|(mode, seed)| {
                let mut v: BTreeSet<u32> = base
                    .iter()
                    .copied()
                    .filter(|x| u64::from(*x) % 7 != seed % 7 || mode == 0)
                    .collect();
                for i in 0..mode {
                    v.insert(1 + ((seed >> (i * 16)) % u64::from(U)) as u32);
                }
                v.into_iter().collect()
            })
            .collect()
    })
}

const VARIANTS: [RpVariant; 5] = [
    RpVariant::Plain,
    RpVariant::Skip,
    RpVariant::SkipCm { k: 1 },
    RpVariant::SkipCm { k: 64 },
    RpVariant::SkipSt { b: 16 },
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn grammars_reproduce_and_intersect(raw in lists(), rb in prop_oneof![Just(0.0), Just(1e-3)]) {
        let gaps: Vec<GapSequence> = raw.iter().map(|v| codecs::to_gaps(v).unwrap()).collect();
        let mut want: BTreeSet<u32> = raw[0].iter().copied().collect();
        for l in &raw[1..] {
            want = want.intersection(&l.iter().copied().collect()).copied().collect();
        }
        let want: Vec<u32> = want.into_iter().collect();
        let ids: Vec<usize> = (0..raw.len()).collect();
        for v in VARIANTS {
            let g = Grammar::build(&gaps, U, RePairConfig::new(v, rb)).unwrap();
            let back = Grammar::from_bytes(&g.to_bytes()).unwrap();
            prop_assert_eq!(back.to_bytes(), g.to_bytes());
            for (i, l) in raw.iter().enumerate() {
                prop_assert_eq!(&back.fetch(i).unwrap(), l, "{:?}", v);
            }
            prop_assert_eq!(&back.intersect(&ids, &mut IntersectStats::default()).unwrap(), &want, "{:?}", v);
        }
    }
}

#[test]
fn repeated_lists_compress() {
    let list: Vec<u32> = (1..2000).map(|i| i * 5 + (i % 3)).collect();
    let gaps = vec![codecs::to_gaps(&list).unwrap(); 50];
    let g = Grammar::build(&gaps, U, RePairConfig::new(RpVariant::Plain, 0.0)).unwrap();
    assert!(
        g.sequence().len() < 50 * 20,
        "sequence has {} symbols",
        g.sequence().len()
    );
}

#[test]
fn corrupt_grammars_are_rejected() {
    let gaps = vec![codecs::to_gaps(&(1..300).collect::<Vec<_>>()).unwrap(); 3];
    let bytes = Grammar::build(
        &gaps,
        U,
        RePairConfig::new(RpVariant::SkipSt { b: 16 }, 0.0),
    )
    .unwrap()
    .to_bytes();
    for cut in [1, 4, bytes.len() / 2] {
        assert!(Grammar::from_bytes(&bytes[..bytes.len() - cut]).is_err());
    }
}
