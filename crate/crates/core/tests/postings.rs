use std::collections::BTreeSet;

use proptest::prelude::*;
use versidx::codecs::{CodecId, MonotoneList};
use versidx::postings::{
    intersect, Algorithm, HybridConfig, IntersectStats, ListConfig, PostingSet, Sampling,
};

const U: u32 = 20_000;

fn list() -> impl Strategy<Value = Vec<u32>> {
    prop_oneof![
        prop::collection::btree_set(1..=U, 0..40),
        prop::collection::btree_set(1..=U, 0..3000),
        (1..=U, 0u32..5000).prop_map(|(a, n)| (a..=(a + n).min(U)).collect()),
    ]
    .prop_map(|s| s.into_iter().collect())
}

fn configs() -> Vec<(ListConfig, Algorithm)> {
    let with = |codec, sampling, hybrid: Option<u32>| ListConfig {
        codec,
        param: None,
        sampling,
        hybrid: hybrid.map(|d| HybridConfig::new(d).unwrap()),
    };
    vec![
        (with(CodecId::Rice, Sampling::None, None), Algorithm::Merge),
        (
            with(CodecId::RiceRuns, Sampling::None, Some(8)),
            Algorithm::Merge,
        ),
        (
            with(CodecId::Simple9, Sampling::None, None),
            Algorithm::Merge,
        ),
        (
            with(CodecId::PforDelta, Sampling::None, None),
            Algorithm::Merge,
        ),
        (
            with(CodecId::Vbyte, Sampling::Cm { k: 4 }, None),
            Algorithm::Svs,
        ),
        (
            with(CodecId::Vbyte, Sampling::Cm { k: 1 }, Some(16)),
            Algorithm::Svs,
        ),
        (
            with(CodecId::Vbyte, Sampling::St { b: 16 }, None),
            Algorithm::Lookup,
        ),
        (
            with(CodecId::Vbyte, Sampling::St { b: 128 }, Some(8)),
            Algorithm::Lookup,
        ),
    ]
}

fn oracle(lists: &[Vec<u32>]) -> Vec<u32> {
    let mut acc: BTreeSet<u32> = lists[0].iter().copied().collect();
    for l in &lists[1..] {
        let s: BTreeSet<u32> = l.iter().copied().collect();
        acc = acc.intersection(&s).copied().collect();
    }
    acc.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn intersections_match_a_set_oracle(raw in prop::collection::vec(list(), 2..5)) {
        let lists: Vec<MonotoneList> = raw.iter().map(|v| MonotoneList::new(v.clone(), U).unwrap()).collect();
        let want = oracle(&raw);
        for (cfg, algo) in configs() {
            let set = PostingSet::build(&lists, U, cfg).unwrap();
            let back = PostingSet::from_bytes(&set.to_bytes()).unwrap();
            let refs: Vec<_> = back.lists.iter().collect();
            for a in [algo, Algorithm::Merge] {
                let got = intersect(a, &refs, &mut IntersectStats::default()).unwrap();
                prop_assert_eq!(&got, &want, "{:?} {:?}", cfg, a);
            }
            for (l, v) in back.lists.iter().zip(&raw) {
                prop_assert_eq!(&l.fetch().unwrap(), v);
            }
        }
    }
}

#[test]
fn sampled_svs_decodes_less_on_skewed_lists() {
    let long: Vec<u32> = (1..=U).step_by(2).collect();
    let short: Vec<u32> = (1..=U).step_by(2001).collect();
    let lists = [
        MonotoneList::new(short, U).unwrap(),
        MonotoneList::new(long, U).unwrap(),
    ];
    let cfg = ListConfig {
        sampling: Sampling::Cm { k: 4 },
        ..ListConfig::plain(CodecId::Vbyte)
    };
    let set = PostingSet::build(&lists, U, cfg).unwrap();
    let refs: Vec<_> = set.lists.iter().collect();
    let (mut a, mut b) = (IntersectStats::default(), IntersectStats::default());
    let r1 = intersect(Algorithm::Svs, &refs, &mut a).unwrap();
    let r2 = intersect(Algorithm::Merge, &refs, &mut b).unwrap();
    assert_eq!(r1, r2);
    assert!(
        a.decoded < b.decoded,
        "svs {} merge {}",
        a.decoded,
        b.decoded
    );
}

#[test]
fn corrupt_posting_sets_are_rejected() {
    let lists = [MonotoneList::new((1..500).collect(), U).unwrap()];
    let bytes = PostingSet::build(&lists, U, ListConfig::plain(CodecId::Vbyte))
        .unwrap()
        .to_bytes();
    assert!(PostingSet::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(PostingSet::from_bytes(&extra).is_err());
    let mut magic = bytes;
    magic[0] ^= 0xff;
    assert!(PostingSet::from_bytes(&magic).is_err());
}
