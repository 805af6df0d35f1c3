use proptest::prelude::*;
use regex::bytes::Regex;
use versidx::index::vocab::tokenize;
use versidx::index::{
    parse_query, Corpus, Index, Method, MethodConfig, NonPosIndex, PosIndex, Scenario,
};
use versidx::postings::IntersectStats;

fn docs() -> impl Strategy<Value = Vec<String>> {
    let word = prop::sample::select(vec![
        "alpha", "beta", "gamma", "delta", "Eps", "z9", "omega",
    ]);
    let doc = prop::collection::vec(
        (word, prop::sample::select(vec![" ", ", ", ".\n", " - "])),
        0..60,
    )
    .prop_map(|ws| {
        ws.into_iter()
            .map(|(w, s)| format!("{w}{s}"))
            .collect::<String>()
    });
    prop::collection::vec(doc, 1..12)
}

fn words(doc: &str) -> Vec<&str> {
    doc.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tokens_match_a_regex_scan(t in prop::collection::vec(any::<u8>(), 0..500)) {
        let re = Regex::new(r"[A-Za-z0-9]+").unwrap();
        let want: Vec<(&[u8], u32)> = re.find_iter(&t).map(|m| (m.as_bytes(), m.start() as u32)).collect();
        let got: Vec<(&[u8], u32)> = tokenize(&t).map(|tk| (tk.word, tk.char_offset)).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn queries_match_a_naive_scan(ds in docs(), q in prop::collection::vec(prop::sample::select(vec!["alpha", "beta", "gamma", "Eps", "z9", "missing"]), 1..4)) {
        let corpus = Corpus::from_docs(&ds).unwrap();
        let pattern = q.join(" ");
        let and_want: Vec<u32> = ds
            .iter()
            .enumerate()
            .filter(|(_, d)| q.iter().all(|w| words(d).contains(w)))
            .map(|(i, _)| i as u32 + 1)
            .collect();
        let phrase_want: Vec<(u32, u32)> = ds
            .iter()
            .enumerate()
            .flat_map(|(i, d)| {
                let ws = words(d);
                (0..ws.len().saturating_sub(q.len() - 1))
                    .filter(|&j| ws[j..j + q.len()] == q[..])
                    .map(|j| (i as u32, j as u32))
                    .collect::<Vec<_>>()
            })
            .collect();
        for m in [Method::Rice, Method::VbyteCm, Method::VbyteSt, Method::RePairSkipCm, Method::VbyteLzma, Method::VbyteLzend] {
            let np = NonPosIndex::build(&corpus, MethodConfig::new(m, Scenario::NonPositional)).unwrap();
            let got = np.locate_and(&parse_query(&pattern, &np.vocab), &mut IntersectStats::default()).unwrap();
            prop_assert_eq!(&got, &and_want, "{:?}", m);
            let pos = PosIndex::build(&corpus, MethodConfig::new(m, Scenario::Positional), 8).unwrap();
            let got: Vec<(u32, u32)> = pos
                .locate_phrase(&parse_query(&pattern, &pos.vocab), &mut IntersectStats::default())
                .unwrap()
                .into_iter()
                .map(|o| (o.doc, o.offset))
                .collect();
            prop_assert_eq!(&got, &phrase_want, "{:?}", m);
        }
    }
}

#[test]
fn indexes_survive_save_and_load() {
    let ds = ["one two three two", "two three four", "", "four four one"];
    let corpus = Corpus::from_docs(&ds).unwrap();
    let dir = tempdir();
    for scenario in [Scenario::NonPositional, Scenario::Positional] {
        let cfg = MethodConfig::new(Method::RePairSkipSt, scenario);
        let idx = match scenario {
            Scenario::NonPositional => Index::NonPos(NonPosIndex::build(&corpus, cfg).unwrap()),
            Scenario::Positional => Index::Pos(PosIndex::build(&corpus, cfg, 4).unwrap()),
        };
        let path = dir.join(format!("{scenario:?}"));
        idx.save(&path).unwrap();
        let back = Index::load(&path).unwrap();
        assert_eq!(back.scenario(), scenario);
        assert_eq!(back.store().to_bytes(), idx.store().to_bytes());
        assert_eq!(back.collection_bytes(), corpus.text().len() as u64);
        if let Index::Pos(p) = &back {
            let text = corpus.text();
            assert_eq!(p.extract(3, 20).unwrap(), &text[3..20]);
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("versidx-index-test-{}", std::process::id()));
    std::fs::create_dir_all(&p).unwrap();
    p
}
