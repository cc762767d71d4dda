mod common;

use std::sync::Arc;

use codeco::generate::{generate_all, GenerateConfig};
use codeco::oracle::{enumerate_naive, recognize_naive, OracleConfig};
use codeco::parser::ParseState;

#[test]
fn parser_counts_match_oracle() {
    let mut failures = Vec::new();
    for e in common::corpus() {
        let check = common::check_counts(&e, 7, 200_000);
        assert!(check.sequences > 0);
        failures.extend(check.mismatches);
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn generator_stream_matches_oracle_multiset() {
    for e in common::corpus() {
        let start = e.start();
        let mut from_gen = std::collections::BTreeMap::<Vec<String>, u64>::new();
        for (w, t) in generate_all(&e.grammar, &start, &GenerateConfig::new(8)).unwrap() {
            assert_eq!(t.leaves(), w, "{}", e.name);
            *from_gen.entry(w).or_default() += 1;
        }
        let oracle = enumerate_naive(&e.grammar, &start, &OracleConfig { max_tokens: 8, ..Default::default() }).unwrap();
        assert_eq!(from_gen, oracle, "{}", e.name);
    }
}

#[test]
fn generated_sentences_parse_with_matching_trees() {
    for e in common::corpus() {
        let start = e.start();
        let all = generate_all(&e.grammar, &start, &GenerateConfig::new(7)).unwrap();
        let fresh = ParseState::new(Arc::clone(&e.grammar), &start).unwrap();
        for (w, _) in all.iter().take(300) {
            let st = w.iter().fold(fresh.clone(), |st, t| st.feed_unchecked(t));
            assert!(st.is_complete(), "{}: {w:?}", e.name);
            let trees = st.extract_trees();
            let n = all.iter().filter(|(x, _)| x == w).count();
            assert_eq!(trees.len(), n, "{}: {w:?}", e.name);
            for t in &trees {
                assert_eq!(&t.leaves(), w);
                assert!(all.iter().any(|(x, gt)| x == w && gt == t), "{}: tree not generated for {w:?}", e.name);
            }
            let cfg = OracleConfig::default();
            assert_eq!(recognize_naive(&e.grammar, &start, w, &cfg).unwrap(), n as u64, "{}: {w:?}", e.name);
        }
    }
}

#[test]
fn bound_monotonicity() {
    for e in common::corpus() {
        let start = e.start();
        let small: std::collections::BTreeSet<Vec<String>> =
            generate_all(&e.grammar, &start, &GenerateConfig::new(5)).unwrap().into_iter().map(|(w, _)| w).collect();
        let big: std::collections::BTreeSet<Vec<String>> =
            generate_all(&e.grammar, &start, &GenerateConfig::new(6)).unwrap().into_iter().map(|(w, _)| w).collect();
        assert!(small.is_subset(&big), "{}", e.name);
    }
}
