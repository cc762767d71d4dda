#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use codeco::feature::{FeatureStructure, FeatureValue, Symbol, VarId};
use codeco::grammar::{Category, Grammar, Rule};
use codeco::notation::load_grammar;
use codeco::oracle::{continuations_naive, enumerate_naive, OracleConfig};
use codeco::parser::{LookaheadConfig, ParseState};
use proptest::prelude::*;

pub struct Entry {
    pub name: String,
    pub grammar: Arc<Grammar>,
}

impl Entry {
    pub fn start(&self) -> String {
        self.grammar.start().to_string()
    }
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub fn grammars_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("grammars")
}

/// The test corpus plus the shipped demo grammars, sorted by name.
pub fn corpus() -> Vec<Entry> {
    let mut out = Vec::new();
    for dir in [corpus_dir(), grammars_dir()] {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "codeco"))
            .collect();
        paths.sort();
        for p in paths {
            let text = std::fs::read_to_string(&p).unwrap();
            let g = load_grammar(&text).unwrap_or_else(|e| panic!("{}: {e:?}", p.display()));
            out.push(Entry { name: p.file_stem().unwrap().to_string_lossy().into_owned(), grammar: Arc::new(g) });
        }
    }
    out
}

/// Outcome of comparing parser lookahead with the oracle on one grammar.
pub struct LookaheadCheck {
    pub prefixes: usize,
    pub mismatches: Vec<String>,
}

/// Compares `next_tokens` with `continuations_naive` for every prefix of
/// every sentence of at most `bound` tokens. The parser's horizon is set so
/// that both sides consider sentences up to `bound` tokens.
pub fn check_lookahead(e: &Entry, bound: usize) -> LookaheadCheck {
    let start = e.start();
    let cfg = OracleConfig { max_tokens: bound, ..Default::default() };
    let sentences = enumerate_naive(&e.grammar, &start, &cfg).unwrap();
    let mut prefixes: BTreeSet<Vec<String>> = BTreeSet::new();
    for s in sentences.keys() {
        for i in 0..=s.len() {
            prefixes.insert(s[..i].to_vec());
        }
    }
    prefixes.insert(Vec::new());
    let mut mismatches = Vec::new();
    let mut count = 0;
    for p in prefixes.iter().filter(|p| p.len() < bound) {
        count += 1;
        let mut st = ParseState::new(Arc::clone(&e.grammar), &start).unwrap();
        for t in p {
            st = match st.feed_token(t) {
                Ok(s) => s,
                Err(r) => {
                    mismatches.push(format!("{}: prefix {:?} rejected at {:?}", e.name, p, r.token));
                    break;
                }
            };
        }
        if st.tokens().len() != p.len() {
            continue;
        }
        st.set_config(LookaheadConfig { horizon: bound - p.len() - 1, ..st.config() });
        let got: BTreeSet<String> = st.next_tokens().into_iter().map(|o| o.token).collect();
        let want = continuations_naive(&e.grammar, &start, p, &cfg).unwrap();
        if got != want {
            mismatches.push(format!("{}: after {:?} parser {:?} oracle {:?}", e.name, p, got, want));
        }
    }
    LookaheadCheck { prefixes: count, mismatches }
}

pub struct CountCheck {
    pub sequences: u64,
    pub mismatches: Vec<String>,
}

/// Compares parser derivation counts with the oracle on token sequences of
/// at most `bound` tokens: all sequences over the lexicon when there are few
/// enough, otherwise the generated sentences and their one-token edits.
pub fn check_counts(e: &Entry, bound: usize, exhaustive_limit: u64) -> CountCheck {
    let start = e.start();
    let cfg = OracleConfig { max_tokens: bound, ..Default::default() };
    let oracle = enumerate_naive(&e.grammar, &start, &cfg).unwrap();
    let lexicon: Vec<String> = e.grammar.lexicon().iter().map(|t| t.to_string()).collect();
    let total: u64 = (0..=bound as u32).map(|k| (lexicon.len() as u64).saturating_pow(k)).sum();
    let mut check = CountCheck { sequences: 0, mismatches: Vec::new() };
    let fresh = ParseState::new(Arc::clone(&e.grammar), &start).unwrap();
    if total <= exhaustive_limit {
        let prefixes: BTreeSet<Vec<String>> =
            oracle.keys().flat_map(|s| (0..=s.len()).map(|i| s[..i].to_vec())).collect();
        exhaustive(e, &fresh, &lexicon, bound, &oracle, &prefixes, &mut Vec::new(), &mut check);
    } else {
        let mut seqs: BTreeSet<Vec<String>> = oracle.keys().filter(|s| s.len() <= bound).cloned().collect();
        for s in oracle.keys() {
            for i in 0..s.len() {
                for t in &lexicon {
                    let mut m = s.clone();
                    m[i] = t.clone();
                    seqs.insert(m.clone());
                    m.remove(i);
                    seqs.insert(m);
                }
            }
        }
        for s in seqs.iter().filter(|s| s.len() <= bound) {
            let st = s.iter().fold(fresh.clone(), |st, t| st.feed_unchecked(t));
            compare(e, s, st.derivation_count(), &oracle, &mut check);
        }
    }
    check
}

fn compare(e: &Entry, seq: &[String], got: u128, oracle: &BTreeMap<Vec<String>, u64>, check: &mut CountCheck) {
    check.sequences += 1;
    let want = oracle.get(seq).copied().unwrap_or(0) as u128;
    if got != want {
        check.mismatches.push(format!("{}: {:?} parser {} oracle {}", e.name, seq, got, want));
    }
}

#[allow(clippy::too_many_arguments)]
fn exhaustive(
    e: &Entry,
    st: &ParseState,
    lexicon: &[String],
    bound: usize,
    oracle: &BTreeMap<Vec<String>, u64>,
    prefixes: &BTreeSet<Vec<String>>,
    seq: &mut Vec<String>,
    check: &mut CountCheck,
) {
    compare(e, seq, st.derivation_count(), oracle, check);
    if seq.len() == bound {
        return;
    }
    for t in lexicon {
        seq.push(t.clone());
        let next = st.feed_unchecked(t);
        if next.is_alive() {
            exhaustive(e, &next, lexicon, bound, oracle, prefixes, seq, check);
        } else {
            // A dead chart derives nothing from here on; the oracle must agree.
            check.sequences += 1;
            if prefixes.contains(seq.as_slice()) {
                check.mismatches.push(format!("{}: parser died on {:?} but the oracle derives it", e.name, seq));
            }
        }
        seq.pop();
    }
}

// Random grammars for the notation round trip.

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z][a-z0-9_]{0,4}",
        Just("+".to_string()),
        Just("-".to_string()),
        Just("it's".to_string()),
        Just("two words".to_string()),
        Just("back\\slash".to_string()),
        Just("émigré".to_string()),
    ]
}

fn features(vars: usize) -> impl Strategy<Value = Vec<(String, Result<String, u32>)>> {
    let value = if vars == 0 {
        atom().prop_map(Ok).boxed()
    } else {
        prop_oneof![atom().prop_map(Ok), (0..vars as u32).prop_map(Err)].boxed()
    };
    proptest::collection::btree_map("[a-z]{1,3}", value, 0..3).prop_map(|m| m.into_iter().collect())
}

fn fs(entries: Vec<(String, Result<String, u32>)>) -> FeatureStructure {
    FeatureStructure::from_entries(entries.into_iter().map(|(n, v)| {
        let v = match v {
            Ok(a) => FeatureValue::atom(&a),
            Err(id) => FeatureValue::Var(VarId(id * 3 + 1)),
        };
        (n, v)
    }))
    .unwrap()
}

#[derive(Clone, Debug)]
enum Slot {
    Nt(usize),
    Pt(usize),
    Tok(String),
    Fwd,
    Bwd,
    Scope,
}

fn slot(nts: usize, pts: usize) -> impl Strategy<Value = Slot> {
    prop_oneof![
        3 => (0..nts).prop_map(Slot::Nt),
        2 => (0..pts).prop_map(Slot::Pt),
        2 => prop_oneof!["[a-z]{1,5}", Just("don't".to_string()), Just("x y".to_string())].prop_map(Slot::Tok),
        1 => Just(Slot::Fwd),
        1 => Just(Slot::Bwd),
        1 => Just(Slot::Scope),
    ]
}

/// Valid grammars with 1 to 4 nonterminals and 1 to 3 preterminals.
pub fn random_grammar() -> impl Strategy<Value = Grammar> {
    (1usize..5, 1usize..4).prop_flat_map(|(nts, pts)| {
        let rule = (
            0..nts,
            proptest::collection::vec((slot(nts, pts), features(3)), 0..5),
            features(3),
            any::<bool>(),
        );
        let lex = (0..pts, features(0), "[a-z]{1,6}");
        (
            proptest::collection::vec(rule, nts..nts + 4),
            proptest::collection::vec(lex, pts..pts + 4),
            Just(nts),
            Just(pts),
        )
            .prop_map(|(rules, lex, nts, pts)| build(rules, lex, nts, pts))
    })
}

type RawFeatures = Vec<(String, Result<String, u32>)>;
type RawRule = (usize, Vec<(Slot, RawFeatures)>, RawFeatures, bool);
type RawLex = (usize, RawFeatures, String);

fn build(mut rules: Vec<RawRule>, mut lex: Vec<RawLex>, nts: usize, pts: usize) -> Grammar {
    // Every name gets at least one rule; nonterminals get a non-lexical one.
    for (i, r) in rules.iter_mut().enumerate().take(nts) {
        r.0 = i;
        if matches!(r.1.as_slice(), [(Slot::Tok(_), _)]) {
            r.1.push((Slot::Scope, Vec::new()));
        }
    }
    for (i, l) in lex.iter_mut().enumerate().take(pts) {
        l.0 = i;
    }
    let nt = |i: usize| format!("n{i}");
    let pt = |i: usize| format!("p{i}");
    let mut syntactic = Vec::new();
    for (head, body, head_fs, closing) in rules {
        let body: Vec<Category> = body
            .into_iter()
            .map(|(s, f)| match s {
                Slot::Nt(i) => Category::nonterminal(&nt(i), fs(f)),
                Slot::Pt(i) => Category::preterminal(&pt(i), fs(f)),
                Slot::Tok(t) => Category::terminal(&t),
                Slot::Fwd => Category::FwdRef(fs(f)),
                Slot::Bwd => Category::BwdRef(fs(f)),
                Slot::Scope => Category::ScopeOpener,
            })
            .collect();
        let body = if matches!(body.as_slice(), [Category::Terminal(_)]) {
            vec![body[0].clone(), Category::ScopeOpener]
        } else {
            body
        };
        let mut r = Rule::new(Category::nonterminal(&nt(head), fs(head_fs)), body, closing);
        let vars: BTreeSet<VarId> = r.categories().flat_map(|c| c.vars().collect::<Vec<_>>()).collect();
        for v in vars {
            r.var_names.insert(v, Symbol::from(format!("V{}", v.0).as_str()));
        }
        syntactic.push(r);
    }
    let lexical = lex
        .into_iter()
        .map(|(head, f, tok)| Rule::new(Category::preterminal(&pt(head), fs(f)), vec![Category::terminal(&tok)], false))
        .collect();
    Grammar::new(&nt(0), syntactic, lexical)
}
