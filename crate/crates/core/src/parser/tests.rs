use super::*;
use crate::demo;
use crate::feature::FeatureValue;
use crate::notation::load_grammar;

fn session(text: &str) -> ParseState {
    let g = Arc::new(load_grammar(text).unwrap());
    let start = g.start().to_string();
    ParseState::new(g, &start).unwrap()
}

fn tokens(st: &ParseState) -> Vec<String> {
    let mut t: Vec<String> = st.next_tokens().into_iter().map(|o| o.token).collect();
    t.dedup();
    t
}

fn feed(st: &ParseState, toks: &[&str]) -> ParseState {
    toks.iter().fold(st.clone(), |s, t| s.feed_token(t).unwrap_or_else(|e| panic!("{e}: {:?}", e.options)))
}

fn ante(noun: &str, position: usize) -> Antecedent {
    Antecedent {
        features: FeatureStructure::from_entries([("type", FeatureValue::atom("noun")), ("noun", FeatureValue::atom(noun))])
            .unwrap(),
        position,
        scope_depth: 0,
    }
}

#[test]
fn single_token_grammar() {
    let st = session("s => [a]");
    assert_eq!(tokens(&st), ["a"]);
    assert!(!st.is_complete());
    let st = st.feed_token("a").unwrap();
    assert!(st.is_complete());
    assert!(tokens(&st).is_empty());
}

#[test]
fn epsilon_language_is_complete_at_once() {
    let st = session("s => .");
    assert!(st.is_complete());
    assert_eq!(st.derivation_count(), 1);
}

#[test]
fn two_tokens_then_complete() {
    let st = feed(&session("s => [a] [b]"), &["a", "b"]);
    assert!(st.is_complete());
}

#[test]
fn rejection_leaves_state_usable() {
    let st = session("s => [a] [b]");
    let err = st.feed_token("b").unwrap_err();
    assert_eq!(err.token, "b");
    assert_eq!(err.options.len(), 1);
    assert_eq!(tokens(&st), ["a"]);
}

#[test]
fn unknown_start_is_an_error() {
    let g = Arc::new(load_grammar("s => [a]").unwrap());
    assert_eq!(ParseState::new(g, "t").unwrap_err(), SessionError::UnknownStart("t".into()));
}

#[test]
fn demo_session_offers_tokens() {
    let st = ParseState::new(Arc::new(demo::full()), "s").unwrap();
    assert_eq!(tokens(&st), ["a", "every"]);
    assert!(st.accessible_antecedents().is_empty());
}

#[test]
fn running_example() {
    let st = ParseState::new(Arc::new(demo::full()), "s").unwrap();
    let st = feed(&st, demo::EXAMPLE_PREFIX);
    assert!(tokens(&st).contains(&"the".to_string()));
    let nouns: Vec<String> = st.accessible_antecedents().iter().map(|a| a.features.get("noun").unwrap().to_string()).collect();
    assert_eq!(nouns, ["man", "house"]);
    let st = st.feed_token("the").unwrap();
    assert_eq!(tokens(&st), ["house", "man"]);
    assert!(st.feed_token("enemy").is_err());
    let st = st.feed_token("house").unwrap();
    assert!(st.is_complete());
    let trees = st.extract_trees();
    assert_eq!(trees.len(), 1);
    let t = &trees[0];
    assert_eq!(t.leaves(), st.tokens());
    assert_eq!(t.reference_links(), vec![(14, 5)]);
    assert!(t.closed_scopes().contains(&(6, 8)));
}

#[test]
fn one_antecedent_after_every_man() {
    let st = ParseState::new(Arc::new(demo::full()), "s").unwrap();
    let st = feed(&st, &["every", "man"]);
    let a = st.accessible_antecedents();
    assert_eq!(a.len(), 1);
    assert_eq!(a[0].features.get("noun"), Some(&FeatureValue::atom("man")));
    assert_eq!(a[0].scope_depth, 1);
}

#[test]
fn backward_reference_picks_most_recent() {
    let access = AccessibilityList::new().with_antecedent(ante("man", 1)).with_antecedent(ante("house", 4));
    let r = |noun: FeatureValue| {
        Category::BwdRef(FeatureStructure::from_entries([("type", FeatureValue::atom("noun")), ("noun", noun)]).unwrap())
    };
    let var = FeatureValue::Var(crate::VarId(0));
    let (a, env) = resolve_backward_ref(&r(var.clone()), &access, &BindingEnv::new()).unwrap();
    assert_eq!(a.position, 4);
    assert_eq!(env.walk(&var), FeatureValue::atom("house"));
    let (a, _) = resolve_backward_ref(&r(FeatureValue::atom("man")), &access, &BindingEnv::new()).unwrap();
    assert_eq!(a.position, 1);
    assert!(resolve_backward_ref(&r(var), &AccessibilityList::new(), &BindingEnv::new()).is_err());
}

#[test]
fn planted_ambiguity_has_two_trees() {
    let st = feed(&session("s => a\ns => b\na => [x]\nb => [x]"), &["x"]);
    assert_eq!(st.derivation_count(), 2);
    assert_eq!(st.extract_trees().len(), 2);
}

#[test]
fn left_recursion_and_epsilon() {
    let st = feed(&session("e => e [+] t\ne => t\nt => [y]\nt => o [x]\no => ."), &["x", "+", "x"]);
    assert!(st.is_complete());
    assert_eq!(st.derivation_count(), 1);
    assert_eq!(tokens(&st), ["+"]);
}

#[test]
fn nullable_children_complete_in_place() {
    let st = session("s => a a [x]\na => .\na => [y]");
    assert_eq!(tokens(&st), ["x", "y"]);
    let st = feed(&st, &["x"]);
    assert!(st.is_complete());
    assert_eq!(st.derivation_count(), 1);
}

#[test]
fn reference_without_antecedent_is_not_proposed() {
    let st = session("s => np v np\nnp => [a] n(n:$N) >(n:$N)\nnp => [the] n(n:$N) <(n:$N)\nn(n:x) => [x]\nn(n:y) => [y]\nv => [v]");
    assert_eq!(tokens(&st), ["a"]);
    let st = feed(&st, &["a", "x", "v", "the"]);
    assert_eq!(tokens(&st), ["x"]);
}

#[test]
fn tree_renders_and_serializes() {
    let st = feed(&session("s ~> // [a] >(k:v)\n"), &["a"]);
    let t = &st.extract_trees()[0];
    let text = t.render();
    assert!(text.starts_with("s [0..1] ~> closes(0..1)"), "{text}");
    let json = t.to_json();
    assert_eq!(json["children"][1]["text"], "a");
    assert_eq!(json["children"][2]["features"]["k"], "v");
}

#[test]
fn replay_is_deterministic() {
    let g = Arc::new(demo::full());
    let run = || {
        let mut st = ParseState::new(Arc::clone(&g), "s").unwrap();
        let mut seen = vec![st.next_tokens()];
        for t in demo::EXAMPLE_PREFIX {
            st = st.feed_token(t).unwrap();
            seen.push(st.next_tokens());
        }
        seen
    };
    assert_eq!(run(), run());
}
