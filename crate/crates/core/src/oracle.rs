//! Brute-force reference semantics, used to test the parser and generator.
//!
//! Everything here works directly on derivations: a sentence is built by
//! expanding categories left to right from the start category, with one
//! global binding environment per derivation and a plain list of antecedents
//! and scope marks that is updated as the yield grows. No code is shared with
//! the chart parser. It is slow on purpose.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::feature::{FeatureStructure, Symbol};
use crate::grammar::{Category, Grammar};
use crate::unify::{fresh_rule_instance, resolve_features, unify_categories, unify_features, BindingEnv, InstanceCounter};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Longest sentence considered.
    pub max_tokens: usize,
    /// Most rule expansions in one derivation.
    pub max_depth: usize,
    /// Most rule expansions in total.
    pub expansion_budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_tokens: 8, max_depth: 10_000, expansion_budget: 50_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("expansion budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("derivation deeper than {0} expansions")]
    DepthExceeded(usize),
    #[error("unknown start category `{0}`")]
    UnknownStart(String),
}

/// Sentences with the number of derivations of each.
pub type Multiset = BTreeMap<Vec<String>, u64>;

/// Every sentence of at most `cfg.max_tokens` tokens, with its number of derivations.
pub fn enumerate_naive(g: &Grammar, start: &str, cfg: &OracleConfig) -> Result<Multiset, OracleError> {
    let mut out = Multiset::new();
    Walker::new(g, cfg, &[])?.run(start, &mut |toks: &[Symbol]| {
        *out.entry(toks.iter().map(|t| t.to_string()).collect()).or_default() += 1;
        true
    })?;
    Ok(out)
}

/// Number of derivations of exactly `tokens`.
pub fn recognize_naive<S: AsRef<str>>(
    g: &Grammar,
    start: &str,
    tokens: &[S],
    cfg: &OracleConfig,
) -> Result<u64, OracleError> {
    let tokens: Vec<Symbol> = tokens.iter().map(|t| t.as_ref().into()).collect();
    let cfg = OracleConfig { max_tokens: tokens.len(), ..*cfg };
    let mut n = 0u64;
    Walker::new(g, &cfg, &tokens)?.run(start, &mut |toks: &[Symbol]| {
        if toks.len() == tokens.len() {
            n += 1;
        }
        true
    })?;
    Ok(n)
}

/// Tokens `t` such that some sentence of at most `cfg.max_tokens` tokens starts with `prefix` then `t`.
pub fn continuations_naive<S: AsRef<str>>(
    g: &Grammar,
    start: &str,
    prefix: &[S],
    cfg: &OracleConfig,
) -> Result<BTreeSet<String>, OracleError> {
    let prefix: Vec<Symbol> = prefix.iter().map(|t| t.as_ref().into()).collect();
    let mut w = Walker::new(g, cfg, &prefix)?;
    w.collect_next = true;
    let mut out = BTreeSet::new();
    w.run(start, &mut |toks: &[Symbol]| {
        if let Some(t) = toks.get(prefix.len()) {
            out.insert(t.to_string());
        }
        true
    })?;
    Ok(out)
}

#[derive(Clone, Debug)]
enum Elem {
    Antecedent(FeatureStructure),
    Scope,
}

#[derive(Clone, Debug)]
enum Task {
    Expand(Category),
    /// End of a rule instance; `from` is the list length when it started.
    Close { scope_closing: bool, from: usize },
}

#[derive(Clone)]
struct State {
    env: BindingEnv,
    counter: InstanceCounter,
    access: Vec<Elem>,
    tokens: Vec<Symbol>,
    /// Tasks still to do, last one first.
    agenda: Vec<Task>,
    /// Lower bound on the tokens the agenda still produces.
    pending: usize,
    depth: usize,
}

struct Walker<'a> {
    g: &'a Grammar,
    cfg: &'a OracleConfig,
    /// Sentences must start with these tokens.
    prefix: &'a [Symbol],
    minlen: HashMap<Symbol, usize>,
    expansions: u64,
    /// Only the token after the prefix matters; stop after it has been seen.
    collect_next: bool,
    seen_next: BTreeSet<Symbol>,
}

fn min_lengths(g: &Grammar) -> HashMap<Symbol, usize> {
    let mut m: HashMap<Symbol, usize> = HashMap::new();
    let mut changed = true;
    while changed {
        changed = false;
        for (_, r) in g.all_rules() {
            let mut sum = Some(0usize);
            for c in &r.body {
                let l = match c {
                    Category::Terminal(_) => Some(1),
                    Category::Nonterminal { name, .. } | Category::Preterminal { name, .. } => m.get(name).copied(),
                    _ => Some(0),
                };
                sum = match (sum, l) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
            }
            if let (Some(s), Some(name)) = (sum, r.head.name()) {
                if m.get(name).is_none_or(|&old| s < old) {
                    m.insert(name.clone(), s);
                    changed = true;
                }
            }
        }
    }
    m
}

impl<'a> Walker<'a> {
    fn new(g: &'a Grammar, cfg: &'a OracleConfig, prefix: &'a [Symbol]) -> Result<Self, OracleError> {
        Ok(Walker {
            g,
            cfg,
            prefix,
            minlen: min_lengths(g),
            expansions: 0,
            collect_next: false,
            seen_next: BTreeSet::new(),
        })
    }

    fn minlen(&self, c: &Category) -> Option<usize> {
        match c {
            Category::Terminal(_) => Some(1),
            Category::Nonterminal { name, .. } | Category::Preterminal { name, .. } => self.minlen.get(name).copied(),
            _ => Some(0),
        }
    }

    fn run(&mut self, start: &str, emit: &mut dyn FnMut(&[Symbol]) -> bool) -> Result<(), OracleError> {
        let root = self.g.start_category(start).ok_or_else(|| OracleError::UnknownStart(start.to_string()))?;
        let Some(pending) = self.minlen(&root) else { return Ok(()) };
        let st = State {
            env: BindingEnv::new(),
            counter: InstanceCounter::new(),
            access: Vec::new(),
            tokens: Vec::new(),
            agenda: vec![Task::Expand(root)],
            pending,
            depth: 0,
        };
        self.walk(st, emit)
    }

    fn walk(&mut self, mut st: State, emit: &mut dyn FnMut(&[Symbol]) -> bool) -> Result<(), OracleError> {
        while let Some(task) = st.agenda.pop() {
            let cat = match task {
                Task::Close { scope_closing, from } => {
                    if scope_closing {
                        if let Some(i) = (from..st.access.len()).find(|&i| matches!(st.access[i], Elem::Scope)) {
                            st.access.truncate(i);
                        }
                    }
                    continue;
                }
                Task::Expand(cat) => cat,
            };
            match &cat {
                Category::Terminal(t) => {
                    st.pending -= 1;
                    let i = st.tokens.len();
                    if i < self.prefix.len() && self.prefix[i] != *t {
                        return Ok(());
                    }
                    if self.collect_next && i == self.prefix.len() && self.seen_next.contains(t) {
                        return Ok(());
                    }
                    st.tokens.push(t.clone());
                }
                Category::FwdRef(fs) => {
                    let features = resolve_features(fs, &st.env).atoms_only();
                    st.access.push(Elem::Antecedent(features));
                }
                Category::BwdRef(fs) => {
                    let found = st.access.iter().rev().find_map(|e| match e {
                        Elem::Antecedent(a) => unify_features(fs, a, &st.env).ok(),
                        Elem::Scope => None,
                    });
                    match found {
                        Some(env) => st.env = env,
                        None => return Ok(()),
                    }
                }
                Category::ScopeOpener => st.access.push(Elem::Scope),
                Category::Nonterminal { name, .. } | Category::Preterminal { name, .. } => {
                    let own = self.minlen(&cat).expect("only reachable categories are expanded");
                    if st.depth >= self.cfg.max_depth {
                        return Err(OracleError::DepthExceeded(self.cfg.max_depth));
                    }
                    for &rid in self.g.rules_for(name) {
                        self.expansions += 1;
                        if self.expansions > self.cfg.expansion_budget {
                            return Err(OracleError::BudgetExceeded(self.cfg.expansion_budget));
                        }
                        let mut next = st.clone();
                        let rule = fresh_rule_instance(self.g.rule(rid), &mut next.counter);
                        let Ok(env) = unify_categories(&rule.head, &cat, &next.env) else { continue };
                        let Some(body_min) =
                            rule.body.iter().try_fold(0usize, |acc, c| self.minlen(c).map(|l| acc + l))
                        else {
                            continue;
                        };
                        next.pending = next.pending - own + body_min;
                        if next.tokens.len() + next.pending > self.cfg.max_tokens {
                            continue;
                        }
                        next.env = env;
                        next.depth += 1;
                        next.agenda.push(Task::Close { scope_closing: rule.scope_closing, from: next.access.len() });
                        next.agenda.extend(rule.body.into_iter().rev().map(Task::Expand));
                        self.walk(next, emit)?;
                    }
                    return Ok(());
                }
            }
        }
        if st.tokens.len() < self.prefix.len() {
            return Ok(());
        }
        if self.collect_next {
            if let Some(t) = st.tokens.get(self.prefix.len()) {
                self.seen_next.insert(t.clone());
            }
        }
        emit(&st.tokens);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::load_grammar;

    fn g(text: &str) -> Grammar {
        load_grammar(text).unwrap()
    }

    #[test]
    fn small_language() {
        let m = enumerate_naive(&g("s => [a]\ns => [a] [b]"), "s", &OracleConfig { max_tokens: 2, ..Default::default() })
            .unwrap();
        let expect: Multiset = [(vec!["a".to_string()], 1), (vec!["a".into(), "b".into()], 1)].into_iter().collect();
        assert_eq!(m, expect);
    }

    #[test]
    fn planted_ambiguity() {
        let g = g("s => a\ns => b\na => [x]\nb => [x]");
        let cfg = OracleConfig::default();
        assert_eq!(enumerate_naive(&g, "s", &cfg).unwrap().get(&vec!["x".to_string()]), Some(&2));
        assert_eq!(recognize_naive(&g, "s", &["x"], &cfg).unwrap(), 2);
        assert_eq!(recognize_naive(&g, "s", &["y"], &cfg).unwrap(), 0);
    }

    #[test]
    fn continuations() {
        let cfg = OracleConfig::default();
        let g1 = g("s => [a]");
        assert_eq!(continuations_naive(&g1, "s", &[] as &[&str], &cfg).unwrap(), BTreeSet::from(["a".to_string()]));
        assert!(continuations_naive(&g1, "s", &["b"], &cfg).unwrap().is_empty());
    }

    #[test]
    fn demo_example() {
        let full = crate::demo::full();
        let mut prefix: Vec<&str> = crate::demo::EXAMPLE_PREFIX.to_vec();
        prefix.push("the");
        let cfg = OracleConfig { max_tokens: 14, ..Default::default() };
        let next = continuations_naive(&full, "s", &prefix, &cfg).unwrap();
        assert_eq!(next, BTreeSet::from(["house".to_string(), "man".to_string()]));
        assert_eq!(recognize_naive(&full, "s", &["every", "man", "waits"], &cfg).unwrap(), 1);
    }

    #[test]
    fn left_recursion_terminates() {
        let g = g("e => e [+] t\ne => t\nt => [x]");
        let m = enumerate_naive(&g, "e", &OracleConfig { max_tokens: 5, ..Default::default() }).unwrap();
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn budget_is_enforced() {
        let g = g("s => a a a\na => [x]\na => [y]");
        let cfg = OracleConfig { max_tokens: 3, max_depth: 100, expansion_budget: 5 };
        assert_eq!(enumerate_naive(&g, "s", &cfg), Err(OracleError::BudgetExceeded(5)));
    }
}
