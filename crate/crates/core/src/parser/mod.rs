//! Incremental chart parser with reference resolution and exact lookahead.
//!
//! A [`ParseState`] holds one item set per token position. Each item carries
//! the list of antecedents and open scopes that are accessible at its
//! position, so that backward references are resolved while parsing. The
//! state is immutable: [`ParseState::feed_token`] returns a new state that
//! shares all earlier item sets with the old one.

mod access;
mod chart;
mod instance;
mod tree;
mod viability;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use access::{AccessElem, AccessibilityList, Antecedent};
pub use tree::{antecedent_json, features_json, SyntaxTree};

use crate::feature::{FeatureStructure, Symbol};
use crate::grammar::{Category, Grammar};
use crate::unify::BindingEnv;
use chart::{is_lexical_item, scan, Closure, ItemRef, ItemSet};
pub(crate) use instance::{canonical, Inst, MinLengths};

/// No accessible antecedent unifies with a backward reference.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no accessible antecedent matches <({0})")]
pub struct NoAntecedent(pub FeatureStructure);

/// Resolves a backward reference against an accessibility list. The most
/// recent antecedent whose features unify with the reference wins; the
/// returned environment extends `env` with the bindings of that unification.
pub fn resolve_backward_ref(
    reference: &Category,
    access: &AccessibilityList,
    env: &BindingEnv,
) -> Result<(Antecedent, BindingEnv), NoAntecedent> {
    let features = reference.features().cloned().unwrap_or_default();
    for ante in access.antecedents().rev() {
        let mut e = env.clone();
        if e.unify_structures(&features, &ante.features).is_ok() {
            return Ok((ante.clone(), e));
        }
    }
    Err(NoAntecedent(features))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("unknown start category `{0}`")]
    UnknownStart(String),
}

/// A token the parser accepts next, with the category it would fill.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenOption {
    pub token: String,
    /// The preterminal the token fills, or the terminal itself when the token
    /// is written directly into a rule body.
    pub category: Category,
    pub features: FeatureStructure,
}

impl fmt::Display for TokenOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.token, self.category)
    }
}

/// A token that cannot continue the sentence.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("token `{token}` cannot continue the sentence")]
pub struct Rejection {
    pub token: String,
    /// What would have been accepted instead.
    pub options: Vec<TokenOption>,
}

/// Bounds for the lookahead search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LookaheadConfig {
    /// A token is proposed only if the sentence can be completed with at most
    /// this many further tokens after it.
    pub horizon: usize,
    /// Search steps per candidate; a candidate whose search runs out of steps
    /// is proposed.
    pub step_limit: usize,
}

impl Default for LookaheadConfig {
    fn default() -> Self {
        LookaheadConfig { horizon: 16, step_limit: 200_000 }
    }
}

/// Upper bound on the number of trees [`ParseState::extract_trees`] returns.
pub const MAX_TREES: usize = 1000;

#[derive(Clone)]
pub struct ParseState {
    grammar: Arc<Grammar>,
    minlen: Arc<MinLengths>,
    root: Arc<Category>,
    tokens: Vec<String>,
    sets: Vec<Arc<ItemSet>>,
    config: LookaheadConfig,
}

impl fmt::Debug for ParseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParseState")
            .field("root", &self.root.to_string())
            .field("tokens", &self.tokens)
            .field("items", &self.sets.iter().map(|s| s.items.len()).collect::<Vec<_>>())
            .finish()
    }
}

impl ParseState {
    pub fn new(grammar: Arc<Grammar>, start: &str) -> Result<ParseState, SessionError> {
        Self::with_config(grammar, start, LookaheadConfig::default())
    }

    pub fn with_config(grammar: Arc<Grammar>, start: &str, config: LookaheadConfig) -> Result<ParseState, SessionError> {
        let root = grammar.start_category(start).ok_or_else(|| SessionError::UnknownStart(start.to_string()))?;
        let root = Arc::new(canonical(&root));
        let minlen = Arc::new(MinLengths::new(&grammar));
        let mut set = ItemSet::default();
        let closure = Closure { grammar: &grammar, earlier: &[] };
        closure.seed(&mut set, &root, &AccessibilityList::new());
        closure.run(&mut set);
        Ok(ParseState { grammar, minlen, root, tokens: Vec::new(), sets: vec![Arc::new(set)], config })
    }

    /// Parses a whole token sequence without lookahead checks.
    pub fn parse<S: AsRef<str>>(grammar: Arc<Grammar>, start: &str, tokens: &[S]) -> Result<ParseState, SessionError> {
        let mut st = ParseState::new(grammar, start)?;
        for t in tokens {
            st = st.feed_unchecked(t.as_ref());
        }
        Ok(st)
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        &self.grammar
    }

    pub fn config(&self) -> LookaheadConfig {
        self.config
    }

    pub fn set_config(&mut self, config: LookaheadConfig) {
        self.config = config;
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    fn last(&self) -> &ItemSet {
        self.sets.last().expect("set 0 always exists")
    }

    /// False once no item survives; such a state accepts nothing.
    pub fn is_alive(&self) -> bool {
        !self.last().is_empty()
    }

    /// Candidate options of the last set with the items that produce them.
    fn candidates(&self) -> BTreeMap<TokenOption, Vec<u32>> {
        let last = self.last();
        let mut out: BTreeMap<TokenOption, Vec<u32>> = BTreeMap::new();
        for (t, idxs) in &last.by_terminal {
            for &i in idxs {
                let key = &last.get(i).key;
                let (category, features) = if is_lexical_item(&self.grammar, key) {
                    let head = key.inst.head.clone();
                    let fs = head.features().cloned().unwrap_or_default();
                    (head, fs)
                } else {
                    (Category::Terminal(t.clone()), FeatureStructure::new())
                };
                out.entry(TokenOption { token: t.to_string(), category, features }).or_default().push(i);
            }
        }
        out
    }

    fn advance(&self, token: &Symbol, which: &[u32]) -> ItemSet {
        let mut set = scan(self.last(), self.tokens.len(), token, which);
        Closure { grammar: &self.grammar, earlier: &self.sets }.run(&mut set);
        set
    }

    fn viable(&self, set: &ItemSet) -> bool {
        viability::Search::new(&self.grammar, &self.minlen, &self.sets, set, &self.root, self.config.step_limit)
            .viable(self.config.horizon)
    }

    /// Every token that can continue the sentence, sorted by token and category.
    pub fn next_tokens(&self) -> Vec<TokenOption> {
        self.candidates()
            .into_iter()
            .filter(|(opt, idxs)| {
                let token: Symbol = opt.token.as_str().into();
                self.viable(&self.advance(&token, idxs))
            })
            .map(|(opt, _)| opt)
            .collect()
    }

    /// Consumes a token if it is among [`next_tokens`](Self::next_tokens).
    pub fn feed_token(&self, token: &str) -> Result<ParseState, Rejection> {
        let candidates = self.candidates();
        let sym: Symbol = token.into();
        let accepted = candidates
            .iter()
            .filter(|(opt, _)| opt.token == token)
            .any(|(_, idxs)| self.viable(&self.advance(&sym, idxs)));
        if !accepted {
            return Err(Rejection { token: token.to_string(), options: self.next_tokens() });
        }
        Ok(self.feed_unchecked(token))
    }

    /// Consumes a token without the lookahead check. The result may be a
    /// state with no surviving items.
    pub fn feed_unchecked(&self, token: &str) -> ParseState {
        let sym: Symbol = token.into();
        let which = self.last().by_terminal.get(&sym).cloned().unwrap_or_default();
        let set = self.advance(&sym, &which);
        let mut next = self.clone();
        next.tokens.push(token.to_string());
        next.sets.push(Arc::new(set));
        next
    }

    fn root_items(&self) -> impl Iterator<Item = ItemRef> + '_ {
        let k = self.sets.len() - 1;
        self.last().items.iter().enumerate().filter_map(move |(i, it)| {
            let key = &it.key;
            (key.is_complete() && key.origin == 0 && key.pred == self.root && key.init_access.is_empty())
                .then_some(ItemRef { set: k as u32, idx: i as u32 })
        })
    }

    /// True if the tokens so far form a complete sentence.
    pub fn is_complete(&self) -> bool {
        self.root_items().next().is_some()
    }

    /// Antecedents accessible to the items of the current position, ordered
    /// by position and without duplicates.
    pub fn accessible_antecedents(&self) -> Vec<Antecedent> {
        let mut out: Vec<Antecedent> = Vec::new();
        for it in &self.last().items {
            let access = if it.key.is_complete() { it.key.final_access(&self.grammar) } else { it.key.access.clone() };
            for a in access.antecedents() {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out.sort_by(|a, b| (a.position, &a.features).cmp(&(b.position, &b.features)));
        out
    }

    /// Number of distinct derivations of the tokens so far as a complete sentence.
    pub fn derivation_count(&self) -> u128 {
        let mut forest = tree::Forest::new(&self.grammar, &self.sets, MAX_TREES);
        self.root_items().map(|r| forest.count(r)).fold(0, u128::saturating_add)
    }

    /// One tree per derivation, up to [`MAX_TREES`]. Empty if not complete.
    pub fn extract_trees(&self) -> Vec<SyntaxTree> {
        let mut forest = tree::Forest::new(&self.grammar, &self.sets, MAX_TREES);
        let mut out = Vec::new();
        for r in self.root_items().collect::<Vec<_>>() {
            for t in forest.trees(r, 0) {
                if out.len() < MAX_TREES {
                    out.push(t);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests;
