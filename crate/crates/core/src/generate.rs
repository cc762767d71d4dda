//! Exhaustive generation up to a token bound, and the ambiguity and subset
//! checks built on it.
//!
//! Sentences are produced by iterative deepening on the exact token count,
//! with rules tried in grammar order, so the stream is the same on every run.
//! Backward references are resolved with the parser's rules; a branch whose
//! reference finds no antecedent is dropped.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::grammar::{Category, Grammar};
use crate::parser::{AccessibilityList, Inst, MinLengths, ParseState, SyntaxTree};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
const MAX_DEPTH: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("node budget of {0} expansions exceeded")]
    BudgetExceeded(u64),
    #[error("derivation nesting deeper than {0}")]
    DepthExceeded(usize),
    #[error("unknown start category `{0}`")]
    UnknownStart(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenerateConfig {
    pub max_tokens: usize,
    pub node_budget: u64,
    /// Build a syntax tree for every derivation.
    pub trees: bool,
}

impl GenerateConfig {
    pub fn new(max_tokens: usize) -> Self {
        GenerateConfig { max_tokens, node_budget: DEFAULT_NODE_BUDGET, trees: true }
    }
}

/// Receives each generated sentence and, if requested, its tree.
pub type Emit<'a> = dyn FnMut(&[String], Option<&SyntaxTree>) -> ControlFlow<()> + 'a;

/// Calls `emit` once per derivation with at most `cfg.max_tokens` tokens,
/// shorter sentences first. Without `cfg.trees` the tree argument is `None`.
/// Returns the number of derivations emitted.
pub fn generate(
    g: &Grammar,
    start: &str,
    cfg: &GenerateConfig,
    emit: &mut Emit<'_>,
) -> Result<u64, GenerateError> {
    let root = g.start_category(start).map(|c| crate::parser::canonical(&c)).ok_or_else(|| GenerateError::UnknownStart(start.to_string()))?;
    let minlen = MinLengths::new(g);
    let mut gen = Gen { g, minlen: &minlen, cfg, expansions: 0, target: 0, words: Vec::new(), emitted: 0, stop: false };
    for target in 0..=cfg.max_tokens {
        gen.target = target;
        let mut done = |s: &mut Gen, _: Arc<Inst>, _: AccessibilityList, tree: Option<SyntaxTree>| {
            if s.words.len() == s.target {
                s.emitted += 1;
                let words: Vec<String> = s.words.iter().map(|w| w.to_string()).collect();
                if emit(&words, tree.as_ref()).is_break() {
                    s.stop = true;
                }
            }
            Ok(())
        };
        gen.expand(&root, &AccessibilityList::new(), 0, 0, &mut done)?;
        if gen.stop {
            break;
        }
    }
    Ok(gen.emitted)
}

/// Every derivation with its sentence and tree, in stream order.
pub fn generate_all(g: &Grammar, start: &str, cfg: &GenerateConfig) -> Result<Vec<(Vec<String>, SyntaxTree)>, GenerateError> {
    let cfg = GenerateConfig { trees: true, ..*cfg };
    let mut out = Vec::new();
    generate(g, start, &cfg, &mut |w, t| {
        out.push((w.to_vec(), t.expect("trees requested").clone()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

type Cont<'c, 'g> = dyn FnMut(&mut Gen<'g>, Arc<Inst>, AccessibilityList, Option<SyntaxTree>) -> Result<(), GenerateError> + 'c;

struct Gen<'g> {
    g: &'g Grammar,
    minlen: &'g MinLengths,
    cfg: &'g GenerateConfig,
    expansions: u64,
    target: usize,
    words: Vec<crate::Symbol>,
    emitted: u64,
    stop: bool,
}

impl<'g> Gen<'g> {
    /// Derives `expected` (a canonical category) with every applicable rule;
    /// `pending` tokens at least must follow it.
    fn expand(
        &mut self,
        expected: &Category,
        access: &AccessibilityList,
        pending: usize,
        depth: usize,
        k: &mut Cont<'_, 'g>,
    ) -> Result<(), GenerateError> {
        if depth >= MAX_DEPTH {
            return Err(GenerateError::DepthExceeded(MAX_DEPTH));
        }
        let Some(name) = expected.name() else { return Ok(()) };
        let pos = self.words.len();
        for &rid in self.g.rules_for(name) {
            if self.stop {
                break;
            }
            let rule = self.g.rule(rid);
            if pos.saturating_add(self.minlen.of_rest(&rule.body)).saturating_add(pending) > self.target {
                continue;
            }
            self.expansions += 1;
            if self.expansions > self.cfg.node_budget {
                return Err(GenerateError::BudgetExceeded(self.cfg.node_budget));
            }
            let Some(child) = Inst::predict(rid, rule, expected) else { continue };
            let ch = self.cfg.trees.then(Vec::new);
            self.body(Arc::new(child), 0, access.clone(), access.len(), ch, pos, pending, depth, k)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn body(
        &mut self,
        inst: Arc<Inst>,
        dot: usize,
        access: AccessibilityList,
        init_len: usize,
        children: Option<Vec<SyntaxTree>>,
        start: usize,
        pending: usize,
        depth: usize,
        k: &mut Cont<'_, 'g>,
    ) -> Result<(), GenerateError> {
        if self.stop {
            return Ok(());
        }
        let Some(cat) = inst.body.get(dot).cloned() else {
            let rule = self.g.rule(inst.rule);
            let (access, closed) = if rule.scope_closing {
                let closed = access.scopes_closed_from(init_len);
                (access.close_scopes_from(init_len), closed)
            } else {
                (access, Vec::new())
            };
            let end = self.words.len();
            let tree = children.map(|children| SyntaxTree::Node {
                label: inst.head.clone(),
                rule: inst.rule,
                scope_closing: rule.scope_closing,
                start,
                end,
                closed_scopes: closed.into_iter().map(|p| (p, end)).collect(),
                children,
            });
            return k(self, inst, access, tree);
        };
        let pos = self.words.len();
        let with = |children: &Option<Vec<SyntaxTree>>, t: SyntaxTree| {
            children.as_ref().map(|c| {
                let mut c = c.clone();
                c.push(t);
                c
            })
        };
        match &cat {
            Category::Terminal(t) => {
                let rest = self.minlen.of_rest(&inst.body[dot + 1..]);
                if pos + 1 + rest + pending > self.target {
                    return Ok(());
                }
                let ch = with(&children, SyntaxTree::Token { text: t.to_string(), position: pos });
                self.words.push(t.clone());
                let r = self.body(inst, dot + 1, access, init_len, ch, start, pending, depth, k);
                self.words.pop();
                r
            }
            Category::Nonterminal { .. } | Category::Preterminal { .. } => {
                let expected = inst.expected(dot);
                let rest = self.minlen.of_rest(&inst.body[dot + 1..]).saturating_add(pending);
                let mut after_child = |s: &mut Gen<'g>, c: Arc<Inst>, acc: AccessibilityList, tree: Option<SyntaxTree>| {
                    let Some(parent) = inst.complete(dot, &c) else { return Ok(()) };
                    let ch = children.as_ref().zip(tree).map(|(ch, t)| {
                        let mut ch = ch.clone();
                        ch.push(t);
                        ch
                    });
                    s.body(parent, dot + 1, acc, init_len, ch, start, pending, depth, k)
                };
                self.expand(&expected, &access, rest, depth + 1, &mut after_child)
            }
            Category::FwdRef(_) => {
                let ante = inst.antecedent_at(dot, pos, &access);
                let ch = with(&children, SyntaxTree::FwdRef { antecedent: ante.clone() });
                self.body(inst, dot + 1, access.with_antecedent(ante), init_len, ch, start, pending, depth, k)
            }
            Category::BwdRef(_) => {
                let Some((inst, ante)) = inst.resolve_backward(dot, &access) else { return Ok(()) };
                let features = inst.body[dot].features().cloned().unwrap_or_default();
                let ch = with(&children, SyntaxTree::BwdRef { features, antecedent: ante, position: pos });
                self.body(inst, dot + 1, access, init_len, ch, start, pending, depth, k)
            }
            Category::ScopeOpener => {
                let ch = with(&children, SyntaxTree::ScopeOpener { position: pos });
                let access = access.with_scope(inst.rule, pos);
                self.body(inst, dot + 1, access, init_len, ch, start, pending, depth, k)
            }
        }
    }
}

/// Result of an ambiguity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub bound: usize,
    /// Distinct sentences.
    pub sentence_count: u64,
    pub derivation_count: u64,
    /// Sentences with two or more derivations, in stream order.
    pub duplicate_groups: Vec<(Vec<String>, u64)>,
    #[serde(serialize_with = "ser_ms")]
    pub elapsed: Duration,
}

impl GenerationReport {
    pub fn is_ambiguous(&self) -> bool {
        !self.duplicate_groups.is_empty()
    }
}

impl fmt::Display for GenerationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound: {}", self.bound)?;
        writeln!(f, "sentences: {}", self.sentence_count)?;
        writeln!(f, "derivations: {}", self.derivation_count)?;
        writeln!(f, "ambiguous: {}", self.duplicate_groups.len())?;
        for (s, n) in &self.duplicate_groups {
            writeln!(f, "{n}\t{}", s.join(" "))?;
        }
        Ok(())
    }
}

fn ser_ms<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

/// Generates every derivation within the bound and reports the sentences
/// generated more than once.
pub fn check_ambiguity(g: &Grammar, start: &str, max_tokens: usize, node_budget: u64) -> Result<GenerationReport, GenerateError> {
    let t0 = Instant::now();
    let cfg = GenerateConfig { max_tokens, node_budget, trees: false };
    let mut order: Vec<Vec<String>> = Vec::new();
    let mut counts: HashMap<Vec<String>, u64> = HashMap::new();
    let derivations = generate(g, start, &cfg, &mut |w, _| {
        let n = counts.entry(w.to_vec()).or_insert_with(|| {
            order.push(w.to_vec());
            0
        });
        *n += 1;
        ControlFlow::Continue(())
    })?;
    let duplicate_groups = order
        .iter()
        .filter_map(|s| {
            let n = counts[s];
            (n >= 2).then(|| (s.clone(), n))
        })
        .collect();
    Ok(GenerationReport {
        bound: max_tokens,
        sentence_count: order.len() as u64,
        derivation_count: derivations,
        duplicate_groups,
        elapsed: t0.elapsed(),
    })
}

/// Result of a subset check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetReport {
    pub bound: usize,
    /// Distinct sentences of the first grammar that were parsed with the second.
    pub checked_count: u64,
    /// Sentences of the first grammar the second one rejects, in stream order.
    pub counterexamples: Vec<Vec<String>>,
}

impl fmt::Display for SubsetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "bound: {}", self.bound)?;
        writeln!(f, "checked: {}", self.checked_count)?;
        writeln!(f, "counterexamples: {}", self.counterexamples.len())?;
        for s in &self.counterexamples {
            writeln!(f, "{}", s.join(" "))?;
        }
        Ok(())
    }
}

/// Checks that every sentence of `a` within the bound is a sentence of `b`.
pub fn check_subset(
    a: &Grammar,
    start_a: &str,
    b: Arc<Grammar>,
    start_b: &str,
    max_tokens: usize,
    node_budget: u64,
) -> Result<SubsetReport, GenerateError> {
    let fresh = ParseState::new(b, start_b).map_err(|_| GenerateError::UnknownStart(start_b.to_string()))?;
    let cfg = GenerateConfig { max_tokens, node_budget, trees: false };
    let mut seen: std::collections::HashSet<Vec<String>> = Default::default();
    let mut counterexamples = Vec::new();
    generate(a, start_a, &cfg, &mut |w, _| {
        if seen.insert(w.to_vec()) {
            let st = w.iter().fold(fresh.clone(), |st, t| st.feed_unchecked(t));
            if !st.is_complete() {
                counterexamples.push(w.to_vec());
            }
        }
        ControlFlow::Continue(())
    })?;
    Ok(SubsetReport { bound: max_tokens, checked_count: seen.len() as u64, counterexamples })
}
