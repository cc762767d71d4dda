//! Bounded search for a way to finish the sentence from a chart state.
//!
//! Starting from the items of the newest set that wait for a terminal, the
//! search expands the rest of each rule top-down (like the generator) and,
//! when a rule instance finishes, climbs to the chart items that were waiting
//! for it. Backward references are resolved exactly as the parser does, so an
//! item whose every continuation runs into an unresolvable reference is found
//! to be dead.

use std::sync::Arc;

use super::access::AccessibilityList;
use super::chart::ItemSet;
use super::instance::{Inst, MinLengths};
use crate::grammar::{Category, Grammar};

const MAX_DEPTH: usize = 800;

#[derive(Clone)]
enum Parent {
    Local(Arc<Frame>),
    Chart { origin: usize, pred: Arc<Category>, init_access: AccessibilityList },
}

#[derive(Clone)]
struct Frame {
    inst: Arc<Inst>,
    dot: usize,
    access: AccessibilityList,
    init_len: usize,
    parent: Parent,
    /// Lower bound on the tokens the local ancestors still need.
    pending: usize,
}

pub(crate) struct Search<'a> {
    pub grammar: &'a Grammar,
    pub minlen: &'a MinLengths,
    /// Sets `0..=k`.
    pub sets: &'a [Arc<ItemSet>],
    /// Set `k + 1`, not yet part of the chart.
    pub last: &'a ItemSet,
    pub root: &'a Arc<Category>,
    pub step_limit: usize,
    steps: usize,
    base: usize,
    total: usize,
}

impl<'a> Search<'a> {
    pub fn new(
        grammar: &'a Grammar,
        minlen: &'a MinLengths,
        sets: &'a [Arc<ItemSet>],
        last: &'a ItemSet,
        root: &'a Arc<Category>,
        step_limit: usize,
    ) -> Self {
        Search { grammar, minlen, sets, last, root, step_limit, steps: 0, base: sets.len(), total: 0 }
    }

    fn set(&self, i: usize) -> &ItemSet {
        if i == self.sets.len() {
            self.last
        } else {
            &self.sets[i]
        }
    }

    /// True if some continuation of at most `horizon` further tokens completes
    /// the sentence. Running out of steps counts as success.
    pub fn viable(&mut self, horizon: usize) -> bool {
        let starts: Vec<Frame> = self
            .last
            .items
            .iter()
            .filter(|it| matches!(it.key.next(), Some(Category::Terminal(_))))
            .map(|it| Frame {
                inst: Arc::clone(&it.key.inst),
                dot: it.key.dot,
                access: it.key.access.clone(),
                init_len: it.key.init_access.len(),
                parent: Parent::Chart {
                    origin: it.key.origin,
                    pred: Arc::clone(&it.key.pred),
                    init_access: it.key.init_access.clone(),
                },
                pending: 0,
            })
            .collect();
        if self.last.items.iter().any(|it| self.is_root_completion(&it.key)) {
            return true;
        }
        for budget in 1..=horizon {
            self.total = budget;
            for f in &starts {
                if self.run(f, budget, 0) {
                    return true;
                }
            }
        }
        false
    }

    fn is_root_completion(&self, key: &super::chart::ItemKey) -> bool {
        key.is_complete() && key.origin == 0 && key.pred == *self.root && key.init_access.is_empty()
    }

    fn run(&mut self, f: &Frame, budget: usize, depth: usize) -> bool {
        self.steps += 1;
        if self.steps > self.step_limit {
            return true;
        }
        if depth > MAX_DEPTH {
            return false;
        }
        let need = self.minlen.of_rest(&f.inst.body[f.dot..]).saturating_add(f.pending);
        if need > budget {
            return false;
        }
        let advance = |inst: Arc<Inst>, access: AccessibilityList| Frame {
            inst,
            dot: f.dot + 1,
            access,
            init_len: f.init_len,
            parent: f.parent.clone(),
            pending: f.pending,
        };
        match f.inst.body.get(f.dot) {
            None => self.complete(f, budget, depth),
            Some(Category::Terminal(_)) => {
                let next = advance(Arc::clone(&f.inst), f.access.clone());
                self.run(&next, budget - 1, depth + 1)
            }
            Some(Category::Nonterminal { name, .. } | Category::Preterminal { name, .. }) => {
                let expected = f.inst.expected(f.dot);
                let pending = f.pending.saturating_add(self.minlen.of_rest(&f.inst.body[f.dot + 1..]));
                let me = Arc::new(f.clone());
                for &rid in self.grammar.rules_for(name) {
                    let Some(inst) = Inst::predict(rid, self.grammar.rule(rid), &expected) else { continue };
                    let child = Frame {
                        inst: Arc::new(inst),
                        dot: 0,
                        access: f.access.clone(),
                        init_len: f.access.len(),
                        parent: Parent::Local(Arc::clone(&me)),
                        pending,
                    };
                    if self.run(&child, budget, depth + 1) {
                        return true;
                    }
                }
                false
            }
            Some(Category::FwdRef(_)) => {
                let position = self.base + (self.total - budget);
                let ante = f.inst.antecedent_at(f.dot, position, &f.access);
                let next = advance(Arc::clone(&f.inst), f.access.with_antecedent(ante));
                self.run(&next, budget, depth + 1)
            }
            Some(Category::BwdRef(_)) => match f.inst.resolve_backward(f.dot, &f.access) {
                Some((inst, _)) => {
                    let next = advance(inst, f.access.clone());
                    self.run(&next, budget, depth + 1)
                }
                None => false,
            },
            Some(Category::ScopeOpener) => {
                let position = self.base + (self.total - budget);
                let next = advance(Arc::clone(&f.inst), f.access.with_scope(f.inst.rule, position));
                self.run(&next, budget, depth + 1)
            }
        }
    }

    fn complete(&mut self, f: &Frame, budget: usize, depth: usize) -> bool {
        let access = if self.grammar.rule(f.inst.rule).scope_closing {
            f.access.close_scopes_from(f.init_len)
        } else {
            f.access.clone()
        };
        match &f.parent {
            Parent::Local(p) => match p.inst.complete(p.dot, &f.inst) {
                Some(inst) => {
                    let next = Frame {
                        inst,
                        dot: p.dot + 1,
                        access,
                        init_len: p.init_len,
                        parent: p.parent.clone(),
                        pending: p.pending,
                    };
                    self.run(&next, budget, depth + 1)
                }
                None => false,
            },
            Parent::Chart { origin, pred, init_access } => {
                if *origin == 0 && pred == self.root && init_access.is_empty() {
                    return true;
                }
                let wk = (Arc::clone(pred), init_access.clone());
                let parents: Vec<u32> = self.set(*origin).waiting.get(&wk).cloned().unwrap_or_default();
                for p in parents {
                    let key = self.set(*origin).get(p).key.clone();
                    let Some(inst) = key.inst.complete(key.dot, &f.inst) else { continue };
                    let next = Frame {
                        inst,
                        dot: key.dot + 1,
                        access: access.clone(),
                        init_len: key.init_access.len(),
                        parent: Parent::Chart { origin: key.origin, pred: key.pred, init_access: key.init_access },
                        pending: 0,
                    };
                    if self.run(&next, budget, depth + 1) {
                        return true;
                    }
                }
                false
            }
        }
    }
}
