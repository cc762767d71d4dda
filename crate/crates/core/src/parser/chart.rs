//! Item sets and the closure that fills them.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::access::{AccessibilityList, Antecedent};
use super::instance::Inst;
use crate::feature::{FeatureStructure, Symbol};
use crate::grammar::{Category, CategoryKind, Grammar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct ItemRef {
    pub set: u32,
    pub idx: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    Token(Symbol),
    Child(ItemRef),
    Fwd(Antecedent),
    Bwd { features: FeatureStructure, antecedent: Antecedent },
    Scope(usize),
}

/// How an item was reached from its predecessor (the same rule one dot back).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Link {
    pub prev: ItemRef,
    pub step: Step,
}

/// Everything that determines an item's future.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ItemKey {
    pub inst: Arc<Inst>,
    pub dot: usize,
    pub origin: usize,
    pub access: AccessibilityList,
    /// Accessibility list when the item was predicted.
    pub init_access: AccessibilityList,
    /// Canonical category the item was predicted for.
    pub pred: Arc<Category>,
}

impl ItemKey {
    pub fn is_complete(&self) -> bool {
        self.dot == self.inst.len()
    }

    pub fn next(&self) -> Option<&Category> {
        self.inst.body.get(self.dot)
    }

    /// Accessibility list handed to the parent once this item is complete.
    pub fn final_access(&self, g: &Grammar) -> AccessibilityList {
        if g.rule(self.inst.rule).scope_closing {
            self.access.close_scopes_from(self.init_access.len())
        } else {
            self.access.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Item {
    pub key: ItemKey,
    /// Empty for predicted items (dot 0).
    pub links: Vec<Link>,
}

pub(crate) type WaitKey = (Arc<Category>, AccessibilityList);

#[derive(Clone, Debug, Default)]
pub(crate) struct ItemSet {
    pub items: Vec<Item>,
    index: HashMap<ItemKey, u32>,
    /// Items whose next category is a named category, by (expected, access).
    pub waiting: HashMap<WaitKey, Vec<u32>>,
    predicted: HashSet<WaitKey>,
    /// Complete items that started in this very set, by (pred, init_access).
    completed_here: HashMap<WaitKey, Vec<u32>>,
    /// Items whose next category is a terminal, by token.
    pub by_terminal: HashMap<Symbol, Vec<u32>>,
}

impl ItemSet {
    pub fn get(&self, idx: u32) -> &Item {
        &self.items[idx as usize]
    }

    fn add(&mut self, key: ItemKey, link: Option<Link>) {
        if let Some(&idx) = self.index.get(&key) {
            if let Some(link) = link {
                let links = &mut self.items[idx as usize].links;
                if !links.contains(&link) {
                    links.push(link);
                }
            }
            return;
        }
        let idx = self.items.len() as u32;
        self.index.insert(key.clone(), idx);
        self.items.push(Item { key, links: link.into_iter().collect() });
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

pub(crate) struct Closure<'a> {
    pub grammar: &'a Grammar,
    /// Sets before the one being built.
    pub earlier: &'a [Arc<ItemSet>],
}

impl Closure<'_> {
    fn position(&self) -> usize {
        self.earlier.len()
    }

    /// Seeds a set with predictions for `expected` under `access`, as if an
    /// invisible parent were waiting for it.
    pub fn seed(&self, set: &mut ItemSet, expected: &Arc<Category>, access: &AccessibilityList) {
        let key = (Arc::clone(expected), access.clone());
        if set.predicted.insert(key) {
            self.predict(set, expected, access);
        }
    }

    fn predict(&self, set: &mut ItemSet, expected: &Arc<Category>, access: &AccessibilityList) {
        let Some(name) = expected.name() else { return };
        for &rid in self.grammar.rules_for(name) {
            if let Some(inst) = Inst::predict(rid, self.grammar.rule(rid), expected) {
                let key = ItemKey {
                    inst: Arc::new(inst),
                    dot: 0,
                    origin: self.position(),
                    access: access.clone(),
                    init_access: access.clone(),
                    pred: Arc::clone(expected),
                };
                set.add(key, None);
            }
        }
    }

    /// Runs predict/complete/zero-width steps until no new items or links appear.
    pub fn run(&self, set: &mut ItemSet) {
        let k = self.position();
        let this = k as u32;
        let mut i = 0;
        while i < set.items.len() {
            let key = set.items[i].key.clone();
            let me = ItemRef { set: this, idx: i as u32 };
            match key.next() {
                None => self.complete(set, me, &key),
                Some(Category::Terminal(t)) => {
                    set.by_terminal.entry(t.clone()).or_default().push(i as u32);
                }
                Some(cat @ (Category::Nonterminal { .. } | Category::Preterminal { .. })) => {
                    let _ = cat;
                    let expected = Arc::new(key.inst.expected(key.dot));
                    let wk = (Arc::clone(&expected), key.access.clone());
                    set.waiting.entry(wk.clone()).or_default().push(i as u32);
                    if set.predicted.insert(wk.clone()) {
                        self.predict(set, &expected, &key.access);
                    }
                    let done: Vec<u32> = set.completed_here.get(&wk).cloned().unwrap_or_default();
                    for c in done {
                        let child = set.get(c).key.clone();
                        self.advance_with_child(set, me, &key, ItemRef { set: this, idx: c }, &child);
                    }
                }
                Some(Category::FwdRef(_)) => {
                    let ante = key.inst.antecedent_at(key.dot, k, &key.access);
                    let next = ItemKey {
                        dot: key.dot + 1,
                        access: key.access.with_antecedent(ante.clone()),
                        ..key.clone()
                    };
                    set.add(next, Some(Link { prev: me, step: Step::Fwd(ante) }));
                }
                Some(Category::BwdRef(_)) => {
                    if let Some((inst, ante)) = key.inst.resolve_backward(key.dot, &key.access) {
                        let features = inst.body[key.dot].features().cloned().unwrap_or_default();
                        let next = ItemKey { inst, dot: key.dot + 1, ..key.clone() };
                        set.add(next, Some(Link { prev: me, step: Step::Bwd { features, antecedent: ante } }));
                    }
                }
                Some(Category::ScopeOpener) => {
                    let next = ItemKey {
                        dot: key.dot + 1,
                        access: key.access.with_scope(key.inst.rule, k),
                        ..key.clone()
                    };
                    set.add(next, Some(Link { prev: me, step: Step::Scope(k) }));
                }
            }
            i += 1;
        }
    }

    fn complete(&self, set: &mut ItemSet, me: ItemRef, child: &ItemKey) {
        let wk = (Arc::clone(&child.pred), child.init_access.clone());
        let parents: Vec<u32> = if child.origin == self.position() {
            set.completed_here.entry(wk.clone()).or_default().push(me.idx);
            set.waiting.get(&wk).cloned().unwrap_or_default()
        } else {
            self.earlier[child.origin].waiting.get(&wk).cloned().unwrap_or_default()
        };
        for p in parents {
            let pref = ItemRef { set: child.origin as u32, idx: p };
            let parent = if child.origin == self.position() {
                set.get(p).key.clone()
            } else {
                self.earlier[child.origin].get(p).key.clone()
            };
            self.advance_with_child(set, pref, &parent, me, child);
        }
    }

    fn advance_with_child(&self, set: &mut ItemSet, pref: ItemRef, parent: &ItemKey, cref: ItemRef, child: &ItemKey) {
        if let Some(inst) = parent.inst.complete(parent.dot, &child.inst) {
            let next = ItemKey {
                inst,
                dot: parent.dot + 1,
                origin: parent.origin,
                access: child.final_access(self.grammar),
                init_access: parent.init_access.clone(),
                pred: Arc::clone(&parent.pred),
            };
            set.add(next, Some(Link { prev: pref, step: Step::Child(cref) }));
        }
    }
}

/// Advances the items of `prev` (at position `k`) listed in `which` over the token.
pub(crate) fn scan(prev: &ItemSet, k: usize, token: &Symbol, which: &[u32]) -> ItemSet {
    let mut set = ItemSet::default();
    for &i in which {
        let key = &prev.get(i).key;
        debug_assert_eq!(key.next().and_then(Category::token), Some(token));
        let next = ItemKey { dot: key.dot + 1, ..key.clone() };
        set.add(
            next,
            Some(Link { prev: ItemRef { set: k as u32, idx: i }, step: Step::Token(token.clone()) }),
        );
    }
    set
}

/// True for items that consume their next token as a lexical preterminal.
pub(crate) fn is_lexical_item(g: &Grammar, key: &ItemKey) -> bool {
    key.inst.head.kind() == CategoryKind::Preterminal && g.rule(key.inst.rule).is_lexical()
}
