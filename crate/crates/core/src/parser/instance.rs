//! Rule instances with their bindings applied.
//!
//! An [`Inst`] stores a rule's head and body with every known binding already
//! substituted and its variables renumbered `0..nvars` by first occurrence.
//! Two instances in the same state are therefore `==`, which is what lets the
//! chart merge items without comparing environments.

use std::collections::HashMap;
use std::sync::Arc;

use super::access::{AccessibilityList, Antecedent};
use crate::feature::{FeatureStructure, FeatureValue, VarId};
use crate::grammar::{Category, Grammar, Rule, RuleId};
use crate::unify::BindingEnv;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Inst {
    pub rule: RuleId,
    pub head: Category,
    pub body: Arc<[Category]>,
    pub nvars: u32,
}

fn shift(cat: &Category, offset: u32) -> Category {
    if offset == 0 {
        return cat.clone();
    }
    cat.map_values(|v| match v {
        FeatureValue::Var(id) => FeatureValue::Var(VarId(id.0 + offset)),
        a => a.clone(),
    })
}

struct Renamer {
    map: HashMap<VarId, VarId>,
}

impl Renamer {
    fn new() -> Self {
        Renamer { map: HashMap::new() }
    }

    fn apply(&mut self, cat: &Category, env: &BindingEnv) -> Category {
        cat.map_values(|v| match env.walk(v) {
            FeatureValue::Var(id) => {
                let n = self.map.len() as u32;
                FeatureValue::Var(*self.map.entry(id).or_insert(VarId(n)))
            }
            a => a,
        })
    }
}

/// `cat` with its variables renumbered from zero.
pub(crate) fn canonical(cat: &Category) -> Category {
    Renamer::new().apply(cat, &BindingEnv::new())
}

fn var_count(cat: &Category) -> u32 {
    cat.vars().map(|v| v.0 + 1).max().unwrap_or(0)
}

impl Inst {
    fn build(rule: RuleId, head: &Category, body: &[Category], env: &BindingEnv) -> Inst {
        let mut r = Renamer::new();
        let head = r.apply(head, env);
        let body: Vec<Category> = body.iter().map(|c| r.apply(c, env)).collect();
        Inst { rule, head, body: body.into(), nvars: r.map.len() as u32 }
    }

    #[cfg(test)]
    pub fn from_rule(id: RuleId, rule: &Rule) -> Inst {
        Inst::build(id, &rule.head, &rule.body, &BindingEnv::new())
    }

    /// Instance of `rule` predicted for the canonical category `expected`, or
    /// `None` if the head does not unify with it.
    pub fn predict(id: RuleId, rule: &Rule, expected: &Category) -> Option<Inst> {
        let offset = var_count(expected);
        let head = shift(&rule.head, offset);
        let mut env = BindingEnv::new();
        env.unify_categories_in(&head, expected).ok()?;
        let body: Vec<Category> = rule.body.iter().map(|c| shift(c, offset)).collect();
        Some(Inst::build(id, &head, &body, &env))
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    /// The category after the dot, renumbered so that it can serve as a key.
    pub fn expected(&self, dot: usize) -> Category {
        canonical(&self.body[dot])
    }

    /// Advances over `body[dot]` using a completed child instance.
    pub fn complete(self: &Arc<Self>, dot: usize, child: &Inst) -> Option<Arc<Inst>> {
        let child_head = shift(&child.head, self.nvars);
        let mut env = BindingEnv::new();
        env.unify_categories_in(&self.body[dot], &child_head).ok()?;
        Some(self.rebind(&env))
    }

    fn rebind(self: &Arc<Self>, env: &BindingEnv) -> Arc<Inst> {
        if env.is_empty() {
            return Arc::clone(self);
        }
        Arc::new(Inst::build(self.rule, &self.head, &self.body, env))
    }

    /// The antecedent recorded when the dot passes the forward reference at `dot`.
    /// Features whose value is still a variable are not recorded.
    pub fn antecedent_at(&self, dot: usize, position: usize, access: &AccessibilityList) -> Antecedent {
        let features = self.body[dot].features().map(FeatureStructure::atoms_only).unwrap_or_default();
        Antecedent { features, position, scope_depth: access.open_scopes() }
    }

    /// Resolves the backward reference at `dot` against `access`: the most
    /// recent unifiable antecedent wins.
    pub fn resolve_backward(
        self: &Arc<Self>,
        dot: usize,
        access: &AccessibilityList,
    ) -> Option<(Arc<Inst>, Antecedent)> {
        let (ante, env) = super::resolve_backward_ref(&self.body[dot], access, &BindingEnv::new()).ok()?;
        Some((self.rebind(&env), ante))
    }
}

/// Minimal number of tokens each category name derives, ignoring features and
/// references. `usize::MAX` for names that derive nothing.
#[derive(Clone, Debug)]
pub(crate) struct MinLengths {
    by_name: HashMap<crate::feature::Symbol, usize>,
}

impl MinLengths {
    pub fn new(g: &Grammar) -> Self {
        let mut by_name: HashMap<crate::feature::Symbol, usize> = HashMap::new();
        loop {
            let mut changed = false;
            for (_, rule) in g.all_rules() {
                let Some(name) = rule.head.name() else { continue };
                let mut total = 0usize;
                for c in &rule.body {
                    let l = match c {
                        Category::Terminal(_) => 1,
                        Category::Nonterminal { name, .. } | Category::Preterminal { name, .. } => {
                            by_name.get(name).copied().unwrap_or(usize::MAX)
                        }
                        _ => 0,
                    };
                    total = total.saturating_add(l);
                }
                let cur = by_name.get(name).copied().unwrap_or(usize::MAX);
                if total < cur {
                    by_name.insert(name.clone(), total);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        MinLengths { by_name }
    }

    pub fn of(&self, cat: &Category) -> usize {
        match cat {
            Category::Terminal(_) => 1,
            Category::Nonterminal { name, .. } | Category::Preterminal { name, .. } => {
                self.by_name.get(name).copied().unwrap_or(usize::MAX)
            }
            _ => 0,
        }
    }

    pub fn of_rest(&self, body: &[Category]) -> usize {
        body.iter().fold(0usize, |acc, c| acc.saturating_add(self.of(c)))
    }
}
