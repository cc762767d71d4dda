//! Syntax trees read off the chart's packed forest.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::access::Antecedent;
use super::chart::{ItemRef, ItemSet, Step};
use crate::feature::{FeatureStructure, FeatureValue};
use crate::grammar::{Category, Grammar, RuleId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyntaxTree {
    Node {
        label: Category,
        rule: RuleId,
        scope_closing: bool,
        start: usize,
        end: usize,
        /// Token intervals of the scopes this node closed.
        closed_scopes: Vec<(usize, usize)>,
        children: Vec<SyntaxTree>,
    },
    Token { text: String, position: usize },
    FwdRef { antecedent: Antecedent },
    BwdRef { features: FeatureStructure, antecedent: Antecedent, position: usize },
    ScopeOpener { position: usize },
}

impl SyntaxTree {
    /// Tokens at the leaves, left to right.
    pub fn leaves(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<String>) {
        match self {
            SyntaxTree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
            SyntaxTree::Token { text, .. } => out.push(text.clone()),
            _ => {}
        }
    }

    /// Every (reference position, antecedent position) link in the tree.
    pub fn reference_links(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let SyntaxTree::BwdRef { antecedent, position, .. } = t {
                out.push((*position, antecedent.position));
            }
        });
        out
    }

    /// Every closed scope interval in the tree.
    pub fn closed_scopes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let SyntaxTree::Node { closed_scopes, .. } = t {
                out.extend(closed_scopes.iter().copied());
            }
        });
        out
    }

    fn walk(&self, f: &mut dyn FnMut(&SyntaxTree)) {
        f(self);
        if let SyntaxTree::Node { children, .. } = self {
            children.iter().for_each(|c| c.walk(f));
        }
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0).expect("writing to a String cannot fail");
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match self {
            SyntaxTree::Node { label, scope_closing, start, end, closed_scopes, children, .. } => {
                write!(out, "{pad}{label} [{start}..{end}]")?;
                if *scope_closing {
                    out.push_str(" ~>");
                }
                for (a, b) in closed_scopes {
                    write!(out, " closes({a}..{b})")?;
                }
                out.push('\n');
                for c in children {
                    c.render_into(out, indent + 1)?;
                }
            }
            SyntaxTree::Token { text, position } => writeln!(out, "{pad}{text:?} @{position}")?,
            SyntaxTree::FwdRef { antecedent } => writeln!(out, "{pad}>({}) @{}", antecedent.features, antecedent.position)?,
            SyntaxTree::BwdRef { features, antecedent, position } => {
                writeln!(out, "{pad}<({features}) @{position} -> @{}", antecedent.position)?
            }
            SyntaxTree::ScopeOpener { position } => writeln!(out, "{pad}// @{position}")?,
        }
        Ok(())
    }

    /// Structured form shared by the CLI and the HTTP service.
    pub fn to_json(&self) -> Value {
        match self {
            SyntaxTree::Node { label, rule, scope_closing, start, end, closed_scopes, children } => json!({
                "type": "node",
                "label": label.to_string(),
                "rule": rule.0,
                "scope_closing": scope_closing,
                "start": start,
                "end": end,
                "closed_scopes": closed_scopes.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
                "children": children.iter().map(SyntaxTree::to_json).collect::<Vec<_>>(),
            }),
            SyntaxTree::Token { text, position } => json!({"type": "token", "text": text, "position": position}),
            SyntaxTree::FwdRef { antecedent } => json!({
                "type": "fwd_ref",
                "position": antecedent.position,
                "features": features_json(&antecedent.features),
            }),
            SyntaxTree::BwdRef { features, antecedent, position } => json!({
                "type": "bwd_ref",
                "position": position,
                "features": features_json(features),
                "antecedent": antecedent_json(antecedent),
            }),
            SyntaxTree::ScopeOpener { position } => json!({"type": "scope_opener", "position": position}),
        }
    }
}

impl Serialize for SyntaxTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl fmt::Display for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Features as a JSON object. Unbound variables render as `$_N`.
pub fn features_json(fs: &FeatureStructure) -> Value {
    let mut m = Map::new();
    for (k, v) in fs.iter() {
        let s = match v {
            FeatureValue::Atom(a) => a.to_string(),
            FeatureValue::Var(id) => id.to_string(),
        };
        m.insert(k.to_string(), Value::String(s));
    }
    Value::Object(m)
}

pub fn antecedent_json(a: &Antecedent) -> Value {
    json!({"position": a.position, "features": features_json(&a.features)})
}

/// Walks the links of a finished chart.
pub(crate) struct Forest<'a> {
    pub grammar: &'a Grammar,
    pub sets: &'a [Arc<ItemSet>],
    pub limit: usize,
    counts: HashMap<ItemRef, u128>,
    /// Items currently being counted; a revisit means a cyclic derivation.
    active: Vec<ItemRef>,
}

impl<'a> Forest<'a> {
    pub fn new(grammar: &'a Grammar, sets: &'a [Arc<ItemSet>], limit: usize) -> Self {
        Forest { grammar, sets, limit, counts: HashMap::new(), active: Vec::new() }
    }

    fn item(&self, r: ItemRef) -> &super::chart::Item {
        self.sets[r.set as usize].get(r.idx)
    }

    /// Number of derivations of the item from its prediction. Cyclic
    /// derivations (possible only with unit or empty cycles) are not counted.
    pub fn count(&mut self, r: ItemRef) -> u128 {
        if let Some(&n) = self.counts.get(&r) {
            return n;
        }
        if self.active.contains(&r) {
            return 0;
        }
        let links = self.item(r).links.clone();
        if links.is_empty() {
            return 1;
        }
        self.active.push(r);
        let mut total: u128 = 0;
        for l in &links {
            let mut n = self.count(l.prev);
            if let Step::Child(c) = l.step {
                n = n.saturating_mul(self.count(c));
            }
            total = total.saturating_add(n);
        }
        self.active.pop();
        self.counts.insert(r, total);
        total
    }

    /// Up to `limit` alternative child sequences of the item.
    fn sequences(&mut self, r: ItemRef, depth: usize) -> Vec<Vec<SyntaxTree>> {
        let links = self.item(r).links.clone();
        if links.is_empty() {
            return vec![Vec::new()];
        }
        if depth > 4096 || self.active.contains(&r) {
            return Vec::new();
        }
        self.active.push(r);
        let mut out = Vec::new();
        'links: for l in &links {
            let prefixes = self.sequences(l.prev, depth + 1);
            if prefixes.is_empty() {
                continue;
            }
            let pos = l.prev.set as usize;
            let steps: Vec<SyntaxTree> = match &l.step {
                Step::Token(t) => vec![SyntaxTree::Token { text: t.to_string(), position: pos }],
                Step::Fwd(a) => vec![SyntaxTree::FwdRef { antecedent: a.clone() }],
                Step::Bwd { features, antecedent } => vec![SyntaxTree::BwdRef {
                    features: features.clone(),
                    antecedent: antecedent.clone(),
                    position: pos,
                }],
                Step::Scope(p) => vec![SyntaxTree::ScopeOpener { position: *p }],
                Step::Child(c) => self.trees(*c, depth + 1),
            };
            for p in &prefixes {
                for s in &steps {
                    if out.len() >= self.limit {
                        break 'links;
                    }
                    let mut v = p.clone();
                    v.push(s.clone());
                    out.push(v);
                }
            }
        }
        self.active.pop();
        out
    }

    /// Up to `limit` trees for a complete item.
    pub fn trees(&mut self, r: ItemRef, depth: usize) -> Vec<SyntaxTree> {
        let key = self.item(r).key.clone();
        let rule = self.grammar.rule(key.inst.rule);
        let closed_scopes = if rule.scope_closing {
            key.access
                .scopes_closed_from(key.init_access.len())
                .into_iter()
                .map(|p| (p, r.set as usize))
                .collect()
        } else {
            Vec::new()
        };
        self.sequences(r, depth)
            .into_iter()
            .map(|children| SyntaxTree::Node {
                label: key.inst.head.clone(),
                rule: key.inst.rule,
                scope_closing: rule.scope_closing,
                start: key.origin,
                end: r.set as usize,
                closed_scopes: closed_scopes.clone(),
                children,
            })
            .collect()
    }
}
