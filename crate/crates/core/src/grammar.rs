//! Categories, rules and grammars.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::feature::{is_bare_atom, write_atom, write_quoted, FeatureStructure, FeatureValue, Symbol, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CategoryKind {
    Nonterminal,
    Preterminal,
    Terminal,
    FwdRef,
    BwdRef,
    ScopeOpener,
}

impl CategoryKind {
    /// Forward references, backward references and scope openers cover no tokens.
    pub fn is_zero_width(self) -> bool {
        matches!(self, CategoryKind::FwdRef | CategoryKind::BwdRef | CategoryKind::ScopeOpener)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Nonterminal { name: Symbol, features: FeatureStructure },
    Preterminal { name: Symbol, features: FeatureStructure },
    Terminal(Symbol),
    FwdRef(FeatureStructure),
    BwdRef(FeatureStructure),
    ScopeOpener,
}

impl Category {
    pub fn nonterminal(name: &str, features: FeatureStructure) -> Self {
        Category::Nonterminal { name: name.into(), features }
    }

    pub fn preterminal(name: &str, features: FeatureStructure) -> Self {
        Category::Preterminal { name: name.into(), features }
    }

    pub fn terminal(token: &str) -> Self {
        Category::Terminal(token.into())
    }

    pub fn kind(&self) -> CategoryKind {
        match self {
            Category::Nonterminal { .. } => CategoryKind::Nonterminal,
            Category::Preterminal { .. } => CategoryKind::Preterminal,
            Category::Terminal(_) => CategoryKind::Terminal,
            Category::FwdRef(_) => CategoryKind::FwdRef,
            Category::BwdRef(_) => CategoryKind::BwdRef,
            Category::ScopeOpener => CategoryKind::ScopeOpener,
        }
    }

    /// Name of a nonterminal or preterminal.
    pub fn name(&self) -> Option<&Symbol> {
        match self {
            Category::Nonterminal { name, .. } | Category::Preterminal { name, .. } => Some(name),
            _ => None,
        }
    }

    pub fn token(&self) -> Option<&Symbol> {
        match self {
            Category::Terminal(t) => Some(t),
            _ => None,
        }
    }

    pub fn features(&self) -> Option<&FeatureStructure> {
        match self {
            Category::Nonterminal { features, .. }
            | Category::Preterminal { features, .. }
            | Category::FwdRef(features)
            | Category::BwdRef(features) => Some(features),
            Category::Terminal(_) | Category::ScopeOpener => None,
        }
    }

    pub(crate) fn features_mut(&mut self) -> Option<&mut FeatureStructure> {
        match self {
            Category::Nonterminal { features, .. }
            | Category::Preterminal { features, .. }
            | Category::FwdRef(features)
            | Category::BwdRef(features) => Some(features),
            Category::Terminal(_) | Category::ScopeOpener => None,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.features().into_iter().flat_map(|f| f.vars())
    }

    /// Same category with every feature value passed through `f`.
    pub fn map_values(&self, f: impl FnMut(&FeatureValue) -> FeatureValue) -> Self {
        let mut out = self.clone();
        if let Some(fs) = out.features_mut() {
            *fs = fs.map_values(f);
        }
        out
    }

    /// Writes the category, naming variables through `names`.
    pub fn write_with(
        &self,
        out: &mut impl fmt::Write,
        names: &dyn Fn(VarId) -> String,
    ) -> fmt::Result {
        let write_fs = |out: &mut dyn fmt::Write, fs: &FeatureStructure| -> fmt::Result {
            out.write_char('(')?;
            for (i, (n, v)) in fs.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write!(out, "{n}:")?;
                match v {
                    FeatureValue::Atom(a) => write_atom(&mut *out, a)?,
                    FeatureValue::Var(v) => write!(out, "${}", names(*v))?,
                }
            }
            out.write_char(')')
        };
        match self {
            Category::Nonterminal { name, features } | Category::Preterminal { name, features } => {
                out.write_str(name)?;
                if !features.is_empty() {
                    write_fs(out, features)?;
                }
                Ok(())
            }
            Category::Terminal(t) => {
                out.write_char('[')?;
                if is_bare_atom(t) {
                    out.write_str(t)?;
                } else {
                    write_quoted(out, t)?;
                }
                out.write_char(']')
            }
            Category::FwdRef(fs) => {
                out.write_char('>')?;
                write_fs(out, fs)
            }
            Category::BwdRef(fs) => {
                out.write_char('<')?;
                write_fs(out, fs)
            }
            Category::ScopeOpener => out.write_str("//"),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|v| format!("_{}", v.0))
    }
}

/// Index of a rule inside a [`Grammar`]: non-lexical rules first, then lexical rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u32);

impl RuleId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Category,
    pub body: Vec<Category>,
    pub scope_closing: bool,
    /// Source names of variables, used when printing. Optional per variable.
    pub var_names: BTreeMap<VarId, Symbol>,
}

impl Rule {
    pub fn new(head: Category, body: Vec<Category>, scope_closing: bool) -> Self {
        Rule { head, body, scope_closing, var_names: BTreeMap::new() }
    }

    pub fn categories(&self) -> impl Iterator<Item = &Category> {
        std::iter::once(&self.head).chain(self.body.iter())
    }

    /// A lexical rule rewrites its head to exactly one terminal.
    pub fn is_lexical(&self) -> bool {
        matches!(self.body.as_slice(), [Category::Terminal(_)])
    }

    pub fn var_name(&self, v: VarId) -> String {
        match self.var_names.get(&v) {
            Some(n) => n.to_string(),
            None => format!("_{}", v.0),
        }
    }

    /// Copy with variables renumbered by first occurrence and names dropped.
    /// Two rules are equal up to variable renaming iff their canonical forms are equal.
    pub fn canonical(&self) -> Rule {
        let mut map: HashMap<VarId, VarId> = HashMap::new();
        let mut rename = |v: &FeatureValue| match v {
            FeatureValue::Var(id) => {
                let n = map.len() as u32;
                FeatureValue::Var(*map.entry(*id).or_insert(VarId(n)))
            }
            a => a.clone(),
        };
        let head = self.head.map_values(&mut rename);
        let body = self.body.iter().map(|c| c.map_values(&mut rename)).collect();
        Rule::new(head, body, self.scope_closing)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: VarId| self.var_name(v);
        self.head.write_with(f, &names)?;
        f.write_str(if self.scope_closing { " ~> " } else { " => " })?;
        if self.body.is_empty() {
            return f.write_str(".");
        }
        for (i, c) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            c.write_with(f, &names)?;
        }
        Ok(())
    }
}

/// An immutable grammar: non-lexical rules, lexical rules and a start category name.
#[derive(Clone, Debug)]
pub struct Grammar {
    start: Symbol,
    rules: Vec<Rule>,
    lexical_rules: Vec<Rule>,
    by_head: HashMap<Symbol, Vec<RuleId>>,
}

impl Grammar {
    /// Builds a grammar without validating it; see [`crate::validate::validate_grammar`].
    pub fn new(start: &str, rules: Vec<Rule>, lexical_rules: Vec<Rule>) -> Self {
        let mut by_head: HashMap<Symbol, Vec<RuleId>> = HashMap::new();
        for (i, r) in rules.iter().chain(lexical_rules.iter()).enumerate() {
            if let Some(name) = r.head.name() {
                by_head.entry(name.clone()).or_default().push(RuleId(i as u32));
            }
        }
        Grammar { start: start.into(), rules, lexical_rules, by_head }
    }

    pub fn start(&self) -> &Symbol {
        &self.start
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn lexical_rules(&self) -> &[Rule] {
        &self.lexical_rules
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len() + self.lexical_rules.len()
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        let i = id.index();
        if i < self.rules.len() {
            &self.rules[i]
        } else {
            &self.lexical_rules[i - self.rules.len()]
        }
    }

    /// All rules in id order.
    pub fn all_rules(&self) -> impl Iterator<Item = (RuleId, &Rule)> {
        self.rules
            .iter()
            .chain(self.lexical_rules.iter())
            .enumerate()
            .map(|(i, r)| (RuleId(i as u32), r))
    }

    /// Rules whose head has the given name, in id order.
    pub fn rules_for(&self, name: &str) -> &[RuleId] {
        self.by_head.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn defines(&self, name: &str) -> bool {
        self.by_head.contains_key(name)
    }

    /// The kind (nonterminal or preterminal) that `name` has as a rule head.
    pub fn head_kind(&self, name: &str) -> Option<CategoryKind> {
        self.rules_for(name).first().map(|id| self.rule(*id).head.kind())
    }

    /// The category a session for `name` starts from: the name with no features.
    pub fn start_category(&self, name: &str) -> Option<Category> {
        match self.head_kind(name)? {
            CategoryKind::Preterminal => Some(Category::preterminal(name, FeatureStructure::new())),
            _ => Some(Category::nonterminal(name, FeatureStructure::new())),
        }
    }

    /// Every token that occurs in a terminal anywhere in the grammar, sorted.
    pub fn lexicon(&self) -> Vec<Symbol> {
        let mut tokens: Vec<Symbol> = self
            .all_rules()
            .flat_map(|(_, r)| r.body.iter().filter_map(|c| c.token().cloned()))
            .collect();
        tokens.sort();
        tokens.dedup();
        tokens
    }

    /// Equality up to variable renaming within each rule.
    pub fn eq_modulo_vars(&self, other: &Grammar) -> bool {
        let canon = |rs: &[Rule]| rs.iter().map(Rule::canonical).collect::<Vec<_>>();
        self.start == other.start
            && canon(&self.rules) == canon(&other.rules)
            && canon(&self.lexical_rules) == canon(&other.lexical_rules)
    }

    /// Copy of this grammar without the rule with the given id.
    pub fn without_rule(&self, id: RuleId) -> Grammar {
        let i = id.index();
        let mut rules = self.rules.clone();
        let mut lexical = self.lexical_rules.clone();
        if i < rules.len() {
            rules.remove(i);
        } else {
            lexical.remove(i - rules.len());
        }
        Grammar::new(&self.start, rules, lexical)
    }
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start
            && self.rules == other.rules
            && self.lexical_rules == other.lexical_rules
    }
}

impl Eq for Grammar {}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(entries: &[(&str, &str)]) -> FeatureStructure {
        FeatureStructure::from_entries(entries.iter().map(|(n, v)| {
            let v = match v.strip_prefix('$') {
                Some(id) => FeatureValue::Var(VarId(id.parse().unwrap())),
                None => FeatureValue::atom(v),
            };
            (*n, v)
        }))
        .unwrap()
    }

    #[test]
    fn canonical_ignores_var_ids() {
        let a = Rule::new(
            Category::nonterminal("vp", fs(&[("num", "$7")])),
            vec![Category::nonterminal("v", fs(&[("num", "$7")]))],
            true,
        );
        let b = Rule::new(
            Category::nonterminal("vp", fs(&[("num", "$2")])),
            vec![Category::nonterminal("v", fs(&[("num", "$2")]))],
            true,
        );
        assert_ne!(a, b);
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn rule_display() {
        let r = Rule::new(
            Category::nonterminal("det", fs(&[("exist", "-")])),
            vec![Category::ScopeOpener, Category::terminal("every")],
            false,
        );
        assert_eq!(r.to_string(), "det(exist:-) => // [every]");
        let e = Rule::new(Category::nonterminal("x", FeatureStructure::new()), vec![], false);
        assert_eq!(e.to_string(), "x => .");
    }

    #[test]
    fn rule_ids_span_both_lists() {
        let g = Grammar::new(
            "s",
            vec![Rule::new(
                Category::nonterminal("s", FeatureStructure::new()),
                vec![Category::preterminal("n", FeatureStructure::new())],
                false,
            )],
            vec![Rule::new(
                Category::preterminal("n", FeatureStructure::new()),
                vec![Category::terminal("x")],
                false,
            )],
        );
        assert_eq!(g.rules_for("n"), &[RuleId(1)]);
        assert!(g.rule(RuleId(1)).is_lexical());
        assert_eq!(g.lexicon(), vec![Symbol::from("x")]);
    }
}
