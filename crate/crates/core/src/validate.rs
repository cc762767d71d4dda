//! Structural checks on grammars.

use std::collections::HashSet;
use std::fmt;

use crate::grammar::{CategoryKind, Grammar, RuleId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    UnknownStart,
    SpecialHead,
    TerminalHead,
    PreterminalWithNonLexicalRule,
    LexicalRuleWithNonterminalHead,
    DuplicateFeature,
    UndefinedCategory,
    KindConflict,
}

/// One violated grammar invariant. `rule` is `None` for grammar-level problems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub rule: Option<RuleId>,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Some(r) => write!(f, "rule {}: {}", r.0, self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Returns one diagnostic per violation; empty means the grammar is usable.
pub fn validate_grammar(g: &Grammar) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |rule: Option<RuleId>, kind: DiagnosticKind, message: String| {
        out.push(Diagnostic { rule, kind, message })
    };

    if !g.defines(g.start()) {
        push(
            None,
            DiagnosticKind::UnknownStart,
            format!("start category `{}` heads no rule", g.start()),
        );
    }

    let lexical_start = g.rules().len();
    let preterminals: HashSet<&str> = g
        .lexical_rules()
        .iter()
        .filter_map(|r| r.head.name().map(|n| &**n))
        .collect();

    for (id, rule) in g.all_rules() {
        let is_lexical_slot = id.index() >= lexical_start;
        match rule.head.kind() {
            CategoryKind::FwdRef | CategoryKind::BwdRef | CategoryKind::ScopeOpener => push(
                Some(id),
                DiagnosticKind::SpecialHead,
                format!("special category `{}` cannot be a rule head", rule.head),
            ),
            CategoryKind::Terminal => push(
                Some(id),
                DiagnosticKind::TerminalHead,
                format!("terminal `{}` cannot be a rule head", rule.head),
            ),
            CategoryKind::Preterminal if !rule.is_lexical() || !is_lexical_slot => push(
                Some(id),
                DiagnosticKind::PreterminalWithNonLexicalRule,
                format!("preterminal `{}` has a non-lexical rule", rule.head),
            ),
            CategoryKind::Nonterminal if is_lexical_slot => push(
                Some(id),
                DiagnosticKind::LexicalRuleWithNonterminalHead,
                format!("lexical rule for `{}` needs a preterminal head", rule.head),
            ),
            _ => {}
        }
        if let Some(name) = rule.head.name() {
            let conflicting = rule.head.kind() == CategoryKind::Nonterminal && preterminals.contains(&**name);
            if conflicting {
                push(
                    Some(id),
                    DiagnosticKind::PreterminalWithNonLexicalRule,
                    format!("preterminal `{name}` has a non-lexical rule"),
                );
            }
        }

        for cat in rule.categories() {
            if let Some(dup) = cat.features().and_then(|f| f.first_duplicate()) {
                push(
                    Some(id),
                    DiagnosticKind::DuplicateFeature,
                    format!("feature `{dup}` duplicated in `{cat}`"),
                );
            }
        }
        for cat in &rule.body {
            if let Some(name) = cat.name() {
                match g.head_kind(name) {
                    None => push(
                        Some(id),
                        DiagnosticKind::UndefinedCategory,
                        format!("category `{name}` heads no rule"),
                    ),
                    Some(kind) if kind != cat.kind() => push(
                        Some(id),
                        DiagnosticKind::KindConflict,
                        format!("`{name}` is used as a {:?} but defined as a {kind:?}", cat.kind()),
                    ),
                    Some(_) => {}
                }
            }
        }
    }
    out
}
