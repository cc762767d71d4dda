//! The grammars shipped with the crate.
//!
//! `demo.codeco` covers the running example "every man protects a house from
//! every enemy and does not destroy the house". `demo-core.codeco` is the same
//! grammar without relative clauses; its rules are a subset of the full one.

use crate::grammar::Grammar;
use crate::notation::load_grammar;

pub const FULL_TEXT: &str = include_str!("../grammars/demo.codeco");
pub const CORE_TEXT: &str = include_str!("../grammars/demo-core.codeco");

/// Tokens of the running example up to the point where a definite reference
/// may follow.
pub const EXAMPLE_PREFIX: &[&str] =
    &["every", "man", "protects", "a", "house", "from", "every", "enemy", "and", "does", "not", "destroy"];

pub fn full() -> Grammar {
    load_grammar(FULL_TEXT).expect("demo grammar is valid")
}

pub fn core() -> Grammar {
    load_grammar(CORE_TEXT).expect("demo core grammar is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{parse_grammar, serialize_grammar};
    use crate::validate::validate_grammar;

    #[test]
    fn demo_grammars_validate() {
        assert!(validate_grammar(&full()).is_empty());
        assert!(validate_grammar(&core()).is_empty());
    }

    #[test]
    fn core_rules_are_a_subset() {
        let full = full();
        let full_rules: Vec<String> = full.all_rules().map(|(_, r)| r.to_string()).collect();
        for (_, r) in core().all_rules() {
            assert!(full_rules.contains(&r.to_string()), "{r}");
        }
    }

    #[test]
    fn serialization_is_a_fixpoint() {
        let once = serialize_grammar(&full());
        let twice = serialize_grammar(&parse_grammar(&once).unwrap());
        assert_eq!(once, twice);
    }
}
