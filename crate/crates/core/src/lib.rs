//! Codeco: a grammar notation for controlled natural languages, with an
//! incremental chart parser that computes exact next-token sets for
//! predictive editors.
//!
//! Grammars are written in the `.codeco` text format ([`notation`]). Besides
//! ordinary categories with flat feature structures, rules may contain
//! forward references `>(..)` (potential antecedents), backward references
//! `<(..)` (anaphors that must unify with an accessible antecedent), the scope
//! opener `//`, and scope-closing rules `~>` that make the antecedents
//! introduced after a scope opener inside them inaccessible afterwards.
//!
//! ```
//! use std::sync::Arc;
//! use codeco::{notation::load_grammar, parser::ParseState};
//!
//! let g = Arc::new(load_grammar("s => [hello] [world]").unwrap());
//! let st = ParseState::new(g, "s").unwrap();
//! let st = st.feed_token("hello").unwrap();
//! let next: Vec<_> = st.next_tokens().into_iter().map(|o| o.token.to_string()).collect();
//! assert_eq!(next, ["world"]);
//! ```

pub mod demo;
pub mod feature;
pub mod generate;
pub mod grammar;
pub mod notation;
pub mod oracle;
pub mod parser;
pub mod unify;
pub mod validate;

pub mod cli;
pub mod service;

pub use feature::{FeatureStructure, FeatureValue, Symbol, VarId};
pub use grammar::{Category, CategoryKind, Grammar, Rule, RuleId};
pub use unify::{BindingEnv, UnifyError};
