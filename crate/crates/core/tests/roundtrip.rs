mod common;

use codeco::notation::{parse_grammar, serialize_grammar};
use codeco::validate::validate_grammar;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn serialize_then_parse_is_identity(g in common::random_grammar()) {
        prop_assert!(validate_grammar(&g).is_empty(), "{:?}", validate_grammar(&g));
        let text = serialize_grammar(&g);
        let back = parse_grammar(&text).map_err(|e| TestCaseError::fail(format!("{e:?}\n{text}")))?;
        prop_assert!(back.eq_modulo_vars(&g), "{}", text);
        prop_assert_eq!(serialize_grammar(&back), text);
    }

    #[test]
    fn parsing_is_deterministic(g in common::random_grammar()) {
        let text = serialize_grammar(&g);
        prop_assert_eq!(parse_grammar(&text).unwrap(), parse_grammar(&text).unwrap());
    }

    #[test]
    fn diagnostics_lie_within_the_input(text in "[a-z$()\\[\\]<>/:,=~>. '#\n]{0,60}") {
        if let Err(diags) = parse_grammar(&text) {
            let lines: Vec<&str> = text.split('\n').collect();
            for d in diags {
                prop_assert!(d.span.line >= 1 && d.span.column >= 1);
                prop_assert!(!d.message.is_empty());
                let line = lines.get(d.span.line - 1).copied().unwrap_or("");
                prop_assert!(d.span.column + d.span.length <= line.chars().count() + 1 || line.is_empty(), "{d:?} in {text:?}");
            }
        }
    }
}
