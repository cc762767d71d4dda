use std::fmt;
use std::sync::Arc;

use crate::feature::FeatureStructure;
use crate::grammar::RuleId;

/// A position that backward references may refer to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Antecedent {
    /// Atom-valued features of the forward reference at creation time.
    pub features: FeatureStructure,
    /// Number of tokens before the forward reference.
    pub position: usize,
    /// Scopes open when the antecedent was created.
    pub scope_depth: usize,
}

impl fmt::Display for Antecedent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{} >({})", self.position, self.features)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AccessElem {
    Antecedent(Antecedent),
    /// An open scope. `owner` is the rule whose body contains the scope opener.
    ScopeMark { owner: RuleId, position: usize },
}

/// Ordered record of antecedents and open scopes at a parse position.
///
/// Positions never decrease along the list. Closing scopes removes a suffix.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AccessibilityList(Arc<[AccessElem]>);

impl AccessibilityList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn elements(&self) -> &[AccessElem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn antecedents(&self) -> impl DoubleEndedIterator<Item = &Antecedent> {
        self.0.iter().filter_map(|e| match e {
            AccessElem::Antecedent(a) => Some(a),
            AccessElem::ScopeMark { .. } => None,
        })
    }

    pub fn open_scopes(&self) -> usize {
        self.0.iter().filter(|e| matches!(e, AccessElem::ScopeMark { .. })).count()
    }

    fn pushed(&self, e: AccessElem) -> Self {
        let mut v = self.0.to_vec();
        v.push(e);
        AccessibilityList(v.into())
    }

    pub fn with_antecedent(&self, a: Antecedent) -> Self {
        self.pushed(AccessElem::Antecedent(a))
    }

    pub fn with_scope(&self, owner: RuleId, position: usize) -> Self {
        self.pushed(AccessElem::ScopeMark { owner, position })
    }

    /// Index of the first scope mark at or after `from`, i.e. the first scope
    /// opened since the list had length `from`.
    pub fn first_scope_from(&self, from: usize) -> Option<usize> {
        (from..self.0.len()).find(|&i| matches!(self.0[i], AccessElem::ScopeMark { .. }))
    }

    /// Closes every scope opened since the list had length `from`: removes the
    /// first such scope mark and everything after it.
    pub fn close_scopes_from(&self, from: usize) -> Self {
        match self.first_scope_from(from) {
            Some(i) => AccessibilityList(self.0[..i].to_vec().into()),
            None => self.clone(),
        }
    }

    /// Positions of the scope marks that [`close_scopes_from`](Self::close_scopes_from) removes.
    pub fn scopes_closed_from(&self, from: usize) -> Vec<usize> {
        match self.first_scope_from(from) {
            Some(i) => self.0[i..]
                .iter()
                .filter_map(|e| match e {
                    AccessElem::ScopeMark { position, .. } => Some(*position),
                    _ => None,
                })
                .collect(),
            None => Vec::new(),
        }
    }
}

impl FromIterator<AccessElem> for AccessibilityList {
    fn from_iter<T: IntoIterator<Item = AccessElem>>(iter: T) -> Self {
        AccessibilityList(iter.into_iter().collect::<Vec<_>>().into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::FeatureValue;
    use proptest::prelude::*;

    fn ante(pos: usize) -> Antecedent {
        Antecedent {
            features: FeatureStructure::from_entries([("noun", FeatureValue::atom("x"))]).unwrap(),
            position: pos,
            scope_depth: 0,
        }
    }

    #[test]
    fn closing_keeps_antecedents_before_the_scope() {
        // every man protects a house from every enemy
        let l = AccessibilityList::new()
            .with_scope(RuleId(0), 0)
            .with_antecedent(ante(2));
        let start = l.len();
        let l = l.with_antecedent(ante(5)).with_scope(RuleId(0), 7).with_antecedent(ante(9));
        let closed = l.close_scopes_from(start);
        assert_eq!(closed.antecedents().map(|a| a.position).collect::<Vec<_>>(), vec![2, 5]);
        assert_eq!(l.scopes_closed_from(start), vec![7]);
        assert_eq!(closed.open_scopes(), 1);
    }

    proptest! {
        #[test]
        fn closing_removes_a_suffix(ops in prop::collection::vec(any::<bool>(), 0..12), from in 0usize..12) {
            let mut l = AccessibilityList::new();
            for (i, is_scope) in ops.iter().enumerate() {
                l = if *is_scope { l.with_scope(RuleId(0), i) } else { l.with_antecedent(ante(i)) };
            }
            let from = from.min(l.len());
            let closed = l.close_scopes_from(from);
            prop_assert!(closed.len() >= from);
            prop_assert_eq!(&l.elements()[..closed.len()], closed.elements());
            prop_assert_eq!(closed.first_scope_from(from), None);
        }
    }
}
