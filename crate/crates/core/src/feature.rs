//! Flat feature structures: feature names mapped to atoms or variables.

use std::fmt;
use std::sync::Arc;

/// Interned-ish text used for names, atoms and tokens. Cheap to clone.
pub type Symbol = Arc<str>;

/// Identifier of a variable. Ids are local to a rule (or rule instance).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "$_{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureValue {
    Atom(Symbol),
    Var(VarId),
}

impl FeatureValue {
    pub fn atom(text: &str) -> Self {
        FeatureValue::Atom(Symbol::from(text))
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            FeatureValue::Atom(a) => Some(a),
            FeatureValue::Var(_) => None,
        }
    }

    pub fn as_var(&self) -> Option<VarId> {
        match self {
            FeatureValue::Var(v) => Some(*v),
            FeatureValue::Atom(_) => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Atom(a) => write_atom(f, a),
            FeatureValue::Var(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("feature `{0}` appears more than once")]
pub struct DuplicateFeature(pub Symbol);

/// A flat mapping from feature names to values.
///
/// Entries keep the order they were written in, which is what gets printed
/// back. Two structures with the same entries in a different order are not
/// `==`; the unifier does not care about order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureStructure {
    entries: Vec<(Symbol, FeatureValue)>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries<I, N>(entries: I) -> Result<Self, DuplicateFeature>
    where
        I: IntoIterator<Item = (N, FeatureValue)>,
        N: Into<Symbol>,
    {
        let fs = Self::from_entries_unchecked(entries);
        match fs.first_duplicate() {
            Some(name) => Err(DuplicateFeature(name.clone())),
            None => Ok(fs),
        }
    }

    /// Builds a structure without checking for duplicate names. Grammars built
    /// this way should go through the validator.
    pub fn from_entries_unchecked<I, N>(entries: I) -> Self
    where
        I: IntoIterator<Item = (N, FeatureValue)>,
        N: Into<Symbol>,
    {
        FeatureStructure {
            entries: entries.into_iter().map(|(n, v)| (n.into(), v)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&FeatureValue> {
        self.entries.iter().find(|(n, _)| &**n == name).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &FeatureValue)> {
        self.entries.iter().map(|(n, v)| (n, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_duplicate(&self) -> Option<&Symbol> {
        for (i, (name, _)) in self.entries.iter().enumerate() {
            if self.entries[..i].iter().any(|(n, _)| n == name) {
                return Some(name);
            }
        }
        None
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.entries.iter().filter_map(|(_, v)| v.as_var())
    }

    /// Applies `f` to every value, keeping names and order.
    pub fn map_values(&self, mut f: impl FnMut(&FeatureValue) -> FeatureValue) -> Self {
        FeatureStructure {
            entries: self.entries.iter().map(|(n, v)| (n.clone(), f(v))).collect(),
        }
    }

    /// Keeps only the atom-valued entries.
    pub fn atoms_only(&self) -> Self {
        FeatureStructure {
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| v.as_atom().is_some())
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}:{v}")?;
        }
        Ok(())
    }
}

/// True if `s` can be written without quotes as an atom or token.
pub fn is_bare_atom(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_atom_char)
}

pub(crate) fn is_atom_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '+' | '-')
}

/// True if `s` is a valid category, feature or variable name.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '-')
}

pub(crate) fn write_atom<W: fmt::Write + ?Sized>(f: &mut W, a: &str) -> fmt::Result {
    if is_bare_atom(a) {
        f.write_str(a)
    } else {
        write_quoted(f, a)
    }
}

pub(crate) fn write_quoted<W: fmt::Write + ?Sized>(f: &mut W, a: &str) -> fmt::Result {
    f.write_char('\'')?;
    for c in a.chars() {
        match c {
            '\'' => f.write_str("\\'")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('\'')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let err = FeatureStructure::from_entries([
            ("num", FeatureValue::atom("sg")),
            ("num", FeatureValue::atom("pl")),
        ])
        .unwrap_err();
        assert_eq!(&*err.0, "num");
    }

    #[test]
    fn atoms_are_case_sensitive() {
        assert_ne!(FeatureValue::atom("Sg"), FeatureValue::atom("sg"));
    }

    #[test]
    fn quoting() {
        let mut s = String::new();
        write_atom(&mut s, "+").unwrap();
        write_atom(&mut s, " it's").unwrap();
        assert_eq!(s, "+' it\\'s'");
        assert!(is_identifier("np"));
        assert!(is_identifier("rel-clause"));
        assert!(!is_identifier("-x"));
        assert!(!is_identifier(""));
    }
}
