//! Unification over flat feature structures.
//!
//! Bindings form chains (`$A -> $B -> sg`). Binding always happens between
//! chain ends, so chains never loop. The public operations take the
//! environment by reference and return a new one; a failed attempt leaves the
//! caller's environment untouched.

use std::collections::{BTreeMap, HashMap};

use crate::feature::{FeatureStructure, FeatureValue, VarId};
use crate::grammar::{Category, Rule};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BindingEnv {
    bindings: BTreeMap<VarId, FeatureValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UnifyError {
    #[error("feature `{feature}` clashes: {left} vs {right}")]
    AtomClash { feature: String, left: String, right: String },
    #[error("cannot unify a {left:?} with a {right:?}")]
    KindMismatch { left: crate::grammar::CategoryKind, right: crate::grammar::CategoryKind },
    #[error("category names differ: {left} vs {right}")]
    NameMismatch { left: String, right: String },
    #[error("terminals differ: {left} vs {right}")]
    TokenMismatch { left: String, right: String },
}

impl BindingEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Direct binding of `v`, without following chains.
    pub fn get(&self, v: VarId) -> Option<&FeatureValue> {
        self.bindings.get(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &FeatureValue)> {
        self.bindings.iter().map(|(k, v)| (*k, v))
    }

    /// Follows the binding chain of `value` to its end: an atom or an unbound variable.
    pub fn walk(&self, value: &FeatureValue) -> FeatureValue {
        let mut cur = value;
        while let FeatureValue::Var(v) = cur {
            match self.bindings.get(v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur.clone()
    }

    /// In-place unification of two values. On failure the environment may
    /// hold partial bindings, so callers must work on a scratch copy.
    pub(crate) fn unify_values(&mut self, a: &FeatureValue, b: &FeatureValue) -> bool {
        let a = self.walk(a);
        let b = self.walk(b);
        match (a, b) {
            (FeatureValue::Atom(x), FeatureValue::Atom(y)) => x == y,
            (FeatureValue::Var(x), FeatureValue::Var(y)) => {
                if x != y {
                    // Point the larger id at the smaller one.
                    let (from, to) = if x > y { (x, y) } else { (y, x) };
                    self.bindings.insert(from, FeatureValue::Var(to));
                }
                true
            }
            (FeatureValue::Var(x), atom) | (atom, FeatureValue::Var(x)) => {
                self.bindings.insert(x, atom);
                true
            }
        }
    }

    pub(crate) fn unify_structures(
        &mut self,
        a: &FeatureStructure,
        b: &FeatureStructure,
    ) -> Result<(), UnifyError> {
        for (name, va) in a.iter() {
            if let Some(vb) = b.get(name) {
                if !self.unify_values(va, vb) {
                    return Err(UnifyError::AtomClash {
                        feature: name.to_string(),
                        left: self.walk(va).to_string(),
                        right: self.walk(vb).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub(crate) fn unify_categories_in(&mut self, a: &Category, b: &Category) -> Result<(), UnifyError> {
        use Category::*;
        match (a, b) {
            (Nonterminal { name: n1, features: f1 }, Nonterminal { name: n2, features: f2 })
            | (Preterminal { name: n1, features: f1 }, Preterminal { name: n2, features: f2 }) => {
                if n1 != n2 {
                    return Err(UnifyError::NameMismatch { left: n1.to_string(), right: n2.to_string() });
                }
                self.unify_structures(f1, f2)
            }
            (Terminal(t1), Terminal(t2)) => {
                if t1 == t2 {
                    Ok(())
                } else {
                    Err(UnifyError::TokenMismatch { left: t1.to_string(), right: t2.to_string() })
                }
            }
            (FwdRef(f1), BwdRef(f2)) | (BwdRef(f1), FwdRef(f2)) => self.unify_structures(f1, f2),
            (ScopeOpener, ScopeOpener) => Ok(()),
            _ => Err(UnifyError::KindMismatch { left: a.kind(), right: b.kind() }),
        }
    }

    pub fn resolve_value(&self, v: &FeatureValue) -> FeatureValue {
        self.walk(v)
    }
}

/// Unifies two feature structures under `env`. Features present on only one
/// side impose no constraint.
pub fn unify_features(
    a: &FeatureStructure,
    b: &FeatureStructure,
    env: &BindingEnv,
) -> Result<BindingEnv, UnifyError> {
    let mut out = env.clone();
    out.unify_structures(a, b)?;
    Ok(out)
}

/// Unifies two categories. Named categories need equal kind and name; a
/// forward reference unifies with a backward reference.
pub fn unify_categories(a: &Category, b: &Category, env: &BindingEnv) -> Result<BindingEnv, UnifyError> {
    let mut out = env.clone();
    out.unify_categories_in(a, b)?;
    Ok(out)
}

/// Replaces every bound variable by the end of its chain.
pub fn resolve(cat: &Category, env: &BindingEnv) -> Category {
    if env.is_empty() {
        return cat.clone();
    }
    cat.map_values(|v| env.walk(v))
}

pub fn resolve_features(fs: &FeatureStructure, env: &BindingEnv) -> FeatureStructure {
    fs.map_values(|v| env.walk(v))
}

/// Source of variable ids that have never been handed out before.
#[derive(Clone, Debug, Default)]
pub struct InstanceCounter {
    next: u32,
}

impl InstanceCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Counter whose ids all lie at or above `floor`.
    pub fn starting_at(floor: u32) -> Self {
        InstanceCounter { next: floor }
    }

    pub fn fresh(&mut self) -> VarId {
        let v = VarId(self.next);
        self.next += 1;
        v
    }
}

/// Copy of `rule` with every variable renamed to a fresh id. Shared variables
/// stay shared.
pub fn fresh_rule_instance(rule: &Rule, counter: &mut InstanceCounter) -> Rule {
    let mut map: HashMap<VarId, VarId> = HashMap::new();
    let mut rename = |v: &FeatureValue| match v {
        FeatureValue::Var(id) => FeatureValue::Var(*map.entry(*id).or_insert_with(|| counter.fresh())),
        a => a.clone(),
    };
    let head = rule.head.map_values(&mut rename);
    let body = rule.body.iter().map(|c| c.map_values(&mut rename)).collect();
    let var_names = rule
        .var_names
        .iter()
        .filter_map(|(old, name)| map.get(old).map(|new| (*new, name.clone())))
        .collect();
    Rule { head, body, scope_closing: rule.scope_closing, var_names }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::Symbol;
    use proptest::prelude::*;

    fn v(i: u32) -> FeatureValue {
        FeatureValue::Var(VarId(i))
    }

    fn a(s: &str) -> FeatureValue {
        FeatureValue::atom(s)
    }

    fn fs(entries: Vec<(&str, FeatureValue)>) -> FeatureStructure {
        FeatureStructure::from_entries(entries).unwrap()
    }

    #[test]
    fn equal_atoms_add_no_bindings() {
        let env = unify_features(
            &fs(vec![("num", a("sg"))]),
            &fs(vec![("num", a("sg")), ("case", a("acc"))]),
            &BindingEnv::new(),
        )
        .unwrap();
        assert!(env.is_empty());
    }

    #[test]
    fn atom_clash_fails() {
        let r = unify_features(&fs(vec![("num", a("sg"))]), &fs(vec![("num", a("pl"))]), &BindingEnv::new());
        assert!(matches!(r, Err(UnifyError::AtomClash { .. })));
    }

    #[test]
    fn variable_gets_bound() {
        let env = unify_features(
            &fs(vec![("noun", v(0))]),
            &fs(vec![("type", a("noun")), ("noun", a("house"))]),
            &BindingEnv::new(),
        )
        .unwrap();
        assert_eq!(env.walk(&v(0)), a("house"));
    }

    #[test]
    fn category_unification() {
        let noun_var = Category::preterminal("noun", fs(vec![("text", v(0))]));
        let noun_man = Category::preterminal("noun", fs(vec![("text", a("man"))]));
        let env = unify_categories(&noun_var, &noun_man, &BindingEnv::new()).unwrap();
        assert_eq!(resolve(&noun_var, &env), noun_man);

        let np = Category::nonterminal("np", fs(vec![("case", a("acc"))]));
        let vp = Category::nonterminal("vp", fs(vec![("case", a("acc"))]));
        assert!(matches!(
            unify_categories(&np, &vp, &BindingEnv::new()),
            Err(UnifyError::NameMismatch { .. })
        ));

        let bwd = Category::BwdRef(fs(vec![("type", a("noun")), ("noun", v(3))]));
        let fwd = Category::FwdRef(fs(vec![("type", a("noun")), ("noun", a("house"))]));
        let env = unify_categories(&bwd, &fwd, &BindingEnv::new()).unwrap();
        assert_eq!(env.walk(&v(3)), a("house"));

        let pre = Category::preterminal("np", FeatureStructure::new());
        let non = Category::nonterminal("np", FeatureStructure::new());
        assert!(unify_categories(&pre, &non, &BindingEnv::new()).is_err());
    }

    #[test]
    fn resolve_examples() {
        let noun = Category::preterminal("noun", fs(vec![("text", v(0))]));
        let mut env = BindingEnv::new();
        assert_eq!(resolve(&noun, &env), noun);
        assert!(env.unify_values(&v(0), &a("man")));
        assert_eq!(resolve(&noun, &env), Category::preterminal("noun", fs(vec![("text", a("man"))])));
        let det = Category::nonterminal("det", fs(vec![("exist", a("+"))]));
        assert_eq!(resolve(&det, &env), det);
    }

    #[test]
    fn failed_unification_leaves_input_usable() {
        let mut env = BindingEnv::new();
        assert!(env.unify_values(&v(0), &a("sg")));
        let before = env.clone();
        let r = unify_features(
            &fs(vec![("a", v(1)), ("num", v(0))]),
            &fs(vec![("a", a("x")), ("num", a("pl"))]),
            &env,
        );
        assert!(r.is_err());
        assert_eq!(env, before);
    }

    #[test]
    fn fresh_instances_are_disjoint_and_keep_sharing() {
        let rule = Rule::new(
            Category::nonterminal("vp", fs(vec![("num", v(0))])),
            vec![Category::nonterminal("v", fs(vec![("num", v(0))]))],
            false,
        );
        let mut counter = InstanceCounter::new();
        let r1 = fresh_rule_instance(&rule, &mut counter);
        let r2 = fresh_rule_instance(&rule, &mut counter);
        let ids = |r: &Rule| r.categories().flat_map(|c| c.vars().collect::<Vec<_>>()).collect::<Vec<_>>();
        let (i1, i2) = (ids(&r1), ids(&r2));
        assert_eq!(i1[0], i1[1]);
        assert_eq!(i2[0], i2[1]);
        assert_ne!(i1[0], i2[0]);
        assert_eq!(r1.canonical(), rule.canonical());

        let plain = Rule::new(
            Category::nonterminal("s", FeatureStructure::new()),
            vec![Category::terminal("a")],
            false,
        );
        assert_eq!(fresh_rule_instance(&plain, &mut counter), plain);
    }

    // Property tests over small random structures drawn from a tiny name,
    // atom and variable space so that clashes and sharing are frequent.

    fn arb_value() -> impl Strategy<Value = FeatureValue> {
        prop_oneof![
            prop::sample::select(vec!["sg", "pl", "x"]).prop_map(FeatureValue::atom),
            (0u32..5).prop_map(|i| FeatureValue::Var(VarId(i))),
        ]
    }

    fn arb_fs() -> impl Strategy<Value = FeatureStructure> {
        prop::collection::btree_map(prop::sample::select(vec!["a", "b", "c", "d"]), arb_value(), 0..4)
            .prop_map(|m| FeatureStructure::from_entries(m.into_iter().map(|(k, v)| (Symbol::from(k), v))).unwrap())
    }

    fn arb_env() -> impl Strategy<Value = BindingEnv> {
        prop::collection::vec((0u32..5, arb_value()), 0..4).prop_map(|pairs| {
            let mut env = BindingEnv::new();
            for (var, val) in pairs {
                let mut scratch = env.clone();
                if scratch.unify_values(&FeatureValue::Var(VarId(var)), &val) {
                    env = scratch;
                }
            }
            env
        })
    }

    fn terminates(env: &BindingEnv) -> bool {
        env.iter().all(|(k, _)| {
            let mut cur = FeatureValue::Var(k);
            for _ in 0..=env.len() {
                match &cur {
                    FeatureValue::Var(v) => match env.get(*v) {
                        Some(next) => cur = next.clone(),
                        None => return true,
                    },
                    FeatureValue::Atom(_) => return true,
                }
            }
            false
        })
    }

    proptest! {
        #[test]
        fn unification_is_symmetric(a in arb_fs(), b in arb_fs(), env in arb_env()) {
            let ab = unify_features(&a, &b, &env);
            let ba = unify_features(&b, &a, &env);
            prop_assert_eq!(ab.is_ok(), ba.is_ok());
            if let (Ok(e1), Ok(e2)) = (ab, ba) {
                for (name, va) in a.iter() {
                    if b.get(name).is_some() {
                        let r1 = e1.walk(va);
                        let r2 = e2.walk(va);
                        // Unbound results may end at different representatives.
                        if r1.as_atom().is_some() || r2.as_atom().is_some() {
                            prop_assert_eq!(r1, r2);
                        }
                    }
                }
            }
        }

        #[test]
        fn unification_is_idempotent(a in arb_fs(), env in arb_env()) {
            let out = unify_features(&a, &a, &env).unwrap();
            prop_assert_eq!(out, env);
        }

        #[test]
        fn unification_is_monotone_and_acyclic(a in arb_fs(), b in arb_fs(), env in arb_env()) {
            prop_assert!(terminates(&env));
            if let Ok(out) = unify_features(&a, &b, &env) {
                prop_assert!(terminates(&out));
                for (var, _) in env.iter() {
                    let before = env.walk(&FeatureValue::Var(var));
                    if before.as_atom().is_some() {
                        prop_assert_eq!(out.walk(&FeatureValue::Var(var)), before);
                    }
                    prop_assert!(out.get(var).is_some());
                }
                for (name, va) in a.iter() {
                    if let Some(vb) = b.get(name) {
                        prop_assert_eq!(out.walk(va), out.walk(vb));
                    }
                }
            }
        }

        #[test]
        fn resolve_is_a_fixpoint(a in arb_fs(), env in arb_env()) {
            let cat = Category::nonterminal("x", a);
            let once = resolve(&cat, &env);
            prop_assert_eq!(resolve(&once, &env), once);
        }
    }
}
