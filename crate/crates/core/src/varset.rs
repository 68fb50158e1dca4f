//! Derivative-aware variable sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::VarRef;

/// `X ⊖ Y`: drop from `X` every variable of `Y` together with all of its
/// higher derivatives.
pub fn ominus(x: &BTreeSet<VarRef>, y: &BTreeSet<VarRef>) -> BTreeSet<VarRef> {
    let cut = removal_orders(y);
    x.iter()
        .filter(|v| cut.get(v.base.as_str()).is_none_or(|&d| v.order < d))
        .cloned()
        .collect()
}

fn removal_orders(y: &BTreeSet<VarRef>) -> BTreeMap<&str, u32> {
    let mut cut: BTreeMap<&str, u32> = BTreeMap::new();
    for v in y {
        cut.entry(v.base.as_str())
            .and_modify(|d| *d = (*d).min(v.order))
            .or_insert(v.order);
    }
    cut
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseInfo {
    /// Lowest value the highest derivative order of this base may take.
    pub floor: u32,
    /// Orders at or above this one are known (removed by `⊖`).
    pub removed_from: Option<u32>,
}

/// The unknowns of an equation system: which variable bases take part and
/// which of their derivative orders are treated as known.
///
/// Occurrences of bases outside the scope, or of removed orders, are known
/// quantities and contribute no edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scope {
    bases: BTreeMap<String, BaseInfo>,
}

impl Scope {
    pub fn new() -> Self {
        Scope::default()
    }

    /// Scope where every listed base is fully unknown.
    pub fn of_bases<I, S>(bases: I, floor: u32) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut s = Scope::new();
        for b in bases {
            s.add_base(b, floor);
        }
        s
    }

    pub fn add_base(&mut self, base: impl Into<String>, floor: u32) {
        self.bases
            .entry(base.into())
            .and_modify(|i| i.floor = i.floor.max(floor))
            .or_insert(BaseInfo {
                floor,
                removed_from: None,
            });
    }

    /// Mark `var` and all its higher derivatives as known.
    pub fn remove_from(&mut self, var: &VarRef) {
        let info = self.bases.entry(var.base.clone()).or_insert(BaseInfo {
            floor: var.order,
            removed_from: None,
        });
        info.floor = info.floor.max(var.order);
        info.removed_from = Some(info.removed_from.map_or(var.order, |d| d.min(var.order)));
    }

    pub fn contains_base(&self, base: &str) -> bool {
        self.bases.contains_key(base)
    }

    pub fn info(&self, base: &str) -> Option<&BaseInfo> {
        self.bases.get(base)
    }

    pub fn is_unknown(&self, var: &VarRef) -> bool {
        self.bases
            .get(&var.base)
            .is_some_and(|i| i.removed_from.is_none_or(|d| var.order < d))
    }

    /// No derivative order of the base is known.
    pub fn is_fully_unknown(&self, base: &str) -> bool {
        self.bases
            .get(base)
            .is_some_and(|i| i.removed_from.is_none())
    }

    pub fn bases(&self) -> impl Iterator<Item = (&String, &BaseInfo)> {
        self.bases.iter()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(items: &[(&str, u32)]) -> BTreeSet<VarRef> {
        items.iter().map(|(b, d)| VarRef::new(*b, *d)).collect()
    }

    #[test]
    fn removes_variable_and_derivatives() {
        let x = set(&[("V", 0), ("V", 2), ("P", 1)]);
        assert_eq!(ominus(&x, &set(&[("V", 0)])), set(&[("P", 1)]));
    }

    #[test]
    fn empty_y_is_identity() {
        let x = set(&[("V", 0), ("T", 3)]);
        assert_eq!(ominus(&x, &BTreeSet::new()), x);
    }

    #[test]
    fn only_higher_orders_are_purged() {
        let x = set(&[("T", 1), ("T", 3)]);
        assert_eq!(ominus(&x, &set(&[("T", 2)])), set(&[("T", 1)]));
    }

    #[test]
    fn scope_removal_is_order_aware() {
        let mut s = Scope::of_bases(["x", "y"], 1);
        s.remove_from(&VarRef::new("x", 1));
        assert!(s.is_unknown(&VarRef::new("x", 0)));
        assert!(!s.is_unknown(&VarRef::new("x", 1)));
        assert!(!s.is_unknown(&VarRef::new("x", 4)));
        assert!(s.is_unknown(&VarRef::new("y", 7)));
        assert!(!s.is_unknown(&VarRef::new("z", 0)));
        assert!(!s.is_fully_unknown("x"));
    }

    fn arb_set() -> impl Strategy<Value = BTreeSet<VarRef>> {
        prop::collection::btree_set(
            (prop::sample::select(vec!["a", "b", "c", "d"]), 0u32..4)
                .prop_map(|(b, d)| VarRef::new(b, d)),
            0..10,
        )
    }

    proptest! {
        #[test]
        fn ominus_is_subset(x in arb_set(), y in arb_set()) {
            prop_assert!(ominus(&x, &y).is_subset(&x));
        }

        #[test]
        fn ominus_is_monotone_in_y(x in arb_set(), y in arb_set(), extra in arb_set()) {
            let bigger: BTreeSet<_> = y.union(&extra).cloned().collect();
            prop_assert!(ominus(&x, &bigger).is_subset(&ominus(&x, &y)));
        }
    }
}
